//! Kazhdan–Lusztig preorders and cells.
//!
//! An edge `w -> x` means `x <=_L w` elementarily: `C'_x` occurs in
//! `C'_s C'_w` for some `s` with `sw > w`. Cells are the strongly connected
//! components of the edge graph.

use std::collections::{BTreeMap, VecDeque};

use petgraph::algo::{is_cyclic_directed, tarjan_scc};
use petgraph::graph::DiGraph;
use rayon::prelude::*;

use crate::coxeter::{CoxeterGroup, CoxeterType, Element, Gen, Side};
use crate::hecke::KlTable;
use crate::laurent::Coefficient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellSide {
    Left,
    Right,
    TwoSided,
}

/// One elementary edge: `to` is below the source, via `s` on `side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub to: Element,
    pub s: Gen,
    pub side: Side,
}

/// The elementary-edge graph of a preorder on `W`.
#[derive(Debug, Clone)]
pub struct PreorderGraph {
    side: CellSide,
    reversed: bool,
    /// Sorted by target, one edge per target.
    edges: Vec<Vec<Edge>>,
}

fn left_edges<C: Coefficient>(table: &KlTable<C>) -> Vec<Vec<Edge>> {
    let g = table.group();
    g.elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&w| {
            let mut out: BTreeMap<Element, Gen> = BTreeMap::new();
            for s in 0..g.rank() as Gen {
                if g.is_left_descent(w, s) {
                    continue;
                }
                out.entry(g.left(w, s)).or_insert(s);
                for &(x, _) in table.mu_row(w) {
                    if g.is_left_descent(x, s) {
                        out.entry(x).or_insert(s);
                    }
                }
            }
            out.into_iter()
                .map(|(to, s)| Edge {
                    to,
                    s,
                    side: Side::Left,
                })
                .collect()
        })
        .collect()
}

fn conjugate(group: &CoxeterGroup, edges: &[Vec<Edge>]) -> Vec<Vec<Edge>> {
    let mut out: Vec<Vec<Edge>> = vec![Vec::new(); edges.len()];
    for w in group.elements() {
        let wi = group.inverse(w);
        out[wi.index()] = edges[w.index()]
            .iter()
            .map(|e| Edge {
                to: group.inverse(e.to),
                s: e.s,
                side: Side::Right,
            })
            .collect();
        out[wi.index()].sort_by_key(|e| e.to);
    }
    out
}

/// Builds the elementary-edge graph for one side.
pub fn build_preorder<C: Coefficient>(table: &KlTable<C>, side: CellSide) -> PreorderGraph {
    let g = table.group();
    let left = left_edges(table);
    let edges = match side {
        CellSide::Left => left,
        CellSide::Right => conjugate(g, &left),
        CellSide::TwoSided => {
            let right = conjugate(g, &left);
            left.into_iter()
                .zip(right)
                .map(|(l, r)| {
                    let mut merged: BTreeMap<Element, Edge> = BTreeMap::new();
                    for e in l.into_iter().chain(r) {
                        merged.entry(e.to).or_insert(e);
                    }
                    merged.into_values().collect()
                })
                .collect()
        }
    };
    PreorderGraph {
        side,
        reversed: false,
        edges,
    }
}

impl PreorderGraph {
    pub fn side(&self) -> CellSide {
        self.side
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges_from(&self, w: Element) -> &[Edge] {
        &self.edges[w.index()]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// The opposite preorder (`>=` instead of `<=`).
    pub fn reversed(&self) -> PreorderGraph {
        let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); self.edges.len()];
        for (i, out) in self.edges.iter().enumerate() {
            for e in out {
                edges[e.to.index()].push(Edge {
                    to: Element(i as u32),
                    ..*e
                });
            }
        }
        PreorderGraph {
            side: self.side,
            reversed: !self.reversed,
            edges,
        }
    }

    /// A shortest chain of elementary edges from `from` down to `to`.
    pub fn chain(&self, from: Element, to: Element) -> Option<Vec<Element>> {
        let mut prev: Vec<Option<Element>> = vec![None; self.edges.len()];
        let mut queue = VecDeque::from([from]);
        prev[from.index()] = Some(from);
        while let Some(w) = queue.pop_front() {
            if w == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur.index()].expect("visited");
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for e in &self.edges[w.index()] {
                if prev[e.to.index()].is_none() {
                    prev[e.to.index()] = Some(w);
                    queue.push_back(e.to);
                }
            }
        }
        None
    }

    fn digraph(&self) -> DiGraph<(), ()> {
        let mut dg = DiGraph::with_capacity(self.edges.len(), self.edge_count());
        for _ in 0..self.edges.len() {
            dg.add_node(());
        }
        for (i, out) in self.edges.iter().enumerate() {
            for e in out {
                dg.add_edge((i as u32).into(), (e.to.0).into(), ());
            }
        }
        dg
    }
}

/// Cells of one side with the induced order.
#[derive(Debug, Clone)]
pub struct CellPartition {
    pub side: CellSide,
    /// Each cell sorted; cells sorted by their least element.
    pub cells: Vec<Vec<Element>>,
    /// `order[i]` lists the cells `j != i` with an edge from cell `i` into
    /// cell `j`, i.e. `j` lies directly below `i`.
    pub order: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl CellPartition {
    pub fn cell_of(&self, w: Element) -> usize {
        self.cell_of[w.index()]
    }

    pub fn same_cell(&self, x: Element, w: Element) -> bool {
        self.cell_of(x) == self.cell_of(w)
    }

    /// Whether the cell order has no cycles.
    pub fn is_acyclic(&self) -> bool {
        let mut dg: DiGraph<(), ()> = DiGraph::new();
        for _ in &self.cells {
            dg.add_node(());
        }
        for (i, below) in self.order.iter().enumerate() {
            for &j in below {
                dg.add_edge((i as u32).into(), (j as u32).into(), ());
            }
        }
        !is_cyclic_directed(&dg)
    }
}

/// Strongly connected components of the preorder.
pub fn compute_cells(pre: &PreorderGraph) -> CellPartition {
    let mut cells: Vec<Vec<Element>> = tarjan_scc(&pre.digraph())
        .into_iter()
        .map(|comp| {
            let mut c: Vec<Element> = comp
                .into_iter()
                .map(|n| Element(n.index() as u32))
                .collect();
            c.sort();
            c
        })
        .collect();
    cells.sort_by_key(|c| c[0]);
    let mut cell_of = vec![0; pre.len()];
    for (i, c) in cells.iter().enumerate() {
        for w in c {
            cell_of[w.index()] = i;
        }
    }
    let mut order: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
    for (i, out) in pre.edges.iter().enumerate() {
        let ci = cell_of[i];
        for e in out {
            let cj = cell_of[e.to.index()];
            if cj != ci {
                order[ci].push(cj);
            }
        }
    }
    for o in &mut order {
        o.sort_unstable();
        o.dedup();
    }
    CellPartition {
        side: pre.side,
        cells,
        order,
        cell_of,
    }
}

/// An edge leaving a subset that should be closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureWitness {
    /// In the subset.
    pub upper: Element,
    /// Below `upper`, outside the subset.
    pub lower: Element,
    pub s: Gen,
    pub side: Side,
}

/// Closure of `subset` downward along the preorder: whenever `l1` is in the
/// subset and `l2 <= l1`, `l2` is in the subset. Returns every violating
/// elementary edge, least `(upper, lower)` first; empty means closed.
pub fn closure_violations(
    pre: &PreorderGraph,
    subset: impl Fn(Element) -> bool,
) -> Vec<ClosureWitness> {
    let mut out = Vec::new();
    for (i, edges) in pre.edges.iter().enumerate() {
        let upper = Element(i as u32);
        if !subset(upper) {
            continue;
        }
        for e in edges {
            if !subset(e.to) {
                out.push(ClosureWitness {
                    upper,
                    lower: e.to,
                    s: e.s,
                    side: e.side,
                });
            }
        }
    }
    out
}

/// As [`closure_violations`], returning only the least witness.
pub fn is_closed(
    pre: &PreorderGraph,
    subset: impl Fn(Element) -> bool,
) -> Result<(), ClosureWitness> {
    match closure_violations(pre, subset).first() {
        Some(&w) => Err(w),
        None => Ok(()),
    }
}

/// Intersection of one right cell with one left cell of a fully
/// commutative two-sided cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intersection {
    pub right_cell: usize,
    pub left_cell: usize,
    /// The distinguished involution of the right cell.
    pub d: Option<Element>,
    /// The distinguished involution of the left cell.
    pub d_prime: Option<Element>,
    pub k: usize,
    /// The size predicted by the type-B rule, when it applies.
    pub predicted: Option<usize>,
}

/// Structure of one fully commutative two-sided cell.
#[derive(Debug, Clone)]
pub struct FcTwoSidedCell {
    pub elements: Vec<Element>,
    pub left_cells: Vec<Vec<Element>>,
    pub right_cells: Vec<Vec<Element>>,
    /// All involutions of each left cell.
    pub involutions: Vec<Vec<Element>>,
    /// The distinguished involution of each left cell.
    pub distinguished: Vec<Option<Element>>,
    pub intersections: Vec<Intersection>,
}

#[derive(Debug, Clone)]
pub enum FcCellReport {
    Report(Vec<FcTwoSidedCell>),
    /// The fully commutative elements do not form a union of two-sided
    /// cells; the witness lies in a mixed cell.
    Unsupported {
        mixed: Element,
    },
}

/// `Delta(z) = -deg P~_{e,z}`, the degree defect of `P_{e,z}`.
pub fn delta<C: Coefficient>(table: &KlTable<C>, z: Element) -> i32 {
    let p = table.p_tilde(table.group().identity(), z);
    -p.max_exp().expect("P~_{e,z} is nonzero")
}

/// The distinguished involution of a one-sided cell: the unique element
/// minimizing `Delta`, provided it is unique and an involution. On a cell,
/// `Delta >= a` with equality exactly at distinguished involutions.
pub fn distinguished_involution<C: Coefficient>(
    table: &KlTable<C>,
    cell: &[Element],
) -> Option<Element> {
    let deltas: Vec<i32> = cell.iter().map(|&z| delta(table, z)).collect();
    let min = *deltas.iter().min()?;
    let mut at_min = cell
        .iter()
        .zip(&deltas)
        .filter(|(_, &d)| d == min)
        .map(|(&z, _)| z);
    let d = at_min.next()?;
    (at_min.next().is_none() && table.group().is_involution(d)).then_some(d)
}

/// The type-B rule for `|I_R ∩ I_L|`, with `W'` the parabolic subgroup
/// omitting the first generator.
pub fn intersection_rule_b(
    group: &CoxeterGroup,
    cell: &[Element],
    d: Element,
    d_prime: Element,
) -> usize {
    let in_wp = |w: Element| group.content(w) & 1 == 0;
    let all_in = cell.iter().all(|&w| in_wp(w));
    let none_in = cell.iter().all(|&w| !in_wp(w));
    if in_wp(d) != in_wp(d_prime) || all_in || none_in {
        1
    } else {
        2
    }
}

/// Left/right structure of the fully commutative two-sided cells.
pub fn fc_cell_report<C: Coefficient>(
    table: &KlTable<C>,
    left: &CellPartition,
    right: &CellPartition,
    two_sided: &CellPartition,
) -> FcCellReport {
    let group = table.group();
    let fc = group.fc_flags();
    for cell in &two_sided.cells {
        let first = fc[cell[0].index()];
        if let Some(&w) = cell.iter().find(|w| fc[w.index()] != first) {
            return FcCellReport::Unsupported { mixed: w };
        }
    }
    let is_b = matches!(group.graph().kind(), CoxeterType::B(_));
    let mut report = Vec::new();
    for cell in two_sided.cells.iter().filter(|c| fc[c[0].index()]) {
        let pick = |part: &CellPartition| -> Vec<Vec<Element>> {
            let mut ids: Vec<usize> = cell.iter().map(|&w| part.cell_of(w)).collect();
            ids.sort_unstable();
            ids.dedup();
            ids.into_iter().map(|i| part.cells[i].clone()).collect()
        };
        let left_cells = pick(left);
        let right_cells = pick(right);
        let involutions = left_cells
            .iter()
            .map(|c| {
                c.iter()
                    .copied()
                    .filter(|&w| group.is_involution(w))
                    .collect()
            })
            .collect();
        let distinguished: Vec<Option<Element>> = left_cells
            .iter()
            .map(|c| distinguished_involution(table, c))
            .collect();
        let right_d: Vec<Option<Element>> = right_cells
            .iter()
            .map(|c| distinguished_involution(table, c))
            .collect();
        let mut intersections = Vec::new();
        for (ri, rc) in right_cells.iter().enumerate() {
            for (li, lc) in left_cells.iter().enumerate() {
                let k = rc.iter().filter(|w| lc.binary_search(w).is_ok()).count();
                let (d, d_prime) = (right_d[ri], distinguished[li]);
                let predicted = match (is_b, d, d_prime) {
                    (true, Some(d), Some(dp)) => Some(intersection_rule_b(group, cell, d, dp)),
                    _ => None,
                };
                intersections.push(Intersection {
                    right_cell: ri,
                    left_cell: li,
                    d,
                    d_prime,
                    k,
                    predicted,
                });
            }
        }
        report.push(FcTwoSidedCell {
            elements: cell.clone(),
            left_cells,
            right_cells,
            involutions,
            distinguished,
            intersections,
        });
    }
    FcCellReport::Report(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterGraph;
    use crate::hecke::{hecke_mult, DescentChoice};
    use std::sync::Arc;

    fn table(kind: CoxeterType) -> KlTable {
        let g = Arc::new(CoxeterGroup::new(CoxeterGraph::new(kind).unwrap()).unwrap());
        KlTable::build(g, DescentChoice::Lowest).unwrap()
    }

    /// Cells by mutual reachability, from a transitive closure.
    fn brute_cells(pre: &PreorderGraph) -> Vec<Vec<Element>> {
        let n = pre.len();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            let mut stack = vec![i];
            row[i] = true;
            while let Some(u) = stack.pop() {
                for e in pre.edges_from(Element(u as u32)) {
                    if !row[e.to.index()] {
                        row[e.to.index()] = true;
                        stack.push(e.to.index());
                    }
                }
            }
        }
        let mut seen = vec![false; n];
        let mut cells = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let c: Vec<Element> = (0..n)
                .filter(|&j| reach[i][j] && reach[j][i])
                .map(|j| Element(j as u32))
                .collect();
            for w in &c {
                seen[w.index()] = true;
            }
            cells.push(c);
        }
        cells
    }

    fn words(g: &CoxeterGroup, cells: &[Vec<Element>]) -> Vec<Vec<String>> {
        cells
            .iter()
            .map(|c| c.iter().map(|&w| g.format(w)).collect())
            .collect()
    }

    #[test]
    fn a2_cells() {
        let t = table(CoxeterType::A(2));
        let g = t.group().clone();
        let left = compute_cells(&build_preorder(&t, CellSide::Left));
        assert_eq!(
            words(&g, &left.cells),
            [vec!["e"], vec!["1", "2.1"], vec!["2", "1.2"], vec!["1.2.1"]]
        );
        let two = compute_cells(&build_preorder(&t, CellSide::TwoSided));
        assert_eq!(two.cells.len(), 3);
        let pre = build_preorder(&t, CellSide::Left);
        let s2 = g.parse("2").unwrap();
        assert!(pre
            .edges_from(s2)
            .iter()
            .any(|e| g.format(e.to) == "1.2" && e.s == 0));
    }

    #[test]
    fn a2_edges_match_product_expansion() {
        let t = table(CoxeterType::A(2));
        let g = t.group().clone();
        let pre = build_preorder(&t, CellSide::Left);
        let mut count = 0;
        for w in g.elements() {
            let mut targets = std::collections::BTreeSet::new();
            for s in 0..2 {
                if g.is_left_descent(w, s) {
                    continue;
                }
                let prod = hecke_mult(&g, &t.clprime_elt(g.generator(s)), &t.clprime_elt(w));
                targets.extend(t.to_clprime(&prod).support());
            }
            let got: Vec<Element> = pre.edges_from(w).iter().map(|e| e.to).collect();
            assert_eq!(got, targets.into_iter().collect::<Vec<_>>());
            count += got.len();
        }
        assert_eq!(count, pre.edge_count());
    }

    #[test]
    fn dihedral_two_sided_cells() {
        let t = table(CoxeterType::I2(4));
        let g = t.group().clone();
        let two = compute_cells(&build_preorder(&t, CellSide::TwoSided));
        assert_eq!(two.cells.len(), 3);
        assert_eq!(two.cells[0], vec![g.identity()]);
        assert_eq!(two.cells[2], vec![g.longest()]);
    }

    #[test]
    fn scc_matches_brute_force() {
        for kind in [
            CoxeterType::A(3),
            CoxeterType::B(3),
            CoxeterType::I2(5),
            CoxeterType::D(4),
        ] {
            let t = table(kind);
            for side in [CellSide::Left, CellSide::Right, CellSide::TwoSided] {
                let pre = build_preorder(&t, side);
                let cells = compute_cells(&pre);
                let mut brute = brute_cells(&pre);
                brute.sort_by_key(|c| c[0]);
                assert_eq!(cells.cells, brute, "{kind} {side:?}");
                assert!(cells.is_acyclic());
            }
        }
    }

    #[test]
    fn right_is_left_under_inversion() {
        let t = table(CoxeterType::B(3));
        let g = t.group().clone();
        let left = build_preorder(&t, CellSide::Left);
        let right = build_preorder(&t, CellSide::Right);
        for w in g.elements() {
            let mut mapped: Vec<Element> =
                left.edges_from(w).iter().map(|e| g.inverse(e.to)).collect();
            mapped.sort();
            let got: Vec<Element> = right
                .edges_from(g.inverse(w))
                .iter()
                .map(|e| e.to)
                .collect();
            assert_eq!(mapped, got);
        }
    }

    #[test]
    fn two_sided_cells_are_unions() {
        let t = table(CoxeterType::B(3));
        let l = compute_cells(&build_preorder(&t, CellSide::Left));
        let r = compute_cells(&build_preorder(&t, CellSide::Right));
        let two = compute_cells(&build_preorder(&t, CellSide::TwoSided));
        for part in [&l, &r] {
            for c in &part.cells {
                assert!(c.iter().all(|&w| two.same_cell(w, c[0])));
            }
        }
    }

    #[test]
    fn closure() {
        let t = table(CoxeterType::B(3));
        let g = t.group().clone();
        let pre = build_preorder(&t, CellSide::Left);
        assert!(is_closed(&pre, |_| true).is_ok());
        assert!(is_closed(&pre, |w| !g.is_fully_commutative(w)).is_ok());
        assert!(is_closed(&pre, |w| w == g.longest()).is_ok());
        let err = is_closed(&pre, |w| w == g.identity()).unwrap_err();
        assert_eq!(err.upper, g.identity());
    }

    #[test]
    fn chains_follow_edges() {
        let t = table(CoxeterType::A(3));
        let g = t.group().clone();
        let pre = build_preorder(&t, CellSide::Left);
        let path = pre.chain(g.identity(), g.longest()).unwrap();
        for pair in path.windows(2) {
            assert!(pre.edges_from(pair[0]).iter().any(|e| e.to == pair[1]));
        }
        assert!(pre.chain(g.longest(), g.identity()).is_none());
    }
}
