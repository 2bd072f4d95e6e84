use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The supported finite Coxeter types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoxeterType {
    A(usize),
    B(usize),
    D(usize),
    E(usize),
    F4,
    H(usize),
    /// Dihedral type with bond strength `m`.
    I2(u32),
}

impl CoxeterType {
    pub fn rank(&self) -> usize {
        match *self {
            CoxeterType::A(n) | CoxeterType::B(n) | CoxeterType::D(n) => n,
            CoxeterType::E(n) | CoxeterType::H(n) => n,
            CoxeterType::F4 => 4,
            CoxeterType::I2(_) => 2,
        }
    }

    /// Family letter as used in cache headers: `A`, `B`, ..., `I2(m)`.
    pub fn family_tag(&self) -> String {
        match self {
            CoxeterType::A(_) => "A".into(),
            CoxeterType::B(_) => "B".into(),
            CoxeterType::D(_) => "D".into(),
            CoxeterType::E(_) => "E".into(),
            CoxeterType::F4 => "F".into(),
            CoxeterType::H(_) => "H".into(),
            CoxeterType::I2(m) => format!("I2({m})"),
        }
    }

    /// Group order, computed without enumerating.
    pub fn order(&self) -> u64 {
        fn fact(n: usize) -> u64 {
            (1..=n as u64).product()
        }
        match *self {
            CoxeterType::A(n) => fact(n + 1),
            CoxeterType::B(n) => (1u64 << n) * fact(n),
            CoxeterType::D(n) => (1u64 << (n - 1)) * fact(n),
            CoxeterType::E(6) => 51_840,
            CoxeterType::E(7) => 2_903_040,
            CoxeterType::E(_) => 696_729_600,
            CoxeterType::F4 => 1152,
            CoxeterType::H(3) => 120,
            CoxeterType::H(_) => 14_400,
            CoxeterType::I2(m) => 2 * m as u64,
        }
    }

    /// Parses a family tag plus rank (or bond strength for `I2`).
    pub fn from_tag(tag: &str, rank_or_m: u32) -> Result<Self> {
        let n = rank_or_m as usize;
        Ok(match tag.to_ascii_uppercase().as_str() {
            "A" => CoxeterType::A(n),
            "B" | "C" => CoxeterType::B(n),
            "D" => CoxeterType::D(n),
            "E" => CoxeterType::E(n),
            "F" if n == 4 => CoxeterType::F4,
            "H" => CoxeterType::H(n),
            "I2" | "I" => CoxeterType::I2(rank_or_m),
            _ => return Err(Error::UnsupportedType(format!("{tag}{rank_or_m}"))),
        })
    }
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterType::I2(m) => write!(f, "I2({m})"),
            CoxeterType::F4 => f.write_str("F4"),
            t => write!(f, "{}{}", t.family_tag(), t.rank()),
        }
    }
}

/// A Coxeter graph: the matrix of orders `m(s, t)` together with its type.
///
/// Generators are numbered from 0 internally and printed from 1. Labelings:
/// in `B_n` the pair (1, 2) has order 4; in `D_n` generator 3 is the branch
/// node with 1 and 2 attached to it only; `F4` has the 4-bond between 2 and 3;
/// `H_n` has the 5-bond between 1 and 2; `E_n` uses the chain 1-3-4-...-n
/// with 2 attached to 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxeterGraph {
    kind: CoxeterType,
    bonds: Vec<Vec<u32>>,
}

/// Options for [`build_graph`].
#[derive(Debug, Clone, Copy, Default)]
pub struct GraphOptions {
    /// Accept `D3` as an alias of `A3` (branch node 3, leaves 1 and 2).
    pub allow_d3: bool,
}

/// Builds the Coxeter graph of a supported finite type.
pub fn build_graph(kind: CoxeterType, opts: GraphOptions) -> Result<CoxeterGraph> {
    let unsupported = || Err(Error::UnsupportedType(kind.to_string()));
    let n = kind.rank();
    let mut edges: Vec<(usize, usize, u32)> = Vec::new();
    let chain = |edges: &mut Vec<(usize, usize, u32)>, from: usize, to: usize| {
        for i in from..to {
            edges.push((i, i + 1, 3));
        }
    };
    match kind {
        CoxeterType::A(n) => {
            if n < 1 {
                return unsupported();
            }
            chain(&mut edges, 0, n - 1);
        }
        CoxeterType::B(n) => {
            if n < 2 {
                return unsupported();
            }
            edges.push((0, 1, 4));
            chain(&mut edges, 1, n - 1);
        }
        CoxeterType::D(n) => {
            if n < 3 || (n == 3 && !opts.allow_d3) {
                return unsupported();
            }
            edges.push((0, 2, 3));
            edges.push((1, 2, 3));
            chain(&mut edges, 2, n - 1);
        }
        CoxeterType::E(n) => {
            if !(6..=8).contains(&n) {
                return unsupported();
            }
            edges.push((0, 2, 3));
            edges.push((1, 3, 3));
            chain(&mut edges, 2, n - 1);
        }
        CoxeterType::F4 => {
            edges.push((0, 1, 3));
            edges.push((1, 2, 4));
            edges.push((2, 3, 3));
        }
        CoxeterType::H(n) => {
            if !(3..=4).contains(&n) {
                return unsupported();
            }
            edges.push((0, 1, 5));
            chain(&mut edges, 1, n - 1);
        }
        CoxeterType::I2(m) => {
            if m == 0 {
                return Err(Error::UnsupportedType(
                    "I2 with a bond of infinite strength".into(),
                ));
            }
            if m < 3 {
                return unsupported();
            }
            edges.push((0, 1, m));
        }
    }
    let mut bonds = vec![vec![2u32; n]; n];
    for (i, row) in bonds.iter_mut().enumerate() {
        row[i] = 1;
    }
    for (a, b, m) in edges {
        bonds[a][b] = m;
        bonds[b][a] = m;
    }
    Ok(CoxeterGraph { kind, bonds })
}

impl CoxeterGraph {
    /// Shorthand for [`build_graph`] with default options.
    pub fn new(kind: CoxeterType) -> Result<Self> {
        build_graph(kind, GraphOptions::default())
    }

    pub fn kind(&self) -> CoxeterType {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.bonds.len()
    }

    /// Order of `st`; 1 on the diagonal.
    pub fn m(&self, s: u8, t: u8) -> u32 {
        self.bonds[s as usize][t as usize]
    }

    pub fn commute(&self, s: u8, t: u8) -> bool {
        self.bonds[s as usize][t as usize] <= 2
    }

    pub fn bonds(&self) -> &[Vec<u32>] {
        &self.bonds
    }

    /// Whether the graph contains `D4` as a subgraph: a node joined by simple
    /// bonds to three pairwise commuting generators.
    pub fn contains_d4(&self) -> bool {
        let n = self.rank() as u8;
        for c in 0..n {
            let nbrs: Vec<u8> = (0..n).filter(|&t| t != c && self.m(c, t) == 3).collect();
            for (i, &a) in nbrs.iter().enumerate() {
                for (j, &b) in nbrs.iter().enumerate().skip(i + 1) {
                    for &d in &nbrs[j + 1..] {
                        if self.commute(a, b) && self.commute(a, d) && self.commute(b, d) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b2_has_a_four_bond() {
        let g = CoxeterGraph::new(CoxeterType::B(2)).unwrap();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.m(0, 1), 4);
        let g = CoxeterGraph::new(CoxeterType::B(4)).unwrap();
        assert_eq!((g.m(1, 2), g.m(2, 3), g.m(0, 2)), (3, 3, 2));
    }

    #[test]
    fn d_labeling_has_branch_at_three() {
        let g = CoxeterGraph::new(CoxeterType::D(5)).unwrap();
        for leaf in [0u8, 1] {
            for t in 0..5u8 {
                if t != leaf {
                    assert_eq!(g.m(leaf, t), if t == 2 { 3 } else { 2 });
                }
            }
        }
        assert_eq!(g.m(2, 3), 3);
        assert_eq!(g.m(3, 4), 3);
    }

    #[test]
    fn matrices_are_symmetric_with_unit_diagonal() {
        for kind in [
            CoxeterType::A(4),
            CoxeterType::B(3),
            CoxeterType::D(4),
            CoxeterType::E(6),
            CoxeterType::F4,
            CoxeterType::H(4),
            CoxeterType::I2(7),
        ] {
            let g = CoxeterGraph::new(kind).unwrap();
            for s in 0..g.rank() as u8 {
                assert_eq!(g.m(s, s), 1);
                for t in 0..g.rank() as u8 {
                    assert_eq!(g.m(s, t), g.m(t, s));
                    if s != t {
                        assert!(g.m(s, t) >= 2);
                    }
                }
            }
        }
    }

    #[test]
    fn d3_needs_the_alias_flag() {
        assert!(CoxeterGraph::new(CoxeterType::D(3)).is_err());
        let g = build_graph(CoxeterType::D(3), GraphOptions { allow_d3: true }).unwrap();
        assert_eq!(g.m(0, 2), 3);
        assert_eq!(g.m(1, 2), 3);
        assert_eq!(g.m(0, 1), 2);
    }

    #[test]
    fn rejects_unsupported() {
        assert!(CoxeterGraph::new(CoxeterType::I2(0)).is_err());
        assert!(CoxeterGraph::new(CoxeterType::I2(2)).is_err());
        assert!(CoxeterGraph::new(CoxeterType::H(5)).is_err());
        assert!(CoxeterGraph::new(CoxeterType::E(9)).is_err());
        assert!(CoxeterGraph::new(CoxeterType::B(1)).is_err());
        assert!(CoxeterType::from_tag("Z", 3).is_err());
        assert!(CoxeterType::from_tag("F", 3).is_err());
    }

    #[test]
    fn d4_subgraph_predicate() {
        let yes = [CoxeterType::D(4), CoxeterType::D(5), CoxeterType::E(6)];
        let no = [
            CoxeterType::A(4),
            CoxeterType::B(4),
            CoxeterType::F4,
            CoxeterType::H(4),
            CoxeterType::I2(6),
        ];
        for k in yes {
            assert!(CoxeterGraph::new(k).unwrap().contains_d4(), "{k}");
        }
        for k in no {
            assert!(!CoxeterGraph::new(k).unwrap().contains_d4(), "{k}");
        }
    }

    #[test]
    fn orders() {
        assert_eq!(CoxeterType::A(3).order(), 24);
        assert_eq!(CoxeterType::B(3).order(), 48);
        assert_eq!(CoxeterType::D(4).order(), 192);
        assert_eq!(CoxeterType::I2(5).order(), 10);
    }
}
