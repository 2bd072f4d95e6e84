use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::coxeter::commutation;
use crate::coxeter::graph::CoxeterGraph;
use crate::error::{Error, Result};

/// A generator, numbered from 0.
pub type Gen = u8;

/// Default refusal threshold for [`CoxeterGroup::new`].
pub const DEFAULT_CAPACITY: u64 = 2_000_000;

/// An element of an enumerated [`CoxeterGroup`].
///
/// Elements are indices into the group's tables, sorted by length and then
/// by canonical word, so the derived `Ord` is that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub u32);

impl Element {
    pub const IDENTITY: Element = Element(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Formats a 0-based word in the dotted 1-based text form (`e` when empty).
pub fn format_word(word: &[Gen]) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    word.iter()
        .map(|&s| (s as u32 + 1).to_string())
        .collect::<Vec<_>>()
        .join(".")
}

/// Parses the dotted text form into a 0-based word, checking generator range.
pub fn parse_word(text: &str, rank: usize) -> Result<Vec<Gen>> {
    let text = text.trim();
    if text == "e" {
        return Ok(Vec::new());
    }
    text.split('.')
        .map(|tok| match tok.parse::<usize>() {
            Ok(i) if (1..=rank).contains(&i) => Ok((i - 1) as Gen),
            _ => Err(Error::InvalidWord(text.to_string())),
        })
        .collect()
}

/// A finite Coxeter group, fully enumerated, with multiplication tables by
/// generators on both sides.
pub struct CoxeterGroup {
    graph: CoxeterGraph,
    rank: usize,
    len: Vec<u16>,
    left: Vec<u32>,
    right: Vec<u32>,
    inverse: Vec<u32>,
    ldes: Vec<u32>,
    rdes: Vec<u32>,
    content: Vec<u32>,
    words: Vec<Vec<Gen>>,
    fc: OnceLock<Vec<bool>>,
}

impl fmt::Debug for CoxeterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoxeterGroup")
            .field("type", &self.graph.kind())
            .field("order", &self.order())
            .finish()
    }
}

/// Root orbit of the geometric representation, used only to identify group
/// elements while enumerating. Returns the permutation action of each
/// generator on the roots and the index of each simple root.
fn root_action(graph: &CoxeterGraph) -> (Vec<Vec<u16>>, Vec<bool>) {
    let n = graph.rank();
    let form: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| -(std::f64::consts::PI / graph.m(i as Gen, j as Gen) as f64).cos())
                .collect()
        })
        .collect();
    let reflect = |s: usize, v: &[f64]| -> Vec<f64> {
        let b: f64 = (0..n).map(|j| form[s][j] * v[j]).sum();
        let mut out = v.to_vec();
        out[s] -= 2.0 * b;
        out
    };
    let find = |roots: &[Vec<f64>], v: &[f64]| {
        roots
            .iter()
            .position(|r| r.iter().zip(v).all(|(a, b)| (a - b).abs() < 1e-7))
    };
    let mut roots: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut head = 0;
    while head < roots.len() {
        for s in 0..n {
            let r = reflect(s, &roots[head]);
            if find(&roots, &r).is_none() {
                roots.push(r);
            }
        }
        head += 1;
    }
    let perm = (0..n)
        .map(|s| {
            roots
                .iter()
                .map(|r| find(&roots, &reflect(s, r)).expect("root orbit is closed") as u16)
                .collect()
        })
        .collect();
    let positive = roots.iter().map(|r| r.iter().sum::<f64>() > 0.0).collect();
    (perm, positive)
}

impl CoxeterGroup {
    /// Enumerates the group, refusing orders above [`DEFAULT_CAPACITY`].
    pub fn new(graph: CoxeterGraph) -> Result<Self> {
        Self::with_capacity(graph, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(graph: CoxeterGraph, capacity: u64) -> Result<Self> {
        let order = graph.kind().order();
        if order > capacity {
            return Err(Error::Capacity { order, capacity });
        }
        let rank = graph.rank();
        let (perm, positive) = root_action(&graph);

        // Breadth-first closure under left multiplication. An element is keyed
        // by the images of the simple roots; w(a_s) negative iff ws < w.
        let mut keys: Vec<Vec<u16>> = vec![(0..rank as u16).collect()];
        let mut lookup: HashMap<Vec<u16>, u32> = HashMap::new();
        lookup.insert(keys[0].clone(), 0);
        let mut len: Vec<u16> = vec![0];
        let mut left: Vec<u32> = Vec::new();
        let mut head = 0;
        while head < keys.len() {
            for p in perm.iter().take(rank) {
                let key: Vec<u16> = keys[head].iter().map(|&r| p[r as usize]).collect();
                let idx = match lookup.get(&key) {
                    Some(&i) => i,
                    None => {
                        let i = keys.len() as u32;
                        lookup.insert(key.clone(), i);
                        keys.push(key);
                        len.push(len[head] + 1);
                        i
                    }
                };
                left.push(idx);
            }
            head += 1;
        }
        let total = keys.len();
        debug_assert_eq!(total as u64, order);

        // canonical word = smallest left descent, then the canonical word of
        // the remainder; BFS order is by length so the remainder is known
        let mut words: Vec<Vec<Gen>> = vec![Vec::new(); total];
        for w in 1..total {
            let s = (0..rank)
                .find(|&s| len[left[w * rank + s] as usize] < len[w])
                .expect("nonidentity has a left descent");
            let rest = left[w * rank + s] as usize;
            let mut word = Vec::with_capacity(len[w] as usize);
            word.push(s as Gen);
            word.extend_from_slice(&words[rest]);
            words[w] = word;
        }

        // reindex by (length, canonical word)
        let mut order_idx: Vec<usize> = (0..total).collect();
        order_idx.sort_by(|&a, &b| (len[a], &words[a]).cmp(&(len[b], &words[b])));
        let mut new_of = vec![0u32; total];
        for (new, &old) in order_idx.iter().enumerate() {
            new_of[old] = new as u32;
        }
        let mut g_left = vec![0u32; total * rank];
        let mut g_len = vec![0u16; total];
        let mut g_words = vec![Vec::new(); total];
        let mut rdes = vec![0u32; total];
        for (old, key) in keys.iter().enumerate() {
            let new = new_of[old] as usize;
            g_len[new] = len[old];
            for s in 0..rank {
                g_left[new * rank + s] = new_of[left[old * rank + s] as usize];
                if !positive[key[s] as usize] {
                    rdes[new] |= 1 << s;
                }
            }
        }
        for (old, w) in words.into_iter().enumerate() {
            g_words[new_of[old] as usize] = w;
        }
        let mut inverse = vec![0u32; total];
        for w in 0..total {
            let mut x = 0u32;
            for &s in &g_words[w] {
                x = g_left[x as usize * rank + s as usize];
            }
            inverse[w] = x;
        }
        let mut g_right = vec![0u32; total * rank];
        let mut ldes = vec![0u32; total];
        let mut content = vec![0u32; total];
        for w in 0..total {
            for s in 0..rank {
                let inv = inverse[w] as usize;
                g_right[w * rank + s] = inverse[g_left[inv * rank + s] as usize];
                if g_len[g_left[w * rank + s] as usize] < g_len[w] {
                    ldes[w] |= 1 << s;
                }
            }
            content[w] = g_words[w].iter().fold(0, |acc, &s| acc | (1 << s));
        }
        Ok(CoxeterGroup {
            graph,
            rank,
            len: g_len,
            left: g_left,
            right: g_right,
            inverse,
            ldes,
            rdes,
            content,
            words: g_words,
            fc: OnceLock::new(),
        })
    }

    pub fn graph(&self) -> &CoxeterGraph {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.len.len()
    }

    pub fn identity(&self) -> Element {
        Element::IDENTITY
    }

    pub fn longest(&self) -> Element {
        Element(self.order() as u32 - 1)
    }

    pub fn generator(&self, s: Gen) -> Element {
        self.left(Element::IDENTITY, s)
    }

    /// All elements in (length, canonical word) order.
    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Element> + ExactSizeIterator {
        (0..self.order() as u32).map(Element)
    }

    /// Elements of length at most `max_length` (all when `None`), ordered.
    pub fn enumerate(&self, max_length: Option<usize>) -> Vec<Element> {
        self.elements()
            .filter(|&w| max_length.is_none_or(|m| self.length(w) <= m))
            .collect()
    }

    pub fn length(&self, w: Element) -> usize {
        self.len[w.index()] as usize
    }

    /// `sw`.
    pub fn left(&self, w: Element, s: Gen) -> Element {
        Element(self.left[w.index() * self.rank + s as usize])
    }

    /// `ws`.
    pub fn right(&self, w: Element, s: Gen) -> Element {
        Element(self.right[w.index() * self.rank + s as usize])
    }

    pub fn mult_gen(&self, w: Element, s: Gen, side: Side) -> Element {
        match side {
            Side::Left => self.left(w, s),
            Side::Right => self.right(w, s),
        }
    }

    pub fn inverse(&self, w: Element) -> Element {
        Element(self.inverse[w.index()])
    }

    /// Left descent set as a bitmask over generators.
    pub fn left_descents(&self, w: Element) -> u32 {
        self.ldes[w.index()]
    }

    pub fn right_descents(&self, w: Element) -> u32 {
        self.rdes[w.index()]
    }

    pub fn is_left_descent(&self, w: Element, s: Gen) -> bool {
        self.ldes[w.index()] >> s & 1 == 1
    }

    pub fn is_right_descent(&self, w: Element, s: Gen) -> bool {
        self.rdes[w.index()] >> s & 1 == 1
    }

    /// Set of generators occurring in a reduced word, as a bitmask.
    pub fn content(&self, w: Element) -> u32 {
        self.content[w.index()]
    }

    /// Lexicographically least reduced word (0-based generators).
    pub fn word(&self, w: Element) -> &[Gen] {
        &self.words[w.index()]
    }

    pub fn format(&self, w: Element) -> String {
        format_word(self.word(w))
    }

    /// Product of a word, reduced or not.
    pub fn from_word(&self, word: &[Gen]) -> Result<Element> {
        let mut w = Element::IDENTITY;
        for &s in word {
            if s as usize >= self.rank {
                return Err(Error::InvalidWord(format_word(word)));
            }
            w = self.right(w, s);
        }
        Ok(w)
    }

    /// Parses a dotted word, requiring it to be reduced.
    pub fn parse(&self, text: &str) -> Result<Element> {
        let word = parse_word(text, self.rank)?;
        let w = self.from_word(&word)?;
        if self.length(w) != word.len() {
            return Err(Error::InvalidWord(format!("{text} is not reduced")));
        }
        Ok(w)
    }

    pub fn mul(&self, x: Element, y: Element) -> Element {
        self.word(y).iter().fold(x, |acc, &s| self.right(acc, s))
    }

    /// Bruhat order test. Uses the lifting property along right descents of
    /// `w`: for `ws < w`, `x <= w` iff `min(x, xs) <= ws`.
    pub fn bruhat_leq(&self, x: Element, w: Element) -> bool {
        let (mut x, mut w) = (x, w);
        loop {
            if self.length(x) > self.length(w) {
                return false;
            }
            if self.length(x) == self.length(w) {
                return x == w;
            }
            let s = self.rdes[w.index()].trailing_zeros() as Gen;
            if self.is_right_descent(x, s) {
                x = self.right(x, s);
            }
            w = self.right(w, s);
        }
    }

    /// Full-commutativity flags for every element, computed once.
    pub fn fc_flags(&self) -> &[bool] {
        self.fc.get_or_init(|| {
            let mut flags = vec![true; self.order()];
            for w in self.elements() {
                let below_bad = (0..self.rank as Gen).any(|s| {
                    (self.is_right_descent(w, s) && !flags[self.right(w, s).index()])
                        || (self.is_left_descent(w, s) && !flags[self.left(w, s).index()])
                });
                flags[w.index()] =
                    !below_bad && commutation::is_fully_commutative(&self.graph, self.word(w));
            }
            flags
        })
    }

    pub fn is_fully_commutative(&self, w: Element) -> bool {
        self.fc_flags()[w.index()]
    }

    /// The fully commutative elements, in element order.
    pub fn fully_commutative(&self) -> Vec<Element> {
        self.elements()
            .filter(|&w| self.is_fully_commutative(w))
            .collect()
    }

    /// A reduced factorization of `w` through a braid factor, if `w` is not
    /// fully commutative.
    pub fn braid_factorization(
        &self,
        w: Element,
        choice: commutation::BraidChoice,
    ) -> Option<commutation::BraidFactorization> {
        commutation::find_braid(&self.graph, self.word(w), choice)
    }

    pub fn is_involution(&self, w: Element) -> bool {
        self.inverse(w) == w
    }

    /// Elements of the standard parabolic subgroup generated by `mask`.
    pub fn parabolic(&self, mask: u32) -> Vec<Element> {
        self.elements()
            .filter(|&w| self.content(w) & !mask == 0)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::graph::CoxeterType;

    fn group(kind: CoxeterType) -> CoxeterGroup {
        CoxeterGroup::new(CoxeterGraph::new(kind).unwrap()).unwrap()
    }

    #[test]
    fn orders_by_closure() {
        assert_eq!(group(CoxeterType::A(3)).order(), 24);
        assert_eq!(group(CoxeterType::B(3)).order(), 48);
        assert_eq!(group(CoxeterType::I2(5)).order(), 10);
        assert_eq!(group(CoxeterType::D(4)).order(), 192);
        assert_eq!(group(CoxeterType::H(3)).order(), 120);
        assert_eq!(group(CoxeterType::F4).order(), 1152);
    }

    #[test]
    fn longest_lengths() {
        assert_eq!(
            group(CoxeterType::A(3)).length(group(CoxeterType::A(3)).longest()),
            6
        );
        let b3 = group(CoxeterType::B(3));
        assert_eq!(b3.length(b3.longest()), 9);
        let h3 = group(CoxeterType::H(3));
        assert_eq!(h3.length(h3.longest()), 15);
    }

    #[test]
    fn exchange_in_a2() {
        let g = group(CoxeterType::A(2));
        let w0 = g.parse("1.2.1").unwrap();
        // w0 = s2 s1 s2, so dropping the last s2 leaves s2 s1
        let w = g.right(w0, 1);
        assert_eq!(g.format(w), "2.1");
        assert_eq!(g.length(w), 2);
        let w = g.left(w0, 1);
        assert_eq!(g.format(w), "1.2");
        assert_eq!(g.mult_gen(g.identity(), 0, Side::Left), g.generator(0));
    }

    #[test]
    fn braid_relation_gives_same_canonical_word() {
        let g = group(CoxeterType::I2(3));
        let a = g.parse("1.2.1").unwrap();
        let b = g.parse("2.1.2").unwrap();
        assert_eq!(a, b);
        assert_eq!(g.format(b), "1.2.1");
    }

    #[test]
    fn parse_rejects_bad_words() {
        let g = group(CoxeterType::A(2));
        assert!(g.parse("1.1").is_err());
        assert!(g.parse("3").is_err());
        assert!(g.parse("1..2").is_err());
        assert_eq!(g.parse("e").unwrap(), g.identity());
    }

    #[test]
    fn capacity_guard() {
        let g = CoxeterGraph::new(CoxeterType::E(7)).unwrap();
        assert!(matches!(CoxeterGroup::new(g), Err(Error::Capacity { .. })));
        let g = CoxeterGraph::new(CoxeterType::B(4)).unwrap();
        assert!(CoxeterGroup::with_capacity(g, 100).is_err());
    }

    #[test]
    fn bruhat_examples() {
        let g = group(CoxeterType::A(2));
        let w0 = g.parse("1.2.1").unwrap();
        for x in g.elements() {
            assert!(g.bruhat_leq(g.identity(), x));
            assert!(g.bruhat_leq(x, w0));
        }
        assert!(g.bruhat_leq(g.parse("1.2").unwrap(), w0));
        assert!(!g.bruhat_leq(g.parse("2.1").unwrap(), g.parse("1.2").unwrap()));
    }

    #[test]
    fn words_are_reduced_and_canonical() {
        for kind in [CoxeterType::B(3), CoxeterType::D(4), CoxeterType::H(3)] {
            let g = group(kind);
            for w in g.elements() {
                assert_eq!(g.word(w).len(), g.length(w));
                assert_eq!(g.from_word(g.word(w)).unwrap(), w);
                assert_eq!(g.length(g.inverse(w)), g.length(w));
                for s in 0..g.rank() as Gen {
                    let up = g.length(g.right(w, s));
                    assert!(up + 1 == g.length(w) || up == g.length(w) + 1);
                }
            }
        }
    }
}
