//! Commutation classes, heaps, and full commutativity.
//!
//! A reduced word determines a heap: the partial order on letter positions
//! generated by `i < j` whenever `i` precedes `j` and the two letters do not
//! commute. Linear extensions of the heap are exactly the words in the
//! commutation class. A braid factor `sts...` of length `m(s, t) >= 3` can be
//! brought together by commutations iff the corresponding chain of `s`/`t`
//! positions is convex in the heap.

use std::collections::{HashSet, VecDeque};

use crate::coxeter::graph::CoxeterGraph;
use crate::coxeter::group::Gen;

/// Which braid occurrence [`find_braid`] reports when there are several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BraidChoice {
    #[default]
    Leftmost,
    Rightmost,
}

/// A reduced factorization `prefix * w_{st} * suffix` through the longest
/// element of a non-commuting rank-2 parabolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidFactorization {
    pub prefix: Vec<Gen>,
    /// The alternating factor `s t s ...` of length `m(s, t)`.
    pub braid: Vec<Gen>,
    pub suffix: Vec<Gen>,
}

impl BraidFactorization {
    /// The rearranged word `prefix ++ braid ++ suffix`.
    pub fn word(&self) -> Vec<Gen> {
        let mut w = self.prefix.clone();
        w.extend_from_slice(&self.braid);
        w.extend_from_slice(&self.suffix);
        w
    }
}

/// Heap of a word: `above[i]` is the set of positions strictly above `i`.
struct Heap {
    above: Vec<u128>,
}

impl Heap {
    fn new(graph: &CoxeterGraph, word: &[Gen]) -> Self {
        assert!(word.len() <= 128, "word too long for heap bitsets");
        let n = word.len();
        let mut above = vec![0u128; n];
        for i in (0..n).rev() {
            let mut set = 0u128;
            for j in i + 1..n {
                if !graph.commute(word[i], word[j]) {
                    set |= 1u128 << j | above[j];
                }
            }
            above[i] = set;
        }
        Heap { above }
    }

    fn less(&self, i: usize, j: usize) -> bool {
        self.above[i] >> j & 1 == 1
    }
}

/// Finds a reduced factorization of the (reduced) word through a braid
/// factor, if any. `None` means the element is fully commutative.
pub fn find_braid(
    graph: &CoxeterGraph,
    word: &[Gen],
    choice: BraidChoice,
) -> Option<BraidFactorization> {
    let heap = Heap::new(graph, word);
    let n = graph.rank() as Gen;
    // (start position, end position, chain)
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for s in 0..n {
        for t in s + 1..n {
            let m = graph.m(s, t) as usize;
            if m < 3 || m > word.len() {
                continue;
            }
            let pos: Vec<usize> = (0..word.len())
                .filter(|&i| word[i] == s || word[i] == t)
                .collect();
            for chain in pos.windows(m) {
                let alternating = chain.windows(2).all(|p| word[p[0]] != word[p[1]]);
                if !alternating {
                    continue;
                }
                let (lo, hi) = (chain[0], chain[m - 1]);
                // convex: nothing outside the chain lies strictly between
                let blocked = (lo + 1..hi)
                    .any(|q| !chain.contains(&q) && heap.less(lo, q) && heap.less(q, hi));
                if blocked {
                    continue;
                }
                let better = match (&best, choice) {
                    (None, _) => true,
                    (Some(b), BraidChoice::Leftmost) => (lo, hi) < (b.0, b.1),
                    (Some(b), BraidChoice::Rightmost) => (lo, hi) > (b.0, b.1),
                };
                if better {
                    best = Some((lo, hi, chain.to_vec()));
                }
            }
        }
    }
    let (lo, _, chain) = best?;
    let mut prefix = Vec::new();
    let mut suffix = Vec::new();
    for (q, &letter) in word.iter().enumerate() {
        if chain.contains(&q) {
            continue;
        }
        if heap.less(lo, q) {
            suffix.push(letter);
        } else {
            prefix.push(letter);
        }
    }
    Some(BraidFactorization {
        prefix,
        braid: chain.iter().map(|&q| word[q]).collect(),
        suffix,
    })
}

/// Whether the element with this reduced word is fully commutative.
pub fn is_fully_commutative(graph: &CoxeterGraph, word: &[Gen]) -> bool {
    find_braid(graph, word, BraidChoice::Leftmost).is_none()
}

/// Position of the first contiguous braid factor in a word, if any.
pub fn contiguous_braid(graph: &CoxeterGraph, word: &[Gen]) -> Option<usize> {
    (0..word.len()).find(|&i| {
        if i + 1 >= word.len() || word[i] == word[i + 1] {
            return false;
        }
        let (s, t) = (word[i], word[i + 1]);
        let m = graph.m(s, t) as usize;
        m >= 3
            && i + m <= word.len()
            && (0..m).all(|k| word[i + k] == if k % 2 == 0 { s } else { t })
    })
}

/// All words reachable from `word` by swapping adjacent commuting letters,
/// in breadth-first order.
pub fn commutation_class(graph: &CoxeterGraph, word: &[Gen]) -> Vec<Vec<Gen>> {
    let mut seen: HashSet<Vec<Gen>> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([word.to_vec()]);
    seen.insert(word.to_vec());
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            if w[i] != w[i + 1] && graph.commute(w[i], w[i + 1]) {
                let mut next = w.clone();
                next.swap(i, i + 1);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        order.push(w);
    }
    order
}

/// Full commutativity by breadth-first search over the commutation class,
/// stopping at the first word with a contiguous braid factor.
pub fn is_fully_commutative_by_search(graph: &CoxeterGraph, word: &[Gen]) -> bool {
    let mut seen: HashSet<Vec<Gen>> = HashSet::new();
    let mut queue = VecDeque::from([word.to_vec()]);
    seen.insert(word.to_vec());
    while let Some(w) = queue.pop_front() {
        if contiguous_braid(graph, &w).is_some() {
            return false;
        }
        for i in 0..w.len().saturating_sub(1) {
            if w[i] != w[i + 1] && graph.commute(w[i], w[i + 1]) {
                let mut next = w.clone();
                next.swap(i, i + 1);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::graph::CoxeterType;
    use crate::coxeter::group::{parse_word, CoxeterGroup};

    fn d4() -> CoxeterGraph {
        CoxeterGraph::new(CoxeterType::D(4)).unwrap()
    }

    #[test]
    fn braid_word_is_not_fc() {
        let g = CoxeterGraph::new(CoxeterType::A(2)).unwrap();
        assert!(!is_fully_commutative(&g, &[0, 1, 0]));
        assert!(is_fully_commutative(&g, &[0, 1]));
    }

    #[test]
    fn d4_examples() {
        let g = d4();
        let x = parse_word("1.2.4.3", 4).unwrap();
        let w = parse_word("2.3.4.3.1.2.3", 4).unwrap();
        assert!(is_fully_commutative(&g, &x));
        assert!(!is_fully_commutative(&g, &w));
        assert!(is_fully_commutative_by_search(&g, &x));
        assert!(!is_fully_commutative_by_search(&g, &w));
    }

    #[test]
    fn factorization_is_a_rearrangement() {
        let g = d4();
        let w = parse_word("2.3.4.3.1.2.3", 4).unwrap();
        let grp = CoxeterGroup::new(g.clone()).unwrap();
        for choice in [BraidChoice::Leftmost, BraidChoice::Rightmost] {
            let f = find_braid(&g, &w, choice).unwrap();
            assert_eq!(f.braid.len(), 3);
            assert_eq!(f.word().len(), w.len());
            assert_eq!(
                grp.from_word(&f.word()).unwrap(),
                grp.from_word(&w).unwrap()
            );
            assert!(contiguous_braid(&g, &f.word()).is_some());
        }
    }

    #[test]
    fn heap_test_agrees_with_class_search() {
        for kind in [
            CoxeterType::A(3),
            CoxeterType::B(3),
            CoxeterType::D(4),
            CoxeterType::H(3),
        ] {
            let grp = CoxeterGroup::new(CoxeterGraph::new(kind).unwrap()).unwrap();
            for w in grp.elements() {
                let word = grp.word(w);
                assert_eq!(
                    is_fully_commutative(grp.graph(), word),
                    is_fully_commutative_by_search(grp.graph(), word),
                    "{kind} {}",
                    grp.format(w)
                );
            }
        }
    }

    #[test]
    fn commutation_class_sizes() {
        let g = CoxeterGraph::new(CoxeterType::A(3)).unwrap();
        // s1 s3 s2: s1 and s3 commute
        assert_eq!(commutation_class(&g, &[0, 2, 1]).len(), 2);
        assert_eq!(commutation_class(&g, &[0, 1, 2]).len(), 1);
    }
}
