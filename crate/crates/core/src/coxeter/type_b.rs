//! Combinatorics specific to type `B_n`: the minimal coset representatives
//! `W^(r)` of `W(B_{r-1})` in `W(B_r)`, the resulting normal form, and the
//! parse of a fully commutative `w` for which `ws` is not fully commutative.

use crate::coxeter::graph::CoxeterType;
use crate::coxeter::group::{CoxeterGroup, Element, Gen};
use crate::error::{Error, Result};

fn require_b(group: &CoxeterGroup) -> Result<usize> {
    match group.graph().kind() {
        CoxeterType::B(n) => Ok(n),
        other => Err(Error::Contract(format!("expected type B, got {other}"))),
    }
}

/// The listed elements of `W^(r)` (for `1 <= r <= n`), by their unique
/// reduced words: `e, s_r, s_r s_{r-1}, ..., s_r...s_1, s_r...s_1 s_2, ...,
/// s_r...s_1...s_r`.
pub fn coset_reps_listed(group: &CoxeterGroup, r: usize) -> Result<Vec<Element>> {
    let n = require_b(group)?;
    if r == 0 || r > n {
        return Err(Error::Contract(format!("W^({r}) needs 1 <= r <= {n}")));
    }
    let mut words: Vec<Vec<Gen>> = vec![Vec::new()];
    let mut down: Vec<Gen> = Vec::new();
    for k in (0..r).rev() {
        down.push(k as Gen);
        words.push(down.clone());
    }
    for k in 1..r {
        down.push(k as Gen);
        words.push(down.clone());
    }
    words.iter().map(|w| group.from_word(w)).collect()
}

/// `W^(r)` by its defining property: elements of `W(B_r)` with no left
/// descent among `s_1, ..., s_{r-1}`.
pub fn coset_reps_by_definition(group: &CoxeterGroup, r: usize) -> Result<Vec<Element>> {
    require_b(group)?;
    let lower = (1u32 << (r - 1)) - 1;
    Ok(group
        .parabolic((1u32 << r) - 1)
        .into_iter()
        .filter(|&w| group.left_descents(w) & lower == 0)
        .collect())
}

/// The factorization `w = w_1 w_2 ... w_n` with `w_i` in `W^(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BCosetNF {
    pub factors: Vec<Element>,
}

impl BCosetNF {
    pub fn product(&self, group: &CoxeterGroup) -> Element {
        self.factors
            .iter()
            .fold(group.identity(), |acc, &f| group.mul(acc, f))
    }

    /// Concatenation of the factors' reduced words.
    pub fn normal_word(&self, group: &CoxeterGroup) -> Vec<Gen> {
        self.factors
            .iter()
            .flat_map(|&f| group.word(f).iter().copied())
            .collect()
    }
}

/// Decomposes `w` into its coset normal form by stripping, at each rank `r`,
/// the left descents in `s_1..s_{r-1}` from the current remainder.
pub fn coset_decompose_b(group: &CoxeterGroup, w: Element) -> Result<BCosetNF> {
    let n = require_b(group)?;
    let mut factors = vec![group.identity(); n];
    let mut rest = w;
    for r in (1..=n).rev() {
        // rest lies in W(B_r); split rest = x y with x in W(B_{r-1})
        let lower = (1u32 << (r - 1)) - 1;
        let mut y = rest;
        let mut x = group.identity();
        while group.left_descents(y) & lower != 0 {
            let s = (group.left_descents(y) & lower).trailing_zeros() as Gen;
            y = group.left(y, s);
            x = group.right(x, s);
        }
        factors[r - 1] = y;
        rest = x;
    }
    debug_assert_eq!(rest, group.identity());
    Ok(BCosetNF { factors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseCase {
    /// `w = w1 s w2 s' w3` with `m(s, s') = 3`.
    I,
    /// `w = w1 s' w2 s w3 s' w4` with `m(s, s') = 4`.
    II,
}

/// Result of [`parse_nonfc_b`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BParse {
    pub case: ParseCase,
    pub s: Gen,
    pub s_prime: Gen,
    /// Three factors in case I, four in case II.
    pub factors: Vec<Element>,
    /// The same factors as words, cut from the canonical word of `w`.
    pub factor_words: Vec<Vec<Gen>>,
}

/// Parses a fully commutative `w` with `ws` not fully commutative.
///
/// Looks at the last occurrence of `s` in the canonical word: after it there
/// is exactly one letter `s'` not commuting with `s`. For `m(s, s') = 4` the
/// last `s'` before that `s` closes the second factor.
pub fn parse_nonfc_b(group: &CoxeterGroup, w: Element, s: Gen) -> Result<BParse> {
    require_b(group)?;
    let graph = group.graph();
    let ws = group.right(w, s);
    if !group.is_fully_commutative(w) || group.length(ws) < group.length(w) {
        return Err(Error::Contract(format!(
            "parse needs w fully commutative with ws > w (w = {})",
            group.format(w)
        )));
    }
    if group.is_fully_commutative(ws) {
        return Err(Error::Contract(format!(
            "w s is fully commutative (w = {}, s = {})",
            group.format(w),
            s + 1
        )));
    }
    let word = group.word(w);
    let contract =
        |msg: &str| Error::Contract(format!("{msg} (w = {}, s = {})", group.format(w), s + 1));
    let i = word
        .iter()
        .rposition(|&x| x == s)
        .ok_or_else(|| contract("s does not occur in w"))?;
    let tail: Vec<usize> = (i + 1..word.len())
        .filter(|&j| !graph.commute(word[j], s))
        .collect();
    if tail.len() != 1 {
        return Err(contract(
            "expected exactly one non-commuting letter after the last s",
        ));
    }
    let j = tail[0];
    let sp = word[j];
    let commutes_all = |x: Gen, part: &[Gen]| part.iter().all(|&y| graph.commute(x, y));
    let (case, cuts): (ParseCase, Vec<(usize, usize)>) = match graph.m(s, sp) {
        3 => (ParseCase::I, vec![(0, i), (i + 1, j), (j + 1, word.len())]),
        4 => {
            let k = word[..i]
                .iter()
                .rposition(|&x| x == sp)
                .ok_or_else(|| contract("no s' before the last s"))?;
            let parts = vec![(0, k), (k + 1, i), (i + 1, j), (j + 1, word.len())];
            if !commutes_all(sp, &word[k + 1..i]) || !commutes_all(sp, &word[i + 1..j]) {
                return Err(contract("s' does not commute with the middle factors"));
            }
            (ParseCase::II, parts)
        }
        _ => return Err(contract("unexpected bond")),
    };
    let factor_words: Vec<Vec<Gen>> = cuts.iter().map(|&(a, b)| word[a..b].to_vec()).collect();
    let factors = factor_words
        .iter()
        .map(|fw| group.from_word(fw))
        .collect::<Result<Vec<_>>>()?;
    Ok(BParse {
        case,
        s,
        s_prime: sp,
        factors,
        factor_words,
    })
}
