//! The Hecke algebra in the `T~` basis, where `T~_w = v^-l(w) T_w`.

mod cache;
mod kl;

pub use cache::{save_cache, CacheLoad, KlCache};
pub use kl::{DescentChoice, KlEntry, KlTable};

use crate::coxeter::{CoxeterGroup, Element, Gen, Side};
use crate::laurent::{Coefficient, LaurentPoly};
use crate::lincomb::LinComb;

/// An element of the Hecke algebra, in `T~`-coordinates.
pub type HeckeElt<C = i64> = LinComb<C>;

/// `T~_s * h` (or `h * T~_s` on the right).
pub fn mul_gen<C: Coefficient>(
    group: &CoxeterGroup,
    h: &HeckeElt<C>,
    s: Gen,
    side: Side,
) -> HeckeElt<C> {
    let d = LaurentPoly::<C>::v_minus_v_inv();
    let mut out = HeckeElt::zero();
    for (&w, a) in h {
        let sw = group.mult_gen(w, s, side);
        out.add_term(sw, a);
        if group.length(sw) < group.length(w) {
            out.add_term(w, &(a * &d));
        }
    }
    out
}

/// `T~_s^-1 * h`, using `T~_s^-1 = T~_s - (v - v^-1)`.
pub fn mul_gen_inverse<C: Coefficient>(
    group: &CoxeterGroup,
    h: &HeckeElt<C>,
    s: Gen,
    side: Side,
) -> HeckeElt<C> {
    let mut out = mul_gen(group, h, s, side);
    out.add_scaled(h, &-LaurentPoly::<C>::v_minus_v_inv());
    out
}

/// `T~_w * h`, folding the canonical word of `w` from the right.
pub fn mul_basis_left<C: Coefficient>(
    group: &CoxeterGroup,
    w: Element,
    h: &HeckeElt<C>,
) -> HeckeElt<C> {
    group
        .word(w)
        .iter()
        .rev()
        .fold(h.clone(), |acc, &s| mul_gen(group, &acc, s, Side::Left))
}

/// Product in the Hecke algebra.
pub fn hecke_mult<C: Coefficient>(
    group: &CoxeterGroup,
    h1: &HeckeElt<C>,
    h2: &HeckeElt<C>,
) -> HeckeElt<C> {
    let mut out = HeckeElt::zero();
    for (&x, a) in h1 {
        out.add_scaled(&mul_basis_left(group, x, h2), a);
    }
    out
}

/// `bar(T~_w) = T~_{w^-1}^-1`, one generator at a time.
pub fn bar_basis<C: Coefficient>(group: &CoxeterGroup, w: Element) -> HeckeElt<C> {
    group
        .word(w)
        .iter()
        .rev()
        .fold(HeckeElt::basis(group.identity()), |acc, &s| {
            mul_gen_inverse(group, &acc, s, Side::Left)
        })
}

/// The bar involution of the Hecke algebra.
pub fn hecke_bar<C: Coefficient>(group: &CoxeterGroup, h: &HeckeElt<C>) -> HeckeElt<C> {
    let mut out = HeckeElt::zero();
    for (&w, a) in h {
        out.add_scaled(&bar_basis(group, w), &a.bar());
    }
    out
}

/// Precomputed `bar(T~_w)` for every `w`, for repeated bar computations.
pub struct BarTable<C: Coefficient = i64> {
    rows: Vec<HeckeElt<C>>,
}

impl<C: Coefficient> BarTable<C> {
    pub fn new(group: &CoxeterGroup) -> Self {
        let mut rows: Vec<HeckeElt<C>> = Vec::with_capacity(group.order());
        for w in group.elements() {
            if w == group.identity() {
                rows.push(HeckeElt::basis(w));
                continue;
            }
            let s = group.word(w)[0];
            let rest = group.left(w, s);
            rows.push(mul_gen_inverse(group, &rows[rest.index()], s, Side::Left));
        }
        BarTable { rows }
    }

    pub fn basis(&self, w: Element) -> &HeckeElt<C> {
        &self.rows[w.index()]
    }

    pub fn bar(&self, h: &HeckeElt<C>) -> HeckeElt<C> {
        let mut out = HeckeElt::zero();
        for (&w, a) in h {
            out.add_scaled(&self.rows[w.index()], &a.bar());
        }
        out
    }
}
