//! Finite linear combinations of group-indexed basis vectors.

use std::collections::btree_map::{self, BTreeMap};

use crate::coxeter::Element;
use crate::laurent::{Coefficient, LaurentPoly};

/// A finite `Z[v, v^-1]`-linear combination of basis vectors indexed by group
/// elements. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LinComb<C: Coefficient = i64> {
    coords: BTreeMap<Element, LaurentPoly<C>>,
}

impl<C: Coefficient> LinComb<C> {
    pub fn zero() -> Self {
        LinComb {
            coords: BTreeMap::new(),
        }
    }

    pub fn basis(w: Element) -> Self {
        Self::term(w, LaurentPoly::one())
    }

    pub fn term(w: Element, coeff: LaurentPoly<C>) -> Self {
        let mut c = Self::zero();
        c.add_term(w, &coeff);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, w: Element) -> LaurentPoly<C> {
        self.coords
            .get(&w)
            .cloned()
            .unwrap_or_else(LaurentPoly::zero)
    }

    pub fn coeff(&self, w: Element) -> Option<&LaurentPoly<C>> {
        self.coords.get(&w)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Element, LaurentPoly<C>> {
        self.coords.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = Element> + '_ {
        self.coords.keys().copied()
    }

    /// Largest element of the support in element order.
    pub fn leading(&self) -> Option<(Element, &LaurentPoly<C>)> {
        self.coords.iter().next_back().map(|(&w, p)| (w, p))
    }

    pub fn add_term(&mut self, w: Element, coeff: &LaurentPoly<C>) {
        if coeff.is_zero() {
            return;
        }
        match self.coords.entry(w) {
            btree_map::Entry::Vacant(e) => {
                e.insert(coeff.clone());
            }
            btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &LaurentPoly<C>) {
        if factor.is_zero() {
            return;
        }
        for (&w, p) in &other.coords {
            if factor.is_one() {
                self.add_term(w, p);
            } else {
                self.add_term(w, &(p * factor));
            }
        }
    }

    pub fn add(&mut self, other: &Self) {
        self.add_scaled(other, &LaurentPoly::one());
    }

    pub fn sub(&mut self, other: &Self) {
        self.add_scaled(other, &-LaurentPoly::<C>::one());
    }

    pub fn scaled(&self, factor: &LaurentPoly<C>) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, factor);
        out
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(&LaurentPoly<C>) -> LaurentPoly<C>) -> Self {
        let mut out = Self::zero();
        for (&w, p) in &self.coords {
            out.add_term(w, &f(p));
        }
        out
    }

    /// True iff every coefficient lies in `v^-k Z[v^-1]`.
    pub fn in_lattice(&self, k: i32) -> bool {
        self.coords.values().all(|p| p.in_lattice(k))
    }
}

impl<C: Coefficient> FromIterator<(Element, LaurentPoly<C>)> for LinComb<C> {
    fn from_iter<I: IntoIterator<Item = (Element, LaurentPoly<C>)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (w, p) in iter {
            out.add_term(w, &p);
        }
        out
    }
}

impl<'a, C: Coefficient> IntoIterator for &'a LinComb<C> {
    type Item = (&'a Element, &'a LaurentPoly<C>);
    type IntoIter = btree_map::Iter<'a, Element, LaurentPoly<C>>;
    fn into_iter(self) -> Self::IntoIter {
        self.coords.iter()
    }
}
