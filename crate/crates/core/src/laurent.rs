//! Exact arithmetic in the ring `Z[v, v^-1]`.
//!
//! A [`LaurentPoly`] stores its nonzero terms sorted by exponent. All ring
//! operations are checked: a coefficient that does not fit the chosen integer
//! type is an [`Error::Overflow`], never a silent wraparound. The operator
//! impls (`+`, `-`, `*`) panic on overflow; use the `checked_*` methods where
//! the caller wants to recover.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{PrimInt, Signed};

use crate::error::{Error, Result};

/// Integer types usable as polynomial coefficients.
pub trait Coefficient:
    PrimInt + Signed + Hash + fmt::Debug + fmt::Display + FromStr + Send + Sync + 'static
{
}

impl<T> Coefficient for T where
    T: PrimInt + Signed + Hash + fmt::Debug + fmt::Display + FromStr + Send + Sync + 'static
{
}

/// An element of `Z[v, v^-1]` with coefficients of type `C`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly<C = i64> {
    // (exponent, coefficient), strictly increasing exponent, no zero coefficient
    terms: Vec<(i32, C)>,
}

/// Which ring operation [`arith`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
}

/// Checked ring arithmetic on two polynomials.
pub fn arith<C: Coefficient>(
    p: &LaurentPoly<C>,
    q: &LaurentPoly<C>,
    kind: ArithKind,
) -> Result<LaurentPoly<C>> {
    match kind {
        ArithKind::Add => p.checked_add(q),
        ArithKind::Sub => p.checked_sub(q),
        ArithKind::Mul => p.checked_mul(q),
    }
}

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(C::one(), 0)
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * v^exp`.
    pub fn monomial(c: C, exp: i32) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LaurentPoly {
                terms: vec![(exp, c)],
            }
        }
    }

    /// `v^exp`.
    pub fn v_pow(exp: i32) -> Self {
        Self::monomial(C::one(), exp)
    }

    /// `v - v^-1`, the correction term of the quadratic relation.
    pub fn v_minus_v_inv() -> Self {
        LaurentPoly {
            terms: vec![(-1, -C::one()), (1, C::one())],
        }
    }

    /// The quantum integer `[2] = v + v^-1`.
    pub fn q_c() -> Self {
        LaurentPoly {
            terms: vec![(-1, C::one()), (1, C::one())],
        }
    }

    /// Builds a polynomial from arbitrary `(exponent, coefficient)` pairs,
    /// summing repeated exponents.
    pub fn from_terms<I: IntoIterator<Item = (i32, C)>>(terms: I) -> Result<Self> {
        let mut v: Vec<(i32, C)> = terms.into_iter().collect();
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(i32, C)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == e => {
                    last.1 = last.1.checked_add(&c).ok_or(Error::Overflow)?;
                }
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Ok(LaurentPoly { terms: out })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> &[(i32, C)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `v^exp` (zero when absent).
    pub fn coeff(&self, exp: i32) -> C {
        match self.terms.binary_search_by_key(&exp, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => C::zero(),
        }
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.last().map(|t| t.0)
    }

    /// The bar involution `v -> v^-1`.
    pub fn bar(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().rev().map(|&(e, c)| (-e, c)).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// True iff `self` lies in `v^-k Z[v^-1]`, i.e. every exponent is `<= -k`.
    pub fn in_lattice(&self, k: i32) -> bool {
        self.max_exp().is_none_or(|m| m <= -k)
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|&(e, c)| (e + k, c)).collect(),
        }
    }

    pub fn checked_scale(&self, c: C) -> Result<Self> {
        if c.is_zero() {
            return Ok(Self::zero());
        }
        let terms = self
            .terms
            .iter()
            .map(|&(e, a)| a.checked_mul(&c).map(|p| (e, p)).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(LaurentPoly { terms })
    }

    pub fn checked_neg(&self) -> Result<Self> {
        self.checked_scale(-C::one())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.merge(other, false)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Result<Self> {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        let neg = |c: C| -> Result<C> {
            if negate {
                C::zero().checked_sub(&c).ok_or(Error::Overflow)
            } else {
                Ok(c)
            }
        };
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, neg(b[j].1)?));
                j += 1;
            } else {
                let c = if negate {
                    a[i].1.checked_sub(&b[j].1)
                } else {
                    a[i].1.checked_add(&b[j].1)
                }
                .ok_or(Error::Overflow)?;
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Ok(LaurentPoly { terms: out })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        if other.terms.len() == 1 {
            let (e, c) = other.terms[0];
            return Ok(self.checked_scale(c)?.shift(e));
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms[0];
            return Ok(other.checked_scale(c)?.shift(e));
        }
        let lo = self.terms[0].0 + other.terms[0].0;
        let hi = self.terms.last().unwrap().0 + other.terms.last().unwrap().0;
        let mut dense = vec![C::zero(); (hi - lo + 1) as usize];
        for &(e1, c1) in &self.terms {
            for &(e2, c2) in &other.terms {
                let p = c1.checked_mul(&c2).ok_or(Error::Overflow)?;
                let slot = &mut dense[(e1 + e2 - lo) as usize];
                *slot = slot.checked_add(&p).ok_or(Error::Overflow)?;
            }
        }
        Ok(LaurentPoly {
            terms: dense
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (lo + i as i32, c))
                .collect(),
        })
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder (or the divisor is zero).
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (dmin, dmax) = (divisor.min_exp()?, divisor.max_exp()?);
        let lead = divisor.terms.last()?.1;
        let qmin = self.min_exp()? - dmin;
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some(rmax) = rem.max_exp() {
            let qe = rmax - dmax;
            if qe < qmin {
                return None;
            }
            let rc = rem.terms.last()?.1;
            if !(rc % lead).is_zero() {
                return None;
            }
            let qc = rc / lead;
            quot.push((qe, qc));
            let t = Self::monomial(qc, qe);
            rem = rem.checked_sub(&divisor.checked_mul(&t).ok()?).ok()?;
        }
        quot.reverse();
        Some(LaurentPoly { terms: quot })
    }

    /// Converts to another coefficient width, failing if a coefficient does
    /// not fit.
    pub fn convert<D: Coefficient>(&self) -> Result<LaurentPoly<D>> {
        let terms = self
            .terms
            .iter()
            .map(|&(e, c)| D::from(c).map(|d| (e, d)).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(LaurentPoly { terms })
    }
}

fn expect_ok<T>(r: Result<T>) -> T {
    match r {
        Ok(t) => t,
        Err(e) => panic!("{e}"),
    }
}

impl<C: Coefficient> Add for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: Self) -> LaurentPoly<C> {
        expect_ok(self.checked_add(rhs))
    }
}

impl<C: Coefficient> Sub for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: Self) -> LaurentPoly<C> {
        expect_ok(self.checked_sub(rhs))
    }
}

impl<C: Coefficient> Mul for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: Self) -> LaurentPoly<C> {
        expect_ok(self.checked_mul(rhs))
    }
}

impl<C: Coefficient> Add for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: Self) -> LaurentPoly<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Sub for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: Self) -> LaurentPoly<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> Mul for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: Self) -> LaurentPoly<C> {
        &self * &rhs
    }
}

impl<C: Coefficient> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        expect_ok(self.checked_neg())
    }
}

impl<C: Coefficient> Neg for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        -&self
    }
}

impl<C: Coefficient> AddAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn add_assign(&mut self, rhs: &LaurentPoly<C>) {
        *self = &*self + rhs;
    }
}

impl<C: Coefficient> SubAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn sub_assign(&mut self, rhs: &LaurentPoly<C>) {
        *self = &*self - rhs;
    }
}

/// Canonical text form: `coeff:exp` pairs in ascending exponent, `0` for zero.
impl<C: Coefficient> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}:{e}")?;
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Parses the canonical text form. Only canonical input is accepted: terms
/// must be ascending, distinct and nonzero.
impl<C: Coefficient> FromStr for LaurentPoly<C> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let bad = || Error::InvalidPoly(s.to_string());
        let mut terms: Vec<(i32, C)> = Vec::new();
        for tok in s.split_whitespace() {
            let (c, e) = tok.split_once(':').ok_or_else(bad)?;
            let c: C = c.parse().map_err(|_| bad())?;
            let e: i32 = e.parse().map_err(|_| bad())?;
            if c.is_zero() || terms.last().is_some_and(|t| t.0 >= e) {
                return Err(bad());
            }
            terms.push((e, c));
        }
        if terms.is_empty() {
            return Err(bad());
        }
        Ok(LaurentPoly { terms })
    }
}
