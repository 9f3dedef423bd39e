use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::vars::VarSet;
use super::Rational;
use crate::error::{Error, Result};

/// Exponent vector, one signed entry per variable of the owning [`VarSet`].
pub type Exponents = Vec<i32>;

/// Multivariate Laurent polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is value
/// equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    vars: VarSet,
    terms: BTreeMap<Exponents, Rational>,
}

impl LaurentPoly {
    pub fn zero(vars: &VarSet) -> Self {
        LaurentPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &VarSet, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn monomial(vars: &VarSet, exps: Exponents, c: Rational) -> Result<Self> {
        vars.check_exponents(&exps)?;
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        Ok(p)
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(vars: &VarSet, name: &str) -> Result<Self> {
        let i = vars.require(name)?;
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    /// Builds a polynomial from raw terms, summing duplicates and pruning zeros.
    pub fn from_terms<I>(vars: &VarSet, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            vars.check_exponents(&e)?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// Adds `c * x^e` in place. Callers must pass admissible exponents.
    pub(crate) fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &LaurentPoly, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c * s);
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.vars.ensure_same(&other.vars)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.vars.ensure_same(&other.vars)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.vars.ensure_same(&other.vars)?;
        Ok(self * other)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut p = Self::zero(&self.vars);
        if s.is_zero() {
            return p;
        }
        for (e, c) in &self.terms {
            p.terms.insert(e.clone(), c * s);
        }
        p
    }

    /// Multiplies by the monomial `x^shift` (exponent-wise addition).
    pub fn shift_exponents(&self, shift: &[i32]) -> Result<Self> {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let ne: Exponents = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            self.vars.check_exponents(&ne)?;
            out.terms.insert(ne, c.clone());
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to the variable at `idx`.
    pub fn derive_at(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let p = e[idx];
            if p != 0 {
                let mut ne = e.clone();
                ne[idx] -= 1;
                out.terms.insert(ne, c * Rational::from_integer(p.into()));
            }
        }
        out
    }

    /// `x ∂_x` at `idx`: scales each monomial by its exponent.
    pub fn euler_at(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let p = e[idx];
            if p != 0 {
                out.terms
                    .insert(e.clone(), c * Rational::from_integer(p.into()));
            }
        }
        out
    }

    /// Largest `|exponent|` appearing anywhere, 0 for the zero polynomial.
    pub fn max_abs_exponent(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Re-expresses the polynomial over another layout by an index map:
    /// variable `i` of `self` becomes variable `map[i]` of `target`.
    pub fn relabel(&self, target: &VarSet, map: &[usize]) -> Result<Self> {
        if map.len() != self.vars.len() {
            return Err(Error::InvalidInput("relabel map has wrong length".into()));
        }
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                ne[map[i]] += x;
            }
            target.check_exponents(&ne)?;
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(
            self.vars, rhs.vars,
            "adding Laurent polynomials over different variables"
        );
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(
            self.vars, rhs.vars,
            "subtracting Laurent polynomials over different variables"
        );
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(
            self.vars, rhs.vars,
            "multiplying Laurent polynomials over different variables"
        );
        let mut out = LaurentPoly::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn negative_exponent_rejected_on_polynomial_variable() {
        let vars = VarSet::of(&[("x", false), ("y", true)]);
        assert!(LaurentPoly::monomial(&vars, vec![0, -3], q(1, 1)).is_ok());
        assert_eq!(
            LaurentPoly::monomial(&vars, vec![-1, 0], q(1, 1)),
            Err(Error::NegativeExponent("x".into()))
        );
    }

    #[test]
    fn cancellation_prunes_terms() {
        let vars = VarSet::of(&[("x", false)]);
        let x = LaurentPoly::var(&vars, "x").unwrap();
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d, LaurentPoly::zero(&vars));
    }

    #[test]
    fn laurent_derivative() {
        let vars = VarSet::of(&[("x", true)]);
        let xinv = LaurentPoly::monomial(&vars, vec![-1], q(1, 1)).unwrap();
        let expect = LaurentPoly::monomial(&vars, vec![-2], q(-1, 1)).unwrap();
        assert_eq!(xinv.derive_at(0), expect);
    }

    #[test]
    fn mismatched_layouts_are_errors() {
        let a = LaurentPoly::one(&VarSet::of(&[("x", false)]));
        let b = LaurentPoly::one(&VarSet::of(&[("y", false)]));
        assert!(matches!(a.checked_add(&b), Err(Error::VarMismatch { .. })));
    }
}
