use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::laurent::{Exponents, LaurentPoly};
use super::vars::VarSet;
use super::Rational;
use crate::error::{Error, Result};

/// A formal series `c_0 + c_1 ħ + … + c_N ħ^N` truncated at order `N`,
/// with Laurent-polynomial coefficients.
///
/// The truncation order is structural: `coeffs.len() == N + 1` always, and
/// binary arithmetic returns a series of order `min(N_a, N_b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSeries {
    vars: VarSet,
    coeffs: Vec<LaurentPoly>,
}

impl HSeries {
    pub fn zero(vars: &VarSet, order: usize) -> Self {
        HSeries {
            vars: vars.clone(),
            coeffs: vec![LaurentPoly::zero(vars); order + 1],
        }
    }

    pub fn one(vars: &VarSet, order: usize) -> Self {
        Self::constant(vars, Rational::one(), order)
    }

    pub fn constant(vars: &VarSet, c: Rational, order: usize) -> Self {
        Self::from_laurent(LaurentPoly::constant(vars, c), order)
    }

    /// Embeds a classical function at `ħ^0`.
    pub fn from_laurent(p: LaurentPoly, order: usize) -> Self {
        let vars = p.vars().clone();
        let mut s = Self::zero(&vars, order);
        s.coeffs[0] = p;
        s
    }

    /// Builds a series from its coefficient array; the order is `len - 1`.
    pub fn from_coeffs(vars: &VarSet, coeffs: Vec<LaurentPoly>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "series needs at least one coefficient".into(),
            ));
        }
        for c in &coeffs {
            vars.ensure_same(c.vars())?;
        }
        Ok(HSeries {
            vars: vars.clone(),
            coeffs,
        })
    }

    pub fn var(vars: &VarSet, name: &str, order: usize) -> Result<Self> {
        Ok(Self::from_laurent(LaurentPoly::var(vars, name)?, order))
    }

    /// The series `ħ` (zero when `order == 0`).
    pub fn hbar(vars: &VarSet, order: usize) -> Self {
        Self::one(vars, order).shift_hbar(1)
    }

    /// `c ħ^hpow x^exps`, silently zero when `hpow > order`.
    pub fn monomial(
        vars: &VarSet,
        hpow: usize,
        exps: Exponents,
        c: Rational,
        order: usize,
    ) -> Result<Self> {
        let mut s = Self::zero(vars, order);
        let m = LaurentPoly::monomial(vars, exps, c)?;
        if hpow <= order {
            s.coeffs[hpow] = m;
        }
        Ok(s)
    }

    /// Builds a series from `(hpow, exponents, coefficient)` triples.
    pub fn from_terms<I>(vars: &VarSet, order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Exponents, Rational)>,
    {
        let mut s = Self::zero(vars, order);
        for (k, e, c) in terms {
            vars.check_exponents(&e)?;
            if k <= order {
                s.coeffs[k].add_term(e, c);
            }
        }
        Ok(s)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &LaurentPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    /// All nonzero terms as `(hpow, exponents, coefficient)`, sorted by
    /// `(hpow, exponents)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Exponents, &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(k, p)| p.terms().map(move |(e, c)| (k, e, c)))
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().map(LaurentPoly::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LaurentPoly::is_zero)
    }

    /// Smallest `k` with nonzero `c_k`, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Semiclassical part `c_0`.
    pub fn sigma0(&self) -> LaurentPoly {
        self.coeffs[0].clone()
    }

    /// Drops all coefficients above `order` (no-op if already lower).
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        HSeries {
            vars: self.vars.clone(),
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    /// Re-declares the truncation order, padding with zeros when raising it.
    /// Raising the order claims the missing coefficients are exactly zero;
    /// use only for data known exactly (e.g. polynomials in ħ).
    pub fn with_order(&self, order: usize) -> Self {
        let mut s = self.truncate(order);
        while s.coeffs.len() < order + 1 {
            s.coeffs.push(LaurentPoly::zero(&self.vars));
        }
        s
    }

    /// Multiplication by `ħ^k`.
    pub fn shift_hbar(&self, k: usize) -> Self {
        let mut s = Self::zero(&self.vars, self.order());
        for i in 0..self.coeffs.len() {
            if i + k <= self.order() {
                s.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        s
    }

    pub fn scale(&self, r: &Rational) -> Self {
        HSeries {
            vars: self.vars.clone(),
            coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect(),
        }
    }

    pub fn mul_laurent(&self, p: &LaurentPoly) -> Self {
        HSeries {
            vars: self.vars.clone(),
            coeffs: self.coeffs.iter().map(|c| c * p).collect(),
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

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.vars, self.order());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse, defined when `c_0` is a single monomial in
    /// invertible variables.
    pub fn try_inverse(&self) -> Result<Self> {
        let lead = &self.coeffs[0];
        if lead.len() != 1 {
            return Err(Error::NotInvertible(format!(
                "leading coefficient has {} terms",
                lead.len()
            )));
        }
        let (e, c) = lead
            .terms()
            .next()
            .map(|(e, c)| (e.clone(), c.clone()))
            .unwrap();
        let inv_e: Exponents = e.iter().map(|x| -x).collect();
        let lead_inv = LaurentPoly::monomial(&self.vars, inv_e, c.recip())
            .map_err(|_| Error::NotInvertible("leading monomial is not a unit".into()))?;
        // self * lead_inv = 1 + eps with eps = O(ħ); invert by a finite Neumann sum.
        let n = self.order();
        let normalized = self.mul_laurent(&lead_inv);
        let eps = &normalized - &Self::one(&self.vars, n);
        let mut acc = Self::one(&self.vars, n);
        let mut power = Self::one(&self.vars, n);
        for _ in 0..n {
            power = &power * &(-&eps);
            acc = &acc + &power;
        }
        Ok(acc.mul_laurent(&lead_inv))
    }

    /// Partial derivative `∂f/∂var`, coefficient-wise.
    pub fn derive(&self, var: &str) -> Result<Self> {
        let i = self.vars.require(var)?;
        Ok(self.derive_at(i))
    }

    pub fn derive_at(&self, idx: usize) -> Self {
        HSeries {
            vars: self.vars.clone(),
            coeffs: self.coeffs.iter().map(|c| c.derive_at(idx)).collect(),
        }
    }

    /// Euler operator `x ∂_x`.
    pub fn euler(&self, var: &str) -> Result<Self> {
        let i = self.vars.require(var)?;
        Ok(self.euler_at(i))
    }

    pub fn euler_at(&self, idx: usize) -> Self {
        HSeries {
            vars: self.vars.clone(),
            coeffs: self.coeffs.iter().map(|c| c.euler_at(idx)).collect(),
        }
    }

    /// `e^{±ħ x ∂_x} f`, with `direction` in `{+1, -1}`.
    pub fn dilate(&self, var: &str, direction: i32) -> Result<Self> {
        let i = self.vars.require(var)?;
        check_direction(direction)?;
        Ok(self.dilate_at(i, direction.into()))
    }

    /// `e^{s ħ x ∂_x} f`: each monomial `x^p` picks up the factor `e^{s p ħ}`.
    pub fn dilate_at(&self, idx: usize, steps: i64) -> Self {
        if steps == 0 {
            return self.clone();
        }
        let n = self.order();
        let mut out = Self::zero(&self.vars, n);
        let inv_fact = inverse_factorials(n);
        for (j, c) in self.coeffs.iter().enumerate() {
            for (e, a) in c.terms() {
                let rate = BigInt::from(steps) * BigInt::from(e[idx]);
                if rate.is_zero() {
                    out.coeffs[j].add_term(e.clone(), a.clone());
                    continue;
                }
                let rate = Rational::from_integer(rate);
                let mut rpow = Rational::one();
                for k in 0..=(n - j) {
                    out.coeffs[j + k].add_term(e.clone(), a * &rpow * &inv_fact[k]);
                    rpow *= &rate;
                }
            }
        }
        out
    }

    /// `f(x ± ħ)`, with `direction` in `{+1, -1}`. Undefined on invertible
    /// variables.
    pub fn translate(&self, var: &str, direction: i32) -> Result<Self> {
        let i = self.vars.require(var)?;
        check_direction(direction)?;
        self.translate_at(i, direction.into())
    }

    /// `f(x + s ħ)` for the variable at `idx`.
    pub fn translate_at(&self, idx: usize, steps: i64) -> Result<Self> {
        let v = self.vars.get(idx);
        if v.invertible {
            return Err(Error::TranslationOnInvertible(v.name.clone()));
        }
        if steps == 0 {
            return Ok(self.clone());
        }
        let n = self.order();
        let mut out = Self::zero(&self.vars, n);
        let s = Rational::from_integer(steps.into());
        for (j, c) in self.coeffs.iter().enumerate() {
            for (e, a) in c.terms() {
                let p = e[idx];
                // (x + sħ)^p = Σ_i C(p,i) s^i ħ^i x^(p-i)
                let mut binom = Rational::one();
                let mut spow = Rational::one();
                for i in 0..=p {
                    let k = j + i as usize;
                    if k > n {
                        break;
                    }
                    let mut ne = e.clone();
                    ne[idx] = p - i;
                    out.coeffs[k].add_term(ne, a * &binom * &spow);
                    binom = binom * Rational::from_integer((p - i).into())
                        / Rational::from_integer((i + 1).into());
                    spow *= &s;
                }
            }
        }
        Ok(out)
    }

    /// `self += w ħ^shift a b`, truncated at `self`'s order. The operands'
    /// own orders must be at least `self.order() - shift`.
    pub(crate) fn add_product_shifted(
        &mut self,
        a: &HSeries,
        b: &HSeries,
        w: &Rational,
        shift: usize,
    ) {
        let n = self.order();
        if shift > n || w.is_zero() {
            return;
        }
        for i in 0..=(n - shift).min(a.order()) {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - shift - i).min(b.order()) {
                if b.coeffs[j].is_zero() {
                    continue;
                }
                let prod = &a.coeffs[i] * &b.coeffs[j];
                self.coeffs[i + j + shift].add_scaled(&prod, w);
            }
        }
    }

    /// Re-expresses the series over `target` via an index map (see
    /// [`LaurentPoly::relabel`]).
    pub fn relabel(&self, target: &VarSet, map: &[usize]) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.relabel(target, map))
            .collect::<Result<Vec<_>>>()?;
        Ok(HSeries {
            vars: target.clone(),
            coeffs,
        })
    }
}

impl std::hash::Hash for HSeries {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.order().hash(state);
        for (k, e, c) in self.terms() {
            k.hash(state);
            e.hash(state);
            c.hash(state);
        }
    }
}

fn check_direction(d: i32) -> Result<()> {
    if d == 1 || d == -1 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "direction must be +1 or -1, got {d}"
        )))
    }
}

/// `[1/0!, 1/1!, …, 1/n!]`.
pub(crate) fn inverse_factorials(n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut f = Rational::one();
    out.push(f.clone());
    for k in 1..=n {
        f /= Rational::from_integer(BigInt::from(k));
        out.push(f.clone());
    }
    out
}

impl<'a> Add<&'a HSeries> for &'a HSeries {
    type Output = HSeries;
    fn add(self, rhs: &HSeries) -> HSeries {
        let n = self.order().min(rhs.order());
        HSeries {
            vars: self.vars.clone(),
            coeffs: (0..=n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }
}

impl<'a> Sub<&'a HSeries> for &'a HSeries {
    type Output = HSeries;
    fn sub(self, rhs: &HSeries) -> HSeries {
        let n = self.order().min(rhs.order());
        HSeries {
            vars: self.vars.clone(),
            coeffs: (0..=n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        }
    }
}

/// Cauchy product truncated at `min(N_a, N_b)`.
impl<'a> Mul<&'a HSeries> for &'a HSeries {
    type Output = HSeries;
    fn mul(self, rhs: &HSeries) -> HSeries {
        assert_eq!(
            self.vars, rhs.vars,
            "multiplying series over different variables"
        );
        let n = self.order().min(rhs.order());
        let mut out = HSeries::zero(&self.vars, n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                let prod = &self.coeffs[i] * &rhs.coeffs[j];
                out.coeffs[i + j] = &out.coeffs[i + j] + &prod;
            }
        }
        out
    }
}

impl Neg for &HSeries {
    type Output = HSeries;
    fn neg(self) -> HSeries {
        HSeries {
            vars: self.vars.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
