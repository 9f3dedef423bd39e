//! Exact ħ-truncated series with multivariate Laurent-polynomial
//! coefficients, and the derivation, Euler, dilation and translation actions
//! built on top of them.

mod hseries;
mod laurent;
mod vars;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

pub(crate) use hseries::inverse_factorials;
pub use hseries::HSeries;
pub use laurent::{Exponents, LaurentPoly};
pub use vars::{Var, VarSet};

use crate::error::Result;

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for `n/d`. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic; the result has order `min(N_a, N_b)`.
pub fn series_arith(a: &HSeries, b: &HSeries, op: SeriesOp) -> Result<HSeries> {
    match op {
        SeriesOp::Add => a.checked_add(b),
        SeriesOp::Sub => a.checked_sub(b),
        SeriesOp::Mul => a.checked_mul(b),
    }
}

/// `e^{cħ}` expanded to order `N`.
pub fn exp_hbar(c: &Rational, vars: &VarSet, order: usize) -> HSeries {
    let inv_fact = inverse_factorials(order);
    let mut cpow = Rational::one();
    let mut coeffs = Vec::with_capacity(order + 1);
    for f in inv_fact.iter() {
        coeffs.push(LaurentPoly::constant(vars, &cpow * f));
        cpow *= c;
    }
    HSeries::from_coeffs(vars, coeffs).expect("coefficients share the layout")
}

/// Stirling number of the second kind `S(k, l)`: the number of partitions
/// of a `k`-set into `l` nonempty blocks. Zero outside `0 <= l <= k`
/// (except `S(0,0) = 1`).
pub fn stirling(k: usize, l: usize) -> BigUint {
    if l > k {
        return BigUint::zero();
    }
    // row[j] = S(i, j), built by S(i,j) = j S(i-1,j) + S(i-1,j-1)
    let mut row = vec![BigUint::zero(); l + 1];
    row[0] = BigUint::one();
    for _ in 0..k {
        for j in (1..=l).rev() {
            row[j] = &row[j] * BigUint::from(j) + &row[j - 1];
        }
        row[0] = BigUint::zero();
    }
    row[l].clone()
}
