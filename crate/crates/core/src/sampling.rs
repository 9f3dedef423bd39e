//! Seeded random generators for the property suites. ChaCha keeps the
//! streams identical across platforms, so a seed pins a sample exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::{Factor, OpAlgebra, OpTag, SkewOperator, Word};
use crate::series::{rat, Exponents, HSeries, LaurentPoly, Rational, VarSet};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bounds for random series and polynomials.
#[derive(Clone, Debug)]
pub struct SampleSpec {
    /// Number of samples (pairs, triples, words …) per check.
    pub samples: usize,
    /// Maximum number of monomials per random element.
    pub max_terms: usize,
    /// Inclusive exponent range; clipped to `[0, hi]` on non-invertible
    /// variables.
    pub exp_lo: i32,
    pub exp_hi: i32,
    /// Highest ħ power used inside random elements.
    pub max_hpow: usize,
    /// Truncation order `N`.
    pub order: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            samples: 100,
            max_terms: 12,
            exp_lo: -4,
            exp_hi: 4,
            max_hpow: 2,
            order: 8,
            seed: 0,
        }
    }
}

/// Nonzero rational with small numerator and denominator.
pub fn random_rational(rng: &mut SampleRng) -> Rational {
    let mut n: i64 = rng.gen_range(-5..=5);
    if n == 0 {
        n = 1;
    }
    let d: i64 = rng.gen_range(1..=4);
    rat(n, d)
}

pub fn random_exponents(rng: &mut SampleRng, vars: &VarSet, lo: i32, hi: i32) -> Exponents {
    vars.iter()
        .map(|v| {
            let l = if v.invertible { lo } else { lo.max(0) };
            rng.gen_range(l..=hi.max(l))
        })
        .collect()
}

/// A random Laurent polynomial with between 1 and `max_terms` monomials
/// (fewer if monomials collide).
pub fn random_laurent(
    rng: &mut SampleRng,
    vars: &VarSet,
    max_terms: usize,
    lo: i32,
    hi: i32,
) -> LaurentPoly {
    let count = rng.gen_range(1..=max_terms.max(1));
    let terms: Vec<_> = (0..count)
        .map(|_| (random_exponents(rng, vars, lo, hi), random_rational(rng)))
        .collect();
    LaurentPoly::from_terms(vars, terms).expect("exponents respect invertibility")
}

/// A random series whose monomials sit at ħ powers `0..=max_hpow`.
pub fn random_series(rng: &mut SampleRng, vars: &VarSet, spec: &SampleSpec) -> HSeries {
    let count = rng.gen_range(1..=spec.max_terms.max(1));
    let terms: Vec<_> = (0..count)
        .map(|_| {
            // bias towards the classical part
            let k = if rng.gen_bool(0.6) {
                0
            } else {
                rng.gen_range(0..=spec.max_hpow)
            };
            (
                k,
                random_exponents(rng, vars, spec.exp_lo, spec.exp_hi),
                random_rational(rng),
            )
        })
        .collect();
    HSeries::from_terms(vars, spec.order, terms).expect("exponents respect invertibility")
}

/// A random operator with up to `max_terms` terms, generator powers in
/// `[lo, hi]` (clipped to the admissible range of each generator) and
/// coefficients drawn like [`random_series`]. With `rees` set, the
/// coefficient of `∂^k` is multiplied by `ħ^|k|`.
pub fn random_operator(
    rng: &mut SampleRng,
    alg: &OpAlgebra,
    spec: &SampleSpec,
    max_terms: usize,
    lo: i32,
    hi: i32,
) -> SkewOperator {
    let rees = matches!(alg.tag(), OpTag::Rees(_));
    let plus = matches!(alg.tag(), OpTag::ScalingPlus | OpTag::TranslationPlus);
    let count = rng.gen_range(1..=max_terms.max(1));
    let terms: Vec<(Vec<i32>, HSeries)> = (0..count)
        .map(|_| {
            let powers: Vec<i32> = alg
                .alphabet()
                .iter()
                .map(|g| {
                    let l = if g.invertible() && !plus {
                        lo
                    } else {
                        lo.max(0)
                    };
                    rng.gen_range(l..=hi.max(l))
                })
                .collect();
            let mut c = random_series(rng, alg.vars(), spec);
            if rees {
                let k: u32 = powers.iter().map(|p| p.unsigned_abs()).sum();
                c = c.shift_hbar(k as usize);
            }
            (powers, c)
        })
        .collect();
    SkewOperator::from_terms(alg, spec.order, terms).expect("sampled powers are admissible")
}

/// A random word of `1..=max_len` factors: generator powers in `[lo, hi]`
/// and coefficient factors whose classical part is nonzero.
pub fn random_word(
    rng: &mut SampleRng,
    alg: &OpAlgebra,
    spec: &SampleSpec,
    max_len: usize,
    lo: i32,
    hi: i32,
) -> Word {
    let len = rng.gen_range(1..=max_len.max(1));
    let factors = (0..len)
        .map(|_| {
            if rng.gen_bool(0.5) {
                let var = rng.gen_range(0..alg.vars().len());
                let g = alg.alphabet()[var];
                let l = if g.invertible() { lo } else { lo.max(0) };
                Factor::Gen {
                    var,
                    power: rng.gen_range(l..=hi.max(l)),
                }
            } else {
                let mut c = random_series(rng, alg.vars(), spec);
                if c.coeff(0).is_zero() {
                    c = &c + &HSeries::one(alg.vars(), spec.order);
                }
                Factor::Coeff(c)
            }
        })
        .collect();
    Word {
        alg: alg.clone(),
        order: spec.order,
        factors,
    }
}
