#![allow(dead_code)]

use dq_core::sampling::{self, SampleRng, SampleSpec};
use dq_core::series::{rat, HSeries, Rational, VarSet};

pub fn spec(order: usize, max_terms: usize, lo: i32, hi: i32) -> SampleSpec {
    SampleSpec {
        samples: 1,
        max_terms,
        exp_lo: lo,
        exp_hi: hi,
        max_hpow: 2,
        order,
        seed: 0,
    }
}

pub fn rng(seed: u64) -> SampleRng {
    sampling::rng(seed)
}

pub fn series(rng: &mut SampleRng, vars: &VarSet, s: &SampleSpec) -> HSeries {
    sampling::random_series(rng, vars, s)
}

pub fn mono(vars: &VarSet, k: usize, e: &[i32], c: Rational, n: usize) -> HSeries {
    HSeries::monomial(vars, k, e.to_vec(), c, n).unwrap()
}

pub fn one(vars: &VarSet, e: &[i32], n: usize) -> HSeries {
    mono(vars, 0, e, rat(1, 1), n)
}
