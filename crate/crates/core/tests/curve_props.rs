mod common;

use common::rng;
use dq_core::curve::{
    higgs_char_poly, quantize_plane_curve, semiclassical_check, CurveLayout, HiggsChart,
    PlaneCurve, QuantizationTarget,
};
use dq_core::sampling::{random_laurent, random_rational};
use dq_core::series::{LaurentPoly, Rational, VarSet};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

const TARGETS: [QuantizationTarget; 3] = [
    QuantizationTarget::Weyl,
    QuantizationTarget::Scaling,
    QuantizationTarget::Translation,
];

fn xvar() -> VarSet {
    VarSet::of(&[("x", false)])
}

/// `det(ξ I − φ)` by cofactor expansion along the first row, with entries
/// lifted to the cotangent layout.
fn cofactor_char_poly(phi: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let v = CurveLayout::Cotangent.vars();
    let r = phi.len();
    let lift = |p: &LaurentPoly| {
        LaurentPoly::from_terms(&v, p.terms().map(|(e, c)| (vec![e[0], 0], c.clone()))).unwrap()
    };
    let xi = LaurentPoly::monomial(&v, vec![0, 1], Rational::one()).unwrap();
    let m: Vec<Vec<LaurentPoly>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let neg = -&lift(&phi[i][j]);
                    if i == j {
                        &xi + &neg
                    } else {
                        neg
                    }
                })
                .collect()
        })
        .collect();
    det(&m, &v)
}

fn det(m: &[Vec<LaurentPoly>], v: &VarSet) -> LaurentPoly {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = LaurentPoly::zero(v);
    for j in 0..m.len() {
        let minor: Vec<Vec<LaurentPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &det(&minor, v);
        acc = if j % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

fn random_chart(seed: u64, r: usize) -> Vec<Vec<LaurentPoly>> {
    let mut g = rng(seed);
    let v = xvar();
    (0..r)
        .map(|_| {
            (0..r)
                .map(|_| random_laurent(&mut g, &v, 2, 0, 2))
                .collect()
        })
        .collect()
}

fn constant(v: &VarSet, q: Rational) -> LaurentPoly {
    LaurentPoly::constant(v, q)
}

fn mat_mul(a: &[Vec<LaurentPoly>], b: &[Vec<LaurentPoly>]) -> Vec<Vec<LaurentPoly>> {
    let v = xvar();
    let r = a.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    (0..r).fold(LaurentPoly::zero(&v), |acc, k| {
                        &acc + &(&a[i][k] * &b[k][j])
                    })
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quantize_then_symbol_is_identity(seed in any::<u64>()) {
        for t in TARGETS {
            let mut g = rng(seed);
            let layout = t.layout();
            let poly = random_laurent(&mut g, &layout.vars(), 5, -3, 3);
            let curve = PlaneCurve::new(poly).unwrap();
            let op = quantize_plane_curve(&curve, t, 6).unwrap();
            prop_assert_eq!(semiclassical_check(&op, &t.symbol_map()).unwrap(), curve);
            if t == QuantizationTarget::Weyl {
                prop_assert!(op.is_rees_element().unwrap());
            }
        }
    }

    #[test]
    fn char_poly_matches_cofactor_expansion(seed in any::<u64>(), r in 1usize..=3) {
        let phi = random_chart(seed, r);
        let got = higgs_char_poly(&HiggsChart::new(phi.clone()).unwrap()).unwrap();
        prop_assert_eq!(got.poly(), &cofactor_char_poly(&phi));
    }

    #[test]
    fn char_poly_is_conjugation_invariant(seed in any::<u64>(), r in 1usize..=3) {
        let phi = random_chart(seed, r);
        let v = xvar();
        let mut g = rng(seed ^ 0x5eed);
        // unipotent upper-triangular conjugator with an explicit inverse
        // built by back substitution
        let mut u = vec![vec![Rational::zero(); r]; r];
        for i in 0..r {
            u[i][i] = Rational::one();
            for j in i + 1..r {
                if g.gen_bool(0.7) {
                    u[i][j] = random_rational(&mut g);
                }
            }
        }
        let mut uinv = vec![vec![Rational::zero(); r]; r];
        for j in 0..r {
            for i in (0..r).rev() {
                let mut s = if i == j { Rational::one() } else { Rational::zero() };
                for k in i + 1..r {
                    s -= &u[i][k] * &uinv[k][j];
                }
                uinv[i][j] = s;
            }
        }
        let lift = |m: &[Vec<Rational>]| -> Vec<Vec<LaurentPoly>> {
            m.iter().map(|row| row.iter().map(|q| constant(&v, q.clone())).collect()).collect()
        };
        let conj = mat_mul(&mat_mul(&lift(&u), &phi), &lift(&uinv));
        let a = higgs_char_poly(&HiggsChart::new(phi).unwrap()).unwrap();
        let b = higgs_char_poly(&HiggsChart::new(conj).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn char_poly_is_multiplicative_on_blocks(seed in any::<u64>(), r1 in 1usize..=2, r2 in 1usize..=2) {
        let (p1, p2) = (random_chart(seed, r1), random_chart(seed.wrapping_add(1), r2));
        let v = xvar();
        let r = r1 + r2;
        let mut block = vec![vec![LaurentPoly::zero(&v); r]; r];
        for i in 0..r1 {
            for j in 0..r1 {
                block[i][j] = p1[i][j].clone();
            }
        }
        for i in 0..r2 {
            for j in 0..r2 {
                block[r1 + i][r1 + j] = p2[i][j].clone();
            }
        }
        let whole = higgs_char_poly(&HiggsChart::new(block).unwrap()).unwrap();
        let c1 = higgs_char_poly(&HiggsChart::new(p1).unwrap()).unwrap();
        let c2 = higgs_char_poly(&HiggsChart::new(p2).unwrap()).unwrap();
        prop_assert_eq!(whole.poly(), &(c1.poly() * c2.poly()));
    }
}

#[test]
fn fiber_degree_beyond_truncation_is_refused() {
    let v = CurveLayout::Cotangent.vars();
    let c =
        PlaneCurve::new(LaurentPoly::monomial(&v, vec![0, 5], Rational::one()).unwrap()).unwrap();
    assert!(quantize_plane_curve(&c, QuantizationTarget::Weyl, 4).is_err());
    assert!(quantize_plane_curve(&c, QuantizationTarget::Weyl, 5).is_ok());
}
