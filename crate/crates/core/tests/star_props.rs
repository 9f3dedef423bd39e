mod common;

use common::{one, rng, series, spec};
use dq_core::series::{exp_hbar, rat, HSeries};
use dq_core::star::{sigma0, Axiom, StarAlgebra, StarProduct};
use proptest::prelude::*;

fn algebras() -> Vec<StarAlgebra> {
    vec![
        StarAlgebra::moyal(1).unwrap(),
        StarAlgebra::moyal(2).unwrap(),
        StarAlgebra::qtorus(),
        StarAlgebra::mixed(),
        StarAlgebra::mixed_opposite(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_limit_is_multiplicative(seed in any::<u64>()) {
        for alg in algebras() {
            let mut r = rng(seed);
            let s = spec(5, 6, -3, 3);
            let (f, g) = (series(&mut r, alg.vars(), &s), series(&mut r, alg.vars(), &s));
            let fg = alg.star_mul(&f, &g).unwrap();
            prop_assert_eq!(sigma0(&fg), &sigma0(&f) * &sigma0(&g), "{}", alg);
        }
    }

    #[test]
    fn associative(seed in any::<u64>()) {
        for alg in algebras() {
            let mut r = rng(seed);
            let s = spec(5, 4, -2, 2);
            let (f, g, h) = (
                series(&mut r, alg.vars(), &s),
                series(&mut r, alg.vars(), &s),
                series(&mut r, alg.vars(), &s),
            );
            let lhs = alg.star_mul(&alg.star_mul(&f, &g).unwrap(), &h).unwrap();
            let rhs = alg.star_mul(&f, &alg.star_mul(&g, &h).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs, "{}", alg);
        }
    }

    #[test]
    fn opposite_product_swaps_arguments(seed in any::<u64>()) {
        let (m, op) = (StarAlgebra::mixed(), StarAlgebra::mixed_opposite());
        let mut r = rng(seed);
        let s = spec(6, 6, -3, 3);
        let (f, g) = (series(&mut r, m.vars(), &s), series(&mut r, m.vars(), &s));
        prop_assert_eq!(op.star_mul(&f, &g).unwrap(), m.star_mul(&g, &f).unwrap());
    }

    #[test]
    fn poisson_antisymmetry_and_leibniz(seed in any::<u64>()) {
        for alg in algebras() {
            let mut r = rng(seed);
            let s = spec(0, 4, -3, 3);
            let f = sigma0(&series(&mut r, alg.vars(), &s));
            let g = sigma0(&series(&mut r, alg.vars(), &s));
            let h = sigma0(&series(&mut r, alg.vars(), &s));
            let fg = alg.poisson_bracket(&f, &g).unwrap();
            prop_assert_eq!(&fg, &-&alg.poisson_bracket(&g, &f).unwrap());
            let lhs = alg.poisson_bracket(&f, &(&g * &h)).unwrap();
            let rhs = &(&fg * &h) + &(&g * &alg.poisson_bracket(&f, &h).unwrap());
            prop_assert_eq!(lhs, rhs, "{}", alg);
        }
    }

    #[test]
    fn first_order_commutator_is_the_bracket(seed in any::<u64>()) {
        for alg in algebras() {
            let mut r = rng(seed);
            let s = spec(1, 4, -3, 3);
            let (f, g) = (series(&mut r, alg.vars(), &s), series(&mut r, alg.vars(), &s));
            let f0 = HSeries::from_laurent(sigma0(&f), 1);
            let g0 = HSeries::from_laurent(sigma0(&g), 1);
            let c = alg.star_commutator(&f0, &g0).unwrap();
            prop_assert!(sigma0(&c).is_zero());
            prop_assert_eq!(c.coeff(1).clone(), alg.poisson_bracket(&sigma0(&f), &sigma0(&g)).unwrap(), "{}", alg);
        }
    }
}

#[test]
fn quantum_torus_commutation_any_order() {
    let q = StarAlgebra::qtorus();
    for n in [0, 1, 4, 10] {
        let x1 = one(q.vars(), &[1, 0], n);
        let x2 = one(q.vars(), &[0, 1], n);
        let lhs = q.star_mul(&x2, &x1).unwrap();
        let rhs = &exp_hbar(&rat(1, 1), q.vars(), n) * &q.star_mul(&x1, &x2).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(q.star_mul(&x1, &x2).unwrap(), one(q.vars(), &[1, 1], n));
    }
}

#[test]
fn canonical_brackets() {
    let m = StarAlgebra::moyal(1).unwrap();
    let v = m.vars();
    let b = m
        .poisson_bracket(&sigma0(&one(v, &[0, 1], 0)), &sigma0(&one(v, &[1, 0], 0)))
        .unwrap();
    assert_eq!(b, sigma0(&one(v, &[0, 0], 0)));
    let q = StarAlgebra::qtorus();
    let b = q
        .poisson_bracket(
            &sigma0(&one(q.vars(), &[0, 1], 0)),
            &sigma0(&one(q.vars(), &[1, 0], 0)),
        )
        .unwrap();
    assert_eq!(b, sigma0(&one(q.vars(), &[1, 1], 0)));
    let x = StarAlgebra::mixed();
    let b = x
        .poisson_bracket(
            &sigma0(&one(x.vars(), &[0, 1], 0)),
            &sigma0(&one(x.vars(), &[1, 0], 0)),
        )
        .unwrap();
    assert_eq!(b, sigma0(&one(x.vars(), &[1, 0], 0)));
}

#[test]
fn axiom_names_are_distinct() {
    let names: std::collections::BTreeSet<_> = Axiom::ALL.iter().map(|a| a.name()).collect();
    assert_eq!(names.len(), Axiom::ALL.len());
    for alg in algebras() {
        assert_eq!(StarProduct::name(&alg), alg.to_string());
    }
}
