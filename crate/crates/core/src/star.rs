//! Closed-form star products on the three model surfaces, the opposite of
//! the mixed product, the semiclassical symbol and the Poisson bracket.
//!
//! * `moyal:n` on `T*C^n`, coordinates `(x; u)`:
//!   `f ⋆ g = Σ_α ħ^|α|/α! (∂_u^α f)(∂_x^α g)`
//! * `qtorus` on `C* × C*`, symplectic form `dx1∧dx2/(x1 x2)`:
//!   `f ⋆ g = Σ_k ħ^k/k! (x2∂_{x2})^k f · (x1∂_{x1})^k g`
//! * `mixed` on `C* × C`, form `dx1∧dx2/x1`:
//!   `f ⋆ g = Σ_k ħ^k/k! ∂_{x2}^k f · (x1∂_{x1})^k g`
//! * `mixed_op`: `f ⊛ g = g ⋆ f` for the mixed product.

use std::fmt;
use std::str::FromStr;

use num_traits::One;

use crate::error::{Error, Result};
use crate::sampling::{self, random_rational, random_series, SampleSpec};
use crate::series::{inverse_factorials, HSeries, LaurentPoly, Rational, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StarKind {
    Moyal(usize),
    QTorus,
    Mixed,
    MixedOpposite,
}

/// One of the closed-form star algebras together with its fixed variable
/// layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarAlgebra {
    kind: StarKind,
    vars: VarSet,
}

impl StarAlgebra {
    pub fn new(kind: StarKind) -> Result<Self> {
        let vars = match kind {
            StarKind::Moyal(0) => {
                return Err(Error::InvalidInput(
                    "moyal needs at least one degree of freedom".into(),
                ))
            }
            StarKind::Moyal(1) => VarSet::of(&[("x", false), ("u", false)]),
            StarKind::Moyal(n) => {
                let mut v: Vec<(String, bool)> =
                    (1..=n).map(|i| (format!("x{i}"), false)).collect();
                v.extend((1..=n).map(|i| (format!("u{i}"), false)));
                VarSet::new(
                    v.into_iter()
                        .map(|(n, inv)| crate::series::Var::new(n, inv))
                        .collect(),
                )?
            }
            StarKind::QTorus => VarSet::of(&[("x1", true), ("x2", true)]),
            StarKind::Mixed | StarKind::MixedOpposite => VarSet::of(&[("x1", true), ("x2", false)]),
        };
        Ok(StarAlgebra { kind, vars })
    }

    pub fn moyal(n: usize) -> Result<Self> {
        Self::new(StarKind::Moyal(n))
    }

    pub fn qtorus() -> Self {
        Self::new(StarKind::QTorus).expect("fixed layout")
    }

    pub fn mixed() -> Self {
        Self::new(StarKind::Mixed).expect("fixed layout")
    }

    pub fn mixed_opposite() -> Self {
        Self::new(StarKind::MixedOpposite).expect("fixed layout")
    }

    pub fn kind(&self) -> StarKind {
        self.kind
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Order in which variables must be written so that the star product
    /// of single-variable powers reproduces the commutative monomial
    /// (e.g. `x ⋆ u = xu` for Moyal, `x2 ⊛ x1 = x1 x2` for the opposite
    /// mixed product).
    pub fn normal_order(&self) -> Vec<usize> {
        match self.kind {
            StarKind::MixedOpposite => vec![1, 0],
            _ => (0..self.vars.len()).collect(),
        }
    }

    fn check_operands(&self, f: &HSeries, g: &HSeries) -> Result<()> {
        self.vars.ensure_same(f.vars())?;
        self.vars.ensure_same(g.vars())?;
        if f.order() != g.order() {
            return Err(Error::OrderMismatch(f.order(), g.order()));
        }
        Ok(())
    }

    /// Pairs `(k, weight, L, R)` such that `f ⋆ g = Σ weight ħ^k L·R`,
    /// with `L`, `R` obtained by iterated derivations of `f` and `g`.
    fn bidifferential_terms(
        &self,
        f: &HSeries,
        g: &HSeries,
    ) -> Vec<(usize, Rational, HSeries, HSeries)> {
        let n = f.order();
        let inv_fact = inverse_factorials(n);
        match self.kind {
            StarKind::Moyal(dof) => {
                // Expand the multi-index sum one degree of freedom at a time.
                let mut acc = vec![(0usize, Rational::one(), f.clone(), g.clone())];
                for i in 0..dof {
                    let (xi, ui) = (i, dof + i);
                    let mut next = Vec::new();
                    for (deg, w, lf, rg) in acc {
                        let mut a = 0;
                        let (mut df, mut dg) = (lf, rg);
                        while deg + a <= n && !df.is_zero() && !dg.is_zero() {
                            next.push((deg + a, &w * &inv_fact[a], df.clone(), dg.clone()));
                            df = df.derive_at(ui);
                            dg = dg.derive_at(xi);
                            a += 1;
                        }
                    }
                    acc = next;
                }
                acc
            }
            StarKind::QTorus => {
                iterate_pair(f, g, n, &inv_fact, |s| s.euler_at(1), |s| s.euler_at(0))
            }
            StarKind::Mixed => {
                iterate_pair(f, g, n, &inv_fact, |s| s.derive_at(1), |s| s.euler_at(0))
            }
            StarKind::MixedOpposite => {
                iterate_pair(g, f, n, &inv_fact, |s| s.derive_at(1), |s| s.euler_at(0))
            }
        }
    }

    /// Truncated star product `f ⋆ g`.
    pub fn star_mul(&self, f: &HSeries, g: &HSeries) -> Result<HSeries> {
        self.check_operands(f, g)?;
        let mut out = HSeries::zero(&self.vars, f.order());
        for (k, w, l, r) in self.bidifferential_terms(f, g) {
            out.add_product_shifted(&l, &r, &w, k);
        }
        Ok(out)
    }

    /// The `k`-th bidifferential summand `P_k(f, g)` (coefficient of `ħ^k`
    /// for classical inputs), returned without the `ħ^k` factor.
    pub fn star_term(&self, k: usize, f: &HSeries, g: &HSeries) -> Result<HSeries> {
        self.check_operands(f, g)?;
        let mut out = HSeries::zero(&self.vars, f.order());
        for (deg, w, l, r) in self.bidifferential_terms(f, g) {
            if deg == k {
                out.add_product_shifted(&l, &r, &w, 0);
            }
        }
        Ok(out)
    }

    /// `f ⋆ g − g ⋆ f`.
    pub fn star_commutator(&self, f: &HSeries, g: &HSeries) -> Result<HSeries> {
        Ok(&self.star_mul(f, g)? - &self.star_mul(g, f)?)
    }

    /// `{f, g} = σ0(ħ^{-1}(f ⋆ g − g ⋆ f))` for classical `f`, `g`.
    pub fn poisson_bracket(&self, f: &LaurentPoly, g: &LaurentPoly) -> Result<LaurentPoly> {
        let fs = HSeries::from_laurent(f.clone(), 1);
        let gs = HSeries::from_laurent(g.clone(), 1);
        let c = self.star_commutator(&fs, &gs)?;
        debug_assert!(c.coeff(0).is_zero());
        Ok(c.coeff(1).clone())
    }

    /// `kind` tag as used on the command line: `moyal:<n>|qtorus|mixed|mixed_op`.
    pub fn tag(&self) -> String {
        self.to_string()
    }
}

fn iterate_pair(
    f: &HSeries,
    g: &HSeries,
    n: usize,
    inv_fact: &[Rational],
    left: impl Fn(&HSeries) -> HSeries,
    right: impl Fn(&HSeries) -> HSeries,
) -> Vec<(usize, Rational, HSeries, HSeries)> {
    let mut out = Vec::new();
    let (mut lf, mut rg) = (f.clone(), g.clone());
    for (k, w) in inv_fact.iter().enumerate().take(n + 1) {
        if lf.is_zero() || rg.is_zero() {
            break;
        }
        out.push((k, w.clone(), lf.clone(), rg.clone()));
        lf = left(&lf);
        rg = right(&rg);
    }
    out
}

impl fmt::Display for StarAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            StarKind::Moyal(n) => write!(f, "moyal:{n}"),
            StarKind::QTorus => f.write_str("qtorus"),
            StarKind::Mixed => f.write_str("mixed"),
            StarKind::MixedOpposite => f.write_str("mixed_op"),
        }
    }
}

impl FromStr for StarAlgebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qtorus" => Ok(Self::qtorus()),
            "mixed" => Ok(Self::mixed()),
            "mixed_op" => Ok(Self::mixed_opposite()),
            "moyal" => Self::moyal(1),
            _ => match s.strip_prefix("moyal:") {
                Some(n) => {
                    let n: usize = n
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad algebra tag `{s}`")))?;
                    Self::moyal(n)
                }
                None => Err(Error::InvalidInput(format!(
                    "unknown algebra `{s}` (expected moyal:<n>|qtorus|mixed|mixed_op)"
                ))),
            },
        }
    }
}

/// Semiclassical symbol `σ0`: reduction modulo ħ.
pub fn sigma0(f: &HSeries) -> LaurentPoly {
    f.sigma0()
}

/// Anything that multiplies series: the closed forms, products synthesized
/// from operator data, or deliberately broken products used as negative
/// controls.
pub trait StarProduct {
    fn vars(&self) -> &VarSet;
    fn product(&self, f: &HSeries, g: &HSeries) -> Result<HSeries>;
    fn name(&self) -> String;
}

impl StarProduct for StarAlgebra {
    fn vars(&self) -> &VarSet {
        &self.vars
    }
    fn product(&self, f: &HSeries, g: &HSeries) -> Result<HSeries> {
        self.star_mul(f, g)
    }
    fn name(&self) -> String {
        self.tag()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Unit,
    Bilinear,
    Sigma0,
    Associative,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [
        Axiom::Unit,
        Axiom::Bilinear,
        Axiom::Sigma0,
        Axiom::Associative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Unit => "unit",
            Axiom::Bilinear => "bilinear",
            Axiom::Sigma0 => "sigma0",
            Axiom::Associative => "associative",
        }
    }
}

/// A failed check together with the inputs that exposed it.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub check: String,
    pub inputs: Vec<HSeries>,
    pub lhs: HSeries,
    pub rhs: HSeries,
}

#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub algebra: String,
    /// `(check name, number of samples checked)`.
    pub checked: Vec<(String, usize)>,
    pub failures: Vec<Witness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples inputs from `spec` and checks the requested star-product axioms
/// exactly. Only the first counterexample per axiom is recorded.
pub fn verify_star_axioms<P: StarProduct + ?Sized>(
    p: &P,
    spec: &SampleSpec,
    axioms: &[Axiom],
) -> Result<AxiomReport> {
    let vars = p.vars().clone();
    let n = spec.order;
    let mut report = AxiomReport {
        algebra: p.name(),
        ..Default::default()
    };
    for &axiom in axioms {
        // independent stream per axiom so subsets reproduce the same samples
        let mut rng = sampling::rng(spec.seed ^ ((axiom as u64 + 1) << 32));
        let mut failure = None;
        for _ in 0..spec.samples {
            let f = random_series(&mut rng, &vars, spec);
            let g = random_series(&mut rng, &vars, spec);
            let check = match axiom {
                Axiom::Unit => {
                    let one = HSeries::one(&vars, n);
                    let l = p.product(&one, &f)?;
                    let r = p.product(&f, &one)?;
                    if l != f {
                        Some(("left unit", vec![f.clone()], l, f.clone()))
                    } else if r != f {
                        Some(("right unit", vec![f.clone()], r, f.clone()))
                    } else {
                        None
                    }
                }
                Axiom::Bilinear => {
                    let h = random_series(&mut rng, &vars, spec);
                    let a = random_rational(&mut rng);
                    let b = random_rational(&mut rng);
                    // (a f + b ħ g) ⋆ h = a (f⋆h) + b ħ (g⋆h), and symmetrically
                    let hg = g.shift_hbar(1);
                    let comb = &f.scale(&a) + &hg.scale(&b);
                    let l1 = p.product(&comb, &h)?;
                    let r1 =
                        &p.product(&f, &h)?.scale(&a) + &p.product(&g, &h)?.shift_hbar(1).scale(&b);
                    let l2 = p.product(&h, &comb)?;
                    let r2 =
                        &p.product(&h, &f)?.scale(&a) + &p.product(&h, &g)?.shift_hbar(1).scale(&b);
                    if l1 != r1 {
                        Some(("left linearity", vec![f, g, h], l1, r1))
                    } else if l2 != r2 {
                        Some(("right linearity", vec![f, g, h], l2, r2))
                    } else {
                        None
                    }
                }
                Axiom::Sigma0 => {
                    let prod = p.product(&f, &g)?;
                    let l = HSeries::from_laurent(prod.sigma0(), n);
                    let r = HSeries::from_laurent(f.coeff(0) * g.coeff(0), n);
                    (l != r).then(|| ("sigma0", vec![f, g], l, r))
                }
                Axiom::Associative => {
                    let h = random_series(&mut rng, &vars, spec);
                    let l = p.product(&p.product(&f, &g)?, &h)?;
                    let r = p.product(&f, &p.product(&g, &h)?)?;
                    (l != r).then(|| ("associativity", vec![f, g, h], l, r))
                }
            };
            if let Some((name, inputs, lhs, rhs)) = check {
                failure = Some(Witness {
                    check: name.to_string(),
                    inputs,
                    lhs,
                    rhs,
                });
                break;
            }
        }
        report
            .checked
            .push((axiom.name().to_string(), spec.samples));
        if let Some(w) = failure {
            report.failures.push(w);
        }
    }
    Ok(report)
}

/// Antisymmetry and the Leibniz rule `{f, gh} = {f,g}h + g{f,h}` of the
/// induced Poisson bracket on random classical inputs.
pub fn verify_poisson_laws(alg: &StarAlgebra, spec: &SampleSpec) -> Result<AxiomReport> {
    let vars = alg.vars().clone();
    let mut rng = sampling::rng(spec.seed);
    let mut report = AxiomReport {
        algebra: alg.tag(),
        ..Default::default()
    };
    let embed = |p: LaurentPoly| HSeries::from_laurent(p, 0);
    let (mut anti_fail, mut leib_fail) = (None, None);
    for _ in 0..spec.samples {
        let f = sampling::random_laurent(&mut rng, &vars, spec.max_terms, spec.exp_lo, spec.exp_hi);
        let g = sampling::random_laurent(&mut rng, &vars, spec.max_terms, spec.exp_lo, spec.exp_hi);
        let h = sampling::random_laurent(&mut rng, &vars, spec.max_terms, spec.exp_lo, spec.exp_hi);
        let fg = alg.poisson_bracket(&f, &g)?;
        let gf = alg.poisson_bracket(&g, &f)?;
        if anti_fail.is_none() && !(&fg + &gf).is_zero() {
            anti_fail = Some(Witness {
                check: "antisymmetry".into(),
                inputs: vec![embed(f.clone()), embed(g.clone())],
                lhs: embed(fg.clone()),
                rhs: embed(-&gf),
            });
        }
        let l = alg.poisson_bracket(&f, &(&g * &h))?;
        let r = &(&fg * &h) + &(&g * &alg.poisson_bracket(&f, &h)?);
        if leib_fail.is_none() && l != r {
            leib_fail = Some(Witness {
                check: "leibniz".into(),
                inputs: vec![embed(f), embed(g), embed(h)],
                lhs: embed(l),
                rhs: embed(r),
            });
        }
    }
    report.checked.push(("antisymmetry".into(), spec.samples));
    report.checked.push(("leibniz".into(), spec.samples));
    report.failures.extend(anti_fail);
    report.failures.extend(leib_fail);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{exp_hbar, rat};

    fn var(alg: &StarAlgebra, name: &str, n: usize) -> HSeries {
        HSeries::var(alg.vars(), name, n).unwrap()
    }

    fn mono(alg: &StarAlgebra, k: usize, e: &[i32], c: Rational, n: usize) -> HSeries {
        HSeries::monomial(alg.vars(), k, e.to_vec(), c, n).unwrap()
    }

    #[test]
    fn moyal_u_star_x() {
        let m = StarAlgebra::moyal(1).unwrap();
        let n = 4;
        let got = m.star_mul(&var(&m, "u", n), &var(&m, "x", n)).unwrap();
        let expect = &mono(&m, 0, &[1, 1], rat(1, 1), n) + &mono(&m, 1, &[0, 0], rat(1, 1), n);
        assert_eq!(got, expect);
    }

    #[test]
    fn qtorus_x2_star_x1() {
        let q = StarAlgebra::qtorus();
        let n = 2;
        let got = q.star_mul(&var(&q, "x2", n), &var(&q, "x1", n)).unwrap();
        let x1x2 = mono(&q, 0, &[1, 1], rat(1, 1), n);
        assert_eq!(got, &x1x2 * &exp_hbar(&rat(1, 1), q.vars(), n));
        // the reverse order is the plain product
        assert_eq!(
            q.star_mul(&var(&q, "x1", n), &var(&q, "x2", n)).unwrap(),
            x1x2
        );
    }

    #[test]
    fn mixed_x2_star_x1() {
        let m = StarAlgebra::mixed();
        let n = 3;
        let got = m.star_mul(&var(&m, "x2", n), &var(&m, "x1", n)).unwrap();
        let expect = &mono(&m, 0, &[1, 1], rat(1, 1), n) + &mono(&m, 1, &[1, 0], rat(1, 1), n);
        assert_eq!(got, expect);
    }

    #[test]
    fn mixed_opposite_swaps_arguments() {
        let m = StarAlgebra::mixed();
        let mo = StarAlgebra::mixed_opposite();
        let mut rng = sampling::rng(11);
        let spec = SampleSpec {
            order: 4,
            max_terms: 5,
            ..Default::default()
        };
        for _ in 0..20 {
            let f = random_series(&mut rng, m.vars(), &spec);
            let g = random_series(&mut rng, m.vars(), &spec);
            assert_eq!(mo.star_mul(&f, &g).unwrap(), m.star_mul(&g, &f).unwrap());
        }
    }

    #[test]
    fn unit_is_neutral() {
        for alg in [
            StarAlgebra::moyal(1).unwrap(),
            StarAlgebra::qtorus(),
            StarAlgebra::mixed(),
        ] {
            let mut rng = sampling::rng(3);
            let spec = SampleSpec {
                order: 3,
                max_terms: 4,
                ..Default::default()
            };
            let f = random_series(&mut rng, alg.vars(), &spec);
            let one = HSeries::one(alg.vars(), 3);
            assert_eq!(alg.star_mul(&one, &f).unwrap(), f);
            assert_eq!(alg.star_mul(&f, &one).unwrap(), f);
        }
    }

    #[test]
    fn sigma0_examples() {
        let m = StarAlgebra::moyal(1).unwrap();
        let s = &mono(&m, 0, &[1, 1], rat(1, 1), 3) + &mono(&m, 1, &[0, 0], rat(1, 1), 3);
        assert_eq!(
            sigma0(&s),
            mono(&m, 0, &[1, 1], rat(1, 1), 0).coeff(0).clone()
        );
        assert!(sigma0(&mono(&m, 3, &[1, 0], rat(1, 1), 3)).is_zero());
    }

    #[test]
    fn commutator_examples() {
        let m = StarAlgebra::moyal(1).unwrap();
        let c = m
            .star_commutator(&var(&m, "u", 3), &var(&m, "x", 3))
            .unwrap();
        assert_eq!(c, HSeries::hbar(m.vars(), 3));
        let f = &var(&m, "u", 3) + &mono(&m, 1, &[2, 1], rat(1, 3), 3);
        assert!(m.star_commutator(&f, &f).unwrap().is_zero());

        let q = StarAlgebra::qtorus();
        let c = q
            .star_commutator(&var(&q, "x2", 1), &var(&q, "x1", 1))
            .unwrap();
        assert_eq!(c, mono(&q, 1, &[1, 1], rat(1, 1), 1));
    }

    #[test]
    fn poisson_brackets_match_symplectic_forms() {
        let m = StarAlgebra::moyal(1).unwrap();
        let lp = |a: &StarAlgebra, e: &[i32]| mono(a, 0, e, rat(1, 1), 0).coeff(0).clone();
        assert_eq!(
            m.poisson_bracket(&lp(&m, &[0, 1]), &lp(&m, &[1, 0]))
                .unwrap(),
            lp(&m, &[0, 0])
        );
        let q = StarAlgebra::qtorus();
        assert_eq!(
            q.poisson_bracket(&lp(&q, &[0, 1]), &lp(&q, &[1, 0]))
                .unwrap(),
            lp(&q, &[1, 1])
        );
        let x = StarAlgebra::mixed();
        assert_eq!(
            x.poisson_bracket(&lp(&x, &[0, 1]), &lp(&x, &[1, 0]))
                .unwrap(),
            lp(&x, &[1, 0])
        );
    }

    #[test]
    fn operand_checks() {
        let m = StarAlgebra::moyal(1).unwrap();
        let q = StarAlgebra::qtorus();
        assert!(matches!(
            m.star_mul(&var(&m, "x", 2), &var(&q, "x1", 2)),
            Err(Error::VarMismatch { .. })
        ));
        assert_eq!(
            m.star_mul(&var(&m, "x", 2), &var(&m, "x", 3)),
            Err(Error::OrderMismatch(2, 3))
        );
    }

    #[test]
    fn tags_round_trip() {
        for t in ["moyal:1", "moyal:2", "qtorus", "mixed", "mixed_op"] {
            assert_eq!(t.parse::<StarAlgebra>().unwrap().tag(), t);
        }
        assert!("moyal:0".parse::<StarAlgebra>().is_err());
        assert!("torus".parse::<StarAlgebra>().is_err());
    }

    #[test]
    fn moyal_two_dof_commutators() {
        let m = StarAlgebra::moyal(2).unwrap();
        let n = 2;
        let h = HSeries::hbar(m.vars(), n);
        assert_eq!(
            m.star_commutator(&var(&m, "u1", n), &var(&m, "x1", n))
                .unwrap(),
            h
        );
        assert_eq!(
            m.star_commutator(&var(&m, "u2", n), &var(&m, "x2", n))
                .unwrap(),
            h
        );
        assert!(m
            .star_commutator(&var(&m, "u1", n), &var(&m, "x2", n))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn small_axiom_run_passes() {
        let spec = SampleSpec {
            samples: 10,
            order: 4,
            max_terms: 4,
            ..Default::default()
        };
        for alg in [
            StarAlgebra::moyal(1).unwrap(),
            StarAlgebra::qtorus(),
            StarAlgebra::mixed_opposite(),
        ] {
            let r = verify_star_axioms(&alg, &spec, &Axiom::ALL).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
        }
    }
}
