//! Star products synthesized from operator data.
//!
//! Given operators `A_i`, `B_i` with `A_i(1) = B_i(1) = x_i`,
//! `A_i ≡ B_i ≡ x_i mod ħ` and `[A_i, B_j] = 0`, the map `ψ(a) = a(1)`
//! identifies the algebra generated by the `A_i` with the series ring, and
//! `f ⋆ g = ψ(ψ⁻¹(f) ∘ ψ⁻¹(g))` is a star product. `ψ⁻¹` is computed by
//! triangular inversion on the ordered monomials
//! `A^β = A_1^{β_1} ∘ … ∘ A_n^{β_n}` inside a degree box `|β_i| <= D`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::One;

use crate::error::{Error, Result};
use crate::operator::{basis_box, op_equal_on_basis, Generator, OpAlgebra, SkewOperator};
use crate::series::{Exponents, HSeries, LaurentPoly, Rational, VarSet};
use crate::star::{StarAlgebra, StarProduct};

/// Operator data `(A_i, B_i)` together with the degree box and truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizationData {
    pub name: String,
    pub algebra: OpAlgebra,
    pub a: Vec<SkewOperator>,
    pub b: Vec<SkewOperator>,
    pub degree_bound: i32,
    pub order: usize,
}

fn term(
    alg: &OpAlgebra,
    n: usize,
    hpow: usize,
    exps: &[i32],
    powers: &[i32],
) -> (Vec<i32>, HSeries) {
    let c = HSeries::monomial(alg.vars(), hpow, exps.to_vec(), Rational::one(), n)
        .expect("built-in data exponents are admissible");
    (powers.to_vec(), c)
}

fn op(alg: &OpAlgebra, n: usize, terms: &[(usize, &[i32], &[i32])]) -> SkewOperator {
    SkewOperator::from_terms(alg, n, terms.iter().map(|(k, e, p)| term(alg, n, *k, e, p)))
        .expect("built-in data is well formed")
}

impl QuantizationData {
    pub fn new(
        name: impl Into<String>,
        a: Vec<SkewOperator>,
        b: Vec<SkewOperator>,
        degree_bound: i32,
    ) -> Result<Self> {
        let first = a
            .first()
            .ok_or_else(|| Error::InvalidInput("quantization data needs operators".into()))?;
        let algebra = first.algebra().clone();
        if a.len() != algebra.vars().len() || b.len() != a.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} A- and B-operators, got {} and {}",
                algebra.vars().len(),
                a.len(),
                b.len()
            )));
        }
        let order = first.order();
        for o in a.iter().chain(&b) {
            if o.algebra() != &algebra {
                return Err(Error::TagMismatch(
                    algebra.to_string(),
                    o.algebra().to_string(),
                ));
            }
            if o.order() != order {
                return Err(Error::OrderMismatch(order, o.order()));
            }
        }
        if degree_bound < 0 {
            return Err(Error::InvalidInput(
                "degree bound must be non-negative".into(),
            ));
        }
        Ok(QuantizationData {
            name: name.into(),
            algebra,
            a,
            b,
            degree_bound,
            order,
        })
    }

    /// `C* × C*`: `A = (x1, x2 Δ1)`, `B = (x1 Δ2, x2)`.
    pub fn torus(degree_bound: i32, order: usize) -> Self {
        Self::torus_with_b1(degree_bound, order, 1, "torus")
    }

    /// Torus data with `B1` replaced by `x1 Δ2^2`; violates `[A2, B1] = 0`.
    pub fn torus_corrupted(degree_bound: i32, order: usize) -> Self {
        Self::torus_with_b1(degree_bound, order, 2, "torus-corrupted")
    }

    fn torus_with_b1(degree_bound: i32, n: usize, b1_power: i32, name: &str) -> Self {
        let vars = VarSet::of(&[("x1", true), ("x2", true)]);
        let alg = OpAlgebra::general(&vars, &[Generator::Dilation, Generator::Dilation])
            .expect("static alphabet");
        let a = vec![
            op(&alg, n, &[(0, &[1, 0], &[0, 0])]),
            op(&alg, n, &[(0, &[0, 1], &[1, 0])]),
        ];
        let b = vec![
            op(&alg, n, &[(0, &[1, 0], &[0, b1_power])]),
            op(&alg, n, &[(0, &[0, 1], &[0, 0])]),
        ];
        QuantizationData::new(name, a, b, degree_bound).expect("static data")
    }

    /// `C* × C`: `A = (x1, ħ x1 ∂1 + x2)`, `B = (x1 τ2, x2)`.
    pub fn mixed(degree_bound: i32, order: usize) -> Self {
        let n = order;
        let vars = VarSet::of(&[("x1", true), ("x2", false)]);
        let alg = OpAlgebra::general(&vars, &[Generator::Deriv, Generator::Translation])
            .expect("static alphabet");
        let a = vec![
            op(&alg, n, &[(0, &[1, 0], &[0, 0])]),
            op(&alg, n, &[(1, &[1, 0], &[1, 0]), (0, &[0, 1], &[0, 0])]),
        ];
        let b = vec![
            op(&alg, n, &[(0, &[1, 0], &[0, 1])]),
            op(&alg, n, &[(0, &[0, 1], &[0, 0])]),
        ];
        QuantizationData::new("mixed", a, b, degree_bound).expect("static data")
    }

    /// Exchanges the two families.
    pub fn opposite(&self) -> Self {
        QuantizationData {
            name: format!("{}-opposite", self.name),
            algebra: self.algebra.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
            degree_bound: self.degree_bound,
            order: self.order,
        }
    }

    /// Looks up a built-in data set by name.
    pub fn builtin(name: &str, degree_bound: i32, order: usize) -> Result<Self> {
        match name {
            "torus" => Ok(Self::torus(degree_bound, order)),
            "torus-corrupted" => Ok(Self::torus_corrupted(degree_bound, order)),
            "mixed" => Ok(Self::mixed(degree_bound, order)),
            "mixed-opposite" => Ok(Self::mixed(degree_bound, order).opposite()),
            _ => Err(Error::InvalidInput(format!(
                "unknown built-in data `{name}` (expected torus|torus-corrupted|mixed|mixed-opposite)"
            ))),
        }
    }

    pub fn vars(&self) -> &VarSet {
        self.algebra.vars()
    }

    /// Variable layout of the closed-form product this data should
    /// reproduce, if any.
    pub fn matching_closed_form(&self) -> Option<StarAlgebra> {
        match self.name.as_str() {
            "torus" | "torus-corrupted" => Some(StarAlgebra::qtorus()),
            "mixed" => Some(StarAlgebra::mixed()),
            "mixed-opposite" => Some(StarAlgebra::mixed_opposite()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionReport {
    pub checks: Vec<Check>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks `A_i(1) = B_i(1) = x_i`, `A_i ≡ B_i ≡ x_i mod ħ` on the signed
/// degree box, and `[A_i, B_j] = 0` on the basis `0..=D`.
pub fn verify_quantization_conditions(data: &QuantizationData) -> Result<ConditionReport> {
    let vars = data.vars();
    let n = data.order;
    let one = HSeries::one(vars, n);
    let mut report = ConditionReport::default();
    let families = [("A", &data.a), ("B", &data.b)];
    for (fam, ops) in families {
        for (i, o) in ops.iter().enumerate() {
            let xi = HSeries::var(vars, &vars.get(i).name, n)?;
            let got = o.apply(&one)?;
            report.checks.push(Check {
                name: format!("{fam}{}(1) = {}", i + 1, vars.get(i).name),
                passed: got == xi,
                detail: if got == xi {
                    String::new()
                } else {
                    format!("{fam}{}(1) = {got:?}", i + 1)
                },
            });
            let mut bad = None;
            for e in basis_box(vars, data.degree_bound, true) {
                let m = LaurentPoly::monomial(vars, e.clone(), Rational::one())?;
                let image = o.apply(&HSeries::from_laurent(m.clone(), n))?.sigma0();
                if image != xi.coeff(0) * &m {
                    bad = Some(e);
                    break;
                }
            }
            report.checks.push(Check {
                name: format!("{fam}{} = {} mod hbar", i + 1, vars.get(i).name),
                passed: bad.is_none(),
                detail: bad
                    .map(|e| format!("differs on monomial {e:?}"))
                    .unwrap_or_default(),
            });
        }
    }
    for (i, a) in data.a.iter().enumerate() {
        for (j, b) in data.b.iter().enumerate() {
            let ab = a.compose(b)?;
            let ba = b.compose(a)?;
            let ok = op_equal_on_basis(&ab, &ba, data.degree_bound)?;
            report.checks.push(Check {
                name: format!("[A{}, B{}] = 0", i + 1, j + 1),
                passed: ok,
                detail: if ok {
                    String::new()
                } else {
                    format!("commutator {:?}", ab.checked_sub(&ba)?)
                },
            });
        }
    }
    Ok(report)
}

/// `ψ(P) = P(1)`.
pub fn psi_forward(data: &QuantizationData, p: &SkewOperator) -> Result<HSeries> {
    data.vars().ensure_same(p.vars())?;
    p.apply(&HSeries::one(data.vars(), data.order))
}

/// Caches ordered monomials `A^β` and inverse images for one data set.
pub struct Synthesizer {
    data: QuantizationData,
    powers: Mutex<HashMap<(usize, i32), SkewOperator>>,
    monomials: Mutex<HashMap<Exponents, (SkewOperator, HSeries)>>,
    inverses: Mutex<HashMap<HSeries, SkewOperator>>,
}

impl Synthesizer {
    pub fn new(data: QuantizationData) -> Self {
        Synthesizer {
            data,
            powers: Mutex::new(HashMap::new()),
            monomials: Mutex::new(HashMap::new()),
            inverses: Mutex::new(HashMap::new()),
        }
    }

    pub fn data(&self) -> &QuantizationData {
        &self.data
    }

    fn a_power(&self, i: usize, k: i32) -> Result<SkewOperator> {
        if let Some(p) = self.powers.lock().unwrap().get(&(i, k)) {
            return Ok(p.clone());
        }
        let p = match k {
            0 => SkewOperator::identity(&self.data.algebra, self.data.order),
            1 => self.data.a[i].clone(),
            -1 => self.data.a[i]
                .try_inverse()
                .map_err(|e| Error::OutOfSpan(format!("A{} has no inverse: {e}", i + 1)))?,
            _ => {
                let step = k.signum();
                self.a_power(i, k - step)?
                    .compose(&self.a_power(i, step)?)?
            }
        };
        self.powers.lock().unwrap().insert((i, k), p.clone());
        Ok(p)
    }

    /// `A^β` and `A^β(1)`.
    pub fn ordered_monomial(&self, beta: &[i32]) -> Result<(SkewOperator, HSeries)> {
        if let Some(hit) = self.monomials.lock().unwrap().get(beta) {
            return Ok(hit.clone());
        }
        let mut acc = SkewOperator::identity(&self.data.algebra, self.data.order);
        for (i, &k) in beta.iter().enumerate() {
            acc = acc.compose(&self.a_power(i, k)?)?;
        }
        let image = psi_forward(&self.data, &acc)?;
        self.monomials
            .lock()
            .unwrap()
            .insert(beta.to_vec(), (acc.clone(), image.clone()));
        Ok((acc, image))
    }

    fn check_box(&self, e: &[i32], what: &str) -> Result<()> {
        let d = self.data.degree_bound;
        if e.iter().any(|x| x.abs() > d) {
            return Err(Error::DegreeBound {
                bound: d,
                what: format!("{what} exponent {e:?}"),
            });
        }
        Ok(())
    }

    /// The operator `a` in the span of the `A^β` with `a(1) = f`, checked
    /// afterwards to commute with every `B_i`.
    pub fn psi_inverse(&self, f: &HSeries) -> Result<SkewOperator> {
        let vars = self.data.vars();
        vars.ensure_same(f.vars())?;
        let n = self.data.order;
        let f = f.truncate(n);
        if f.order() < n {
            return Err(Error::OrderMismatch(n, f.order()));
        }
        if let Some(hit) = self.inverses.lock().unwrap().get(&f) {
            return Ok(hit.clone());
        }
        for (_, e, _) in f.terms() {
            self.check_box(e, "input")?;
        }
        let mut result = SkewOperator::zero(&self.data.algebra, n);
        let mut residual = f.clone();
        // each pass clears the lowest ħ-order of the residual
        while let Some(t) = residual.valuation() {
            let level: Vec<(Exponents, Rational)> = residual
                .coeff(t)
                .terms()
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect();
            for (e, c) in level {
                self.check_box(&e, "residual")?;
                let (mono, image) = self.ordered_monomial(&e)?;
                let expect = LaurentPoly::monomial(vars, e.clone(), Rational::one())?;
                if image.sigma0() != expect {
                    return Err(Error::OutOfSpan(format!(
                        "A^{e:?}(1) does not reduce to x^{e:?} mod hbar"
                    )));
                }
                let w = HSeries::monomial(vars, t, vec![0; vars.len()], c, n)?;
                result = result.checked_add(&mono.mul_coeff(&w)?)?;
                residual = &residual - &(&w * &image);
            }
            if residual.valuation() == Some(t) {
                return Err(Error::OutOfSpan(format!(
                    "triangular inversion stalled at order {t}"
                )));
            }
        }
        for (i, b) in self.data.b.iter().enumerate() {
            if !result.commutator(b)?.is_zero() {
                return Err(Error::Incompatible(format!(
                    "preimage does not commute with B{}",
                    i + 1
                )));
            }
        }
        self.inverses.lock().unwrap().insert(f, result.clone());
        Ok(result)
    }

    /// `ψ(ψ⁻¹(f) ∘ ψ⁻¹(g))`, computed as `ψ⁻¹(f)` applied to `g`.
    pub fn synthesize_star(&self, f: &HSeries, g: &HSeries) -> Result<HSeries> {
        let a = self.psi_inverse(f)?;
        let b = self.psi_inverse(g)?;
        psi_forward(&self.data, &a.compose(&b)?)
    }
}

impl StarProduct for Synthesizer {
    fn vars(&self) -> &VarSet {
        self.data.vars()
    }
    fn product(&self, f: &HSeries, g: &HSeries) -> Result<HSeries> {
        self.synthesize_star(f, g)
    }
    fn name(&self) -> String {
        format!("synthesized:{}", self.data.name)
    }
}

pub fn psi_inverse(data: &QuantizationData, f: &HSeries) -> Result<SkewOperator> {
    Synthesizer::new(data.clone()).psi_inverse(f)
}

pub fn synthesize_star(data: &QuantizationData, f: &HSeries, g: &HSeries) -> Result<HSeries> {
    Synthesizer::new(data.clone()).synthesize_star(f, g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub pair: (HSeries, HSeries),
    pub expected: HSeries,
    pub got: HSeries,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrosscheckReport {
    pub pairs_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the synthesized product with `closed_form` on every pair of
/// monomials in the signed box `|α_i| <= D`. Monomials outside the data's
/// own bound are skipped; at most `max_mismatches` witnesses are kept.
pub fn synthesis_crosscheck(
    data: &QuantizationData,
    closed_form: &StarAlgebra,
    d: i32,
    max_mismatches: usize,
) -> Result<CrosscheckReport> {
    let dv = data.vars();
    let cv = closed_form.vars();
    let same_names =
        dv.len() == cv.len() && dv.iter().zip(cv.iter()).all(|(a, b)| a.name == b.name);
    if !same_names {
        return Err(Error::Incompatible(format!(
            "data variables [{}] do not match {} variables [{}]",
            dv.names(),
            closed_form,
            cv.names()
        )));
    }
    // negative exponents only where both layouts allow them
    let common = VarSet::new(
        dv.iter()
            .zip(cv.iter())
            .map(|(a, b)| crate::series::Var::new(a.name.clone(), a.invertible && b.invertible))
            .collect(),
    )?;
    let synth = Synthesizer::new(data.clone());
    let n = data.order;
    let ids = identity_map(dv.len());
    let monomials: Vec<Exponents> = basis_box(&common, d.min(data.degree_bound), true);
    let mut report = CrosscheckReport::default();
    for ef in &monomials {
        let f = HSeries::monomial(cv, 0, ef.clone(), Rational::one(), n)?;
        let a = synth.psi_inverse(&f.relabel(dv, &ids)?)?;
        for eg in &monomials {
            let g = HSeries::monomial(cv, 0, eg.clone(), Rational::one(), n)?;
            let raw = a.apply(&g.relabel(dv, &ids)?)?;
            let got = raw.relabel(cv, &ids).unwrap_or(raw);
            let expected = closed_form.star_mul(&f, &g)?;
            report.pairs_checked += 1;
            if got != expected && report.mismatches.len() < max_mismatches {
                report.mismatches.push(Mismatch {
                    pair: (f.clone(), g.clone()),
                    expected,
                    got,
                });
            }
        }
    }
    Ok(report)
}

fn identity_map(n: usize) -> Vec<usize> {
    (0..n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{exp_hbar, rat};

    /// `e^{-ħ}` times `A2 ∘ A1`, the preimage of `x1 x2` for the torus data.
    fn torus_x1x2_preimage(data: &QuantizationData) -> Result<SkewOperator> {
        let a21 = data.a[1].compose(&data.a[0])?;
        a21.mul_coeff(&exp_hbar(&rat(-1, 1), data.vars(), data.order))
    }

    fn mono(vars: &VarSet, e: &[i32], n: usize) -> HSeries {
        HSeries::monomial(vars, 0, e.to_vec(), Rational::one(), n).unwrap()
    }

    #[test]
    fn built_in_data_satisfy_conditions() {
        for data in [QuantizationData::torus(3, 4), QuantizationData::mixed(3, 4)] {
            let r = verify_quantization_conditions(&data).unwrap();
            assert!(
                r.passed(),
                "{}: {:?}",
                data.name,
                r.failures().collect::<Vec<_>>()
            );
            let r = verify_quantization_conditions(&data.opposite()).unwrap();
            assert!(r.passed());
        }
    }

    #[test]
    fn corrupted_data_fails_only_on_a2_b1() {
        let r = verify_quantization_conditions(&QuantizationData::torus_corrupted(3, 4)).unwrap();
        let failed: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["[A2, B1] = 0"]);
    }

    #[test]
    fn psi_forward_examples() {
        let data = QuantizationData::torus(3, 4);
        let v = data.vars().clone();
        assert_eq!(
            psi_forward(&data, &data.a[1]).unwrap(),
            mono(&v, &[0, 1], 4)
        );
        let id = SkewOperator::identity(&data.algebra, 4);
        assert_eq!(psi_forward(&data, &id).unwrap(), HSeries::one(&v, 4));
        let a21 = data.a[1].compose(&data.a[0]).unwrap();
        let expect = &mono(&v, &[1, 1], 4) * &exp_hbar(&rat(1, 1), &v, 4);
        assert_eq!(psi_forward(&data, &a21).unwrap(), expect);
    }

    #[test]
    fn psi_inverse_examples() {
        let data = QuantizationData::torus(3, 4);
        let v = data.vars().clone();
        assert_eq!(
            psi_inverse(&data, &mono(&v, &[1, 0], 4)).unwrap(),
            data.a[0]
        );
        assert_eq!(
            psi_inverse(&data, &mono(&v, &[0, 1], 4)).unwrap(),
            data.a[1]
        );
        assert_eq!(
            psi_inverse(&data, &HSeries::one(&v, 4)).unwrap(),
            SkewOperator::identity(&data.algebra, 4)
        );
        assert_eq!(
            psi_inverse(&data, &mono(&v, &[1, 1], 4)).unwrap(),
            torus_x1x2_preimage(&data).unwrap()
        );
        assert!(matches!(
            psi_inverse(&data, &mono(&v, &[4, 0], 4)),
            Err(Error::DegreeBound { .. })
        ));
    }

    #[test]
    fn synthesized_products_match_examples() {
        let t = QuantizationData::torus(3, 4);
        let v = t.vars().clone();
        let got = synthesize_star(&t, &mono(&v, &[0, 1], 4), &mono(&v, &[1, 0], 4)).unwrap();
        assert_eq!(got, &mono(&v, &[1, 1], 4) * &exp_hbar(&rat(1, 1), &v, 4));
        let g = mono(&v, &[2, -1], 4);
        assert_eq!(synthesize_star(&t, &HSeries::one(&v, 4), &g).unwrap(), g);

        let m = QuantizationData::mixed(3, 4);
        let v = m.vars().clone();
        let got = synthesize_star(&m, &mono(&v, &[0, 1], 4), &mono(&v, &[1, 0], 4)).unwrap();
        let expect =
            &mono(&v, &[1, 1], 4) + &HSeries::monomial(&v, 1, vec![1, 0], rat(1, 1), 4).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn small_crosschecks() {
        let r = synthesis_crosscheck(&QuantizationData::torus(2, 4), &StarAlgebra::qtorus(), 2, 5)
            .unwrap();
        assert!(r.passed());
        assert_eq!(r.pairs_checked, 625);
        let r = synthesis_crosscheck(
            &QuantizationData::mixed(2, 4).opposite(),
            &StarAlgebra::mixed_opposite(),
            2,
            5,
        )
        .unwrap();
        assert!(r.passed(), "{:?}", r.mismatches.first());
    }

    #[test]
    fn torus_data_against_mixed_product_fails() {
        let r = synthesis_crosscheck(
            &QuantizationData::torus(2, 3),
            &StarAlgebra::mixed(),
            2,
            usize::MAX,
        )
        .unwrap();
        assert!(!r.passed());
        let v = StarAlgebra::mixed().vars().clone();
        let witness = (mono(&v, &[0, 1], 3), mono(&v, &[1, 0], 3));
        assert!(r.mismatches.iter().any(|m| m.pair == witness));
    }
}
