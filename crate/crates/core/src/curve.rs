//! Plane curves, characteristic polynomials of Higgs fields in a chart, and
//! their quantization into operators.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::maps::SymbolMap;
use crate::operator::{OpAlgebra, SkewOperator};
use crate::series::{HSeries, LaurentPoly, Rational, VarSet};

/// The three chart layouts `(base, fiber)` a curve can live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveLayout {
    /// `T*C`, variables `(x, xi)`, both polynomial.
    Cotangent,
    /// `C* × C*`, variables `(x1, x2)`, both invertible; base `x1`.
    Torus,
    /// `C* × C`, variables `(x1, x2)` with `x1` invertible; base `x2`,
    /// fiber `x1`.
    Mixed,
}

impl CurveLayout {
    pub fn vars(self) -> VarSet {
        match self {
            CurveLayout::Cotangent => VarSet::of(&[("x", false), ("xi", false)]),
            CurveLayout::Torus => VarSet::of(&[("x1", true), ("x2", true)]),
            CurveLayout::Mixed => VarSet::of(&[("x1", true), ("x2", false)]),
        }
    }

    /// Indices of the base and fiber variables.
    pub fn coordinates(self) -> (usize, usize) {
        match self {
            CurveLayout::Cotangent | CurveLayout::Torus => (0, 1),
            CurveLayout::Mixed => (1, 0),
        }
    }

    /// Recognizes a layout from a variable list.
    pub fn detect(vars: &VarSet) -> Result<Self> {
        [
            CurveLayout::Cotangent,
            CurveLayout::Torus,
            CurveLayout::Mixed,
        ]
        .into_iter()
        .find(|l| l.vars().as_slice() == vars.as_slice())
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "curve variables [{}] match no layout (x,xi | x1*,x2* | x1*,x2)",
                vars.names()
            ))
        })
    }
}

/// A nonzero Laurent polynomial `P(base, fiber)` on one of the layouts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCurve {
    layout: CurveLayout,
    poly: LaurentPoly,
}

impl PlaneCurve {
    pub fn new(poly: LaurentPoly) -> Result<Self> {
        let layout = CurveLayout::detect(poly.vars())?;
        if poly.is_zero() {
            return Err(Error::InvalidInput(
                "curve polynomial is identically zero".into(),
            ));
        }
        Ok(PlaneCurve { layout, poly })
    }

    pub fn layout(&self) -> CurveLayout {
        self.layout
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.poly
    }

    /// `P^2`, the input used when a rank-one spectral curve is quantized
    /// through its square.
    pub fn squared(&self) -> Self {
        PlaneCurve {
            layout: self.layout,
            poly: &self.poly * &self.poly,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantizationTarget {
    Weyl,
    Scaling,
    Translation,
}

impl QuantizationTarget {
    pub fn layout(self) -> CurveLayout {
        match self {
            QuantizationTarget::Weyl => CurveLayout::Cotangent,
            QuantizationTarget::Scaling => CurveLayout::Torus,
            QuantizationTarget::Translation => CurveLayout::Mixed,
        }
    }

    pub fn algebra(self) -> OpAlgebra {
        match self {
            QuantizationTarget::Weyl => OpAlgebra::weyl(1).expect("one variable"),
            QuantizationTarget::Scaling => OpAlgebra::scaling(),
            QuantizationTarget::Translation => OpAlgebra::translation(),
        }
    }

    pub fn symbol_map(self) -> SymbolMap {
        match self {
            QuantizationTarget::Weyl => SymbolMap::ReesToMoyal(1),
            QuantizationTarget::Scaling => SymbolMap::ScalingToQTorus,
            QuantizationTarget::Translation => SymbolMap::TranslationToMixedOpposite,
        }
    }
}

impl fmt::Display for QuantizationTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantizationTarget::Weyl => "weyl",
            QuantizationTarget::Scaling => "scaling",
            QuantizationTarget::Translation => "translation",
        })
    }
}

impl FromStr for QuantizationTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weyl" => Ok(QuantizationTarget::Weyl),
            "scaling" => Ok(QuantizationTarget::Scaling),
            "translation" => Ok(QuantizationTarget::Translation),
            _ => Err(Error::InvalidInput(format!(
                "unknown quantization target `{s}` (expected weyl|scaling|translation)"
            ))),
        }
    }
}

/// Normal-ordered lift of `curve` at `ħ^0`: `base^a fiber^b ↦ x^a G^b` with
/// `G = ħ∂`, `S` or `T`.
pub fn quantize_plane_curve(
    curve: &PlaneCurve,
    target: QuantizationTarget,
    order: usize,
) -> Result<SkewOperator> {
    if curve.layout != target.layout() {
        return Err(Error::Incompatible(format!(
            "curve on [{}] cannot be quantized in the {target} algebra (needs [{}])",
            curve.poly.vars().names(),
            target.layout().vars().names()
        )));
    }
    let alg = target.algebra();
    let v = alg.vars().clone();
    let (bi, fi) = curve.layout.coordinates();
    let mut terms = Vec::new();
    for (e, c) in curve.poly.terms() {
        let b = e[fi];
        let hpow = if target == QuantizationTarget::Weyl {
            b as usize
        } else {
            0
        };
        if hpow > order {
            return Err(Error::DegreeBound {
                bound: order as i32,
                what: format!("fiber degree {b} exceeds the truncation order"),
            });
        }
        terms.push((
            vec![b],
            HSeries::monomial(&v, hpow, vec![e[bi]], c.clone(), order)?,
        ));
    }
    SkewOperator::from_terms(&alg, order, terms)
}

/// Classical curve cut out by the quantization: `σ0` of the symbol of `op`,
/// expressed on the layout matching `map` (with `u` renamed `xi`).
pub fn semiclassical_check(op: &SkewOperator, map: &SymbolMap) -> Result<PlaneCurve> {
    let image = map.apply(op)?.sigma0();
    let layout = match map {
        SymbolMap::ReesToMoyal(1) => CurveLayout::Cotangent,
        SymbolMap::ScalingToQTorus => CurveLayout::Torus,
        SymbolMap::TranslationToMixedOpposite => CurveLayout::Mixed,
        SymbolMap::ReesToMoyal(_) => {
            return Err(Error::Incompatible(
                "plane curves have one base variable".into(),
            ))
        }
    };
    PlaneCurve::new(image.relabel(&layout.vars(), &[0, 1])?)
}

/// An `r × r` matrix of Laurent polynomials in one base variable: the Higgs
/// field against a chart frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiggsChart {
    var: VarSet,
    entries: Vec<Vec<LaurentPoly>>,
}

impl HiggsChart {
    pub fn new(entries: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let r = entries.len();
        if r == 0 {
            return Err(Error::InvalidInput("Higgs field of rank 0".into()));
        }
        let var = entries[0]
            .first()
            .ok_or_else(|| Error::InvalidInput("empty matrix row".into()))?
            .vars()
            .clone();
        if var.len() != 1 {
            return Err(Error::InvalidInput(
                "Higgs field entries must use one variable".into(),
            ));
        }
        for row in &entries {
            if row.len() != r {
                return Err(Error::InvalidInput(format!(
                    "matrix is not square ({r} rows, a row of {})",
                    row.len()
                )));
            }
            for e in row {
                var.ensure_same(e.vars())?;
            }
        }
        Ok(HiggsChart { var, entries })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn var(&self) -> &VarSet {
        &self.var
    }

    pub fn entries(&self) -> &[Vec<LaurentPoly>] {
        &self.entries
    }
}

type Matrix = Vec<Vec<LaurentPoly>>;

fn mat_mul(a: &Matrix, b: &Matrix, zero: &LaurentPoly) -> Matrix {
    let r = a.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| (0..r).fold(zero.clone(), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
                .collect()
        })
        .collect()
}

/// `det(ξ I − φ)` by the Faddeev–LeVerrier recursion, which only divides
/// by integers and so stays exact over `ℚ[x^±]`. The result is monic of
/// degree `r` in `xi`, on the cotangent layout.
pub fn higgs_char_poly(chart: &HiggsChart) -> Result<PlaneCurve> {
    let r = chart.rank();
    let v = &chart.var;
    let zero = LaurentPoly::zero(v);
    // c[k] = coefficient of ξ^k
    let mut c = vec![zero.clone(); r + 1];
    c[r] = LaurentPoly::one(v);
    let mut m: Matrix = vec![vec![zero.clone(); r]; r];
    for k in 1..=r {
        // M_k = φ M_{k-1} + c_{r-k+1} I
        m = mat_mul(&chart.entries, &m, &zero);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = &row[i] + &c[r - k + 1];
        }
        let am = mat_mul(&chart.entries, &m, &zero);
        let trace = (0..r).fold(zero.clone(), |acc, i| &acc + &am[i][i]);
        c[r - k] = trace.scale(&-Rational::new(1.into(), (k as i64).into()));
    }
    let layout = CurveLayout::Cotangent;
    let lv = layout.vars();
    let mut terms = Vec::new();
    for (k, ck) in c.iter().enumerate() {
        for (e, a) in ck.terms() {
            if e[0] < 0 {
                return Err(Error::NegativeExponent("x".into()));
            }
            terms.push((vec![e[0], k as i32], a.clone()));
        }
    }
    PlaneCurve::new(LaurentPoly::from_terms(&lv, terms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn xpoly(terms: &[(i32, i64)]) -> LaurentPoly {
        let v = VarSet::of(&[("x", false)]);
        LaurentPoly::from_terms(&v, terms.iter().map(|(e, c)| (vec![*e], rat(*c, 1)))).unwrap()
    }

    fn curve(layout: CurveLayout, terms: &[(&[i32], i64)]) -> PlaneCurve {
        PlaneCurve::new(
            LaurentPoly::from_terms(
                &layout.vars(),
                terms.iter().map(|(e, c)| (e.to_vec(), rat(*c, 1))),
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn airy_char_poly() {
        let chart = HiggsChart::new(vec![
            vec![xpoly(&[]), xpoly(&[(0, 1)])],
            vec![xpoly(&[(1, 1)]), xpoly(&[])],
        ])
        .unwrap();
        let got = higgs_char_poly(&chart).unwrap();
        assert_eq!(
            got,
            curve(CurveLayout::Cotangent, &[(&[0, 2], 1), (&[1, 0], -1)])
        );
    }

    #[test]
    fn diagonal_and_rank_one() {
        let a = xpoly(&[(2, 1), (0, 3)]);
        let b = xpoly(&[(1, -2)]);
        let chart = HiggsChart::new(vec![
            vec![a.clone(), xpoly(&[])],
            vec![xpoly(&[]), b.clone()],
        ])
        .unwrap();
        // (ξ − a)(ξ − b) = ξ² − (a+b)ξ + ab
        let expect = curve(
            CurveLayout::Cotangent,
            &[
                (&[0, 2], 1),
                (&[2, 1], -1),
                (&[0, 1], -3),
                (&[1, 1], 2),
                (&[3, 0], -2),
                (&[1, 0], -6),
            ],
        );
        assert_eq!(higgs_char_poly(&chart).unwrap(), expect);
        let one = HiggsChart::new(vec![vec![a]]).unwrap();
        let expect = curve(
            CurveLayout::Cotangent,
            &[(&[0, 1], 1), (&[2, 0], -1), (&[0, 0], -3)],
        );
        assert_eq!(higgs_char_poly(&one).unwrap(), expect);
    }

    #[test]
    fn quantize_examples() {
        let n = 4;
        let airy = curve(CurveLayout::Cotangent, &[(&[0, 2], 1), (&[1, 0], -1)]);
        let op = quantize_plane_curve(&airy, QuantizationTarget::Weyl, n).unwrap();
        let w = OpAlgebra::weyl(1).unwrap();
        let expect = SkewOperator::from_terms(
            &w,
            n,
            [
                (
                    vec![2],
                    HSeries::monomial(w.vars(), 2, vec![0], rat(1, 1), n).unwrap(),
                ),
                (
                    vec![0],
                    HSeries::monomial(w.vars(), 0, vec![1], rat(-1, 1), n).unwrap(),
                ),
            ],
        )
        .unwrap();
        assert_eq!(op, expect);
        assert!(op.is_rees_element().unwrap());
        assert_eq!(
            semiclassical_check(&op, &SymbolMap::ReesToMoyal(1)).unwrap(),
            airy
        );

        let s1 = curve(CurveLayout::Torus, &[(&[0, 1], 1), (&[0, 0], -1)]);
        let op = quantize_plane_curve(&s1, QuantizationTarget::Scaling, n).unwrap();
        let s = OpAlgebra::scaling();
        let expect = SkewOperator::generator(&s, 0, 1, n)
            .unwrap()
            .checked_sub(&SkewOperator::identity(&s, n))
            .unwrap();
        assert_eq!(op, expect);
        assert_eq!(
            semiclassical_check(&op, &SymbolMap::ScalingToQTorus).unwrap(),
            s1
        );

        // x2^2 − c(x1) with c = x1^-1 + 2
        let s2 = curve(
            CurveLayout::Torus,
            &[(&[0, 2], 1), (&[-1, 0], -1), (&[0, 0], -2)],
        );
        let op = quantize_plane_curve(&s2, QuantizationTarget::Scaling, n).unwrap();
        assert_eq!(op.term_count(), 2);
        assert_eq!(
            semiclassical_check(&op, &SymbolMap::ScalingToQTorus).unwrap(),
            s2
        );
    }

    #[test]
    fn translation_round_trip_and_layout_errors() {
        let c = curve(
            CurveLayout::Mixed,
            &[(&[2, 1], 1), (&[-1, 0], 3), (&[0, 3], -1)],
        );
        let op = quantize_plane_curve(&c, QuantizationTarget::Translation, 3).unwrap();
        assert_eq!(
            semiclassical_check(&op, &SymbolMap::TranslationToMixedOpposite).unwrap(),
            c
        );
        assert!(matches!(
            quantize_plane_curve(&c, QuantizationTarget::Scaling, 3),
            Err(Error::Incompatible(_))
        ));
    }

    #[test]
    fn zero_curve_rejected() {
        assert!(PlaneCurve::new(LaurentPoly::zero(&CurveLayout::Torus.vars())).is_err());
    }

    #[test]
    fn squaring() {
        let c = curve(CurveLayout::Cotangent, &[(&[0, 1], 1), (&[1, 0], -1)]);
        let sq = curve(
            CurveLayout::Cotangent,
            &[(&[0, 2], 1), (&[1, 1], -2), (&[2, 0], 1)],
        );
        assert_eq!(c.squared(), sq);
    }
}
