//! Symbol maps from operator algebras into star algebras:
//!
//! * Rees/differential operators → Moyal: `f ∂^k ↦ f ħ^{-|k|} u^k`;
//! * scaling operators → quantum torus: `f(x) S^k ↦ f(x1) x2^k`;
//! * translation operators → opposite mixed product: `f(x) T^k ↦ f(x2) x1^k`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::operator::{OpAlgebra, OpTag, SkewOperator};
use crate::sampling::{self, random_operator, random_rational, SampleSpec};
use crate::series::{HSeries, LaurentPoly, Rational, VarSet};
use crate::star::StarAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolMap {
    ReesToMoyal(usize),
    ScalingToQTorus,
    TranslationToMixedOpposite,
}

impl SymbolMap {
    /// Source algebra used when sampling; the map also accepts the
    /// weyl/⁺ variants with the same layout.
    pub fn source(&self) -> OpAlgebra {
        match self {
            SymbolMap::ReesToMoyal(n) => OpAlgebra::rees(*n).expect("n >= 1"),
            SymbolMap::ScalingToQTorus => OpAlgebra::scaling(),
            SymbolMap::TranslationToMixedOpposite => OpAlgebra::translation(),
        }
    }

    pub fn target(&self) -> StarAlgebra {
        match self {
            SymbolMap::ReesToMoyal(n) => StarAlgebra::moyal(*n).expect("n >= 1"),
            SymbolMap::ScalingToQTorus => StarAlgebra::qtorus(),
            SymbolMap::TranslationToMixedOpposite => StarAlgebra::mixed_opposite(),
        }
    }

    /// Applies the map to an operator of a compatible tag.
    pub fn apply(&self, p: &SkewOperator) -> Result<HSeries> {
        match self {
            SymbolMap::ReesToMoyal(n) => {
                if p.vars().len() != *n {
                    return Err(Error::TagMismatch(
                        p.algebra().to_string(),
                        self.source().to_string(),
                    ));
                }
                rees_symbol(p)
            }
            SymbolMap::ScalingToQTorus => phi_scaling(p),
            SymbolMap::TranslationToMixedOpposite => psi_translation(p),
        }
    }
}

impl fmt::Display for SymbolMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolMap::ReesToMoyal(1) => f.write_str("rees_to_moyal"),
            SymbolMap::ReesToMoyal(n) => write!(f, "rees_to_moyal:{n}"),
            SymbolMap::ScalingToQTorus => f.write_str("scaling_to_qtorus"),
            SymbolMap::TranslationToMixedOpposite => f.write_str("translation_to_mixed_op"),
        }
    }
}

impl FromStr for SymbolMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rees_to_moyal" => Ok(SymbolMap::ReesToMoyal(1)),
            "scaling_to_qtorus" => Ok(SymbolMap::ScalingToQTorus),
            "translation_to_mixed_op" => Ok(SymbolMap::TranslationToMixedOpposite),
            _ => match s.strip_prefix("rees_to_moyal:").and_then(|n| n.parse().ok()) {
                Some(n) if n >= 1 => Ok(SymbolMap::ReesToMoyal(n)),
                _ => Err(Error::InvalidInput(format!(
                    "unknown symbol map `{s}` (expected rees_to_moyal[:n]|scaling_to_qtorus|translation_to_mixed_op)"
                ))),
            },
        }
    }
}

/// Builds `Σ c · x^{e} · (fiber monomial)` in the target layout, with `place`
/// mapping the source coefficient variables and `fiber` giving the target
/// exponent vector contributed by the generator powers.
fn transport(
    p: &SkewOperator,
    target: &VarSet,
    order: usize,
    place: &[usize],
    hbar_drop: impl Fn(&[i32]) -> usize,
    fiber: impl Fn(&[i32]) -> Vec<i32>,
) -> Result<HSeries> {
    let mut out = HSeries::zero(target, order);
    for (powers, c) in p.terms() {
        let drop = hbar_drop(powers);
        let fe = fiber(powers);
        let mut terms = Vec::new();
        for (k, e, a) in c.terms() {
            if k < drop {
                return Err(Error::NotRees {
                    generators: format!("{powers:?}"),
                    valuation: k,
                    required: drop,
                });
            }
            let mut ne = fe.clone();
            for (i, &x) in e.iter().enumerate() {
                ne[place[i]] += x;
            }
            if k - drop <= order {
                terms.push((k - drop, ne, a.clone()));
            }
        }
        out = &out + &HSeries::from_terms(target, order, terms)?;
    }
    Ok(out)
}

/// Total symbol of a Rees element: `f ∂^k ↦ f ħ^{-|k|} u^k` over the Moyal
/// layout `(x…; u…)`. The result is known to order `N - max|k|`.
pub fn rees_symbol(p: &SkewOperator) -> Result<HSeries> {
    let n = match p.tag() {
        OpTag::Weyl(n) | OpTag::Rees(n) => *n,
        _ => {
            return Err(Error::TagMismatch(
                p.algebra().to_string(),
                "weyl or rees".into(),
            ))
        }
    };
    let target = StarAlgebra::moyal(n)?;
    let kmax = p
        .terms()
        .map(|(k, _)| k.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>())
        .max()
        .unwrap_or(0);
    if kmax > p.order() {
        return Err(Error::NotRees {
            generators: format!("total degree {kmax}"),
            valuation: p.order(),
            required: kmax,
        });
    }
    let place: Vec<usize> = (0..n).collect();
    transport(
        p,
        target.vars(),
        p.order() - kmax,
        &place,
        |k| k.iter().map(|x| x.unsigned_abs() as usize).sum(),
        |k| {
            let mut e = vec![0; 2 * n];
            e[n..].copy_from_slice(k);
            e
        },
    )
}

/// `f(x) S^k ↦ f(x1) x2^k` into the quantum torus.
pub fn phi_scaling(p: &SkewOperator) -> Result<HSeries> {
    if !matches!(p.tag(), OpTag::Scaling | OpTag::ScalingPlus) {
        return Err(Error::TagMismatch(
            p.algebra().to_string(),
            "scaling".into(),
        ));
    }
    let target = StarAlgebra::qtorus();
    transport(p, target.vars(), p.order(), &[0], |_| 0, |k| vec![0, k[0]])
}

/// `f(x) T^k ↦ f(x2) x1^k` into the opposite mixed product.
pub fn psi_translation(p: &SkewOperator) -> Result<HSeries> {
    if !matches!(p.tag(), OpTag::Translation | OpTag::TranslationPlus) {
        return Err(Error::TagMismatch(
            p.algebra().to_string(),
            "translation".into(),
        ));
    }
    let target = StarAlgebra::mixed_opposite();
    transport(p, target.vars(), p.order(), &[1], |_| 0, |k| vec![k[0], 0])
}

/// A failed morphism check with its operator inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphismWitness {
    pub check: String,
    pub p: SkewOperator,
    pub q: SkewOperator,
    pub lhs: HSeries,
    pub rhs: HSeries,
}

#[derive(Clone, Debug, Default)]
pub struct MorphismReport {
    pub map: String,
    pub checked: Vec<(String, usize)>,
    pub failures: Vec<MorphismWitness>,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Bounds for operator samples used by [`verify_morphism`].
#[derive(Clone, Debug)]
pub struct OperatorSampleSpec {
    pub series: SampleSpec,
    pub max_terms: usize,
    pub power_lo: i32,
    pub power_hi: i32,
}

impl Default for OperatorSampleSpec {
    fn default() -> Self {
        OperatorSampleSpec {
            series: SampleSpec {
                max_terms: 4,
                exp_lo: -3,
                exp_hi: 3,
                ..SampleSpec::default()
            },
            max_terms: 3,
            power_lo: -2,
            power_hi: 2,
        }
    }
}

/// Checks unit, additivity, ħ-linearity and multiplicativity
/// `map(P ∘ Q) = map(P) ⋆ map(Q)` on sampled pairs, exactly to order `N`.
/// Rees samples are drawn at order `N + 2·power_hi` so that every symbol is
/// known to order `N`.
pub fn verify_morphism(map: &SymbolMap, spec: &OperatorSampleSpec) -> Result<MorphismReport> {
    let n = spec.series.order;
    let target = map.target();
    let source = map.source();
    let mut sample = spec.series.clone();
    if let SymbolMap::ReesToMoyal(_) = map {
        // each factor loses at most its own degree; the product loses the sum
        let hi = spec.power_hi.max(0) as usize * source.vars().len();
        sample.order = n + 2 * hi;
    }
    let mut rng = sampling::rng(spec.series.seed);
    let mut report = MorphismReport {
        map: map.to_string(),
        ..Default::default()
    };
    let at_n = |s: HSeries| s.truncate(n);
    let unit = at_n(map.apply(&SkewOperator::identity(&source, sample.order))?);
    if unit != HSeries::one(target.vars(), n) {
        let id = SkewOperator::identity(&source, sample.order);
        report.failures.push(MorphismWitness {
            check: "unit".into(),
            p: id.clone(),
            q: id,
            lhs: unit,
            rhs: HSeries::one(target.vars(), n),
        });
    }
    let (mut mult, mut add) = (None, None);
    for _ in 0..spec.series.samples {
        let p = random_operator(
            &mut rng,
            &source,
            &sample,
            spec.max_terms,
            spec.power_lo,
            spec.power_hi,
        );
        let q = random_operator(
            &mut rng,
            &source,
            &sample,
            spec.max_terms,
            spec.power_lo,
            spec.power_hi,
        );
        let mp = at_n(map.apply(&p)?);
        let mq = at_n(map.apply(&q)?);
        let lhs = at_n(map.apply(&p.compose(&q)?)?);
        let rhs = target.star_mul(&mp, &mq)?;
        if mult.is_none() && lhs != rhs {
            mult = Some(MorphismWitness {
                check: "multiplicative".into(),
                p: p.clone(),
                q: q.clone(),
                lhs,
                rhs,
            });
        }
        let a: Rational = random_rational(&mut rng);
        let hq = q.mul_coeff(&HSeries::hbar(source.vars(), sample.order).scale(&a))?;
        let lhs = at_n(map.apply(&p.checked_add(&hq)?)?);
        let rhs = &mp + &mq.shift_hbar(1).scale(&a);
        if add.is_none() && lhs != rhs {
            add = Some(MorphismWitness {
                check: "additive".into(),
                p,
                q,
                lhs,
                rhs,
            });
        }
    }
    report.checked.push(("unit".into(), 1));
    report
        .checked
        .push(("multiplicative".into(), spec.series.samples));
    report
        .checked
        .push(("additive".into(), spec.series.samples));
    report.failures.extend(mult);
    report.failures.extend(add);
    Ok(report)
}

/// Classical part of the image, renaming nothing; convenience for the
/// curve module.
pub fn classical_image(map: &SymbolMap, p: &SkewOperator) -> Result<LaurentPoly> {
    Ok(map.apply(p)?.sigma0())
}
