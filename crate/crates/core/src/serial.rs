//! JSON documents for series, operators, curves, Higgs charts,
//! quantization data and verification reports.
//!
//! Field order is fixed by the struct definitions and every list is
//! emitted in canonical order, so equal values serialize to equal bytes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::curve::{HiggsChart, PlaneCurve};
use crate::error::Error;
use crate::expr::{self, ExprError};
use crate::maps::{MorphismReport, MorphismWitness};
use crate::operator::{OpAlgebra, SkewOperator};
use crate::series::{HSeries, LaurentPoly, Rational, Var, VarSet};
use crate::star::{AxiomReport, Witness};
use crate::synthesis::{ConditionReport, CrosscheckReport, QuantizationData};

#[derive(Debug, Clone, PartialEq)]
pub enum DocError {
    /// Malformed JSON or an unparsable embedded expression.
    Syntax(String),
    /// Well-formed document describing an invalid value.
    Domain(Error),
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocError::Syntax(m) => f.write_str(m),
            DocError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DocError {}

impl From<Error> for DocError {
    fn from(e: Error) -> Self {
        DocError::Domain(e)
    }
}

impl From<ExprError> for DocError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Parse { .. } => DocError::Syntax(e.to_string()),
            ExprError::Domain(d) => DocError::Domain(d),
        }
    }
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        DocError::Syntax(format!("invalid document: {e}"))
    }
}

pub type DocResult<T> = std::result::Result<T, DocError>;

/// Compact JSON; infallible for the document types of this module.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string(doc).expect("documents serialize")
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> DocResult<T> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub hpow: usize,
    pub exponents: Vec<i32>,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub truncation: usize,
    pub vars: Vec<Var>,
    pub terms: Vec<TermDoc>,
}

fn vars_doc(v: &VarSet) -> Vec<Var> {
    v.iter().cloned().collect()
}

fn parse_rational(num: &str, den: &str) -> DocResult<Rational> {
    let bad = || DocError::Syntax(format!("invalid rational `{num}/{den}`"));
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if !d.is_positive() {
        return Err(DocError::Domain(Error::InvalidInput(format!(
            "denominator must be positive, got {den}"
        ))));
    }
    Ok(Rational::new(n, d))
}

pub fn series_to_doc(f: &HSeries) -> SeriesDoc {
    SeriesDoc {
        truncation: f.order(),
        vars: vars_doc(f.vars()),
        terms: f
            .terms()
            .map(|(k, e, c)| TermDoc {
                hpow: k,
                exponents: e.clone(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect(),
    }
}

pub fn series_from_doc(doc: &SeriesDoc) -> DocResult<HSeries> {
    let vars = VarSet::new(doc.vars.clone())?;
    let mut terms = Vec::with_capacity(doc.terms.len());
    for t in &doc.terms {
        if t.exponents.len() != vars.len() {
            return Err(Error::InvalidInput(format!(
                "term has {} exponents for {} variables",
                t.exponents.len(),
                vars.len()
            ))
            .into());
        }
        if t.hpow > doc.truncation {
            return Err(Error::InvalidInput(format!(
                "term with h^{} beyond truncation {}",
                t.hpow, doc.truncation
            ))
            .into());
        }
        terms.push((t.hpow, t.exponents.clone(), parse_rational(&t.num, &t.den)?));
    }
    Ok(HSeries::from_terms(&vars, doc.truncation, terms)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpTermDoc {
    pub coeff: SeriesDoc,
    pub powers: BTreeMap<String, i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDoc {
    pub algebra: String,
    pub vars: Vec<Var>,
    pub truncation: usize,
    pub terms: Vec<OpTermDoc>,
}

pub fn operator_to_doc(p: &SkewOperator) -> OperatorDoc {
    let alg = p.algebra();
    OperatorDoc {
        algebra: alg.to_string(),
        vars: vars_doc(p.vars()),
        truncation: p.order(),
        terms: p
            .terms()
            .map(|(powers, c)| OpTermDoc {
                coeff: series_to_doc(c),
                powers: powers
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(i, &k)| (alg.generator_name(i), k))
                    .collect(),
            })
            .collect(),
    }
}

/// The algebra named by `tag`, checked against the declared variables.
pub fn algebra_for(tag: &str, vars: &[Var]) -> DocResult<OpAlgebra> {
    let vs = VarSet::new(vars.to_vec())?;
    let alg = OpAlgebra::parse_with_vars(tag, Some(&vs))?;
    if *alg.vars() != vs {
        return Err(Error::VarMismatch {
            left: alg.vars().names(),
            right: vs.names(),
        }
        .into());
    }
    Ok(alg)
}

pub fn operator_from_doc(doc: &OperatorDoc) -> DocResult<SkewOperator> {
    let alg = algebra_for(&doc.algebra, &doc.vars)?;
    let mut terms = Vec::with_capacity(doc.terms.len());
    for t in &doc.terms {
        let mut powers = vec![0; alg.vars().len()];
        for (name, &k) in &t.powers {
            let i = alg
                .generator_index(name)
                .ok_or_else(|| DocError::Syntax(format!("unknown generator `{name}` for {alg}")))?;
            powers[i] = k;
        }
        let c = series_from_doc(&t.coeff)?;
        if c.order() != doc.truncation {
            return Err(Error::OrderMismatch(c.order(), doc.truncation).into());
        }
        terms.push((powers, c));
    }
    Ok(SkewOperator::from_terms(&alg, doc.truncation, terms)?)
}

/// Curves are series documents with truncation 0.
pub fn curve_to_doc(c: &PlaneCurve) -> SeriesDoc {
    series_to_doc(&HSeries::from_laurent(c.poly().clone(), 0))
}

pub fn curve_from_doc(doc: &SeriesDoc) -> DocResult<PlaneCurve> {
    if doc.terms.iter().any(|t| t.hpow != 0) {
        return Err(Error::InvalidInput("curve terms must have hpow 0".into()).into());
    }
    let s = series_from_doc(&SeriesDoc {
        truncation: 0,
        ..doc.clone()
    })?;
    Ok(PlaneCurve::new(s.sigma0())?)
}

/// Row-major matrix of polynomial expressions in the variable `var`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiggsChartDoc {
    pub rank: usize,
    pub var: String,
    pub entries: Vec<Vec<String>>,
}

fn poly_text(p: &LaurentPoly) -> String {
    expr::format_series(&HSeries::from_laurent(p.clone(), 0))
}

pub fn chart_to_doc(c: &HiggsChart) -> HiggsChartDoc {
    HiggsChartDoc {
        rank: c.rank(),
        var: c.var().get(0).name.clone(),
        entries: c
            .entries()
            .iter()
            .map(|row| row.iter().map(poly_text).collect())
            .collect(),
    }
}

pub fn chart_from_doc(doc: &HiggsChartDoc) -> DocResult<HiggsChart> {
    let vars = VarSet::new(vec![Var::new(doc.var.clone(), false)])?;
    if doc.entries.len() != doc.rank {
        return Err(Error::InvalidInput(format!(
            "rank {} but {} rows",
            doc.rank,
            doc.entries.len()
        ))
        .into());
    }
    let entries = doc
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| expr::parse_polynomial(e, &vars).map_err(DocError::from))
                .collect()
        })
        .collect::<DocResult<Vec<Vec<_>>>>()?;
    Ok(HiggsChart::new(entries)?)
}

/// Operator given either as a document or as a word in the algebra of the
/// enclosing file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Word(String),
    Doc(OperatorDoc),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizationDataDoc {
    pub name: String,
    pub algebra: String,
    pub vars: Vec<Var>,
    pub truncation: usize,
    pub degree_bound: i32,
    pub a: Vec<OperatorSpec>,
    pub b: Vec<OperatorSpec>,
}

pub fn data_to_doc(d: &QuantizationData) -> QuantizationDataDoc {
    let ops = |v: &[SkewOperator]| {
        v.iter()
            .map(|p| OperatorSpec::Doc(operator_to_doc(p)))
            .collect()
    };
    QuantizationDataDoc {
        name: d.name.clone(),
        algebra: d.algebra.to_string(),
        vars: vars_doc(d.algebra.vars()),
        truncation: d.order,
        degree_bound: d.degree_bound,
        a: ops(&d.a),
        b: ops(&d.b),
    }
}

pub fn data_from_doc(doc: &QuantizationDataDoc) -> DocResult<QuantizationData> {
    let alg = algebra_for(&doc.algebra, &doc.vars)?;
    let op = |s: &OperatorSpec| -> DocResult<SkewOperator> {
        let p = match s {
            OperatorSpec::Word(w) => expr::parse_operator(w, &alg, doc.truncation)?,
            OperatorSpec::Doc(d) => operator_from_doc(d)?,
        };
        if *p.algebra() != alg || p.order() != doc.truncation {
            return Err(Error::Incompatible(format!(
                "operator in {} at order {} inside data for {alg} at order {}",
                p.algebra(),
                p.order(),
                doc.truncation
            ))
            .into());
        }
        Ok(p)
    };
    let a = doc.a.iter().map(op).collect::<DocResult<Vec<_>>>()?;
    let b = doc.b.iter().map(op).collect::<DocResult<Vec<_>>>()?;
    Ok(QuantizationData::new(
        doc.name.clone(),
        a,
        b,
        doc.degree_bound,
    )?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountDoc {
    pub check: String,
    pub samples: usize,
}

fn counts(c: &[(String, usize)]) -> Vec<CountDoc> {
    c.iter()
        .map(|(check, samples)| CountDoc {
            check: check.clone(),
            samples: *samples,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessDoc {
    pub check: String,
    pub inputs: Vec<SeriesDoc>,
    pub lhs: SeriesDoc,
    pub rhs: SeriesDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReportDoc {
    pub algebra: String,
    pub passed: bool,
    pub checked: Vec<CountDoc>,
    pub failures: Vec<WitnessDoc>,
}

fn witness_doc(w: &Witness) -> WitnessDoc {
    WitnessDoc {
        check: w.check.clone(),
        inputs: w.inputs.iter().map(series_to_doc).collect(),
        lhs: series_to_doc(&w.lhs),
        rhs: series_to_doc(&w.rhs),
    }
}

pub fn axiom_report_doc(r: &AxiomReport) -> AxiomReportDoc {
    AxiomReportDoc {
        algebra: r.algebra.clone(),
        passed: r.passed(),
        checked: counts(&r.checked),
        failures: r.failures.iter().map(witness_doc).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismWitnessDoc {
    pub check: String,
    pub p: OperatorDoc,
    pub q: OperatorDoc,
    pub lhs: SeriesDoc,
    pub rhs: SeriesDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismReportDoc {
    pub map: String,
    pub passed: bool,
    pub checked: Vec<CountDoc>,
    pub failures: Vec<MorphismWitnessDoc>,
}

fn morphism_witness_doc(w: &MorphismWitness) -> MorphismWitnessDoc {
    MorphismWitnessDoc {
        check: w.check.clone(),
        p: operator_to_doc(&w.p),
        q: operator_to_doc(&w.q),
        lhs: series_to_doc(&w.lhs),
        rhs: series_to_doc(&w.rhs),
    }
}

pub fn morphism_report_doc(r: &MorphismReport) -> MorphismReportDoc {
    MorphismReportDoc {
        map: r.map.clone(),
        passed: r.passed(),
        checked: counts(&r.checked),
        failures: r.failures.iter().map(morphism_witness_doc).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckDoc {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MismatchDoc {
    pub pair: [SeriesDoc; 2],
    pub expected: SeriesDoc,
    pub got: SeriesDoc,
}

/// Outcome of checking quantization data and cross-checking the
/// synthesized product against a closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynthesisReportDoc {
    pub data: String,
    pub closed_form: String,
    pub passed: bool,
    pub conditions: Vec<CheckDoc>,
    pub pairs_checked: usize,
    pub mismatches: Vec<MismatchDoc>,
}

pub fn synthesis_report_doc(
    data: &str,
    closed_form: &str,
    conditions: &ConditionReport,
    cross: &CrosscheckReport,
) -> SynthesisReportDoc {
    SynthesisReportDoc {
        data: data.to_string(),
        closed_form: closed_form.to_string(),
        passed: conditions.passed() && cross.passed(),
        conditions: conditions
            .checks
            .iter()
            .map(|c| CheckDoc {
                name: c.name.clone(),
                passed: c.passed,
                detail: c.detail.clone(),
            })
            .collect(),
        pairs_checked: cross.pairs_checked,
        mismatches: cross
            .mismatches
            .iter()
            .map(|m| MismatchDoc {
                pair: [series_to_doc(&m.pair.0), series_to_doc(&m.pair.1)],
                expected: series_to_doc(&m.expected),
                got: series_to_doc(&m.got),
            })
            .collect(),
    }
}
