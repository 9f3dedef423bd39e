//! Skew operators in normal form: coefficients on the left, commuting
//! per-variable generators on the right.
//!
//! Each variable carries one generator:
//! * `∂` (derivation), with `∂^a ∘ q = Σ_j C(a,j) ∂^j(q) ∂^(a-j)`;
//! * `Δ = e^{ħ x ∂}` (dilation), with `Δ^a ∘ q = Δ^a(q) Δ^a`;
//! * `τ = e^{ħ ∂}` (translation), with `τ^a ∘ q = τ^a(q) τ^a`.
//!
//! Dilation and translation powers may be negative (they are invertible);
//! derivation powers are never negative.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::series::{HSeries, LaurentPoly, Rational, Var, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Deriv,
    Dilation,
    Translation,
}

impl Generator {
    pub fn invertible(self) -> bool {
        !matches!(self, Generator::Deriv)
    }

    fn letter(self) -> &'static str {
        match self {
            Generator::Deriv => "D",
            Generator::Dilation => "S",
            Generator::Translation => "T",
        }
    }

    fn from_letter(s: &str) -> Option<Self> {
        match s {
            "D" => Some(Generator::Deriv),
            "S" => Some(Generator::Dilation),
            "T" => Some(Generator::Translation),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpTag {
    /// `ħ`-differential operators in `n` polynomial variables.
    Weyl(usize),
    /// Rees elements: the coefficient of `∂^k` has ħ-valuation `>= |k|`.
    Rees(usize),
    /// Scaling operators `Σ f_k S^k` on `C*`.
    Scaling,
    /// Scaling operators with `k >= 0` only.
    ScalingPlus,
    /// Translation operators `Σ f_k T^k` on `C`.
    Translation,
    /// Translation operators with `k >= 0` only.
    TranslationPlus,
    /// Arbitrary per-variable alphabet.
    General,
}

/// An operator algebra: tag, variables and per-variable generator.
#[derive(Clone, PartialEq, Eq)]
pub struct OpAlgebra {
    tag: OpTag,
    vars: VarSet,
    alphabet: Arc<[Generator]>,
}

impl fmt::Debug for OpAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OpAlgebra({})", self)
    }
}

fn indexed_names(prefix: &str, n: usize) -> Vec<String> {
    if n == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

impl OpAlgebra {
    pub fn weyl(n: usize) -> Result<Self> {
        Self::differential(OpTag::Weyl(n), n)
    }

    pub fn rees(n: usize) -> Result<Self> {
        Self::differential(OpTag::Rees(n), n)
    }

    fn differential(tag: OpTag, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "differential algebra needs a variable".into(),
            ));
        }
        let vars = VarSet::new(
            indexed_names("x", n)
                .into_iter()
                .map(|v| Var::new(v, false))
                .collect(),
        )?;
        Ok(OpAlgebra {
            tag,
            vars,
            alphabet: vec![Generator::Deriv; n].into(),
        })
    }

    pub fn scaling() -> Self {
        Self::single(OpTag::Scaling, true, Generator::Dilation)
    }

    pub fn scaling_plus() -> Self {
        Self::single(OpTag::ScalingPlus, true, Generator::Dilation)
    }

    pub fn translation() -> Self {
        Self::single(OpTag::Translation, false, Generator::Translation)
    }

    pub fn translation_plus() -> Self {
        Self::single(OpTag::TranslationPlus, false, Generator::Translation)
    }

    fn single(tag: OpTag, invertible: bool, g: Generator) -> Self {
        OpAlgebra {
            tag,
            vars: VarSet::of(&[("x", invertible)]),
            alphabet: vec![g].into(),
        }
    }

    /// An algebra with an explicit generator per variable.
    pub fn general(vars: &VarSet, alphabet: &[Generator]) -> Result<Self> {
        if alphabet.len() != vars.len() {
            return Err(Error::InvalidInput(format!(
                "alphabet has {} generators for {} variables",
                alphabet.len(),
                vars.len()
            )));
        }
        for (v, g) in vars.iter().zip(alphabet) {
            if *g == Generator::Translation && v.invertible {
                return Err(Error::TranslationOnInvertible(v.name.clone()));
            }
        }
        Ok(OpAlgebra {
            tag: OpTag::General,
            vars: vars.clone(),
            alphabet: alphabet.into(),
        })
    }

    pub fn tag(&self) -> &OpTag {
        &self.tag
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn alphabet(&self) -> &[Generator] {
        &self.alphabet
    }

    fn plus_only(&self) -> bool {
        matches!(self.tag, OpTag::ScalingPlus | OpTag::TranslationPlus)
    }

    /// Name of the generator acting on variable `i`: `D`, `D1…`, `S`, `T`
    /// for the named tags, `D_x`, `S_x1`, … for general alphabets.
    pub fn generator_name(&self, i: usize) -> String {
        let g = self.alphabet[i];
        match self.tag {
            OpTag::General => format!("{}_{}", g.letter(), self.vars.get(i).name),
            _ if self.vars.len() == 1 => g.letter().to_string(),
            _ => format!("{}{}", g.letter(), i + 1),
        }
    }

    /// Inverse of [`generator_name`](Self::generator_name).
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        (0..self.vars.len()).find(|&i| self.generator_name(i) == name)
    }

    fn check_powers(&self, powers: &[i32]) -> Result<()> {
        if powers.len() != self.vars.len() {
            return Err(Error::InvalidInput(
                "generator power vector has wrong length".into(),
            ));
        }
        for (i, &k) in powers.iter().enumerate() {
            if k < 0 {
                if !self.alphabet[i].invertible() {
                    return Err(Error::NotInvertible(format!(
                        "negative power of {}",
                        self.generator_name(i)
                    )));
                }
                if self.plus_only() {
                    return Err(Error::PlusClosure(self.to_string()));
                }
            }
        }
        Ok(())
    }

    fn ensure_same(&self, other: &OpAlgebra) -> Result<()> {
        if self != other {
            return Err(Error::TagMismatch(self.to_string(), other.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for OpAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tag {
            OpTag::Weyl(n) => write!(f, "weyl:{n}"),
            OpTag::Rees(n) => write!(f, "rees:{n}"),
            OpTag::Scaling => f.write_str("scaling"),
            OpTag::ScalingPlus => f.write_str("scaling+"),
            OpTag::Translation => f.write_str("translation"),
            OpTag::TranslationPlus => f.write_str("translation+"),
            OpTag::General => {
                f.write_str("general:")?;
                let letters: Vec<&str> = self.alphabet.iter().map(|g| g.letter()).collect();
                f.write_str(&letters.join(","))
            }
        }
    }
}

impl OpAlgebra {
    /// Parses a tag together with the variable list it applies to. Only
    /// `general:` tags consult `vars`; the named tags fix their own layout.
    pub fn parse_with_vars(s: &str, vars: Option<&VarSet>) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("general:") {
            let vars = vars.ok_or_else(|| {
                Error::InvalidInput("general operator algebra needs a variable list".into())
            })?;
            let alphabet = rest
                .split(',')
                .map(|l| {
                    Generator::from_letter(l.trim())
                        .ok_or_else(|| Error::InvalidInput(format!("unknown generator `{l}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::general(vars, &alphabet);
        }
        s.parse()
    }
}

impl FromStr for OpAlgebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let count = |rest: &str| {
            rest.parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad operator tag `{s}`")))
        };
        match s {
            "weyl" => Self::weyl(1),
            "rees" => Self::rees(1),
            "scaling" => Ok(Self::scaling()),
            "scaling+" => Ok(Self::scaling_plus()),
            "translation" => Ok(Self::translation()),
            "translation+" => Ok(Self::translation_plus()),
            _ => {
                if let Some(r) = s.strip_prefix("weyl:") {
                    Self::weyl(count(r)?)
                } else if let Some(r) = s.strip_prefix("rees:") {
                    Self::rees(count(r)?)
                } else {
                    Err(Error::InvalidInput(format!(
                        "unknown operator tag `{s}` (expected weyl:<n>|rees:<n>|scaling|scaling+|translation|translation+)"
                    )))
                }
            }
        }
    }
}

/// Normal-form operator `Σ_k c_k g^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewOperator {
    alg: OpAlgebra,
    order: usize,
    terms: BTreeMap<Vec<i32>, HSeries>,
}

fn binomial_row(a: i32) -> Vec<Rational> {
    let mut row = vec![Rational::one()];
    for j in 0..a {
        let next = row[j as usize].clone() * Rational::from_integer((a - j).into())
            / Rational::from_integer((j + 1).into());
        row.push(next);
    }
    row
}

impl SkewOperator {
    pub fn zero(alg: &OpAlgebra, order: usize) -> Self {
        SkewOperator {
            alg: alg.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(alg: &OpAlgebra, order: usize) -> Self {
        Self::from_coeff(alg, HSeries::one(alg.vars(), order)).expect("unit coefficient")
    }

    /// Multiplication operator by `c`.
    pub fn from_coeff(alg: &OpAlgebra, c: HSeries) -> Result<Self> {
        let order = c.order();
        let zero = vec![0; alg.vars.len()];
        Self::from_terms(alg, order, [(zero, c)])
    }

    /// `g_i^power` where `g_i` is the generator on variable `var`.
    pub fn generator(alg: &OpAlgebra, var: usize, power: i32, order: usize) -> Result<Self> {
        let mut p = vec![0; alg.vars.len()];
        *p.get_mut(var)
            .ok_or_else(|| Error::InvalidInput(format!("no generator at index {var}")))? = power;
        Self::from_terms(alg, order, [(p, HSeries::one(alg.vars(), order))])
    }

    /// Sums the given `(powers, coefficient)` pairs; coefficients are
    /// truncated (or zero-padded, for exactly known data) to `order`.
    pub fn from_terms<I>(alg: &OpAlgebra, order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, HSeries)>,
    {
        let mut op = Self::zero(alg, order);
        for (p, c) in terms {
            alg.check_powers(&p)?;
            alg.vars.ensure_same(c.vars())?;
            op.add_term(p, c.with_order(order));
        }
        op.check_invariants()?;
        Ok(op)
    }

    fn add_term(&mut self, p: Vec<i32>, c: HSeries) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_invariants(&self) -> Result<()> {
        if matches!(self.alg.tag, OpTag::Rees(_)) {
            if let Some(e) = self.rees_violation() {
                return Err(e);
            }
        }
        Ok(())
    }

    fn rees_violation(&self) -> Option<Error> {
        for (p, c) in &self.terms {
            let need: usize = p.iter().map(|k| k.unsigned_abs() as usize).sum();
            let val = c.valuation().unwrap_or(usize::MAX);
            if val < need {
                return Some(Error::NotRees {
                    generators: self.power_label(p),
                    valuation: val,
                    required: need,
                });
            }
        }
        None
    }

    fn power_label(&self, p: &[i32]) -> String {
        let parts: Vec<String> = p
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, k)| format!("{}^{}", self.alg.generator_name(i), k))
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn algebra(&self) -> &OpAlgebra {
        &self.alg
    }

    pub fn tag(&self) -> &OpTag {
        &self.alg.tag
    }

    pub fn vars(&self) -> &VarSet {
        &self.alg.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &HSeries)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, powers: &[i32]) -> HSeries {
        self.terms
            .get(powers)
            .cloned()
            .unwrap_or_else(|| HSeries::zero(self.vars(), self.order))
    }

    /// Same operator viewed in another algebra with the same variables and
    /// alphabet (e.g. a weyl element as a Rees element).
    pub fn retag(&self, alg: &OpAlgebra) -> Result<Self> {
        if alg.vars != self.alg.vars || alg.alphabet != self.alg.alphabet {
            return Err(Error::TagMismatch(self.alg.to_string(), alg.to_string()));
        }
        let op = SkewOperator {
            alg: alg.clone(),
            order: self.order,
            terms: self.terms.clone(),
        };
        for p in op.terms.keys() {
            alg.check_powers(p)?;
        }
        op.check_invariants()?;
        Ok(op)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.with_order(order.min(self.order))
    }

    /// Re-declares the truncation order (see [`HSeries::with_order`]).
    pub fn with_order(&self, order: usize) -> Self {
        let mut op = Self::zero(&self.alg, order);
        for (p, c) in &self.terms {
            op.add_term(p.clone(), c.with_order(order));
        }
        op
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.alg.ensure_same(&other.alg)?;
        let n = self.order.min(other.order);
        let mut op = self.truncate(n);
        for (p, c) in &other.terms {
            op.add_term(p.clone(), c.truncate(n));
        }
        Ok(op)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    fn map_coeffs(&self, f: impl Fn(&HSeries) -> HSeries) -> Self {
        let mut op = Self::zero(&self.alg, self.order);
        for (p, c) in &self.terms {
            op.add_term(p.clone(), f(c));
        }
        op
    }

    /// Left multiplication by a function: `c · P`.
    pub fn mul_coeff(&self, c: &HSeries) -> Result<Self> {
        self.alg.vars.ensure_same(c.vars())?;
        let n = self.order.min(c.order());
        let mut op = Self::zero(&self.alg, n);
        for (p, a) in &self.terms {
            op.add_term(p.clone(), c * a);
        }
        op.check_invariants()?;
        Ok(op)
    }

    /// Rewrites `g^powers ∘ q` as `Σ c_j g^{r_j}` by the commutation rules.
    fn pass_generators(&self, powers: &[i32], q: &HSeries) -> Result<Vec<(Vec<i32>, HSeries)>> {
        let mut acc = vec![(powers.to_vec(), q.clone())];
        for (i, g) in self.alg.alphabet.iter().enumerate() {
            let a = powers[i];
            if a == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(acc.len());
            for (p, c) in acc {
                match g {
                    Generator::Deriv => {
                        let binom = binomial_row(a);
                        let mut d = c;
                        for (j, b) in binom.iter().enumerate() {
                            if d.is_zero() {
                                break;
                            }
                            let mut np = p.clone();
                            np[i] = a - j as i32;
                            next.push((np, d.scale(b)));
                            d = d.derive_at(i);
                        }
                    }
                    Generator::Dilation => next.push((p, c.dilate_at(i, a.into()))),
                    Generator::Translation => next.push((p, c.translate_at(i, a.into())?)),
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// `self ∘ other` in normal form.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.alg.ensure_same(&other.alg)?;
        let n = self.order.min(other.order);
        let mut out = Self::zero(&self.alg, n);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                for (r, c) in self.pass_generators(pa, &cb.truncate(n))? {
                    let powers: Vec<i32> = r.iter().zip(pb).map(|(x, y)| x + y).collect();
                    out.add_term(powers, &ca.truncate(n) * &c);
                }
            }
        }
        for p in out.terms.keys() {
            self.alg.check_powers(p)?;
        }
        out.check_invariants()?;
        Ok(out)
    }

    /// `self ∘ other − other ∘ self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.checked_sub(&other.compose(self)?)
    }

    /// Signed power; negative powers need [`try_inverse`](Self::try_inverse).
    pub fn pow(&self, k: i32) -> Result<Self> {
        let base = if k < 0 {
            self.try_inverse()?
        } else {
            self.clone()
        };
        let mut acc = Self::identity(&self.alg, self.order);
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base)?;
        }
        Ok(acc)
    }

    /// Inverse of a single term `c g^k` with `c` a unit series and `g^k`
    /// invertible: `g^{-k} ∘ c^{-1}`.
    pub fn try_inverse(&self) -> Result<Self> {
        if self.terms.len() != 1 {
            return Err(Error::NotInvertible(format!(
                "operator with {} terms",
                self.terms.len()
            )));
        }
        let (p, c) = self.terms.iter().next().unwrap();
        let neg: Vec<i32> = p.iter().map(|k| -k).collect();
        self.alg.check_powers(&neg)?;
        let cinv = Self::from_coeff(&self.alg, c.try_inverse()?)?;
        let ginv = Self::from_terms(
            &self.alg,
            self.order,
            [(neg, HSeries::one(self.vars(), self.order))],
        )?;
        ginv.compose(&cinv)
    }

    /// Applies `g^powers` to `f`.
    fn act_generators(&self, powers: &[i32], f: &HSeries) -> Result<HSeries> {
        let mut out = f.clone();
        for (i, &a) in powers.iter().enumerate() {
            if a == 0 {
                continue;
            }
            out = match self.alg.alphabet[i] {
                Generator::Deriv => (0..a).fold(out, |s, _| s.derive_at(i)),
                Generator::Dilation => out.dilate_at(i, a.into()),
                Generator::Translation => out.translate_at(i, a.into())?,
            };
        }
        Ok(out)
    }

    /// Left action `P(f)`.
    pub fn apply(&self, f: &HSeries) -> Result<HSeries> {
        self.alg.vars.ensure_same(f.vars())?;
        let n = self.order.min(f.order());
        let f = f.truncate(n);
        let mut out = HSeries::zero(self.vars(), n);
        for (p, c) in &self.terms {
            let g = self.act_generators(p, &f)?;
            out = &out + &(&c.truncate(n) * &g);
        }
        Ok(out)
    }

    /// Rees membership: every coefficient of `∂^k` has ħ-valuation at
    /// least `|k|`. Defined on weyl and Rees tags only.
    pub fn is_rees_element(&self) -> Result<bool> {
        match self.alg.tag {
            OpTag::Weyl(_) | OpTag::Rees(_) => Ok(self.rees_violation().is_none()),
            _ => Err(Error::TagMismatch(
                self.alg.to_string(),
                "weyl or rees".into(),
            )),
        }
    }

    /// Largest `|power|` over all terms.
    pub fn max_abs_power(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|p| p.iter().map(|k| k.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// Exponent vectors of the evaluation box: `0..=bound` on every variable,
/// or `-bound..=bound` on invertible ones when `signed`.
pub fn basis_box(vars: &VarSet, bound: i32, signed: bool) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for v in vars.iter() {
        let lo = if signed && v.invertible { -bound } else { 0 };
        out = out
            .into_iter()
            .flat_map(|e: Vec<i32>| {
                (lo..=bound).map(move |k| {
                    let mut e = e.clone();
                    e.push(k);
                    e
                })
            })
            .collect();
    }
    out
}

fn monomial_series(vars: &VarSet, e: &[i32], order: usize) -> HSeries {
    HSeries::from_laurent(
        LaurentPoly::monomial(vars, e.to_vec(), Rational::one())
            .expect("basis exponents are admissible"),
        order,
    )
}

/// First basis monomial `x^α` (all `0 <= α_i <= p_max`) on which the two
/// operators act differently, if any.
pub fn first_separating_monomial(
    p: &SkewOperator,
    q: &SkewOperator,
    p_max: i32,
) -> Result<Option<Vec<i32>>> {
    p.alg.ensure_same(&q.alg)?;
    let n = p.order.min(q.order);
    for e in basis_box(p.vars(), p_max, false) {
        let m = monomial_series(p.vars(), &e, n);
        if p.apply(&m)? != q.apply(&m)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// `P(x^α) = Q(x^α)` for all `0 <= α_i <= p_max`.
pub fn op_equal_on_basis(p: &SkewOperator, q: &SkewOperator, p_max: i32) -> Result<bool> {
    Ok(first_separating_monomial(p, q, p_max)?.is_none())
}

/// One factor of an operator word.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Coeff(HSeries),
    Gen { var: usize, power: i32 },
}

/// A product of factors `w_1 w_2 … w_m`, read as a composition.
#[derive(Clone, Debug, PartialEq)]
pub struct Word {
    pub alg: OpAlgebra,
    pub order: usize,
    pub factors: Vec<Factor>,
}

impl Word {
    /// Composes the factors into the normal form.
    pub fn normal_form(&self) -> Result<SkewOperator> {
        let mut acc = SkewOperator::identity(&self.alg, self.order);
        for f in &self.factors {
            let op = match f {
                Factor::Coeff(c) => SkewOperator::from_coeff(&self.alg, c.with_order(self.order))?,
                Factor::Gen { var, power } => {
                    SkewOperator::generator(&self.alg, *var, *power, self.order)?
                }
            };
            acc = acc.compose(&op)?;
        }
        Ok(acc)
    }

    /// Acts on `f` factor by factor, rightmost first, without forming the
    /// normal form.
    pub fn apply(&self, f: &HSeries) -> Result<HSeries> {
        let vars = self.alg.vars();
        let mut out = f.truncate(self.order);
        for fac in self.factors.iter().rev() {
            out = match fac {
                Factor::Coeff(c) => &c.with_order(self.order) * &out,
                Factor::Gen { var, power } => {
                    let k = *power;
                    match self.alg.alphabet[*var] {
                        Generator::Deriv => {
                            if k < 0 {
                                return Err(Error::NotInvertible(
                                    "negative derivative power".into(),
                                ));
                            }
                            (0..k).fold(out, |s, _| s.derive_at(*var))
                        }
                        Generator::Dilation => out.dilate_at(*var, k.into()),
                        Generator::Translation => out.translate_at(*var, k.into())?,
                    }
                }
            };
            vars.ensure_same(out.vars())?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{exp_hbar, rat};

    fn xs(alg: &OpAlgebra, e: i32, n: usize) -> HSeries {
        HSeries::monomial(alg.vars(), 0, vec![e], rat(1, 1), n).unwrap()
    }

    fn coeff_op(alg: &OpAlgebra, c: HSeries) -> SkewOperator {
        SkewOperator::from_coeff(alg, c).unwrap()
    }

    #[test]
    fn scaling_moves_past_x() {
        let a = OpAlgebra::scaling();
        let n = 3;
        let s = SkewOperator::generator(&a, 0, 1, n).unwrap();
        let x = coeff_op(&a, xs(&a, 1, n));
        let got = s.compose(&x).unwrap();
        let expect = SkewOperator::from_terms(
            &a,
            n,
            [(vec![1], &xs(&a, 1, n) * &exp_hbar(&rat(1, 1), a.vars(), n))],
        )
        .unwrap();
        assert_eq!(got, expect);
        let sinv = SkewOperator::generator(&a, 0, -1, n).unwrap();
        assert_eq!(s.compose(&sinv).unwrap(), SkewOperator::identity(&a, n));
    }

    #[test]
    fn translation_moves_past_x() {
        let a = OpAlgebra::translation();
        let n = 3;
        let t = SkewOperator::generator(&a, 0, 1, n).unwrap();
        let x = xs(&a, 1, n);
        let got = t.compose(&coeff_op(&a, x.clone())).unwrap();
        let shifted = &x + &HSeries::hbar(a.vars(), n);
        assert_eq!(
            got,
            SkewOperator::from_terms(&a, n, [(vec![1], shifted)]).unwrap()
        );
    }

    #[test]
    fn leibniz_for_derivation() {
        let a = OpAlgebra::weyl(1).unwrap();
        let n = 2;
        let d = SkewOperator::generator(&a, 0, 1, n).unwrap();
        let x = xs(&a, 1, n);
        let got = d.compose(&coeff_op(&a, x.clone())).unwrap();
        let expect =
            SkewOperator::from_terms(&a, n, [(vec![1], x), (vec![0], HSeries::one(a.vars(), n))])
                .unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn apply_examples() {
        let a = OpAlgebra::scaling();
        let n = 4;
        let s2 = SkewOperator::generator(&a, 0, 2, n).unwrap();
        assert_eq!(
            s2.apply(&xs(&a, 1, n)).unwrap(),
            &xs(&a, 1, n) * &exp_hbar(&rat(2, 1), a.vars(), n)
        );
        assert!(s2.apply(&HSeries::zero(a.vars(), n)).unwrap().is_zero());

        let w = OpAlgebra::weyl(1).unwrap();
        let hd = SkewOperator::from_terms(&w, n, [(vec![1], HSeries::hbar(w.vars(), n))]).unwrap();
        let got = hd.pow(2).unwrap().apply(&xs(&w, 3, n)).unwrap();
        let expect = HSeries::monomial(w.vars(), 2, vec![1], rat(6, 1), n).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn conjugation_words() {
        let n = 4;
        let a = OpAlgebra::scaling();
        let w = Word {
            alg: a.clone(),
            order: n,
            factors: vec![
                Factor::Gen { var: 0, power: 1 },
                Factor::Coeff(xs(&a, 1, n)),
                Factor::Gen { var: 0, power: -1 },
            ],
        };
        let expect = coeff_op(&a, &xs(&a, 1, n) * &exp_hbar(&rat(1, 1), a.vars(), n));
        assert_eq!(w.normal_form().unwrap(), expect);

        let t = OpAlgebra::translation();
        let w = Word {
            alg: t.clone(),
            order: n,
            factors: vec![
                Factor::Gen { var: 0, power: 1 },
                Factor::Coeff(xs(&t, 1, n)),
                Factor::Gen { var: 0, power: -1 },
            ],
        };
        let expect = coeff_op(&t, &xs(&t, 1, n) + &HSeries::hbar(t.vars(), n));
        assert_eq!(w.normal_form().unwrap(), expect);
    }

    #[test]
    fn normal_input_is_fixed() {
        let a = OpAlgebra::scaling();
        let n = 3;
        let w = Word {
            alg: a.clone(),
            order: n,
            factors: vec![
                Factor::Coeff(xs(&a, 2, n)),
                Factor::Gen { var: 0, power: 3 },
            ],
        };
        let expect = SkewOperator::from_terms(&a, n, [(vec![3], xs(&a, 2, n))]).unwrap();
        assert_eq!(w.normal_form().unwrap(), expect);
    }

    #[test]
    fn basis_equality_examples() {
        let a = OpAlgebra::scaling();
        let n = 4;
        let s = SkewOperator::generator(&a, 0, 1, n).unwrap();
        let e = coeff_op(&a, exp_hbar(&rat(1, 1), a.vars(), n));
        assert!(!op_equal_on_basis(&s, &e, 2).unwrap());
        assert_eq!(first_separating_monomial(&s, &e, 2).unwrap(), Some(vec![0]));
        assert!(op_equal_on_basis(&s, &s, 12).unwrap());
    }

    #[test]
    fn rees_membership() {
        let w = OpAlgebra::weyl(1).unwrap();
        let n = 4;
        let h = |k| HSeries::monomial(w.vars(), k, vec![0], rat(1, 1), n).unwrap();
        let hd = SkewOperator::from_terms(&w, n, [(vec![1], h(1))]).unwrap();
        assert!(hd.is_rees_element().unwrap());
        let d = SkewOperator::generator(&w, 0, 1, n).unwrap();
        assert!(!d.is_rees_element().unwrap());
        let mixed = SkewOperator::from_terms(
            &w,
            n,
            [(vec![0], xs(&w, 1, n)), (vec![2], h(2)), (vec![1], h(3))],
        )
        .unwrap();
        assert!(mixed.is_rees_element().unwrap());
        let r = OpAlgebra::rees(1).unwrap();
        assert!(matches!(d.retag(&r), Err(Error::NotRees { .. })));
        assert!(SkewOperator::identity(&OpAlgebra::scaling(), 2)
            .is_rees_element()
            .is_err());
    }

    #[test]
    fn plus_variants_reject_negative_powers() {
        let a = OpAlgebra::scaling_plus();
        assert!(matches!(
            SkewOperator::generator(&a, 0, -1, 2),
            Err(Error::PlusClosure(_))
        ));
        let s = SkewOperator::generator(&a, 0, 2, 2).unwrap();
        assert!(s.try_inverse().is_err());
    }

    #[test]
    fn tag_mismatch() {
        let s = SkewOperator::identity(&OpAlgebra::scaling(), 2);
        let t = SkewOperator::identity(&OpAlgebra::translation(), 2);
        assert!(matches!(s.compose(&t), Err(Error::TagMismatch(_, _))));
    }

    #[test]
    fn tags_round_trip() {
        for t in [
            "weyl:1",
            "weyl:2",
            "rees:1",
            "scaling",
            "scaling+",
            "translation",
            "translation+",
        ] {
            assert_eq!(t.parse::<OpAlgebra>().unwrap().to_string(), t);
        }
        let vars = VarSet::of(&[("x1", true), ("x2", false)]);
        let g = OpAlgebra::parse_with_vars("general:D,T", Some(&vars)).unwrap();
        assert_eq!(g.to_string(), "general:D,T");
        assert_eq!(g.generator_name(1), "T_x2");
        assert!(OpAlgebra::parse_with_vars("general:T,T", Some(&vars)).is_err());
    }

    #[test]
    fn inverse_of_single_term() {
        let a = OpAlgebra::scaling();
        let n = 5;
        let c = &xs(&a, 2, n) + &HSeries::monomial(a.vars(), 1, vec![-1], rat(3, 1), n).unwrap();
        let p = SkewOperator::from_terms(&a, n, [(vec![-2], c)]).unwrap();
        let inv = p.try_inverse().unwrap();
        assert_eq!(p.compose(&inv).unwrap(), SkewOperator::identity(&a, n));
        assert_eq!(inv.compose(&p).unwrap(), SkewOperator::identity(&a, n));
    }
}
