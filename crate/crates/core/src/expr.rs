//! Text syntax for series and operator words.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' ['-'] int)?
//! atom   := int ['/' int] | symbol | '(' expr ')'
//! ```
//!
//! `h` is ħ. In a series context `*` is the star product; in an operator
//! context it is composition, and the generator names of the algebra
//! (`D`, `S`, `T`, `D1`, `S_x1`, ...) are available together with
//! `<name>inv` for invertible generators.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::operator::{OpAlgebra, OpTag, SkewOperator};
use crate::series::{HSeries, LaurentPoly, Rational, VarSet};
use crate::star::StarAlgebra;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprError {
    /// Lexical or grammatical problem, or a symbol the context forbids.
    Parse { offset: usize, msg: String },
    /// The expression is well formed but its value violates a precondition.
    Domain(Error),
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Parse { offset, msg } => write!(f, "parse error at byte {offset}: {msg}"),
            ExprError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ExprError {}

impl From<Error> for ExprError {
    fn from(e: Error) -> Self {
        ExprError::Domain(e)
    }
}

fn perr<T>(offset: usize, msg: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError::Parse {
        offset,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].parse().expect("digits")), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().expect("in bounds");
                return perr(start, format!("unexpected character `{ch}`"));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Where an expression is evaluated.
#[derive(Clone, Copy, Debug)]
pub enum Context<'a> {
    Series(&'a StarAlgebra),
    Operator(&'a OpAlgebra),
    /// Commutative Laurent polynomials; `h` is not available.
    Polynomial(&'a VarSet),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Hbar,
    Var(usize),
    /// Generator on variable `idx`, raised to `±1`.
    Gen(usize, i32),
}

impl Context<'_> {
    fn vars(&self) -> &VarSet {
        match self {
            Context::Series(a) => a.vars(),
            Context::Operator(a) => a.vars(),
            Context::Polynomial(v) => v,
        }
    }

    fn resolve(&self, name: &str) -> Option<Symbol> {
        if name == "h" && !matches!(self, Context::Polynomial(_)) {
            return Some(Symbol::Hbar);
        }
        if let Some(i) = self.vars().index_of(name) {
            return Some(Symbol::Var(i));
        }
        let Context::Operator(alg) = self else {
            return None;
        };
        if let Some(i) = alg.generator_index(name) {
            return Some(Symbol::Gen(i, 1));
        }
        let base = name.strip_suffix("inv")?;
        let i = alg.generator_index(base)?;
        alg.alphabet()[i].invertible().then_some(Symbol::Gen(i, -1))
    }

    fn invertible(&self, s: Symbol) -> bool {
        match (s, self) {
            (Symbol::Hbar, _) => false,
            (Symbol::Var(i), _) => self.vars().get(i).invertible,
            (Symbol::Gen(i, _), Context::Operator(a)) => a.alphabet()[i].invertible(),
            (Symbol::Gen(..), _) => false,
        }
    }
}

/// Parsed expression; symbols are already resolved against the context.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Sym(Symbol),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

struct Parser<'a, 'c> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: &'c Context<'a>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp_at = self.offset();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let Tok::Int(n) = self.bump() else {
            return perr(exp_at, "exponent must be an integer literal");
        };
        if *self.peek() == Tok::Slash {
            return perr(exp_at, "exponent must be an integer literal");
        }
        let Ok(mut e) = i32::try_from(&n) else {
            return perr(exp_at, "exponent out of range");
        };
        if neg {
            e = -e;
        }
        if e < 0 {
            match &base {
                Expr::Num(q) if !q.is_zero() => {}
                Expr::Sym(s) if self.ctx.invertible(*s) => {}
                Expr::Sym(_) => return perr(at, "negative power of a non-invertible symbol"),
                _ => return perr(at, "negative powers apply only to invertible symbols"),
            }
        }
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                if *self.peek() != Tok::Slash {
                    return Ok(Expr::Num(Rational::from_integer(n)));
                }
                self.bump();
                let d_at = self.offset();
                match self.bump() {
                    Tok::Int(d) if !d.is_zero() => Ok(Expr::Num(Rational::new(n, d))),
                    Tok::Int(_) => perr(d_at, "zero denominator"),
                    _ => perr(d_at, "expected an integer denominator"),
                }
            }
            Tok::Ident(name) => match self.ctx.resolve(&name) {
                Some(s) => Ok(Expr::Sym(s)),
                None => perr(at, format!("unknown symbol `{name}`")),
            },
            Tok::LParen => {
                let e = self.expr()?;
                let close = self.offset();
                if self.bump() != Tok::RParen {
                    return perr(close, "expected `)`");
                }
                Ok(e)
            }
            Tok::End => perr(at, "unexpected end of input"),
            t => perr(at, format!("unexpected {}", describe(&t))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::Int(_) => "number",
        Tok::Ident(_) => "symbol",
        Tok::End => "end of input",
    }
}

pub fn parse_expr(text: &str, ctx: &Context<'_>) -> Result<Expr, ExprError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        ctx,
    };
    if *p.peek() == Tok::End {
        return perr(0, "empty expression");
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let at = p.offset();
        return perr(at, format!("unexpected {}", describe(p.peek())));
    }
    Ok(e)
}

fn monomial(vars: &VarSet, s: Symbol, e: i32, order: usize) -> Result<HSeries, Error> {
    let one = Rational::one();
    match s {
        Symbol::Hbar => HSeries::monomial(vars, e as usize, vec![0; vars.len()], one, order),
        Symbol::Var(i) => {
            let mut exps = vec![0; vars.len()];
            exps[i] = e;
            HSeries::monomial(vars, 0, exps, one, order)
        }
        Symbol::Gen(..) => unreachable!("generators are operators"),
    }
}

fn rat_pow(q: &Rational, e: i32) -> Rational {
    let p = num_traits::pow(q.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Parses and evaluates a series under the star product of `alg`.
pub fn parse_series(text: &str, alg: &StarAlgebra, order: usize) -> Result<HSeries, ExprError> {
    let e = parse_expr(text, &Context::Series(alg))?;
    Ok(eval_series(&e, alg, order)?)
}

pub fn eval_series(e: &Expr, alg: &StarAlgebra, order: usize) -> Result<HSeries, Error> {
    eval_with(e, alg.vars(), order, &|f, g| alg.star_mul(f, g))
}

/// Parses a commutative Laurent polynomial in `vars`.
pub fn parse_polynomial(text: &str, vars: &VarSet) -> Result<LaurentPoly, ExprError> {
    let e = parse_expr(text, &Context::Polynomial(vars))?;
    Ok(eval_with(&e, vars, 0, &|f, g| f.checked_mul(g))?.sigma0())
}

type Product<'a> = dyn Fn(&HSeries, &HSeries) -> Result<HSeries, Error> + 'a;

fn eval_with(e: &Expr, vars: &VarSet, order: usize, mul: &Product<'_>) -> Result<HSeries, Error> {
    let rec = |x: &Expr| eval_with(x, vars, order, mul);
    Ok(match e {
        Expr::Num(q) => HSeries::constant(vars, q.clone(), order),
        Expr::Sym(s) => monomial(vars, *s, 1, order)?,
        Expr::Neg(a) => -&rec(a)?,
        Expr::Add(a, b) => &rec(a)? + &rec(b)?,
        Expr::Sub(a, b) => &rec(a)? - &rec(b)?,
        Expr::Mul(a, b) => mul(&rec(a)?, &rec(b)?)?,
        Expr::Pow(a, k) => match &**a {
            Expr::Num(q) => HSeries::constant(vars, rat_pow(q, *k), order),
            Expr::Sym(s) => monomial(vars, *s, *k, order)?,
            _ => {
                let base = rec(a)?;
                let mut acc = HSeries::one(vars, order);
                for _ in 0..*k {
                    acc = mul(&acc, &base)?;
                }
                acc
            }
        },
    })
}

/// Algebra in which words are composed before being checked against the
/// target: Rees and plus tags constrain results, not intermediate factors.
fn working_algebra(alg: &OpAlgebra) -> Result<OpAlgebra, Error> {
    match alg.tag() {
        OpTag::Rees(n) => OpAlgebra::weyl(*n),
        OpTag::ScalingPlus => Ok(OpAlgebra::scaling()),
        OpTag::TranslationPlus => Ok(OpAlgebra::translation()),
        _ => Ok(alg.clone()),
    }
}

/// Parses an operator word and returns its normal form in `alg`.
pub fn parse_operator(
    text: &str,
    alg: &OpAlgebra,
    order: usize,
) -> Result<SkewOperator, ExprError> {
    let e = parse_expr(text, &Context::Operator(alg))?;
    let work = working_algebra(alg)?;
    Ok(eval_operator(&e, &work, order)?.retag(alg)?)
}

pub fn eval_operator(e: &Expr, alg: &OpAlgebra, order: usize) -> Result<SkewOperator, Error> {
    let vars = alg.vars();
    let coeff = |c: HSeries| SkewOperator::from_coeff(alg, c);
    match e {
        Expr::Num(q) => coeff(HSeries::constant(vars, q.clone(), order)),
        Expr::Sym(Symbol::Gen(i, s)) => SkewOperator::generator(alg, *i, *s, order),
        Expr::Sym(s) => coeff(monomial(vars, *s, 1, order)?),
        Expr::Neg(a) => Ok(eval_operator(a, alg, order)?.neg()),
        Expr::Add(a, b) => {
            eval_operator(a, alg, order)?.checked_add(&eval_operator(b, alg, order)?)
        }
        Expr::Sub(a, b) => {
            eval_operator(a, alg, order)?.checked_sub(&eval_operator(b, alg, order)?)
        }
        Expr::Mul(a, b) => eval_operator(a, alg, order)?.compose(&eval_operator(b, alg, order)?),
        Expr::Pow(a, k) => match &**a {
            Expr::Num(q) => coeff(HSeries::constant(vars, rat_pow(q, *k), order)),
            Expr::Sym(Symbol::Gen(i, s)) => SkewOperator::generator(alg, *i, s * k, order),
            Expr::Sym(s) => coeff(monomial(vars, *s, *k, order)?),
            _ => eval_operator(a, alg, order)?.pow(*k),
        },
    }
}

/// `c*h^k*x^e...` without its sign; factors equal to 1 are dropped.
fn monomial_text(
    vars: &VarSet,
    var_order: &[usize],
    k: usize,
    exps: &[i32],
    c: &Rational,
) -> String {
    let mut parts = Vec::new();
    let c = c.abs();
    let bare = k == 0 && exps.iter().all(|&e| e == 0);
    if !c.is_one() || bare {
        parts.push(c.to_string());
    }
    match k {
        0 => {}
        1 => parts.push("h".into()),
        _ => parts.push(format!("h^{k}")),
    }
    for &i in var_order {
        match exps[i] {
            0 => {}
            1 => parts.push(vars.get(i).name.clone()),
            e => parts.push(format!("{}^{e}", vars.get(i).name)),
        }
    }
    parts.join("*")
}

/// Sum of signed pieces, `a - b + c`, or `0` when empty.
fn join_signed(pieces: Vec<(bool, String)>) -> String {
    if pieces.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (j, (neg, s)) in pieces.into_iter().enumerate() {
        match (j, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&s);
    }
    out
}

/// Series text with variables written in `var_order`, terms in canonical
/// order (ħ-power, then exponents).
pub fn format_series_ordered(f: &HSeries, var_order: &[usize]) -> String {
    let pieces = f
        .terms()
        .map(|(k, e, c)| (c.is_negative(), monomial_text(f.vars(), var_order, k, e, c)))
        .collect();
    join_signed(pieces)
}

pub fn format_series(f: &HSeries) -> String {
    let order: Vec<usize> = (0..f.vars().len()).collect();
    format_series_ordered(f, &order)
}

/// Series text whose re-parse under `alg` gives back the same value.
pub fn format_star_series(f: &HSeries, alg: &StarAlgebra) -> String {
    format_series_ordered(f, &alg.normal_order())
}

pub fn format_operator(p: &SkewOperator) -> String {
    let alg = p.algebra();
    let mut pieces = Vec::new();
    for (powers, c) in p.terms() {
        let gens: Vec<String> = powers
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, &k)| match k {
                1 => alg.generator_name(i),
                _ => format!("{}^{k}", alg.generator_name(i)),
            })
            .collect();
        if gens.is_empty() {
            pieces.push((false, format_series(c)));
            continue;
        }
        let gens = gens.join("*");
        let piece = if c.term_count() == 1 {
            let (k, e, q) = c.terms().next().expect("one term");
            let m = if q.abs().is_one() && k == 0 && e.iter().all(|&x| x == 0) {
                gens
            } else {
                format!(
                    "{}*{gens}",
                    monomial_text(c.vars(), &(0..e.len()).collect::<Vec<_>>(), k, e, q)
                )
            };
            (q.is_negative(), m)
        } else {
            (false, format!("({})*{gens}", format_series(c)))
        };
        pieces.push(piece);
    }
    join_signed(pieces)
}
