//! Polarizations: actions of an ambient star algebra on series in the base
//! variable, and degree-bounded annihilator kernels.
//!
//! | kind        | ambient    | base op algebra | fixed coordinate | fiber action   |
//! |-------------|------------|-----------------|------------------|----------------|
//! | `weyl`      | `moyal:1`  | `weyl:1`        | `u = 0`          | `u ↦ ħ∂`       |
//! | `qtorus`    | `qtorus`   | `scaling`       | `x2 = 1`         | `x2 ↦ Δ`       |
//! | `hurwitz`   | `mixed`    | `general:D`     | `x2 = 0`         | `x2 ↦ ħx∂`     |
//! | `gw`        | `mixed_op` | `translation`   | `x1 = 1`         | `x1 ↦ τ`       |
//!
//! Ambient monomials are read base-left, fiber-right: `x^a u^b ↦ x^a (ħ∂)^b`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, rref};
use crate::maps::SymbolMap;
use crate::operator::{Generator, OpAlgebra, SkewOperator};
use crate::series::{rat, HSeries, LaurentPoly, Rational, VarSet};
use crate::star::StarAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    Weyl,
    QTorus,
    Hurwitz,
    Gw,
}

impl Polarization {
    pub const ALL: [Polarization; 4] = [
        Polarization::Weyl,
        Polarization::QTorus,
        Polarization::Hurwitz,
        Polarization::Gw,
    ];

    pub fn ambient(self) -> StarAlgebra {
        match self {
            Polarization::Weyl => StarAlgebra::moyal(1).expect("one degree of freedom"),
            Polarization::QTorus => StarAlgebra::qtorus(),
            Polarization::Hurwitz => StarAlgebra::mixed(),
            Polarization::Gw => StarAlgebra::mixed_opposite(),
        }
    }

    /// Operator algebra on the base in which the action is expressed.
    pub fn base_algebra(self) -> OpAlgebra {
        match self {
            Polarization::Weyl => OpAlgebra::weyl(1).expect("one variable"),
            Polarization::QTorus => OpAlgebra::scaling(),
            Polarization::Hurwitz => {
                OpAlgebra::general(&VarSet::of(&[("x", true)]), &[Generator::Deriv])
                    .expect("static")
            }
            Polarization::Gw => OpAlgebra::translation(),
        }
    }

    pub fn base_vars(self) -> VarSet {
        self.base_algebra().vars().clone()
    }

    /// Ambient indices of the base and fiber coordinates.
    pub fn coordinates(self) -> (usize, usize) {
        match self {
            Polarization::Weyl | Polarization::QTorus | Polarization::Hurwitz => (0, 1),
            Polarization::Gw => (1, 0),
        }
    }

    /// The coordinate fixed along the Lagrangian and its value.
    pub fn lagrangian(self) -> (&'static str, i64) {
        match self {
            Polarization::Weyl => ("u", 0),
            Polarization::QTorus => ("x2", 1),
            Polarization::Hurwitz => ("x2", 0),
            Polarization::Gw => ("x1", 1),
        }
    }

    /// Symbol map whose target is this polarization's ambient algebra.
    pub fn symbol_map(self) -> Option<SymbolMap> {
        match self {
            Polarization::Weyl => Some(SymbolMap::ReesToMoyal(1)),
            Polarization::QTorus => Some(SymbolMap::ScalingToQTorus),
            Polarization::Gw => Some(SymbolMap::TranslationToMixedOpposite),
            Polarization::Hurwitz => None,
        }
    }

    /// Operator by which the fiber coordinate acts.
    fn fiber_operator(self, order: usize) -> SkewOperator {
        let alg = self.base_algebra();
        let v = alg.vars().clone();
        match self {
            Polarization::Weyl => {
                SkewOperator::from_terms(&alg, order, [(vec![1], HSeries::hbar(&v, order))])
            }
            Polarization::QTorus | Polarization::Gw => SkewOperator::generator(&alg, 0, 1, order),
            Polarization::Hurwitz => {
                let hx = HSeries::monomial(&v, 1, vec![1], Rational::one(), order)
                    .expect("x is invertible");
                SkewOperator::from_terms(&alg, order, [(vec![1], hx)])
            }
        }
        .expect("static fiber operator")
    }

    /// The base operator by which an ambient element acts.
    pub fn ambient_to_operator(self, a: &HSeries) -> Result<SkewOperator> {
        let ambient = self.ambient();
        ambient.vars().ensure_same(a.vars())?;
        let alg = self.base_algebra();
        let v = alg.vars().clone();
        let n = a.order();
        let (bi, fi) = self.coordinates();
        let fiber = self.fiber_operator(n);
        let fiber_inv = fiber.try_inverse().ok();
        let mut out = SkewOperator::zero(&alg, n);
        let mut cache: std::collections::BTreeMap<i32, SkewOperator> = Default::default();
        for (k, e, c) in a.terms() {
            let coeff = HSeries::monomial(&v, k, vec![e[bi]], c.clone(), n)?;
            let b = e[fi];
            let fpow = match cache.get(&b) {
                Some(p) => p.clone(),
                None => {
                    let p = if b >= 0 {
                        fiber.pow(b)?
                    } else {
                        fiber_inv
                            .as_ref()
                            .ok_or_else(|| Error::NotInvertible("fiber coordinate".into()))?
                            .pow(-b)?
                    };
                    cache.insert(b, p.clone());
                    p
                }
            };
            out = out.checked_add(&fpow.mul_coeff(&coeff)?)?;
        }
        Ok(out)
    }

    /// `a · f` for an ambient element `a`.
    pub fn polar_apply(self, a: &HSeries, f: &HSeries) -> Result<HSeries> {
        self.ambient_to_operator(a)?.apply(f)
    }

    /// `P · f` for an operator already expressed on the base.
    pub fn polar_apply_operator(self, p: &SkewOperator, f: &HSeries) -> Result<HSeries> {
        self.check_base_operator(p)?;
        p.apply(f)
    }

    fn check_base_operator(self, p: &SkewOperator) -> Result<()> {
        let base = self.base_algebra();
        if p.vars() != base.vars() || p.algebra().alphabet() != base.alphabet() {
            return Err(Error::Incompatible(format!(
                "operator in {} does not act under the {self} polarization",
                p.algebra()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::Weyl => "weyl",
            Polarization::QTorus => "qtorus",
            Polarization::Hurwitz => "hurwitz",
            Polarization::Gw => "gw",
        })
    }
}

impl FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weyl" => Ok(Polarization::Weyl),
            "qtorus" | "qtorus_pol" => Ok(Polarization::QTorus),
            "hurwitz" => Ok(Polarization::Hurwitz),
            "gw" => Ok(Polarization::Gw),
            _ => Err(Error::InvalidInput(format!(
                "unknown polarization `{s}` (expected weyl|qtorus|hurwitz|gw)"
            ))),
        }
    }
}

/// Monomial exponents of the ansatz window in one base variable.
fn window(vars: &VarSet, d: i32) -> Vec<i32> {
    let lo = if vars.get(0).invertible { -d } else { 0 };
    (lo..=d).collect()
}

/// Degree-bounded solutions of `P f ≡ 0 mod ħ^{N+1}` with
/// `f = Σ_{k<=N} ħ^k f_k`, each `f_k` supported on the window
/// (`0..=D`, or `-D..=D` on an invertible base).
///
/// The full solution space over ℚ also contains solutions that vanish mod
/// `ħ` (e.g. `ħ^N g` whenever `P ≡ 0 mod ħ`); the returned basis keeps the
/// rows of the reduced echelon form whose pivot lies in the `ħ^0` block, so
/// every element has a nonzero classical part and the list is a canonical
/// echelon basis.
pub fn annihilator_kernel(p: &SkewOperator, d: i32, n: usize) -> Result<Vec<HSeries>> {
    if p.order() < n {
        return Err(Error::OrderMismatch(p.order(), n));
    }
    let p = p.truncate(n);
    let vars = p.vars().clone();
    let win = window(&vars, d);
    let w = win.len();
    let ncols = w * (n + 1);
    // columns: block k (power of ħ) major, window monomial minor
    let mut row_index: std::collections::BTreeMap<(usize, Vec<i32>), usize> = Default::default();
    let mut entries: Vec<(usize, usize, Rational)> = Vec::new();
    for k in 0..=n {
        for (mi, &m) in win.iter().enumerate() {
            let basis = HSeries::monomial(&vars, k, vec![m], Rational::one(), n)?;
            let image = p.apply(&basis)?;
            for (t, e, c) in image.terms() {
                let next = row_index.len();
                let r = *row_index.entry((t, e.clone())).or_insert(next);
                entries.push((r, k * w + mi, c.clone()));
            }
        }
    }
    let mut matrix = vec![vec![Rational::zero(); ncols]; row_index.len()];
    for (r, c, v) in entries {
        matrix[r][c] += v;
    }
    let null = nullspace(&matrix, ncols);
    let echelon = rref(&null, ncols);
    let mut out = Vec::new();
    for (row, &pivot) in echelon.rows.iter().zip(&echelon.pivots) {
        if pivot >= w {
            break;
        }
        let terms = row
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(col, c)| (col / w, vec![win[col % w]], c.clone()));
        out.push(HSeries::from_terms(&vars, n, terms)?);
    }
    Ok(out)
}

/// Kernel of an ambient element acting through `pol`.
pub fn annihilator_kernel_ambient(
    pol: Polarization,
    a: &HSeries,
    d: i32,
    n: usize,
) -> Result<Vec<HSeries>> {
    annihilator_kernel(&pol.ambient_to_operator(a)?, d, n)
}

/// Compares the kernel of `P` acting directly on the base with the kernel
/// of its symbol acting through `pol`.
pub fn kernel_agreement(
    p: &SkewOperator,
    pol: Polarization,
    map: &SymbolMap,
    d: i32,
    n: usize,
) -> Result<bool> {
    if pol.symbol_map() != Some(*map) {
        return Err(Error::Incompatible(format!(
            "symbol map {map} does not land in the {pol} polarization"
        )));
    }
    pol.check_base_operator(p)?;
    let direct = annihilator_kernel(p, d, n)?;
    let symbol = map.apply(p)?;
    let embedded = annihilator_kernel_ambient(pol, &symbol, d, n)?;
    Ok(direct == embedded)
}

/// `S - e^ħ` on the scaling algebra, whose kernel is spanned by `x`.
pub fn scaling_eigen_operator(order: usize) -> SkewOperator {
    let alg = OpAlgebra::scaling();
    let s = SkewOperator::generator(&alg, 0, 1, order).expect("S");
    let e = SkewOperator::from_coeff(&alg, crate::series::exp_hbar(&rat(1, 1), alg.vars(), order))
        .expect("scalar");
    s.checked_sub(&e).expect("same algebra")
}

/// Classical action of the fixed coordinate, for consistency checks.
pub fn lagrangian_value(pol: Polarization, f: &HSeries) -> Result<LaurentPoly> {
    let (name, _) = pol.lagrangian();
    let ambient = pol.ambient();
    let a = HSeries::var(ambient.vars(), name, f.order())?;
    Ok(pol.polar_apply(&a, f)?.sigma0())
}
