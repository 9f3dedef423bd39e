use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named variable. Invertible variables may carry negative exponents
/// (coordinates on a `C*` factor).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub invertible: bool,
}

impl Var {
    pub fn new(name: impl Into<String>, invertible: bool) -> Self {
        Var {
            name: name.into(),
            invertible,
        }
    }
}

/// An ordered, shared list of variables. Every polynomial, series and
/// operator carries one; arithmetic requires identical lists.
#[derive(Clone)]
pub struct VarSet(Arc<[Var]>);

impl VarSet {
    pub fn new(vars: Vec<Var>) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
            if v.name.is_empty() {
                return Err(Error::InvalidInput("empty variable name".into()));
            }
        }
        Ok(VarSet(vars.into()))
    }

    /// Shorthand for literal layouts known to be valid.
    pub fn of(vars: &[(&str, bool)]) -> Self {
        VarSet::new(vars.iter().map(|&(n, inv)| Var::new(n, inv)).collect())
            .expect("static variable layout")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Var> {
        self.0.iter()
    }

    pub fn get(&self, i: usize) -> &Var {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v.name == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn as_slice(&self) -> &[Var] {
        &self.0
    }

    pub fn names(&self) -> String {
        self.0
            .iter()
            .map(|v| {
                if v.invertible {
                    format!("{}^±", v.name)
                } else {
                    v.name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn ensure_same(&self, other: &VarSet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VarMismatch {
                left: self.names(),
                right: other.names(),
            })
        }
    }

    /// Checks that an exponent vector is admissible for this layout.
    pub fn check_exponents(&self, exps: &[i32]) -> Result<()> {
        if exps.len() != self.len() {
            return Err(Error::InvalidInput(format!(
                "exponent vector of length {} for {} variables",
                exps.len(),
                self.len()
            )));
        }
        for (v, &e) in self.0.iter().zip(exps) {
            if e < 0 && !v.invertible {
                return Err(Error::NegativeExponent(v.name.clone()));
            }
        }
        Ok(())
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for VarSet {}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.names())
    }
}
