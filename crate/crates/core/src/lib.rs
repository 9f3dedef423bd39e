//! Exact-arithmetic engine for ħ-adic deformation quantization of surfaces:
//! truncated star products, skew-operator normal forms, star-product
//! synthesis from operator data, polarization actions with annihilator
//! kernels, and quantization of plane and spectral curves.

pub mod curve;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod maps;
pub mod operator;
pub mod polarization;
pub mod sampling;
pub mod serial;
pub mod series;
pub mod star;
pub mod synthesis;

pub use error::{Error, Result};
