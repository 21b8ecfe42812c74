//! Numerical toolkit for two-dimensional quantum field theories with a
//! factorizing S-matrix.
//!
//! A model is fixed by its two-particle scattering function. From it the crate
//! builds a discretized S₂-twisted Fock space with Zamolodchikov–Faddeev
//! operators, wedge-local fields, the n-particle scattering states and the
//! modular nuclearity estimates.

pub mod cli;
pub mod config;
pub mod error;
pub mod fields;
pub mod fock_space;
pub mod nuclearity;
pub mod quadrature;
pub mod scattering;
pub mod scattering_function;
pub mod wedge_locality;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Version string recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
