//! Reversible-geodesics analysis for two-dimensional (α,β)-Finsler metrics.
//!
//! A metric `F = α·φ(β/α)` is assembled from a conformal factor ν, a 1-form `(b1, b2)` and a
//! profile φ ([`metric::MetricBundle`]). [`reversibility::classify`] decides whether the geodesics
//! of `F` are reversible; [`frames`] and [`geodesics`] provide independent checks of that verdict.

pub mod config;
pub mod error;
pub mod frames;
pub mod geodesics;
pub mod metric;
pub mod reversibility;
pub mod scalarfield;
pub mod scan;

pub use error::{Error, Result};
