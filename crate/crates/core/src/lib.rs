//! Edge spectra of periodic Schrödinger operators `-Laplacian + V` on the
//! plane, cut along rationally rotated lines.
//!
//! The pipeline runs from bulk Bloch bands and gaps ([`bulk`]) to half-plane
//! fibers on a finite-difference tube ([`fiber`]), continuous tracking of
//! their eigenvalue branches under a translation parameter ([`flow`]), gap
//! filling along continued-fraction approximants of an irrational angle
//! ([`filling`]) and decay rates of edge states ([`decay`]).
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod bulk;
pub mod convergents;
pub mod decay;
pub mod error;
pub mod fiber;
pub mod filling;
pub mod flow;
pub mod linalg;
pub mod potential;
pub mod scalar;

pub use convergents::{continued_fraction_convergents, ConvergentSequence, Slope};
pub use error::{Error, Result};
pub use fiber::Boundary;
pub use potential::{make_potential, PotentialSpec, RationalAngle};
pub use scalar::Scalar;

pub type Potential = potential::PeriodicPotential<f64>;
pub type BandStructure = bulk::BandStructure<f64>;
pub type SpectralGap = bulk::SpectralGap<f64>;
pub type FiberSpec = fiber::FiberSpec<f64>;
pub type FiberSpectrum = fiber::FiberSpectrum<f64>;
pub type BranchFamily = flow::BranchFamily<f64>;
pub type FlowResult = flow::FlowResult<f64>;
pub type FlowReport = flow::FlowReport<f64>;
pub type FillReport = filling::FillReport<f64>;
pub type DecayFit = decay::DecayFit<f64>;
