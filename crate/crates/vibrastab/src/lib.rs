//! Stabilization analysis of a disturbed vibrating string under
//! fast-oscillating feedback.
//!
//! The string `u_tt = a² u_xx - α u_t + γ² u` on `[0, 2π]` with Dirichlet
//! ends is destabilized by the `γ² u` term and driven by a high-gain,
//! fast-oscillating feedback `δ k² g(kτ) u` with a zero-mean 1-periodic
//! waveform `g`. After rescaling time by `k`, each spatial mode becomes a
//! 2x2 periodic linear system; this crate provides
//!
//! - the spectral basis, modal projections and discrete Sobolev norms
//!   ([`model`]),
//! - admissible excitation waveforms and their moments ([`excitation`]),
//! - flows of time-variant 2x2 systems via time-ordered exponentials,
//!   Volterra truncations, and matrix logarithms ([`chrono`]),
//! - per-mode monodromy classification, closed-form averaged generators and
//!   stability thresholds ([`stability`]),
//! - block-diagonal time-domain simulation, decay-rate fitting and Lyapunov
//!   certificates for the tail modes ([`galerkin`]).
//!
//! The numeric core is generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the aliases below fix `f64`, which every documented
//! tolerance refers to.

pub mod chrono;
pub mod error;
pub mod excitation;
pub mod mat2;
pub mod model;
mod quad;
pub mod scalar;
pub mod stability;
pub mod galerkin;

pub use error::{Error, Result};
pub use scalar::Real;

// spectra are reported as complex pairs; make the type reachable downstream
pub use num_complex;

/// Double-precision aliases for the common case.
pub type Mat2F64 = mat2::Mat2<f64>;
pub type CMat2F64 = mat2::CMat2<f64>;
pub type ExcitationF64 = excitation::Excitation<f64>;
pub type StringParamsF64 = model::StringParams<f64>;
pub type ControlParamsF64 = model::ControlParams<f64>;
pub type ModalStateF64 = model::ModalState<f64>;
pub type GridFunctionF64 = model::GridFunction<f64>;
pub type ModeSystemF64 = stability::ModeSystem<f64>;
pub type StabilityVerdictF64 = stability::StabilityVerdict<f64>;
pub type GalerkinSystemF64 = galerkin::GalerkinSystem<f64>;
pub type TrajectoryF64 = galerkin::Trajectory<f64>;
pub type SimulationOptionsF64 = galerkin::SimulationOptions<f64>;
pub type EndToEndReportF64 = galerkin::EndToEndReport<f64>;
