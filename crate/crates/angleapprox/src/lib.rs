//! Numerics for trigonometric approximation on the periodic unit cube.
//!
//! A function is a finite map from integer frequency multi-indices to complex
//! Fourier coefficients ([`SpectralFunction`]); everything else is built on
//! top of that representation:
//!
//! - [`spectrum`]: partial sums, dyadic blocks, angular sums, fractional
//!   derivatives, shifts, and fast grid synthesis;
//! - [`lorentz`]: the Lorentz functional `‖f‖_{p,τ}` via non-increasing
//!   rearrangement of grid samples (`τ = p` recovers Lebesgue `L_p`);
//! - [`smoothness`]: fractional binomials, one-axis and mixed fractional
//!   differences (truncated series and exact multiplier forms), and the mixed
//!   modulus of smoothness by deterministic step search;
//! - [`approximation`]: best angular approximation estimators and the
//!   two-sided functionals they appear in (realization, direct and inverse
//!   estimates, Bernstein ratios);
//! - [`lacunary`]: sparse cosine series with dyadic frequencies and their
//!   coefficient-side functionals.
//!
//! All values are immutable after construction and safe to share across
//! threads; every operation is a pure function of its inputs.

pub mod approximation;
pub mod error;
pub mod lacunary;
pub mod lorentz;
pub mod smoothness;
pub mod spectrum;

pub use error::CoreError;
pub use lorentz::{LorentzIndex, Rearrangement, SamplingConfig};
pub use smoothness::{FractionalOrder, ModulusConfig, StepVector};
pub use spectrum::{AxisSubset, FrequencyBlock, GridSample, SpectralFunction};
