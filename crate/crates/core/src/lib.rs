//! Exact spectra, energies, and incidence counting over prime fields.
//!
//! The library computes Fourier spectra of subsets of `F_p`, additive and
//! multiplicative energies (exactly, in 128-bit integers), representation
//! functions, sumset/product-set growth statistics, and weighted point-plane
//! incidences, together with a harness that checks the corresponding
//! inequalities at desk scale and regresses their ratios against blessed
//! baselines.

pub mod bits;
pub mod energy;
pub mod error;
pub mod fft;
pub mod field;
pub mod fourier;
pub mod harness;
pub mod incidence;
pub mod selftest;
pub mod set;

pub use energy::{EnergyValue, Method, RepFunction};
pub use error::{Error, Result};
pub use field::PrimeField;
pub use fourier::{FourierTable, SpectrumResult};
pub use harness::{SpectrumRule, TheoremId, TheoremReport};
pub use incidence::IncidenceScene;
pub use set::FpSet;
