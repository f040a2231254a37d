//! Computable objects of fractional Fock-Sobolev theory on `C^n`.
//!
//! Entire functions are represented at desk scale by sparse polynomials
//! ([`poly::Polynomial`]). On top of that the crate provides
//!
//! - Gamma-ratio coefficients of the fractional operators ([`gamma`]),
//! - fractional derivatives and integrals by series and by independent
//!   Beta-integral representations ([`fracops`]),
//! - weighted reproducing kernels as power series in `z·w̄` ([`kernels`]),
//! - exact pairings, numerical weighted Fock and Fock-Sobolev norms and the
//!   reproducing operator ([`norms`]),
//! - fitted-constant probes for the supporting growth inequalities
//!   ([`bound_probe`]),
//! - Carleson-measure scans and embedding checks ([`carleson`]),
//! - a verification orchestrator and command-line front end ([`verify`],
//!   [`cli`]).

pub mod bound_probe;
pub mod carleson;
pub mod cli;
pub mod error;
pub mod fracops;
pub mod gamma;
pub mod kernels;
pub mod norms;
pub mod poly;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
