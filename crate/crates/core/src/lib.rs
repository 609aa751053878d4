//! Birkhoff normal forms for the hinged extensible beam
//!
//! ```text
//! u_tt + u_xxxx - (m + (1/(2 pi)) ∫ u_x² dx) u_xx = 0,   x ∈ [0, pi]
//! ```
//!
//! Galerkin-truncated in the sine basis. The crate provides:
//!
//! - [`spectrum`]: frequencies, weights and the Sobolev-type norms
//! - [`resonance`]: small divisors and exhaustive certification of the
//!   fourth and sixth order non-resonance bounds
//! - [`hamiltonian`]: the Hamiltonian, its coefficient tables and vector field
//! - [`poisson`]: sparse paired-monomial polynomials, brackets, majorant bounds
//! - [`bnf`]: generating functions, homological residuals and explicit constants
//! - [`dynamics`]: symplectic integration, generating flows, stability-estimate checks
//! - [`physical`]: SI units, the reference initial profile and the stability-time table

#![allow(clippy::neg_cmp_op_on_partial_ord)] // the negated forms also reject NaN

pub mod bnf;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod physical;
pub mod poisson;
pub mod resonance;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;
