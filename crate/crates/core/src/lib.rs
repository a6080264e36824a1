//! Spectral stability analysis of `n`th-order consensus on growing networks.
//!
//! Agents are chains of `n` integrators coupled through relative feedback
//! `u_i = −Σ_k a_k Σ_j w_ij (x_i⁽ᵏ⁾ − x_j⁽ᵏ⁾)`. The closed loop is stable iff
//! every polynomial `sⁿ + Σ_k a_k λ_l s^k` built from a nonzero Laplacian
//! eigenvalue `λ_l` is Hurwitz. With gains held fixed, families whose
//! algebraic connectivity decays lose stability at a finite critical size.
//!
//! Modules:
//!
//! - [`graph`]: graphs, Laplacians, graph families, Cheeger constant
//! - [`spectrum`]: dense and analytic Laplacian spectra
//! - [`stability`]: characteristic polynomials, complex Routh–Hurwitz
//!   chain, closed-form conditions, root oracle, network verdicts
//! - [`fragility`]: critical network size, sweeps, connectivity bounds
//! - [`simulator`]: time-domain integration of the closed loop

pub mod error;
pub mod fragility;
pub mod graph;
pub mod simulator;
pub mod spectrum;
pub mod stability;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, GraphFamily, LaplacianMatrix};
pub use num_complex::Complex64;
pub use spectrum::ComplexSpectrum;
pub use stability::{ComplexPolynomial, GainSet, StabilityStatus, StabilityVerdict};
