//! Certified band gaps and passbands for high-contrast photonic/acoustic crystals.
//!
//! The library computes, from crystal geometry and material contrast alone,
//! provable band-gap and passband intervals of the divergence-form operator
//!
//! ```text
//! L_k = -div( (k·(1 - χ_D) + χ_D) grad · )      on the unit cell Y = (0,1]^d,
//! ```
//!
//! where `D` is a union of buffered inclusions (disks of radius `a`, each
//! surrounded by a disjoint shell of radius `b`) and `k > 1` is the contrast.
//! Every certificate carries an explicit contrast threshold above which the
//! stated interval is guaranteed, and can be validated against a brute-force
//! Bloch/Neumann finite-difference eigenvalue oracle.
//!
//! # Pipeline
//!
//! 1. [`specfun`] — Bessel functions `J_n` and their positive zeros
//!    `eta_{n,k}`, which generate every disk spectrum.
//! 2. [`limit_spectra`] — the high-contrast limit sets: the Dirichlet
//!    spectrum of the inclusion set split by eigenfunction mean, the roots of
//!    the spectral function `S(nu)`, and their merge `sigma_N`.
//! 3. [`resonance_bounds`] — geometric resonance descriptors `theta`, `rho`,
//!    `mu*`, `z*` and the convergence radii `r*` of the contrast expansions.
//! 4. [`certify`] — gap / passband certificates: spectral intervals as
//!    explicit functions of the contrast `k`, with thresholds, plus the dual
//!    (coefficient-flipped) problem via the exact reciprocal relation.
//! 5. [`bloch_oracle`] — ground truth: quasi-periodic / periodic / Neumann
//!    eigenvalues of the discretized cell problem, band sweeps over the
//!    Brillouin zone, numerical gap detection, and certificate verification.

pub mod bloch_oracle;
pub mod certify;
pub mod error;
pub mod limit_spectra;
pub mod resonance_bounds;
pub mod specfun;

pub use error::{Error, Result};

/// Crate version, embedded in emitted artifacts for provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
