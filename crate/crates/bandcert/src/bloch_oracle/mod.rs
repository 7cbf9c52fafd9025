//! Brute-force Bloch/Neumann eigenvalue oracle.
//!
//! Everything in the other modules is *derived* — closed forms, limit
//! spectra, certified intervals. This module is the ground truth they are
//! validated against: a finite-volume discretization of the cell operator
//!
//! ```text
//! -div( a(x) grad u ) = lambda u        on Y = (0,1]^d,
//! ```
//!
//! with `a = 1` on the inclusions and `a = k` outside (or the dual
//! assignment `1/k` / `1`), under quasi-periodic, periodic zero-mean, or
//! Neumann zero-mean boundary conditions. Coefficients are sampled at cell
//! centers and averaged harmonically at control-volume faces, which keeps
//! flux continuity exact for piecewise-constant media; quasi-periodicity
//! enters as a phase `e^{i alpha_j}` on wrap-around faces, so the assembled
//! matrix is Hermitian positive semidefinite by construction.
//!
//! On top of the discretization sit eigenvalue sweeps over the Brillouin
//! zone ([`band_sweep`]), gap detection with Richardson margins from a
//! coarse/fine grid pair, certificate verification against the sweeps
//! ([`verify_certificate`]), and the exact discrete reciprocity check
//! between the two physical normalizations ([`reciprocal_check`]).

mod band;
mod eigen;
mod field;
mod operator;
mod verify;

pub use band::{
    band_csv, band_json, band_sweep, contrast_ceiling, default_alpha_grid,
    neumann_eigenvalues, BandData, CeilingData, GapObservation, NeumannData,
    DEFAULT_CEILING_CONTRAST,
};
pub use eigen::{eigen_solve, EigenSolution};
pub use field::CoefficientField;
pub use operator::{assemble_operator, BlochOperator, BlochProblem, BoundaryCondition};
pub use verify::{
    reciprocal_check, verify_certificate, CheckResult, CheckStatus, ReciprocalReport,
    VerificationReport,
};

/// Smallest accepted grid resolution per axis.
pub(crate) const MIN_RESOLUTION: usize = 8;

/// Dense eigensolves above this many degrees of freedom are slower than the
/// shift-invert iteration on a single core; route accordingly.
pub(crate) const DENSE_DOF_LIMIT: usize = 1200;
