//! Error types shared by every module of the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the certification engine.
///
/// Variants split into three families that front ends may want to map to
/// distinct exit codes: invalid input (geometry / parameters / requests the
/// computed data cannot serve), numerical failures (iterations that did not
/// converge, brackets without a sign change), and threshold violations
/// (querying a certificate below its guaranteed contrast).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Geometry rejected by its invariants (e.g. `a >= b`, disks that cannot
    /// fit the unit cell disjointly).
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A scalar or structural parameter outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The spectral function was evaluated too close to one of its poles.
    #[error("spectral function evaluated too close to a pole: nu = {nu}, pole = {pole}")]
    PoleProximity { nu: f64, pole: f64 },

    /// A root bracket did not contain a sign change. Carries the bracket and
    /// the function values at its ends for diagnosis; for the spectral
    /// function this usually signals a truncation `K` that is too small.
    #[error(
        "no sign change in bracket [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi}); \
         if bracketing a spectral-function root, increase the truncation K"
    )]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// An iterative procedure exhausted its budget.
    #[error("iteration failed to converge: {0}")]
    Convergence(String),

    /// The computed spectra do not extend far enough to answer the query
    /// (e.g. the nearest spectral neighbor is the last computed element, so
    /// the true minimum distance may lie beyond the cutoff).
    #[error("insufficient spectral range: {0}; recompute with larger cutoffs")]
    InsufficientRange(String),

    /// A certificate requires the target eigenvalue to be simple in the
    /// working value set, but a near-coincident value was found.
    #[error("eigenvalue {value} is not simple: neighbor {neighbor} within relative tolerance {tol}")]
    NotSimple { value: f64, neighbor: f64, tol: f64 },

    /// Interlacing of the limit spectra is violated; certificates refuse to
    /// build on inconsistent spectra.
    #[error("interlacing violation: {0}")]
    Interlacing(String),

    /// A certificate was queried at a contrast at or below its threshold.
    /// The certificate is inapplicable there, not wrong.
    #[error("contrast k = {k} is not above the certificate threshold {threshold}")]
    BelowThreshold { k: f64, threshold: f64 },
}
