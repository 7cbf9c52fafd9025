//! Python bindings for the certification engine.
//!
//! The module mirrors the Rust API shape one-to-one where it matters:
//! [`DiskCrystal`] carries the geometry, [`LimitSpectra`] the assembled
//! high-contrast limit sets, and the certificate classes wrap their Rust
//! counterparts field by field. Heavyweight oracle routines (band sweeps,
//! verification, reciprocity) are methods on the crystal and return plain
//! dictionaries, so downstream analysis in Python needs no further wrapper
//! types.
//!
//! Build with `cargo build -p bandcert-py` and import the produced
//! `libbandcert_py.so` as `bandcert_py` (see `python/smoke_test.py` for a
//! self-contained loader).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};

use bandcert::bloch_oracle as oracle;
use bandcert::certify as certify;
use bandcert::limit_spectra as spectra_mod;
use bandcert::resonance_bounds as bounds_mod;
use bandcert::specfun;

// ============================================================================
// Error and JSON bridging
// ============================================================================

/// Map the crate error onto Python exception types: domain/validation
/// problems become `ValueError`, numerical failures `RuntimeError`.
fn to_py_err(e: bandcert::Error) -> PyErr {
    use bandcert::Error as E;
    match e {
        E::InvalidGeometry(_)
        | E::InvalidParameter(_)
        | E::InsufficientRange(_)
        | E::NotSimple { .. }
        | E::BelowThreshold { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Convert a `serde_json` value into native Python objects (dicts, lists,
/// numbers, strings), so the JSON renderings of the Rust types arrive in
/// Python as ordinary data.
fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let converted: Vec<Bound<'py, PyAny>> =
                items.iter().map(|v| json_to_py(py, v)).collect::<PyResult<_>>()?;
            PyList::new(py, converted)?.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

// ============================================================================
// Scalar helpers
// ============================================================================

/// Bessel function of the first kind `J_n(x)`.
#[pyfunction]
fn bessel_j(n: u32, x: f64) -> f64 {
    specfun::bessel_j(n, x)
}

/// Derivative `J_n'(x)`.
#[pyfunction]
fn bessel_j_prime(n: u32, x: f64) -> f64 {
    specfun::bessel_j_prime(n, x)
}

/// The `k`-th positive zero `eta_{n,k}` of `J_n` (1-based `k`).
#[pyfunction]
fn bessel_zero(n: u32, k: u32) -> PyResult<f64> {
    Ok(specfun::bessel_zero(n, k).map_err(to_py_err)?.value)
}

/// Dispersion bound `theta` of a disk/ball crystal with radii `a < b`.
#[pyfunction]
fn theta_disks(a: f64, b: f64) -> PyResult<f64> {
    bounds_mod::theta_disks(a, b).map_err(to_py_err)
}

/// Resonance bounds derived from `theta`:
/// `{"theta", "rho", "mu_star", "z_star"}`.
#[pyfunction]
fn resonance_bounds(py: Python<'_>, theta: f64) -> PyResult<Py<PyAny>> {
    let b = bounds_mod::resonance_bounds(theta).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("theta", b.theta)?;
    dict.set_item("rho", b.rho)?;
    dict.set_item("mu_star", b.mu_star)?;
    dict.set_item("z_star", b.z_star)?;
    Ok(dict.into_any().unbind())
}

/// Master-form convergence radius `r*` for a spectral floor `Lambda`,
/// reciprocal half-distance `d_hat`, and dispersion bound `theta`.
#[pyfunction]
fn convergence_radius(spectral_floor: f64, d_hat: f64, theta: f64) -> PyResult<f64> {
    let bounds = bounds_mod::resonance_bounds(theta).map_err(to_py_err)?;
    Ok(bounds_mod::convergence_radius(spectral_floor, d_hat, &bounds)
        .map_err(to_py_err)?
        .r_star)
}

/// Tail bound of the eigenvalue perturbation series truncated after order
/// `p`, at expansion point `z` inside the convergence disk `r_star`.
#[pyfunction]
fn series_error_bound(p: u32, z: f64, r_star: f64, d_hat: f64) -> PyResult<f64> {
    certify::series_error_bound(p, z, r_star, d_hat).map_err(to_py_err)
}

/// The default quasi-momentum grid used by sweeps (zone-boundary path plus
/// interior guard points).
#[pyfunction]
fn default_alpha_grid(dimension: u32) -> Vec<Vec<f64>> {
    oracle::default_alpha_grid(dimension)
}

// ============================================================================
// Limit spectra
// ============================================================================

/// The two assembled high-contrast limit sets of a crystal.
#[pyclass(module = "bandcert_py")]
struct LimitSpectra {
    inner: spectra_mod::LimitSpectra,
}

fn entries_to_py<'py>(
    py: Python<'py>,
    entries: &[spectra_mod::SpectralEntry],
) -> PyResult<Bound<'py, PyAny>> {
    let rows: Vec<Bound<'py, PyAny>> = entries
        .iter()
        .map(|e| -> PyResult<Bound<'py, PyAny>> {
            let dict = PyDict::new(py);
            dict.set_item("value", e.value)?;
            dict.set_item("provenance", e.provenance.tag())?;
            dict.set_item("order", e.order)?;
            dict.set_item("radial_index", e.radial_index)?;
            dict.set_item("multiplicity", e.multiplicity)?;
            Ok(dict.into_any())
        })
        .collect::<PyResult<_>>()?;
    Ok(PyList::new(py, rows)?.into_any())
}

#[pymethods]
impl LimitSpectra {
    /// Dirichlet limit set as a list of entry dictionaries.
    fn sigma_dirichlet(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        Ok(entries_to_py(py, &self.inner.sigma_dirichlet)?.unbind())
    }

    /// Neumann/periodic limit set as a list of entry dictionaries.
    fn sigma_n(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        Ok(entries_to_py(py, &self.inner.sigma_n)?.unbind())
    }

    /// Completeness bound of the Dirichlet list.
    #[getter]
    fn dirichlet_complete_below(&self) -> f64 {
        self.inner.dirichlet_complete_below
    }

    /// Completeness bound of the `sigma_N` list.
    #[getter]
    fn sigma_n_complete_below(&self) -> f64 {
        self.inner.sigma_n_complete_below
    }

    /// The `j`-th nonzero-mean Dirichlet value `delta*_j` (1-based).
    fn delta_star(&self, j: u32) -> PyResult<f64> {
        self.inner.delta_star(j).map_err(to_py_err)
    }

    /// Strict-interlacing report:
    /// `{"ok", "violations", "windows_checked"}`.
    fn interlacing(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = spectra_mod::interlacing_check(&self.inner);
        let dict = PyDict::new(py);
        dict.set_item("ok", report.ok)?;
        dict.set_item("violations", report.violations)?;
        dict.set_item("windows_checked", report.windows_checked)?;
        Ok(dict.into_any().unbind())
    }

    /// Canonical JSON rendering (matches the CLI's `spectra.json` payload).
    fn to_json(&self) -> String {
        format!("{:#}", spectra_mod::spectra_to_json(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!(
            "LimitSpectra(sigma_dirichlet: {} entries, sigma_n: {} entries)",
            self.inner.sigma_dirichlet.len(),
            self.inner.sigma_n.len()
        )
    }
}

// ============================================================================
// Certificates
// ============================================================================

/// A certified band gap above `delta*_j`.
#[pyclass(module = "bandcert_py")]
struct GapCertificate {
    inner: certify::GapCertificate,
}

#[pymethods]
impl GapCertificate {
    #[getter]
    fn j(&self) -> u32 {
        self.inner.j
    }
    #[getter]
    fn delta_star(&self) -> f64 {
        self.inner.delta_star
    }
    #[getter]
    fn nu_next(&self) -> f64 {
        self.inner.nu_next
    }
    #[getter]
    fn d_j(&self) -> f64 {
        self.inner.d_j
    }
    #[getter]
    fn r_bar(&self) -> f64 {
        self.inner.r_bar
    }
    #[getter]
    fn k_threshold(&self) -> f64 {
        self.inner.k_threshold
    }
    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.variant.tag()
    }
    #[getter]
    fn dual(&self) -> bool {
        self.inner.dual
    }
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    /// Audit constants `{"theta", "mu_star", "z_star", "lambda_floor"}`.
    fn provenance(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let p = &self.inner.provenance;
        let dict = PyDict::new(py);
        dict.set_item("theta", p.theta)?;
        dict.set_item("mu_star", p.mu_star)?;
        dict.set_item("z_star", p.z_star)?;
        dict.set_item("lambda_floor", p.lambda_floor)?;
        Ok(dict.into_any().unbind())
    }

    /// The certified open gap interval at contrast `k > k_threshold`.
    fn gap_interval(&self, k: f64) -> PyResult<(f64, f64)> {
        self.inner.gap_interval(k).map_err(to_py_err)
    }

    /// The dual certificate at contrast `k` (intervals scaled by `1/k`).
    fn dual_at(&self, k: f64) -> PyResult<GapCertificate> {
        Ok(GapCertificate { inner: self.inner.dual_at(k).map_err(to_py_err)? })
    }

    /// Dictionary rendering with an interval table over `k_list` (matches
    /// the CLI's certificate JSON payload).
    #[pyo3(signature = (k_list = Vec::new()))]
    fn to_dict(&self, py: Python<'_>, k_list: Vec<f64>) -> PyResult<Py<PyAny>> {
        Ok(json_to_py(py, &self.inner.to_json(&k_list))?.unbind())
    }

    fn __repr__(&self) -> String {
        format!(
            "GapCertificate(j={}, delta_star={}, nu_next={}, k_threshold={}, \
             variant='{}', dual={})",
            self.inner.j,
            self.inner.delta_star,
            self.inner.nu_next,
            self.inner.k_threshold,
            self.inner.variant.tag(),
            self.inner.dual
        )
    }
}

/// A certified persistent passband reaching up toward `delta*_j`.
#[pyclass(module = "bandcert_py")]
struct PassbandCertificate {
    inner: certify::PassbandCertificate,
}

#[pymethods]
impl PassbandCertificate {
    #[getter]
    fn j(&self) -> u32 {
        self.inner.j
    }
    #[getter]
    fn delta_star(&self) -> f64 {
        self.inner.delta_star
    }
    #[getter]
    fn nu_prev(&self) -> f64 {
        self.inner.nu_prev
    }
    #[getter]
    fn d_j(&self) -> f64 {
        self.inner.d_j
    }
    #[getter]
    fn r_under(&self) -> f64 {
        self.inner.r_under
    }
    #[getter]
    fn k_threshold(&self) -> f64 {
        self.inner.k_threshold
    }
    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.variant.tag()
    }
    #[getter]
    fn dual(&self) -> bool {
        self.inner.dual
    }
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    /// Audit constants `{"theta", "mu_star", "z_star", "lambda_floor"}`.
    fn provenance(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let p = &self.inner.provenance;
        let dict = PyDict::new(py);
        dict.set_item("theta", p.theta)?;
        dict.set_item("mu_star", p.mu_star)?;
        dict.set_item("z_star", p.z_star)?;
        dict.set_item("lambda_floor", p.lambda_floor)?;
        Ok(dict.into_any().unbind())
    }

    /// The certified closed band interval at contrast `k > k_threshold`.
    fn band_interval(&self, k: f64) -> PyResult<(f64, f64)> {
        self.inner.band_interval(k).map_err(to_py_err)
    }

    /// The dual certificate at contrast `k` (intervals scaled by `1/k`).
    fn dual_at(&self, k: f64) -> PyResult<PassbandCertificate> {
        Ok(PassbandCertificate { inner: self.inner.dual_at(k).map_err(to_py_err)? })
    }

    /// Dictionary rendering with an interval table over `k_list`.
    #[pyo3(signature = (k_list = Vec::new()))]
    fn to_dict(&self, py: Python<'_>, k_list: Vec<f64>) -> PyResult<Py<PyAny>> {
        Ok(json_to_py(py, &self.inner.to_json(&k_list))?.unbind())
    }

    fn __repr__(&self) -> String {
        format!(
            "PassbandCertificate(j={}, delta_star={}, nu_prev={}, k_threshold={}, \
             variant='{}', dual={})",
            self.inner.j,
            self.inner.delta_star,
            self.inner.nu_prev,
            self.inner.k_threshold,
            self.inner.variant.tag(),
            self.inner.dual
        )
    }
}

// ============================================================================
// Geometry and oracle
// ============================================================================

/// A periodic crystal of disjoint disk/ball inclusions in the unit cell.
#[pyclass(module = "bandcert_py")]
struct DiskCrystal {
    inner: certify::DiskCrystal,
}

impl DiskCrystal {
    fn as_crystal(&self) -> certify::Crystal {
        certify::Crystal::Disk(self.inner.clone())
    }
}

#[pymethods]
impl DiskCrystal {
    /// Validated crystal with inclusion radius `radius`, buffer radius
    /// `buffer > radius`, `n_disks` inclusions, and optional explicit
    /// `centers` (required by the oracle when `n_disks > 1`).
    #[new]
    #[pyo3(signature = (radius, buffer, n_disks = 1, dimension = 2, centers = None))]
    fn new(
        radius: f64,
        buffer: f64,
        n_disks: u32,
        dimension: u32,
        centers: Option<Vec<Vec<f64>>>,
    ) -> PyResult<Self> {
        Ok(DiskCrystal {
            inner: certify::DiskCrystal::new(n_disks, radius, buffer, dimension, centers)
                .map_err(to_py_err)?,
        })
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }
    #[getter]
    fn buffer(&self) -> f64 {
        self.inner.buffer
    }
    #[getter]
    fn n_disks(&self) -> u32 {
        self.inner.n_disks
    }
    #[getter]
    fn dimension(&self) -> u32 {
        self.inner.dimension
    }
    #[getter]
    fn centers(&self) -> Option<Vec<Vec<f64>>> {
        self.inner.centers.clone()
    }

    /// Dispersion bound `theta` of this geometry.
    fn theta(&self) -> PyResult<f64> {
        bounds_mod::theta_disks(self.inner.radius, self.inner.buffer).map_err(to_py_err)
    }

    /// Assemble the high-contrast limit spectra (`n_max`/`k_max` Dirichlet
    /// mode cutoffs, `j_max` spectral-function roots, optional explicit
    /// series `truncation`).
    #[pyo3(signature = (n_max = 6, k_max = 6, j_max = 4, truncation = None))]
    fn limit_spectra(
        &self,
        n_max: u32,
        k_max: u32,
        j_max: u32,
        truncation: Option<u32>,
    ) -> PyResult<LimitSpectra> {
        let inner = match truncation {
            Some(t) => {
                spectra_mod::assemble_limit_spectra_with(&self.inner, n_max, k_max, j_max, t)
            }
            None => spectra_mod::assemble_limit_spectra(&self.inner, n_max, k_max, j_max),
        }
        .map_err(to_py_err)?;
        Ok(LimitSpectra { inner })
    }

    /// Certify the band gap above `delta*_j`.
    #[pyo3(signature = (spectra, j = 1, variant = "canonical"))]
    fn certify_gap(
        &self,
        spectra: PyRef<'_, LimitSpectra>,
        j: u32,
        variant: &str,
    ) -> PyResult<GapCertificate> {
        let variant = certify::Variant::parse(variant).map_err(to_py_err)?;
        let inner = certify::certify_gap(&self.as_crystal(), &spectra.inner, j, variant)
            .map_err(to_py_err)?;
        Ok(GapCertificate { inner })
    }

    /// Certify the passband reaching up toward `delta*_j`.
    #[pyo3(signature = (spectra, j = 1, variant = "canonical"))]
    fn certify_passband(
        &self,
        spectra: PyRef<'_, LimitSpectra>,
        j: u32,
        variant: &str,
    ) -> PyResult<PassbandCertificate> {
        let variant = certify::Variant::parse(variant).map_err(to_py_err)?;
        let inner = certify::certify_passband(&self.as_crystal(), &spectra.inner, j, variant)
            .map_err(to_py_err)?;
        Ok(PassbandCertificate { inner })
    }

    /// Smallest `m` discrete Bloch eigenvalues at contrast `k` on an
    /// `n`-grid. `bc` selects the boundary condition: `"quasi"` (requires
    /// `alpha`), `"periodic"` (zero-mean), or `"neumann"` (zero-mean).
    /// `dual=True` solves the `1/k`-normalized twin.
    #[pyo3(signature = (k, alpha = None, m = 6, n = 32, bc = "quasi", dual = false))]
    #[allow(clippy::too_many_arguments)]
    fn bloch_eigenvalues(
        &self,
        k: f64,
        alpha: Option<Vec<f64>>,
        m: usize,
        n: usize,
        bc: &str,
        dual: bool,
    ) -> PyResult<Vec<f64>> {
        let condition = match bc {
            "quasi" => oracle::BoundaryCondition::QuasiPeriodic(alpha.ok_or_else(|| {
                PyValueError::new_err("bc='quasi' requires an alpha vector")
            })?),
            "periodic" => oracle::BoundaryCondition::PeriodicZeroMean,
            "neumann" => oracle::BoundaryCondition::NeumannZeroMean,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown boundary condition '{other}' (quasi|periodic|neumann)"
                )))
            }
        };
        let field =
            oracle::CoefficientField::from_crystal(&self.inner, k, n, dual).map_err(to_py_err)?;
        let problem = oracle::BlochProblem::new(field, condition, m).map_err(to_py_err)?;
        let op = oracle::assemble_operator(&problem).map_err(to_py_err)?;
        Ok(oracle::eigen_solve(&op, m).map_err(to_py_err)?.eigenvalues)
    }

    /// Sweep the Bloch spectrum over a quasi-momentum grid (defaults to the
    /// zone-boundary path plus interior guards). Returns a dictionary with
    /// the eigenvalue tables, Richardson margins, band ranges, and detected
    /// gaps.
    #[pyo3(signature = (k, alphas = None, m = 6, n = 32))]
    fn band_sweep(
        &self,
        py: Python<'_>,
        k: f64,
        alphas: Option<Vec<Vec<f64>>>,
        m: usize,
        n: usize,
    ) -> PyResult<Py<PyAny>> {
        let grid =
            alphas.unwrap_or_else(|| oracle::default_alpha_grid(self.inner.dimension));
        let band = oracle::band_sweep(&self.inner, k, &grid, m, n).map_err(to_py_err)?;
        let dict = PyDict::new(py);
        dict.set_item("contrast", band.contrast)?;
        dict.set_item("resolution", band.resolution)?;
        dict.set_item("alphas", band.alphas.clone())?;
        dict.set_item("table", band.table.clone())?;
        dict.set_item("coarse_table", band.coarse_table.clone())?;
        dict.set_item("margins", band.margins.clone())?;
        dict.set_item("bands", band.bands.clone())?;
        let gaps: Vec<Bound<'_, PyAny>> = band
            .gaps
            .iter()
            .map(|g| -> PyResult<Bound<'_, PyAny>> {
                let entry = PyDict::new(py);
                entry.set_item("below_band", g.below_band)?;
                entry.set_item("lower", g.lower)?;
                entry.set_item("upper", g.upper)?;
                entry.set_item("width", g.width)?;
                entry.set_item("margin", g.margin)?;
                Ok(entry.into_any())
            })
            .collect::<PyResult<_>>()?;
        dict.set_item("gaps", PyList::new(py, gaps)?)?;
        Ok(dict.into_any().unbind())
    }

    /// Zero-mean Neumann eigenvalues with Richardson margins:
    /// `{"eigenvalues", "margins"}`.
    #[pyo3(signature = (k, m = 6, n = 32))]
    fn neumann_eigenvalues(
        &self,
        py: Python<'_>,
        k: f64,
        m: usize,
        n: usize,
    ) -> PyResult<Py<PyAny>> {
        let data = oracle::neumann_eigenvalues(&self.inner, k, m, n).map_err(to_py_err)?;
        let dict = PyDict::new(py);
        dict.set_item("contrast", data.contrast)?;
        dict.set_item("resolution", data.resolution)?;
        dict.set_item("eigenvalues", data.eigenvalues.clone())?;
        dict.set_item("margins", data.margins.clone())?;
        Ok(dict.into_any().unbind())
    }

    /// Verify a gap certificate against a fresh brute-force sweep at
    /// contrast `k` (grid `n`, `m` bands, optional explicit `alphas`).
    /// Returns the check-by-check report dictionary; `anchor` sets the
    /// contrast of the exact discrete ceiling rows.
    #[pyo3(signature = (cert, spectra, k, m = 6, n = 32, alphas = None,
                        anchor = oracle::DEFAULT_CEILING_CONTRAST))]
    #[allow(clippy::too_many_arguments)]
    fn verify_gap(
        &self,
        py: Python<'_>,
        cert: PyRef<'_, GapCertificate>,
        spectra: PyRef<'_, LimitSpectra>,
        k: f64,
        m: usize,
        n: usize,
        alphas: Option<Vec<Vec<f64>>>,
        anchor: f64,
    ) -> PyResult<Py<PyAny>> {
        let grid =
            alphas.unwrap_or_else(|| oracle::default_alpha_grid(self.inner.dimension));
        let band = oracle::band_sweep(&self.inner, k, &grid, m, n).map_err(to_py_err)?;
        let neumann = oracle::neumann_eigenvalues(&self.inner, k, m, n).map_err(to_py_err)?;
        let ceiling = oracle::contrast_ceiling(&self.inner, anchor, m, n).map_err(to_py_err)?;
        let report =
            oracle::verify_certificate(&cert.inner, &spectra.inner, &band, &neumann, &ceiling)
                .map_err(to_py_err)?;
        Ok(json_to_py(py, &report.to_json())?.unbind())
    }

    /// Exact `1/k` reciprocity and homogeneity check at contrast `k`:
    /// `{"max_rel_eigen_dev", "matrix_identity_dev", "homogeneity_dev",
    /// "ok"}`. Keep `n` dense-solver friendly.
    #[pyo3(signature = (k, alphas, m = 4, n = 16))]
    fn reciprocal_check(
        &self,
        py: Python<'_>,
        k: f64,
        alphas: Vec<Vec<f64>>,
        m: usize,
        n: usize,
    ) -> PyResult<Py<PyAny>> {
        let report =
            oracle::reciprocal_check(&self.inner, k, &alphas, m, n).map_err(to_py_err)?;
        let dict = PyDict::new(py);
        dict.set_item("k", report.k)?;
        dict.set_item("resolution", report.resolution)?;
        dict.set_item("max_rel_eigen_dev", report.max_rel_eigen_dev)?;
        dict.set_item("matrix_identity_dev", report.matrix_identity_dev)?;
        dict.set_item("homogeneity_dev", report.homogeneity_dev)?;
        dict.set_item("ok", report.ok)?;
        Ok(dict.into_any().unbind())
    }

    fn __repr__(&self) -> String {
        format!(
            "DiskCrystal(radius={}, buffer={}, n_disks={}, dimension={})",
            self.inner.radius, self.inner.buffer, self.inner.n_disks, self.inner.dimension
        )
    }
}

// ============================================================================
// Module
// ============================================================================

/// Band-gap certification for high-contrast periodic media.
#[pymodule]
fn bandcert_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VERSION", bandcert::VERSION)?;
    m.add_class::<DiskCrystal>()?;
    m.add_class::<LimitSpectra>()?;
    m.add_class::<GapCertificate>()?;
    m.add_class::<PassbandCertificate>()?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j_prime, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_zero, m)?)?;
    m.add_function(wrap_pyfunction!(theta_disks, m)?)?;
    m.add_function(wrap_pyfunction!(resonance_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_radius, m)?)?;
    m.add_function(wrap_pyfunction!(series_error_bound, m)?)?;
    m.add_function(wrap_pyfunction!(default_alpha_grid, m)?)?;
    Ok(())
}
