//! Run configuration: TOML grammar, loading, validation, hashing.
//!
//! A run is described by one TOML file with up to five sections —
//! `[geometry]`, `[spectra]`, `[certify]`, `[oracle]`, `[output]` — all but
//! the geometry optional. Paths referenced by a `general` geometry are
//! resolved relative to the config file, so a run directory can be moved
//! wholesale. The SHA-256 of the raw config bytes is carried into every
//! emitted certificate.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use bandcert::certify::{Crystal, DiskCrystal, GeneralCrystal, Variant};
use bandcert::limit_spectra::MeanClass;

use crate::CliError;

/// Geometry section, tagged by `kind = "disk" | "general"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryConfig {
    /// Disk/ball crystal with analytically known limit spectra.
    Disk {
        /// Inclusions per period cell.
        #[serde(default = "default_one")]
        n_disks: u32,
        /// Inclusion radius `a` in cell units.
        radius: f64,
        /// Buffer radius `b > a`.
        buffer: f64,
        /// Spatial dimension, 2 or 3.
        #[serde(default = "default_dimension")]
        dimension: u32,
        /// Inclusion centers; required for `n_disks > 1`.
        centers: Option<Vec<Vec<f64>>>,
    },
    /// User-supplied geometry: dispersion constant plus spectra files.
    General {
        /// Dispersion bound `theta` of the geometry.
        theta: f64,
        /// Spatial dimension, 2 or 3.
        #[serde(default = "default_dimension")]
        dimension: u32,
        /// CSV with header `value,mean_class`; `mean_class` is
        /// `nonzero_mean` or `zero_mean`.
        sigma_dirichlet: PathBuf,
        /// CSV with header `value`.
        sigma_n: PathBuf,
    },
}

fn default_one() -> u32 {
    1
}

fn default_dimension() -> u32 {
    2
}

/// Limit-spectra cutoffs.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectraConfig {
    /// Largest Bessel order in the Dirichlet table.
    pub n_max: u32,
    /// Largest radial index per order.
    pub k_max: u32,
    /// Number of spectral-function roots.
    pub j_max: u32,
    /// Spectral-function series truncation `K`.
    pub truncation: u32,
}

impl Default for SpectraConfig {
    fn default() -> Self {
        SpectraConfig { n_max: 6, k_max: 6, j_max: 4, truncation: 200 }
    }
}

/// Certification requests.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    /// Band indices `j` to certify (both gap above and passband around).
    pub bands: Vec<u32>,
    /// Radius variant: `canonical` or `paper-literal`.
    pub variant: String,
    /// Contrasts at which certified intervals are tabulated.
    pub k: Vec<f64>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { bands: vec![1], variant: "canonical".into(), k: vec![1e4] }
    }
}

/// Quasi-momentum grid: the built-in zone path or an explicit list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    /// `"default"`: arc-length samples on the zone-boundary path plus an
    /// interior guard grid.
    Named(String),
    /// Explicit α samples, each of the geometry's dimension.
    Explicit(Vec<Vec<f64>>),
}

/// Brute-force oracle settings.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Grid resolution per axis (even; the Richardson companion is half).
    pub grid: usize,
    /// Number of eigenvalues per α.
    pub m: usize,
    /// Contrasts to sweep/verify at.
    pub k: Vec<f64>,
    /// α grid specification.
    pub alpha: AlphaSpec,
    /// Work in the dual (`1/k`-scaled) normalization.
    pub dual: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid: 32,
            m: 6,
            k: vec![1e3],
            alpha: AlphaSpec::Named("default".into()),
            dual: false,
        }
    }
}

/// Output destination.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Directory all artifacts are written into (created if missing).
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

/// A full parsed run configuration.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Geometry section (required).
    pub geometry: GeometryConfig,
    /// Limit-spectra cutoffs.
    #[serde(default)]
    pub spectra: SpectraConfig,
    /// Certification requests.
    #[serde(default)]
    pub certify: CertifyConfig,
    /// Oracle settings.
    #[serde(default)]
    pub oracle: OracleConfig,
    /// Output destination.
    #[serde(default)]
    pub output: OutputConfig,
}

/// A loaded configuration: parsed content, provenance hash, base directory
/// for relative paths.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    /// Parsed configuration.
    pub run: RunConfig,
    /// Lowercase-hex SHA-256 of the raw config bytes.
    pub sha256: String,
    /// Directory of the config file (anchor for relative paths).
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    /// Read, parse, and validate a config file.
    pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
        let bytes = fs::read(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let run: RunConfig = toml::from_str(&String::from_utf8_lossy(&bytes))
            .map_err(|e| CliError::Validation(format!("config parse error: {e}")))?;
        let sha256 = hex(&Sha256::digest(&bytes));
        let base_dir =
            path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        let loaded = LoadedConfig { run, sha256, base_dir };
        loaded.validate()?;
        Ok(loaded)
    }

    /// Re-run validation after command-line overrides were applied.
    pub fn revalidate(&self) -> Result<(), CliError> {
        self.validate()
    }

    /// Structural validation beyond what serde enforces.
    fn validate(&self) -> Result<(), CliError> {
        let cfg = &self.run;
        if cfg.spectra.j_max == 0 || cfg.spectra.k_max == 0 {
            return Err(CliError::Validation(
                "[spectra] cutoffs j_max and k_max must be positive".into(),
            ));
        }
        if cfg.certify.bands.is_empty() {
            return Err(CliError::Validation("[certify] bands must be nonempty".into()));
        }
        if cfg.certify.bands.iter().any(|&j| j == 0) {
            return Err(CliError::Validation("[certify] band indices are 1-based".into()));
        }
        for &k in &cfg.certify.k {
            if !(k > 1.0) {
                return Err(CliError::Validation(format!(
                    "[certify] contrast values must exceed 1, got {k}"
                )));
            }
        }
        // The oracle also accepts the homogeneous medium k = 1 (useful as a
        // no-gap sanity sweep); certification itself needs k > 1.
        for &k in &cfg.oracle.k {
            if !(k >= 1.0) {
                return Err(CliError::Validation(format!(
                    "[oracle] contrast values must be at least 1, got {k}"
                )));
            }
        }
        if cfg.oracle.grid < 16 || cfg.oracle.grid % 2 != 0 {
            return Err(CliError::Validation(format!(
                "[oracle] grid must be even and at least 16, got {}",
                cfg.oracle.grid
            )));
        }
        if cfg.oracle.m == 0 {
            return Err(CliError::Validation("[oracle] m must be positive".into()));
        }
        if let AlphaSpec::Named(name) = &cfg.oracle.alpha {
            if name != "default" {
                return Err(CliError::Validation(format!(
                    "unknown alpha grid '{name}' (use \"default\" or an explicit list)"
                )));
            }
        }
        Variant::parse(&cfg.certify.variant)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        // Geometry invariants (and referenced files) check out.
        self.crystal().map(|_| ())
    }

    /// The requested radius variant.
    pub fn variant(&self) -> Variant {
        Variant::parse(&self.run.certify.variant).expect("validated at load")
    }

    /// Build the crystal described by the geometry section.
    pub fn crystal(&self) -> Result<Crystal, CliError> {
        match &self.run.geometry {
            GeometryConfig::Disk { n_disks, radius, buffer, dimension, centers } => {
                let disk = DiskCrystal::new(
                    *n_disks,
                    *radius,
                    *buffer,
                    *dimension,
                    centers.clone(),
                )
                .map_err(CliError::from)?;
                Ok(Crystal::Disk(disk))
            }
            GeometryConfig::General { theta, dimension, sigma_dirichlet, sigma_n } => {
                let dirichlet = read_dirichlet_csv(&self.resolve(sigma_dirichlet))?;
                let nlist = read_sigma_n_csv(&self.resolve(sigma_n))?;
                let general = GeneralCrystal::new(*theta, *dimension, dirichlet, nlist)
                    .map_err(CliError::from)?;
                Ok(Crystal::General(general))
            }
        }
    }

    /// α grid for the given dimension.
    pub fn alpha_grid(&self, dimension: u32) -> Result<Vec<Vec<f64>>, CliError> {
        match &self.run.oracle.alpha {
            AlphaSpec::Named(_) => Ok(bandcert::bloch_oracle::default_alpha_grid(dimension)),
            AlphaSpec::Explicit(list) => {
                if list.is_empty() {
                    return Err(CliError::Validation("alpha list is empty".into()));
                }
                for alpha in list {
                    if alpha.len() != dimension as usize {
                        return Err(CliError::Validation(format!(
                            "alpha sample {alpha:?} is not {dimension}-dimensional"
                        )));
                    }
                }
                Ok(list.clone())
            }
        }
    }

    /// Resolve a path from the geometry section against the config location.
    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

// ============================================================================
// Spectra file readers
// ============================================================================

fn read_dirichlet_csv(path: &Path) -> Result<Vec<(f64, MeanClass)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read {}: {e}", path.display()))
    })?;
    let mut lines = text.lines();
    match lines.next() {
        Some("value,mean_class") => {}
        other => {
            return Err(CliError::Validation(format!(
                "{}: expected header 'value,mean_class', got {other:?}",
                path.display()
            )))
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (value, class) = line.split_once(',').ok_or_else(|| {
            CliError::Validation(format!("{}: line {}: missing comma", path.display(), i + 2))
        })?;
        let value: f64 = value.trim().parse().map_err(|e| {
            CliError::Validation(format!("{}: line {}: {e}", path.display(), i + 2))
        })?;
        let class = match class.trim() {
            "nonzero_mean" => MeanClass::NonzeroMean,
            "zero_mean" => MeanClass::ZeroMean,
            other => {
                return Err(CliError::Validation(format!(
                    "{}: line {}: unknown mean class '{other}'",
                    path.display(),
                    i + 2
                )))
            }
        };
        out.push((value, class));
    }
    Ok(out)
}

fn read_sigma_n_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read {}: {e}", path.display()))
    })?;
    let mut lines = text.lines();
    match lines.next() {
        Some("value") => {}
        other => {
            return Err(CliError::Validation(format!(
                "{}: expected header 'value', got {other:?}",
                path.display()
            )))
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: f64 = line.trim().parse().map_err(|e| {
            CliError::Validation(format!("{}: line {}: {e}", path.display(), i + 2))
        })?;
        out.push(value);
    }
    Ok(out)
}
