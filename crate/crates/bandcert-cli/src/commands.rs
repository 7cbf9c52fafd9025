//! Subcommand implementations.
//!
//! Every command loads the geometry from the validated config, produces its
//! artifacts under the output directory, and prints one `wrote <path>` line
//! per file. All JSON artifacts carry a `meta` object with the SHA-256 of
//! the config file and the component versions; JSON keys are emitted sorted
//! and floats in shortest round-trip form, so identical configs yield
//! byte-identical outputs.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use bandcert::bloch_oracle::{
    band_csv, band_json, band_sweep, contrast_ceiling, neumann_eigenvalues,
    reciprocal_check, verify_certificate, BandData, DEFAULT_CEILING_CONTRAST,
};
use bandcert::certify::{
    certify_gap, certify_passband, dual_certificate, Certificate, Crystal, DiskCrystal,
    GapCertificate,
};
use bandcert::limit_spectra::{
    assemble_limit_spectra_with, entries_to_csv, interlacing_check, spectra_to_json,
    LimitSpectra,
};

use crate::config::{AlphaSpec, LoadedConfig};
use crate::svg::{BandDiagram, PathTick};
use crate::CliError;

/// Which certificate frames `certify` should emit.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum DualEmission {
    /// Primal only.
    No,
    /// Primal and dual.
    Also,
    /// Dual only (the `dual` subcommand).
    Only,
}

// ============================================================================
// Shared helpers
// ============================================================================

fn prepare_out_dir(cfg: &LoadedConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.run.output.dir.clone();
    fs::create_dir_all(&dir).map_err(|e| {
        CliError::Validation(format!("cannot create output dir {}: {e}", dir.display()))
    })?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| {
        CliError::Validation(format!("cannot write {}: {e}", path.display()))
    })?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    write_text(path, &format!("{value:#}\n"))
}

fn meta(cfg: &LoadedConfig) -> Value {
    json!({
        "config_sha256": cfg.sha256,
        "versions": {
            "bandcert": bandcert::VERSION,
            "bandcert-cli": env!("CARGO_PKG_VERSION"),
        },
    })
}

fn with_meta(mut value: Value, cfg: &LoadedConfig) -> Value {
    if let Value::Object(map) = &mut value {
        map.insert("meta".into(), meta(cfg));
    }
    value
}

fn limit_spectra_for(cfg: &LoadedConfig, crystal: &Crystal) -> Result<LimitSpectra, CliError> {
    match crystal {
        Crystal::Disk(disk) => {
            let s = &cfg.run.spectra;
            Ok(assemble_limit_spectra_with(disk, s.n_max, s.k_max, s.j_max, s.truncation)?)
        }
        Crystal::General(g) => Ok(g.to_limit_spectra()),
    }
}

fn require_disk(crystal: &Crystal) -> Result<DiskCrystal, CliError> {
    match crystal {
        Crystal::Disk(d) => Ok(d.clone()),
        Crystal::General(_) => Err(CliError::Validation(
            "this command sweeps the microstructure directly; a general geometry \
             carries only its limit spectra, use a disk geometry"
                .into(),
        )),
    }
}

fn requested_bands(cfg: &LoadedConfig) -> Vec<u32> {
    let mut bands = cfg.run.certify.bands.clone();
    bands.sort_unstable();
    bands.dedup();
    bands
}

fn gap_certificates(
    cfg: &LoadedConfig,
    crystal: &Crystal,
    spectra: &LimitSpectra,
) -> Result<Vec<GapCertificate>, CliError> {
    requested_bands(cfg)
        .iter()
        .map(|&j| {
            certify_gap(crystal, spectra, j, cfg.variant())
                .map_err(|e| CliError::from(e).context(&format!("gap certificate j = {j}")))
        })
        .collect()
}

/// Filename fragment for a contrast value (shortest float form; always a
/// valid path component).
fn k_tag(k: f64) -> String {
    format!("{k}")
}

// ============================================================================
// spectra
// ============================================================================

/// Compute the limit spectra and export CSV/JSON plus the interlacing
/// report.
pub fn cmd_spectra(cfg: &LoadedConfig) -> Result<(), CliError> {
    let out = prepare_out_dir(cfg)?;
    let crystal = cfg.crystal()?;
    let spectra = limit_spectra_for(cfg, &crystal)?;
    let report = interlacing_check(&spectra);

    write_text(&out.join("sigma_dirichlet.csv"), &entries_to_csv(&spectra.sigma_dirichlet))?;
    write_text(&out.join("sigma_N.csv"), &entries_to_csv(&spectra.sigma_n))?;
    write_json(&out.join("spectra.json"), &with_meta(spectra_to_json(&spectra), cfg))?;
    let interlacing = json!({
        "ok": report.ok,
        "windows_checked": report.windows_checked,
        "violations": report.violations,
    });
    write_json(&out.join("interlacing.json"), &with_meta(interlacing, cfg))?;
    println!(
        "interlacing: {} ({} windows checked)",
        if report.ok { "ok" } else { "VIOLATED" },
        report.windows_checked
    );
    if !report.ok {
        return Err(CliError::Numerical(
            "interlacing violated; see interlacing.json for details".into(),
        ));
    }
    Ok(())
}

// ============================================================================
// certify / dual
// ============================================================================

/// Emit one gap and one passband certificate per requested band index, with
/// interval tables over the configured contrasts; optionally their
/// dual-frame twins.
pub fn cmd_certify(cfg: &LoadedConfig, emission: DualEmission) -> Result<(), CliError> {
    let out = prepare_out_dir(cfg)?;
    let crystal = cfg.crystal()?;
    let spectra = limit_spectra_for(cfg, &crystal)?;
    let variant = cfg.variant();
    let k_list = &cfg.run.certify.k;

    for &j in &requested_bands(cfg) {
        let gap = certify_gap(&crystal, &spectra, j, variant)
            .map_err(|e| CliError::from(e).context(&format!("gap certificate j = {j}")))?;
        let passband = certify_passband(&crystal, &spectra, j, variant).map_err(|e| {
            CliError::from(e).context(&format!("passband certificate j = {j}"))
        })?;
        for (kind, cert) in
            [("gap", Certificate::Gap(gap)), ("passband", Certificate::Passband(passband))]
        {
            if emission != DualEmission::Only {
                let path = out.join(format!("certificate_{kind}_j{j}.json"));
                write_json(&path, &with_meta(cert.to_json(k_list), cfg))?;
                println!(
                    "certificate {kind} j = {j}: applicable for k > {}",
                    cert.k_threshold()
                );
            }
            if emission != DualEmission::No {
                // The dual twin needs one applicable contrast to anchor the
                // frame flip; take the first configured contrast above the
                // threshold.
                let k_dual = k_list
                    .iter()
                    .copied()
                    .find(|&k| k > cert.k_threshold())
                    .ok_or_else(|| {
                        CliError::Validation(format!(
                            "dual {kind} certificate j = {j}: every configured contrast \
                             is at or below the threshold {}",
                            cert.k_threshold()
                        ))
                    })?;
                let dual = dual_certificate(&cert, k_dual)?;
                let path = out.join(format!("certificate_{kind}_j{j}_dual.json"));
                write_json(&path, &with_meta(dual.to_json(k_list), cfg))?;
            }
        }
    }
    Ok(())
}

// ============================================================================
// bands
// ============================================================================

/// Scale every eigenvalue-valued field of a band sweep (dual frame).
fn scale_band(mut band: BandData, factor: f64) -> BandData {
    for row in band.table.iter_mut().chain(band.coarse_table.iter_mut()) {
        for v in row.iter_mut() {
            *v *= factor;
        }
    }
    for m in band.margins.iter_mut() {
        *m *= factor;
    }
    for (lo, hi) in band.bands.iter_mut() {
        *lo *= factor;
        *hi *= factor;
    }
    for gap in band.gaps.iter_mut() {
        gap.lower *= factor;
        gap.upper *= factor;
        gap.width *= factor;
        gap.margin *= factor;
    }
    band
}

/// Arc length of the built-in zone-boundary path.
fn path_length(dimension: u32) -> f64 {
    match dimension {
        3 => (3.0 + 3.0_f64.sqrt()) * PI,
        _ => (2.0 + 2.0_f64.sqrt()) * PI,
    }
}

/// High-symmetry-point ticks of the built-in path.
fn path_ticks(dimension: u32) -> Vec<PathTick> {
    let total = path_length(dimension);
    match dimension {
        3 => vec![
            PathTick { position: 0.0, label: "Γ".into() },
            PathTick { position: PI, label: "X".into() },
            PathTick { position: 2.0 * PI, label: "M".into() },
            PathTick { position: 3.0 * PI, label: "R".into() },
            PathTick { position: total, label: "Γ".into() },
        ],
        _ => vec![
            PathTick { position: 0.0, label: "Γ".into() },
            PathTick { position: PI, label: "X".into() },
            PathTick { position: 2.0 * PI, label: "M".into() },
            PathTick { position: total, label: "Γ".into() },
        ],
    }
}

/// Build the SVG band diagram for one sweep.
///
/// With the built-in grid only the boundary-path samples are plotted (the
/// interior guard samples have no natural abscissa) and the path is closed
/// back to Γ; explicit grids are plotted in listed order against the sample
/// index.
fn render_band_svg(
    band: &BandData,
    default_grid: bool,
    dimension: u32,
    intervals: &[(f64, f64)],
    dual: bool,
    k: f64,
) -> String {
    let m = band.table.first().map(Vec::len).unwrap_or(0);
    const PATH_SAMPLES: usize = 16;
    let (positions, ticks, rows): (Vec<f64>, Vec<PathTick>, Vec<usize>) =
        if default_grid && band.table.len() > PATH_SAMPLES {
            let total = path_length(dimension);
            let mut positions: Vec<f64> = (0..PATH_SAMPLES)
                .map(|i| i as f64 * total / PATH_SAMPLES as f64)
                .collect();
            positions.push(total);
            let mut rows: Vec<usize> = (0..PATH_SAMPLES).collect();
            rows.push(0);
            (positions, path_ticks(dimension), rows)
        } else {
            let count = band.table.len();
            let step = count.div_ceil(8).max(1);
            let ticks = (0..count)
                .step_by(step)
                .map(|i| PathTick { position: i as f64, label: format!("{i}") })
                .collect();
            ((0..count).map(|i| i as f64).collect(), ticks, (0..count).collect())
        };
    let curves: Vec<Vec<f64>> = (0..m)
        .map(|j| rows.iter().map(|&i| band.table[i][j]).collect())
        .collect();
    BandDiagram {
        positions,
        curves,
        intervals: intervals.to_vec(),
        ticks,
        y_label: if dual { "eigenvalue (dual frame, 1/k-scaled)".into() } else { "eigenvalue".into() },
        title: format!("Bloch bands at k = {k}{}", if dual { " (dual)" } else { "" }),
    }
    .render()
}

/// Sweep the Bloch bands at every configured contrast and export CSV, JSON,
/// and an SVG band diagram with certified intervals shaded.
pub fn cmd_bands(cfg: &LoadedConfig) -> Result<(), CliError> {
    let out = prepare_out_dir(cfg)?;
    let crystal = cfg.crystal()?;
    let disk = require_disk(&crystal)?;
    let spectra = limit_spectra_for(cfg, &crystal)?;
    let alpha_grid = cfg.alpha_grid(disk.dimension)?;
    let default_grid = matches!(cfg.run.oracle.alpha, AlphaSpec::Named(_));
    let oracle = &cfg.run.oracle;
    let gap_certs = gap_certificates(cfg, &crystal, &spectra)?;

    for &k in &oracle.k {
        let mut band = band_sweep(&disk, k, &alpha_grid, oracle.m, oracle.grid)?;
        let factor = if oracle.dual { 1.0 / k } else { 1.0 };
        if oracle.dual {
            band = scale_band(band, factor);
        }
        // Certified intervals that apply at this contrast; below-threshold
        // certificates simply contribute no shading.
        let intervals: Vec<(f64, f64)> = gap_certs
            .iter()
            .filter_map(|c| c.gap_interval(k).ok())
            .map(|(lo, hi)| (lo * factor, hi * factor))
            .collect();

        let tag = k_tag(k);
        let suffix = if oracle.dual { "_dual" } else { "" };
        write_text(&out.join(format!("bands_k{tag}{suffix}.csv")), &band_csv(&band))?;

        let mut band_summary = band_json(&band);
        if let Value::Object(map) = &mut band_summary {
            map.insert("dual".into(), oracle.dual.into());
            map.insert(
                "certified_gaps".into(),
                Value::Array(
                    intervals.iter().map(|&(lo, hi)| json!({"lower": lo, "upper": hi})).collect(),
                ),
            );
        }
        write_json(
            &out.join(format!("bands_k{tag}{suffix}.json")),
            &with_meta(band_summary, cfg),
        )?;

        let svg = render_band_svg(&band, default_grid, disk.dimension, &intervals, oracle.dual, k);
        write_text(&out.join(format!("bands_k{tag}{suffix}.svg")), &svg)?;
        println!(
            "bands at k = {k}: {} gap(s) observed, {} certified interval(s) shaded",
            band.gaps.len(),
            intervals.len()
        );
    }
    Ok(())
}

// ============================================================================
// verify
// ============================================================================

/// Verify every requested gap certificate against the brute-force oracle at
/// every configured contrast, plus the exact `1/k` reciprocity check; write
/// one aggregated JSON report.
pub fn cmd_verify(cfg: &LoadedConfig) -> Result<(), CliError> {
    let out = prepare_out_dir(cfg)?;
    let crystal = cfg.crystal()?;
    let disk = require_disk(&crystal)?;
    let spectra = limit_spectra_for(cfg, &crystal)?;
    let alpha_grid = cfg.alpha_grid(disk.dimension)?;
    let oracle = &cfg.run.oracle;
    let gap_certs = gap_certificates(cfg, &crystal, &spectra)?;

    // Reciprocity is an algebraic identity checked densely: a couple of
    // α samples at a dense-solver-friendly resolution suffice.
    let reciprocal_alphas: Vec<Vec<f64>> = {
        let mut picks = Vec::new();
        if alpha_grid.len() > 1 {
            picks.push(alpha_grid[1].clone());
        }
        picks.push(alpha_grid[alpha_grid.len() / 2].clone());
        picks
    };
    let reciprocal_n = if disk.dimension == 2 { oracle.grid.min(32) } else { 8 };

    // Anchor rows for the discrete-ceiling allowances depend only on the
    // grid, not on the contrast under test; sample them once.
    let ceiling =
        contrast_ceiling(&disk, DEFAULT_CEILING_CONTRAST, oracle.m, oracle.grid)?;

    let mut all_pass = true;
    let mut runs = Vec::new();
    for &k in &oracle.k {
        let band = band_sweep(&disk, k, &alpha_grid, oracle.m, oracle.grid)?;
        let neumann = neumann_eigenvalues(&disk, k, oracle.m, oracle.grid)?;
        let reciprocal =
            reciprocal_check(&disk, k, &reciprocal_alphas, oracle.m.min(4), reciprocal_n)?;
        if !reciprocal.ok {
            all_pass = false;
        }

        let mut cert_reports = Vec::new();
        for cert in &gap_certs {
            let report = verify_certificate(cert, &spectra, &band, &neumann, &ceiling)?;
            let status = if !report.applicable {
                "inapplicable"
            } else if report.passed {
                "pass"
            } else {
                all_pass = false;
                "FAIL"
            };
            println!(
                "verify k = {k} gap j = {j}: {status} ({n} checks)",
                j = cert.j,
                n = report.checks.len()
            );
            cert_reports.push(json!({ "j": cert.j, "report": report.to_json() }));
        }
        println!(
            "verify k = {k} reciprocity: {} (eigen dev {:e}, matrix dev {:e})",
            if reciprocal.ok { "pass" } else { "FAIL" },
            reciprocal.max_rel_eigen_dev,
            reciprocal.matrix_identity_dev
        );
        runs.push(json!({
            "k": k,
            "certificates": cert_reports,
            "reciprocal": {
                "resolution": reciprocal.resolution,
                "max_rel_eigen_dev": reciprocal.max_rel_eigen_dev,
                "matrix_identity_dev": reciprocal.matrix_identity_dev,
                "homogeneity_dev": reciprocal.homogeneity_dev,
                "ok": reciprocal.ok,
            },
        }));
    }

    let aggregate = json!({
        "ceiling": {
            "contrast": ceiling.contrast,
            "resolution": ceiling.resolution,
            "alpha": ceiling.alpha,
            "quasi": ceiling.quasi,
            "neumann": ceiling.neumann,
        },
        "runs": runs,
        "passed": all_pass,
    });
    write_json(&out.join("verification.json"), &with_meta(aggregate, cfg))?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(
            "one or more applicable checks failed; see verification.json".into(),
        ))
    }
}
