#!/usr/bin/env python3
"""Smoke test for the `bandcert_py` extension module.

Builds nothing itself: run `cargo build -p bandcert-py` first, then

    python3 python/smoke_test.py

The script locates the compiled `libbandcert_py.so` under `target/`,
stages it in a temporary directory under the importable name
`bandcert_py.so`, and exercises the bound API end to end: special
functions, contraction bounds, limit spectra, gap/passband certificates
and their exact `1/k` duals, and the brute-force Bloch oracle including
a full five-check certificate verification.  Every checkpoint prints a
`PASS` line; any failure raises and exits nonzero.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent

PI = math.pi

# Frozen reference values for the canonical geometry a = 0.3, b = 0.45.
BESSEL_ZERO_0_1 = 2.404825557695773
DELTA_STAR_1 = 64.25762181051985
THETA = 0.3846153846153847
MU_STAR = -0.30769230769230765
Z_STAR = -0.23809523809523814
K_THRESHOLD_1 = 391.0972106177384
GAP_AT_1000 = (64.25762181051985, 75.49809652768754)


def load_module():
    """Stage the compiled cdylib as an importable `bandcert_py` module."""
    candidates = []
    for profile in ("debug", "release"):
        for stem in ("libbandcert_py.so", "libbandcert_py.dylib", "bandcert_py.dll"):
            candidates.append(REPO_ROOT / "target" / profile / stem)
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "error: no compiled extension found; run `cargo build -p bandcert-py` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="bandcert_py_"))
    suffix = ".pyd" if built.suffix == ".dll" else ".so"
    shutil.copy2(built, stage / f"bandcert_py{suffix}")
    sys.path.insert(0, str(stage))
    import bandcert_py  # noqa: E402  (path injected above)

    print(f"loaded {built} (version {bandcert_py.VERSION})")
    return bandcert_py


PASSED = 0


def check(name, condition, detail=""):
    global PASSED
    if not condition:
        raise AssertionError(f"{name}: {detail}" if detail else name)
    PASSED += 1
    print(f"PASS {name}" + (f": {detail}" if detail else ""))


def rel_close(a, b, tol):
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) <= tol * scale


def main():
    bc = load_module()

    # ------------------------------------------------------------------
    # Special functions
    # ------------------------------------------------------------------
    z0 = bc.bessel_zero(0, 1)
    check(
        "bessel_zero(0,1)",
        rel_close(z0, BESSEL_ZERO_0_1, 1e-12),
        f"{z0!r}",
    )
    check("bessel_j at its zero", abs(bc.bessel_j(0, z0)) < 1e-12)
    z11 = bc.bessel_zero(1, 1)
    check(
        "bessel_zero(1,1)",
        rel_close(z11, 3.831705970207512, 1e-12),
        f"{z11!r}",
    )
    check("bessel_j_prime(0,x) = -J1(x)", abs(bc.bessel_j_prime(0, 1.0) + bc.bessel_j(1, 1.0)) < 1e-15)

    # ------------------------------------------------------------------
    # Geometry and contraction bounds
    # ------------------------------------------------------------------
    crystal = bc.DiskCrystal(0.3, 0.45)
    theta = crystal.theta()
    check("theta(0.3, 0.45)", rel_close(theta, THETA, 1e-12), f"{theta!r}")
    check("theta_disks matches method", bc.theta_disks(0.3, 0.45) == theta)
    bounds = bc.resonance_bounds(theta)
    check(
        "resonance bounds",
        rel_close(bounds["mu_star"], MU_STAR, 1e-12)
        and rel_close(bounds["z_star"], Z_STAR, 1e-12)
        and bounds["rho"] == theta / 2.0,
        f"mu*={bounds['mu_star']!r}, z*={bounds['z_star']!r}",
    )
    try:
        bc.DiskCrystal(0.45, 0.3)
        raise AssertionError("inverted radii must be rejected")
    except ValueError:
        check("invalid geometry raises ValueError", True)

    r_star = bc.convergence_radius(PI**2, 2.0, theta)
    check("convergence radius in (0, 1)", 0.0 < r_star < 1.0, f"{r_star!r}")
    tail3 = bc.series_error_bound(3, r_star / 2.0, r_star, 2.0)
    tail4 = bc.series_error_bound(4, r_star / 2.0, r_star, 2.0)
    check("series tail decreases with order", tail3 > tail4 > 0.0)

    # ------------------------------------------------------------------
    # Limit spectra
    # ------------------------------------------------------------------
    spectra = crystal.limit_spectra()
    ds1 = spectra.delta_star(1)
    check("delta*_1 frozen value", rel_close(ds1, DELTA_STAR_1, 1e-12), f"{ds1!r}")
    check(
        "delta*_1 = (j_{0,1}/a)^2",
        rel_close(ds1, (z0 / 0.3) ** 2, 1e-12),
    )
    dirichlet = spectra.sigma_dirichlet()
    check(
        "sigma_dirichlet entries",
        dirichlet[0]["value"] == ds1
        and dirichlet[0]["provenance"] == "dirichlet_nonzero_mean"
        and all(e["value"] > 0 for e in dirichlet)
        and all(
            dirichlet[i]["value"] < dirichlet[i + 1]["value"]
            for i in range(len(dirichlet) - 1)
        ),
        f"{len(dirichlet)} entries, first {dirichlet[0]['value']!r}",
    )
    sigma_n = spectra.sigma_n()
    tags = {e["provenance"] for e in sigma_n}
    check(
        "sigma_N provenance tags",
        tags <= {"dirichlet_zero_mean", "root_of_S"} and "root_of_S" in tags,
        f"{sorted(tags)}",
    )
    check(
        "first sigma_N value sits in the first gap",
        ds1 < sigma_n[0]["value"] < spectra.delta_star(2),
        f"{sigma_n[0]['value']!r}",
    )
    inter = spectra.interlacing()
    check(
        "strict interlacing",
        inter["ok"] and not inter["violations"] and inter["windows_checked"] > 0,
        f"{inter['windows_checked']} windows",
    )
    check("spectra JSON round-trips", '"sigma_dirichlet"' in spectra.to_json())

    # ------------------------------------------------------------------
    # Gap certificate and exact dual
    # ------------------------------------------------------------------
    cert = crystal.certify_gap(spectra)
    check(
        "gap threshold frozen value",
        cert.j == 1
        and cert.variant == "canonical"
        and not cert.dual
        and rel_close(cert.k_threshold, K_THRESHOLD_1, 1e-12),
        f"k_threshold={cert.k_threshold!r}",
    )
    gap = cert.gap_interval(1000.0)
    check(
        "gap interval at k = 1000",
        rel_close(gap[0], GAP_AT_1000[0], 1e-12)
        and rel_close(gap[1], GAP_AT_1000[1], 1e-12),
        f"{gap!r}",
    )
    try:
        cert.gap_interval(100.0)
        raise AssertionError("below-threshold interval must be rejected")
    except ValueError:
        check("below-threshold k raises ValueError", True)

    dual = cert.dual_at(1000.0)
    dgap = dual.gap_interval(1000.0)
    check(
        "dual endpoints are exactly primal / k",
        dual.dual
        and dgap[0] == gap[0] * (1.0 / 1000.0)
        and dgap[1] == gap[1] * (1.0 / 1000.0),
        f"{dgap!r}",
    )

    literal = crystal.certify_gap(spectra, variant="paper-literal")
    check(
        "paper-literal variant",
        literal.variant == "paper_literal"
        and 0.0 < literal.k_threshold < cert.k_threshold,
        f"k_threshold={literal.k_threshold!r}",
    )

    cert_dict = cert.to_dict([1000.0])
    row = cert_dict["interval_at"][0]
    check(
        "certificate dictionary",
        cert_dict["type"] == "gap"
        and row["status"] == "ok"
        and row["lower"] == gap[0]
        and row["upper"] == gap[1]
        and isinstance(cert_dict["warnings"], list)
        and rel_close(cert_dict["provenance"]["z_star"], Z_STAR, 1e-12),
    )

    # ------------------------------------------------------------------
    # Passband certificate
    # ------------------------------------------------------------------
    band_cert = crystal.certify_passband(spectra)
    band = band_cert.band_interval(1000.0)
    check(
        "passband below delta*_1",
        band_cert.nu_prev == 0.0 and band[0] == 0.0 and 0.0 < band[1] < ds1,
        f"{band!r}",
    )
    dband = band_cert.dual_at(1000.0).band_interval(1000.0)
    check(
        "dual passband scales exactly",
        dband[0] == band[0] * (1.0 / 1000.0) and dband[1] == band[1] * (1.0 / 1000.0),
    )

    # ------------------------------------------------------------------
    # Bloch oracle
    # ------------------------------------------------------------------
    grid = bc.default_alpha_grid(2)
    check(
        "default alpha grid",
        len(grid) == 25
        and grid[0] == [0.0, 0.0]
        and all(len(a) == 2 and all(-PI < x <= PI for x in a) for a in grid),
        f"{len(grid)} samples",
    )

    periodic = crystal.bloch_eigenvalues(1.0, bc="periodic", m=3, n=16)
    check(
        "homogeneous periodic zero-mean spectrum",
        30.0 < periodic[0] < 4.0 * PI**2
        and rel_close(periodic[0], periodic[1], 1e-9)
        and periodic == sorted(periodic),
        f"{periodic[0]!r} (continuum 4*pi^2 = {4.0 * PI ** 2:.6f})",
    )
    gamma = crystal.bloch_eigenvalues(1.0, alpha=[0.0, 0.0], m=3, n=16)
    check(
        "Gamma-point kernel deflation",
        gamma[0] == 0.0 and rel_close(gamma[1], periodic[0], 1e-9),
        f"{gamma!r}",
    )
    try:
        crystal.bloch_eigenvalues(1.0, bc="quasi", m=2, n=16)
        raise AssertionError("quasi bc without alpha must be rejected")
    except ValueError:
        check("quasi bc requires alpha", True)

    rc = crystal.reciprocal_check(50.0, [[PI / 3.0, -PI / 7.0]], m=3, n=16)
    check(
        "reciprocal 1/k duality",
        rc["ok"]
        and rc["max_rel_eigen_dev"] < 1e-10
        and rc["matrix_identity_dev"] < 1e-12
        and rc["homogeneity_dev"] < 1e-11,
        f"max eigen dev {rc['max_rel_eigen_dev']:.3e}",
    )

    sweep = crystal.band_sweep(100.0, alphas=[[0.0, 0.0], [PI, PI]], m=2, n=16)
    check(
        "band sweep shape",
        sweep["resolution"] == 16
        and len(sweep["table"]) == 2
        and all(len(r) == 2 for r in sweep["table"])
        and len(sweep["bands"]) == 2
        and all(lo <= hi for lo, hi in sweep["bands"])
        and all(mgn >= 0.0 for mgn in sweep["margins"]),
        f"bands {sweep['bands']!r}",
    )

    nm = crystal.neumann_eigenvalues(100.0, m=2, n=16)
    check(
        "Neumann zero-mean eigenvalues",
        nm["resolution"] == 16
        and 0.0 < nm["eigenvalues"][0] < nm["eigenvalues"][1],
        f"{nm['eigenvalues']!r}",
    )

    # ------------------------------------------------------------------
    # End-to-end certificate verification (five checks)
    # ------------------------------------------------------------------
    report = crystal.verify_gap(
        cert,
        spectra,
        2000.0,
        m=4,
        n=32,
        alphas=[[0.0, 0.0], [PI, 0.0], [PI, PI], [0.5 * PI, 0.25 * PI]],
    )
    names = [c["name"] for c in report["checks"]]
    check(
        "verification report passes",
        report["applicable"]
        and report["passed"]
        and all(c["status"] == "pass" for c in report["checks"]),
        f"checks: {names}",
    )
    expected = {
        "gap_interval_empty",
        "neumann_lower_bound",
        "dirichlet_upper_bound",
        "quasi_periodic_distance",
        "neumann_distance",
    }
    check("all five checks ran", set(names) == expected)

    print(f"\nall {PASSED} checks passed")


if __name__ == "__main__":
    main()
