//! Finite-volume assembly of the Bloch cell operator.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::field::CoefficientField;

/// Boundary condition of the cell eigenvalue problem.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryCondition {
    /// Quasi-periodic wrap `u(x + e_j) = e^{i alpha_j} u(x)` with
    /// `alpha` in `(-pi, pi]^d`. `alpha = 0` is the plain periodic problem
    /// *including* the constant mode (so band indices stay continuous
    /// through the zone center).
    QuasiPeriodic(Vec<f64>),
    /// Periodic wrap restricted to zero-mean functions (constant mode
    /// deflated by the solver).
    PeriodicZeroMean,
    /// Zero-flux boundary restricted to zero-mean functions.
    NeumannZeroMean,
}

/// A fully specified discrete eigenvalue problem.
#[derive(Clone, Debug)]
pub struct BlochProblem {
    /// Coefficient field on the cell grid.
    pub field: CoefficientField,
    /// Boundary condition (and quasi-momentum, if any).
    pub bc: BoundaryCondition,
    /// Number of requested eigenvalues.
    pub m: usize,
}

impl BlochProblem {
    /// A validated problem.
    ///
    /// # Errors
    /// Quasi-momentum components outside `(-pi, pi]` or of the wrong
    /// dimension, and `m < 1`, are rejected.
    pub fn new(field: CoefficientField, bc: BoundaryCondition, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("at least one eigenvalue required".into()));
        }
        if let BoundaryCondition::QuasiPeriodic(alpha) = &bc {
            if alpha.len() != field.dimension as usize {
                return Err(Error::InvalidParameter(format!(
                    "alpha has {} components for dimension {}",
                    alpha.len(),
                    field.dimension
                )));
            }
            if alpha.iter().any(|&a| !(-PI < a && a <= PI)) {
                return Err(Error::InvalidParameter(format!(
                    "alpha {alpha:?} leaves the Brillouin zone (-pi, pi]^d"
                )));
            }
        }
        Ok(BlochProblem { field, bc, m })
    }
}

/// The assembled Hermitian operator, stored implicitly as per-axis face
/// coefficients, wrap phases, and neighbor indices.
#[derive(Clone, Debug)]
pub struct BlochOperator {
    /// Grid resolution per axis.
    pub n: usize,
    /// Spatial dimension.
    pub dimension: u32,
    /// `1/h^2` scaling of the stencil.
    inv_h2: f64,
    /// Per axis: harmonic face coefficient between cell `idx` and its `+`
    /// neighbor (zero on suppressed Neumann boundary faces).
    faces: Vec<Vec<f64>>,
    /// Per axis: `+`-neighbor index of each cell (wrapping).
    neighbors: Vec<Vec<u32>>,
    /// Per axis: phase on the `+` face (`1` interior, `e^{i alpha_j}` on the
    /// wrap face).
    phases: Vec<Vec<Complex64>>,
    /// Whether the constant mode must be deflated.
    pub zero_mean: bool,
    /// Whether the deflated constant mode is a true eigenmode that must be
    /// reported as an exact `0` eigenvalue (quasi-periodic `alpha = 0`: the
    /// operator is plainly periodic and constants are its kernel).
    pub report_kernel: bool,
    /// Requested eigenvalue count.
    pub m: usize,
}

/// Harmonic mean, the flux-exact face coefficient for piecewise-constant
/// media.
fn harmonic(p: f64, q: f64) -> f64 {
    2.0 * p * q / (p + q)
}

/// Assemble the finite-volume operator for a problem: 5-point (2-d) or
/// 7-point (3-d) stencil, harmonic face averaging, phase factors on
/// wrap-around faces. The resulting operator is Hermitian positive
/// semidefinite; for periodic/Neumann conditions it annihilates constants
/// exactly.
///
/// # Errors
/// Propagates problem validation (resolution below 8 is rejected when the
/// field is built).
pub fn assemble_operator(problem: &BlochProblem) -> Result<BlochOperator> {
    let field = &problem.field;
    let n = field.n;
    let d = field.dimension as usize;
    let dofs = field.dofs();
    let strides: Vec<usize> = (0..d).map(|axis| n.pow(axis as u32)).collect();

    let (alpha, neumann): (Vec<f64>, bool) = match &problem.bc {
        BoundaryCondition::QuasiPeriodic(a) => (a.clone(), false),
        BoundaryCondition::PeriodicZeroMean => (vec![0.0; d], false),
        BoundaryCondition::NeumannZeroMean => (vec![0.0; d], true),
    };
    // alpha = 0 exactly makes the quasi-periodic operator plainly periodic:
    // constants span its kernel, so the solve must deflate them like the
    // zero-mean problems do — but report the kernel as a true 0 eigenvalue.
    let report_kernel = matches!(&problem.bc,
        BoundaryCondition::QuasiPeriodic(a) if a.iter().all(|&x| x == 0.0));
    let zero_mean =
        !matches!(problem.bc, BoundaryCondition::QuasiPeriodic(_)) || report_kernel;

    let mut faces = Vec::with_capacity(d);
    let mut neighbors = Vec::with_capacity(d);
    let mut phases = Vec::with_capacity(d);
    for axis in 0..d {
        let stride = strides[axis];
        let wrap_phase = Complex64::new(alpha[axis].cos(), alpha[axis].sin());
        let mut face = vec![0.0f64; dofs];
        let mut nbr = vec![0u32; dofs];
        let mut phase = vec![Complex64::new(1.0, 0.0); dofs];
        for idx in 0..dofs {
            let coord = (idx / stride) % n;
            if coord + 1 < n {
                face[idx] = harmonic(field.values[idx], field.values[idx + stride]);
                nbr[idx] = (idx + stride) as u32;
            } else {
                // Wrap face back to coordinate 0 along this axis.
                let wrapped = idx + stride - n * stride;
                if neumann {
                    face[idx] = 0.0; // zero-flux: face suppressed
                    nbr[idx] = idx as u32;
                } else {
                    face[idx] = harmonic(field.values[idx], field.values[wrapped]);
                    nbr[idx] = wrapped as u32;
                    phase[idx] = wrap_phase;
                }
            }
        }
        faces.push(face);
        neighbors.push(nbr);
        phases.push(phase);
    }

    Ok(BlochOperator {
        n,
        dimension: field.dimension,
        inv_h2: (n * n) as f64,
        faces,
        neighbors,
        phases,
        zero_mean,
        report_kernel,
        m: problem.m,
    })
}

impl BlochOperator {
    /// Number of degrees of freedom.
    pub fn dofs(&self) -> usize {
        self.n.pow(self.dimension)
    }

    /// `y = A x`. Deterministic sequential accumulation.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.fill(Complex64::new(0.0, 0.0));
        for axis in 0..self.dimension as usize {
            let face = &self.faces[axis];
            let nbr = &self.neighbors[axis];
            let phase = &self.phases[axis];
            for idx in 0..x.len() {
                let w = face[idx];
                if w == 0.0 {
                    continue;
                }
                let q = nbr[idx] as usize;
                // Flux through the + face: contributes w (u_P - ph u_Q) to
                // row P and the conjugate-phase counterpart to row Q.
                let diff = x[idx] - phase[idx] * x[q];
                let flux = w * self.inv_h2;
                y[idx] += flux * diff;
                y[q] -= flux * phase[idx].conj() * diff;
            }
        }
    }

    /// Diagonal of the operator (Jacobi preconditioner).
    pub fn diagonal(&self) -> Vec<f64> {
        let mut diag = vec![0.0f64; self.dofs()];
        for axis in 0..self.dimension as usize {
            let face = &self.faces[axis];
            let nbr = &self.neighbors[axis];
            for idx in 0..diag.len() {
                let w = face[idx] * self.inv_h2;
                if w == 0.0 {
                    continue;
                }
                diag[idx] += w;
                diag[nbr[idx] as usize] += w;
            }
        }
        diag
    }

    /// Dense matrix form, written entry-pair-wise so Hermiticity holds at
    /// the bit level.
    pub fn dense(&self) -> faer::Mat<faer::c64> {
        let dofs = self.dofs();
        let mut mat = faer::Mat::<faer::c64>::zeros(dofs, dofs);
        for axis in 0..self.dimension as usize {
            let face = &self.faces[axis];
            let nbr = &self.neighbors[axis];
            let phase = &self.phases[axis];
            for idx in 0..dofs {
                let w = face[idx] * self.inv_h2;
                if w == 0.0 {
                    continue;
                }
                let q = nbr[idx] as usize;
                let off = -w * phase[idx];
                mat[(idx, idx)] = faer::c64::new(mat[(idx, idx)].re + w, 0.0);
                mat[(q, q)] = faer::c64::new(mat[(q, q)].re + w, 0.0);
                let previous = mat[(idx, q)];
                mat[(idx, q)] = faer::c64::new(previous.re + off.re, previous.im + off.im);
                let previous = mat[(q, idx)];
                mat[(q, idx)] = faer::c64::new(previous.re + off.re, previous.im - off.im);
            }
        }
        mat
    }
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::DiskCrystal;
    use approx::assert_relative_eq;

    fn disk_field(n: usize, k: f64) -> CoefficientField {
        let geom = DiskCrystal::unit_cell_2d(1, 0.3, 0.45).unwrap();
        CoefficientField::from_crystal(&geom, k, n, false).unwrap()
    }

    fn quasi(field: CoefficientField, alpha: Vec<f64>) -> BlochOperator {
        let problem =
            BlochProblem::new(field, BoundaryCondition::QuasiPeriodic(alpha), 4).unwrap();
        assemble_operator(&problem).unwrap()
    }

    #[test]
    fn alpha_validation() {
        let field = CoefficientField::homogeneous(8, 2, 1.0).unwrap();
        assert!(BlochProblem::new(
            field.clone(),
            BoundaryCondition::QuasiPeriodic(vec![0.5]),
            1
        )
        .is_err());
        assert!(BlochProblem::new(
            field.clone(),
            BoundaryCondition::QuasiPeriodic(vec![0.5, 4.0]),
            1
        )
        .is_err());
        // pi itself belongs to the zone, -pi does not.
        assert!(BlochProblem::new(
            field.clone(),
            BoundaryCondition::QuasiPeriodic(vec![PI, 0.0]),
            1
        )
        .is_ok());
        assert!(BlochProblem::new(
            field.clone(),
            BoundaryCondition::QuasiPeriodic(vec![-PI, 0.0]),
            1
        )
        .is_err());
        assert!(BlochProblem::new(field, BoundaryCondition::NeumannZeroMean, 0).is_err());
    }

    #[test]
    fn dense_matrix_is_bitwise_hermitian() {
        let op = quasi(disk_field(8, 1e3), vec![1.3, -0.7]);
        let mat = op.dense();
        for i in 0..op.dofs() {
            // Real diagonal, exactly.
            assert_eq!(mat[(i, i)].im, 0.0, "diagonal not real at {i}");
            for j in 0..i {
                let a = mat[(i, j)];
                let b = mat[(j, i)];
                assert_eq!(a.re.to_bits(), b.re.to_bits(), "re mismatch at ({i},{j})");
                // Bitwise conjugate, modulo the sign of zero on real entries.
                if a.im != 0.0 || b.im != 0.0 {
                    assert_eq!(a.im.to_bits(), (-b.im).to_bits(), "im mismatch at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn matvec_agrees_with_dense() {
        let op = quasi(disk_field(8, 50.0), vec![0.9, 2.2]);
        let dofs = op.dofs();
        let x: Vec<Complex64> = (0..dofs)
            .map(|i| {
                Complex64::new((0.3 + i as f64).sin(), (1.7 * i as f64 + 0.2).cos())
            })
            .collect();
        let mut y = vec![Complex64::new(0.0, 0.0); dofs];
        op.apply(&x, &mut y);
        let mat = op.dense();
        for i in 0..dofs {
            let mut expected = Complex64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                let a = mat[(i, j)];
                expected += Complex64::new(a.re, a.im) * xj;
            }
            let scale = op.diagonal()[i].max(1.0);
            assert!(
                (y[i] - expected).norm() <= 1e-11 * scale,
                "row {i}: {} vs {}",
                y[i],
                expected
            );
        }
    }

    #[test]
    fn constants_are_annihilated_without_phase() {
        // Row sums vanish exactly for periodic (alpha = 0) and Neumann
        // operators regardless of the coefficient field.
        for bc in [
            BoundaryCondition::QuasiPeriodic(vec![0.0, 0.0]),
            BoundaryCondition::PeriodicZeroMean,
            BoundaryCondition::NeumannZeroMean,
        ] {
            let problem = BlochProblem::new(disk_field(16, 777.0), bc, 2).unwrap();
            let op = assemble_operator(&problem).unwrap();
            let ones = vec![Complex64::new(1.0, 0.0); op.dofs()];
            let mut out = vec![Complex64::new(0.5, 0.5); op.dofs()];
            op.apply(&ones, &mut out);
            assert!(out.iter().all(|v| v.norm() == 0.0), "A 1 != 0");
        }
    }

    #[test]
    fn quadratic_form_is_nonnegative() {
        let op = quasi(disk_field(12, 1e4), vec![2.5, -1.1]);
        let dofs = op.dofs();
        for seed in 1..=5u64 {
            let x: Vec<Complex64> = (0..dofs)
                .map(|i| {
                    let t = (seed as f64 * 12.9898 + i as f64 * 78.233).sin() * 43758.5453;
                    Complex64::new(t.fract(), (t * 1.3).fract())
                })
                .collect();
            let mut ax = vec![Complex64::new(0.0, 0.0); dofs];
            op.apply(&x, &mut ax);
            let quad: Complex64 = x.iter().zip(&ax).map(|(xi, yi)| xi.conj() * yi).sum();
            assert!(quad.im.abs() <= 1e-9 * quad.re.abs().max(1.0));
            assert!(quad.re >= -1e-9, "quadratic form negative: {quad}");
        }
    }

    #[test]
    fn neumann_suppresses_boundary_faces() {
        let problem = BlochProblem::new(
            CoefficientField::homogeneous(8, 2, 1.0).unwrap(),
            BoundaryCondition::NeumannZeroMean,
            1,
        )
        .unwrap();
        let op = assemble_operator(&problem).unwrap();
        // Corner cell (0,0) touches two suppressed faces: diagonal has only
        // two contributions of 1/h^2 each.
        assert_relative_eq!(op.diagonal()[0], 2.0 * 64.0, max_relative = 1e-15);
        // Interior cell sees all four faces.
        assert_relative_eq!(op.diagonal()[8 + 3], 4.0 * 64.0, max_relative = 1e-15);
    }

    #[test]
    fn three_dimensional_stencil() {
        let ball = DiskCrystal::new(1, 0.25, 0.35, 3, None).unwrap();
        let field = CoefficientField::from_crystal(&ball, 10.0, 8, false).unwrap();
        let problem = BlochProblem::new(
            field,
            BoundaryCondition::QuasiPeriodic(vec![0.3, -0.4, 1.0]),
            2,
        )
        .unwrap();
        let op = assemble_operator(&problem).unwrap();
        assert_eq!(op.dofs(), 512);
        let mat = op.dense();
        for i in 0..op.dofs() {
            assert_eq!(mat[(i, i)].im, 0.0);
            for j in 0..i {
                let a = mat[(i, j)];
                let b = mat[(j, i)];
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                if a.im != 0.0 || b.im != 0.0 {
                    assert_eq!(a.im.to_bits(), (-b.im).to_bits());
                }
            }
        }
    }
}
