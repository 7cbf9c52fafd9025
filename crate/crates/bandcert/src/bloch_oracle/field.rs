//! Voxelized coefficient fields on the unit cell.

use crate::certify::DiskCrystal;
use crate::error::{Error, Result};

use super::MIN_RESOLUTION;

/// A piecewise-constant coefficient `a(x)` sampled at cell centers
/// `x_i = (i + 1/2) h`, `h = 1/n`, on the unit cell `(0,1]^d`.
///
/// Values are exactly two-valued: `1` on the inclusions and `k` outside
/// (primal), or `1/k` on the inclusions and `1` outside (dual). Pure
/// indicator sampling is used — no sub-cell area fractions — so the
/// coefficient set stays exact and the geometry error is quantified by grid
/// refinement instead.
#[derive(Clone, Debug)]
pub struct CoefficientField {
    /// Grid resolution per axis.
    pub n: usize,
    /// Spatial dimension (2 or 3).
    pub dimension: u32,
    /// Coefficient value per cell, row-major `i + n (j + n l)`.
    pub values: Vec<f64>,
    /// Inclusion indicator per cell.
    pub inside: Vec<bool>,
    /// The contrast `k` the field was built with.
    pub contrast: f64,
    /// Whether this is the dual assignment.
    pub dual: bool,
}

impl CoefficientField {
    /// Voxelize a disk crystal at resolution `n` and contrast `k`.
    ///
    /// # Errors
    /// Resolutions below 8, non-positive contrast, and invalid geometry are
    /// rejected.
    pub fn from_crystal(geom: &DiskCrystal, k: f64, n: usize, dual: bool) -> Result<Self> {
        geom.validate()?;
        if n < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {n} is below the minimum {MIN_RESOLUTION}"
            )));
        }
        if !(k > 0.0) {
            return Err(Error::InvalidParameter("contrast k must be > 0".into()));
        }
        let centers = geom.centers_or_default()?;
        let d = geom.dimension as usize;
        let dofs = n.pow(geom.dimension);
        let h = 1.0 / n as f64;
        let a2 = geom.radius * geom.radius;
        let (in_value, out_value) = if dual { (1.0 / k, 1.0) } else { (1.0, k) };

        let mut values = vec![out_value; dofs];
        let mut inside = vec![false; dofs];
        let mut x = vec![0.0f64; d];
        for (idx, cell_inside) in inside.iter_mut().enumerate() {
            let mut rest = idx;
            for coord in x.iter_mut() {
                *coord = (rest % n) as f64 * h + 0.5 * h;
                rest /= n;
            }
            let contained = centers.iter().any(|c| {
                let dist2: f64 = c.iter().zip(&x).map(|(ci, xi)| (ci - xi) * (ci - xi)).sum();
                dist2 <= a2
            });
            if contained {
                *cell_inside = true;
                values[idx] = in_value;
            }
        }
        Ok(CoefficientField {
            n,
            dimension: geom.dimension,
            values,
            inside,
            contrast: k,
            dual,
        })
    }

    /// Homogeneous field `a ≡ value` (calibration problems).
    pub fn homogeneous(n: usize, dimension: u32, value: f64) -> Result<Self> {
        if n < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {n} is below the minimum {MIN_RESOLUTION}"
            )));
        }
        if !(dimension == 2 || dimension == 3) {
            return Err(Error::InvalidParameter("dimension must be 2 or 3".into()));
        }
        if !(value > 0.0) {
            return Err(Error::InvalidParameter("coefficient must be > 0".into()));
        }
        let dofs = n.pow(dimension);
        Ok(CoefficientField {
            n,
            dimension,
            values: vec![value; dofs],
            inside: vec![false; dofs],
            contrast: value,
            dual: false,
        })
    }

    /// The dual field: same geometry, values divided by the contrast
    /// (`{1, k} -> {1/k, 1}` exactly).
    pub fn to_dual(&self) -> CoefficientField {
        let mut dual = self.clone();
        dual.dual = !self.dual;
        for v in dual.values.iter_mut() {
            *v = if dual.dual { *v / self.contrast } else { *v * self.contrast };
        }
        dual
    }

    /// The field with every value multiplied by `t` (homogeneity tests).
    pub fn scaled(&self, t: f64) -> CoefficientField {
        let mut scaled = self.clone();
        for v in scaled.values.iter_mut() {
            *v *= t;
        }
        scaled
    }

    /// Number of degrees of freedom `n^d`.
    pub fn dofs(&self) -> usize {
        self.n.pow(self.dimension)
    }

    /// Voxelized inclusion volume `h^d · #{inside cells}`.
    pub fn inclusion_volume(&self) -> f64 {
        let cell = (1.0 / self.n as f64).powi(self.dimension as i32);
        self.inside.iter().filter(|&&b| b).count() as f64 * cell
    }
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reference() -> DiskCrystal {
        DiskCrystal::unit_cell_2d(1, 0.3, 0.45).unwrap()
    }

    #[test]
    fn values_are_exactly_two_valued() {
        let field = CoefficientField::from_crystal(&reference(), 1e4, 32, false).unwrap();
        assert!(field
            .values
            .iter()
            .zip(&field.inside)
            .all(|(&v, &inside)| v == if inside { 1.0 } else { 1e4 }));
        let dual = field.to_dual();
        assert!(dual
            .values
            .iter()
            .zip(&dual.inside)
            .all(|(&v, &inside)| v == if inside { 1e-4 } else { 1.0 }));
        // Dual of dual restores the primal values exactly.
        let back = dual.to_dual();
        assert_eq!(back.values, field.values);
    }

    #[test]
    fn voxel_volume_converges_to_disk_area() {
        let exact = PI * 0.3 * 0.3;
        for n in [64usize, 128, 256, 512] {
            let field = CoefficientField::from_crystal(&reference(), 10.0, n, false).unwrap();
            let h = 1.0 / n as f64;
            let error = (field.inclusion_volume() - exact).abs();
            // Indicator sampling errs by O(h) times the perimeter.
            assert!(
                error <= 4.0 * PI * 0.3 * h,
                "area error {error} too large at n = {n}"
            );
        }
    }

    #[test]
    fn three_dimensional_field() {
        let ball = DiskCrystal::new(1, 0.25, 0.35, 3, None).unwrap();
        let field = CoefficientField::from_crystal(&ball, 100.0, 16, false).unwrap();
        assert_eq!(field.dofs(), 16 * 16 * 16);
        let exact = 4.0 / 3.0 * PI * 0.25f64.powi(3);
        assert!((field.inclusion_volume() - exact).abs() < 0.2 * exact);
    }

    #[test]
    fn resolution_gate() {
        assert!(CoefficientField::from_crystal(&reference(), 10.0, 7, false).is_err());
        assert!(CoefficientField::homogeneous(4, 2, 1.0).is_err());
    }

    #[test]
    fn multi_disk_field_needs_centers() {
        let two = DiskCrystal::new(2, 0.1, 0.2, 2, None).unwrap();
        assert!(CoefficientField::from_crystal(&two, 10.0, 32, false).is_err());
        let placed = DiskCrystal::new(
            2,
            0.1,
            0.2,
            2,
            Some(vec![vec![0.25, 0.5], vec![0.75, 0.5]]),
        )
        .unwrap();
        let field = CoefficientField::from_crystal(&placed, 10.0, 64, false).unwrap();
        let exact = 2.0 * PI * 0.1 * 0.1;
        assert!((field.inclusion_volume() - exact).abs() < 0.3 * exact);
    }
}
