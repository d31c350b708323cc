//! Primary partition and the dual partition built from a scheme's dual points.

use crate::error::{FveError, Result};
use crate::scheme::SchemeSpec;

/// Partition `x_0 < x_1 < ... < x_N` of `[A, B]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryMesh {
    points: Vec<f64>,
}

impl PrimaryMesh {
    /// Mesh from explicit points. Grading is allowed; see [`Self::quasi_uniformity`].
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 3 {
            return Err(FveError::InvalidParameter(format!(
                "a mesh needs at least 2 elements, got {}",
                points.len().saturating_sub(1)
            )));
        }
        if points.iter().any(|x| !x.is_finite()) || !points.windows(2).all(|w| w[0] < w[1]) {
            return Err(FveError::InvalidParameter(
                "mesh points must be finite and strictly increasing".into(),
            ));
        }
        Ok(PrimaryMesh { points })
    }

    /// `N` equal elements on `[a, b]`.
    pub fn uniform(n: usize, a: f64, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(FveError::InvalidParameter(format!(
                "a mesh needs at least 2 elements, got {n}"
            )));
        }
        if !(a < b) {
            return Err(FveError::InvalidParameter(format!(
                "empty interval [{a}, {b}]"
            )));
        }
        let h = (b - a) / n as f64;
        let mut points: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
        points[n] = b;
        Ok(PrimaryMesh { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn num_elements(&self) -> usize {
        self.points.len() - 1
    }

    pub fn left(&self) -> f64 {
        self.points[0]
    }

    pub fn right(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn element(&self, i: usize) -> (f64, f64) {
        (self.points[i], self.points[i + 1])
    }

    /// `h_i` for element `i` (0-based).
    pub fn element_size(&self, i: usize) -> f64 {
        self.points[i + 1] - self.points[i]
    }

    pub fn max_h(&self) -> f64 {
        (0..self.num_elements())
            .map(|i| self.element_size(i))
            .fold(0.0, f64::max)
    }

    pub fn min_h(&self) -> f64 {
        (0..self.num_elements())
            .map(|i| self.element_size(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// `max h_i / min h_i`.
    pub fn quasi_uniformity(&self) -> f64 {
        self.max_h() / self.min_h()
    }

    /// Element containing `x` (ties go to the left element, except at `A`).
    pub fn locate(&self, x: f64) -> usize {
        let n = self.num_elements();
        match self.points.partition_point(|p| *p < x) {
            0 => 0,
            i => (i - 1).min(n - 1),
        }
    }

    /// Affine image of a reference coordinate in element `i`.
    pub fn map_to_element(&self, i: usize, xi: f64) -> f64 {
        let (a, b) = self.element(i);
        0.5 * (a + b + (b - a) * xi)
    }

    /// Reference coordinate of `x` inside element `i`.
    pub fn to_reference(&self, i: usize, x: f64) -> f64 {
        let (a, b) = self.element(i);
        (2.0 * x - a - b) / (b - a)
    }
}

/// Dual points `g_{i,j}` and the control volumes they delimit.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMesh {
    k: usize,
    /// Row-major `N x k` dual points.
    dual_points: Vec<f64>,
    /// `K*_{1,0}`, interior volumes in order, then `K*_{N,k}`.
    control_volumes: Vec<(f64, f64)>,
}

impl DualMesh {
    /// Dual mesh from explicit reference dual points, with no scheme checks.
    pub fn from_reference(mesh: &PrimaryMesh, reference: &[f64]) -> Self {
        let k = reference.len();
        let n = mesh.num_elements();
        let mut dual_points = Vec::with_capacity(n * k);
        for i in 0..n {
            for &g in reference {
                dual_points.push(mesh.map_to_element(i, g));
            }
        }
        let mut control_volumes = Vec::with_capacity(n * k + 1);
        control_volumes.push((mesh.left(), dual_points[0]));
        for w in dual_points.windows(2) {
            control_volumes.push((w[0], w[1]));
        }
        control_volumes.push((dual_points[n * k - 1], mesh.right()));
        DualMesh {
            k,
            dual_points,
            control_volumes,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dual_points(&self) -> &[f64] {
        &self.dual_points
    }

    /// `g_{i,j}` with 0-based element `i` and 0-based local index `j`.
    pub fn dual_point(&self, i: usize, j: usize) -> f64 {
        self.dual_points[i * self.k + j]
    }

    /// All control volumes including the two boundary ones.
    pub fn control_volumes(&self) -> &[(f64, f64)] {
        &self.control_volumes
    }

    /// The `Nk - 1` control volumes that carry an equation.
    pub fn interior_volumes(&self) -> &[(f64, f64)] {
        let n = self.control_volumes.len();
        &self.control_volumes[1..n - 1]
    }

    pub fn num_test_dofs(&self) -> usize {
        self.control_volumes.len() - 2
    }
}

/// Dual mesh for `spec` on `mesh`.
pub fn dual_mesh(mesh: &PrimaryMesh, spec: &SchemeSpec) -> Result<DualMesh> {
    let g = spec.dual_points()?;
    Ok(DualMesh::from_reference(mesh, &g))
}

pub fn uniform_mesh(n: usize, a: f64, b: f64) -> Result<PrimaryMesh> {
    PrimaryMesh::uniform(n, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::preset;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_meshes() {
        assert_eq!(
            uniform_mesh(2, 0.0, 1.0).unwrap().points(),
            &[0.0, 0.5, 1.0]
        );
        assert_abs_diff_eq!(uniform_mesh(4, 0.0, 1.0).unwrap().max_h(), 0.25);
        assert_abs_diff_eq!(
            uniform_mesh(5, -1.0, 1.0).unwrap().points()[3],
            0.2,
            epsilon = 1e-15
        );
        assert!(uniform_mesh(1, 0.0, 1.0).is_err());
        assert!(uniform_mesh(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn graded_mesh() {
        let m = PrimaryMesh::from_points(vec![0.0, 0.1, 0.3, 1.0]).unwrap();
        assert_abs_diff_eq!(m.quasi_uniformity(), 7.0, epsilon = 1e-12);
        assert!(PrimaryMesh::from_points(vec![0.0, 0.5]).is_err());
        assert!(PrimaryMesh::from_points(vec![0.0, 0.5, 0.4]).is_err());
        assert_eq!(m.locate(0.0), 0);
        assert_eq!(m.locate(0.1), 0);
        assert_eq!(m.locate(0.2), 1);
        assert_eq!(m.locate(1.0), 2);
    }

    #[test]
    fn quadratic_dual_points() {
        let mesh = uniform_mesh(2, 0.0, 1.0).unwrap();
        let d = dual_mesh(&mesh, &preset("gauss-2").unwrap()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let expect = [
            0.25 - 0.25 * s,
            0.25 + 0.25 * s,
            0.75 - 0.25 * s,
            0.75 + 0.25 * s,
        ];
        for (g, e) in d.dual_points().iter().zip(expect) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(d.dual_points()[0], 0.105662432702594, epsilon = 1e-14);
        assert_eq!(d.num_test_dofs(), 3);
    }

    #[test]
    fn linear_dual_points_are_midpoints() {
        let mesh = PrimaryMesh::from_points(vec![0.0, 0.2, 0.7, 1.0]).unwrap();
        let d = dual_mesh(&mesh, &preset("gauss-1").unwrap()).unwrap();
        for (g, e) in d.dual_points().iter().zip([0.1, 0.45, 0.85]) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn control_volumes_tile_the_interval() {
        let mesh = PrimaryMesh::from_points(vec![-1.0, -0.3, 0.4, 2.0]).unwrap();
        for name in ["scheme-3-1", "scheme-6-1", "gauss-4"] {
            let spec = preset(name).unwrap();
            let d = dual_mesh(&mesh, &spec).unwrap();
            let total: f64 = d.control_volumes().iter().map(|(a, b)| b - a).sum();
            assert_abs_diff_eq!(total, 3.0, epsilon = 1e-13);
            assert!(d.control_volumes().iter().all(|(a, b)| b > a));
            assert_eq!(d.num_test_dofs(), 3 * spec.k - 1);
            for i in 0..3 {
                let (a, b) = mesh.element(i);
                let mid = 0.5 * (a + b);
                for j in 0..spec.k {
                    let left = d.dual_point(i, j) - mid;
                    let right = d.dual_point(i, spec.k - 1 - j) - mid;
                    assert_abs_diff_eq!(left, -right, epsilon = 1e-13);
                }
            }
        }
    }
}
