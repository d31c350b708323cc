//! Modified M-decomposition and the superclose function `u_I`.
//!
//! On each element the exact solution is expanded as
//! `u = b_0 + b_1 xi + sum_{i>=2} b_i M_i(xi)`. The superclose function keeps
//! the coefficients that the scheme cannot see and shifts the remaining ones by
//! `b_{k+1} c`, where `c` is fixed once per scheme so that the shape
//! polynomial `R = sum_t c_t M_t + M_{k+1}` has the dual points as
//! critical points.

use crate::assembly::ExactSolution;
use crate::error::{FveError, Result};
use crate::mesh::PrimaryMesh;
use crate::refelem::{gauss_legendre, legendre_all, m_deriv_eval};
use crate::scheme::{half_order, SchemeSpec};
use nalgebra::{DMatrix, DVector};

/// Tolerance on the dependent condition `R'(G_l) = 0` for even `k`.
const DEPENDENT_CONDITION_TOL: f64 = 1e-8;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Values and reference derivatives of `M_0..M_n` at `xi`.
pub fn m_values(n: usize, xi: f64) -> (Vec<f64>, Vec<f64>) {
    let p = legendre_all(n.max(1), xi);
    let mut v = vec![0.0; n + 1];
    let mut d = vec![0.0; n + 1];
    v[0] = 1.0;
    if n >= 1 {
        v[1] = xi;
        d[1] = 1.0;
    }
    let mut fact = 1.0; // (i-2)!
    for i in 2..=n {
        if i > 2 {
            fact *= (i - 2) as f64;
        }
        v[i] = fact * (p[i] - p[i - 2]) / (2 * i - 1) as f64;
        d[i] = fact * p[i - 1];
    }
    (v, d)
}

/// The scheme-dependent shape polynomial `R = sum_t c_t M_t + M_{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapePolynomial {
    pub k: usize,
    /// Indices `t` of the shifted coefficients (even for odd `k`, odd for even `k`).
    pub indices: Vec<usize>,
    /// `c_t`, aligned with `indices`.
    pub coeffs: Vec<f64>,
}

impl ShapePolynomial {
    pub fn eval(&self, xi: f64) -> f64 {
        let (v, _) = m_values(self.k + 1, xi);
        v[self.k + 1]
            + self
                .indices
                .iter()
                .zip(&self.coeffs)
                .map(|(t, c)| c * v[*t])
                .sum::<f64>()
    }

    pub fn deriv(&self, xi: f64) -> f64 {
        let (_, d) = m_values(self.k + 1, xi);
        d[self.k + 1]
            + self
                .indices
                .iter()
                .zip(&self.coeffs)
                .map(|(t, c)| c * d[*t])
                .sum::<f64>()
    }
}

/// Indices not copied from the exact expansion.
fn shifted_indices(k: usize) -> Vec<usize> {
    let l = half_order(k);
    if k % 2 == 1 {
        (1..l).map(|t| 2 * t).collect()
    } else {
        (2..=l).map(|t| 2 * t - 1).collect()
    }
}

/// Solve `B c = f_M` with `B_{m,t} = M_t'(G_m)` and `f_M = -M_{k+1}'(G_m)` over
/// the outer negative dual points.
pub fn mmd_shape_coefficients(spec: &SchemeSpec) -> Result<ShapePolynomial> {
    let k = spec.k;
    let g = spec.dual_points()?;
    let indices = shifted_indices(k);
    let n = indices.len();
    let coeffs = if n == 0 {
        Vec::new()
    } else {
        let b = DMatrix::from_fn(n, n, |m, t| m_deriv_eval(indices[t], g[m]));
        let f = DVector::from_fn(n, |m, _| -m_deriv_eval(k + 1, g[m]));
        let lu = b.lu();
        let c = lu.solve(&f).ok_or_else(|| {
            FveError::IllPosedScheme(format!("MMD coefficient matrix is singular for k = {k}"))
        })?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(FveError::IllPosedScheme(format!(
                "MMD coefficient matrix is singular for k = {k}"
            )));
        }
        c.iter().copied().collect()
    };
    let shape = ShapePolynomial { k, indices, coeffs };
    if k % 2 == 0 {
        // the innermost node condition is implied by orthogonality, not imposed
        let gl = g[k / 2 - 1];
        let scale = 1.0 + m_deriv_eval(k + 1, gl).abs();
        let res = shape.deriv(gl);
        if res.abs() > DEPENDENT_CONDITION_TOL * scale {
            return Err(FveError::IllPosedScheme(format!(
                "shape derivative does not vanish at the innermost dual point ({res:e}); \
                 the dual points miss the k-(k-1) orthogonal condition"
            )));
        }
    }
    Ok(shape)
}

/// Coefficients `b_0..b_{k+2}` of the exact solution on one element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMCoefficients {
    pub element: usize,
    pub coeffs: Vec<f64>,
}

impl ElementMCoefficients {
    /// Truncated expansion at reference coordinate `xi`.
    pub fn reconstruct(&self, xi: f64) -> f64 {
        let (v, _) = m_values(self.coeffs.len() - 1, xi);
        self.coeffs.iter().zip(&v).map(|(b, m)| b * m).sum()
    }
}

/// M-expansion of `u` on element `e`, truncated at index `k + 2`.
pub fn element_m_coefficients(
    u: &ExactSolution,
    mesh: &PrimaryMesh,
    e: usize,
    k: usize,
) -> Result<ElementMCoefficients> {
    let top = k + 2;
    let (xl, xr) = mesh.element(e);
    let h = xr - xl;
    let (ul, ur) = ((u.u)(xl), (u.u)(xr));
    let mut coeffs = vec![0.0; top + 1];
    coeffs[1] = 0.5 * (ur - ul);
    coeffs[0] = ur - coeffs[1];
    let rule = gauss_legendre(k + 6)?;
    // Legendre coefficients of du/dxi, skipping c_0 (known exactly)
    let mut c = vec![0.0; top];
    for (&xi, &w) in rule.nodes().iter().zip(rule.weights()) {
        let x = mesh.map_to_element(e, xi);
        let dudxi = 0.5 * h * (u.du)(x);
        let p = legendre_all(top - 1, xi);
        for i in 1..top {
            c[i] += w * dudxi * p[i];
        }
    }
    for i in 1..top {
        let ci = c[i] * (2 * i + 1) as f64 / 2.0;
        coeffs[i + 1] = ci / factorial(i - 1);
    }
    Ok(ElementMCoefficients { element: e, coeffs })
}

/// Per-element M-coefficients of `u_I` plus the affine continuity correction.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperclosePoly {
    mesh: PrimaryMesh,
    k: usize,
    /// `b^I_0..b^I_k` per element.
    coeffs: Vec<Vec<f64>>,
    /// `(offset, slope)` of the correction `offset + slope * xi` per element.
    correction: Vec<(f64, f64)>,
    continuous: bool,
}

impl SuperclosePoly {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mesh(&self) -> &PrimaryMesh {
        &self.mesh
    }

    pub fn element_coefficients(&self, e: usize) -> &[f64] {
        &self.coeffs[e]
    }

    pub fn correction(&self, e: usize) -> (f64, f64) {
        self.correction[e]
    }

    /// True once the endpoint defects have been absorbed.
    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    /// Uncorrected `(u_I, du_I/dx)` on element `e`.
    pub fn eval_local_uncorrected(&self, e: usize, xi: f64) -> (f64, f64) {
        let (v, d) = m_values(self.k, xi);
        let b = &self.coeffs[e];
        let val = b.iter().zip(&v).map(|(b, m)| b * m).sum();
        let der: f64 = b.iter().zip(&d).map(|(b, m)| b * m).sum();
        (val, der * 2.0 / self.mesh.element_size(e))
    }

    /// Corrected `(u_I, du_I/dx)` at reference coordinate `xi` of element `e`.
    pub fn eval_local(&self, e: usize, xi: f64) -> (f64, f64) {
        let (v, d) = self.eval_local_uncorrected(e, xi);
        let (o, s) = self.correction[e];
        (v + o + s * xi, d + s * 2.0 / self.mesh.element_size(e))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let e = self.mesh.locate(x);
        self.eval_local(e, self.mesh.to_reference(e, x)).0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let e = self.mesh.locate(x);
        self.eval_local(e, self.mesh.to_reference(e, x)).1
    }
}

/// Build `u_I` for `u` on `mesh` under `spec`.
pub fn build_superclose(
    u: &ExactSolution,
    mesh: &PrimaryMesh,
    spec: &SchemeSpec,
) -> Result<SuperclosePoly> {
    let k = spec.k;
    let shape = mmd_shape_coefficients(spec)?;
    let n = mesh.num_elements();
    let mut coeffs = Vec::with_capacity(n);
    let mut correction = Vec::with_capacity(n);
    let mut out = SuperclosePoly {
        mesh: mesh.clone(),
        k,
        coeffs: Vec::new(),
        correction: Vec::new(),
        continuous: false,
    };
    for e in 0..n {
        let bu = element_m_coefficients(u, mesh, e, k)?;
        let mut b: Vec<f64> = bu.coeffs[..=k].to_vec();
        let lead = bu.coeffs[k + 1];
        for (t, c) in shape.indices.iter().zip(&shape.coeffs) {
            b[*t] -= lead * c;
        }
        coeffs.push(b);
    }
    out.coeffs = coeffs;
    for e in 0..n {
        let (xl, xr) = mesh.element(e);
        let dl = (u.u)(xl) - out.eval_local_uncorrected(e, -1.0).0;
        let dr = (u.u)(xr) - out.eval_local_uncorrected(e, 1.0).0;
        correction.push((0.5 * (dl + dr), 0.5 * (dr - dl)));
    }
    out.correction = correction;
    out.continuous = true;
    Ok(out)
}
