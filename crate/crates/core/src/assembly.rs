//! Trial space, Petrov-Galerkin assembly of the FVE system and its solution.
//!
//! One equation per interior control volume `[g_d, g_{d+1}]`:
//!
//! ```text
//! p(g_d) u_h'(g_d) - p(g_{d+1}) u_h'(g_{d+1}) + int (q u_h' + r u_h) = int f
//! ```
//!
//! Unknowns are the interior Lagrange coefficients of the continuous
//! piecewise degree-`k` trial function; Dirichlet values are lifted to the
//! right side. The resulting matrix has `k` sub- and `k` super-diagonals.

use crate::error::{FveError, Result};
use crate::mesh::{DualMesh, PrimaryMesh};
use crate::refelem::{gauss_legendre, gauss_lobatto_nodes, QuadratureRule};
use crate::scheme::SchemeSpec;
use std::fmt;
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Wrap a closure as a shareable coefficient function.
pub fn scalar_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> ScalarFn {
    Arc::new(f)
}

/// An exact solution with its first derivative.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarFn,
    pub du: ScalarFn,
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExactSolution")
    }
}

/// `-(p u')' + q u' + r u = f` on `[A, B]` with `u(A) = g_A`, `u(B) = g_B`.
#[derive(Clone)]
pub struct BvpProblem {
    pub name: String,
    pub interval: (f64, f64),
    pub p: ScalarFn,
    pub dp: Option<ScalarFn>,
    pub q: ScalarFn,
    pub dq: Option<ScalarFn>,
    pub r: ScalarFn,
    pub f: ScalarFn,
    pub g_left: f64,
    pub g_right: f64,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for BvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BvpProblem")
            .field("name", &self.name)
            .field("interval", &self.interval)
            .field("g_left", &self.g_left)
            .field("g_right", &self.g_right)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

/// Coefficients of a manufactured problem: `p, p', q, q', r`.
#[derive(Clone)]
pub struct Coefficients {
    pub p: ScalarFn,
    pub dp: ScalarFn,
    pub q: ScalarFn,
    pub dq: ScalarFn,
    pub r: ScalarFn,
}

impl BvpProblem {
    /// Problem whose right side is built analytically from `u, u', u''`:
    /// `f = -(p' u' + p u'') + q u' + r u`, with matching Dirichlet data.
    pub fn manufactured(
        name: impl Into<String>,
        interval: (f64, f64),
        coeffs: Coefficients,
        u: ScalarFn,
        du: ScalarFn,
        d2u: ScalarFn,
    ) -> Self {
        let Coefficients { p, dp, q, dq, r } = coeffs;
        let f = {
            let (p, dp, q, r, u, du) = (
                p.clone(),
                dp.clone(),
                q.clone(),
                r.clone(),
                u.clone(),
                du.clone(),
            );
            scalar_fn(move |x| -(dp(x) * du(x) + p(x) * d2u(x)) + q(x) * du(x) + r(x) * u(x))
        };
        BvpProblem {
            name: name.into(),
            interval,
            g_left: u(interval.0),
            g_right: u(interval.1),
            p,
            dp: Some(dp),
            q,
            dq: Some(dq),
            r,
            f,
            exact: Some(ExactSolution { u, du }),
        }
    }

    /// Sampled check of `p >= p0 > 0` and `r - q'/2 > 0` at 1001 points.
    /// Returns human-readable warnings; an empty list means both hold.
    pub fn coercivity_warnings(&self) -> Vec<String> {
        let (a, b) = self.interval;
        let n = 1000;
        let mut min_p = f64::INFINITY;
        let mut min_gamma = f64::INFINITY;
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            min_p = min_p.min((self.p)(x));
            let dq = match &self.dq {
                Some(dq) => dq(x),
                None => {
                    let h = 1e-6 * (b - a);
                    ((self.q)(x + h) - (self.q)(x - h)) / (2.0 * h)
                }
            };
            min_gamma = min_gamma.min((self.r)(x) - 0.5 * dq);
        }
        let mut out = Vec::new();
        if !(min_p > 0.0) {
            out.push(format!(
                "p is not bounded below by a positive constant (min p = {min_p:e})"
            ));
        }
        if !(min_gamma > 0.0) {
            out.push(format!("r - q'/2 is not positive (min = {min_gamma:e})"));
        }
        out
    }
}

/// Placement of the local Lagrange nodes of the trial space.
///
/// The trial space itself does not depend on this choice; only the
/// conditioning of the nodal basis does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrialNodes {
    #[default]
    GaussLobatto,
    /// The scheme's value nodes, falling back to uniform when it has none.
    ValueNodes,
    Uniform,
}

/// Assembly and error-norm options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    /// Gauss points per smooth piece; defaults to `k + 3`.
    pub quad_points: Option<usize>,
    pub trial_nodes: TrialNodes,
}

impl SolveOptions {
    pub fn rule(&self, k: usize) -> Result<QuadratureRule> {
        let n = self.quad_points.unwrap_or(k + 3);
        if n < k + 1 {
            return Err(FveError::InvalidParameter(format!(
                "quadrature size must be at least k+1 = {}, got {n}",
                k + 1
            )));
        }
        gauss_legendre(n)
    }
}

/// Continuous piecewise degree-`k` Lagrange space on a primary mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpace {
    mesh: PrimaryMesh,
    k: usize,
    nodes: Vec<f64>,
}

impl TrialSpace {
    /// Degree-`k` space with Gauss-Lobatto local nodes.
    pub fn new(mesh: &PrimaryMesh, spec: &SchemeSpec) -> Result<Self> {
        Self::with_choice(mesh, spec, TrialNodes::default())
    }

    pub fn with_choice(mesh: &PrimaryMesh, spec: &SchemeSpec, choice: TrialNodes) -> Result<Self> {
        let nodes = match choice {
            TrialNodes::GaussLobatto => gauss_lobatto_nodes(spec.k)?,
            TrialNodes::Uniform => uniform_nodes(spec.k),
            TrialNodes::ValueNodes => spec
                .layout()?
                .value_nodes
                .unwrap_or_else(|| uniform_nodes(spec.k)),
        };
        Self::with_nodes(mesh, nodes)
    }

    pub fn with_nodes(mesh: &PrimaryMesh, nodes: Vec<f64>) -> Result<Self> {
        let k = nodes.len().saturating_sub(1);
        if k == 0 || nodes[0] != -1.0 || nodes[k] != 1.0 || !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(FveError::InvalidInput(format!(
                "local trial nodes must increase from -1 to 1: {nodes:?}"
            )));
        }
        Ok(TrialSpace {
            mesh: mesh.clone(),
            k,
            nodes,
        })
    }

    pub fn mesh(&self) -> &PrimaryMesh {
        &self.mesh
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn local_nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn num_dofs(&self) -> usize {
        self.mesh.num_elements() * self.k + 1
    }

    pub fn num_interior_dofs(&self) -> usize {
        self.num_dofs() - 2
    }

    /// Global index of local node `m` of element `e`.
    pub fn global_index(&self, e: usize, m: usize) -> usize {
        e * self.k + m
    }

    /// Physical coordinates of all global nodes.
    pub fn node_coordinates(&self) -> Vec<f64> {
        let n = self.mesh.num_elements();
        let mut x = Vec::with_capacity(self.num_dofs());
        for e in 0..n {
            let start = if e == 0 { 0 } else { 1 };
            for m in start..=self.k {
                x.push(if m == 0 {
                    self.mesh.element(e).0
                } else if m == self.k {
                    self.mesh.element(e).1
                } else {
                    self.mesh.map_to_element(e, self.nodes[m])
                });
            }
        }
        x
    }

    /// Local basis values and reference derivatives at `xi`.
    pub fn basis(&self, xi: f64) -> (Vec<f64>, Vec<f64>) {
        let nodes = &self.nodes;
        let n = nodes.len();
        let mut val = vec![0.0; n];
        let mut der = vec![0.0; n];
        for m in 0..n {
            let mut v = 1.0;
            let mut d = 0.0;
            for p in 0..n {
                if p == m {
                    continue;
                }
                let denom = nodes[m] - nodes[p];
                let factor = (xi - nodes[p]) / denom;
                // product rule, accumulated incrementally
                d = d * factor + v / denom;
                v *= factor;
            }
            val[m] = v;
            der[m] = d;
        }
        (val, der)
    }
}

/// `k+1` equally spaced nodes on [-1, 1].
pub fn uniform_nodes(k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=k).map(|m| -1.0 + 2.0 * m as f64 / k as f64).collect();
    v[k] = 1.0;
    v
}

/// A square banded matrix with `kl` sub- and `ku` super-diagonals and a right side.
///
/// Storage follows LAPACK's `gbtrf` layout with `kl` extra rows for fill-in.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    rhs: Vec<f64>,
}

/// Output of [`BandedSystem::solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSolution {
    pub x: Vec<f64>,
    /// `||Ax - b||_inf / ||b||_inf` (absolute when `b = 0`).
    pub relative_residual: f64,
}

/// Relative pivot threshold for declaring a row singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

impl BandedSystem {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedSystem {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
            rhs: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i <= j + self.kl && j <= i + self.ku
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Add to entry `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j);
        self.ab[s] += v;
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn rhs_mut(&mut self) -> &mut [f64] {
        &mut self.rhs
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    fn row_norm(&self, i: usize) -> f64 {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        (lo..=hi).map(|j| self.get(i, j).abs()).fold(0.0, f64::max)
    }

    /// Banded LU with partial pivoting inside the band.
    pub fn solve(&self) -> Result<BandedSolution> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let norms: Vec<f64> = (0..n).map(|i| self.row_norm(i)).collect();
        if let Some(row) = norms.iter().position(|v| *v == 0.0) {
            return Err(FveError::SingularSystem { row });
        }
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut ipiv = vec![0usize; n];
        let kv = kl + ku;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = j;
            let mut best = a.ab[a.slot(j, j)].abs();
            for t in 1..=km {
                let v = a.ab[a.slot(j + t, j)].abs();
                if v > best {
                    best = v;
                    p = j + t;
                }
            }
            if best <= PIVOT_TOLERANCE * norms[perm[p]] {
                return Err(FveError::SingularSystem { row: perm[p] });
            }
            ipiv[j] = p;
            ju = ju.max((p + ku).min(n - 1));
            if p != j {
                perm.swap(p, j);
                for c in j..=ju {
                    let (s1, s2) = (a.slot(j, c), a.slot(p, c));
                    a.ab.swap(s1, s2);
                }
            }
            let pivot = a.ab[a.slot(j, j)];
            for t in 1..=km {
                let s = a.slot(j + t, j);
                a.ab[s] /= pivot;
            }
            for c in j + 1..=ju {
                let u = a.ab[a.slot(j, c)];
                if u == 0.0 {
                    continue;
                }
                for t in 1..=km {
                    let l = a.ab[a.slot(j + t, j)];
                    let s = a.slot(j + t, c);
                    a.ab[s] -= l * u;
                }
            }
        }
        let mut x = self.rhs.clone();
        for j in 0..n {
            let p = ipiv[j];
            if p != j {
                x.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            for t in 1..=km {
                x[j + t] -= a.ab[a.slot(j + t, j)] * x[j];
            }
        }
        for j in (0..n).rev() {
            x[j] /= a.ab[a.slot(j, j)];
            let lo = j.saturating_sub(kv);
            for i in lo..j {
                x[i] -= a.ab[a.slot(i, j)] * x[j];
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(FveError::Numerical(
                "non-finite solution of banded system".into(),
            ));
        }
        let ax = self.matvec(&x);
        let res = ax
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let bnorm = self.rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let relative_residual = if bnorm > 0.0 { res / bnorm } else { res };
        Ok(BandedSolution {
            x,
            relative_residual,
        })
    }
}

/// Solve an assembled system; the free-function form of [`BandedSystem::solve`].
pub fn solve(system: &BandedSystem) -> Result<BandedSolution> {
    system.solve()
}

/// A solved trial function.
#[derive(Debug, Clone, PartialEq)]
pub struct FveSolution {
    trial: TrialSpace,
    /// Coefficients over all global nodes; endpoints carry the Dirichlet data.
    coeffs: Vec<f64>,
    relative_residual: f64,
}

impl FveSolution {
    pub fn from_coefficients(trial: TrialSpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != trial.num_dofs() {
            return Err(FveError::InvalidInput(format!(
                "expected {} coefficients, got {}",
                trial.num_dofs(),
                coeffs.len()
            )));
        }
        Ok(FveSolution {
            trial,
            coeffs,
            relative_residual: 0.0,
        })
    }

    pub fn trial(&self) -> &TrialSpace {
        &self.trial
    }

    pub fn mesh(&self) -> &PrimaryMesh {
        self.trial.mesh()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn relative_residual(&self) -> f64 {
        self.relative_residual
    }

    /// `(u_h, du_h/dx)` at reference coordinate `xi` of element `e`.
    pub fn eval_local(&self, e: usize, xi: f64) -> (f64, f64) {
        let k = self.trial.k();
        let (val, der) = self.trial.basis(xi);
        let scale = 2.0 / self.mesh().element_size(e);
        let c = &self.coeffs[e * k..=e * k + k];
        let u = c.iter().zip(&val).map(|(a, b)| a * b).sum();
        let du: f64 = c.iter().zip(&der).map(|(a, b)| a * b).sum();
        (u, du * scale)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let e = self.mesh().locate(x);
        self.eval_local(e, self.mesh().to_reference(e, x)).0
    }

    /// One-sided at element boundaries (the left element wins).
    pub fn deriv(&self, x: f64) -> f64 {
        let e = self.mesh().locate(x);
        self.eval_local(e, self.mesh().to_reference(e, x)).1
    }
}

/// Accumulates one control-volume row; boundary DOFs go to the right side.
struct RowWriter<'a> {
    sys: &'a mut BandedSystem,
    row: usize,
    last: usize,
    g_left: f64,
    g_right: f64,
}

impl RowWriter<'_> {
    fn add(&mut self, node: usize, v: f64) {
        if node == 0 {
            self.sys.rhs[self.row] -= v * self.g_left;
        } else if node == self.last {
            self.sys.rhs[self.row] -= v * self.g_right;
        } else {
            self.sys.add(self.row, node - 1, v);
        }
    }
}

/// Assemble against explicit trial space and dual mesh, without scheme checks.
pub fn assemble_with(
    problem: &BvpProblem,
    trial: &TrialSpace,
    dual: &DualMesh,
    rule: &QuadratureRule,
) -> Result<BandedSystem> {
    let mesh = trial.mesh();
    let k = trial.k();
    if dual.k() != k {
        return Err(FveError::InvalidInput(format!(
            "dual mesh has {} points per element, trial space has order {k}",
            dual.k()
        )));
    }
    let ne = mesh.num_elements();
    let n = trial.num_interior_dofs();
    let mut sys = BandedSystem::new(n, k, k);
    let last = trial.num_dofs() - 1;
    let reference: Vec<f64> = (0..k)
        .map(|j| mesh.to_reference(0, dual.dual_point(0, j)))
        .collect();

    for d in 0..n {
        let mut w = RowWriter {
            sys: &mut sys,
            row: d,
            last,
            g_left: problem.g_left,
            g_right: problem.g_right,
        };
        let (el, jl) = (d / k, d % k);
        let (er, jr) = ((d + 1) / k, (d + 1) % k);
        let (gl, gr) = (dual.dual_point(el, jl), dual.dual_point(er, jr));

        // flux terms at the two dual points
        for (e, xi_ref, g, sign) in [(el, jl, gl, 1.0), (er, jr, gr, -1.0)] {
            let xi = if e == 0 {
                reference[xi_ref]
            } else {
                mesh.to_reference(e, g)
            };
            let (_, der) = trial.basis(xi);
            let scale = sign * (problem.p)(g) * 2.0 / mesh.element_size(e);
            for (m, dm) in der.iter().enumerate() {
                w.add(trial.global_index(e, m), scale * dm);
            }
        }

        // volume terms, split at the element boundary when the cell straddles it
        let pieces: Vec<(usize, f64, f64)> = if el == er {
            vec![(el, gl, gr)]
        } else {
            vec![(el, gl, mesh.element(el).1), (er, mesh.element(er).0, gr)]
        };
        let mut load = 0.0;
        for (e, a, b) in pieces {
            let scale = 2.0 / mesh.element_size(e);
            for (x, wt) in rule.mapped(a, b) {
                let xi = mesh.to_reference(e, x);
                let (val, der) = trial.basis(xi);
                let (qx, rx) = ((problem.q)(x), (problem.r)(x));
                for m in 0..=k {
                    w.add(
                        trial.global_index(e, m),
                        wt * (qx * der[m] * scale + rx * val[m]),
                    );
                }
                load += wt * (problem.f)(x);
            }
        }
        w.sys.rhs[d] += load;
        debug_assert!(el < ne);
    }
    Ok(sys)
}

/// Assemble the FVE system for `spec` on `mesh`.
pub fn assemble(
    problem: &BvpProblem,
    mesh: &PrimaryMesh,
    spec: &SchemeSpec,
    opts: SolveOptions,
) -> Result<BandedSystem> {
    let trial = TrialSpace::with_choice(mesh, spec, opts.trial_nodes)?;
    let dual = crate::mesh::dual_mesh(mesh, spec)?;
    check_interval(problem, mesh)?;
    assemble_with(problem, &trial, &dual, &opts.rule(spec.k)?)
}

fn check_interval(problem: &BvpProblem, mesh: &PrimaryMesh) -> Result<()> {
    let (a, b) = problem.interval;
    let tol = 1e-12 * (b - a).abs().max(1.0);
    if (mesh.left() - a).abs() > tol || (mesh.right() - b).abs() > tol {
        return Err(FveError::InvalidInput(format!(
            "mesh spans [{}, {}] but the problem is posed on [{a}, {b}]",
            mesh.left(),
            mesh.right()
        )));
    }
    Ok(())
}

/// Solve on an explicit trial space and dual mesh.
pub fn fve_solve_with(
    problem: &BvpProblem,
    trial: &TrialSpace,
    dual: &DualMesh,
    rule: &QuadratureRule,
) -> Result<FveSolution> {
    let sys = assemble_with(problem, trial, dual, rule)?;
    let sol = sys.solve()?;
    let mut coeffs = Vec::with_capacity(trial.num_dofs());
    coeffs.push(problem.g_left);
    coeffs.extend_from_slice(&sol.x);
    coeffs.push(problem.g_right);
    Ok(FveSolution {
        trial: trial.clone(),
        coeffs,
        relative_residual: sol.relative_residual,
    })
}

/// Assemble, solve and wrap the FVE solution.
pub fn fve_solve(
    problem: &BvpProblem,
    mesh: &PrimaryMesh,
    spec: &SchemeSpec,
    opts: SolveOptions,
) -> Result<FveSolution> {
    check_interval(problem, mesh)?;
    let trial = TrialSpace::with_choice(mesh, spec, opts.trial_nodes)?;
    let dual = crate::mesh::dual_mesh(mesh, spec)?;
    fve_solve_with(problem, &trial, &dual, &opts.rule(spec.k)?)
}

/// Row-wise flux balance of a solved `u_h`:
/// `p u_h'(g_d) - p u_h'(g_{d+1}) + int (q u_h' + r u_h) - int f` per interior volume.
pub fn conservation_residuals(
    problem: &BvpProblem,
    sol: &FveSolution,
    dual: &DualMesh,
    rule: &QuadratureRule,
) -> Vec<f64> {
    let mesh = sol.mesh();
    let k = dual.k();
    let n = dual.num_test_dofs();
    let deriv_at = |e: usize, x: f64| sol.eval_local(e, mesh.to_reference(e, x)).1;
    (0..n)
        .map(|d| {
            let (el, er) = (d / k, (d + 1) / k);
            let (gl, gr) = (dual.dual_point(el, d % k), dual.dual_point(er, (d + 1) % k));
            let mut v = (problem.p)(gl) * deriv_at(el, gl) - (problem.p)(gr) * deriv_at(er, gr);
            let pieces: Vec<(usize, f64, f64)> = if el == er {
                vec![(el, gl, gr)]
            } else {
                vec![(el, gl, mesh.element(el).1), (er, mesh.element(er).0, gr)]
            };
            for (e, a, b) in pieces {
                for (x, w) in rule.mapped(a, b) {
                    let (u, du) = sol.eval_local(e, mesh.to_reference(e, x));
                    v += w * ((problem.q)(x) * du + (problem.r)(x) * u - (problem.f)(x));
                }
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::uniform_mesh;
    use crate::scheme::preset;
    use approx::assert_abs_diff_eq;

    fn constant(c: f64) -> ScalarFn {
        scalar_fn(move |_| c)
    }

    fn poisson(f: f64, g_left: f64, g_right: f64) -> BvpProblem {
        BvpProblem {
            name: "poisson".into(),
            interval: (0.0, 1.0),
            p: constant(1.0),
            dp: Some(constant(0.0)),
            q: constant(0.0),
            dq: Some(constant(0.0)),
            r: constant(0.0),
            f: constant(f),
            g_left,
            g_right,
            exact: None,
        }
    }

    #[test]
    fn identity_band() {
        let mut s = BandedSystem::new(4, 1, 2);
        for i in 0..4 {
            s.add(i, i, 1.0);
        }
        s.rhs_mut()[0] = 1.0;
        let sol = s.solve().unwrap();
        assert_eq!(sol.x, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn pivoting_is_needed_and_handled() {
        // zero on the first diagonal entry
        let mut s = BandedSystem::new(3, 1, 1);
        s.add(0, 1, 1.0);
        s.add(1, 0, 1.0);
        s.add(1, 1, 1.0);
        s.add(1, 2, 1.0);
        s.add(2, 1, 2.0);
        s.add(2, 2, 1.0);
        s.rhs_mut().copy_from_slice(&[2.0, 6.0, 7.0]);
        let sol = s.solve().unwrap();
        for (x, e) in sol.x.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*x, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn linear_solution_is_reproduced() {
        let prob = poisson(0.0, 0.0, 1.0);
        for name in ["gauss-1", "scheme-3-1", "scheme-4-1", "scheme-6-1"] {
            let spec = preset(name).unwrap();
            let mesh = uniform_mesh(5, 0.0, 1.0).unwrap();
            let sol = fve_solve(&prob, &mesh, &spec, SolveOptions::default()).unwrap();
            assert!(sol.relative_residual() < 1e-12);
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                assert_abs_diff_eq!(sol.eval(x), x, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn midpoint_poisson_residual() {
        let prob = poisson(1.0, 0.0, 0.0);
        let mesh = uniform_mesh(4, 0.0, 1.0).unwrap();
        let spec = preset("gauss-1").unwrap();
        let sys = assemble(&prob, &mesh, &spec, SolveOptions::default()).unwrap();
        assert_eq!(sys.dim(), 3);
        let sol = sys.solve().unwrap();
        assert!(sol.relative_residual < 1e-12);
        // the linear FVE solution of -u'' = 1 is nodally exact: x(1-x)/2
        for (i, v) in sol.x.iter().enumerate() {
            let x = (i + 1) as f64 * 0.25;
            assert_abs_diff_eq!(*v, 0.5 * x * (1.0 - x), epsilon = 1e-14);
        }
    }

    #[test]
    fn bandwidth_is_structural() {
        let prob = poisson(1.0, 0.0, 0.0);
        let mesh = uniform_mesh(3, 0.0, 1.0).unwrap();
        let spec = preset("scheme-5-1").unwrap();
        let sys = assemble(&prob, &mesh, &spec, SolveOptions::default()).unwrap();
        assert_eq!(sys.lower_bandwidth(), 5);
        assert_eq!(sys.upper_bandwidth(), 5);
        assert_eq!(sys.dim(), 14);
    }

    #[test]
    fn duplicated_dual_point_is_singular() {
        let prob = poisson(1.0, 0.0, 0.0);
        let mesh = uniform_mesh(3, 0.0, 1.0).unwrap();
        let trial = TrialSpace::with_nodes(&mesh, uniform_nodes(2)).unwrap();
        let dual = DualMesh::from_reference(&mesh, &[0.3, 0.3]);
        let err = fve_solve_with(&prob, &trial, &dual, &gauss_legendre(5).unwrap()).unwrap_err();
        assert!(matches!(err, FveError::SingularSystem { .. }), "{err}");
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let mut prob = poisson(0.0, 0.0, 0.0);
        prob.r = constant(2.0);
        let mesh = uniform_mesh(4, 0.0, 1.0).unwrap();
        let sol = fve_solve(
            &prob,
            &mesh,
            &preset("scheme-4-1").unwrap(),
            SolveOptions::default(),
        )
        .unwrap();
        assert!(sol.coefficients().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn partition_of_unity_and_continuity() {
        let mesh = uniform_mesh(3, 0.0, 1.0).unwrap();
        let trial = TrialSpace::new(&mesh, &preset("scheme-5-1").unwrap()).unwrap();
        for i in 0..=10 {
            let xi = -1.0 + 0.2 * i as f64;
            let (v, d) = trial.basis(xi);
            assert_abs_diff_eq!(v.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(d.iter().sum::<f64>(), 0.0, epsilon = 1e-11);
        }
        let coeffs: Vec<f64> = (0..trial.num_dofs())
            .map(|i| (i as f64 * 0.37).sin())
            .collect();
        let sol = FveSolution::from_coefficients(trial, coeffs).unwrap();
        for e in 0..2 {
            let left = sol.eval_local(e, 1.0).0;
            let right = sol.eval_local(e + 1, -1.0).0;
            assert_abs_diff_eq!(left, right, epsilon = 1e-12);
        }
    }

    #[test]
    fn quadrature_size_must_cover_degree() {
        assert!(SolveOptions {
            quad_points: Some(2),
            ..Default::default()
        }
        .rule(3)
        .is_err());
        assert_eq!(SolveOptions::default().rule(3).unwrap().len(), 6);
    }

    #[test]
    fn mismatched_interval() {
        let prob = poisson(1.0, 0.0, 0.0);
        let mesh = uniform_mesh(4, 0.0, 2.0).unwrap();
        assert!(fve_solve(
            &prob,
            &mesh,
            &preset("gauss-2").unwrap(),
            SolveOptions::default()
        )
        .is_err());
    }
}
