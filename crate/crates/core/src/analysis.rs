//! Error norms, pointwise superconvergence errors, convergence orders, error
//! profiles, discrete test-space norms and a dense inf-sup estimate.

use crate::assembly::{
    assemble_with, BvpProblem, ExactSolution, FveSolution, SolveOptions, TrialSpace,
};
use crate::error::{FveError, Result};
use crate::mesh::{dual_mesh, PrimaryMesh};
use crate::mmd::SuperclosePoly;
use crate::refelem::QuadratureRule;
use crate::scheme::{format_real, function_value_points, max_orthogonality_order, SchemeSpec};
use nalgebra::DMatrix;

/// Largest dense inf-sup problem accepted (`N k`).
pub const INF_SUP_MAX_DOFS: usize = 2000;

/// A function given element by element in reference coordinates.
pub trait PiecewiseFunction {
    fn mesh(&self) -> &PrimaryMesh;
    /// `(value, d/dx)` at reference coordinate `xi` of element `e`.
    fn eval_local(&self, e: usize, xi: f64) -> (f64, f64);
}

impl PiecewiseFunction for FveSolution {
    fn mesh(&self) -> &PrimaryMesh {
        FveSolution::mesh(self)
    }

    fn eval_local(&self, e: usize, xi: f64) -> (f64, f64) {
        FveSolution::eval_local(self, e, xi)
    }
}

impl PiecewiseFunction for SuperclosePoly {
    fn mesh(&self) -> &PrimaryMesh {
        SuperclosePoly::mesh(self)
    }

    fn eval_local(&self, e: usize, xi: f64) -> (f64, f64) {
        SuperclosePoly::eval_local(self, e, xi)
    }
}

/// `(|a - b|_1, ||a - b||_0)` by element-wise quadrature, with `b` given per point.
fn norms_against<A, B>(a: &A, b: B, rule: &QuadratureRule) -> (f64, f64)
where
    A: PiecewiseFunction + ?Sized,
    B: Fn(usize, f64, f64) -> (f64, f64),
{
    let mesh = a.mesh();
    let (mut h1, mut l2) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        let half = 0.5 * mesh.element_size(e);
        for (&xi, &w) in rule.nodes().iter().zip(rule.weights()) {
            let x = mesh.map_to_element(e, xi);
            let (va, da) = a.eval_local(e, xi);
            let (vb, db) = b(e, xi, x);
            h1 += w * half * (da - db).powi(2);
            l2 += w * half * (va - vb).powi(2);
        }
    }
    (h1.sqrt(), l2.sqrt())
}

/// `|u - w|_1` over the mesh of `w`.
pub fn h1_seminorm_error<W: PiecewiseFunction + ?Sized>(
    u: &ExactSolution,
    w: &W,
    rule: &QuadratureRule,
) -> f64 {
    norms_against(w, |_, _, x| ((u.u)(x), (u.du)(x)), rule).0
}

/// `||u - w||_0` over the mesh of `w`.
pub fn l2_error<W: PiecewiseFunction + ?Sized>(
    u: &ExactSolution,
    w: &W,
    rule: &QuadratureRule,
) -> f64 {
    norms_against(w, |_, _, x| ((u.u)(x), (u.du)(x)), rule).1
}

/// `(|a - b|_1, ||a - b||_0)` for two piecewise functions on the same mesh.
pub fn difference_norms<A, B>(a: &A, b: &B, rule: &QuadratureRule) -> (f64, f64)
where
    A: PiecewiseFunction + ?Sized,
    B: PiecewiseFunction + ?Sized,
{
    norms_against(a, |e, xi, _| b.eval_local(e, xi), rule)
}

/// `(max |u' - u_h'|` over the dual points, `max |u - u_h|` over the value points`)`.
pub fn superconv_point_errors(
    sol: &FveSolution,
    u: &ExactSolution,
    spec: &SchemeSpec,
) -> Result<(f64, f64)> {
    let dual = spec.dual_points()?;
    let value = function_value_points(spec)?;
    Ok(point_errors(sol, u, &dual, &value))
}

fn point_errors(sol: &FveSolution, u: &ExactSolution, dual: &[f64], value: &[f64]) -> (f64, f64) {
    let mesh = sol.mesh();
    let (mut p1, mut p0) = (0.0f64, 0.0f64);
    for e in 0..mesh.num_elements() {
        for &g in dual {
            let x = mesh.map_to_element(e, g);
            p1 = p1.max((sol.eval_local(e, g).1 - (u.du)(x)).abs());
        }
        for &z in value {
            let x = mesh.map_to_element(e, z);
            p0 = p0.max((sol.eval_local(e, z).0 - (u.u)(x)).abs());
        }
    }
    (p1, p0)
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub err_h1: f64,
    pub err_l2: f64,
    pub err_ui_h1: f64,
    pub err_ui_l2: f64,
    /// Max derivative error over the dual points.
    pub err_p1: f64,
    /// Max value error over the value superconvergent points.
    pub err_p0: f64,
}

impl ErrorReport {
    pub fn columns(&self) -> [f64; 6] {
        [
            self.err_h1,
            self.err_l2,
            self.err_ui_h1,
            self.err_ui_l2,
            self.err_p1,
            self.err_p0,
        ]
    }
}

/// All error columns of one solve.
pub fn error_report(
    sol: &FveSolution,
    ui: &SuperclosePoly,
    u: &ExactSolution,
    spec: &SchemeSpec,
    rule: &QuadratureRule,
) -> Result<ErrorReport> {
    let (err_h1, err_l2) = norms_against(sol, |_, _, x| ((u.u)(x), (u.du)(x)), rule);
    let (err_ui_h1, err_ui_l2) = difference_norms(sol, ui, rule);
    let (err_p1, err_p0) = superconv_point_errors(sol, u, spec)?;
    Ok(ErrorReport {
        h: sol.mesh().max_h(),
        err_h1,
        err_l2,
        err_ui_h1,
        err_ui_l2,
        err_p1,
        err_p0,
    })
}

/// Observed orders `log(e_{j-1}/e_j) / log(h_{j-1}/h_j)`; `None` where undefined.
pub fn eoc(errors: &[f64], hs: &[f64]) -> Result<Vec<Option<f64>>> {
    if errors.len() != hs.len() || errors.len() < 2 {
        return Err(FveError::InvalidInput(format!(
            "eoc needs two equal-length lists of at least 2 entries, got {} and {}",
            errors.len(),
            hs.len()
        )));
    }
    Ok(errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| {
            if e[0] > 0.0 && e[1] > 0.0 && h[0] > 0.0 && h[1] > 0.0 && h[0] != h[1] {
                Some((e[0] / e[1]).ln() / (h[0] / h[1]).ln())
            } else {
                None
            }
        })
        .collect())
}

/// One sample of a reference-element error profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub xi: f64,
    pub abs_err_value: f64,
    pub abs_err_deriv: f64,
    pub element_index: usize,
}

/// Pointwise errors at `samples` uniform reference points in every element.
pub fn error_profile(
    sol: &FveSolution,
    u: &ExactSolution,
    samples: usize,
) -> Result<Vec<ProfileRow>> {
    if samples < 8 {
        return Err(FveError::InvalidParameter(format!(
            "at least 8 samples per element are required, got {samples}"
        )));
    }
    let mesh = sol.mesh();
    let mut rows = Vec::with_capacity(samples * mesh.num_elements());
    for e in 0..mesh.num_elements() {
        for s in 0..samples {
            let xi = -1.0 + 2.0 * s as f64 / (samples - 1) as f64;
            let x = mesh.map_to_element(e, xi);
            let (v, d) = sol.eval_local(e, xi);
            rows.push(ProfileRow {
                xi,
                abs_err_value: (v - (u.u)(x)).abs(),
                abs_err_deriv: (d - (u.du)(x)).abs(),
                element_index: e,
            });
        }
    }
    Ok(rows)
}

pub const PROFILE_HEADER: &str = "xi,abs_err_value,abs_err_deriv,element_index";

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_real(r.xi),
            format_real(r.abs_err_value),
            format_real(r.abs_err_deriv),
            r.element_index
        ));
    }
    out
}

/// Control-volume values `v_{1,0}, v_{1,1}, ..., v_{N,k}` of a test function.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTestFunction {
    k: usize,
    values: Vec<f64>,
}

impl DiscreteTestFunction {
    /// From the `Nk - 1` interior values; the two boundary volumes carry zero.
    pub fn from_interior(k: usize, interior: &[f64]) -> Self {
        let mut values = Vec::with_capacity(interior.len() + 2);
        values.push(0.0);
        values.extend_from_slice(interior);
        values.push(0.0);
        DiscreteTestFunction { k, values }
    }

    /// From all `Nk + 1` values, boundary volumes included.
    pub fn from_values(k: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 || values.len() < 2 || (values.len() - 1) % k != 0 {
            return Err(FveError::InvalidInput(format!(
                "{} values do not fit Nk + 1 control volumes for k = {k}",
                values.len()
            )));
        }
        Ok(DiscreteTestFunction { k, values })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `[v]` at each dual point, `v_after - v_before`.
    pub fn jumps(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// `(|v|_{1,T*}, ||v||_{0,T*})`.
pub fn dual_norms(v: &DiscreteTestFunction, mesh: &PrimaryMesh) -> Result<(f64, f64)> {
    let k = v.k();
    let n = mesh.num_elements();
    if v.values().len() != n * k + 1 {
        return Err(FveError::InvalidInput(format!(
            "test function has {} values, mesh needs {}",
            v.values().len(),
            n * k + 1
        )));
    }
    let mut semi = 0.0;
    for (d, jump) in v.jumps().iter().enumerate() {
        semi += jump * jump / mesh.element_size(d / k);
    }
    let mut l2 = 0.0;
    for (idx, val) in v.values().iter().enumerate().skip(1) {
        l2 += mesh.element_size((idx - 1) / k) * val * val;
    }
    Ok((semi.sqrt(), l2.sqrt()))
}

/// Reference quadrature weights attached to the dual points of `spec`.
pub fn dual_weights(spec: &SchemeSpec) -> Result<Vec<f64>> {
    let report = max_orthogonality_order(&spec.dual_points()?)?;
    if report.max_order.is_none() {
        return Err(FveError::NotApplicable(format!(
            "dual points of `{}` admit no positive quadrature weights",
            spec.label
        )));
    }
    Ok(report.weights)
}

/// `Pi*_T w`: jumps `[w_{i,j}] = (h_i/2) A_j w'(g_{i,j})` accumulated from the left.
pub fn pi_t_star<W: PiecewiseFunction + ?Sized>(
    w: &W,
    spec: &SchemeSpec,
) -> Result<DiscreteTestFunction> {
    let weights = dual_weights(spec)?;
    let g = spec.dual_points()?;
    let mesh = w.mesh();
    let k = spec.k;
    let mut values = Vec::with_capacity(mesh.num_elements() * k + 1);
    let mut acc = 0.0;
    values.push(acc);
    for e in 0..mesh.num_elements() {
        let half = 0.5 * mesh.element_size(e);
        for j in 0..k {
            acc += half * weights[j] * w.eval_local(e, g[j]).1;
            values.push(acc);
        }
    }
    DiscreteTestFunction::from_values(k, values)
}

/// `|w|_{1,G}`, the dual-point quadrature seminorm.
pub fn discrete_h1_seminorm<W: PiecewiseFunction + ?Sized>(
    w: &W,
    spec: &SchemeSpec,
) -> Result<f64> {
    let weights = dual_weights(spec)?;
    let g = spec.dual_points()?;
    let mesh = w.mesh();
    let mut s = 0.0;
    for e in 0..mesh.num_elements() {
        let half = 0.5 * mesh.element_size(e);
        for j in 0..spec.k {
            s += half * weights[j] * w.eval_local(e, g[j]).1.powi(2);
        }
    }
    Ok(s.sqrt())
}

/// `|w|_1` by exact quadrature of the piecewise polynomial.
pub fn h1_seminorm<W: PiecewiseFunction + ?Sized>(w: &W, rule: &QuadratureRule) -> f64 {
    norms_against(w, |_, _, _| (0.0, 0.0), rule).0
}

/// Smallest singular value of the FVE matrix measured in the `H^1` trial norm
/// and the `||.||_{1,T*}` test norm.
pub fn inf_sup_estimate(
    problem: &BvpProblem,
    mesh: &PrimaryMesh,
    spec: &SchemeSpec,
    opts: SolveOptions,
) -> Result<f64> {
    let k = spec.k;
    let ne = mesh.num_elements();
    if ne * k > INF_SUP_MAX_DOFS {
        return Err(FveError::InvalidParameter(format!(
            "inf-sup estimate is dense; N k = {} exceeds {INF_SUP_MAX_DOFS}",
            ne * k
        )));
    }
    let trial = TrialSpace::with_choice(mesh, spec, opts.trial_nodes)?;
    let dual = dual_mesh(mesh, spec)?;
    let rule = opts.rule(k)?;
    let mut homogeneous = problem.clone();
    homogeneous.g_left = 0.0;
    homogeneous.g_right = 0.0;
    let sys = assemble_with(&homogeneous, &trial, &dual, &rule)?;
    let n = sys.dim();
    let a = DMatrix::from_fn(n, n, |i, j| sys.get(i, j));

    // trial Gram matrix in the full H^1 norm
    let mut gw = DMatrix::<f64>::zeros(n, n);
    for e in 0..ne {
        let half = 0.5 * mesh.element_size(e);
        for (&xi, &w) in rule.nodes().iter().zip(rule.weights()) {
            let (val, der) = trial.basis(xi);
            for a_ in 0..=k {
                let ga = trial.global_index(e, a_);
                if ga == 0 || ga == n + 1 {
                    continue;
                }
                for b_ in 0..=k {
                    let gb = trial.global_index(e, b_);
                    if gb == 0 || gb == n + 1 {
                        continue;
                    }
                    let d = der[a_] * der[b_] / (half * half) + val[a_] * val[b_];
                    gw[(ga - 1, gb - 1)] += w * half * d;
                }
            }
        }
    }

    // test Gram matrix: jumps over all Nk dual points, values per volume
    let mut gv = DMatrix::<f64>::zeros(n, n);
    for d in 0..ne * k {
        let hinv = 1.0 / mesh.element_size(d / k);
        // jump d = v[d+1] - v[d] in full indexing; interior m maps to full m+1
        let idx: Vec<(usize, f64)> = [(d + 1, 1.0), (d, -1.0)]
            .into_iter()
            .filter(|(f, _)| *f >= 1 && *f <= n)
            .map(|(f, s)| (f - 1, s))
            .collect();
        for &(i, si) in &idx {
            for &(j, sj) in &idx {
                gv[(i, j)] += hinv * si * sj;
            }
        }
    }
    for m in 0..n {
        gv[(m, m)] += mesh.element_size(m / k);
    }

    let lw = gw
        .cholesky()
        .ok_or_else(|| FveError::Numerical("trial Gram matrix is not positive definite".into()))?
        .l();
    let lv = gv
        .cholesky()
        .ok_or_else(|| FveError::Numerical("test Gram matrix is not positive definite".into()))?
        .l();
    // Lv^{-1} A Lw^{-T}
    let left = lv
        .solve_lower_triangular(&a)
        .ok_or_else(|| FveError::Numerical("test Cholesky factor is singular".into()))?;
    let right_t = lw
        .solve_lower_triangular(&left.transpose())
        .ok_or_else(|| FveError::Numerical("trial Cholesky factor is singular".into()))?;
    let svd = right_t.svd(false, false);
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !smin.is_finite() {
        return Err(FveError::Numerical(
            "inf-sup singular values are not finite".into(),
        ));
    }
    Ok(smin)
}
