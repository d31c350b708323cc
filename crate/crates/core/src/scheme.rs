//! FVE scheme designs.
//!
//! A [`SchemeSpec`] fixes the order `k` and the symmetric reference points:
//! the dual (derivative superconvergent) points `G`, optionally the nodes `D`
//! of the trial-to-test projection, and optionally the value nodes used as
//! computing nodes. This module checks the moment form of the orthogonal
//! condition and implements the scheme families and construction methods.

use crate::error::{FveError, Result};
use crate::mmd;
use crate::refelem::{bisect, gauss_legendre, BISECTION_MAX_ITER, BISECTION_WIDTH};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Witness weights must exceed this margin to count as strictly increasing `D`.
pub const WITNESS_MARGIN: f64 = 1e-10;
/// Residual below which an extra moment equation is considered satisfied.
pub const MOMENT_TOLERANCE: f64 = 1e-10;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Order and symmetric point parameters of an FVE scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub k: usize,
    /// `1 > alpha_1 > ... > alpha_j0 > 0`, the positive dual abscissae.
    pub alphas: Vec<f64>,
    /// `1 > a_1 > ... > a_{l-1} > 0` locating the projection nodes `D`.
    #[serde(default)]
    pub pi_star_params: Option<Vec<f64>>,
    /// `1 > a~_1 > ... > a~_{l-1} > 0` locating the value nodes.
    #[serde(default)]
    pub value_node_params: Option<Vec<f64>>,
    #[serde(default)]
    pub label: String,
}

/// Reference points of a scheme on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLayout {
    pub k: usize,
    /// `G_1 < ... < G_k`.
    pub dual: Vec<f64>,
    /// `D_0 = -1 < ... < D_k = 1`, when projection parameters are given.
    pub pi_star: Option<Vec<f64>>,
    /// Value nodes including `+-1`, when value parameters are given.
    pub value_nodes: Option<Vec<f64>>,
}

/// `l` with `k = 2l - 1` or `k = 2l`.
pub fn half_order(k: usize) -> usize {
    k.div_ceil(2)
}

/// Number of free dual parameters `j0`.
pub fn dual_param_count(k: usize) -> usize {
    if k % 2 == 1 {
        half_order(k) - 1
    } else {
        k / 2
    }
}

/// Number of projection / value node parameters, `l - 1`.
pub fn node_param_count(k: usize) -> usize {
    half_order(k).saturating_sub(1)
}

fn check_descending(name: &str, params: &[f64], expected: usize) -> Result<()> {
    if params.len() != expected {
        return Err(FveError::InvalidSpec(format!(
            "{name}: expected {expected} parameters, got {}",
            params.len()
        )));
    }
    if params.iter().any(|v| !v.is_finite()) {
        return Err(FveError::InvalidSpec(format!(
            "{name}: non-finite parameter"
        )));
    }
    let mut prev = 1.0;
    for &v in params {
        if !(v < prev) {
            return Err(FveError::InvalidSpec(format!(
                "{name}: parameters must satisfy 1 > p_1 > ... > 0, got {params:?}"
            )));
        }
        prev = v;
    }
    if let Some(&last) = params.last() {
        if !(last > 0.0) {
            return Err(FveError::InvalidSpec(format!(
                "{name}: parameters must be positive, got {params:?}"
            )));
        }
    }
    Ok(())
}

/// Symmetric point set from positive parameters; `with_zero` inserts the midpoint.
fn symmetric_points(params: &[f64], with_zero: bool, with_ends: bool) -> Vec<f64> {
    let mut pts = Vec::with_capacity(2 * params.len() + 3);
    if with_ends {
        pts.push(-1.0);
    }
    pts.extend(params.iter().map(|a| -a));
    if with_zero {
        pts.push(0.0);
    }
    pts.extend(params.iter().rev().copied());
    if with_ends {
        pts.push(1.0);
    }
    pts
}

impl SchemeSpec {
    pub fn new(k: usize, alphas: Vec<f64>) -> Result<Self> {
        let spec = SchemeSpec {
            k,
            alphas,
            pi_star_params: None,
            value_node_params: None,
            label: String::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_value_node_params(mut self, params: Vec<f64>) -> Result<Self> {
        check_descending("value_node_params", &params, node_param_count(self.k))?;
        self.value_node_params = Some(params);
        Ok(self)
    }

    pub fn with_pi_star_params(mut self, params: Vec<f64>) -> Result<Self> {
        check_descending("pi_star_params", &params, node_param_count(self.k))?;
        self.pi_star_params = Some(params);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(FveError::InvalidSpec("order k must be at least 1".into()));
        }
        check_descending("alphas", &self.alphas, dual_param_count(self.k))?;
        if let Some(a) = &self.pi_star_params {
            check_descending("pi_star_params", a, node_param_count(self.k))?;
        }
        if let Some(a) = &self.value_node_params {
            check_descending("value_node_params", a, node_param_count(self.k))?;
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<ReferenceLayout> {
        reference_dual_points(self)
    }

    /// Reference dual points `G`.
    pub fn dual_points(&self) -> Result<Vec<f64>> {
        Ok(self.layout()?.dual)
    }

    /// JSON with every real written at 17 significant digits.
    pub fn to_json_string(&self) -> String {
        fn list(v: &[f64]) -> String {
            let items: Vec<String> = v.iter().map(|x| format_real(*x)).collect();
            format!("[{}]", items.join(", "))
        }
        fn opt(v: &Option<Vec<f64>>) -> String {
            v.as_deref().map(list).unwrap_or_else(|| "null".to_string())
        }
        let label = serde_json::to_string(&self.label).expect("string serialization");
        format!(
            "{{\n  \"k\": {},\n  \"alphas\": {},\n  \"pi_star_params\": {},\n  \"value_node_params\": {},\n  \"label\": {}\n}}\n",
            self.k,
            list(&self.alphas),
            opt(&self.pi_star_params),
            opt(&self.value_node_params),
            label
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: SchemeSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// A real in scientific notation with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Assemble `G` (and `D`, value nodes when present) from a spec.
pub fn reference_dual_points(spec: &SchemeSpec) -> Result<ReferenceLayout> {
    spec.validate()?;
    let k = spec.k;
    let odd = k % 2 == 1;
    let dual = symmetric_points(&spec.alphas, odd, false);
    let pi_star = spec
        .pi_star_params
        .as_deref()
        .map(|a| symmetric_points(a, !odd, true));
    let value_nodes = spec
        .value_node_params
        .as_deref()
        .map(|a| symmetric_points(a, !odd, true));
    debug_assert_eq!(dual.len(), k);
    Ok(ReferenceLayout {
        k,
        dual,
        pi_star,
        value_nodes,
    })
}

/// Result of the moment-system feasibility search for a dual point set.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub k: usize,
    /// Largest even `r` reached by the moment equations, ignoring node ordering.
    pub moment_order: usize,
    /// Largest `r` with a strictly increasing witness `D`; `None` when even the
    /// base system only admits a non-monotone `D`.
    pub max_order: Option<usize>,
    /// Quadrature weights `A_j = D_j - D_{j-1}` attached to `G_j`.
    pub weights: Vec<f64>,
    /// Witness nodes `D_0 = -1, ..., D_k = 1` (possibly non-monotone).
    pub nodes: Vec<f64>,
}

impl OrthogonalityReport {
    /// The witness `D` when it is admissible.
    pub fn witness(&self) -> Option<&[f64]> {
        self.max_order.map(|_| self.nodes.as_slice())
    }

    /// Projection parameters `a_j = -D_j`, `j = 1..l-1`, of the witness.
    pub fn pi_star_params(&self) -> Option<Vec<f64>> {
        self.witness()
            .map(|d| d[1..=node_param_count(self.k)].iter().map(|v| -v).collect())
    }
}

/// Validate a reference dual point set and return its positive half, descending.
fn positive_half(dual: &[f64]) -> Result<Vec<f64>> {
    let k = dual.len();
    if k == 0 {
        return Err(FveError::InvalidInput("empty dual point set".into()));
    }
    if dual
        .iter()
        .any(|g| !g.is_finite() || *g <= -1.0 || *g >= 1.0)
    {
        return Err(FveError::InvalidInput(format!(
            "dual points must lie in (-1, 1): {dual:?}"
        )));
    }
    if !dual.windows(2).all(|w| w[0] < w[1]) {
        return Err(FveError::InvalidInput(format!(
            "dual points must be strictly increasing: {dual:?}"
        )));
    }
    for j in 0..k {
        if (dual[j] + dual[k - 1 - j]).abs() > SYMMETRY_TOLERANCE {
            return Err(FveError::InvalidInput(format!(
                "dual points are not symmetric: {dual:?}"
            )));
        }
    }
    let j0 = dual_param_count(k);
    let mut alphas: Vec<f64> = dual[..j0].iter().map(|g| -g).collect();
    // ensure exact pairing with the mirror entries
    for (j, a) in alphas.iter_mut().enumerate() {
        *a = 0.5 * (*a + dual[k - 1 - j]);
    }
    Ok(alphas)
}

/// Largest `r` for which a symmetric `D` satisfies the moment equations
/// `sum_j (D_j - D_{j-1}) G_j^{i+1} = 2/(i+2)` for all odd `i <= r`.
///
/// The base system (`r = 2(l-1)`) is square in the symmetric weights and is
/// solved directly; each further even moment is tested on that solution.
pub fn max_orthogonality_order(dual: &[f64]) -> Result<OrthogonalityReport> {
    let k = dual.len();
    let alphas = positive_half(dual)?;
    let odd = k % 2 == 1;
    let l = half_order(k);
    let base = l - 1;

    // Unknown pair weights W_j at +-alpha_j; for odd k the centre weight is
    // fixed by sum(weights) = 2.
    let n = alphas.len();
    let pair = if n == 0 {
        Vec::new()
    } else {
        let mut m = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        // moments s used: odd k -> 1..=n, even k -> 0..n
        let s0 = if odd { 1 } else { 0 };
        for row in 0..n {
            let s = s0 + row;
            for (col, a) in alphas.iter().enumerate() {
                m[(row, col)] = a.powi(2 * s as i32);
            }
            rhs[row] = 1.0 / (2 * s + 1) as f64;
        }
        let sol = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| FveError::InvalidInput(format!("degenerate dual points: {dual:?}")))?;
        sol.iter().copied().collect::<Vec<f64>>()
    };
    let centre = if odd {
        Some(2.0 - 2.0 * pair.iter().sum::<f64>())
    } else {
        None
    };

    let moment_residual = |s: usize| -> f64 {
        let sum: f64 = pair
            .iter()
            .zip(&alphas)
            .map(|(w, a)| w * a.powi(2 * s as i32))
            .sum();
        sum - 1.0 / (2 * s + 1) as f64
    };
    let mut m = base;
    while m < k - 1 && moment_residual(m + 1).abs() <= MOMENT_TOLERANCE {
        m += 1;
    }
    let moment_order = 2 * m;

    let mut weights = Vec::with_capacity(k);
    weights.extend(pair.iter().copied());
    if let Some(c) = centre {
        weights.push(c);
    }
    weights.extend(pair.iter().rev().copied());
    let mut nodes = Vec::with_capacity(k + 1);
    nodes.push(-1.0);
    let mut acc = -1.0;
    for w in &weights {
        acc += w;
        nodes.push(acc);
    }
    // exact symmetry of the witness
    for j in 0..=k {
        if j < k - j {
            let v = 0.5 * (nodes[j] - nodes[k - j]);
            nodes[j] = v;
            nodes[k - j] = -v;
        } else if j == k - j {
            nodes[j] = 0.0;
        }
    }
    let monotone = weights.iter().all(|w| *w > WITNESS_MARGIN);
    Ok(OrthogonalityReport {
        k,
        moment_order,
        max_order: monotone.then_some(moment_order),
        weights,
        nodes,
    })
}

/// Whether `spec` satisfies the k-r-order orthogonal condition.
///
/// `r` may range over `k-1 ..= 2k-1`; anything above `2(k-1)` is unreachable
/// for a `k`-point rule and yields `false`.
pub fn check_orthogonality(spec: &SchemeSpec, r: usize) -> Result<bool> {
    let k = spec.k;
    if r + 1 < k || r > 2 * k - 1 {
        return Err(FveError::InvalidParameter(format!(
            "r must be in {}..={} for k = {k}, got {r}",
            k - 1,
            2 * k - 1
        )));
    }
    let report = max_orthogonality_order(&spec.dual_points()?)?;
    Ok(report.max_order.is_some_and(|m| m >= r))
}

fn attach_witness(mut spec: SchemeSpec) -> Result<SchemeSpec> {
    let report = max_orthogonality_order(&spec.dual_points()?)?;
    if let Some(a) = report.pi_star_params() {
        if check_descending("pi_star_params", &a, node_param_count(spec.k)).is_ok() {
            spec.pi_star_params = Some(a);
        }
    }
    Ok(spec)
}

/// Method I: odd order, dual points chosen freely.
pub fn design_method_i(k: usize, alphas: &[f64]) -> Result<SchemeSpec> {
    if k % 2 == 0 {
        return Err(FveError::MethodNotApplicable(format!(
            "Method I is only valid for odd order schemes (k = {k})"
        )));
    }
    let spec = SchemeSpec::new(k, alphas.to_vec())?
        .with_label(format!("method-I k={k} alphas={}", join_params(alphas)));
    attach_witness(spec)
}

/// The polynomial `xi (xi^2 - 1) prod (xi^2 - a~_j^2)` as its root list.
fn value_polynomial_roots(params: &[f64]) -> Vec<f64> {
    symmetric_points(params, true, true)
}

/// Derivative of `prod (x - z_m)` at `x`.
fn product_derivative(roots: &[f64], x: f64) -> f64 {
    (0..roots.len())
        .map(|m| {
            roots
                .iter()
                .enumerate()
                .filter(|(n, _)| *n != m)
                .map(|(_, z)| x - z)
                .product::<f64>()
        })
        .sum()
}

/// Method II: even order, value nodes chosen freely.
///
/// The dual points are the `k` critical points of the value polynomial, one
/// between each pair of consecutive roots.
pub fn design_method_ii(k: usize, value_params: &[f64]) -> Result<SchemeSpec> {
    if k % 2 == 1 {
        return Err(FveError::MethodNotApplicable(format!(
            "Method II is not valid for odd order schemes (k = {k})"
        )));
    }
    if k == 0 {
        return Err(FveError::InvalidSpec("order k must be at least 1".into()));
    }
    check_descending("value_node_params", value_params, node_param_count(k))?;
    let roots = value_polynomial_roots(value_params);
    let l = k / 2;
    let mut alphas = Vec::with_capacity(l);
    // positive critical points, from the outermost interval inwards
    for j in (l..k).rev() {
        let (a, b) = (roots[j], roots[j + 1]);
        let g = bisect(
            |x| product_derivative(&roots, x),
            a,
            b,
            BISECTION_WIDTH,
            BISECTION_MAX_ITER,
        )?;
        alphas.push(g);
    }
    let spec = SchemeSpec::new(k, alphas)?
        .with_value_node_params(value_params.to_vec())?
        .with_label(format!(
            "method-II k={k} value_params={}",
            join_params(value_params)
        ));
    attach_witness(spec)
}

/// Closed-form quartic family parameterised by the projection node `a_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticFamily {
    pub alpha1: f64,
    pub alpha2: f64,
    /// `a_1 = 4/9` gives `alpha2 = 0`, which is not an admissible scheme.
    pub degenerate: bool,
}

pub fn quartic_family(a1: f64) -> Result<QuarticFamily> {
    if !(a1 >= 4.0 / 9.0 && a1 < 5.0 / 6.0) {
        return Err(FveError::Domain(format!(
            "a1 must lie in [4/9, 5/6), got {a1}"
        )));
    }
    let alpha1 = ((1.0 + 2.0 * (a1 / (5.0 * (1.0 - a1))).sqrt()) / 3.0).sqrt();
    let inner = (1.0 - 2.0 * ((1.0 - a1) / (5.0 * a1)).sqrt()) / 3.0;
    let alpha2 = inner.max(0.0).sqrt();
    Ok(QuarticFamily {
        alpha1,
        alpha2,
        degenerate: alpha2 <= WITNESS_MARGIN,
    })
}

/// Scheme from the quartic family; rejects the degenerate boundary.
pub fn design_quartic(a1: f64) -> Result<SchemeSpec> {
    let fam = quartic_family(a1)?;
    if fam.degenerate {
        return Err(FveError::Domain(format!(
            "a1 = {a1} gives a degenerate dual point alpha2 = 0"
        )));
    }
    SchemeSpec::new(4, vec![fam.alpha1, fam.alpha2])?
        .with_pi_star_params(vec![a1])
        .map(|s| s.with_label(format!("quartic a1={a1}")))
}

/// Closed-form quintic family: `alpha2` as a function of `alpha1`.
pub fn quintic_family(alpha1: f64) -> Result<f64> {
    let lo = (5.0f64 / 7.0).sqrt();
    if !(alpha1 > lo && alpha1 < 1.0) {
        return Err(FveError::Domain(format!(
            "alpha1 must lie in (sqrt(5/7), 1), got {alpha1}"
        )));
    }
    let x = alpha1 * alpha1;
    let ratio = (x / 5.0 - 1.0 / 7.0) / (x / 3.0 - 1.0 / 5.0);
    Ok(ratio.max(0.0).sqrt())
}

pub fn design_quintic(alpha1: f64) -> Result<SchemeSpec> {
    let alpha2 = quintic_family(alpha1)?;
    let spec =
        SchemeSpec::new(5, vec![alpha1, alpha2])?.with_label(format!("quintic alpha1={alpha1}"));
    attach_witness(spec)
}

/// Dual points at the Gauss-Legendre nodes.
pub fn design_gauss(k: usize) -> Result<SchemeSpec> {
    let rule = gauss_legendre(k)?;
    let j0 = dual_param_count(k);
    let alphas: Vec<f64> = rule.nodes()[..j0].iter().map(|g| -g).collect();
    attach_witness(SchemeSpec::new(k, alphas)?.with_label(format!("gauss-{k}")))
}

fn join_params(p: &[f64]) -> String {
    p.iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &[
    "scheme-3-1",
    "scheme-4-1",
    "scheme-5-1",
    "scheme-6-1",
    "gauss-1",
    "gauss-2",
    "gauss-3",
    "gauss-4",
    "gauss-5",
    "gauss-6",
];

/// Named scheme designs.
pub fn preset(name: &str) -> Result<SchemeSpec> {
    let spec = match name {
        "scheme-3-1" => SchemeSpec::new(3, vec![(5.0f64 / 9.0).sqrt()])?
            .with_value_node_params(vec![1.0 / 3.0])?,
        "scheme-4-1" => {
            let s = 145f64.sqrt();
            SchemeSpec::new(
                4,
                vec![((15.0 + s) / 40.0).sqrt(), ((15.0 - s) / 40.0).sqrt()],
            )?
            .with_value_node_params(vec![0.5])?
        }
        "scheme-5-1" => {
            let c = 673.0 / 1344.0;
            let d = (459.0f64 / 3371.0).sqrt();
            SchemeSpec::new(5, vec![15f64.sqrt() / 4.0, 5.0 * 7f64.sqrt() / 21.0])?
                .with_value_node_params(vec![(c + d).sqrt(), (c - d).sqrt()])?
        }
        "scheme-6-1" => design_method_ii(6, &[19.0 / 20.0, 1.0 / 19.0])?,
        _ => {
            let k = name
                .strip_prefix("gauss-")
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|k| (1..=6).contains(k))
                .ok_or_else(|| FveError::UnknownPreset {
                    kind: "scheme preset",
                    name: name.to_string(),
                })?;
            design_gauss(k)?
        }
    };
    let spec = attach_witness(spec)?;
    Ok(spec.with_label(name))
}

/// The `k+1` value superconvergent points on [-1, 1]: roots of the MMD shape
/// polynomial, bracketed between consecutive dual points.
pub fn function_value_points(spec: &SchemeSpec) -> Result<Vec<f64>> {
    let shape = mmd::mmd_shape_coefficients(spec)?;
    let dual = spec.dual_points()?;
    let k = spec.k;
    let mut pts = Vec::with_capacity(k + 1);
    pts.push(-1.0);
    for w in dual.windows(2) {
        let z = bisect(
            |x| shape.eval(x),
            w[0],
            w[1],
            BISECTION_WIDTH,
            BISECTION_MAX_ITER,
        )
        .map_err(|e| FveError::IllPosedScheme(format!("value points: {e}")))?;
        pts.push(z);
    }
    pts.push(1.0);
    for j in 0..=k / 2 {
        let v = 0.5 * (pts[k - j] - pts[j]);
        if j == k - j {
            pts[j] = 0.0;
        } else {
            pts[j] = -v;
            pts[k - j] = v;
        }
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dual_layouts() {
        let s = 1.0 / 3f64.sqrt();
        let l = SchemeSpec::new(2, vec![s]).unwrap().layout().unwrap();
        assert_eq!(l.dual, vec![-s, s]);

        let l = SchemeSpec::new(3, vec![0.6]).unwrap().layout().unwrap();
        assert_eq!(l.dual, vec![-0.6, 0.0, 0.6]);

        let l = preset("scheme-5-1").unwrap().layout().unwrap();
        let expect = [
            -0.968245836551854,
            -0.629940788348712,
            0.0,
            0.629940788348712,
            0.968245836551854,
        ];
        for (g, e) in l.dual.iter().zip(expect) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-14);
        }
        let d = l.value_nodes.unwrap();
        assert_eq!(d.len(), 6);
        assert_eq!(d[0], -1.0);
    }

    #[test]
    fn ordering_violations_are_rejected() {
        assert!(matches!(
            SchemeSpec::new(4, vec![0.3, 0.5]),
            Err(FveError::InvalidSpec(_))
        ));
        assert!(SchemeSpec::new(3, vec![1.0]).is_err());
        assert!(SchemeSpec::new(3, vec![0.0]).is_err());
        assert!(SchemeSpec::new(3, vec![0.5, 0.2]).is_err());
        assert!(SchemeSpec::new(0, vec![]).is_err());
    }

    #[test]
    fn orthogonality_orders() {
        let s = 1.0 / 3f64.sqrt();
        let r = max_orthogonality_order(&[-s, s]).unwrap();
        assert_eq!(r.max_order, Some(2));
        assert_eq!(r.witness().unwrap(), &[-1.0, 0.0, 1.0]);

        let a = (0.6f64).sqrt();
        let r = max_orthogonality_order(&[-a, 0.0, a]).unwrap();
        assert_eq!(r.max_order, Some(4));
        assert_abs_diff_eq!(r.pi_star_params().unwrap()[0], 4.0 / 9.0, epsilon = 1e-14);

        let a = (5.0f64 / 9.0).sqrt();
        let r = max_orthogonality_order(&[-a, 0.0, a]).unwrap();
        assert_eq!(r.max_order, Some(2));
    }

    #[test]
    fn linear_scheme_never_reaches_first_order() {
        let r = max_orthogonality_order(&[0.0]).unwrap();
        assert_eq!(r.max_order, Some(0));
        let spec = preset("gauss-1").unwrap();
        assert!(!check_orthogonality(&spec, 1).unwrap());
        assert!(check_orthogonality(&spec, 0).unwrap());
    }

    #[test]
    fn invalid_dual_sets() {
        assert!(matches!(
            max_orthogonality_order(&[-0.5, -0.5, 0.5, 0.5]),
            Err(FveError::InvalidInput(_))
        ));
        assert!(max_orthogonality_order(&[-0.5, 0.4]).is_err());
        assert!(max_orthogonality_order(&[-1.0, 1.0]).is_err());
        assert!(max_orthogonality_order(&[]).is_err());
    }

    #[test]
    fn orthogonality_check_range() {
        let spec = preset("scheme-4-1").unwrap();
        assert!(check_orthogonality(&spec, 4).unwrap());
        assert!(!check_orthogonality(&spec, 5).unwrap());
        assert!(check_orthogonality(&spec, 2).is_err());
        assert!(check_orthogonality(&spec, 8).is_err());
        assert!(!check_orthogonality(&preset("scheme-3-1").unwrap(), 3).unwrap());
    }

    #[test]
    fn method_i() {
        let s = design_method_i(3, &[(5.0f64 / 9.0).sqrt()]).unwrap();
        assert_eq!(s.alphas, preset("scheme-3-1").unwrap().alphas);
        let s = design_method_i(1, &[]).unwrap();
        assert_eq!(s.dual_points().unwrap(), vec![0.0]);
        let s = design_method_i(5, &[0.9, 0.4]).unwrap();
        let r = max_orthogonality_order(&s.dual_points().unwrap()).unwrap();
        assert!(r.max_order.unwrap() >= 4);
        assert!(matches!(
            design_method_i(4, &[0.8, 0.3]),
            Err(FveError::MethodNotApplicable(_))
        ));
        assert!(matches!(
            design_method_i(3, &[0.3, 0.5]),
            Err(FveError::InvalidSpec(_))
        ));
    }

    #[test]
    fn method_ii_quadratic() {
        let s = design_method_ii(2, &[]).unwrap();
        assert_abs_diff_eq!(s.alphas[0], 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        let err = design_method_ii(3, &[0.5]).unwrap_err();
        assert!(err.to_string().contains("not valid for odd order"));
        assert!(design_method_ii(4, &[1.2]).is_err());
    }

    #[test]
    fn quartic_boundary_and_domain() {
        let f = quartic_family(4.0 / 9.0).unwrap();
        assert!(f.degenerate);
        assert_abs_diff_eq!(f.alpha2, 0.0, epsilon = 1e-7);
        assert!(design_quartic(4.0 / 9.0).is_err());
        assert!(matches!(quartic_family(0.4), Err(FveError::Domain(_))));
        assert!(quartic_family(5.0 / 6.0).is_err());
    }

    #[test]
    fn quintic_domain() {
        assert!(quintic_family((5.0f64 / 7.0).sqrt()).is_err());
        assert!(quintic_family(1.0).is_err());
        let a = quintic_family((5.0f64 / 7.0).sqrt() + 1e-12).unwrap();
        assert!(a < 1e-5);
    }

    #[test]
    fn presets() {
        let s = preset("scheme-3-1").unwrap();
        assert_eq!(s.k, 3);
        assert_eq!(
            s.layout().unwrap().value_nodes.unwrap(),
            vec![-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0]
        );
        let g2 = preset("gauss-2").unwrap();
        assert_abs_diff_eq!(g2.alphas[0], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(
            preset("scheme-9-9"),
            Err(FveError::UnknownPreset { .. })
        ));
        assert!(preset("gauss-7").is_err());
        for name in PRESET_NAMES {
            assert!(preset(name).is_ok(), "{name}");
        }
    }

    #[test]
    fn value_points_k1_and_quartic() {
        let p = function_value_points(&preset("gauss-1").unwrap()).unwrap();
        assert_eq!(p, vec![-1.0, 1.0]);
        let p = function_value_points(&preset("scheme-4-1").unwrap()).unwrap();
        for (a, b) in p.iter().zip([-1.0, -0.5, 0.0, 0.5, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn json_round_trip_keeps_bits() {
        let s = preset("scheme-6-1").unwrap();
        let json = s.to_json_string();
        assert!(json.contains("\"pi_star_params\""));
        let back = SchemeSpec::from_json_str(&json).unwrap();
        assert_eq!(back, s);
        let bare = r#"{"k": 2, "alphas": [0.5773502691896258], "pi_star_params": null, "value_node_params": null, "label": "x"}"#;
        assert_eq!(SchemeSpec::from_json_str(bare).unwrap().k, 2);
        assert!(SchemeSpec::from_json_str(r#"{"k": 2, "alphas": [1.5], "label": ""}"#).is_err());
    }
}
