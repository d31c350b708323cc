//! Reference-element mathematics on [-1, 1].
//!
//! Legendre polynomials, the integrated-Legendre M-polynomials and
//! Gauss-Legendre quadrature, plus affine-mapped integration on subintervals.

use crate::error::{FveError, Result};
use std::f64::consts::PI;

/// Largest Gauss-Legendre rule that can be requested.
pub const MAX_GAUSS_POINTS: usize = 32;

/// An n-point quadrature rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[a, b]` by mapping the rule affinely.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&xi, &w)| w * f(mid + half * xi))
            .sum();
        half * sum
    }

    /// Mapped nodes and weights on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&xi, &w)| (mid + half * xi, half * w))
    }
}

/// The n-point Gauss-Legendre rule on [-1, 1].
///
/// Nodes are Newton-refined roots of `P_n` started from Chebyshev-like
/// guesses; the rule is symmetrised exactly.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_GAUSS_POINTS {
        return Err(FveError::InvalidParameter(format!(
            "Gauss-Legendre rule size must be in 1..={MAX_GAUSS_POINTS}, got {n}"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_deriv(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss-Lobatto points of degree `k` on [-1, 1]: the endpoints plus the
/// roots of `P_k'`, which interlace the Gauss points of order `k`.
pub fn gauss_lobatto_nodes(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(FveError::InvalidParameter(
            "Gauss-Lobatto nodes need k >= 1".into(),
        ));
    }
    let gauss = gauss_legendre(k)?;
    let g = gauss.nodes();
    let mut nodes = vec![0.0; k + 1];
    nodes[0] = -1.0;
    nodes[k] = 1.0;
    for i in 1..k.div_ceil(2) {
        let r = bisect(|x| legendre_deriv(k, x), g[k - i - 1], g[k - i], 1e-16, 200)?;
        nodes[k - i] = r;
        nodes[i] = -r;
    }
    if k % 2 == 0 {
        nodes[k / 2] = 0.0;
    }
    Ok(nodes)
}

/// `integrate(f, a, b, rule)` as a free function.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rule: &QuadratureRule) -> f64 {
    rule.integrate(f, a, b)
}

/// Legendre polynomial `P_i(x)` by the three-term recurrence.
pub fn legendre(i: usize, x: f64) -> f64 {
    legendre_with_deriv(i, x).0
}

/// Derivative `P_i'(x)`.
pub fn legendre_deriv(i: usize, x: f64) -> f64 {
    legendre_with_deriv(i, x).1
}

/// `(P_i(x), P_i'(x))`.
///
/// The derivative uses the recurrence `P_{j+1}' = P_{j-1}' + (2j+1) P_j`,
/// which stays finite at the endpoints.
pub fn legendre_with_deriv(i: usize, x: f64) -> (f64, f64) {
    if i == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    for j in 1..i {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
        let d2 = d0 + (2.0 * jf + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// All of `P_0(x) ..= P_n(x)`.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(x);
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * x * out[j] - jf * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// The M-polynomial `\hat M_i` on [-1, 1] stored in the Legendre basis.
///
/// `M_0 = 1`, `M_1 = xi`, and for `i >= 1` `M_{i+1}` is the antiderivative of
/// `(i-1)! P_i` vanishing at `xi = 1`, i.e.
/// `M_{i+1} = (i-1)! (P_{i+1} - P_{i-1}) / (2i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MPolynomial {
    index: usize,
    /// Coefficients with respect to `P_0, P_1, ..., P_index`.
    legendre_coeffs: Vec<f64>,
}

impl MPolynomial {
    pub fn new(index: usize) -> Self {
        let mut c = vec![0.0; index + 1];
        match index {
            0 | 1 => c[index] = 1.0,
            _ => {
                let i = index - 1;
                let scale = factorial(i - 1) / (2 * i + 1) as f64;
                c[i + 1] = scale;
                c[i - 1] = -scale;
            }
        }
        MPolynomial {
            index,
            legendre_coeffs: c,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn legendre_coeffs(&self) -> &[f64] {
        &self.legendre_coeffs
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let p = legendre_all(self.index, xi);
        self.legendre_coeffs
            .iter()
            .zip(&p)
            .filter(|(c, _)| **c != 0.0)
            .map(|(c, p)| c * p)
            .sum()
    }

    /// Derivative with respect to the reference coordinate.
    pub fn deriv(&self, xi: f64) -> f64 {
        match self.index {
            0 => 0.0,
            1 => 1.0,
            i => factorial(i - 2) * legendre(i - 1, xi),
        }
    }

    /// Second derivative with respect to the reference coordinate.
    pub fn second_deriv(&self, xi: f64) -> f64 {
        match self.index {
            0 | 1 => 0.0,
            i => factorial(i - 2) * legendre_deriv(i - 1, xi),
        }
    }
}

pub fn m_poly(i: usize) -> MPolynomial {
    MPolynomial::new(i)
}

/// `\hat M_i(xi)`.
pub fn m_eval(i: usize, xi: f64) -> f64 {
    match i {
        0 => 1.0,
        1 => xi,
        _ => {
            let j = i - 1;
            let (pm, pp) = {
                let p = legendre_all(j + 1, xi);
                (p[j - 1], p[j + 1])
            };
            factorial(j - 1) * (pp - pm) / (2 * j + 1) as f64
        }
    }
}

/// `\hat M_i'(xi)`.
pub fn m_deriv_eval(i: usize, xi: f64) -> f64 {
    match i {
        0 => 0.0,
        1 => 1.0,
        _ => factorial(i - 2) * legendre(i - 1, xi),
    }
}

/// Bracketed bisection for a sign change of `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `width` or after `max_iter`
/// halvings. Returns an error when the endpoints do not bracket a root.
pub fn bisect<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    width: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(FveError::Numerical(format!(
            "no sign change on [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if b - a <= width || m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection settings shared by every root search in the crate.
pub const BISECTION_WIDTH: f64 = 1e-14;
pub const BISECTION_MAX_ITER: usize = 200;
