//! Benchmark problems, convergence studies and comparison with reference tables.

use crate::analysis::{eoc, error_report, ErrorReport};
use crate::assembly::{fve_solve, scalar_fn, BvpProblem, Coefficients, SolveOptions};
use crate::error::{FveError, Result};
use crate::mesh::uniform_mesh;
use crate::mmd::build_superclose;
use crate::scheme::SchemeSpec;

/// Names accepted by [`problem_preset`]; `poisson-poly-<k>` takes any `k >= 1`.
pub const PROBLEM_NAMES: &[&str] = &[
    "example-6-1",
    "example-6-2",
    "example-6-3",
    "example-6-4",
    "poisson-poly-<k>",
];

/// Built-in boundary value problems on (0, 1).
pub fn problem_preset(name: &str) -> Result<BvpProblem> {
    let sine = || {
        (
            scalar_fn(f64::sin),
            scalar_fn(f64::cos),
            scalar_fn(|x: f64| -x.sin()),
        )
    };
    match name {
        // 6-3 and 6-4 reuse the constant-coefficient problem
        "example-6-1" | "example-6-3" | "example-6-4" => {
            let (u, du, d2u) = sine();
            let coeffs = Coefficients {
                p: scalar_fn(|_| 2.0),
                dp: scalar_fn(|_| 0.0),
                q: scalar_fn(|_| 1.0),
                dq: scalar_fn(|_| 0.0),
                r: scalar_fn(|_| 1.0),
            };
            Ok(BvpProblem::manufactured(
                name,
                (0.0, 1.0),
                coeffs,
                u,
                du,
                d2u,
            ))
        }
        "example-6-2" => {
            let (u, du, d2u) = sine();
            let coeffs = Coefficients {
                p: scalar_fn(f64::exp),
                dp: scalar_fn(f64::exp),
                q: scalar_fn(f64::sin),
                dq: scalar_fn(f64::cos),
                r: scalar_fn(|_| 3.0),
            };
            Ok(BvpProblem::manufactured(
                name,
                (0.0, 1.0),
                coeffs,
                u,
                du,
                d2u,
            ))
        }
        _ => {
            let k = name
                .strip_prefix("poisson-poly-")
                .and_then(|s| s.parse::<i32>().ok())
                .filter(|k| *k >= 1)
                .ok_or_else(|| FveError::UnknownPreset {
                    kind: "problem preset",
                    name: name.to_string(),
                })?;
            let kf = k as f64;
            let coeffs = Coefficients {
                p: scalar_fn(|_| 1.0),
                dp: scalar_fn(|_| 0.0),
                q: scalar_fn(|_| 0.0),
                dq: scalar_fn(|_| 0.0),
                r: scalar_fn(|_| 0.0),
            };
            let u = scalar_fn(move |x: f64| x.powi(k));
            let du = scalar_fn(move |x: f64| kf * x.powi(k - 1));
            let d2u = scalar_fn(move |x: f64| {
                if k >= 2 {
                    kf * (kf - 1.0) * x.powi(k - 2)
                } else {
                    0.0
                }
            });
            Ok(BvpProblem::manufactured(
                name,
                (0.0, 1.0),
                coeffs,
                u,
                du,
                d2u,
            ))
        }
    }
}

/// A convergence study: one scheme, one problem, a ladder of uniform meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub scheme: SchemeSpec,
    pub problem: String,
    /// Element counts, strictly increasing.
    pub levels: Vec<usize>,
    pub options: SolveOptions,
}

impl StudyConfig {
    pub fn new(scheme: SchemeSpec, problem: impl Into<String>, levels: Vec<usize>) -> Self {
        StudyConfig {
            scheme,
            problem: problem.into(),
            levels,
            options: SolveOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.len() < 2 {
            return Err(FveError::InvalidParameter(
                "a study needs at least 2 refinement levels".into(),
            ));
        }
        if !self.levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(FveError::InvalidParameter(format!(
                "refinement levels must be strictly increasing: {:?}",
                self.levels
            )));
        }
        Ok(())
    }
}

/// Column names in report order.
pub const ERROR_COLUMNS: [&str; 6] = [
    "err_h1",
    "err_l2",
    "err_ui_h1",
    "err_ui_l2",
    "err_p1",
    "err_p0",
];

/// Header of the study CSV.
pub const STUDY_CSV_HEADER: &str =
    "h,err_h1,eoc_h1,err_l2,eoc_l2,err_ui_h1,eoc_ui_h1,err_ui_l2,eoc_ui_l2,err_p1,eoc_p1,err_p0,eoc_p0";

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub scheme: String,
    pub problem: String,
    pub quad_points: usize,
    pub levels: Vec<usize>,
    pub rows: Vec<ErrorReport>,
    /// Relative residual of each linear solve.
    pub residuals: Vec<f64>,
    /// Orders per column of [`ERROR_COLUMNS`], one fewer entry than `rows`.
    pub eocs: Vec<Vec<Option<f64>>>,
}

/// `d.dddd E+-xx`, five significant digits with a two-digit exponent.
pub fn format_sci5(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.4E}");
    match s.split_once('E') {
        Some((m, e)) => {
            let (sign, digits) = match e.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', e),
            };
            format!("{m}E{sign}{digits:0>2}")
        }
        None => s,
    }
}

fn format_eoc(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

impl StudyReport {
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.columns()[c]).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Option<Vec<f64>> {
        ERROR_COLUMNS
            .iter()
            .position(|c| *c == name)
            .map(|c| self.column(c))
    }

    /// Order of column `c` between the two finest levels.
    pub fn finest_eoc(&self, c: usize) -> Option<f64> {
        self.eocs[c].last().copied().flatten()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(STUDY_CSV_HEADER);
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format_sci5(row.h));
            for (c, v) in row.columns().iter().enumerate() {
                let order = if i == 0 { None } else { self.eocs[c][i - 1] };
                out.push(',');
                out.push_str(&format_sci5(*v));
                out.push(',');
                out.push_str(&format_eoc(order));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let names = [
            "|u-u_h|_1",
            "||u-u_h||_0",
            "|u_h-u_I|_1",
            "||u_h-u_I||_0",
            "max P1 err",
            "max P0 err",
        ];
        let mut out = format!("{} on {}\n\n| h |", self.scheme, self.problem);
        for n in names {
            out.push_str(&format!(" {n} | Order |"));
        }
        out.push_str("\n|---|");
        out.push_str(&"---|---|".repeat(names.len()));
        out.push('\n');
        for (i, (row, n)) in self.rows.iter().zip(&self.levels).enumerate() {
            out.push_str(&format!("| 1/{n} |"));
            for (c, v) in row.columns().iter().enumerate() {
                let order = if i == 0 {
                    "\\".to_string()
                } else {
                    format_eoc(self.eocs[c][i - 1])
                };
                out.push_str(&format!(" {} | {} |", format_sci5(*v), order));
            }
            out.push('\n');
        }
        out
    }
}

/// Run every level of a study in order; the first failing level aborts it.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let problem = problem_preset(&config.problem)?;
    let exact = problem.exact.clone().ok_or_else(|| {
        FveError::InvalidInput(format!(
            "problem `{}` has no exact solution",
            config.problem
        ))
    })?;
    let spec = &config.scheme;
    let rule = config.options.rule(spec.k)?;
    let mut rows = Vec::with_capacity(config.levels.len());
    let mut residuals = Vec::with_capacity(config.levels.len());
    for &n in &config.levels {
        let level = |e: FveError| FveError::StudyLevel {
            level: n,
            source: Box::new(e),
        };
        let mesh = uniform_mesh(n, problem.interval.0, problem.interval.1).map_err(level)?;
        let sol = fve_solve(&problem, &mesh, spec, config.options).map_err(level)?;
        let ui = build_superclose(&exact, &mesh, spec).map_err(level)?;
        let report = error_report(&sol, &ui, &exact, spec, &rule).map_err(level)?;
        residuals.push(sol.relative_residual());
        rows.push(report);
    }
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let mut eocs = Vec::with_capacity(ERROR_COLUMNS.len());
    for c in 0..ERROR_COLUMNS.len() {
        let col: Vec<f64> = rows.iter().map(|r| r.columns()[c]).collect();
        eocs.push(eoc(&col, &hs)?);
    }
    Ok(StudyReport {
        scheme: if spec.label.is_empty() {
            format!("k={}", spec.k)
        } else {
            spec.label.clone()
        },
        problem: config.problem.clone(),
        quad_points: rule.len(),
        levels: config.levels.clone(),
        rows,
        residuals,
        eocs,
    })
}

/// A reference convergence table: four error columns with their orders.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenTable {
    pub scheme: String,
    pub problem: String,
    pub levels: Vec<usize>,
    /// `[err_h1, err_l2, err_ui_h1, err_ui_l2]` per level.
    pub values: Vec<[f64; 4]>,
    /// Orders per level; `None` in the first row.
    pub orders: Vec<[Option<f64>; 4]>,
}

const GOLDEN_FILES: &[(&str, &str)] = &[
    (
        "scheme-3-1_example-6-1",
        include_str!("../data/golden/scheme-3-1_example-6-1.csv"),
    ),
    (
        "scheme-5-1_example-6-2",
        include_str!("../data/golden/scheme-5-1_example-6-2.csv"),
    ),
    (
        "scheme-4-1_example-6-1",
        include_str!("../data/golden/scheme-4-1_example-6-1.csv"),
    ),
    (
        "scheme-6-1_example-6-1",
        include_str!("../data/golden/scheme-6-1_example-6-1.csv"),
    ),
];

/// Names of the bundled reference tables, `<scheme>_<problem>`.
pub fn golden_names() -> Vec<&'static str> {
    GOLDEN_FILES.iter().map(|(n, _)| *n).collect()
}

/// A bundled reference table by name.
pub fn golden_table(name: &str) -> Result<GoldenTable> {
    let text = GOLDEN_FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| FveError::UnknownPreset {
            kind: "reference table",
            name: name.to_string(),
        })?;
    GoldenTable::parse(text)
}

impl GoldenTable {
    /// Parse the bundled CSV format: `# scheme=.. problem=..`, a header, rows.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: String| FveError::InvalidInput(format!("reference table: {msg}"));
        let mut scheme = String::new();
        let mut problem = String::new();
        let mut levels = Vec::new();
        let mut values = Vec::new();
        let mut orders = Vec::new();
        let mut seen_header = false;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("scheme", v)) => scheme = v.to_string(),
                        Some(("problem", v)) => problem = v.to_string(),
                        _ => {}
                    }
                }
                continue;
            }
            if !seen_header {
                seen_header = true;
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 9 {
                return Err(bad(format!(
                    "expected 9 cells, got {}: `{line}`",
                    cells.len()
                )));
            }
            levels.push(
                cells[0]
                    .parse()
                    .map_err(|_| bad(format!("bad level `{}`", cells[0])))?,
            );
            let mut v = [0.0; 4];
            let mut o = [None; 4];
            for c in 0..4 {
                v[c] = cells[1 + 2 * c]
                    .parse()
                    .map_err(|_| bad(format!("bad value `{}`", cells[1 + 2 * c])))?;
                let oc = cells[2 + 2 * c];
                o[c] = if oc.is_empty() {
                    None
                } else {
                    Some(oc.parse().map_err(|_| bad(format!("bad order `{oc}`")))?)
                };
            }
            values.push(v);
            orders.push(o);
        }
        Ok(GoldenTable {
            scheme,
            problem,
            levels,
            values,
            orders,
        })
    }
}

/// Outcome of [`compare_golden`]; `failures` names every offending cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenDiff {
    pub failures: Vec<String>,
    /// Largest relative deviation over the value-checked cells.
    pub max_relative_error: f64,
}

impl GoldenDiff {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compare `|u-u_h|` columns cell by cell (relative `value_tol`) and the
/// `u_h-u_I` columns by their finest-pair order only (absolute `rate_tol`).
pub fn compare_golden(
    report: &StudyReport,
    golden: &GoldenTable,
    value_tol: f64,
    rate_tol: f64,
) -> Result<GoldenDiff> {
    if report.levels != golden.levels {
        return Err(FveError::ShapeMismatch(format!(
            "levels differ: run {:?}, reference {:?}",
            report.levels, golden.levels
        )));
    }
    let mut failures = Vec::new();
    let mut max_rel = 0.0f64;
    for (i, (row, n)) in report.rows.iter().zip(&report.levels).enumerate() {
        let cols = row.columns();
        for c in 0..2 {
            let want = golden.values[i][c];
            let rel = (cols[c] - want).abs() / want.abs();
            max_rel = max_rel.max(rel);
            if !(rel <= value_tol) {
                failures.push(format!(
                    "{} at N={n}: {} vs reference {} ({:.2}% off)",
                    ERROR_COLUMNS[c],
                    format_sci5(cols[c]),
                    format_sci5(want),
                    100.0 * rel
                ));
            }
        }
    }
    for c in 2..4 {
        let got = report.finest_eoc(c);
        let want = golden.orders.last().and_then(|o| o[c]);
        match (got, want) {
            (Some(g), Some(w)) if (g - w).abs() <= rate_tol => {}
            (g, w) => failures.push(format!(
                "{} finest order: {} vs reference {}",
                ERROR_COLUMNS[c],
                format_eoc(g),
                format_eoc(w)
            )),
        }
    }
    Ok(GoldenDiff {
        failures,
        max_relative_error: max_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::preset;

    fn strong_residual(p: &BvpProblem) -> f64 {
        let u = p.exact.as_ref().unwrap();
        let h = 1e-4;
        let flux = |x: f64| (p.p)(x) * (u.du)(x);
        (0..=100)
            .map(|i| {
                let x = 0.05 + 0.9 * i as f64 / 100.0;
                let dflux = (flux(x + h) - flux(x - h)) / (2.0 * h);
                let lhs = -dflux + (p.q)(x) * (u.du)(x) + (p.r)(x) * (u.u)(x);
                (lhs - (p.f)(x)).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn example_right_sides_match_hand_forms() {
        let p = problem_preset("example-6-1").unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let f = 3.0 * x.sin() + x.cos();
            assert!(((p.f)(x) - f).abs() < 1e-12);
        }
        let p = problem_preset("example-6-2").unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let (s, c, e) = (x.sin(), x.cos(), x.exp());
            let f = -e * c + e * s + s * c + 3.0 * s;
            assert!(((p.f)(x) - f).abs() < 1e-12);
        }
        assert_eq!(p.g_left, 0.0);
        assert_eq!(p.g_right, 1f64.sin());
    }

    #[test]
    fn strong_form_residuals_are_small() {
        // central differences carry an O(h^2) error of about 1e-8
        for name in ["example-6-1", "example-6-2", "poisson-poly-4"] {
            let p = problem_preset(name).unwrap();
            assert!(strong_residual(&p) < 1e-6, "{name}");
        }
    }

    #[test]
    fn unknown_problem() {
        assert!(matches!(
            problem_preset("example-9"),
            Err(FveError::UnknownPreset { .. })
        ));
        assert!(problem_preset("poisson-poly-0").is_err());
    }

    #[test]
    fn scientific_format() {
        assert_eq!(format_sci5(9.65791e-3), "9.6579E-03");
        assert_eq!(format_sci5(0.5), "5.0000E-01");
        assert_eq!(format_sci5(12.0), "1.2000E+01");
        assert_eq!(format_sci5(1.2345e-120), "1.2345E-120");
    }

    #[test]
    fn config_validation() {
        let s = preset("gauss-2").unwrap();
        assert!(StudyConfig::new(s.clone(), "example-6-1", vec![4])
            .validate()
            .is_err());
        assert!(StudyConfig::new(s, "example-6-1", vec![4, 4])
            .validate()
            .is_err());
    }

    #[test]
    fn golden_tables_parse() {
        for name in golden_names() {
            let t = golden_table(name).unwrap();
            assert_eq!(t.values.len(), t.levels.len());
            assert!(t.orders[0].iter().all(Option::is_none));
            assert!(name.starts_with(&t.scheme));
        }
    }

    fn report_from_golden(t: &GoldenTable) -> StudyReport {
        let rows: Vec<ErrorReport> = t
            .levels
            .iter()
            .zip(&t.values)
            .map(|(n, v)| ErrorReport {
                h: 1.0 / *n as f64,
                err_h1: v[0],
                err_l2: v[1],
                err_ui_h1: v[2],
                err_ui_l2: v[3],
                err_p1: v[0],
                err_p0: v[1],
            })
            .collect();
        let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let eocs = (0..6)
            .map(|c| {
                eoc(
                    &rows.iter().map(|r| r.columns()[c]).collect::<Vec<_>>(),
                    &hs,
                )
                .unwrap()
            })
            .collect();
        StudyReport {
            scheme: t.scheme.clone(),
            problem: t.problem.clone(),
            quad_points: 0,
            levels: t.levels.clone(),
            rows,
            residuals: vec![0.0; t.levels.len()],
            eocs,
        }
    }

    #[test]
    fn identical_table_passes_and_perturbed_cell_fails() {
        let t = golden_table("scheme-4-1_example-6-1").unwrap();
        let mut r = report_from_golden(&t);
        assert!(compare_golden(&r, &t, 0.02, 0.25).unwrap().passed());
        r.rows[2].err_l2 *= 1.1;
        let d = compare_golden(&r, &t, 0.02, 0.25).unwrap();
        assert_eq!(d.failures.len(), 1);
        assert!(d.failures[0].contains("err_l2 at N=8"), "{:?}", d.failures);
        r.levels.pop();
        assert!(matches!(
            compare_golden(&r, &t, 0.02, 0.25),
            Err(FveError::ShapeMismatch(_))
        ));
    }
}
