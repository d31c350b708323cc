use clap::{Parser, Subcommand, ValueEnum};
use fvelab::analysis::{error_profile, error_report, profile_csv};
use fvelab::harness::{format_sci5, problem_preset, run_study, StudyConfig, ERROR_COLUMNS};
use fvelab::scheme::{
    design_gauss, design_method_i, design_method_ii, design_quartic, design_quintic, format_real,
    function_value_points, max_orthogonality_order, preset, SchemeSpec,
};
use fvelab::{build_superclose, fve_solve, uniform_mesh, FveError, Result, SolveOptions};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const QUAD_ENV: &str = "FVELAB_QUAD_POINTS";

/// Arbitrary-order 1D finite volume element schemes.
#[derive(Debug, Parser)]
#[command(name = "fvelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a scheme and write it as JSON.
    Design {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, ignore_case = true)]
        method: Method,
        /// Comma-separated parameters: alphas (I), value node parameters (II),
        /// a1 (quartic) or alpha1 (quintic). Unused for gauss.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the orthogonality order of a scheme and test it against `r`.
    Check {
        /// `preset:<name>` or `file:<path>`.
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        r: usize,
    },
    /// Solve one problem on a uniform mesh and print its error norms.
    Solve {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        problem: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// Convergence study: markdown table on stdout, CSV to `--out`.
    Study {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        problem: String,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long, default_value = "study.csv")]
        out: PathBuf,
    },
    /// Pointwise error profile on every element, as CSV.
    Profile {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        problem: String,
        #[arg(long = "N")]
        n: usize,
        /// Uniform reference samples per element.
        #[arg(long, default_value_t = 33)]
        samples: usize,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    Ii,
    Quartic,
    Quintic,
    Gauss,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Design {
            k,
            method,
            params,
            out,
        } => design(k, method, &params, out.as_deref()),
        Command::Check { scheme, r } => check(&load_scheme(&scheme)?, r),
        Command::Solve { scheme, problem, n } => solve(&load_scheme(&scheme)?, &problem, n),
        Command::Study {
            scheme,
            problem,
            levels,
            out,
        } => {
            let mut config = StudyConfig::new(load_scheme(&scheme)?, problem, levels);
            config.options = solve_options()?;
            let report = run_study(&config)?;
            print!("{}", report.to_markdown());
            fs::write(&out, report.to_csv())?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Profile {
            scheme,
            problem,
            n,
            samples,
            out,
        } => {
            let spec = load_scheme(&scheme)?;
            let bvp = problem_preset(&problem)?;
            let exact = exact_of(&bvp)?;
            let mesh = uniform_mesh(n, bvp.interval.0, bvp.interval.1)?;
            let sol = fve_solve(&bvp, &mesh, &spec, solve_options()?)?;
            let csv = profile_csv(&error_profile(&sol, &exact, samples)?);
            match out {
                Some(path) => {
                    fs::write(&path, csv)?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

/// `preset:<name>` or `file:<path>` to a scheme JSON document.
fn load_scheme(source: &str) -> Result<SchemeSpec> {
    if let Some(name) = source.strip_prefix("preset:") {
        preset(name)
    } else if let Some(path) = source.strip_prefix("file:") {
        SchemeSpec::from_json_str(&fs::read_to_string(path)?)
    } else {
        Err(FveError::InvalidInput(format!(
            "scheme source must be preset:<name> or file:<path>, got `{source}`"
        )))
    }
}

fn solve_options() -> Result<SolveOptions> {
    let mut opts = SolveOptions::default();
    if let Ok(raw) = std::env::var(QUAD_ENV) {
        let n = raw.trim().parse::<usize>().map_err(|_| {
            FveError::InvalidParameter(format!(
                "{QUAD_ENV} must be a positive integer, got `{raw}`"
            ))
        })?;
        opts.quad_points = Some(n);
    }
    Ok(opts)
}

fn exact_of(bvp: &fvelab::BvpProblem) -> Result<fvelab::ExactSolution> {
    bvp.exact.clone().ok_or_else(|| {
        FveError::InvalidInput(format!("problem `{}` has no exact solution", bvp.name))
    })
}

fn expect_params(method: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(FveError::InvalidParameter(format!(
            "{method} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

fn expect_order(method: &str, k: usize, want: usize) -> Result<()> {
    if k != want {
        return Err(FveError::InvalidParameter(format!(
            "the {method} family has k = {want}, got k = {k}"
        )));
    }
    Ok(())
}

fn design(k: usize, method: Method, params: &[f64], out: Option<&Path>) -> Result<()> {
    let spec = match method {
        Method::I => design_method_i(k, params)?,
        Method::Ii => design_method_ii(k, params)?,
        Method::Quartic => {
            expect_order("quartic", k, 4)?;
            expect_params("quartic", params, 1)?;
            design_quartic(params[0])?
        }
        Method::Quintic => {
            expect_order("quintic", k, 5)?;
            expect_params("quintic", params, 1)?;
            design_quintic(params[0])?
        }
        Method::Gauss => {
            expect_params("gauss", params, 0)?;
            design_gauss(k)?
        }
    };
    let report = max_orthogonality_order(&spec.dual_points()?)?;
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format_real(*x))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("label: {}", spec.label);
    println!("k: {}", spec.k);
    println!("alphas: {}", join(&spec.alphas));
    match report.max_order {
        Some(r) => println!("max orthogonality order: {r}"),
        None => println!("max orthogonality order: none"),
    }
    match function_value_points(&spec) {
        Ok(p) => println!("value points: {}", join(&p)),
        Err(e) => println!("value points: unavailable ({e})"),
    }
    if let Some(path) = out {
        fs::write(path, spec.to_json_string())?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn check(spec: &SchemeSpec, r: usize) -> Result<()> {
    let max = max_orthogonality_order(&spec.dual_points()?)?.max_order;
    let ok = fvelab::check_orthogonality(spec, r)?;
    if ok {
        println!("PASS");
    } else {
        match max {
            Some(m) => println!("FAIL (max r = {m})"),
            None => println!("FAIL (max r = none)"),
        }
    }
    Ok(())
}

fn solve(spec: &SchemeSpec, problem: &str, n: usize) -> Result<()> {
    let bvp = problem_preset(problem)?;
    let exact = exact_of(&bvp)?;
    let opts = solve_options()?;
    let mesh = uniform_mesh(n, bvp.interval.0, bvp.interval.1)?;
    let sol = fve_solve(&bvp, &mesh, spec, opts)?;
    let ui = build_superclose(&exact, &mesh, spec)?;
    let report = error_report(&sol, &ui, &exact, spec, &opts.rule(spec.k)?)?;
    for (name, v) in ERROR_COLUMNS.iter().zip(report.columns()) {
        println!("{name} {}", format_sci5(v));
    }
    Ok(())
}
