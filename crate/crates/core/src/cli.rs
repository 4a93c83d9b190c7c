//! The `agn` command line: argument grammar, input resolution and output.
//!
//! Exit codes: 0 success, 1 parameter/usage/input errors (and failed
//! selftests), 2 solver non-convergence. Errors go to standard error as
//! `{"error": {"code": …, "message": …}}`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{c2, c3, GNParameters, SharpConstantSet};
use crate::energy::{EnergyComparison, SphericalQuadrature};
use crate::error::{Error, Result};
use crate::extremal::{ExtremalSpec, Family};
use crate::grid::{AffineMap, GridFunction, GridSpec};
use crate::inequality::{
    check_affine_gn, check_affine_nash, check_affine_sobolev, check_euclidean_gn,
    check_log_sobolev, check_morrey_sobolev, check_moser_trudinger, InequalityId,
    InequalityReport, Tolerances,
};
use crate::minimize::{minimize, MinimizeOptions, SeedProfile};
use crate::rearrange::{decreasing_rearrangement, spherical_rearrangement};
use crate::selftest::{run_selftest, SelftestOptions};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "AGN_THREADS";

const SWEEP_HELP: &str = "\
CSV columns: inequality_id, one column per --param-grid key in the order given, lhs, rhs, ratio, slack.
Rows are sorted by parameter tuple.
Grid syntax: key=v1,v2;key=v1,... with keys among n, p, q, s, k_opt, m_n, shape.";

const INPUT_HELP: &str = "\
Grid file path, or builtin:<name> with name one of gn_extremal, gn_superquadratic, gn_compact, log_sobolev, morrey, gaussian, bump, moser";

#[derive(Parser, Debug)]
#[command(name = "agn", version, about = "Affine Gagliardo-Nirenberg toolkit on uniform grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form sharp constants for one parameter choice
    Constants {
        /// Dimension
        #[arg(long)]
        n: usize,
        /// Exponent p
        #[arg(long)]
        p: f64,
        /// Exponent q
        #[arg(long)]
        q: Option<f64>,
        /// Exponent s
        #[arg(long)]
        s: Option<f64>,
        /// Output file (standard output if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Affine energy, gradient norm and their ratio
    Energy {
        #[command(flatten)]
        input: InputArgs,
        /// Quadrature directions (512 in 2D, 1000 in 3D)
        #[arg(long)]
        directions: Option<usize>,
        /// Output file (standard output if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spherically symmetric rearrangement of a grid function
    Rearrange {
        #[command(flatten)]
        input: InputArgs,
        /// Where to write the rearranged grid (standard output if absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the one-dimensional decreasing rearrangement
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Sample a closed-form extremal onto a grid
    SampleExtremal {
        /// gn_superquadratic, gn_compact, log_sobolev or morrey
        #[arg(long)]
        family: String,
        /// Comma-separated key=value list: n, p, q, shape (or sigma), amplitude
        #[arg(long)]
        params: String,
        /// N or N,L; L is chosen from the decay when omitted
        #[arg(long)]
        grid: String,
        /// Row-major matrix entries of A
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        matrix: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        /// Output file (standard output if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constrained minimisation giving the sharp GN constant
    Minimize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        s: f64,
        /// N,L
        #[arg(long)]
        grid: String,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        step_size: Option<f64>,
        #[arg(long)]
        regularization: Option<f64>,
        /// gaussian or gn_extremal_guess
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        preconditioner_length: Option<f64>,
        /// Where to write the minimiser grid
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the summary JSON (standard output if absent)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate one inequality on an input
    Check {
        /// Inequality id, e.g. affine_gn or log_sobolev
        inequality: String,
        #[command(flatten)]
        input: InputArgs,
        /// Exponent q
        #[arg(long)]
        q: Option<f64>,
        /// Exponent s
        #[arg(long)]
        s: Option<f64>,
        /// Quadrature directions (512 in 2D, 1000 in 3D)
        #[arg(long)]
        directions: Option<usize>,
        /// Switch to the Euclidean counterpart when false
        #[arg(long)]
        affine: Option<bool>,
        /// Sharp constant for the GN and Nash checks; closed form or solver otherwise
        #[arg(long)]
        k_opt: Option<f64>,
        /// Bound for the Moser-Trudinger checks
        #[arg(long)]
        m_n: Option<f64>,
        /// Pass tolerance on ratio <= 1 + tol
        #[arg(long)]
        tol: Option<f64>,
        /// Output file (standard output if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one inequality over a parameter grid, as CSV
    #[command(after_help = SWEEP_HELP)]
    Sweep {
        /// Inequality id
        #[arg(long)]
        family: String,
        #[arg(long)]
        param_grid: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, help = INPUT_HELP)]
        input: Option<String>,
        #[arg(long)]
        grid: Option<String>,
        /// Quadrature directions (512 in 2D, 1000 in 3D)
        #[arg(long)]
        directions: Option<usize>,
        /// Output file (standard output if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite
    Selftest {
        /// Grids capped at N = 128, 256 directions, tolerances doubled
        #[arg(long)]
        quick: bool,
        /// Output file (standard output if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long, help = INPUT_HELP)]
    input: String,
    /// Dimension; required for builtins, checked against grid files
    #[arg(long)]
    n: Option<usize>,
    /// Exponent p; the Moser-Trudinger checks use p = n
    #[arg(long)]
    p: Option<f64>,
    /// N or N,L for builtins
    #[arg(long)]
    grid: Option<String>,
    /// Row-major matrix applied to builtin extremals
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    matrix: Option<Vec<f64>>,
}

/// Runs the command line on `args` (without the program name), writing
/// results to `out` and errors to `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("agn")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            report_error(err, &Error::Usage(e.to_string().trim().to_string()));
            return 1;
        }
    };
    if let Err(e) = configure_threads() {
        report_error(err, &e);
        return 1;
    }
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            report_error(err, &e);
            match e {
                Error::Solver { .. } => 2,
                _ => 1,
            }
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os().skip(1), &mut stdout.lock(), &mut stderr.lock())
}

fn report_error(err: &mut dyn Write, e: &Error) {
    #[derive(Serialize)]
    struct Body<'a> {
        code: &'a str,
        message: String,
    }
    let mut wrapper = BTreeMap::new();
    wrapper.insert("error", Body { code: e.code(), message: e.to_string() });
    let text = serde_json::to_string(&wrapper).unwrap_or_else(|_| "{}".into());
    let _ = writeln!(err, "{text}");
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    // a pool may already exist when run_with is called repeatedly in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &mut dyn Write, path: Option<&PathBuf>, value: &T) -> Result<()> {
    emit(out, path, &serde_json::to_string_pretty(value)?)
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Constants { n, p, q, s, out: path } => {
            emit_json(out, path.as_ref(), &SharpConstantSet::compute(n, p, q, s)?)?;
        }
        Command::Energy { input, directions, out: path } => {
            let p = input.p.ok_or_else(|| Error::Usage("energy needs --p".into()))?;
            let f = resolve_input(&input, p, None, None)?;
            let quad = quadrature(f.spec().dim(), directions)?;
            emit_json(out, path.as_ref(), &EnergyComparison::compute(&f, p, &quad)?)?;
        }
        Command::Rearrange { input, out: path, profile_out } => {
            let f = resolve_input(&input, input.p.unwrap_or(2.0), None, None)?;
            if let Some(pp) = profile_out {
                std::fs::write(pp, serde_json::to_string(&decreasing_rearrangement(&f))?)?;
            }
            emit(out, path.as_ref(), &spherical_rearrangement(&f).to_json()?)?;
        }
        Command::SampleExtremal { family, params, grid, matrix, center, out: path } => {
            let kv = parse_key_values(&params)?;
            let family = Family::parse(&family)?;
            let spec = extremal_from_params(family, &kv, matrix, center)?;
            let (points, half) = parse_grid(&grid)?;
            let half = match half {
                Some(l) => l,
                None => spec.auto_half_width(family_mass_exponent(&spec), points)?,
            };
            let f = spec.sample(GridSpec::new(spec.n(), half, points)?)?;
            emit(out, path.as_ref(), &f.to_json()?)?;
        }
        Command::Minimize {
            n,
            p,
            q,
            s,
            grid,
            max_iters,
            tol,
            step_size,
            regularization,
            seed,
            preconditioner_length,
            out: path,
            report,
        } => {
            let params = GNParameters::new(n, p, q, s)?;
            let (points, half) = parse_grid(&grid)?;
            let half = half.ok_or_else(|| Error::Usage("minimize needs --grid N,L".into()))?;
            let mut opts = MinimizeOptions::default();
            if let Some(v) = max_iters {
                opts.max_iterations = v;
            }
            if let Some(v) = tol {
                opts.stop_tol = v;
            }
            if let Some(v) = step_size {
                opts.step_size = v;
            }
            if let Some(v) = regularization {
                opts.regularization = v;
            }
            if let Some(v) = preconditioner_length {
                opts.preconditioner_length = v;
            }
            if let Some(name) = seed {
                opts.seed_profile = match name.as_str() {
                    "gaussian" => SeedProfile::Gaussian,
                    "gn_extremal_guess" => SeedProfile::GnExtremalGuess,
                    other => return Err(Error::Usage(format!("unknown seed profile '{other}'"))),
                };
            }
            let result = minimize(&params, GridSpec::new(n, half, points)?, &opts)?;
            if let Some(pth) = path {
                result.u_inf.write_json(pth)?;
            }
            emit_json(out, report.as_ref(), &result.summary())?;
            if !result.converged {
                report_error(
                    err,
                    &Error::Solver {
                        message: "iteration budget exhausted before the stopping tolerance".into(),
                        iterations: result.iterations_used,
                        energy: result.energy,
                    },
                );
                return Ok(2);
            }
        }
        Command::Check {
            inequality,
            input,
            q,
            s,
            directions,
            affine,
            k_opt,
            m_n,
            tol,
            out: path,
        } => {
            let mut id = InequalityId::parse(&inequality)?;
            if affine == Some(false) {
                id = euclidean_counterpart(id)?;
            }
            let request = CheckRequest {
                id,
                q,
                s,
                directions,
                k_opt,
                m_n,
            };
            let moser = matches!(
                id,
                InequalityId::AffineMoserTrudinger | InequalityId::EuclideanMoserTrudinger
            );
            let p = match input.p {
                Some(p) => p,
                None if moser => input.n.unwrap_or(2) as f64,
                None => return Err(Error::Usage(format!("{id} needs --p"))),
            };
            let f = resolve_input(&input, p, q, Some(id))?;
            let p = if moser { f.spec().dim() as f64 } else { p };
            let mut report = request.evaluate(&f, p)?;
            let tol = tol.unwrap_or(if input.matrix.is_some() {
                Tolerances::default().affine_transformed
            } else {
                Tolerances::default().power_law
            });
            report = report.with_tolerance(tol);
            emit_json(out, path.as_ref(), &report)?;
        }
        Command::Sweep { family, param_grid, n, input, grid, directions, out: path } => {
            let id = InequalityId::parse(&family)?;
            let csv = sweep(id, &param_grid, n, input.as_deref(), grid.as_deref(), directions)?;
            emit(out, path.as_ref(), csv.trim_end())?;
        }
        Command::Selftest { quick, out: path } => {
            let summary = run_selftest(&SelftestOptions { quick }, |c| {
                let _ = writeln!(
                    err,
                    "criterion {:>2} {:<26} {} ({:.2?})",
                    c.id,
                    c.name,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.elapsed
                );
            });
            emit_json(out, path.as_ref(), &summary)?;
            return Ok(if summary.passed { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn euclidean_counterpart(id: InequalityId) -> Result<InequalityId> {
    Ok(match id {
        InequalityId::AffineGn | InequalityId::EuclideanGn => InequalityId::EuclideanGn,
        InequalityId::AffineMoserTrudinger | InequalityId::EuclideanMoserTrudinger => {
            InequalityId::EuclideanMoserTrudinger
        }
        InequalityId::AffineMorreySobolev | InequalityId::EuclideanMorreySobolev => {
            InequalityId::EuclideanMorreySobolev
        }
        other => {
            return Err(Error::Usage(format!("{other} has no Euclidean variant")));
        }
    })
}

fn quadrature(dim: usize, directions: Option<usize>) -> Result<SphericalQuadrature> {
    match directions {
        Some(m) => SphericalQuadrature::new(dim, m),
        None => SphericalQuadrature::default_for(dim),
    }
}

fn parse_grid(text: &str) -> Result<(usize, Option<f64>)> {
    let bad = || Error::Usage(format!("grid must be N or N,L, got '{text}'"));
    let mut parts = text.split(',').map(str::trim);
    let points = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
    let half = match parts.next() {
        Some(t) => Some(t.parse().map_err(|_| bad())?),
        None => None,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((points, half))
}

fn parse_key_values(text: &str) -> Result<BTreeMap<String, f64>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("expected key=value, got '{pair}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("'{v}' is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn dimension_of(v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(Error::Parameter(format!("n must be a positive integer, got {v}")))
    }
}

fn extremal_from_params(
    family: Family,
    kv: &BTreeMap<String, f64>,
    matrix: Option<Vec<f64>>,
    center: Option<Vec<f64>>,
) -> Result<ExtremalSpec> {
    for k in kv.keys() {
        if !["n", "p", "q", "shape", "sigma", "amplitude"].contains(&k.as_str()) {
            return Err(Error::Usage(format!("unknown extremal parameter '{k}'")));
        }
    }
    let need = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| Error::Usage(format!("--params needs {k}")))
    };
    let n = dimension_of(need("n")?)?;
    let mut spec = ExtremalSpec::new(family, n, need("p")?, kv.get("q").copied())?;
    if let Some(&a) = kv.get("amplitude") {
        spec = spec.with_amplitude(a)?;
    }
    if let Some(&b) = kv.get("shape").or(kv.get("sigma")) {
        spec = spec.with_shape(b)?;
    }
    if let Some(m) = matrix {
        spec = spec.with_map(AffineMap::new(m, vec![0.0; n])?)?;
    }
    if let Some(c) = center {
        spec = spec.with_center(c)?;
    }
    Ok(spec)
}

/// Exponent whose mass decides the automatic box for a family.
fn family_mass_exponent(spec: &ExtremalSpec) -> f64 {
    match spec.family() {
        Family::GnSuperquadratic => {
            let (p, q) = (spec.p(), spec.q().unwrap_or(spec.p()));
            p * (q - 1.0) / (p - 1.0)
        }
        Family::LogSobolev => spec.p(),
        Family::GnCompact | Family::Morrey => 1.0,
    }
}

struct CheckRequest {
    id: InequalityId,
    q: Option<f64>,
    s: Option<f64>,
    directions: Option<usize>,
    k_opt: Option<f64>,
    m_n: Option<f64>,
}

impl CheckRequest {
    fn evaluate(&self, f: &GridFunction, p: f64) -> Result<InequalityReport> {
        let n = f.spec().dim();
        let quad = || quadrature(n, self.directions);
        match self.id {
            InequalityId::AffineGn | InequalityId::EuclideanGn => {
                let q = self.q.ok_or_else(|| Error::Usage("GN checks need --q".into()))?;
                let s = self.s.unwrap_or(p * (q - 1.0) / (p - 1.0));
                let params = GNParameters::new(n, p, q, s)?;
                let (k, source) = match self.k_opt {
                    Some(k) => (k, None),
                    None => default_k_opt(&params)?,
                };
                let mut report = if self.id == InequalityId::AffineGn {
                    check_affine_gn(f, &params, &quad()?, k)?
                } else {
                    check_euclidean_gn(f, &params, k)?
                };
                if let Some(src) = source {
                    report.notes.push(format!("k_opt from {src}"));
                }
                Ok(report)
            }
            InequalityId::AffineSobolev => check_affine_sobolev(f, n, p, &quad()?),
            InequalityId::AffineNash => {
                let (k, source) = match self.k_opt {
                    Some(k) => (k, None),
                    None => {
                        let params = GNParameters::new(n, p, 1.0, p)?;
                        let k = solver_k_opt(&params)?;
                        (k, Some("the minimizer at (q, s) = (1, p)"))
                    }
                };
                let mut report = check_affine_nash(f, n, p, &quad()?, k)?;
                if let Some(src) = source {
                    report.notes.push(format!("k_opt from {src}"));
                }
                Ok(report)
            }
            InequalityId::LogSobolev => check_log_sobolev(f, n, p, &quad()?),
            InequalityId::AffineMoserTrudinger | InequalityId::EuclideanMoserTrudinger => {
                let m_n = self
                    .m_n
                    .ok_or_else(|| Error::Usage("Moser-Trudinger checks need --m-n".into()))?;
                check_moser_trudinger(f, n, &quad()?, m_n, self.id == InequalityId::AffineMoserTrudinger)
            }
            InequalityId::AffineMorreySobolev | InequalityId::EuclideanMorreySobolev => {
                check_morrey_sobolev(f, n, p, &quad()?, self.id == InequalityId::AffineMorreySobolev)
            }
        }
    }
}

/// Closed-form constant when the exponents lie on one of the two extremal
/// families, the minimizer otherwise.
fn default_k_opt(params: &GNParameters) -> Result<(f64, Option<&'static str>)> {
    let GNParameters { n, p, q, s } = *params;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
    if q > p && close(s, p * (q - 1.0) / (p - 1.0)) {
        return Ok((c2(n, p, q)?, Some("the closed form C2")));
    }
    if s < p && s > 1.0 && close(q, p * (s - 1.0) / (p - 1.0)) {
        return Ok((c3(n, p, s)?, Some("the closed form C3")));
    }
    Ok((solver_k_opt(params)?, Some("the minimizer")))
}

fn solver_k_opt(params: &GNParameters) -> Result<f64> {
    let grid = if params.n == 2 {
        GridSpec::new(2, 12.0, 128)?
    } else {
        GridSpec::new(params.n, 8.0, 32)?
    };
    let r = minimize(params, grid, &MinimizeOptions::default())?;
    if !r.converged {
        return Err(Error::Solver {
            message: "no converged K_opt for the check".into(),
            iterations: r.iterations_used,
            energy: r.energy,
        });
    }
    Ok(r.k_opt)
}

/// Resolves `--input` to a grid function. Builtins are built from `n`,
/// `p`, `q` and the optional grid and matrix flags.
fn resolve_input(
    input: &InputArgs,
    p: f64,
    q: Option<f64>,
    id: Option<InequalityId>,
) -> Result<GridFunction> {
    let Some(name) = input.input.strip_prefix("builtin:") else {
        if input.grid.is_some() || input.matrix.is_some() {
            return Err(Error::Usage("--grid and --matrix apply only to builtin inputs".into()));
        }
        let f = GridFunction::read_json(&input.input)?;
        if let Some(n) = input.n {
            if n != f.spec().dim() {
                return Err(Error::Parameter(format!(
                    "--n {n} but the grid file is {}-dimensional",
                    f.spec().dim()
                )));
            }
        }
        return Ok(f);
    };
    let n = input
        .n
        .ok_or_else(|| Error::Usage("builtin inputs need --n".into()))?;
    let grid = input.grid.as_deref().map(parse_grid).transpose()?;
    let map = input
        .matrix
        .clone()
        .map(|m| AffineMap::new(m, vec![0.0; n]))
        .transpose()?;
    builtin(name, n, p, q, id, grid, map)
}

fn builtin(
    name: &str,
    n: usize,
    p: f64,
    q: Option<f64>,
    id: Option<InequalityId>,
    grid: Option<(usize, Option<f64>)>,
    map: Option<AffineMap>,
) -> Result<GridFunction> {
    let default_points = if n == 2 { 512 } else { 64 };
    let points = grid.map_or(default_points, |g| g.0);
    let half = grid.and_then(|g| g.1);
    let radial = |default_half: f64, rule: fn(f64) -> f64| -> Result<GridFunction> {
        let spec = GridSpec::new(n, half.unwrap_or(default_half), points)?;
        let map = map.clone();
        GridFunction::sample(spec, move |x| {
            let r = match &map {
                Some(m) => m.image_norm(x),
                None => x.iter().map(|t| t * t).sum::<f64>().sqrt(),
            };
            rule(r)
        })
    };
    let extremal = |spec: ExtremalSpec| -> Result<GridFunction> {
        let spec = match &map {
            Some(m) => spec.with_map(m.clone())?,
            None => spec,
        };
        let half = match half {
            Some(l) => l,
            None => spec.auto_half_width(family_mass_exponent(&spec), points)?,
        };
        let grid = GridSpec::new(n, half, points)?;
        let spec = if spec.family() == Family::Morrey {
            // put the cusp on a cell centre so that max|f| is attained
            let c = grid.coordinate(points / 2);
            spec.with_center(vec![c; n])?
        } else {
            spec
        };
        spec.sample(grid)
    };
    match name {
        "gn_extremal" | "gn_superquadratic" => {
            let q = match (q, id) {
                (Some(q), _) => q,
                (None, Some(InequalityId::AffineSobolev)) => p * (n as f64 - 1.0) / (n as f64 - p),
                _ => return Err(Error::Usage("the GN extremal needs --q".into())),
            };
            extremal(ExtremalSpec::gn_superquadratic(n, p, q)?)
        }
        "gn_compact" => {
            // in GN form the compact family's own exponent is s
            let q = q.ok_or_else(|| Error::Usage("gn_compact needs its exponent via --q".into()))?;
            extremal(ExtremalSpec::gn_compact(n, p, q)?)
        }
        "log_sobolev" => extremal(ExtremalSpec::log_sobolev(n, p, 1.0)?),
        "morrey" => extremal(ExtremalSpec::morrey(n, p)?),
        "gaussian" => radial(6.0, |r| (-r * r).exp()),
        "bump" => radial(1.25, |r| (1.0 - r * r).max(0.0).powi(3)),
        "moser" => radial(1.25, |r| if r >= 1.0 { 0.0 } else { (1.0 / r.max(0.2)).ln() }),
        other => Err(Error::Usage(format!("unknown builtin '{other}'"))),
    }
}

fn sweep(
    id: InequalityId,
    param_grid: &str,
    n: usize,
    input: Option<&str>,
    grid: Option<&str>,
    directions: Option<usize>,
) -> Result<String> {
    let axes: Vec<(String, Vec<f64>)> = param_grid
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|axis| {
            let (k, vs) = axis
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("expected key=v1,v2,..., got '{axis}'")))?;
            let k = k.trim().to_string();
            if !["n", "p", "q", "s", "k_opt", "m_n", "shape"].contains(&k.as_str()) {
                return Err(Error::Usage(format!("unknown sweep key '{k}'")));
            }
            let vs = vs
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Usage(format!("'{v}' is not a number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((k, vs))
        })
        .collect::<Result<_>>()?;
    if axes.is_empty() {
        return Err(Error::Usage("empty parameter grid".into()));
    }
    let mut tuples: Vec<Vec<f64>> = vec![vec![]];
    for (_, vs) in &axes {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                vs.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    tuples.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    tuples.dedup();

    let rows: Vec<Result<String>> = tuples
        .par_iter()
        .map(|t| {
            let kv: BTreeMap<&str, f64> = axes.iter().map(|(k, _)| k.as_str()).zip(t.iter().copied()).collect();
            let n = kv.get("n").map_or(Ok(n), |&v| dimension_of(v))?;
            let p = kv.get("p").copied().unwrap_or(match id {
                InequalityId::AffineMorreySobolev | InequalityId::EuclideanMorreySobolev => n as f64 + 1.0,
                InequalityId::AffineMoserTrudinger | InequalityId::EuclideanMoserTrudinger => n as f64,
                _ => 1.5,
            });
            let q = kv.get("q").copied();
            let default_input = match id {
                InequalityId::AffineGn | InequalityId::EuclideanGn | InequalityId::AffineSobolev => "builtin:gn_extremal",
                InequalityId::AffineNash => "builtin:bump",
                InequalityId::LogSobolev => "builtin:log_sobolev",
                InequalityId::AffineMoserTrudinger | InequalityId::EuclideanMoserTrudinger => "builtin:moser",
                InequalityId::AffineMorreySobolev | InequalityId::EuclideanMorreySobolev => "builtin:morrey",
            };
            let args = InputArgs {
                input: input.unwrap_or(default_input).to_string(),
                n: Some(n),
                p: Some(p),
                grid: grid.map(str::to_string),
                matrix: None,
            };
            let f = resolve_input(&args, p, q, Some(id))?;
            let request = CheckRequest {
                id,
                q,
                s: kv.get("s").copied(),
                directions,
                k_opt: kv.get("k_opt").copied(),
                m_n: kv.get("m_n").copied().or(Some(1.0)),
            };
            let r = request
                .evaluate(&f, p)
                .map_err(|e| Error::Parameter(format!("at {kv:?}: {e}")))?;
            let mut row = vec![id.name().to_string()];
            row.extend(t.iter().map(|v| v.to_string()));
            row.extend([r.lhs, r.rhs, r.ratio, r.slack].iter().map(|v| v.to_string()));
            Ok(row.join(","))
        })
        .collect();
    let mut csv = String::from("inequality_id");
    for (k, _) in &axes {
        csv.push(',');
        csv.push_str(k);
    }
    csv.push_str(",lhs,rhs,ratio,slack\n");
    for row in rows {
        csv.push_str(&row?);
        csv.push('\n');
    }
    Ok(csv)
}
