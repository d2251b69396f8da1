//! `grassmann`: batch front end for property suites, covariance tables,
//! stochastic integrals and algebra programs.
//!
//! Exit codes: 0 success, 1 check/verification failure, 2 usage error.

mod config;
mod integrand;
mod program;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grassmann_fock::process::{covariance_grid, pettis_convergence, ProcessModel, SpectralDensity};
use grassmann_fock::suite::{run_suite, Suite, SuiteConfig};
use grassmann_fock::{Error, GrassmannElement};

use config::RunConfig;
use integrand::Integrand;
use program::ProgramError;

#[derive(Parser)]
#[command(
    name = "grassmann",
    version,
    about = "Grassmann-algebra arithmetic, Fock operators and stationary-increment processes"
)]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Generator budget G_max of the weight system (1..=64).
    #[arg(long, global = true, value_name = "N")]
    g_max: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and print its JSON report.
    Check {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Tabulate the covariance series against the spectral oracle as CSV.
    Covariance {
        #[command(flatten)]
        density: DensityArgs,
        /// Times t as `a:b:step` (inclusive) or a single value.
        #[arg(long, value_parser = parse_grid)]
        t_grid: Grid,
        /// Times s; defaults to the t grid.
        #[arg(long, value_parser = parse_grid)]
        s_grid: Option<Grid>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Riemann-sum stochastic integral ∫_a^b Y(t) W(t) g dt with a convergence table.
    Integrate {
        #[command(flatten)]
        density: DensityArgs,
        /// Element JSON for g.
        #[arg(long, value_name = "FILE")]
        g: PathBuf,
        /// Integrand Y: an element JSON (constant) or `{"pieces": [...]}`.
        #[arg(long = "Y", value_name = "FILE")]
        y: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a JSON algebra program.
    Eval {
        #[arg(long, value_name = "FILE")]
        program: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct DensityArgs {
    /// Hurst index of the power-law density |u|^{1-2H}.
    #[arg(long = "H", value_name = "H")]
    hurst: Option<f64>,
    /// Brownian motion (constant density).
    #[arg(long)]
    bm: bool,
}

impl DensityArgs {
    fn density(&self) -> Result<Option<SpectralDensity>, Failure> {
        if self.bm {
            return Ok(Some(SpectralDensity::Constant));
        }
        self.hurst.map(SpectralDensity::power_law).transpose().map_err(Failure::usage)
    }
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let nums: Vec<f64> =
        s.split(':').map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"))).collect::<Result<_, _>>()?;
    if nums.iter().any(|x| !x.is_finite()) {
        return Err("grid values must be finite".into());
    }
    match nums[..] {
        [x] => Ok(Grid(vec![x])),
        [a, b, step] => {
            if step.is_nan() || step <= 0.0 || b < a {
                return Err("grid needs a <= b and step > 0".into());
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 100_000 {
                return Err(format!("grid has {count} points; at most 100000 allowed"));
            }
            Ok(Grid((0..count).map(|k| a + k as f64 * step).collect()))
        }
        _ => Err("expected `a:b:step` or a single value".into()),
    }
}

/// A non-zero exit: usage errors map to 2, verification failures to 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::Usage(e.to_string())
    }

    /// Module errors: violated preconditions of the run's own parameters are
    /// usage errors, everything else a verification failure named by variant.
    fn from_module(e: Error) -> Self {
        match e {
            Error::BoundDiverges { .. } => Failure::Usage(format!(
                "the weights violate the growth condition of the Våge inequality (ξ > ln 2 / (2d)): {e}"
            )),
            Error::InvalidWeights(_)
            | Error::InvalidDensity(_)
            | Error::InvalidParameter(_)
            | Error::GridExceeded { .. } => Failure::Usage(format!("{}: {e}", e.name())),
            _ => Failure::Check(format!("{}: {e}", e.name())),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Check(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_model(cfg: &RunConfig, density: &DensityArgs, n_max: Option<usize>) -> Result<ProcessModel, Failure> {
    let model_cfg = cfg.model(density.density()?, n_max);
    ProcessModel::new(model_cfg).map_err(Failure::from_module)
}

fn check(
    cfg: &RunConfig,
    g_max: Option<u32>,
    suite: Suite,
    seed: Option<u64>,
    samples: Option<usize>,
) -> Result<(), Failure> {
    let weights = cfg.weights(g_max).map_err(Failure::from_module)?;
    let suite_cfg = SuiteConfig {
        weights,
        ..SuiteConfig::new(seed.or(cfg.seed).unwrap_or(42), samples.or(cfg.samples).unwrap_or(1000))
    };
    let report = run_suite(suite, &suite_cfg).map_err(Failure::from_module)?;
    println!("{}", report.to_json());
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.invariants.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        Err(Failure::Check(format!("invariants violated: {}", failed.join(", "))))
    }
}

fn covariance(
    cfg: &RunConfig,
    density: &DensityArgs,
    ts: &Grid,
    ss: Option<&Grid>,
    n_max: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let model = build_model(cfg, density, n_max)?;
    let grid = covariance_grid(&model, &ts.0, &ss.unwrap_or(ts).0).map_err(Failure::from_module)?;
    emit(out, &grid.to_csv())?;
    eprintln!("max rel_err {:.6e} over {} points (n_max = {})", grid.max_rel_err(), grid.rows.len(), model.n_max());
    if let Some((scale, spread)) = grid.fitted_scale() {
        eprintln!("fitted scale K_oracle/K_closed_form = {scale:.12} (relative spread {spread:.3e})");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    cfg: &RunConfig,
    g_max: Option<u32>,
    density: &DensityArgs,
    g_path: &Path,
    y_path: &Path,
    (a, b): (f64, f64),
    steps: usize,
    n_max: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if steps == 0 {
        return Err(Failure::Usage("--steps must be at least 1".into()));
    }
    let weights = cfg.weights(g_max).map_err(Failure::from_module)?;
    let g = GrassmannElement::from_json(&read(g_path)?)
        .map_err(|e| Failure::Check(format!("g ({}): {e}", g_path.display())))?;
    let y = Integrand::parse(&read(y_path)?).map_err(|e| Failure::Check(format!("Y ({}): {e}", y_path.display())))?;
    for top in [g.max_generator(), y.max_generator()] {
        if top > weights.g_max() {
            return Err(Failure::from_module(Error::TruncationOverflow { generator: top, limit: weights.g_max() }));
        }
    }
    let model = build_model(cfg, density, n_max)?;
    let p = cfg.p.unwrap_or(1);
    let report = pettis_convergence(&model, |t| y.eval(t), &g, (a, b), steps, (p, &weights), None)
        .map_err(Failure::from_module)?;
    let doc = serde_json::json!({
        "a": a,
        "b": b,
        "steps": steps,
        "norm_p": p,
        "value": report.value,
        "table": report.table,
    });
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("report serializes")))
}

fn eval(cfg: &RunConfig, g_max: Option<u32>, path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let weights = cfg.weights(g_max).map_err(Failure::from_module)?;
    let result = program::parse(&read(path)?).and_then(|ops| program::run(ops, &weights));
    let value = result.map_err(|e| match e {
        ProgramError::Malformed(msg) => Failure::Check(msg),
        ProgramError::Algebra(e) => Failure::Check(format!("{}: {e}", e.name())),
    })?;
    emit(out, &format!("{}\n", serde_json::to_string_pretty(&value).expect("value serializes")))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let cfg = RunConfig::load(cli.config.as_deref()).map_err(|e| Failure::Usage(format!("{e:#}")))?;
    let g_max = cli.g_max;
    match cli.command {
        Command::Check { suite, seed, samples } => check(&cfg, g_max, suite, seed, samples),
        Command::Covariance { density, t_grid, s_grid, n_max, out } => {
            covariance(&cfg, &density, &t_grid, s_grid.as_ref(), n_max, out.as_deref())
        }
        Command::Integrate { density, g, y, a, b, steps, n_max, out } => {
            integrate(&cfg, g_max, &density, &g, &y, (a, b), steps, n_max, out.as_deref())
        }
        Command::Eval { program, out } => eval(&cfg, g_max, &program, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5:2:0.5").unwrap().0, vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("0.25:2.0:0.25").unwrap().0.len(), 8);
        assert_eq!(parse_grid("1.5").unwrap().0, vec![1.5]);
        for bad in ["", "1:2", "2:1:0.5", "0:1:0", "a:b:c", "0:1:-1", "0:1e9:1e-9"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_parse() {
        Cli::try_parse_from(["grassmann", "check", "--suite", "algebra", "--seed", "1"]).unwrap();
        Cli::try_parse_from(["grassmann", "--g-max", "10", "covariance", "--bm", "--t-grid", "0.5:1:0.5"]).unwrap();
        assert!(Cli::try_parse_from(["grassmann", "covariance", "--bm", "--H", "0.7", "--t-grid", "1"]).is_err());
        assert!(Cli::try_parse_from(["grassmann", "check", "--suite", "nonsense"]).is_err());
    }
}
