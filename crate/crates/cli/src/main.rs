mod svg;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use thurston::combinatorics::{enumerate_admissible, EnumerationFilter, DEFAULT_ENUMERATION_BOUND};
use thurston::kneading::{
    entropy_from_k1, entropy_of_combinatorics, invariants_of_combinatorics, KneadingError,
    KneadingInvariants,
};
use thurston::plmodel::{LevyCertificate, PlModel};
use thurston::pullback::{
    run_from, InitStrategy, PullbackConfig, PullbackError, PullbackOutcome, Verdict,
};
use thurston::quadmap::EpsteinParams;
use thurston::real::Precision;
use thurston::{Combinatorics, CombinatoricsError};

use svg::{Marked, Palette};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CombinatoricsError> for CliError {
    fn from(e: CombinatoricsError) -> Self {
        match e {
            CombinatoricsError::Inadmissible(..) => CliError::Domain(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<PullbackError> for CliError {
    fn from(e: PullbackError) -> Self {
        match e {
            PullbackError::Combinatorics(c) => c.into(),
            PullbackError::InvalidExplicitState(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<KneadingError> for CliError {
    fn from(e: KneadingError) -> Self {
        match e {
            KneadingError::Combinatorics(c) => c.into(),
            KneadingError::WrongShape(_) | KneadingError::MismatchedK1 { .. } => {
                CliError::Domain(e.to_string())
            }
            KneadingError::Overflow => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "thurston",
    version,
    about = "Thurston pullback, obstructions and kneading for real quadratic rational maps"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a combinatorics; exit 2 when it is not admissible.
    Validate { combinatorics: String },
    /// Run the pullback from the default or an explicit start.
    Run {
        combinatorics: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "json")]
        out: OutFormat,
        #[command(flatten)]
        plot: PlotArgs,
    },
    /// Classify and run every admissible combinatorics up to `n_max`.
    Sweep {
        n_max: usize,
        #[arg(long)]
        minimal: bool,
        #[arg(long)]
        nonpoly: bool,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BOUND)]
        bound: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "csv")]
        out: OutFormat,
    },
    /// Kneading invariants K1, K2 of a unimodal combinatorics.
    Knead { combinatorics: String },
    /// Topological entropy from K1 or from a unimodal combinatorics.
    Entropy {
        combinatorics: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        k1: Option<f64>,
    },
    /// SVG of the lifted graph, either for given parameters or for the
    /// pullback limit of a combinatorics.
    Plot {
        combinatorics: Option<String>,
        #[arg(long, allow_hyphen_values = true, value_name = "MU,KAPPA")]
        params: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        plot: PlotArgs,
    },
    /// Search for a Levy cycle certificate in the PL model.
    Levy {
        combinatorics: String,
        /// Longest cycle searched; defaults to n.
        #[arg(long)]
        max_period: Option<usize>,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, env = "THURSTON_PRECISION", default_value = "double")]
    precision: Precision,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Convergence tolerance on the marked points.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    tol_sigma_delta: Option<f64>,
    #[arg(long)]
    mu_blowup: Option<f64>,
    #[arg(long)]
    gap_min: Option<f64>,
    /// Explicit start "t0,...,tn".
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    /// Write the trajectory CSV here.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PlotArgs {
    /// Colors for the first critical orbit, second, shared, other.
    #[arg(long, default_value = "blue,red,purple,gray")]
    palette: Palette,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Svg,
}

impl RunArgs {
    fn config(&self) -> Result<PullbackConfig, CliError> {
        let mut cfg = PullbackConfig {
            precision: self.precision,
            ..PullbackConfig::default()
        };
        if let Some(v) = self.max_iter {
            if v == 0 {
                return Err(CliError::Usage("--max-iter must be at least 1".into()));
            }
            cfg.max_iter = v;
        }
        for (name, value, slot) in [
            ("--tol", self.tol, &mut cfg.tol_conv),
            (
                "--tol-sigma-delta",
                self.tol_sigma_delta,
                &mut cfg.tol_sigma_delta,
            ),
            ("--mu-blowup", self.mu_blowup, &mut cfg.mu_blowup),
            ("--gap-min", self.gap_min, &mut cfg.gap_min),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Usage(format!("{name} must be positive")));
                }
                *slot = v;
            }
        }
        Ok(cfg)
    }

    fn strategy(&self) -> Result<InitStrategy, CliError> {
        match &self.start {
            None => Ok(InitStrategy::EquallySpaced),
            Some(s) => Ok(InitStrategy::Explicit(parse_floats(s)?)),
        }
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, CliError> {
    s.trim()
        .trim_matches(|ch| ch == '(' || ch == ')' || ch == '[' || ch == ']')
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid number `{}`", x.trim())))
        })
        .collect()
}

fn parse_combinatorics(s: &str) -> Result<Combinatorics, CliError> {
    Combinatorics::parse(s).map_err(|e| CliError::Usage(e.to_string()))
}

fn admissible(s: &str) -> Result<Combinatorics, CliError> {
    let c = parse_combinatorics(s)?;
    c.require_admissible()?;
    Ok(c)
}

fn print_json<T: Serialize>(v: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run_one(c: &Combinatorics, args: &RunArgs) -> Result<PullbackOutcome, CliError> {
    let out = run_from(c, &args.config()?, &args.strategy()?)?;
    if let Some(path) = &args.trajectory {
        fs::write(path, out.trajectory_csv())?;
    }
    Ok(out)
}

fn plot_outcome(out: &PullbackOutcome, palette: &Palette) -> String {
    svg::render(
        out.final_params,
        Some(Marked {
            c: &out.combinatorics,
            t: &out.t,
        }),
        palette,
    )
}

#[derive(Serialize)]
struct InadmissibleReport {
    combinatorics: Combinatorics,
    admissible: bool,
    reason: String,
}

fn cmd_validate(s: &str) -> Result<(), CliError> {
    let c = parse_combinatorics(s)?;
    match c.check_admissible() {
        Ok(()) => print_json(&c.classify()?),
        Err(v) => {
            print_json(&InadmissibleReport {
                combinatorics: c,
                admissible: false,
                reason: v.to_string(),
            })?;
            Err(CliError::Domain(format!("not admissible: {v}")))
        }
    }
}

fn cmd_run(s: &str, args: &RunArgs, out: OutFormat, plot: &PlotArgs) -> Result<(), CliError> {
    let c = admissible(s)?;
    let outcome = run_one(&c, args)?;
    match out {
        OutFormat::Json => print_json(&outcome)?,
        OutFormat::Csv => print!("{}", outcome.trajectory_csv()),
        OutFormat::Svg => print!("{}", plot_outcome(&outcome, &plot.palette)),
    }
    if outcome.verdict == Verdict::MaxIterations {
        let why = outcome
            .error
            .clone()
            .unwrap_or_else(|| "no verdict within --max-iter steps".into());
        return Err(CliError::Numerical(why));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    combinatorics: String,
    n: usize,
    shape: String,
    dynamic_type: String,
    minimal: bool,
    chi: String,
    verdict: String,
    mu: f64,
    kappa: f64,
    sigma: Option<f64>,
    delta: Option<f64>,
    iterations: usize,
    mu_limit: Option<String>,
    simplified: Option<String>,
    error: Option<String>,
}

fn sweep_row(c: &Combinatorics, args: &RunArgs) -> Result<SweepRow, CliError> {
    let report = c.classify()?;
    let cfg = args.config()?;
    let (verdict, mu, kappa, sigma, delta, iterations, mu_limit, simplified, error) =
        match run_from(c, &cfg, &InitStrategy::EquallySpaced) {
            Ok(o) => (
                format!("{:?}", o.verdict),
                o.final_params.mu,
                o.final_params.kappa,
                o.coords.map(|cc| cc.sigma),
                o.coords.map(|cc| cc.delta),
                o.iterations,
                o.mu_limit.map(|m| {
                    if m > 0.0 {
                        "+inf".to_string()
                    } else {
                        "-inf".to_string()
                    }
                }),
                o.simplified.map(|s| {
                    s.entries()
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                }),
                o.error,
            ),
            Err(e) => (
                "Error".into(),
                f64::NAN,
                f64::NAN,
                None,
                None,
                0,
                None,
                None,
                Some(e.to_string()),
            ),
        };
    Ok(SweepRow {
        combinatorics: c
            .entries()
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(","),
        n: c.n(),
        shape: report.shape.label().to_string(),
        dynamic_type: format!("{:?}", report.dynamic_type),
        minimal: report.minimal,
        chi: report.chi.to_string(),
        verdict,
        mu,
        kappa,
        sigma,
        delta,
        iterations,
        mu_limit,
        simplified,
        error,
    })
}

fn cmd_sweep(
    n_max: usize,
    filter: EnumerationFilter,
    bound: usize,
    args: &RunArgs,
    out: OutFormat,
) -> Result<(), CliError> {
    if args.start.is_some() || args.trajectory.is_some() {
        return Err(CliError::Usage(
            "sweep does not take --start or --trajectory".into(),
        ));
    }
    let mut all = Vec::new();
    for n in 1..=n_max {
        all.extend(enumerate_admissible(n, filter, bound)?);
    }
    let rows: Vec<SweepRow> = all
        .par_iter()
        .map(|c| sweep_row(c, args))
        .collect::<Result<_, _>>()?;
    match out {
        OutFormat::Json => print_json(&rows),
        OutFormat::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            for r in &rows {
                w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            w.flush()?;
            Ok(())
        }
        OutFormat::Svg => Err(CliError::Usage("sweep writes json or csv".into())),
    }
}

#[derive(Serialize)]
struct KneadReport {
    combinatorics: Combinatorics,
    #[serde(flatten)]
    invariants: KneadingInvariants,
    entropy: f64,
}

fn cmd_knead(s: &str) -> Result<(), CliError> {
    let c = admissible(s)?;
    let invariants = invariants_of_combinatorics(&c)?;
    let entropy = entropy_of_combinatorics(&c)?;
    print_json(&KneadReport {
        combinatorics: c,
        invariants,
        entropy,
    })
}

#[derive(Serialize)]
struct EntropyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    combinatorics: Option<Combinatorics>,
    k1: f64,
    entropy: f64,
}

fn cmd_entropy(comb: Option<&str>, k1: Option<f64>) -> Result<(), CliError> {
    match (comb, k1) {
        (Some(s), None) => {
            let c = admissible(s)?;
            let inv = invariants_of_combinatorics(&c)?;
            let entropy = entropy_of_combinatorics(&c)?;
            print_json(&EntropyReport {
                combinatorics: Some(c),
                k1: inv.k1,
                entropy,
            })
        }
        (None, Some(k)) => {
            if !(-1.0..=1.0).contains(&k) {
                return Err(CliError::Usage(format!(
                    "--k1 must lie in [-1, 1], got {k}"
                )));
            }
            print_json(&EntropyReport {
                combinatorics: None,
                k1: k,
                entropy: entropy_from_k1(k),
            })
        }
        _ => Err(CliError::Usage(
            "give either a combinatorics or --k1".into(),
        )),
    }
}

fn cmd_plot(
    comb: Option<&str>,
    params: Option<&str>,
    args: &RunArgs,
    plot: &PlotArgs,
) -> Result<(), CliError> {
    let text = match (comb, params) {
        (Some(s), None) => {
            let c = admissible(s)?;
            plot_outcome(&run_one(&c, args)?, &plot.palette)
        }
        (None, Some(p)) => {
            let v = parse_floats(p)?;
            let [mu, kappa] = v[..] else {
                return Err(CliError::Usage("--params needs MU,KAPPA".into()));
            };
            let p = EpsteinParams::new(mu, kappa).map_err(|e| CliError::Usage(e.to_string()))?;
            svg::render(p, None, &plot.palette)
        }
        _ => Err(CliError::Usage(
            "give either a combinatorics or --params".into(),
        ))?,
    };
    print!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct LevyReport {
    combinatorics: Combinatorics,
    max_period: usize,
    certificate: Option<LevyCertificate>,
}

fn cmd_levy(s: &str, max_period: Option<usize>) -> Result<(), CliError> {
    let c = admissible(s)?;
    let max_period = max_period.unwrap_or(c.n());
    let model = PlModel::build(&c).map_err(|e| CliError::Domain(e.to_string()))?;
    let certificate = model
        .find_levy_certificate(max_period)
        .map_err(|e| CliError::Domain(e.to_string()))?;
    print_json(&LevyReport {
        combinatorics: c,
        max_period,
        certificate,
    })
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Validate { combinatorics } => cmd_validate(&combinatorics),
        Command::Run {
            combinatorics,
            run,
            out,
            plot,
        } => cmd_run(&combinatorics, &run, out, &plot),
        Command::Sweep {
            n_max,
            minimal,
            nonpoly,
            bound,
            run,
            out,
        } => cmd_sweep(
            n_max,
            EnumerationFilter {
                minimal,
                nonpolynomial: nonpoly,
            },
            bound,
            &run,
            out,
        ),
        Command::Knead { combinatorics } => cmd_knead(&combinatorics),
        Command::Entropy { combinatorics, k1 } => cmd_entropy(combinatorics.as_deref(), k1),
        Command::Plot {
            combinatorics,
            params,
            run,
            plot,
        } => cmd_plot(combinatorics.as_deref(), params.as_deref(), &run, &plot),
        Command::Levy {
            combinatorics,
            max_period,
        } => cmd_levy(&combinatorics, max_period),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
