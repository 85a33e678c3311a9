//! Command-line front end. Every command writes its data files and a
//! `manifest.json` into `--out`.
//!
//! Exit codes: 0 success, 1 a checked property failed (or a computation did
//! not converge), 2 usage error (bad flags, bad config, unwritable output).

pub mod config;
pub mod manifest;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use manifest::RunWriter;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "opflow", version, about = "Spectral flow and operator-topology experiments")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "opflow-out")]
    pub out: PathBuf,
    /// Seed for the randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Flat `key = value` file presetting flags (also read from OPFLOW_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathKind {
    /// The Robin loop over the boundary parameter.
    Robin,
    /// A constant path.
    Const,
    /// `diag(t - 1/2, 2)`.
    Cross,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sampled eigenvalues of the Robin family around the loop.
    Specgraph {
        #[arg(long, default_value_t = 128)]
        samples: usize,
        #[arg(long, default_value_t = 800)]
        grid: usize,
        #[arg(long, default_value_t = 50.0)]
        window: f64,
    },
    /// Spectral flow along a builtin path.
    Specflow {
        #[arg(long, value_enum, default_value_t = PathKind::Robin)]
        path: PathKind,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 800)]
        grid: usize,
        #[arg(long, default_value_t = 50.0)]
        window: f64,
        #[arg(long = "max-depth", default_value_t = 30)]
        max_depth: usize,
    },
    /// Riesz lower bound against gap distance near the Dirichlet point.
    Dichotomy {
        #[arg(long, default_value_t = 25)]
        points: usize,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long = "x1-min", default_value_t = 1e-4)]
        x1_min: f64,
        #[arg(long = "x1-max", default_value_t = 0.9)]
        x1_max: f64,
    },
    /// Randomized check of the transform identities.
    Identities {
        #[arg(long, default_value_t = 16)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Contraction homotopies and the log retraction sampled in t.
    HomotopyDemo {
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, default_value_t = 9)]
        points: usize,
        /// Dimension of the random odd unitary fed to the log retraction.
        #[arg(long, default_value_t = 6)]
        dim: usize,
    },
    /// Cayley-distance bound for spectral surgery outside a cutoff.
    Surgery {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.1, 0.02])]
        eps: Vec<f64>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("cannot write output: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    match run_inner(args) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Failed(m)) => {
            eprintln!("failed: {m}");
            EXIT_FAILED
        }
    }
}

fn run_inner(args: Vec<OsString>) -> CliResult<()> {
    let cmd = Cli::command();
    let config = match config::locate(&args) {
        Some(path) => Some(config::load(&path).map_err(CliError::Usage)?),
        None => None,
    };
    let args = match &config {
        Some(c) => config::merge(&cmd, &args, c),
        None => args,
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(CliError::Usage(e.to_string().trim_end().to_string()));
        }
    };
    execute(&cli, config.as_ref())
}

/// Shortest round-trip form, in exponent notation when plain decimals would be long.
fn num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn params(cli: &Cli, extra: &[(&str, String)]) -> BTreeMap<String, String> {
    let mut m: BTreeMap<String, String> = extra.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    m.insert("seed".into(), cli.seed.to_string());
    m.insert("out".into(), cli.out.display().to_string());
    m
}

fn writer(cli: &Cli, name: &str, extra: &[(&str, String)], config: Option<&config::ConfigFile>) -> CliResult<RunWriter> {
    let mut w = RunWriter::new(&cli.out, name, params(cli, extra))?;
    if let Some(c) = config {
        w.input(&c.path.display().to_string(), &c.bytes);
    }
    Ok(w)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn execute(cli: &Cli, config: Option<&config::ConfigFile>) -> CliResult<()> {
    match &cli.command {
        &Command::Specgraph { samples, grid, window } => {
            if samples < 16 {
                return Err(usage(format!("--samples must be at least 16, got {samples}")));
            }
            let graph = crate::sturm::spectral_graph(samples, grid, window)?;
            let mut csv = String::from("theta,branch_index,lambda\n");
            for s in &graph {
                for (i, l) in &s.branches {
                    writeln!(csv, "{},{},{}", num(s.theta), i, num(*l)).expect("write to string");
                }
            }
            let mut w = writer(
                cli,
                "specgraph",
                &[("samples", samples.to_string()), ("grid", grid.to_string()), ("window", window.to_string())],
                config,
            )?;
            w.write("specgraph.csv", csv.as_bytes())?;
            w.finish()?;
            for (lo, hi) in crate::sturm::zero_crossings(&graph) {
                println!("lowest branch crosses zero in [{lo:.6}, {hi:.6}]");
            }
            Ok(())
        }
        &Command::Specflow {
            path,
            samples,
            grid,
            window,
            max_depth,
        } => {
            let p = match path {
                PathKind::Robin => crate::specflow::robin_loop(grid, samples)?,
                PathKind::Const => crate::specflow::constant_path(samples)?,
                PathKind::Cross => crate::specflow::crossing_path(samples)?,
            };
            let name = format!("{path:?}").to_lowercase();
            let mut w = writer(
                cli,
                "specflow",
                &[
                    ("path", name),
                    ("samples", samples.to_string()),
                    ("grid", grid.to_string()),
                    ("window", window.to_string()),
                    ("max-depth", max_depth.to_string()),
                ],
                config,
            )?;
            let report = crate::specflow::spectral_flow(&p, window, max_depth)?;
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            w.write("specflow.json", json.as_bytes())?;
            w.finish()?;
            println!("flow = {}", report.flow);
            Ok(())
        }
        &Command::Dichotomy {
            points,
            grid,
            x1_min,
            x1_max,
        } => {
            let rows = crate::sturm::dichotomy_sweep(points, x1_min, x1_max, grid)?;
            let mut csv = String::from("x1,riesz_lower_bound,gap_dist\n");
            for r in &rows {
                writeln!(csv, "{},{},{}", num(r.x1), num(r.riesz_lower_bound), num(r.gap_dist)).expect("write to string");
            }
            let mut w = writer(
                cli,
                "dichotomy",
                &[
                    ("points", points.to_string()),
                    ("grid", grid.to_string()),
                    ("x1-min", x1_min.to_string()),
                    ("x1-max", x1_max.to_string()),
                ],
                config,
            )?;
            w.write("dichotomy.csv", csv.as_bytes())?;
            w.finish()?;
            Ok(())
        }
        &Command::Identities { dim, trials, tolerance } => {
            if dim == 0 || trials == 0 {
                return Err(usage("--dim and --trials must be positive"));
            }
            let checks = crate::identities::run_identity_suite::<f64>(cli.seed, dim, trials)?;
            let mut w = writer(
                cli,
                "identities",
                &[
                    ("dim", dim.to_string()),
                    ("trials", trials.to_string()),
                    ("tolerance", tolerance.to_string()),
                ],
                config,
            )?;
            let mut json = serde_json::to_string_pretty(&checks).expect("checks serialize");
            json.push('\n');
            w.write("identities.json", json.as_bytes())?;
            w.finish()?;
            let mut bad = 0;
            for c in &checks {
                let ok = c.max_deviation <= tolerance;
                bad += usize::from(!ok);
                println!("{:<40} {:.3e} {}", c.name, c.max_deviation, if ok { "ok" } else { "FAIL" });
            }
            if bad > 0 {
                return Err(CliError::Failed(format!("{bad} identities exceed tolerance {tolerance:e}")));
            }
            Ok(())
        }
        &Command::HomotopyDemo { grid, points, dim } => homotopy_demo(cli, config, grid, points, dim),
        Command::Surgery { trials, dim, eps } => {
            let stats = eps
                .iter()
                .enumerate()
                .map(|(k, &e)| crate::classify::surgery_trials(cli.seed.wrapping_add(k as u64), e, *trials, *dim))
                .collect::<Result<Vec<_>, _>>()?;
            let mut csv = String::from("eps,cutoff,trials,max_cayley_dist,violations\n");
            for s in &stats {
                writeln!(csv, "{},{},{},{},{}", num(s.eps), num(s.cutoff), s.trials, num(s.max_cayley_dist), s.violations)
                    .expect("write to string");
            }
            let eps_list = eps.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
            let mut w = writer(
                cli,
                "surgery",
                &[("trials", trials.to_string()), ("dim", dim.to_string()), ("eps", eps_list)],
                config,
            )?;
            w.write("surgery.csv", csv.as_bytes())?;
            w.finish()?;
            print!("{csv}");
            let bad: usize = stats.iter().map(|s| s.violations).sum();
            if bad > 0 {
                return Err(CliError::Failed(format!("surgery bound violated in {bad} trials")));
            }
            Ok(())
        }
    }
}

fn homotopy_demo(cli: &Cli, config: Option<&config::ConfigFile>, grid: usize, points: usize, dim: usize) -> CliResult<()> {
    use crate::homotopy::{homotopy_sweep, discretization_defect, GridSpace, INJECTIVITY_TOL};
    if points < 2 || dim == 0 {
        return Err(usage("--points must be at least 2 and --dim positive"));
    }
    let space = GridSpace::new(grid)?;
    // odd unitary away from -1: Cayley transform of an odd embedding of 2·unitary
    let mut rng = crate::random::seeded(cli.seed);
    let base = crate::random::random_unitary::<f64>(&mut rng, dim).scale_real(2.0);
    let u = crate::transforms::cayley(&crate::transforms::odd_embedding(&base)?)?;
    let rows = homotopy_sweep(&space, points, &u)?;
    let mut csv =
        String::from("t,compact_min_singular,invertible_min_abs,retraction_unitarity,retraction_odd_defect\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            num(r.t),
            num(r.compact_min_singular),
            num(r.invertible_min_abs),
            num(r.retraction_unitarity),
            num(r.retraction_odd_defect)
        )
        .expect("write to string");
    }
    let ts = [0.1, 0.3, 0.5, 0.7, 0.9];
    let sizes = [grid, 2 * grid, 4 * grid];
    let deltas = sizes
        .iter()
        .map(|&n| discretization_defect::<f64>(n, &ts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut disc = String::from("n,delta\n");
    for (n, d) in sizes.iter().zip(&deltas) {
        writeln!(disc, "{n},{}", num(*d)).expect("write to string");
    }
    let mut w = writer(
        cli,
        "homotopy-demo",
        &[("grid", grid.to_string()), ("points", points.to_string()), ("dim", dim.to_string())],
        config,
    )?;
    w.write("homotopy.csv", csv.as_bytes())?;
    w.write("discretization.csv", disc.as_bytes())?;
    w.finish()?;
    print!("{csv}{disc}");
    let injective = rows
        .iter()
        .all(|r| r.compact_min_singular > INJECTIVITY_TOL && r.invertible_min_abs > INJECTIVITY_TOL);
    let odd = rows.iter().all(|r| r.retraction_odd_defect <= 1e-9);
    let decreasing = deltas.windows(2).all(|d| d[1] < d[0]);
    if !(injective && odd && decreasing) {
        return Err(CliError::Failed(format!(
            "homotopy checks: injective {injective}, odd preserved {odd}, discretization decreasing {decreasing}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1e-4, 3.3e-5, 0.125, -7.5e6, 2e300, -1e-320] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(3.3e-5), "3.3e-5");
    }

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn config_merge_respects_flags() {
        let cmd = Cli::command();
        let cfg = config::ConfigFile {
            path: "c".into(),
            bytes: Vec::new(),
            entries: config::parse("samples = 32\ngrid = 100\nseed = 5\ntrials = 3\n").unwrap(),
        };
        let args: Vec<OsString> = ["opflow", "--out", "d", "specgraph", "--grid", "64"].iter().map(Into::into).collect();
        let merged = config::merge(&cmd, &args, &cfg);
        let cli = Cli::try_parse_from(merged).unwrap();
        assert_eq!(cli.seed, 5);
        match cli.command {
            Command::Specgraph { samples, grid, .. } => assert_eq!((samples, grid), (32, 64)),
            other => panic!("{other:?}"),
        }
    }
}
