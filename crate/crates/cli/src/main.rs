use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use closed_image::certifier::{PreparedSet, RadiusOptions};
use closed_image::convex::{parse_set, ConvexSetDescription};
use closed_image::genericity::{nonclosed_demo_report, survey, SurveyConfig};
use closed_image::porosity::{default_radii, porosity_estimate, SetOracle};
use closed_image::{Error, LinearMap, Subspace, Tolerances, Vector};

#[derive(Parser)]
#[command(name = "closed-image", version, about = "Stability certificates for closed linear images of convex sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for all random streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative rank tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_rank: f64,
    /// LP feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_lp: f64,
    /// Sample count (meaning depends on the command).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct Pair {
    /// Set description (JSON file).
    #[arg(long)]
    set: PathBuf,
    /// Linear map (JSON file with rows, cols, entries).
    #[arg(long)]
    map: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a (map, set) pair.
    Certify(Pair),
    /// Estimate the kernel-trivial stability radius.
    Radius(Pair),
    /// Solve T w = y with w in the asymptotic cone (needs a relative-interior certificate).
    Preimage {
        #[command(flatten)]
        pair: Pair,
        /// Target, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        margin: f64,
    },
    /// Perturb an uncertified map into a certified one.
    Repair {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
    /// Estimate porosity of a built-in set at a point.
    Porosity {
        #[arg(long, value_enum)]
        oracle: OracleChoice,
        /// Center of the estimate, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        at: Vec<f64>,
        /// Largest radius of the schedule.
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        /// Matrix rows for the rank-deficient oracle.
        #[arg(long, default_value_t = 2)]
        rows: usize,
    },
    /// Classify random Gaussian maps against a set.
    Survey {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        m: usize,
        /// Number of leading samples rechecked under perturbation.
        #[arg(long, default_value_t = 100)]
        recheck: usize,
    },
    /// The rotated-cone projection whose image is not closed.
    DemoNonclosed {
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleChoice {
    /// The hyperplane `x_n = 0`.
    Hyperplane,
    /// The origin.
    Point,
    Whole,
    /// Rank-deficient matrices with `--rows` rows, flattened row-major.
    RankDeficient,
    /// The unit circle in the plane.
    Circle,
}

enum CliError {
    Lib(Error),
    Io(String),
    Parse(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> &str {
        match self {
            CliError::Lib(e) => e.code(),
            CliError::Io(_) => "io",
            CliError::Parse(_) => "parse",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Lib(e) => e.to_string(),
            CliError::Io(m) | CliError::Parse(m) => m.clone(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_set(path: &Path) -> CliResult<ConvexSetDescription> {
    Ok(parse_set(&read(path)?)?)
}

fn load_map(path: &Path) -> CliResult<LinearMap> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("outputs serialize")
}

fn prepared(pair: &Pair, tol: Tolerances) -> CliResult<(PreparedSet, LinearMap)> {
    let set = PreparedSet::new(&load_set(&pair.set)?)?.with_tolerances(tol);
    Ok((set, load_map(&pair.map)?))
}

fn run(cli: Cli) -> CliResult<String> {
    let tol = Tolerances {
        rank: cli.tol_rank,
        lp: cli.tol_lp,
        ..Tolerances::default()
    };
    let output = match cli.command {
        Command::Certify(pair) => {
            let (set, t) = prepared(&pair, tol)?;
            json(&set.classify(&t)?)
        }
        Command::Radius(pair) => {
            let (set, t) = prepared(&pair, tol)?;
            let opts = RadiusOptions {
                oracle_samples: cli.samples.unwrap_or(RadiusOptions::default().oracle_samples),
                ..RadiusOptions::default()
            };
            json(&set.with_radius_options(opts).stability_radius(&t)?)
        }
        Command::Preimage { pair, y, margin } => {
            let (set, t) = prepared(&pair, tol)?;
            json(&set.preimage_witness(&t, &y, margin)?)
        }
        Command::Repair { pair, eps } => {
            let (set, t) = prepared(&pair, tol)?;
            let repaired = set.repair(&t, eps)?;
            if let Some(out) = &cli.out {
                write(out, &json(&repaired.map))?;
            }
            json(&repaired)
        }
        Command::Porosity { oracle, at, r0, rows } => {
            let dim = at.len();
            let oracle = match oracle {
                OracleChoice::Hyperplane => SetOracle::hyperplane(&Vector::basis(dim, dim - 1), 0.0)?,
                OracleChoice::Point => SetOracle::point(Vector::zeros(dim)),
                OracleChoice::Whole => SetOracle::affine(Vector::zeros(dim), Subspace::whole(dim))?,
                OracleChoice::RankDeficient => {
                    if rows == 0 || dim % rows != 0 {
                        return Err(Error::InvalidInput(format!("{dim} entries do not form a matrix with {rows} rows")).into());
                    }
                    SetOracle::rank_deficient_matrices(rows, dim / rows)
                }
                OracleChoice::Circle => {
                    if dim != 2 {
                        return Err(Error::DimensionMismatch { expected: 2, found: dim }.into());
                    }
                    SetOracle::unit_circle(1e-4)
                }
            };
            let budget = cli.samples.unwrap_or(100_000);
            json(&porosity_estimate(&at, &oracle, &default_radii(r0), budget, cli.seed)?)
        }
        Command::Survey { set, m, recheck } => {
            let x = load_set(&set)?;
            let mut config = SurveyConfig::new(m, cli.samples.unwrap_or(1000), cli.seed);
            config.tolerances = tol;
            config.recheck_count = recheck;
            let report = survey(&x, &config)?;
            if let Some(out) = &cli.out {
                write(out, &report.to_csv()?)?;
            }
            report.summary_json()
        }
        Command::DemoNonclosed { k, eps } => json(&nonclosed_demo_report(k, eps)?),
    };
    Ok(output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprintln!("ERROR:usage: invalid command line");
            }
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ERROR:{}: {}", e.code(), e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
