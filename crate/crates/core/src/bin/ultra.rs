use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ultrametric::dissim::setvalued_table;
use ultrametric::haar::{self, HaarTransform, ThresholdMode};
use ultrametric::padic;
use ultrametric::pipeline::{self, Algorithm, LevelMode, OutputFormat, PipelineConfig};
use ultrametric::symmetry::canonicalize;
use ultrametric::{build_lattice, BooleanTable, DataTable, Dendrogram, Error, MergeCriterion};

/// Hierarchical clustering, dendrogram wavelets, p-adic codes and set-valued lattices.
///
/// Set ULTRA_LOG (e.g. ULTRA_LOG=info) for diagnostics on stderr.
#[derive(Parser)]
#[command(name = "ultra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster CSV observations into a dendrogram (JSON).
    Cluster(ClusterArgs),
    /// Haar transform of a dendrogram and its uses.
    Wavelet {
        #[command(subcommand)]
        action: WaveletAction,
    },
    /// p-adic codes of every terminal.
    Padic(PadicArgs),
    /// Set-valued distances of a 0/1 table and their lattice.
    Genum(GenumArgs),
    /// Canonical child order of a dendrogram.
    Canon(CanonArgs),
    /// Run the built-in golden checks.
    Selftest,
    /// Cluster, transform, encode and (for 0/1 input) build the lattice in one go.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Levels {
    Rank,
    Cost,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Chain,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Norm,
    Coordinate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Columns to use, by header name or 0-based index (comma separated).
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
    #[arg(long, default_value = "median")]
    criterion: MergeCriterion,
    #[arg(long, value_enum, default_value = "cost")]
    levels: Levels,
    #[arg(long, value_enum, default_value = "auto")]
    algorithm: AlgorithmArg,
    /// Also write a Newick file next to the JSON output.
    #[arg(long)]
    newick: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WaveletInput {
    #[arg(long)]
    dend: PathBuf,
    /// Observations, one row per terminal.
    #[arg(long, conflicts_with = "coeffs")]
    data: Option<PathBuf>,
    /// Coefficients previously written by `wavelet forward`.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum WaveletAction {
    /// Coefficients as JSON, or as a CSV table with --format csv.
    Forward {
        #[command(flatten)]
        input: WaveletInput,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild the observation table from coefficients.
    Inverse {
        #[command(flatten)]
        input: WaveletInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partial sums from the smooth vector down to each terminal.
    Chain {
        #[command(flatten)]
        input: WaveletInput,
        /// Terminal name or 0-based index; all terminals when omitted.
        #[arg(long)]
        terminal: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero small details and rebuild.
    Regress {
        #[command(flatten)]
        input: WaveletInput,
        #[arg(long)]
        tau: f64,
        #[arg(long, value_enum, default_value = "norm")]
        mode: ModeArg,
        /// Write the thresholded coefficients here as well.
        #[arg(long)]
        coeffs_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PadicArgs {
    #[arg(long)]
    dend: PathBuf,
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long)]
    check_unique: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenumArgs {
    #[arg(long)]
    input: PathBuf,
    /// Report clusters at this level only; all levels when omitted.
    #[arg(long)]
    level: Option<usize>,
    /// Print the two-column text rendering instead of JSON.
    #[arg(long)]
    text: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CanonArgs {
    #[arg(long)]
    dend: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
    #[arg(long, default_value = "median")]
    criterion: MergeCriterion,
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    out_dir: PathBuf,
}

enum Failure {
    Data(Error),
    Golden(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ULTRA_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Golden(report)) => {
            eprint!("{report}");
            ExitCode::from(3)
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Data(e.into())),
        None => {
            print!("{body}");
            if !body.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn load_table(path: &Path, columns: Option<&[String]>) -> Result<DataTable, Error> {
    let t = DataTable::from_csv_path(path)?;
    match columns {
        Some(c) => t.select_columns(c),
        None => Ok(t),
    }
}

fn load_transform(input: &WaveletInput) -> Result<HaarTransform, Error> {
    let dend = pipeline::read_dendrogram(&input.dend)?;
    match (&input.data, &input.coeffs) {
        (Some(d), _) => haar::forward(&dend, &load_table(d, input.columns.as_deref())?),
        (None, Some(c)) => HaarTransform::from_json(&dend, &fs::read_to_string(c)?),
        (None, None) => Err(Error::InvalidTable(
            "one of --data or --coeffs is required".into(),
        )),
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Cluster(a) => {
            let data = load_table(&a.input, a.columns.as_deref())?;
            let levels = match a.levels {
                Levels::Rank => LevelMode::Rank,
                Levels::Cost => LevelMode::Cost,
            };
            let algorithm = match a.algorithm {
                AlgorithmArg::Auto => Algorithm::Auto,
                AlgorithmArg::Chain => Algorithm::Chain,
                AlgorithmArg::Naive => Algorithm::Naive,
            };
            let dend = pipeline::cluster_table(&data, a.criterion, algorithm, levels)?;
            if let Some(p) = &a.newick {
                fs::write(p, dend.to_newick()).map_err(Error::from)?;
            }
            emit(a.out.as_deref(), &dend.to_json()?)
        }
        Command::Wavelet { action } => wavelet(action),
        Command::Padic(a) => {
            let dend = pipeline::read_dendrogram(&a.dend)?;
            let report = padic::code_report(&dend, a.p, a.check_unique)?;
            emit(
                a.out.as_deref(),
                &serde_json::to_string_pretty(&report).map_err(Error::from)?,
            )
        }
        Command::Genum(a) => {
            let table = BooleanTable::from_csv_path(&a.input)?;
            let t = setvalued_table(&table);
            let lattice = build_lattice(&t);
            let levels: Vec<usize> = match a.level {
                Some(k) => vec![k],
                None => (0..=t.n_attributes()).collect(),
            };
            let body = if a.text {
                lattice.render_text(&t, &levels)
            } else {
                serde_json::to_string_pretty(&lattice.report(&t, &levels)).map_err(Error::from)?
            };
            emit(a.out.as_deref(), &body)
        }
        Command::Canon(a) => {
            let dend = pipeline::read_dendrogram(&a.dend)?;
            let (canon, perm) = canonicalize(&dend);
            log::info!("swapped nodes: {:?}", perm.swaps().collect::<Vec<_>>());
            emit(a.out.as_deref(), &canon.to_json()?)
        }
        Command::Selftest => {
            let report = pipeline::selftest();
            if report.all_passed() {
                print!("{}", report.render());
                Ok(())
            } else {
                Err(Failure::Golden(report.render()))
            }
        }
        Command::Pipeline(a) => {
            let cfg = PipelineConfig {
                input: a.input,
                columns: a.columns,
                criterion: a.criterion,
                p: a.p,
                tau: a.tau,
                level: a.level,
                out_dir: a.out_dir,
                format: match a.format {
                    FormatArg::Json => OutputFormat::Json,
                    FormatArg::Csv => OutputFormat::Csv,
                    FormatArg::Text => OutputFormat::Text,
                },
            };
            let out = pipeline::run_pipeline(&cfg)?;
            for f in out.files {
                println!("{}", cfg.out_dir.join(f).display());
            }
            Ok(())
        }
    }
}

fn wavelet(action: WaveletAction) -> Result<(), Failure> {
    match action {
        WaveletAction::Forward { input, format, out } => {
            let t = load_transform(&input)?;
            let body = match format {
                FormatArg::Json => t.to_json()?,
                FormatArg::Csv => t.to_table_csv()?,
                FormatArg::Text => pipeline::coefficient_text(&t),
            };
            emit(out.as_deref(), &body)
        }
        WaveletAction::Inverse { input, out } => {
            let t = load_transform(&input)?;
            emit(out.as_deref(), &t.inverse().to_csv()?)
        }
        WaveletAction::Chain { input, terminal, out } => {
            let t = load_transform(&input)?;
            let d = t.dendrogram();
            let terminals: Vec<usize> = match terminal {
                Some(name) => vec![find_terminal(d, &name)?],
                None => (0..d.n_terminals()).collect(),
            };
            let mut report = serde_json::Map::new();
            for term in terminals {
                let steps = t.approximation_chain(term)?;
                report.insert(
                    d.terminal_name(term),
                    serde_json::to_value(steps).map_err(Error::from)?,
                );
            }
            emit(
                out.as_deref(),
                &serde_json::to_string_pretty(&report).map_err(Error::from)?,
            )
        }
        WaveletAction::Regress {
            input,
            tau,
            mode,
            coeffs_out,
            out,
        } => {
            let t = load_transform(&input)?;
            let mode = match mode {
                ModeArg::Norm => ThresholdMode::Norm,
                ModeArg::Coordinate => ThresholdMode::Coordinate,
            };
            let r = t.threshold_regress(tau, mode)?;
            if let Some(p) = coeffs_out {
                fs::write(p, r.to_json()?).map_err(Error::from)?;
            }
            emit(out.as_deref(), &r.inverse().to_csv()?)
        }
    }
}

fn find_terminal(d: &Dendrogram, name: &str) -> Result<usize, Error> {
    (0..d.n_terminals())
        .find(|&t| d.terminal_name(t) == name)
        .or_else(|| name.parse().ok().filter(|&t: &usize| t < d.n_terminals()))
        .ok_or_else(|| Error::UnknownNode(format!("no terminal named {name:?}")))
}
