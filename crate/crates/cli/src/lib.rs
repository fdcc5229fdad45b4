//! Argument parsing and dispatch for the `rlspredict` binary.
//!
//! [`parse_args`] turns argv into a fully validated [`RunConfig`];
//! [`execute`] runs it and returns the process exit status.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rls_predict::export::{self, Table};
use rls_predict::strategy::{self, RowOutcome, TableRow, TABLE_ANCHOR};
use rls_predict::timeseries::{load_csv, synth_ar, ColumnSelector, CsvOptions};
use rls_predict::{predictor, sweep, Error, PredictorConfig, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_NUMERIC: i32 = 5;
pub const EXIT_OUTPUT: i32 = 6;

const EXIT_HELP: &str = "\
Exit status:
  0  success (including a forecast with no trade)
  2  usage error
  3  input file missing or malformed
  4  series or parameters violate a precondition (e.g. fewer than N + L + 1 samples)
  5  numerical failure (non-finite values, singular system)
  6  output could not be written";

#[derive(Debug, Parser)]
#[command(
    name = "rlspredict",
    version,
    about = "Adaptive RLS prediction of price series, design sweeps and trade backtests",
    after_help = EXIT_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Run the adaptive predictor over a series and emit index,desired,predicted,error
    Predict {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
        /// Weight snapshot every this many updates (defaults to 1 with --snapshots-output)
        #[arg(long)]
        snapshot_stride: Option<usize>,
        /// Where to write the index,w0,w1,... snapshot table
        #[arg(long)]
        snapshots_output: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Train on the whole series and forecast the next L days with frozen weights
    Forecast {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Correlation surface over an (N, L) grid, or one of its profiles
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// Filter lengths as lo:hi[:step]
        #[arg(long, default_value = "5:100:5", value_parser = parse_grid)]
        n_range: Grid,
        /// Prediction windows as lo:hi[:step]
        #[arg(long, default_value = "1:30", value_parser = parse_grid)]
        l_range: Grid,
        #[arg(long, default_value_t = 0.98, value_parser = parse_lambda)]
        lambda: f64,
        #[arg(long, default_value_t = 0.01, value_parser = parse_delta)]
        delta: f64,
        /// First trading day of the correlation window
        #[arg(long, default_value_t = 2465)]
        eval_from: usize,
        /// Last trading day of the correlation window
        #[arg(long, default_value_t = 2489)]
        eval_to: usize,
        #[arg(long, value_enum, default_value_t = Emit::Surface)]
        emit: Emit,
        /// Worker threads for grid cells (0 = all cores)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Train through --anchor, plan a trade on the L-day forecast, backtest it
    Backtest {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
        /// Last trading day used for training
        #[arg(long, default_value_t = TABLE_ANCHOR)]
        anchor: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Backtest a list of (N, L) designs at one anchor
    Table {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated N:L pairs
        #[arg(long, value_delimiter = ',', value_parser = parse_pair, default_value = DEFAULT_ROWS)]
        rows: Vec<(usize, usize)>,
        #[arg(long, default_value_t = 0.98, value_parser = parse_lambda)]
        lambda: f64,
        #[arg(long, default_value_t = 0.01, value_parser = parse_delta)]
        delta: f64,
        /// Last trading day used for training
        #[arg(long, default_value_t = TABLE_ANCHOR)]
        anchor: usize,
        /// Worker threads for table rows (0 = all cores)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate a synthetic autoregressive price series
    Synth {
        /// Autoregressive coefficient; repeat for higher orders
        #[arg(long = "ar", allow_negative_numbers = true)]
        ar: Vec<f64>,
        /// Standard deviation of the white noise
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long, default_value_t = 2500)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Level added to every sample
        #[arg(long, default_value_t = 50.0, allow_negative_numbers = true)]
        offset: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

const DEFAULT_ROWS: &str = "60:20,65:19,70:18,75:17,80:16,85:15,90:16,95:17,100:18";

#[derive(Debug, Args)]
struct InputArgs {
    /// Price CSV file
    #[arg(long)]
    input: PathBuf,
    /// Price column, by header name or 0-based position
    #[arg(long, default_value = "price")]
    column: String,
    /// Optional date column carried as labels
    #[arg(long)]
    date_column: Option<String>,
    /// The file has no header row
    #[arg(long)]
    no_header: bool,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Number of FIR coefficients N
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    coeffs: u64,
    /// Forgetting factor, 0 < lambda < 1
    #[arg(long, default_value_t = 0.98, value_parser = parse_lambda)]
    lambda: f64,
    /// Initial inverse-correlation scale, > 0
    #[arg(long, default_value_t = 0.01, value_parser = parse_delta)]
    delta: f64,
    /// Prediction window L in trading days
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file, or - for standard output
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Which sweep table to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    /// n,l,correlation
    Surface,
    /// n,max_correlation
    ProfileN,
    /// l,max_correlation
    ProfileL,
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("lambda must satisfy 0 < lambda < 1".to_string())
    }
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("delta must be > 0".to_string())
    }
}

#[derive(Debug, Clone)]
struct Grid(Vec<usize>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    parse_range(s).map(Grid)
}

/// `lo:hi[:step]`, inclusive, all values >= 1.
pub fn parse_range(s: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("`{p}` is not a non-negative integer"));
    let (lo, hi, step) = match parts.as_slice() {
        [lo, hi] => (num(lo)?, num(hi)?, 1),
        [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
        _ => return Err(format!("`{s}` is not of the form lo:hi[:step]")),
    };
    if lo < 1 || lo > hi || step < 1 {
        return Err(format!("`{s}` needs 1 <= lo <= hi and step >= 1"));
    }
    Ok((lo..=hi).step_by(step).collect())
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (n, l) = s
        .split_once(':')
        .ok_or_else(|| format!("`{s}` is not an N:L pair"))?;
    let positive = |p: &str| match p.trim().parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("`{p}` in `{s}` must be a positive integer")),
    };
    Ok((positive(n)?, positive(l)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputSpec {
    pub path: PathBuf,
    pub csv: CsvOptions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Predict {
        config: PredictorConfig,
        snapshots: Option<PathBuf>,
    },
    Forecast {
        config: PredictorConfig,
    },
    Sweep {
        config: SweepConfig,
        emit: Emit,
    },
    Backtest {
        config: PredictorConfig,
        anchor: usize,
    },
    Table {
        rows: Vec<(usize, usize)>,
        lambda: f64,
        delta: f64,
        anchor: usize,
    },
    Synth {
        ar: Vec<f64>,
        noise: f64,
        length: usize,
        seed: u64,
        offset: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<InputSpec>,
    pub output: Output,
    pub format: Format,
    /// Worker threads; 0 leaves the choice to rayon.
    pub jobs: usize,
}

impl InputArgs {
    fn spec(self) -> InputSpec {
        InputSpec {
            path: self.input,
            csv: CsvOptions {
                column: self.column.parse().expect("infallible"),
                date_column: self.date_column.map(|c| c.parse::<ColumnSelector>().expect("infallible")),
                has_header: !self.no_header,
            },
        }
    }
}

impl FilterArgs {
    fn config(&self) -> PredictorConfig {
        PredictorConfig::new(self.coeffs as usize, self.window as usize, self.lambda).with_delta(self.delta)
    }
}

impl OutputArgs {
    fn target(&self) -> Output {
        if self.output == "-" {
            Output::Stdout
        } else {
            Output::File(PathBuf::from(&self.output))
        }
    }
}

fn usage(message: impl std::fmt::Display) -> clap::Error {
    clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("{message}\n"))
}

/// Parses and validates argv (including the program name). Defaults are
/// N = 100, L = 16, lambda = 0.98, delta = 0.01.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let run = match cli.command {
        CliCommand::Predict {
            input,
            filter,
            snapshot_stride,
            snapshots_output,
            output,
        } => {
            let stride = snapshot_stride.unwrap_or(usize::from(snapshots_output.is_some()));
            if stride > 0 && snapshots_output.is_none() {
                return Err(usage("--snapshot-stride requires --snapshots-output"));
            }
            let config = PredictorConfig {
                snapshot_stride: stride,
                ..filter.config()
            };
            RunConfig {
                command: Command::Predict {
                    config,
                    snapshots: snapshots_output,
                },
                input: Some(input.spec()),
                output: output.target(),
                format: output.format,
                jobs: 0,
            }
        }
        CliCommand::Forecast { input, filter, output } => RunConfig {
            command: Command::Forecast { config: filter.config() },
            input: Some(input.spec()),
            output: output.target(),
            format: output.format,
            jobs: 0,
        },
        CliCommand::Sweep {
            input,
            n_range,
            l_range,
            lambda,
            delta,
            eval_from,
            eval_to,
            emit,
            jobs,
            output,
        } => {
            let config = SweepConfig {
                n_values: n_range.0,
                l_values: l_range.0,
                lambda,
                delta,
                eval_from,
                eval_to,
            };
            config
                .validate()
                .map_err(|e| usage(format!("--eval-from/--eval-to: {e}")))?;
            RunConfig {
                command: Command::Sweep { config, emit },
                input: Some(input.spec()),
                output: output.target(),
                format: output.format,
                jobs,
            }
        }
        CliCommand::Backtest {
            input,
            filter,
            anchor,
            output,
        } => RunConfig {
            command: Command::Backtest {
                config: filter.config(),
                anchor,
            },
            input: Some(input.spec()),
            output: output.target(),
            format: output.format,
            jobs: 0,
        },
        CliCommand::Table {
            input,
            rows,
            lambda,
            delta,
            anchor,
            jobs,
            output,
        } => {
            if rows.is_empty() {
                return Err(usage("--rows: at least one N:L pair is required"));
            }
            RunConfig {
                command: Command::Table {
                    rows,
                    lambda,
                    delta,
                    anchor,
                },
                input: Some(input.spec()),
                output: output.target(),
                format: output.format,
                jobs,
            }
        }
        CliCommand::Synth {
            ar,
            noise,
            length,
            seed,
            offset,
            output,
        } => {
            if !(noise >= 0.0 && noise.is_finite()) {
                return Err(usage("--noise: must be finite and >= 0"));
            }
            if length < 1 {
                return Err(usage("--length: must be at least 1"));
            }
            RunConfig {
                command: Command::Synth {
                    ar,
                    noise,
                    length,
                    seed,
                    offset,
                },
                input: None,
                output: output.target(),
                format: output.format,
                jobs: 0,
            }
        }
    };
    Ok(run)
}

/// Maps a library error to the documented exit status.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } | Error::Csv(_) | Error::BadRow { .. } | Error::EmptySeries | Error::NonPositivePrice { .. } => {
            EXIT_INPUT
        }
        Error::InvalidParameter { .. }
        | Error::DimensionMismatch { .. }
        | Error::OutOfRange { .. }
        | Error::SeriesTooShort { .. }
        | Error::SweepCell { .. } => EXIT_PRECONDITION,
        Error::NonFinite(_) | Error::Singular | Error::UndefinedCorrelation => EXIT_NUMERIC,
        Error::Output(_) | Error::Json(_) => EXIT_OUTPUT,
    }
}

/// Produces the tables a run emits: the main output, plus weight snapshots
/// for `predict` when requested.
pub fn compute(config: &RunConfig) -> Result<(Table, Option<Table>), Error> {
    let load = || -> Result<_, Error> {
        let input = config.input.as_ref().ok_or(Error::EmptySeries)?;
        load_csv(&input.path, &input.csv)
    };
    let in_pool = |f: &(dyn Fn() -> Result<(Table, Option<Table>), Error> + Sync)| {
        if config.jobs == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    };

    match &config.command {
        Command::Predict { config: pc, snapshots } => {
            let trace = predictor::run_prediction(&load()?, pc)?;
            let snaps = snapshots.as_ref().map(|_| export::snapshots_table(&trace));
            Ok((export::trace_table(&trace), snaps))
        }
        Command::Forecast { config: pc } => {
            let forecast = predictor::forecast_future(&load()?, pc)?;
            Ok((export::forecast_table(&forecast), None))
        }
        Command::Sweep { config: sc, emit } => {
            let series = load()?;
            in_pool(&|| {
                let surface = sweep::sweep_surface(&series, sc)?;
                let table = match emit {
                    Emit::Surface => export::surface_table(&surface),
                    Emit::ProfileN => export::profile_table("n", &sweep::profile_by_n(&surface)),
                    Emit::ProfileL => export::profile_table("l", &sweep::profile_by_l(&surface)),
                };
                Ok((table, None))
            })
        }
        Command::Backtest { config: pc, anchor } => {
            let series = load()?;
            let outcome = match strategy::trade_at(&series, pc, *anchor)? {
                Some(result) => RowOutcome::Traded(result),
                None => RowOutcome::NoTrade,
            };
            let row = TableRow {
                n_coeffs: pc.n_coeffs,
                window: pc.window,
                outcome,
            };
            Ok((export::backtest_table(&[row]), None))
        }
        Command::Table {
            rows,
            lambda,
            delta,
            anchor,
        } => {
            let series = load()?;
            in_pool(&|| {
                let table = strategy::table_sweep(&series, rows, *lambda, *delta, *anchor);
                for row in &table {
                    if let RowOutcome::Failed(reason) = &row.outcome {
                        eprintln!("row N={} L={}: {reason}", row.n_coeffs, row.window);
                    }
                }
                Ok((export::backtest_table(&table), None))
            })
        }
        Command::Synth {
            ar,
            noise,
            length,
            seed,
            offset,
        } => {
            let series = synth_ar(ar, *noise, *length, *seed, *offset)?;
            Ok((export::series_table(&series), None))
        }
    }
}

fn write_table(table: &Table, target: &Output, format: Format) -> Result<(), Error> {
    let mut sink: Box<dyn Write> = match target {
        Output::Stdout => Box::new(BufWriter::new(io::stdout().lock())),
        Output::File(path) => Box::new(BufWriter::new(File::create(path)?)),
    };
    match format {
        Format::Csv => table.write_csv(&mut sink)?,
        Format::Json => table.write_json(&mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

/// Runs a validated config and returns the exit status. Failures print a
/// one-line diagnostic on stderr.
pub fn execute(config: &RunConfig) -> i32 {
    let result = compute(config).and_then(|(main, snapshots)| {
        write_table(&main, &config.output, config.format)?;
        if let (Some(table), Command::Predict { snapshots: Some(path), .. }) = (snapshots, &config.command) {
            write_table(&table, &Output::File(path.clone()), config.format)?;
        }
        Ok(())
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("rlspredict: {e}");
            exit_code(&e)
        }
    }
}

/// Parse then execute; usage errors print clap's message.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => execute(&config),
        Err(e) => {
            let _ = e.print();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            }
        }
    }
}
