//! Command-line front end for the bivariate Pareto record toolkit.
//!
//! Every run starts from a canonical config echo — the exact command line
//! that reproduces it, excluding execution details (`--threads`, `--out`,
//! `-v`) that cannot affect results. CSV outputs carry the echo as a leading
//! `#` comment line; JSON outputs carry it in a `command` field. Running the
//! echoed command again yields byte-identical output.
//!
//! Exit codes: 0 success, 1 computation or verification failure (e.g. a
//! certified bound reported violated), 2 usage or I/O error, 3 observation
//! budget exhausted mid-campaign. This mapping is a stable contract.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pareto_records::exact::{ExactEngine, ExactError};
use pareto_records::rational::f64_repr;
use pareto_records::report::{
    self, bound_report_repr, exact_table_rows, record_bin_rows, record_time_summary,
    to_json_pretty,
};
use pareto_records::sim::{
    empirical_vs_exact, estimate_moments, gof_geometric, run_by_observations, run_by_records,
    ExecPlan, RecordStrategy, SimError, TrialConfig, DEFAULT_K_MAX, DEFAULT_OBSERVATION_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "pareto-records",
    version,
    about = "Exact laws and Monte Carlo simulation of bivariate Pareto record breaking",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads: 0 = all cores, 1 = run on the calling thread.
    /// Results are bit-identical for every choice, so this is never echoed.
    #[arg(long, global = true, default_value_t = 0, env = "PARETO_RECORDS_THREADS")]
    threads: usize,

    /// Output directory; files are created inside it. Without this, tables
    /// go to stdout.
    #[arg(long, global = true, env = "PARETO_RECORDS_OUT")]
    out: Option<PathBuf>,

    /// Output format for tables and reports.
    #[arg(
        long,
        global = true,
        value_enum,
        default_value_t = Format::Csv,
        env = "PARETO_RECORDS_FORMAT"
    )]
    format: Format,

    /// Print progress and timing to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    fn extension(self) -> &'static str {
        self.name()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact kill-count laws for every n up to a limit: pmf, conditional
    /// law, components, approximation, and geometric corrections, as exact
    /// rationals with per-quantity row sums.
    ExactTable(ExactTableArgs),
    /// Exhaustively verify the approximation error bound |pmf − p̂| ≤ 1/(2n²)
    /// for every n up to a limit, reporting the observed sharp constant.
    VerifyBound(VerifyBoundArgs),
    /// Record-time campaign: each trial runs until m records have been set;
    /// kill counts are tallied and tested against Geometric(1/2).
    SimulateRecords(SimulateRecordsArgs),
    /// Observation-time campaign: each trial draws n observations; records,
    /// kills, and coordinate-record categories are tallied.
    SimulateObservations(SimulateObservationsArgs),
    /// Means, variances, and kill-bin covariances over an observation-time
    /// campaign, with theoretical reference values.
    EstimateMoments(EstimateMomentsArgs),
    /// Simulate the law of the n-th observation's kill count and compare
    /// every event against its exact probability (z-scores included).
    Compare(CompareArgs),
}

#[derive(Args)]
struct ExactTableArgs {
    /// Largest observation index: the law of K_m is tabulated for every
    /// m = 1..=n.
    #[arg(long, env = "PARETO_RECORDS_N")]
    n: u64,
    /// Largest kill count tabulated per row (default n−1; always clamped to
    /// each law's support k ≤ m−1).
    #[arg(long, env = "PARETO_RECORDS_K_MAX")]
    k_max: Option<u64>,
}

#[derive(Args)]
struct VerifyBoundArgs {
    /// Sweep every pair (n, k) with n up to this value and k ≤ n.
    #[arg(long, env = "PARETO_RECORDS_N")]
    n: u64,
}

#[derive(Args)]
struct SimulateRecordsArgs {
    /// Records per trial.
    #[arg(long, env = "PARETO_RECORDS_M_RECORDS")]
    m_records: u64,
    /// Independent trials.
    #[arg(long, default_value_t = 1_000, env = "PARETO_RECORDS_TRIALS")]
    trials: u64,
    /// Master seed; trial streams are derived from it.
    #[arg(long, default_value_t = 1, env = "PARETO_RECORDS_SEED")]
    seed: u64,
    /// Kill counts above this go to one overflow bin.
    #[arg(long, default_value_t = DEFAULT_K_MAX, env = "PARETO_RECORDS_K_MAX")]
    k_max: usize,
    /// Generate every observation literally instead of walking the embedded
    /// record chain. Same law, far slower; only viable for small m.
    #[arg(long)]
    via_observations: bool,
    /// Per-trial observation budget for --via-observations.
    #[arg(long, default_value_t = DEFAULT_OBSERVATION_BUDGET, env = "PARETO_RECORDS_BUDGET")]
    budget: u64,
    /// Goodness-of-fit pooling: kill counts from this value up share one cell.
    #[arg(long, default_value_t = 10, env = "PARETO_RECORDS_TAIL_BIN")]
    tail_bin: usize,
}

#[derive(Args)]
struct SimulateObservationsArgs {
    /// Observations per trial.
    #[arg(long, env = "PARETO_RECORDS_N")]
    n: u64,
    #[arg(long, default_value_t = 1_000, env = "PARETO_RECORDS_TRIALS")]
    trials: u64,
    #[arg(long, default_value_t = 1, env = "PARETO_RECORDS_SEED")]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_K_MAX, env = "PARETO_RECORDS_K_MAX")]
    k_max: usize,
    /// Additionally write trace.csv: one line per observation of trial 0.
    /// Requires --out.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct EstimateMomentsArgs {
    /// Observations per trial.
    #[arg(long, env = "PARETO_RECORDS_N")]
    n: u64,
    #[arg(long, default_value_t = 1_000, env = "PARETO_RECORDS_TRIALS")]
    trials: u64,
    #[arg(long, default_value_t = 1, env = "PARETO_RECORDS_SEED")]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_K_MAX, env = "PARETO_RECORDS_K_MAX")]
    k_max: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// The observation index whose kill-count law is simulated.
    #[arg(long, env = "PARETO_RECORDS_N")]
    n: u64,
    #[arg(long, default_value_t = 1_000, env = "PARETO_RECORDS_TRIALS")]
    trials: u64,
    #[arg(long, default_value_t = 1, env = "PARETO_RECORDS_SEED")]
    seed: u64,
    /// Largest kill count compared individually (default: min(n−1, 8)).
    #[arg(long, env = "PARETO_RECORDS_K_MAX")]
    k_max: Option<usize>,
}

/// Failure classes with stable exit codes: 1 = the computation or a
/// verification failed, 2 = the request or its I/O was invalid, 3 = an
/// observation budget ran out mid-campaign.
enum Failure {
    /// Exit 1: the computation itself failed or a verified property did not
    /// hold.
    Run(String),
    /// Exit 2: the request was invalid or its input/output unusable.
    Usage(String),
    /// Exit 3: a record-time campaign exhausted its observation budget;
    /// partial progress is reported in the message.
    Budget(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Run(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Run(m) | Failure::Usage(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match &e {
            SimError::InvalidConfig(_) | SimError::RecordCapExceeded { .. } => {
                Failure::Usage(e.to_string())
            }
            SimError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            SimError::PrecisionExhausted { .. }
            | SimError::Degenerate(_)
            | SimError::ExecutionSetup(_) => Failure::Run(e.to_string()),
            SimError::Exact(inner) => Failure::from_exact(inner),
        }
    }
}

impl Failure {
    fn from_exact(e: &ExactError) -> Self {
        match e {
            ExactError::BoundViolation { .. } => Failure::Run(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        Failure::from_exact(&e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

/// JSON envelope: the canonical command plus the report payload.
#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    command: &'a str,
    report: T,
}

/// Where and how output lands.
struct Sink {
    out: Option<PathBuf>,
    format: Format,
    /// Canonical reproduction command (no leading "# ").
    command: String,
}

impl Sink {
    fn echo_line(&self) -> String {
        format!("# {}\n", self.command)
    }

    /// Emit one named table: CSV bodies get the echo comment prepended,
    /// JSON payloads are wrapped in the command envelope.
    fn emit<T: Serialize>(
        &self,
        stem: &str,
        csv_body: &str,
        json_payload: &T,
    ) -> Result<(), Failure> {
        let content = match self.format {
            Format::Csv => format!("{}{}", self.echo_line(), csv_body),
            Format::Json => to_json_pretty(&Document {
                command: &self.command,
                report: json_payload,
            }),
        };
        self.write_raw(&format!("{stem}.{}", self.format.extension()), &content)
    }

    fn write_raw(&self, name: &str, content: &str) -> Result<(), Failure> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(name), content)?;
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(content.as_bytes())?;
            }
        }
        Ok(())
    }
}

fn csv_string<F>(write: F) -> Result<String, Failure>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buffer = Vec::new();
    write(&mut buffer)?;
    String::from_utf8(buffer).map_err(|e| Failure::Run(format!("non-utf8 table: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let plan = ExecPlan::with_threads(cli.threads);
    let format = cli.format;
    let verbose = cli.verbose;
    let out = cli.out.clone();

    let command = echo_command(&cli.command, format);
    if verbose > 0 {
        eprintln!("running: {command}");
    }
    let sink = Sink {
        out,
        format,
        command,
    };

    match &cli.command {
        Command::ExactTable(args) => exact_table(args, &sink)?,
        Command::VerifyBound(args) => verify_bound(args, &sink)?,
        Command::SimulateRecords(args) => simulate_records(args, plan, &sink)?,
        Command::SimulateObservations(args) => simulate_observations(args, plan, &sink)?,
        Command::EstimateMoments(args) => moments(args, plan, &sink)?,
        Command::Compare(args) => compare(args, plan, &sink)?,
    }

    if verbose > 0 {
        eprintln!("done in {:.3}s", started.elapsed().as_secs_f64());
    }
    Ok(())
}

/// The canonical reproduction command: subcommand, then every
/// computation-relevant flag with its resolved value, in a fixed order.
fn echo_command(command: &Command, format: Format) -> String {
    let mut echo = String::from("pareto-records ");
    match command {
        Command::ExactTable(a) => {
            let k_max = a.k_max.unwrap_or_else(|| a.n.saturating_sub(1));
            write!(echo, "exact-table --n {} --k-max {}", a.n, k_max).unwrap();
        }
        Command::VerifyBound(a) => {
            write!(echo, "verify-bound --n {}", a.n).unwrap();
        }
        Command::SimulateRecords(a) => {
            write!(
                echo,
                "simulate-records --m-records {} --trials {} --seed {} --k-max {} --tail-bin {}",
                a.m_records, a.trials, a.seed, a.k_max, a.tail_bin,
            )
            .unwrap();
            if a.via_observations {
                write!(echo, " --via-observations --budget {}", a.budget).unwrap();
            }
        }
        Command::SimulateObservations(a) => {
            write!(
                echo,
                "simulate-observations --n {} --trials {} --seed {} --k-max {}",
                a.n, a.trials, a.seed, a.k_max,
            )
            .unwrap();
            if a.trace {
                echo.push_str(" --trace");
            }
        }
        Command::EstimateMoments(a) => {
            write!(
                echo,
                "estimate-moments --n {} --trials {} --seed {} --k-max {}",
                a.n, a.trials, a.seed, a.k_max,
            )
            .unwrap();
        }
        Command::Compare(a) => {
            let k_max = a.k_max.unwrap_or_else(|| default_compare_k_max(a.n));
            write!(
                echo,
                "compare --n {} --trials {} --seed {} --k-max {}",
                a.n, a.trials, a.seed, k_max,
            )
            .unwrap();
        }
    }
    write!(echo, " --format {}", format.name()).unwrap();
    echo
}

fn default_compare_k_max(n: u64) -> usize {
    ((n.saturating_sub(1)).min(8)) as usize
}

fn exact_table(args: &ExactTableArgs, sink: &Sink) -> Result<(), Failure> {
    if args.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let engine = ExactEngine::new();
    let k_max = args.k_max.unwrap_or(args.n - 1);
    let mut rows = Vec::new();
    for n in 1..=args.n {
        rows.extend(exact_table_rows(&engine, n, k_max)?);
    }
    let csv = csv_string(|w| report::write_exact_table_csv(&rows, w))?;
    sink.emit("exact_table", &csv, &rows)
}

fn verify_bound(args: &VerifyBoundArgs, sink: &Sink) -> Result<(), Failure> {
    let engine = ExactEngine::new();
    let report_data = engine.verify_bound(args.n)?;
    let repr = bound_report_repr(&report_data);
    let mut csv = format!(
        "# sup_scaled_error {}/{} attained_at{}\n",
        repr.sup_scaled_error.num,
        repr.sup_scaled_error.den,
        repr.attained_at
            .iter()
            .map(|(n, k)| format!(" ({n},{k})"))
            .collect::<String>(),
    );
    csv.push_str(&csv_string(|w| report::write_bound_report_csv(&repr, w))?);
    sink.emit("bound_report", &csv, &repr)
}

fn simulate_records(
    args: &SimulateRecordsArgs,
    plan: ExecPlan,
    sink: &Sink,
) -> Result<(), Failure> {
    let config = TrialConfig::by_records(args.m_records, args.seed, args.trials, args.k_max);
    let strategy = if args.via_observations {
        RecordStrategy::ViaObservations {
            observation_budget: args.budget,
        }
    } else {
        RecordStrategy::default()
    };
    let tally = run_by_records(&config, strategy, plan)?;
    let summary = record_time_summary(&tally);
    let bins = record_bin_rows(&tally);
    let gof = gof_geometric(&tally.counts, args.tail_bin)?;

    let opt_repr = |v: Option<f64>| v.map_or_else(|| "none".into(), f64_repr);
    let mut bins_csv = format!(
        "# records {} trials {} time_mean {} time_min {} time_max {}\n",
        summary.total_records,
        summary.trials,
        opt_repr(summary.time_mean),
        opt_repr(summary.time_min),
        opt_repr(summary.time_max),
    );
    bins_csv.push_str(&csv_string(|w| report::write_record_bins_csv(&bins, w))?);

    #[derive(Serialize)]
    struct Payload<'a> {
        summary: &'a report::RecordTimeSummary,
        bins: &'a [report::RecordBinRow],
        gof: &'a pareto_records::sim::GofReport,
    }
    let payload = Payload {
        summary: &summary,
        bins: &bins,
        gof: &gof,
    };

    sink.emit("record_tally", &bins_csv, &payload)?;
    if sink.format == Format::Csv {
        let gof_csv = csv_string(|w| report::write_gof_csv(&gof, w))?;
        sink.write_raw("gof.csv", &format!("{}{}", sink.echo_line(), gof_csv))?;
    }
    Ok(())
}

fn simulate_observations(
    args: &SimulateObservationsArgs,
    plan: ExecPlan,
    sink: &Sink,
) -> Result<(), Failure> {
    if args.trace && sink.out.is_none() {
        return Err(Failure::Usage(
            "--trace writes trace.csv and therefore requires --out".into(),
        ));
    }
    let config = TrialConfig::by_observations(args.n, args.seed, args.trials, args.k_max);
    let aggregate = run_by_observations(&config, plan)?;
    let rows = report::observation_rows(&aggregate);
    let csv = csv_string(|w| report::write_observation_csv(&rows, w))?;
    sink.emit("observation_tally", &csv, &aggregate)?;

    if args.trace {
        let mut buffer = Vec::new();
        let stream_seed = pareto_records::sim::mix_seed(args.seed, 0);
        pareto_records::sim::write_observation_trace(args.n, stream_seed, args.k_max, &mut buffer)?;
        let trace_text = String::from_utf8(buffer)
            .map_err(|e| Failure::Run(format!("non-utf8 trace: {e}")))?;
        sink.write_raw("trace.csv", &format!("{}{}", sink.echo_line(), trace_text))?;
    }
    Ok(())
}

fn moments(args: &EstimateMomentsArgs, plan: ExecPlan, sink: &Sink) -> Result<(), Failure> {
    let config = TrialConfig::by_observations(args.n, args.seed, args.trials, args.k_max);
    let report_data = estimate_moments(&config, plan)?;
    let csv = csv_string(|w| report::write_moments_csv(&report_data, w))?;
    sink.emit("moments", &csv, &report_data)?;
    if sink.format == Format::Csv {
        let cov = csv_string(|w| report::write_moment_covariance_csv(&report_data, w))?;
        sink.write_raw(
            "moments_covariance.csv",
            &format!("{}{}", sink.echo_line(), cov),
        )?;
    }
    Ok(())
}

fn compare(args: &CompareArgs, plan: ExecPlan, sink: &Sink) -> Result<(), Failure> {
    let k_max = args.k_max.unwrap_or_else(|| default_compare_k_max(args.n));
    let config = TrialConfig::by_observations(args.n, args.seed, args.trials, k_max);
    let engine = ExactEngine::new();
    let report_data = empirical_vs_exact(&config, plan, &engine)?;
    let csv = csv_string(|w| report::write_comparison_csv(&report_data, w))?;
    sink.emit("comparison", &csv, &report_data)
}
