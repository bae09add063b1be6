//! `ldpgov` command line.
//!
//! Exit status: 0 success, 1 malformed input or I/O failure, 2 bad
//! arguments, 3 contract rejected under `fail_closed`.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{Duration, Utc};
use clap::{Parser, Subcommand};

use crate::contract::{apply_policy, check_depth, check_result, ValidationOutcome, ViolationLogRecord};
use crate::error_model::default_semantics;
use crate::experiments::{
    run_e3, run_e3_seeds, run_overhead, run_sensitivity, write_csv, write_summary, ConditionReport, GridCellReport,
    OverheadReport,
};
use crate::protocol::{
    decode, decode_message, encode, encode_message, fixtures, DecodeError, DelegationContract, FailurePolicy, LdpError,
    Message, TaskResult, Timestamp,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_MALFORMED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_REJECTED: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ldpgov",
    version,
    about = "Delegation contract checks and claim-routing experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode protocol messages and report invariant violations.
    Validate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Check a task result against a delegation contract.
    CheckContract {
        /// A contract, or a TASK_SUBMIT message carrying one.
        contract: PathBuf,
        /// A TASK_RESULT message.
        result: PathBuf,
        /// Receipt time (RFC 3339). Defaults to now.
        #[arg(long)]
        received_at: Option<Timestamp>,
        /// Violation log destination (one JSON record per line). Defaults to stderr.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Blind vs self-claimed vs attested routing over the ten-delegate pool.
    E3 {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Average over these seeds instead of running --seed alone.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        tasks: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary of the full report.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// 36-cell sweep of dishonest fraction, inflation level and pool size.
    Sensitivity {
        /// First of ten consecutive seeds when --seeds is absent.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        tasks: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Message size and validation/serialization timing.
    Bench {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1000..))]
        iterations: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the over-budget summarization trace step by step.
    DemoTrace,
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    ExitCode::from(dispatch(cli, &mut stdout.lock(), &mut stderr.lock()))
}

/// Runs one command, writing human output to `out` and diagnostics to `err`.
pub fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let status = match cli.command {
        Command::Validate { inputs } => validate(&inputs, out, err),
        Command::CheckContract {
            contract,
            result,
            received_at,
            log,
        } => check_contract(
            &contract,
            &result,
            received_at.unwrap_or_else(Utc::now),
            log.as_deref(),
            out,
            err,
        ),
        Command::E3 {
            seed,
            seeds,
            tasks,
            out: path,
            summary,
        } => e3(seed, seeds, tasks as usize, path.as_deref(), summary.as_deref(), out),
        Command::Sensitivity {
            seed,
            seeds,
            tasks,
            out: path,
            summary,
        } => {
            let seeds = seeds.unwrap_or_else(|| (seed..seed + 10).collect());
            sensitivity(&seeds, tasks as usize, path.as_deref(), summary.as_deref(), out)
        }
        Command::Bench { iterations, out: path } => bench(iterations as usize, path.as_deref(), out),
        Command::DemoTrace => demo_trace(out).map(|_| EXIT_OK).map_err(CliError::from),
    };
    status.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {}", e.message);
        e.code
    })
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn malformed(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MALFORMED,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::malformed(e.to_string())
    }
}

impl From<crate::experiments::ExperimentError> for CliError {
    fn from(e: crate::experiments::ExperimentError) -> Self {
        use crate::experiments::ExperimentError::*;
        match e {
            InvalidArgument(m) => CliError::usage(m),
            other => CliError::malformed(other.to_string()),
        }
    }
}

type CliResult = Result<u8, CliError>;

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn validate(inputs: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut status = EXIT_OK;
    for path in inputs {
        let bytes = read(path)?;
        match decode_message(&bytes) {
            Ok(msg) => {
                let kind = match msg {
                    Message::TaskSubmit(_) => "task_submit",
                    Message::TaskResult(_) => "task_result",
                    Message::IdentityCard(_) => "identity_card",
                };
                writeln!(out, "{}: ok ({kind})", path.display())?;
            }
            Err(DecodeError::InvariantViolation(violations)) => {
                for v in violations {
                    writeln!(out, "{}: {v}", path.display())?;
                }
                status = EXIT_MALFORMED;
            }
            Err(e) => {
                writeln!(err, "{}: {e}", path.display())?;
                status = EXIT_MALFORMED;
            }
        }
    }
    Ok(status)
}

fn load_contract(path: &Path) -> Result<DelegationContract, CliError> {
    let bytes = read(path)?;
    if let Ok(Message::TaskSubmit(submit)) = decode_message(&bytes) {
        return submit
            .contract
            .ok_or_else(|| CliError::malformed(format!("{}: TASK_SUBMIT carries no contract", path.display())));
    }
    decode::<DelegationContract>(&bytes).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn load_result(path: &Path) -> Result<TaskResult, CliError> {
    match decode_message(&read(path)?) {
        Ok(Message::TaskResult(r)) => Ok(r),
        Ok(_) => Err(CliError::malformed(format!("{}: not a TASK_RESULT", path.display()))),
        Err(e) => Err(CliError::malformed(format!("{}: {e}", path.display()))),
    }
}

/// Budget, deadline and (when lineage is present) depth checks.
fn full_check(contract: &DelegationContract, result: &TaskResult, received_at: Timestamp) -> ValidationOutcome {
    let mut outcome = check_result(contract, result, received_at);
    if let Some(v) = result.provenance.as_ref().and_then(|p| check_depth(contract, p)) {
        let mut violations = outcome.violations;
        violations.push(v);
        outcome = ValidationOutcome::new(violations, contract.policy.failure_policy);
    }
    outcome
}

fn check_contract(
    contract_path: &Path,
    result_path: &Path,
    received_at: Timestamp,
    log: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let contract = load_contract(contract_path)?;
    let result = load_result(result_path)?;
    let outcome = full_check(&contract, &result, received_at);

    let mut log_sink: Box<dyn Write + '_> = match log {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(&mut *err),
    };
    for v in &outcome.violations {
        let record = ViolationLogRecord::new(v, &contract.contract_id, &result.task_id);
        log_sink.write_all(&encode(&record))?;
        log_sink.write_all(b"\n")?;
    }
    log_sink.flush()?;
    drop(log_sink);

    out.write_all(&encode(&outcome))?;
    writeln!(out)?;
    match apply_policy(outcome, result) {
        Ok(_) => Ok(EXIT_OK),
        Err(e) => {
            out.write_all(&encode(&e))?;
            writeln!(out)?;
            Ok(EXIT_REJECTED)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

fn print_conditions(rows: &[ConditionReport], out: &mut dyn Write) -> io::Result<()> {
    writeln!(
        out,
        "{:<13} {:>6} {:>15} {:>9} {:>10} {:>9} {:>10} {:>9}",
        "condition", "tasks", "quality", "accuracy", "inflation", "d(blind)", "p(blind)", "d(self)"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<13} {:>6} {:>7.3} ± {:<5.3} {:>8.1}% {:>9.1}% {:>9} {:>10} {:>9}",
            r.condition.as_str(),
            r.tasks,
            r.quality_mean,
            r.quality_std,
            r.accuracy_pct,
            r.inflation_selected_pct,
            opt(r.d_vs_blind, 2),
            r.p_vs_blind.map_or_else(|| "-".to_string(), |p| format!("{p:.2e}")),
            opt(r.d_vs_self_claimed, 2),
        )?;
    }
    Ok(())
}

/// `e3.csv` becomes `e3.pool.jsonl`.
fn pool_dump_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("pool.jsonl")
}

fn e3(
    seed: u64,
    seeds: Option<Vec<u64>>,
    tasks: usize,
    csv_path: Option<&Path>,
    summary_path: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult {
    let (rows, pools) = match seeds {
        Some(seeds) => {
            let summary = run_e3_seeds(&seeds, tasks)?;
            writeln!(out, "seeds {:?}, {tasks} tasks per condition per seed", summary.seeds)?;
            if let Some(p) = summary_path {
                write_summary(&summary, create(p)?)?;
            }
            let pools = summary.per_seed.iter().map(|r| r.pool.clone()).collect::<Vec<_>>();
            (summary.averaged, pools)
        }
        None => {
            let report = run_e3(seed, tasks)?;
            writeln!(out, "seed {seed}, {tasks} tasks per condition")?;
            if let Some(p) = summary_path {
                write_summary(&report, create(p)?)?;
            }
            (report.conditions, vec![report.pool])
        }
    };
    print_conditions(&rows, out)?;
    if let Some(p) = csv_path {
        write_csv(&rows, create(p)?)?;
        let mut dump = create(&pool_dump_path(p))?;
        for profile in pools.iter().flatten() {
            dump.write_all(&encode(profile))?;
            dump.write_all(b"\n")?;
        }
        dump.flush()?;
    }
    Ok(EXIT_OK)
}

fn print_grid(cells: &[GridCellReport], out: &mut dyn Write) -> io::Result<()> {
    writeln!(
        out,
        "{:>8} {:>9} {:>5} {:>9} {:>7} {:>7} {:>8} {:>7}",
        "fraction", "inflation", "pool", "dishonest", "blind", "self", "attested", "paradox"
    )?;
    for c in cells {
        writeln!(
            out,
            "{:>8.1} {:>9} {:>5} {:>9} {:>7.3} {:>7.3} {:>8.3} {:>7}",
            c.dishonest_fraction,
            format!("{:?}", c.inflation_level).to_lowercase(),
            c.pool_size,
            c.dishonest_count,
            c.blind_mean,
            c.self_claimed_mean,
            c.attested_mean,
            if c.paradox { "yes" } else { "" }
        )?;
    }
    let paradoxes = cells.iter().filter(|c| c.paradox).count();
    writeln!(out, "self-claimed below blind in {paradoxes}/{} cells", cells.len())
}

fn sensitivity(
    seeds: &[u64],
    tasks: usize,
    csv_path: Option<&Path>,
    summary_path: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult {
    let cells = run_sensitivity(seeds, tasks)?;
    writeln!(out, "seeds {seeds:?}, {tasks} tasks per condition per seed")?;
    print_grid(&cells, out)?;
    if let Some(p) = csv_path {
        write_csv(&cells, create(p)?)?;
    }
    if let Some(p) = summary_path {
        write_summary(&cells, create(p)?)?;
    }
    Ok(EXIT_OK)
}

fn print_overhead(r: &OverheadReport, out: &mut dyn Write) -> io::Result<()> {
    let pct = 100.0 * r.byte_delta as f64 / r.bytes_without_contract as f64;
    writeln!(out, "TASK_SUBMIT without contract: {} bytes", r.bytes_without_contract)?;
    writeln!(
        out,
        "TASK_SUBMIT with contract:    {} bytes (+{} bytes, +{pct:.0}%)",
        r.bytes_with_contract, r.byte_delta
    )?;
    writeln!(
        out,
        "contract validation:          {:.1} ns per result",
        r.validation_ns_mean
    )?;
    writeln!(
        out,
        "serialization:                {:.1} ns per message",
        r.serialization_ns_mean
    )?;
    writeln!(out, "({} iterations, first 10% discarded)", r.iterations)
}

fn bench(iterations: usize, csv_path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let report = run_overhead(iterations)?;
    print_overhead(&report, out)?;
    if let Some(p) = csv_path {
        write_csv(std::slice::from_ref(&report), create(p)?)?;
    }
    Ok(EXIT_OK)
}

/// Walks the over-budget summarization trace and returns the typed error it
/// ends in.
pub fn demo_trace(out: &mut dyn Write) -> io::Result<LdpError> {
    let submit = fixtures::canonical_submit(true);
    let contract = submit.contract.clone().expect("canonical submit has a contract");
    let result = fixtures::over_budget_result();
    let received_at = result.completed_at + Duration::seconds(2);

    writeln!(out, "1. delegator sends TASK_SUBMIT with a fail_closed contract")?;
    writeln!(
        out,
        "   {}",
        String::from_utf8_lossy(&encode_message(&submit.clone().into()))
    )?;
    writeln!(
        out,
        "2. delegate returns TASK_RESULT having used {} tokens",
        result.tokens_used
    )?;
    writeln!(
        out,
        "   {}",
        String::from_utf8_lossy(&encode_message(&result.clone().into()))
    )?;

    let outcome = full_check(&contract, &result, received_at);
    writeln!(
        out,
        "3. client checks the result on receipt at {}",
        received_at.to_rfc3339()
    )?;
    for v in &outcome.violations {
        writeln!(out, "   violation {v}")?;
    }
    writeln!(out, "   disposition {:?}", outcome.disposition)?;

    let mut open = contract.clone();
    open.policy.failure_policy = FailurePolicy::FailOpen;
    let open_outcome = full_check(&open, &result, received_at);
    let accepted = apply_policy(open_outcome, result.clone()).expect("fail_open never rejects");

    let error = apply_policy(outcome, result).expect_err("the token overrun is rejected under fail_closed");
    writeln!(out, "4. fail_closed rejects with a typed error")?;
    writeln!(out, "   {}", String::from_utf8_lossy(&encode(&error)))?;
    let semantics = default_semantics(error.category);
    writeln!(
        out,
        "5. recovery: {} (retryable={}, severity={:?})",
        semantics.action.description(),
        semantics.retryable,
        semantics.severity
    )?;
    writeln!(
        out,
        "   under fail_open the same result would be accepted with {} logged violation(s)",
        accepted.log.len()
    )?;
    Ok(error)
}
