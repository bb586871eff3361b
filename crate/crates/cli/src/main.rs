//! Batch command-line frontend: each stage consumes the previous stage's
//! JSON artifact and writes its own, so every step is reproducible and
//! golden-testable in isolation.
//!
//! Exit codes: 0 success, 2 parse error, 3 stage precondition, 4
//! verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ndflow::behavior::{autonomy_report, EquationModule};
use ndflow::dnnl::{dnnl_module, ElementSelection, NormalizeOptions};
use ndflow::error::{ParseError, PipelineError, WindowError};
use ndflow::exec::EvalMode;
use ndflow::flow::{solve_realized, verify_solution, SolveError};
use ndflow::formats::{
    window_to_csv, AnalyzeReport, CertificateEntry, MembershipFile, NormalizationFile,
    RealizationFile, StateReportFile, SystemFile, TrajectoryFile, VerifyFile,
};
use ndflow::laurent::parse_row;
use ndflow::realization::{extract_certificates, FirstOrderRealization};
use ndflow::state::state_space_report;

#[derive(Parser)]
#[command(
    name = "ndflow",
    version,
    about = "Exact state realizations and solvers for linear partial difference equations on the integer lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Bound for the minimal t-search in the normalization stage.
    #[arg(long, default_value_t = 8)]
    t_bound: i64,
    /// Degree bound for the certificate-combination search.
    #[arg(long)]
    cert_bound: Option<usize>,
    /// Seed for any randomized choice (initial-condition sampling).
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Report autonomy, the annihilator, the normalization level d, and
    /// strong relevance at the identity transform.
    Analyze {
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the normalization stage on a system file.
    Normalize {
        system: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Build the first-order realization from a normalization artifact.
    Regularize {
        normalization: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve on a box from a realization + normalization pair.
    Solve {
        #[arg(long)]
        realization: PathBuf,
        #[arg(long)]
        normalization: PathBuf,
        /// Output box, e.g. "-3:3,-3:3".
        #[arg(long, value_name = "lo1:hi1,...")]
        r#box: String,
        /// Initial-condition trajectory file; sampled when absent.
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Skip the final brute-force verification.
        #[arg(long)]
        no_verify: bool,
        /// Also write a CSV with float-approximated values.
        #[arg(long)]
        float_csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Verify a trajectory against a system file.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Freeness and non-autonomy report for a realization.
    CheckFree {
        #[arg(long)]
        realization: PathBuf,
        #[arg(long)]
        normalization: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equation-module membership of a row vector, optionally cross-checked
    /// through a realization.
    Membership {
        #[arg(long)]
        system: PathBuf,
        /// Comma-separated row of polynomials in the shared grammar.
        #[arg(long)]
        row: String,
        #[arg(long)]
        realization: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Parse(String),
    Precondition(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Precondition(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<WindowError> for CliError {
    fn from(e: WindowError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Parse(format!(
            "{}: line {}, column {}: {}",
            path.display(),
            e.line(),
            e.column(),
            e
        ))
    })
}

fn write_json<T: serde::Serialize>(path: &PathBuf, value: &T) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Precondition(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Precondition(format!("{}: {}", path.display(), e)))
}

fn parse_box(src: &str) -> Result<(Vec<i64>, Vec<i64>), CliError> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in src.split(',') {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| CliError::Parse(format!("bad box component '{part}', want lo:hi")))?;
        let a: i64 = a
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("bad box bound '{a}'")))?;
        let b: i64 = b
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("bad box bound '{b}'")))?;
        if a > b {
            return Err(CliError::Precondition(format!(
                "box component '{part}' has lo > hi"
            )));
        }
        lo.push(a);
        hi.push(b);
    }
    Ok((lo, hi))
}

fn norm_opts(common: &CommonOpts) -> NormalizeOptions {
    NormalizeOptions {
        t_bound: common.t_bound,
        cert_bound: common.cert_bound,
        selection: ElementSelection::Canonical,
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            system,
            out,
            common,
        } => {
            let sys_file: SystemFile = read_json(&system)?;
            let sys = sys_file.to_system()?;
            let autonomy = autonomy_report(&sys);
            let ann = sys.annihilator();
            let opts = norm_opts(&common);
            let norm = dnnl_module(&sys, &opts)?;
            let identity = match extract_certificates(&sys, norm.d, common.cert_bound) {
                Ok(certs) => Some(certs),
                Err(PipelineError::NotStronglyRelevant { .. }) => None,
                Err(PipelineError::NotAutonomous) => None,
                Err(e) => return Err(e.into()),
            };
            let report = AnalyzeReport {
                n: sys.nvars(),
                q: sys.q(),
                autonomous: autonomy.by_annihilator,
                autonomy_by_minors: autonomy.by_minors,
                annihilator: ann.ideal_gens().iter().map(|g| g.to_string()).collect(),
                d: norm.d,
                strongly_relevant_at_identity: identity.is_some(),
                identity_certificates: identity
                    .map(|cs| {
                        cs.iter()
                            .map(|c| CertificateEntry {
                                var: c.var + 1,
                                poly: c.poly.to_string(),
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
            };
            println!("n = {}, q = {}", report.n, report.q);
            println!("autonomous: {}", report.autonomous);
            if autonomy.disagreement() {
                eprintln!("warning: annihilator and minors tests disagree on autonomy");
            }
            println!("annihilator generators: {:?}", report.annihilator);
            println!("normalization level d = {}", report.d);
            println!(
                "strongly relevant of order {} without transform: {}",
                report.d, report.strongly_relevant_at_identity
            );
            if let Some(out) = out {
                write_json(&out, &report)?;
            }
            Ok(())
        }
        Command::Normalize {
            system,
            out,
            common,
        } => {
            let sys_file: SystemFile = read_json(&system)?;
            let sys = sys_file.to_system()?;
            let opts = norm_opts(&common);
            let norm = dnnl_module(&sys, &opts)?;
            write_json(&out, &NormalizationFile::from_result(&norm))?;
            println!(
                "d = {}, T = {:?}, {} certificate(s)",
                norm.d,
                norm.t.matrix(),
                norm.certificates.len()
            );
            Ok(())
        }
        Command::Regularize { normalization, out } => {
            let norm_file: NormalizationFile = read_json(&normalization)?;
            let norm = norm_file.to_result()?;
            if norm.d >= norm.transformed.nvars() {
                return Err(CliError::Precondition(
                    PipelineError::NotAutonomous.to_string(),
                ));
            }
            let real = FirstOrderRealization::from_normalization(&norm)?;
            write_json(&out, &RealizationFile::from_realization(&real))?;
            println!(
                "gamma = {}, X is {}x{}, {} companion matrices",
                real.gamma,
                real.x.nrows(),
                real.x.ncols(),
                real.a.len()
            );
            Ok(())
        }
        Command::Solve {
            realization,
            normalization,
            r#box,
            x,
            out,
            no_verify,
            float_csv,
            common,
        } => {
            let real_file: RealizationFile = read_json(&realization)?;
            let real = real_file.to_realization()?;
            let norm_file: NormalizationFile = read_json(&normalization)?;
            let norm = norm_file.to_result()?;
            let (lo, hi) = parse_box(&r#box)?;
            if lo.len() != real.n {
                return Err(CliError::Precondition(format!(
                    "box has {} axes, system has {}",
                    lo.len(),
                    real.n
                )));
            }
            let x_window = match x {
                Some(path) => {
                    let tf: TrajectoryFile = read_json(&path)?;
                    Some(tf.to_window()?)
                }
                None => None,
            };
            let (w, _x_used) = solve_realized(
                &real,
                &norm.t,
                x_window,
                &lo,
                &hi,
                common.seed,
                EvalMode::default(),
            )?;
            write_json(&out, &TrajectoryFile::from_window(&w))?;
            if let Some(csv_path) = &float_csv {
                std::fs::write(csv_path, window_to_csv(&w, true))
                    .map_err(|e| CliError::Precondition(e.to_string()))?;
            }
            if !no_verify {
                // reconstruct the original system through the inverse transform
                let original_rows: Vec<Vec<_>> = norm
                    .transformed
                    .rows()
                    .iter()
                    .map(|r| norm.t.inverse().phi_row(r))
                    .collect();
                let original = EquationModule::new(real.n, real.q, original_rows)
                    .map_err(|e| CliError::Precondition(e.to_string()))?;
                let report = verify_solution(&original, &w, EvalMode::default())?;
                println!(
                    "verified {} points across {} rows, max residual {}",
                    report.points_checked, report.rows_checked, report.max_residual
                );
                if !report.is_exact() {
                    return Err(CliError::Verification(format!(
                        "nonzero residual {}",
                        report.max_residual
                    )));
                }
            }
            println!("solved {} points", w.num_points());
            Ok(())
        }
        Command::Verify {
            system,
            trajectory,
            out,
        } => {
            let sys_file: SystemFile = read_json(&system)?;
            let sys = sys_file.to_system()?;
            let tf: TrajectoryFile = read_json(&trajectory)?;
            let w = tf.to_window()?;
            let report = verify_solution(&sys, &w, EvalMode::default())?;
            let file = VerifyFile {
                max_residual: report.max_residual.to_string(),
                points_checked: report.points_checked,
                rows_checked: report.rows_checked,
                exact: report.is_exact(),
            };
            println!(
                "checked {} points across {} rows, max residual {}",
                file.points_checked, file.rows_checked, file.max_residual
            );
            if let Some(out) = out {
                write_json(&out, &file)?;
            }
            if !report.is_exact() {
                return Err(CliError::Verification(format!(
                    "nonzero residual {}",
                    report.max_residual
                )));
            }
            Ok(())
        }
        Command::CheckFree {
            realization,
            normalization,
            out,
        } => {
            let real_file: RealizationFile = read_json(&realization)?;
            let real = real_file.to_realization()?;
            let norm_file: NormalizationFile = read_json(&normalization)?;
            let norm = norm_file.to_result()?;
            let report = state_space_report(&real, &norm);
            let file = StateReportFile::from_report(&report);
            println!(
                "gamma = {}, d = {}, rank(X) = {}, free: {}, non-autonomous: {}",
                file.gamma, file.d, file.rank, file.is_free, file.is_nonautonomous
            );
            if let Some(out) = out {
                write_json(&out, &file)?;
            }
            Ok(())
        }
        Command::Membership {
            system,
            row,
            realization,
            out,
        } => {
            let sys_file: SystemFile = read_json(&system)?;
            let sys = sys_file.to_system()?;
            let row = parse_row(sys.nvars(), &row)?;
            if row.len() != sys.q() {
                return Err(CliError::Precondition(format!(
                    "row has {} entries, system has q = {}",
                    row.len(),
                    sys.q()
                )));
            }
            let member = sys.member(&row);
            let witness = sys
                .member_witness(&row)
                .map(|w| w.iter().map(|p| p.to_string()).collect());
            let realization_member = match realization {
                Some(path) => {
                    let real_file: RealizationFile = read_json(&path)?;
                    let real = real_file.to_realization()?;
                    Some(real.member_test(&row).0)
                }
                None => None,
            };
            let file = MembershipFile {
                member,
                witness,
                realization_member,
            };
            println!("member: {}", file.member);
            if let Some(rm) = file.realization_member {
                println!("realization membership test: {}", rm);
            }
            if let Some(out) = out {
                write_json(&out, &file)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
