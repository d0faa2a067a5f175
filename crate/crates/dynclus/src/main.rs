use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dynclus::bench::{run_suite, thread_count, write_csv, Status, Suite};
use dynclus::format::{instance_to_json, read_instance, read_schedule, write_output, ScheduleFile, TripletsFile};
use dynclus::run::{solve_with_report, verify, OracleCheck, RunReport, SolveParams};
use dynclus_core::dks::reduce_3dm;
use dynclus_core::dokm::{DokmParams, TmMflParams};
use dynclus_core::gen::{generate, GenParams, Layout};
use dynclus_core::outlier::OutlierParams;
use dynclus_core::ProblemKind;

/// Exit status when a certificate or check fails.
const EXIT_FAILED: u8 = 1;
/// Exit status for IO, parse and solver errors.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "dynclus", version, about = "Approximation algorithms for dynamic clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the schedule.
    Solve {
        #[command(subcommand)]
        problem: SolveCommand,
    },
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Check a schedule, optionally against the brute-force optimum.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        against_oracle: bool,
        #[arg(long, default_value_t = dynclus_core::oracle::DEFAULT_CAP)]
        cap: u128,
        /// Weight rounding the dokm bound assumes.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Coverage slack the outlier bound assumes.
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
    },
    /// Build the three-step k-supplier instance of a 3D-matching input.
    #[command(name = "reduce-3dm")]
    Reduce3dm {
        #[arg(long)]
        elements: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite of generated instances against the oracle.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        /// CSV table; stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// The same rows as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    instance: PathBuf,
    /// Schedule file; stdout when absent, in which case the report goes to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SolveCommand {
    Dokm {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Floor of the weight rounding; defaults to delta.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_guesses: usize,
    },
    Dks {
        #[command(flatten)]
        common: Common,
    },
    #[command(name = "dks-outlier")]
    DksOutlier {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 8.0)]
        gamma: f64,
        #[arg(long, default_value_t = 50_000)]
        max_guesses: usize,
    },
    Tmmfl {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Dokm,
    Dks,
    DksOutlier,
    Tmmfl,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Square,
    Line,
    Clustered,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 2)]
    steps: usize,
    #[arg(long)]
    clients: usize,
    #[arg(long)]
    facilities: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, value_enum, default_value_t = LayoutArg::Square)]
    layout: LayoutArg,
    #[arg(long, default_value_t = 3)]
    centers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data always serializes")
}

fn emit_report(report: &RunReport, to_stderr: bool) {
    if to_stderr {
        eprintln!("{}", to_json(report));
    } else {
        println!("{}", to_json(report));
    }
}

fn status(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn run_solve(cmd: SolveCommand) -> Result<ExitCode> {
    let (common, params) = match cmd {
        SolveCommand::Dokm { common, delta, epsilon, samples, seed, max_guesses } => {
            (common, SolveParams::Dokm(DokmParams { delta, epsilon, samples, seed, max_guesses }))
        }
        SolveCommand::Dks { common } => (common, SolveParams::Dks),
        SolveCommand::DksOutlier { common, epsilon, gamma, max_guesses } => {
            (common, SolveParams::DksOutlier(OutlierParams { epsilon, gamma, max_guesses }))
        }
        SolveCommand::Tmmfl { common, samples, seed } => (common, SolveParams::TmMfl(TmMflParams { samples, seed })),
    };
    let inst = read_instance(&common.instance)?;
    let (solved, report) = solve_with_report(&inst, &params)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let file = ScheduleFile::new(&solved.schedule, Some(solved.certificate.clone()));
    write_output(common.out.as_deref(), &to_json(&file))?;
    emit_report(&report, common.out.is_none());
    Ok(status(report.pass))
}

fn run_generate(a: GenerateArgs) -> Result<ExitCode> {
    let kind = match a.kind {
        KindArg::Dokm => ProblemKind::Dokm,
        KindArg::Dks => ProblemKind::Dks,
        KindArg::DksOutlier => ProblemKind::DksOutlier,
        KindArg::Tmmfl => ProblemKind::TmMfl,
    };
    let mut p = GenParams::new(kind, a.steps, a.clients, a.facilities, a.k, a.seed);
    p.gamma = a.gamma;
    p.layout = match a.layout {
        LayoutArg::Square => Layout::Square,
        LayoutArg::Line => Layout::Line,
        LayoutArg::Clustered => Layout::Clustered { centers: a.centers },
    };
    let inst = generate(&p).map_err(|e| anyhow::anyhow!("{e}"))?;
    write_output(a.out.as_deref(), &instance_to_json(&inst))?;
    Ok(ExitCode::SUCCESS)
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Solve { problem } => run_solve(problem),
        Command::Generate(a) => run_generate(a),
        Command::Verify { instance, schedule, against_oracle, cap, delta, epsilon } => {
            let inst = read_instance(&instance)?;
            let file = read_schedule(&schedule)?;
            let chk = OracleCheck { cap, delta, epsilon };
            let report = verify(&inst, &file, against_oracle.then_some(&chk))?;
            emit_report(&report, false);
            Ok(status(report.pass))
        }
        Command::Reduce3dm { elements, alpha, out } => {
            let s = fs::read_to_string(&elements).with_context(|| format!("reading {}", elements.display()))?;
            let t: TripletsFile = serde_json::from_str(&s).context("parsing triplets")?;
            let inst = reduce_3dm(t.n, &t.triplets, alpha).map_err(|e| anyhow::anyhow!("{e}"))?;
            write_output(out.as_deref(), &instance_to_json(&inst))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { suite, csv, json } => {
            let s = fs::read_to_string(&suite).with_context(|| format!("reading {}", suite.display()))?;
            let suite: Suite = serde_json::from_str(&s).context("parsing suite")?;
            let rows = run_suite(&suite, thread_count())?;
            match &csv {
                Some(p) => write_csv(&rows, fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)?,
                None => write_csv(&rows, std::io::stdout())?,
            }
            if let Some(p) = &json {
                fs::write(p, to_json(&rows)).with_context(|| format!("writing {}", p.display()))?;
            }
            let failed: Vec<&str> =
                rows.iter().filter(|r| matches!(r.pass, Status::Fail | Status::Error)).map(|r| r.instance.as_str()).collect();
            if !failed.is_empty() {
                eprintln!("{}", serde_json::json!({ "failures": failed }));
            }
            Ok(status(failed.is_empty()))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
