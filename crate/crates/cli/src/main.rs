use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gtlab::analysis::analyze_run;
use gtlab::bounds::{all_bounds, hwang_upper, info_lower_bound};
use gtlab::harness::{minimax_m, verify_grid, worst_case, MinimaxLimits, Mode, WorstCaseOptions};
use gtlab::{finalize, Algorithm, Error, Instance, Strategy};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Adaptive group testing: run strategies, find worst cases, check bounds.
#[derive(Parser)]
#[command(name = "gtlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Run one strategy on one instance.
    Run {
        #[arg(long)]
        alg: Algorithm,
        #[arg(long)]
        n: usize,
        /// Comma-separated defective items.
        #[arg(long, value_delimiter = ',', conflicts_with = "d_random")]
        defectives: Option<Vec<usize>>,
        /// Draw this many defectives uniformly at random.
        #[arg(long, requires = "seed")]
        d_random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        emit_transcript: bool,
    },
    /// Worst number of tests over all (or sampled) defective sets.
    Worstcase {
        #[arg(long)]
        alg: Algorithm,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ceiling on C(n, d) in exhaustive mode.
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
    },
    /// Exhaustive worst cases and bound checks for every n ≤ n-max.
    Verify {
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "individual,zd,zu,zc")]
        algs: Vec<Algorithm>,
        /// Write CSV here instead of JSON to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the per-run transcript analysis.
        #[arg(long)]
        no_analysis: bool,
    },
    /// Exact minimax number of tests with d known.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = 70)]
        max_candidates: u64,
    },
    /// Every lower and upper bound at (n, d).
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        rho: Option<f64>,
        /// Test budget of the quarter-clearing prelude.
        #[arg(long)]
        psi: Option<f64>,
    },
}

enum Outcome {
    Ok,
    Violation,
}

fn print(v: &serde_json::Value) -> gtlab::Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))?;
    emit(&s)
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(s: &str) -> gtlab::Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{s}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Internal(e.to_string())),
        _ => Ok(()),
    }
}

fn execute(cmd: Command) -> gtlab::Result<Outcome> {
    match cmd {
        Command::Run {
            alg,
            n,
            defectives,
            d_random,
            seed,
            emit_transcript,
        } => {
            let defectives = match (defectives, d_random) {
                (Some(ds), _) => ds,
                (None, Some(d)) => {
                    if d > n {
                        return Err(Error::Usage(format!("d = {d} exceeds n = {n}")));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
                    let mut v = sample(&mut rng, n, d).into_vec();
                    v.sort_unstable();
                    v
                }
                (None, None) => Vec::new(),
            };
            let instance = Instance::new(n, defectives)?;
            let run = alg.run(&instance)?;
            finalize(&run, &instance)?;
            let analysis = analyze_run(&run);
            let passed = analysis.as_ref().is_none_or(|a| a.passed());
            let mut out = json!({
                "algorithm": alg.name(),
                "n": n,
                "defectives": instance.defectives(),
                "tests_used": run.tests_used,
                "correct": true,
                "plan": run.plan,
                "analysis": analysis.map(|a| json!({
                    "passed": a.passed(),
                    "phases": a.phases.len(),
                    "violations": a.violations,
                })),
            });
            if emit_transcript {
                out["transcript"] = json!(run.transcript);
            }
            print(&out)?;
            Ok(if passed {
                Outcome::Ok
            } else {
                Outcome::Violation
            })
        }
        Command::Worstcase {
            alg,
            n,
            d,
            mode,
            samples,
            seed,
            cap,
        } => {
            let mode = match mode {
                ModeArg::Exhaustive => Mode::Exhaustive,
                ModeArg::Sampled => Mode::Sampled {
                    count: samples,
                    seed,
                },
            };
            let opts = WorstCaseOptions { cap, analyze: true };
            let cell = worst_case(&alg, n, d, mode, opts)?;
            print(&json!(cell))?;
            Ok(if cell.passed() {
                Outcome::Ok
            } else {
                Outcome::Violation
            })
        }
        Command::Verify {
            n_max,
            algs,
            out,
            no_analysis,
        } => {
            let strategies: Vec<&dyn Strategy> = algs.iter().map(|a| a as &dyn Strategy).collect();
            let opts = WorstCaseOptions {
                analyze: !no_analysis,
                ..Default::default()
            };
            let report = verify_grid(n_max, &strategies, opts)?;
            match out {
                Some(path) => {
                    let f = File::create(&path).map_err(|e| {
                        Error::Usage(format!("cannot write {}: {e}", path.display()))
                    })?;
                    report.write_csv(BufWriter::new(f))?;
                    for v in &report.violations {
                        eprintln!("violation: {} n={} d={} {}", v.algorithm, v.n, v.d, v.check);
                    }
                }
                None => emit(&report.to_json()?)?,
            }
            Ok(if report.passed() {
                Outcome::Ok
            } else {
                Outcome::Violation
            })
        }
        Command::Oracle {
            n,
            d,
            max_n,
            max_candidates,
        } => {
            let limits = MinimaxLimits {
                max_n,
                max_candidates,
            };
            let value = minimax_m(n, d, limits)?;
            let (nu, du) = (n as u64, d as u64);
            print(&json!({
                "n": n,
                "d": d,
                "minimax": value,
                "info": info_lower_bound(nu, du),
                "hwang": hwang_upper(nu, du),
            }))?;
            Ok(Outcome::Ok)
        }
        Command::Bounds { n, d, rho, psi } => {
            if let Some(r) = rho {
                if !(r > 0.0 && r < 1.0) {
                    return Err(Error::Usage(format!("rho = {r} must lie in (0, 1)")));
                }
            }
            print(&json!(all_bounds(n, d, rho, psi)))?;
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e @ (Error::Usage(_) | Error::LimitExceeded(_) | Error::Precondition(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
