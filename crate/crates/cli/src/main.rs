//! Command-line front end for the smoothness-lab harness.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use smoothness_lab::func::{corpus_entries, Domain, FunctionSpec, QuadratureConfig};
use smoothness_lab::harness::{
    calibrate, check_ids, init_thread_pool, reproduce_example, verify, write_rows_csv, write_summary_json,
    CheckOutcome, Constants, ExperimentConfig, ExperimentKind, FamilyConfig, Summary, Verdict,
};

#[derive(Parser)]
#[command(name = "smoothness-lab", version, about = "Moduli of smoothness, Steklov averages and sampling-operator error checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the built-in function corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// ω_r, τ_r and Ω̃_{r,r} of a function on a δ grid.
    Moduli {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        orders: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.125,0.0625")]
        deltas: Vec<f64>,
    },
    /// Samples of the Steklov average f̃_{δ,r}.
    Steklov {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// ‖f − G(f)‖_p across a scale grid.
    OperatorError {
        #[command(flatten)]
        target: Target,
        /// `bernstein`, `shannon`, or `generalized:<kernel>` (e.g. `generalized:bspline3`).
        #[arg(long)]
        family: String,
        /// Scales (n or W); dyadic defaults when omitted.
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
    },
    /// Run an experiment described by a TOML or JSON file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named theorem check, or `all`.
    Verify {
        id: String,
        /// Regression constants file; defaults to the frozen constants.
        #[arg(long)]
        constants: Option<PathBuf>,
        /// Write one CSV row per grid point.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write a JSON summary of verdicts.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Reproduce one of the closed-form examples (1, 2 or 3).
    ReproduceExample {
        id: u32,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Rerun every check without constants and write the observed extremes.
    Calibrate {
        #[arg(long, default_value = "constants.json")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List function ids with their parameters.
    List,
    /// List the registered theorem checks.
    Checks,
}

#[derive(Args)]
struct Target {
    /// Corpus function id.
    #[arg(long)]
    function: String,
    /// Function parameter as `key=value`, value parsed as JSON.
    #[arg(long = "param")]
    params: Vec<String>,
    /// Interval `a,b`; the real line when omitted.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    interval: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 2048)]
    cells: usize,
    /// CSV output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Target {
    fn config(&self, experiment: ExperimentKind) -> Result<ExperimentConfig> {
        let mut function = FunctionSpec::new(&self.function);
        for kv in &self.params {
            let (k, v) = kv.split_once('=').with_context(|| format!("parameter `{kv}` is not key=value"))?;
            let value: Value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            function = function.with(k, value);
        }
        let domain = match self.interval.as_deref() {
            Some([a, b]) => Domain::interval(*a, *b)?,
            Some(_) => bail!("--interval takes exactly two numbers"),
            None => Domain::line(),
        };
        Ok(ExperimentConfig {
            function,
            domain,
            p: self.p,
            experiment,
            quadrature: QuadratureConfig::default().with_cells(self.cells),
        })
    }
}

fn parse_family(text: &str) -> Result<FamilyConfig> {
    Ok(match text.split_once(':') {
        None if text == "bernstein" => FamilyConfig::Bernstein,
        None if text == "shannon" => FamilyConfig::Shannon { trunc_terms: smoothness_lab::operators::DEFAULT_TRUNC_TERMS },
        Some(("generalized", kernel)) => FamilyConfig::Generalized { kernel: kernel.to_string() },
        _ => bail!("unknown family `{text}`; use bernstein, shannon or generalized:<kernel>"),
    })
}

fn run_config(cfg: &ExperimentConfig, out: Option<&PathBuf>) -> Result<()> {
    let output = cfg.run()?;
    match out {
        Some(path) => output.write_csv(File::create(path).with_context(|| format!("creating {}", path.display()))?)?,
        None => output.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn print_outcome(o: &CheckOutcome) {
    println!("{:<40} {:<20} {:>8.2}s", o.id, o.verdict().to_string(), o.seconds);
    for r in &o.reports {
        let ratio = if r.max_ratio.is_finite() { format!("{:.4e}", r.max_ratio) } else { "-".into() };
        let cond = if r.conditional { " (conditional)" } else { "" };
        println!("    {:<34} {:<20} max ratio {ratio}{cond}", r.name, r.verdict.to_string());
        for note in &r.notes {
            println!("        {note}");
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Corpus { action: CorpusAction::List } => {
            let mut out = io::stdout().lock();
            for e in corpus_entries() {
                writeln!(out, "{:<18} {:<36} {}", e.id, e.params, e.description)?;
            }
        }
        Command::Corpus { action: CorpusAction::Checks } => {
            for id in check_ids() {
                println!("{id}");
            }
        }
        Command::Moduli { target, orders, deltas } => {
            let cfg = target.config(ExperimentKind::Moduli { orders, deltas })?;
            run_config(&cfg, target.out.as_ref())?;
        }
        Command::Steklov { target, delta, r, samples } => {
            let cfg = target.config(ExperimentKind::Steklov { delta, r, samples })?;
            run_config(&cfg, target.out.as_ref())?;
        }
        Command::OperatorError { target, family, scales } => {
            let cfg = target.config(ExperimentKind::OperatorError { family: parse_family(&family)?, scales })?;
            run_config(&cfg, target.out.as_ref())?;
        }
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            run_config(&cfg, out.as_ref())?;
        }
        Command::Verify { id, constants, csv, json } => {
            let constants = match constants {
                Some(path) => Constants::load(&path).with_context(|| format!("loading {}", path.display()))?,
                None => Constants::frozen(),
            };
            let outcomes = if id == "all" {
                let mut all = Vec::new();
                for id in check_ids() {
                    let o = verify(id, &constants)?;
                    print_outcome(&o);
                    all.push(o);
                }
                all
            } else {
                let o = verify(&id, &constants)?;
                print_outcome(&o);
                vec![o]
            };
            let summary = Summary::new(&outcomes);
            println!(
                "{} checks: {} hold, {} degenerate, {} violated",
                outcomes.len(),
                summary.holds,
                summary.degenerate,
                summary.violated
            );
            if let Some(path) = csv {
                write_rows_csv(&path, &outcomes)?;
            }
            if let Some(path) = json {
                write_summary_json(&path, &summary)?;
            }
            return Ok(summary.verdict != Verdict::Violated);
        }
        Command::ReproduceExample { id, json } => {
            let report = reproduce_example(id)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("example {}: {}", report.id, report.title);
                for r in &report.rows {
                    println!(
                        "  {:<28} n/W={:<6} p={:<4} computed={:<14.9e} expected={:<14.9e} tol={:.1e} {}",
                        r.quantity,
                        r.n_or_w,
                        r.p,
                        r.computed,
                        r.expected,
                        r.tolerance,
                        if r.pass { "ok" } else { "MISMATCH" }
                    );
                }
                for (name, fit) in &report.fits {
                    println!("  fit {name}: order {:.4}, r² {:.5}", fit.fitted_order, fit.r_squared);
                }
                println!("{}", if report.pass { "pass" } else { "FAIL" });
            }
            return Ok(report.pass);
        }
        Command::Calibrate { out } => {
            let (constants, outcomes) = calibrate()?;
            for o in &outcomes {
                print_outcome(o);
            }
            constants.save(&out)?;
            println!("wrote {} constants to {}", constants.len(), out.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    init_thread_pool();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
