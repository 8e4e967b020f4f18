//! Command-line front end: curve and envelope export, storage allocation,
//! blocking models, finite-buffer optimization, simulation, online control,
//! figure-style dataset reproduction, and the acceptance harness.
//!
//! All outputs are machine-readable: CSV with a fixed header row and `.`
//! decimals, or JSON mirroring the library types. Exit codes: 0 success,
//! 2 validation failure, 3 configuration error.

mod figures;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use tdcache_core::allocator::{FlowModel, FlowSpec};
use tdcache_core::rdi::RdiSpec;
use tdcache_core::simulator::{ArrivalProcess, SimConfig};
use tdcache_core::{blocking, controller, finite_opt, presets, ratecost, simulator, validation};

#[derive(Parser)]
#[command(
    name = "tdcache",
    version,
    about = "Time-domain buffer-sharing cache analysis",
    propagate_version = true
)]
struct Cli {
    /// Base RNG seed for everything stochastic.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (or directory for `reproduce`); stdout by default.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export a per-class rate-cost curve as CSV (r, s_static, s_envelope, classification).
    Curve {
        /// Class preset `p1`..`p10` or path to an RDI spec JSON file.
        #[arg(long)]
        rdi: String,
        /// Number of grid points.
        #[arg(long, default_value_t = 2048)]
        grid: usize,
    },
    /// Export the lower convex envelope vertices of a class as CSV (r, s, t).
    Envelope {
        /// Class preset `p1`..`p10` or path to an RDI spec JSON file.
        #[arg(long)]
        rdi: String,
        /// Number of grid points for the underlying curve.
        #[arg(long, default_value_t = 2048)]
        grid: usize,
    },
    /// Allocate storage across the classes of a flow at a target hit ratio (JSON).
    Allocate {
        /// Flow preset `pi1`..`pi3` or path to a flow spec JSON file.
        #[arg(long)]
        flow: String,
        /// Target overall hit ratio.
        #[arg(long)]
        target_r: f64,
    },
    /// Export the overall cost-vs-rate curve of a flow as CSV (s, r_breve).
    OverallCurve {
        /// Flow preset `pi1`..`pi3` or path to a flow spec JSON file.
        #[arg(long)]
        flow: String,
        /// Number of grid points.
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// Evaluate a blocking model at one operating point (CSV row).
    Blocking {
        /// Number of buffer slots.
        #[arg(long)]
        l: f64,
        /// Offered load in erlangs (λ·s).
        #[arg(long)]
        load: f64,
        /// Squared coefficient of variation of the interarrival times.
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, value_enum)]
        model: BlockingModel,
    },
    /// Maximize finite-buffer throughput for a flow (JSON result).
    Optimize {
        /// Flow preset `pi1`..`pi3` or path to a flow spec JSON file.
        #[arg(long)]
        flow: String,
        /// Number of buffer slots.
        #[arg(long)]
        l: f64,
        /// Arrival rate override, items per second.
        #[arg(long)]
        lambda: Option<f64>,
        /// Interarrival variability override.
        #[arg(long)]
        c2: Option<f64>,
    },
    /// Verify nonnegativity of the quasi-concavity discriminants in exact arithmetic.
    QcVerify {
        /// Largest buffer size to check.
        #[arg(long, default_value_t = 1000)]
        max_l: u32,
    },
    /// Run the discrete-event simulator from a JSON config (JSON report).
    Simulate {
        /// Path to a simulation config JSON file.
        #[arg(long)]
        config: PathBuf,
        /// Record realized caching times and include their ECDF support.
        #[arg(long)]
        record_ecdf: bool,
    },
    /// Run an online shadow-price controller; emits a trace CSV (epoch, beta, measurement).
    Control {
        #[arg(long, value_enum)]
        mode: ControlMode,
        /// Flow preset `pi1`..`pi3` or path to a flow spec JSON file.
        #[arg(long)]
        flow: String,
        /// Mean storage budget, bits (infinite mode).
        #[arg(long)]
        target_s: Option<f64>,
        /// Number of buffer slots (finite mode).
        #[arg(long)]
        l: Option<u32>,
        /// Epoch budget.
        #[arg(long, default_value_t = 60)]
        max_epochs: u32,
        /// Arrivals per measurement epoch.
        #[arg(long, default_value_t = 20_000)]
        window: u64,
    },
    /// Regenerate a reference dataset (`fig4`..`fig9`) as CSV files.
    Reproduce {
        /// Dataset name: fig4, fig5, fig6, fig7, fig8, or fig9.
        preset: String,
    },
    /// Run the full acceptance suite; JSON verdict per criterion.
    Validate,
}

#[derive(Copy, Clone, ValueEnum)]
enum BlockingModel {
    /// Erlang-B, exact for Poisson arrivals.
    Erlang,
    /// Normal-hazard diffusion approximation (exponential caching times
    /// assumed when deriving peakedness from c² alone).
    Diffusion,
    /// Variability upper bound B(uL, u·load), u = 1/max(c², 1).
    Bound,
    /// Heavy-traffic limit 1 − L/load.
    Heavy,
}

#[derive(Copy, Clone, ValueEnum)]
enum ControlMode {
    Infinite,
    Finite,
}

/// A class preset name or a JSON file path.
fn load_rdi(arg: &str) -> anyhow::Result<RdiSpec> {
    if let Ok(spec) = presets::class_spec(arg) {
        return Ok(spec);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading RDI spec {arg}"))?;
    let spec: RdiSpec = serde_json::from_str(&text).with_context(|| format!("parsing {arg}"))?;
    Ok(spec)
}

/// A flow preset name or a JSON file path.
fn load_flow(arg: &str) -> anyhow::Result<FlowSpec> {
    if let Ok(flow) = presets::flow(arg) {
        return Ok(flow);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading flow spec {arg}"))?;
    let flow: FlowSpec = serde_json::from_str(&text).with_context(|| format!("parsing {arg}"))?;
    Ok(flow)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn out_dir(out: &Option<PathBuf>) -> anyhow::Result<PathBuf> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

pub(crate) fn write_csv(path: &Path, header: &str, rows: &[String]) -> anyhow::Result<()> {
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Exit status of a successfully parsed command: criteria checked by the
/// command may still fail, which is data rather than an error.
enum Outcome {
    Success,
    ValidationFailure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Curve { rdi, grid } => {
            let spec = load_rdi(rdi)?;
            let curve = ratecost::RateCostCurve::compute(&spec, *grid)?;
            let mut text = String::from("r,s_static,s_envelope,classification\n");
            for p in &curve.points {
                text.push_str(&format!(
                    "{},{},{},{:?}\n",
                    p.r,
                    p.s,
                    curve.envelope.value(p.r),
                    curve.classification
                ));
            }
            write_output(&cli.out, &text)?;
            Ok(Outcome::Success)
        }
        Command::Envelope { rdi, grid } => {
            let spec = load_rdi(rdi)?;
            let curve = ratecost::RateCostCurve::compute(&spec, *grid)?;
            let mut text = String::from("r,s,t\n");
            for v in curve.envelope.vertices() {
                text.push_str(&format!("{},{},{}\n", v.r, v.s, v.t));
            }
            write_output(&cli.out, &text)?;
            Ok(Outcome::Success)
        }
        Command::Allocate { flow, target_r } => {
            let model = FlowModel::new(load_flow(flow)?)?;
            let alloc = model.allocate(*target_r)?;
            write_output(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&alloc)?))?;
            Ok(Outcome::Success)
        }
        Command::OverallCurve { flow, grid } => {
            let model = FlowModel::new(load_flow(flow)?)?;
            let curve = model.overall_curve();
            let s_hi = if curve.s_sup.is_finite() { curve.s_sup } else { curve.s_max() };
            let mut text = String::from("s,r_breve\n");
            for i in 0..=*grid {
                let s = s_hi * i as f64 / *grid as f64;
                text.push_str(&format!("{},{}\n", s, curve.r_breve(s)));
            }
            write_output(&cli.out, &text)?;
            Ok(Outcome::Success)
        }
        Command::Blocking { l, load, c2, model } => {
            let value = match model {
                BlockingModel::Erlang => blocking::erlang_b(*l, *load),
                BlockingModel::Diffusion => {
                    // exponential caching-time law: ∫(1−G)² = s/2, so
                    // z = (1 + c²)/2
                    blocking::diffusion_blocking(*l, *load, (1.0 + c2) / 2.0)?
                }
                BlockingModel::Bound => blocking::blocking_upper_bound(*l, *load, *c2),
                BlockingModel::Heavy => blocking::heavy_traffic_blocking(*l, *load)?,
            };
            let name = match model {
                BlockingModel::Erlang => "erlang",
                BlockingModel::Diffusion => "diffusion",
                BlockingModel::Bound => "bound",
                BlockingModel::Heavy => "heavy",
            };
            write_output(
                &cli.out,
                &format!("model,l,load,c2,value\n{name},{l},{load},{c2},{value}\n"),
            )?;
            Ok(Outcome::Success)
        }
        Command::Optimize { flow, l, lambda, c2 } => {
            let mut flow = load_flow(flow)?;
            if let Some(lambda) = lambda {
                flow = FlowSpec::new(flow.classes.clone(), *lambda, flow.file_size_bits, flow.c2)?;
            }
            if let Some(c2) = c2 {
                flow = FlowSpec::new(flow.classes.clone(), flow.lambda, flow.file_size_bits, *c2)?;
            }
            let model = FlowModel::new(flow.clone())?;
            let result = finite_opt::optimize(
                &model.overall_curve(),
                flow.lambda,
                flow.c2,
                flow.file_size_bits,
                *l,
            )?;
            write_output(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&result)?))?;
            Ok(Outcome::Success)
        }
        Command::QcVerify { max_l } => {
            let report = finite_opt::qc_verify(*max_l)?;
            match report.witness {
                None => {
                    write_output(
                        &cli.out,
                        &format!(
                            "checked {} discriminants for L <= {}: all nonnegative\n",
                            report.checked, max_l
                        ),
                    )?;
                    Ok(Outcome::Success)
                }
                Some((big_l, l)) => {
                    write_output(
                        &cli.out,
                        &format!("negative discriminant witness: L = {big_l}, l = {l}\n"),
                    )?;
                    Ok(Outcome::ValidationFailure)
                }
            }
        }
        Command::Simulate { config, record_ecdf } => {
            let text = fs::read_to_string(config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut cfg: SimConfig = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", config.display()))?;
            cfg.seed = cli.seed;
            if *record_ecdf {
                cfg.record_caching_times = true;
            }
            let report = simulator::run(&cfg)?;
            write_output(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
            Ok(Outcome::Success)
        }
        Command::Control { mode, flow, target_s, l, max_epochs, window } => {
            let flow = load_flow(flow)?;
            let lambda = flow.lambda;
            let state = match mode {
                ControlMode::Infinite => {
                    let target = target_s
                        .ok_or_else(|| anyhow::anyhow!("--target-s is required in infinite mode"))?;
                    let mut env = controller::SimEnvironment::new(
                        flow,
                        ArrivalProcess::Poisson { lambda },
                        None,
                        cli.seed,
                    )?;
                    controller::run_infinite(&mut env, target, *max_epochs, *window)?
                }
                ControlMode::Finite => {
                    let l = l.ok_or_else(|| anyhow::anyhow!("--l is required in finite mode"))?;
                    let mut env = controller::SimEnvironment::new(
                        flow,
                        ArrivalProcess::Poisson { lambda },
                        Some(l),
                        cli.seed,
                    )?;
                    controller::run_finite(&mut env, *max_epochs, *window)?
                }
            };
            let mut text = String::from("epoch,beta,measurement\n");
            for (epoch, (beta, value)) in state.history.iter().enumerate() {
                text.push_str(&format!("{epoch},{beta},{value}\n"));
            }
            write_output(&cli.out, &text)?;
            Ok(Outcome::Success)
        }
        Command::Reproduce { preset } => {
            let dir = out_dir(&cli.out)?;
            let ok = figures::reproduce(preset, &dir, cli.seed)?;
            if ok {
                Ok(Outcome::Success)
            } else {
                Ok(Outcome::ValidationFailure)
            }
        }
        Command::Validate => {
            let results = validation::run_all()?;
            for r in &results {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                eprintln!("{:4} {} — {}", r.id, verdict, r.detail);
            }
            write_output(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&results)?))?;
            if results.iter().all(|r| r.passed) {
                Ok(Outcome::Success)
            } else {
                Ok(Outcome::ValidationFailure)
            }
        }
    }
}
