//! Command-line front end: `compile`, `report`, `simulate`, `sweep`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use trotterc::io::{
    self, CounterexampleOutput, OrderArg, PlanFile, QubitOrderArg, SimulateOutput, SpectralRow,
    StyleArg, SubtermOrderArg, SweepRow,
};
use trotterc::sim;
use trotterc_core::circuit::Circuit;
use trotterc_core::hamiltonian::SpinOrbitalIntegrals;
use trotterc_core::trotter::{build_trotter_step, TrotterPlan, TsOrder};

/// Compiler and exact-simulation harness for controlled Trotter-Suzuki
/// evolution of electronic-structure Hamiltonians.
#[derive(Parser)]
#[command(name = "trotterc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile one controlled Trotter step from an integral file.
    Compile(Box<CompileArgs>),
    /// Gate counts and parallel depth of a serialized circuit.
    Report {
        /// Circuit file produced by `compile`.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a plan file: spectral readout over Trotter numbers, or the
    /// built-in error-scaling counterexample.
    Simulate {
        /// Integral file (required by spectral plans).
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// JSON plan file.
        #[arg(long)]
        plan: PathBuf,
        /// Write the JSON output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ground-energy error sweep over Trotter numbers, term orderings
    /// and the corrected-Hamiltonian toggle; emits CSV.
    Sweep(SweepArgs),
}

#[derive(clap::Args)]
struct CompileArgs {
    /// Integral file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    style: StyleArg,
    #[arg(long, value_enum, default_value_t)]
    order: OrderArg,
    #[arg(long = "qubit-order", value_enum, default_value_t)]
    qubit_order: QubitOrderArg,
    #[arg(long = "subterm-order", value_enum, default_value_t)]
    subterm_order: SubtermOrderArg,
    /// Pack compatible terms into concurrent layers.
    #[arg(long)]
    nest: bool,
    /// Run the cancellation passes.
    #[arg(long)]
    cancel: bool,
    /// Timestep of the emitted step.
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    /// Trotter-Suzuki order (1 or 2).
    #[arg(long = "ts-order", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    ts_order: u8,
    /// Rescale off-diagonal coefficients against the finite timestep.
    #[arg(long = "diagonal-fix")]
    diagonal_fix: bool,
    /// Drop merged coefficients at or below this magnitude.
    #[arg(long, default_value_t = 1e-12)]
    threshold: f64,
    /// Constant pulled out of the encoded Hamiltonian.
    #[arg(long = "energy-shift", default_value_t = 0.0)]
    energy_shift: f64,
    /// Output circuit file.
    #[arg(long)]
    out: PathBuf,
    /// Write the JSON run report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Integral file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Trotter numbers, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    n: Vec<usize>,
    /// Term orderings to compare.
    #[arg(long, value_delimiter = ',', default_value = "lex")]
    orders: Vec<OrderArg>,
    /// Corrected-Hamiltonian settings to compare.
    #[arg(long, value_delimiter = ',', default_value = "off")]
    fix: Vec<OnOff>,
    #[arg(long, value_enum, default_value_t)]
    style: StyleArg,
    #[arg(long = "qubit-order", value_enum, default_value_t)]
    qubit_order: QubitOrderArg,
    #[arg(long = "subterm-order", value_enum, default_value_t)]
    subterm_order: SubtermOrderArg,
    /// Total evolution time t; each step runs at t/n.
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    /// Trotter-Suzuki order (1 or 2).
    #[arg(long = "ts-order", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    ts_order: u8,
    /// Constant pulled out of the encoded Hamiltonian.
    #[arg(long = "energy-shift", default_value_t = 0.0)]
    energy_shift: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = serde_json::json!({ "error": { "message": format!("{e:#}") } });
            eprintln!("{obj}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compile(args) => compile(&args),
        Command::Report { input } => report(&input),
        Command::Simulate { input, plan, out } => simulate(input.as_deref(), &plan, out.as_deref()),
        Command::Sweep(args) => sweep(&args),
    }
}

fn read_integrals(path: &Path) -> Result<SpinOrbitalIntegrals> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading integrals from {}", path.display()))?;
    io::parse_integrals(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => {
            io::write_atomic(path, &text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ts_order(raw: u8) -> TsOrder {
    if raw == 2 {
        TsOrder::Second
    } else {
        TsOrder::First
    }
}

fn arg_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

fn compile(args: &CompileArgs) -> Result<()> {
    if !(args.dt > 0.0) {
        bail!("--dt must be positive");
    }
    let integrals = read_integrals(&args.input)?;
    let plan = TrotterPlan {
        order_strategy: args.order.into(),
        ts_order: ts_order(args.ts_order),
        n_steps: 1,
        total_time: args.dt,
        style: args.style.into(),
        qubit_order: args.qubit_order.into(),
        subterm_order: args.subterm_order.into(),
        diagonal_fix: args.diagonal_fix,
        nest: args.nest,
        cancel: args.cancel,
        prune_threshold: args.threshold,
        energy_shift: args.energy_shift,
    };
    let step = build_trotter_step(&integrals, &plan).map_err(anyhow::Error::msg)?;
    io::write_atomic(&args.out, &step.circuit.to_text())
        .with_context(|| format!("writing {}", args.out.display()))?;
    let report = io::run_report(
        &args.input.display().to_string(),
        &step,
        &plan,
        args.style,
        args.order,
        args.qubit_order,
        args.subterm_order,
    );
    emit_json(&report, args.report.as_deref())
}

fn report(input: &Path) -> Result<()> {
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("reading circuit from {}", input.display()))?;
    let circuit = Circuit::from_text(&text).map_err(anyhow::Error::msg)?;
    emit_json(&io::circuit_report(&circuit), None)
}

fn simulate(input: Option<&Path>, plan_path: &Path, out: Option<&Path>) -> Result<()> {
    let plan_text = std::fs::read_to_string(plan_path)
        .with_context(|| format!("reading plan from {}", plan_path.display()))?;
    let plan: PlanFile = serde_json::from_str(&plan_text)
        .with_context(|| format!("parsing plan {}", plan_path.display()))?;
    match plan {
        PlanFile::CounterexampleScaling(p) => {
            if p.n_values.len() < 3 {
                bail!("counterexample plans need at least 3 Trotter numbers for a fit");
            }
            let (points, fit) = sim::counterexample_scaling(&p.n_values, p.total_time)?;
            emit_json(
                &CounterexampleOutput {
                    schema_version: io::SCHEMA_VERSION,
                    points,
                    fit,
                },
                out,
            )
        }
        PlanFile::Spectral(p) => {
            let input = input.context("spectral plans need --in INTEGRALS")?;
            let integrals = read_integrals(input)?;
            let spectrum = sim::exact_spectrum(&integrals)?;
            if spectrum.degenerate {
                bail!("ground state is degenerate; eigenphase matching would be ambiguous");
            }
            let mut results = Vec::new();
            for &n in &p.n_values {
                let tp = p.trotter_plan(n).map_err(anyhow::Error::msg)?;
                sim::branch_safe(&spectrum, integrals.core_energy(), tp.energy_shift, tp.delta_t())?;
                let step = build_trotter_step(&integrals, &tp).map_err(anyhow::Error::msg)?;
                let result = sim::trotter_ground_energy(&step, &spectrum, integrals.core_energy())?;
                results.push(SpectralRow { n, result });
            }
            let fit = sim::error_scaling_fit(
                &results
                    .iter()
                    .filter(|r| !r.result.ambiguous)
                    .map(|r| (r.n as f64, r.result.error))
                    .collect::<Vec<_>>(),
            )
            .ok();
            emit_json(
                &SimulateOutput {
                    schema_version: io::SCHEMA_VERSION,
                    results,
                    fit,
                },
                out,
            )
        }
    }
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let integrals = read_integrals(&args.input)?;
    let spectrum = sim::exact_spectrum(&integrals)?;
    if spectrum.degenerate {
        bail!("ground state is degenerate; eigenphase matching would be ambiguous");
    }
    let mut tasks = Vec::new();
    for &n in &args.n {
        for &order in &args.orders {
            for &fix in &args.fix {
                tasks.push((n, order, fix));
            }
        }
    }
    let pool = thread_pool()?;
    let outcomes: Vec<Result<SweepRow>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, order, fix)| {
                let plan = TrotterPlan {
                    order_strategy: order.into(),
                    ts_order: ts_order(args.ts_order),
                    n_steps: n,
                    total_time: args.time,
                    style: args.style.into(),
                    qubit_order: args.qubit_order.into(),
                    subterm_order: args.subterm_order.into(),
                    diagonal_fix: fix == OnOff::On,
                    nest: false,
                    cancel: false,
                    energy_shift: args.energy_shift,
                    ..TrotterPlan::default()
                };
                sim::branch_safe(
                    &spectrum,
                    integrals.core_energy(),
                    plan.energy_shift,
                    plan.delta_t(),
                )?;
                let step = build_trotter_step(&integrals, &plan).map_err(anyhow::Error::msg)?;
                let result = sim::trotter_ground_energy(&step, &spectrum, integrals.core_energy())?;
                if result.ambiguous {
                    bail!(
                        "eigenvector match ambiguous at n={n} (overlap {:.3})",
                        result.overlap
                    );
                }
                Ok(SweepRow {
                    n,
                    ordering: arg_name(order),
                    fix: fix == OnOff::On,
                    style: arg_name(args.style),
                    error_hartree: result.error,
                })
            })
            .collect()
    });
    let rows: Vec<SweepRow> = outcomes.into_iter().collect::<Result<_>>()?;
    let csv = io::sweep_csv(&rows);
    match &args.out {
        Some(path) => {
            io::write_atomic(path, &csv).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Sweep evaluations fan out over this pool; `TROTTERC_WORKERS` pins the
/// size.
fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("TROTTERC_WORKERS") {
        let workers: usize = value
            .parse()
            .context("TROTTERC_WORKERS must be a positive integer")?;
        if workers == 0 {
            bail!("TROTTERC_WORKERS must be a positive integer");
        }
        builder = builder.num_threads(workers);
    }
    builder.build().context("building worker pool")
}
