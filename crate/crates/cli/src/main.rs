use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kawahara::cli::{dispatch, load_config, Experiment};

const CONFIG_HELP: &str = "\
Config keys (JSON; --set a.b=value overrides one key, values parse as JSON or fall back to strings):
  experiment            set by the subcommand; must match if present in the file
  params                {alpha, beta, gamma}, required; alpha != 0 and nonresonant
  kmax                  highest stored mode, required, 1..=16384
  t_final (alias T)     run length [1]
  dt                    time step [min(0.1, 1/(8 |g| kmax)), shrunk to divide t_final]
  seed                  run seed [0]; forcing uses seed + 1 unless it names its own
  initial, forcing      {kind: zero} [default]
                        {kind: random, decay, scale [1], seed, norm}
                        {kind: cosine, k, amplitude}
                        {kind: file, path}   spectrum JSON or checkpoint
  output_dir            [out]
  record_every          keep every n-th step in timeseries.csv [1]
  checkpoint_every      evolve: checkpoint every n steps [final state only]
  convolution           fast | direct [fast]
  picard                {delta 0.05, iters 8, quad_nodes 1024, compare_steps 1600, tolerance 1e-6}
  residual              {t [t_final], stride 1, forcing_argument plain|propagated, tolerance 1e-4}
  multilinear           {trials 100, s 0}
  bourgain              {scan bilinear|l4|l6, trials 500, s 0, delta 0.5, eps 0.1, span 2pi,
                         kmaxes [8,16,32,64], slope_max 0.1, grid {period 1, nt 64, span 1, mmax 8},
                         baseline none, baseline_tolerance 0.05}
  resonance             {sweep_top 64, shell none, gap_delta_max 32, gap_nmax 256}
  ensemble              {norms [0.5 .. 5, 8 values], vary_shape true}

Exit status: 0 when every assertion passes, 1 when one fails, 2 on errors.
RAYON_NUM_THREADS sets the worker count of the parallel sections.";

#[derive(Parser)]
#[command(name = "kawahara", version, about = "Damped, forced Kawahara simulation and verification runs", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. --set params.gamma=0.5
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run whatever experiment the config names
    Run(RunArgs),
    /// Integrate and record norms, energy residual and checkpoints
    Evolve(RunArgs),
    /// Picard iteration of the Duhamel map on a short interval
    Picard(RunArgs),
    /// Residual of the normal-form representation of a trajectory
    NormalFormResidual(RunArgs),
    /// Empirical sizes of the normal-form operators
    MultilinearScan(RunArgs),
    /// Restricted-norm ratio scans
    BourgainScan(RunArgs),
    /// Exhaustive resonant-triple counts and gap statistics
    ResonanceCount(RunArgs),
    /// Ensemble entry into the absorbing ball
    Absorbing(RunArgs),
    /// H^2 plateau of the nonlinear part for rough data
    Smoothing(RunArgs),
    /// Ensemble H^2 radius after absorption
    Attractor(RunArgs),
}

impl Command {
    fn split(self) -> (Option<Experiment>, RunArgs) {
        match self {
            Command::Run(a) => (None, a),
            Command::Evolve(a) => (Some(Experiment::Evolve), a),
            Command::Picard(a) => (Some(Experiment::Picard), a),
            Command::NormalFormResidual(a) => (Some(Experiment::NormalFormResidual), a),
            Command::MultilinearScan(a) => (Some(Experiment::MultilinearScan), a),
            Command::BourgainScan(a) => (Some(Experiment::BourgainScan), a),
            Command::ResonanceCount(a) => (Some(Experiment::ResonanceCount), a),
            Command::Absorbing(a) => (Some(Experiment::Absorbing), a),
            Command::Smoothing(a) => (Some(Experiment::Smoothing), a),
            Command::Attractor(a) => (Some(Experiment::Attractor), a),
        }
    }
}

fn main() -> ExitCode {
    let (experiment, args) = Cli::parse().command.split();
    let cfg = match load_config(args.config.as_deref(), &args.set, experiment) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("kawahara: config: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match dispatch(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("kawahara: {}: {e}", cfg.experiment.name());
            return ExitCode::from(2);
        }
    };
    for a in &outcome.assertions {
        println!(
            "{} {}: {:e} (limit {:e}) {}",
            if a.passed { "PASS" } else { "FAIL" },
            a.name,
            a.value,
            a.tolerance,
            a.detail
        );
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
