//! `qsample`: synthesize superpositions proportional to a spec file,
//! sample them reproducibly, and self-check the kernels against a dense
//! oracle.
//!
//! Exit codes are stable: 0 ok, 1 check failure, 2 parse/usage,
//! 3 degenerate spec, 4 resource cap, 5 empty sample, 6 adaptive
//! exhaustion.

mod report;
mod spec_file;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use qsample::amplify::{self, SourceSpec, TargetSpec};
use qsample::oracle;
use qsample::sampler;
use qsample::synth::{self, AmplitudeSpec, RuntimeSchedule, DEFAULT_MAX_ROUNDS};
use qsample::BasisIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use report::{
    render, AdaptiveBlock, PlanBlock, Report, RunBlock, SamplingBlock, SpecEcho, ToolBlock,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable/invalid input files.
    Parse(String),
    /// An error surfaced by the library, mapped onto the exit table.
    Lib(qsample::Error),
    /// An oracle-check suite exceeded its tolerance.
    CheckFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::CheckFailed(_) => 1,
            CliError::Lib(e) => match e {
                qsample::Error::RegisterTooLarge { .. }
                | qsample::Error::DenseCapExceeded { .. } => 4,
                qsample::Error::DegenerateSpec => 3,
                qsample::Error::EmptySample => 5,
                qsample::Error::AdaptiveExhausted { .. } => 6,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(m) | CliError::CheckFailed(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

impl From<qsample::Error> for CliError {
    fn from(e: qsample::Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Parser)]
#[command(
    name = "qsample",
    version,
    about = "Quantum-search synthesis and sampling of arbitrary distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a spec file and print its amplification plan.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Synthesize the spec and report the conditioned distribution.
    Synth {
        #[arg(long)]
        input: PathBuf,
        /// Override the planned iteration count.
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Include a wall-clock timestamp (breaks byte determinism).
        #[arg(long)]
        timestamp: bool,
    },
    /// Synthesize, then draw seeded measurement shots.
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Include a wall-clock timestamp (breaks byte determinism).
        #[arg(long)]
        timestamp: bool,
    },
    /// Multi-target search over an indicator spec built from the flags.
    Grover {
        #[arg(long = "n-qubits")]
        n_qubits: usize,
        /// Comma-separated target indices, distinct and below 2^n.
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<usize>,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Synthesize with the sum of |f|^2 treated as unknown, measuring
    /// the ancilla once per scheduled runtime until it reads 0.
    Adaptive {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: usize,
    },
    /// Randomized self-check of the kernels against the dense oracle.
    OracleCheck {
        #[arg(long = "max-qubits", default_value_t = 5)]
        max_qubits: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Analyze { input } => cmd_analyze(&input),
        Command::Synth {
            input,
            iterations,
            output,
            timestamp,
        } => cmd_synth(&input, iterations, output.as_deref(), timestamp),
        Command::Sample {
            input,
            shots,
            seed,
            output,
            timestamp,
        } => cmd_sample(&input, shots, seed, output.as_deref(), timestamp),
        Command::Grover {
            n_qubits,
            targets,
            shots,
            seed,
        } => cmd_grover(n_qubits, &targets, shots, seed),
        Command::Adaptive {
            input,
            seed,
            max_rounds,
        } => cmd_adaptive(&input, seed, max_rounds),
        Command::OracleCheck {
            max_qubits,
            trials,
            seed,
        } => cmd_oracle_check(max_qubits, trials, seed),
    }
}

fn emit(report: &Report, output: Option<&Path>) -> Result<(), CliError> {
    let text = render(report);
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(input: &Path) -> Result<ExitCode, CliError> {
    let loaded = spec_file::load(input)?;
    let (program, source, targets) = synth::build_program(&loaded.spec)?;
    let u = amplify::overlap_u(&program, &source, &targets)?;
    let plan = amplify::plan(u)?;
    let report = Report {
        spec: SpecEcho::new(loaded.label, &loaded.spec),
        plan: PlanBlock::from(plan),
        run: None,
        sampling: None,
        adaptive: None,
        tool: ToolBlock::current(),
        timestamp_unix: None,
    };
    emit(&report, None)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(
    input: &Path,
    iterations: Option<usize>,
    output: Option<&Path>,
    timestamp: bool,
) -> Result<ExitCode, CliError> {
    let loaded = spec_file::load(input)?;
    let result = synth::synthesize(&loaded.spec, iterations)?;
    let report = Report {
        spec: SpecEcho::new(loaded.label, &loaded.spec),
        plan: PlanBlock::from(result.plan),
        run: Some(RunBlock {
            iterations: iterations.unwrap_or(result.plan.eta),
            success_probability: result.success_probability,
            conditioned_state_error: result.conditioned_state_error,
            conditioned_distribution: result.conditioned_distribution,
        }),
        sampling: None,
        adaptive: None,
        tool: ToolBlock::current(),
        timestamp_unix: timestamp.then(report::timestamp_now),
    };
    emit(&report, output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(
    input: &Path,
    shots: u64,
    seed: u64,
    output: Option<&Path>,
    timestamp: bool,
) -> Result<ExitCode, CliError> {
    let loaded = spec_file::load(input)?;
    let result = synth::synthesize(&loaded.spec, None)?;
    let sample = sampler::sample_report(
        &result.final_state,
        result.plan,
        &loaded.spec.target_distribution(),
        shots,
        seed,
    )?;
    let empty = sample.accepted == 0;
    let report = Report {
        spec: SpecEcho::new(loaded.label, &loaded.spec),
        plan: PlanBlock::from(result.plan),
        run: Some(RunBlock {
            iterations: result.plan.eta,
            success_probability: result.success_probability,
            conditioned_state_error: result.conditioned_state_error,
            conditioned_distribution: result.conditioned_distribution,
        }),
        sampling: Some(SamplingBlock::from_report(&sample)),
        adaptive: None,
        tool: ToolBlock::current(),
        timestamp_unix: timestamp.then(report::timestamp_now),
    };
    emit(&report, output)?;
    if empty {
        eprintln!("error: no shot observed the ancilla in 0");
        return Ok(ExitCode::from(5));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_grover(n_qubits: usize, targets: &[usize], shots: u64, seed: u64) -> Result<ExitCode, CliError> {
    if targets.is_empty() {
        return Err(CliError::Parse("target list is empty".into()));
    }
    let size = 1usize
        .checked_shl(n_qubits as u32)
        .ok_or_else(|| CliError::Parse(format!("n-qubits {n_qubits} is out of range")))?;
    let mut seen = std::collections::BTreeSet::new();
    for &t in targets {
        if t >= size {
            return Err(CliError::Parse(format!(
                "target {t} is outside the 2^{n_qubits}-point domain"
            )));
        }
        if !seen.insert(t) {
            return Err(CliError::Parse(format!("duplicate target {t}")));
        }
    }

    let mut table = vec![Complex64::new(0.0, 0.0); size];
    for &t in targets {
        table[t] = Complex64::new(1.0, 0.0);
    }
    let spec = AmplitudeSpec::from_amplitudes(table)?;
    let result = synth::synthesize(&spec, None)?;
    let sample = sampler::sample_report(
        &result.final_state,
        result.plan,
        &spec.target_distribution(),
        shots,
        seed,
    )?;

    // Fraction of raw shots landing on an ancilla-0 target state.
    let hits: u64 = targets
        .iter()
        .map(|&t| {
            sample
                .counts
                .get(&BasisIndex::new(t))
                .copied()
                .unwrap_or(0)
        })
        .sum();
    let hit_rate = hits as f64 / shots as f64;

    let mut sampling = SamplingBlock::from_report(&sample);
    sampling.target_hit_rate = Some(hit_rate);
    let mut echo = SpecEcho::new(None, &spec);
    echo.targets = Some(seen.into_iter().collect());
    let report = Report {
        spec: echo,
        plan: PlanBlock::from(result.plan),
        run: Some(RunBlock {
            iterations: result.plan.eta,
            success_probability: result.success_probability,
            conditioned_state_error: result.conditioned_state_error,
            conditioned_distribution: result.conditioned_distribution,
        }),
        sampling: Some(sampling),
        adaptive: None,
        tool: ToolBlock::current(),
        timestamp_unix: None,
    };
    emit(&report, None)?;
    if sample.accepted == 0 {
        return Ok(ExitCode::from(5));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_adaptive(input: &Path, seed: u64, max_rounds: usize) -> Result<ExitCode, CliError> {
    let loaded = spec_file::load(input)?;
    let schedule = RuntimeSchedule::default_for(&loaded.spec).with_max_rounds(max_rounds);
    let run = match synth::adaptive_synthesize(&loaded.spec, seed, &schedule) {
        Ok(run) => run,
        Err(e @ qsample::Error::AdaptiveExhausted { .. }) => {
            eprintln!(
                "error: {e}; schedule cap {} iterations per round",
                schedule.iteration_cap()
            );
            return Ok(ExitCode::from(6));
        }
        Err(e) => return Err(e.into()),
    };
    let report = Report {
        spec: SpecEcho::new(loaded.label, &loaded.spec),
        plan: PlanBlock::from(run.result.plan),
        run: Some(RunBlock {
            iterations: run.total_iterations,
            success_probability: run.result.success_probability,
            conditioned_state_error: run.result.conditioned_state_error,
            conditioned_distribution: run.result.conditioned_distribution,
        }),
        sampling: None,
        adaptive: Some(AdaptiveBlock {
            seed,
            rounds: run.rounds,
            total_iterations: run.total_iterations,
            max_rounds: schedule.max_rounds(),
            iteration_cap: schedule.iteration_cap(),
        }),
        tool: ToolBlock::current(),
        timestamp_unix: None,
    };
    emit(&report, None)?;
    Ok(ExitCode::SUCCESS)
}

struct Suite {
    name: &'static str,
    worst: f64,
    tolerance: f64,
}

impl Suite {
    fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

fn cmd_oracle_check(max_qubits: usize, trials: usize, seed: u64) -> Result<ExitCode, CliError> {
    if trials == 0 {
        return Err(CliError::Parse("trials must be at least 1".into()));
    }
    if max_qubits > oracle::DENSE_QUBIT_CAP {
        return Err(CliError::Lib(qsample::Error::DenseCapExceeded {
            qubits: max_qubits,
            max: oracle::DENSE_QUBIT_CAP,
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut unitarity = Suite {
        name: "unitarity",
        worst: 0.0,
        tolerance: 1e-12,
    };
    let mut equivalence = Suite {
        name: "dense-equivalence",
        worst: 0.0,
        tolerance: 1e-12,
    };
    let mut invariance = Suite {
        name: "2d-invariance",
        worst: 0.0,
        tolerance: 1e-10,
    };
    let mut rotation = Suite {
        name: "rotation-law",
        worst: 0.0,
        tolerance: 1e-10,
    };

    for trial in 0..trials {
        let qubits = trial % max_qubits + 1;
        let program = oracle::random_program(qubits, &mut rng);

        let dense = oracle::dense_of_program(&program)?;
        unitarity.worst = unitarity.worst.max(dense.unitarity_defect());

        let deviation = oracle::equivalence_check(&program, 10, seed ^ trial as u64)?;
        equivalence.worst = equivalence.worst.max(deviation);

        // A random non-empty target set with non-degenerate overlap.
        let dim = 1usize << qubits;
        let source = SourceSpec::basis(rng.gen_range(0..dim));
        let count = rng.gen_range(1..=dim.min(3));
        let indices: Vec<usize> = rand::seq::index::sample(&mut rng, dim, count)
            .iter()
            .collect();
        let targets = TargetSpec::from_indices(indices.iter().copied())
            .expect("sampled target sets are non-empty");
        let Ok(u) = amplify::overlap_u(&program, &source, &targets) else {
            continue;
        };
        let analysis = amplify::subspace_analysis(&program, &source, &targets)?;
        invariance.worst = invariance
            .worst
            .max(analysis.residual_s)
            .max(analysis.residual_w);
        let expected = Complex64::from_polar(1.0, 2.0 * analysis.u.asin());
        invariance.worst = invariance
            .worst
            .max((analysis.eigenvalues[0] - expected).norm())
            .max((analysis.eigenvalues[1] - expected.conj()).norm());

        let marked: std::collections::BTreeSet<_> =
            indices.iter().map(|&i| BasisIndex::new(i)).collect();
        let theta = u.asin();
        for eta in 0..=3 {
            let state = amplify::run(&program, &source, &targets, eta)?;
            let mass = state.probability_mass(&marked)?;
            let law = ((2 * eta + 1) as f64 * theta).sin().powi(2);
            rotation.worst = rotation.worst.max((mass - law).abs());
        }
    }

    let mut all_passed = true;
    for suite in [&unitarity, &equivalence, &invariance, &rotation] {
        let verdict = if suite.passed() { "PASS" } else { "FAIL" };
        println!(
            "suite {}: worst deviation {:.3e} (tolerance {:.0e}) {verdict}",
            suite.name, suite.worst, suite.tolerance
        );
        all_passed &= suite.passed();
    }
    if !all_passed {
        return Err(CliError::CheckFailed(
            "one or more oracle suites exceeded tolerance".into(),
        ));
    }
    Ok(ExitCode::SUCCESS)
}
