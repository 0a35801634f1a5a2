use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grover_nmr::experiment::{run_experiment, ExperimentReport};
use grover_nmr::grover::{grover2_circuit, OracleLabel};
use grover_nmr::nmr::pulse::ErrorModel;
use grover_nmr::search::{
    classical_approximate_evaluations, classical_expected_evaluations, classical_monte_carlo, grover_general,
    optimal_iterations, SearchProblem, MAX_QUBITS,
};

mod config;

/// Largest register simulated amplitude by amplitude; beyond it the search
/// table uses the closed-form success probability.
const MAX_SIMULATED_QUBITS: usize = 14;

#[derive(Parser)]
#[command(name = "grover-nmr", version, about = "Two-qubit quantum search on a simulated NMR computer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the ideal gate-level circuit
    Gate(GateArgs),
    /// Run the pulse-level experiment and write spectra
    Pulse(PulseArgs),
    /// Compare quantum and classical search costs
    Search(SearchArgs),
}

#[derive(Args)]
struct GateArgs {
    /// Oracle label, e.g. f01
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    label: Option<OracleLabel>,
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct PulseArgs {
    /// `key = value` configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pseudo-pure purity, overrides the config file
    #[arg(long)]
    epsilon: Option<f64>,
    /// Length of every selective pulse in seconds
    #[arg(long = "error-tp")]
    error_tp: Option<f64>,
    /// Output directory
    #[arg(long, env = "GROVER_NMR_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    /// Number of qubits
    #[arg(long, required_unless_present = "scan")]
    n: Option<usize>,
    /// Number of marked items
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Iteration count, defaults to the optimum
    #[arg(long)]
    m: Option<usize>,
    /// Table over n = 1..=10 and k in {1, N/4, N/2}
    #[arg(long, conflicts_with_all = ["n", "m"])]
    scan: bool,
    /// Seed for the classical Monte-Carlo column
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
}

enum Failure {
    Usage(String),
    Classification,
}

impl From<grover_nmr::Error> for Failure {
    fn from(e: grover_nmr::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        Failure::Usage(e.0)
    }
}

fn ket(index: usize) -> String {
    format!("|{}{}⟩", index >> 1, index & 1)
}

/// Drops rounding noise so it does not print as `-0.000`.
fn clean(x: f64) -> f64 {
    if x.abs() < 5e-4 {
        0.0
    } else {
        x
    }
}

fn gate(args: &GateArgs) -> Result<String, Failure> {
    let labels = match args.label {
        Some(l) => vec![l],
        None => OracleLabel::ALL.to_vec(),
    };
    let mut out = String::new();
    let mut ok = true;
    for label in labels {
        let state = grover2_circuit(label);
        let probs = state.probabilities();
        let (best, p) = probs.iter().copied().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        let amps: Vec<String> =
            state.amplitudes().iter().map(|a| format!("{:+.3}{:+.3}i", clean(a.re), clean(a.im))).collect();
        writeln!(out, "{label}: amplitudes [{}] result: {}, probability {p:.3}", amps.join(", "), ket(best)).unwrap();
        ok &= best == label.index();
    }
    if ok {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Classification)
    }
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(contents)?;
    f.sync_all()?;
    fs::rename(&tmp, dir.join(name))
}

fn pulse(args: &PulseArgs) -> Result<String, Failure> {
    let mut cfg = match &args.config {
        Some(path) => config::load(path)?,
        None => Default::default(),
    };
    if let Some(eps) = args.epsilon {
        cfg.epsilon = eps;
    }
    if let Some(tp) = args.error_tp {
        cfg.error_model = ErrorModel::soft(tp)?;
    }
    config::validate(&cfg)?;

    let exp = run_experiment(&cfg)?;
    let io_err = |e: std::io::Error| Failure::Usage(format!("{}: {e}", args.out.display()));
    fs::create_dir_all(&args.out).map_err(io_err)?;
    for (name, spectrum) in exp.spectra() {
        write_atomic(&args.out, &format!("{name}.csv"), spectrum.to_csv().as_bytes()).map_err(io_err)?;
    }
    let report = ExperimentReport::new(&cfg, &exp);
    write_atomic(&args.out, "summary.json", (report.to_json() + "\n").as_bytes()).map_err(io_err)?;

    let mut out = String::new();
    writeln!(out, "reference phase {:.3} deg, epsilon {}", exp.reference.phase_deg, cfg.epsilon).unwrap();
    for run in &exp.runs {
        match &run.readout {
            Ok(r) => {
                let heights: Vec<String> = r.heights.iter().map(|h| format!("{h:+.6}")).collect();
                let verdict = if run.correct() { "ok" } else { "WRONG" };
                writeln!(
                    out,
                    "{}: qubits {}{} heights [{}] fidelity {:.6} {verdict}",
                    run.label,
                    r.qubits[0],
                    r.qubits[1],
                    heights.join(", "),
                    run.fidelity
                )
                .unwrap();
            }
            Err(e) => writeln!(out, "{}: {e} fidelity {:.6} WRONG", run.label, run.fidelity).unwrap(),
        }
    }
    writeln!(out, "wrote {}", args.out.display()).unwrap();
    if exp.all_correct() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Classification)
    }
}

fn search_row(out: &mut String, n: usize, k: usize, m: Option<usize>, args: &SearchArgs) -> Result<(), Failure> {
    let problem = SearchProblem::with_count(n, k)?;
    let big_n = problem.domain_size() as u64;
    let m = m.unwrap_or_else(|| optimal_iterations(&problem));
    let p = if n <= MAX_SIMULATED_QUBITS {
        problem.success_probability(&grover_general(&problem, m))
    } else {
        problem.predicted_success(m)
    };
    let exact = classical_expected_evaluations(big_n, k as u64)?;
    let approx = classical_approximate_evaluations(big_n, k as u64)?;
    write!(out, "{big_n:>8} {k:>7} {m:>5} {p:>10.6} {exact:>12.3} {approx:>12.3}").unwrap();
    if let Some(seed) = args.seed {
        let mc = classical_monte_carlo(big_n, k as u64, args.trials, seed)?;
        write!(out, " {:>10.3} ± {:.3}", mc.mean, mc.std_error).unwrap();
    }
    out.push('\n');
    Ok(())
}

fn search(args: &SearchArgs) -> Result<String, Failure> {
    let mut out = format!("{:>8} {:>7} {:>5} {:>10} {:>12} {:>12}", "N", "k", "m", "p_success", "classical", "N/(2k)");
    if args.seed.is_some() {
        write!(out, " {:>10}", "monte_carlo").unwrap();
    }
    out.push('\n');
    if args.scan {
        for n in 1..=10 {
            let big_n = 1usize << n;
            let mut ks = vec![1, big_n / 4, big_n / 2];
            ks.retain(|&k| k >= 1);
            ks.dedup();
            for k in ks {
                search_row(&mut out, n, k, None, args)?;
            }
        }
    } else {
        let n = args.n.expect("clap enforces --n without --scan");
        if n == 0 || n > MAX_QUBITS {
            return Err(Failure::Usage(format!("--n must be in 1..={MAX_QUBITS}")));
        }
        search_row(&mut out, n, args.k, args.m, args)?;
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Gate(a) => gate(a),
        Command::Pulse(a) => pulse(a),
        Command::Search(a) => search(a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Classification) => {
            eprintln!("error: classification failed");
            ExitCode::from(2)
        }
    }
}
