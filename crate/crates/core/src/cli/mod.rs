//! The `seppoly` command-line frontend.
//!
//! Commands read JSON documents and print JSON reports on standard output.
//! Exit codes: 0 success, 1 parse error, 2 validation error, 3 guard exceeded.

pub mod docs;
pub mod dot;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::classify::ClassifyError;
use crate::complex::build_polytope;
use crate::dynamics::{run_circuit, DynamicsError};
use crate::exec::{self, Execution};
use crate::partitions::{compare, enumerate_partitions, join, make_partition, meet, Partition, PartitionAntichain, PartitionError};
use crate::quantum::{compute_profile, QuantumError, SeparabilityProfile, DEFAULT_TOL};

use docs::{InputDoc, Labels};
use report::{EvolveReport, PolytopeReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Guard(_) => 3,
        }
    }

    pub fn from_partition(e: PartitionError) -> CliError {
        match e {
            PartitionError::GuardExceeded { .. } => CliError::Guard(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }

    pub fn from_quantum(e: QuantumError) -> CliError {
        match e {
            QuantumError::GuardExceeded { .. } => CliError::Guard(e.to_string()),
            QuantumError::InvalidDims(ref d) if !d.is_empty() && d.iter().all(|&x| x >= 2) => {
                CliError::Guard(format!("total dimension of {d:?} exceeds {}", crate::quantum::MAX_TOTAL_DIM))
            }
            QuantumError::Partition(p) => CliError::from_partition(p),
            _ => CliError::Validation(e.to_string()),
        }
    }

    pub fn from_dynamics(e: DynamicsError) -> CliError {
        match e {
            DynamicsError::Quantum(q) => CliError::from_quantum(q),
            DynamicsError::Partition(p) => CliError::from_partition(p),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> CliError {
        match e {
            ClassifyError::Partition(p) => CliError::from_partition(p),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "seppoly", version, about = "Separability polytopes of multipartite states")]
pub struct Cli {
    /// Tolerance for PPT and factorization tests.
    #[arg(long, global = true, env = "SEPPOLY_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for state families with randomness.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the separability polytope of each document.
    Polytope {
        /// Write the 1-skeleton as Graphviz DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Name the entanglement class of three-party documents.
    Classify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run a circuit on an initial document.
    Evolve {
        /// Write one DOT file per step into this directory.
        #[arg(long)]
        dot_dir: Option<PathBuf>,
        initial: PathBuf,
        circuit: PathBuf,
    },
    /// Partition lattice queries.
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
}

#[derive(Debug, Subcommand)]
pub enum LatticeOp {
    /// List every partition of n parties.
    Enumerate { n: usize },
    /// Order relation of P to Q ("Finer" means P refines Q).
    Compare(PairArgs),
    /// Coarsest common refinement.
    Join(PairArgs),
    /// Finest common coarsening.
    Meet(PairArgs),
}

/// Partitions as `01|23`, `0,1|2,3` or JSON `[[0,1],[2,3]]`.
#[derive(Debug, clap::Args)]
pub struct PairArgs {
    pub p: String,
    pub q: String,
    /// Party count; defaults to one more than the largest party named.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Options {
    tol: f64,
    seed: u64,
}

/// Parses arguments, runs the command, prints output; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            0
        }
        Err(e) => {
            eprintln!("seppoly: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns the JSON text for standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    if !cli.tol.is_finite() || cli.tol < 0.0 {
        return Err(CliError::Validation(format!("tolerance {} must be finite and non-negative", cli.tol)));
    }
    let opts = Options {
        tol: cli.tol,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Polytope { dot, files } => cmd_polytope(files, dot.as_deref(), opts),
        Command::Classify { files } => cmd_classify(files, opts),
        Command::Evolve {
            dot_dir,
            initial,
            circuit,
        } => cmd_evolve(initial, circuit, dot_dir.as_deref(), opts),
        Command::Lattice { op } => cmd_lattice(op),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: CliError) -> CliError {
    let p = path.display();
    match e {
        CliError::Parse(m) => CliError::Parse(format!("{p}: {m}")),
        CliError::Validation(m) => CliError::Validation(format!("{p}: {m}")),
        CliError::Guard(m) => CliError::Guard(format!("{p}: {m}")),
    }
}

/// An input document reduced to its antichain.
struct Loaded {
    labels: Labels,
    antichain: PartitionAntichain,
    profile: Option<SeparabilityProfile>,
    warnings: Vec<String>,
}

fn load(doc: &InputDoc, opts: Options) -> Result<Loaded, CliError> {
    match doc {
        InputDoc::Partitions(d) => {
            let (labels, antichain, warnings) = docs::partition_doc_antichain(d)?;
            Ok(Loaded {
                labels,
                antichain,
                profile: None,
                warnings,
            })
        }
        InputDoc::State(d) => {
            let state = docs::load_state(d, opts.seed)?;
            let profile = compute_profile(&state.rho, &state.witnesses, opts.tol).map_err(CliError::from_quantum)?;
            Ok(Loaded {
                labels: state.labels,
                antichain: profile.certified_maximal.clone(),
                profile: Some(profile),
                warnings: Vec::new(),
            })
        }
    }
}

fn load_file(path: &Path, opts: Options) -> Result<Loaded, CliError> {
    read(path)
        .and_then(|text| docs::parse_input(&text))
        .and_then(|doc| load(&doc, opts))
        .map_err(|e| with_path(path, e))
}

/// Processes every file (possibly in parallel); the first failure in input
/// order wins.
fn batch<R: Send>(
    files: &[PathBuf],
    opts: Options,
    f: impl Fn(&Path, Loaded) -> Result<R, CliError> + Sync + Send,
) -> Result<Vec<R>, CliError> {
    exec::map(Execution::default(), files, |path| {
        load_file(path, opts).and_then(|l| f(path, l))
    })
    .into_iter()
    .collect()
}

fn single_or_array<T: Serialize>(items: Vec<T>) -> String {
    if items.len() == 1 {
        to_json(&items[0])
    } else {
        to_json(&items)
    }
}

fn indexed_path(path: &Path, i: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{i}"),
    };
    path.with_file_name(name)
}

fn cmd_polytope(files: &[PathBuf], dot: Option<&Path>, opts: Options) -> Result<String, CliError> {
    let loaded = batch(files, opts, |_, l| Ok(l))?;
    let mut reports = Vec::with_capacity(loaded.len());
    for (i, l) in loaded.into_iter().enumerate() {
        for w in &l.warnings {
            eprintln!("seppoly: warning: {}: {w}", files[i].display());
        }
        if let Some(path) = dot {
            let target = if files.len() == 1 { path.to_path_buf() } else { indexed_path(path, i) };
            let k = build_polytope(&l.antichain);
            write(&target, &dot::skeleton_dot(&k, l.labels.as_slice(), "polytope"))?;
        }
        reports.push(PolytopeReport::new(l.labels.as_slice(), &l.antichain, l.profile.as_ref(), l.warnings));
    }
    Ok(single_or_array(reports))
}

fn cmd_classify(files: &[PathBuf], opts: Options) -> Result<String, CliError> {
    let reports = batch(files, opts, |path, l| {
        let unknown = l.profile.as_ref().map_or(&[][..], |p| &p.unknown[..]);
        report::classify_report(l.labels.as_slice(), &l.antichain, unknown, l.warnings.clone())
            .map_err(|e| with_path(path, e.into()))
    })?;
    Ok(single_or_array(reports))
}

fn cmd_evolve(initial: &Path, circuit: &Path, dot_dir: Option<&Path>, opts: Options) -> Result<String, CliError> {
    let l = load_file(initial, opts)?;
    let circuit_doc = read(circuit)
        .and_then(|t| docs::parse_circuit(&t))
        .map_err(|e| with_path(circuit, e))?;
    let c = docs::load_circuit(&circuit_doc, &l.labels).map_err(|e| with_path(circuit, e))?;
    let trace = run_circuit(&l.antichain, &c, opts.tol).map_err(CliError::from_dynamics)?;
    if let Some(dir) = dot_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Validation(format!("{}: {e}", dir.display())))?;
        let labels = l.labels.as_slice();
        write(
            &dir.join("step-000.dot"),
            &dot::skeleton_dot(&build_polytope(&trace.initial), labels, "step 0"),
        )?;
        for (i, s) in trace.steps.iter().enumerate() {
            let title = format!("step {}", i + 1);
            write(&dir.join(format!("step-{:03}.dot", i + 1)), &dot::skeleton_dot(&s.after, labels, &title))?;
        }
    }
    let report = EvolveReport::new(l.labels.as_slice(), &trace, l.profile.as_ref(), l.warnings);
    Ok(to_json(&report))
}

fn parse_partition_arg(text: &str) -> Result<Vec<Vec<usize>>, CliError> {
    let text = text.trim();
    if text.starts_with('[') {
        return serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{text:?}: {e}")));
    }
    let bad = || CliError::Parse(format!("cannot read partition {text:?}"));
    text.split('|')
        .map(|block| {
            let block = block.trim();
            if block.is_empty() {
                return Err(bad());
            }
            if block.contains(',') {
                block.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
            } else {
                block
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                    .collect()
            }
        })
        .collect()
}

fn pair(args: &PairArgs) -> Result<(Partition, Partition), CliError> {
    let p = parse_partition_arg(&args.p)?;
    let q = parse_partition_arg(&args.q)?;
    let n = match args.n {
        Some(n) => n,
        None => p.iter().chain(&q).flatten().max().map_or(0, |m| m + 1),
    };
    let make = |b: &[Vec<usize>]| make_partition(b, n).map_err(CliError::from_partition);
    Ok((make(&p)?, make(&q)?))
}

fn cmd_lattice(op: &LatticeOp) -> Result<String, CliError> {
    let value = match op {
        LatticeOp::Enumerate { n } => {
            let parts: Vec<Vec<Vec<usize>>> = enumerate_partitions(*n)
                .map_err(CliError::from_partition)?
                .map(|p| p.to_vecs())
                .collect();
            json!({ "n": n, "count": parts.len(), "partitions": parts })
        }
        LatticeOp::Compare(args) => {
            let (p, q) = pair(args)?;
            let rel = compare(&p, &q).map_err(CliError::from_partition)?;
            json!({ "p": p.to_vecs(), "q": q.to_vecs(), "relation": rel })
        }
        LatticeOp::Join(args) | LatticeOp::Meet(args) => {
            let (p, q) = pair(args)?;
            let r = if matches!(op, LatticeOp::Join(_)) { join(&p, &q) } else { meet(&p, &q) };
            let r = r.map_err(CliError::from_partition)?;
            json!({ "p": p.to_vecs(), "q": q.to_vecs(), "result": r.to_vecs() })
        }
    };
    Ok(to_json(&value))
}
