//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use seppoly::classify::{classify_three, polytope_signature, ThreeQubitClass};
use seppoly::complex::{build_polytope, is_single_simplex};
use seppoly::dynamics::{evolve_step, run_circuit, Circuit, GateOp};
use seppoly::partitions::{
    closure_contains, enumerate_partitions, join, make_partition, meet, Block, Partition, PartitionAntichain,
};
use seppoly::quantum::families::{bell_pair, ghz, ghz_diagonal_mixture, haar_entangled, random_product_mixture, werner};
use seppoly::quantum::{
    compute_profile, ppt_min_eigenvalue, pure_factorization, DensityMatrix, HilbertSpec, PureState, DEFAULT_TOL,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

struct Certified {
    class: ThreeQubitClass,
    f_vector: Vec<u64>,
    components: usize,
    unknown: Vec<Partition>,
}

struct Row<'a> {
    name: &'a str,
    rho: &'a DensityMatrix,
    witnesses: Vec<seppoly::WitnessedEnsemble>,
    class: ThreeQubitClass,
    f_vector: Vec<u64>,
    components: usize,
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn blk(ps: &[usize]) -> Block {
    Block::from_parties(ps.iter().copied()).unwrap()
}

fn part(blocks: &[&[usize]], n: usize) -> Partition {
    let v: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
    make_partition(&v, n).unwrap()
}

/// Profile, class and polytope signature of a three-qubit state.
fn pipeline(rho: &DensityMatrix, witnesses: &[seppoly::WitnessedEnsemble]) -> Result<Certified, String> {
    let profile = compute_profile(rho, witnesses, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let class = classify_three(&profile.certified_maximal).map_err(|e| e.to_string())?;
    let sig = polytope_signature(&profile.certified_maximal);
    Ok(Certified {
        class,
        f_vector: sig.f_vector.0,
        components: sig.components,
        unknown: profile.unknown,
    })
}

fn row<'a>(
    name: &'a str,
    rho: &'a DensityMatrix,
    witnesses: Vec<seppoly::WitnessedEnsemble>,
    class: ThreeQubitClass,
    f_vector: &[u64],
    components: usize,
) -> Row<'a> {
    Row {
        name,
        rho,
        witnesses,
        class,
        f_vector: f_vector.to_vec(),
        components,
    }
}

fn table_one() -> Outcome {
    let start = Instant::now();
    let ghz3 = DensityMatrix::from_pure(&ghz(3).unwrap());
    let zero_phi = DensityMatrix::from_pure(&bell_pair(3, 1, 2).unwrap());
    let (two, two_w) = ghz_diagonal_mixture(3, &[0, 1]).unwrap();
    let (three, three_w) = ghz_diagonal_mixture(3, &[0, 1, 2]).unwrap();
    let spec = HilbertSpec::qubits(3).unwrap();
    let (sep, sep_w) =
        random_product_mixture(&spec, &Partition::finest(3), 4, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();

    let rows = [
        row("GHZ3", &ghz3, vec![], ThreeQubitClass::FullyEntangled, &[1], 1),
        row("|0>|phi+>", &zero_phi, vec![], ThreeQubitClass::OneQubitBiseparable(0), &[2, 1], 1),
        row("two-split", &two, two_w, ThreeQubitClass::TwoQubitBiseparable([0, 1]), &[4, 2], 2),
        row("three-split", &three, three_w, ThreeQubitClass::ThreeBiseparable, &[6, 3], 3),
        row("separable", &sep, vec![sep_w], ThreeQubitClass::FullySeparable, &[3, 3, 1], 1),
    ];
    let mut notes = Vec::new();
    for r in rows {
        let got = pipeline(r.rho, &r.witnesses)?;
        let name = r.name;
        ensure!(got.class == r.class, "{name}: class {:?}, expected {:?}", got.class, r.class);
        ensure!(
            got.f_vector == r.f_vector && got.components == r.components,
            "{name}: f = {:?}, {} components",
            got.f_vector,
            got.components
        );
        if !got.unknown.is_empty() {
            let list: Vec<String> = got.unknown.iter().map(|p| p.to_string()).collect();
            notes.push(format!("{name} leaves {} undecided", list.join(",")));
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    notes.insert(0, format!("5 rows in {:.3} s", elapsed.as_secs_f64()));
    Ok(notes.join("; "))
}

fn section_three() -> Outcome {
    let e1 = part(&[&[0, 1], &[2]], 3);
    let e2 = part(&[&[0], &[1, 2]], 3);
    let a = PartitionAntichain::new(vec![e1, e2]).unwrap();
    let out = evolve_step(&a, &GateOp::entangling(0, 2).unwrap(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let point = blk(&[0, 1, 2]);
    ensure!(out.antichain.elements() == [Partition::one_block(3)], "antichain {:?}", out.antichain);
    ensure!(out.map.target().vertices() == [point], "target vertices {:?}", out.map.target().vertices());
    for v in [blk(&[0, 1]), blk(&[2]), blk(&[0]), blk(&[1, 2])] {
        ensure!(out.map.image(v) == Some(point), "{v} maps to {:?}", out.map.image(v));
    }
    ensure!(out.identifications.len() == 1, "{} identification events", out.identifications.len());
    let event = &out.identifications[0];
    ensure!(event.vertex == point, "identified vertex {}", event.vertex);
    ensure!(
        event.sources.contains(&blk(&[0, 1])) && event.sources.contains(&blk(&[1, 2])),
        "sources {:?}",
        event.sources
    );
    out.map.check().map_err(|e| e.to_string())?;
    Ok("U(e1) = U(e2) = {012}, one identification event".into())
}

fn pure_simplex_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut recovered = 0;
    for trial in 0..200 {
        let n = rng.random_range(1..=4);
        let labels = random_labels(n, &mut rng);
        let blocks = blocks_of(&labels);
        let factors: Vec<Vec<Complex64>> = blocks
            .iter()
            .map(|b| {
                let spec = HilbertSpec::qubits(b.len()).unwrap();
                haar_entangled(&spec, 0.05, &mut rng).amplitudes().iter().copied().collect()
            })
            .collect();
        let psi = PureState::new(HilbertSpec::qubits(n).unwrap(), product_amplitudes(n, &blocks, &factors))
            .map_err(|e| e.to_string())?;
        let expected = to_partition(&labels);
        let found = pure_factorization(&psi, 1e-8);
        ensure!(found == expected, "trial {trial}: found {found}, built {expected}");
        let profile = compute_profile(&DensityMatrix::from_pure(&psi), &[], 1e-8).map_err(|e| e.to_string())?;
        let k = build_polytope(&profile.certified_maximal);
        ensure!(is_single_simplex(&k), "trial {trial}: polytope {k:?} is not one simplex");
        ensure!(profile.certified_maximal.elements() == [expected], "trial {trial}: antichain");
        recovered += 1;
    }
    Ok(format!("{recovered}/200 factorizations recovered, all single simplices"))
}

fn lattice_suite() -> Outcome {
    let bells = [1u64, 2, 5, 15, 52, 203];
    for (n, &b) in (1..=6).zip(&bells) {
        let count = enumerate_partitions(n).unwrap().count() as u64;
        ensure!(count == b, "B({n}) = {count}, expected {b}");
        ensure!(bell_numbers(n)[n] == b, "Bell triangle disagrees at {n}");
    }
    let mut pairs = 0;
    for n in 1..=4 {
        let all = all_labelings(n);
        for a in &all {
            for b in &all {
                let (p, q) = (to_partition(a), to_partition(b));
                ensure!(labels_of(&join(&p, &q).unwrap()) == brute_join(a, b), "join {p} {q}");
                ensure!(labels_of(&meet(&p, &q).unwrap()) == brute_meet(a, b), "meet {p} {q}");
                pairs += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for probe in 0..1000 {
        let k = rng.random_range(1..=4);
        let sets: Vec<Labels> = (0..k).map(|_| random_labels(5, &mut rng)).collect();
        let ps: Vec<Partition> = sets.iter().map(|l| to_partition(l)).collect();
        let anti = seppoly::partitions::maximal_elements(&ps).unwrap();
        let t = random_labels(5, &mut rng);
        let got = closure_contains(&anti, &to_partition(&t)).unwrap();
        ensure!(got == closure_oracle(&sets, &t), "probe {probe}: closure disagrees");
    }
    Ok(format!("Bell 1..6 ok, {pairs} join/meet pairs, 1000 closure probes"))
}

fn simplicial_map_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut steps = 0;
    for run in 0..500 {
        let n = rng.random_range(1..=5);
        let a = random_antichain(n, &mut rng);
        let c = random_circuit(n, 8, &mut rng);
        let trace = run_circuit(&a, &c, DEFAULT_TOL).map_err(|e| format!("run {run}: {e}"))?;
        check_trace(&trace).map_err(|e| format!("run {run}: {e}"))?;
        steps += trace.steps.len();
    }
    for run in 0..500 {
        let n = 1 + run % 5;
        let gates = random_tree(n, &mut rng)
            .into_iter()
            .map(|(i, j)| GateOp::entangling(i, j).unwrap())
            .collect();
        let finest = PartitionAntichain::singleton(Partition::finest(n));
        let trace = run_circuit(&finest, &Circuit::new(n, gates).unwrap(), DEFAULT_TOL).map_err(|e| e.to_string())?;
        ensure!(trace.changing_steps() == n - 1, "tree run {run}: {} changing steps", trace.changing_steps());
        ensure!(
            trace.final_antichain().elements() == [Partition::one_block(n)],
            "tree run {run}: did not reach a point"
        );
    }
    Ok(format!("500 random runs ({steps} steps) valid and monotone; 500 spanning trees collapse in n-1 steps"))
}

#[derive(Deserialize)]
struct PptOracles {
    ghz3_cut_min_eigenvalue: f64,
    ghz3_cut_min_eigenvalue_bound: f64,
    werner_crossing_p: f64,
    werner_crossing_tol: f64,
}

fn ppt_numerics() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/ppt_oracles.json");
    let oracles: PptOracles =
        serde_json::from_str(&std::fs::read_to_string(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let low = |p: f64| ppt_min_eigenvalue(&werner(p).unwrap(), Block::singleton(0)).unwrap();
    let (mut lo, mut hi) = (0.0, 1.0);
    ensure!(low(lo) > 0.0 && low(hi) < 0.0, "no sign change on [0, 1]");
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if low(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);
    ensure!(
        (crossing - oracles.werner_crossing_p).abs() <= oracles.werner_crossing_tol,
        "Werner crossing at {crossing}"
    );
    let rho = DensityMatrix::from_pure(&ghz(3).unwrap());
    let mut worst = f64::NEG_INFINITY;
    for cut in [blk(&[0]), blk(&[1]), blk(&[2])] {
        let m = ppt_min_eigenvalue(&rho, cut).unwrap();
        ensure!(m <= oracles.ghz3_cut_min_eigenvalue_bound, "GHZ3 cut {cut}: {m}");
        ensure!((m - oracles.ghz3_cut_min_eigenvalue).abs() < 1e-12, "GHZ3 cut {cut}: {m} vs oracle");
        worst = worst.max(m);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "Werner crossing p = {crossing:.12}; GHZ3 cut minimum {worst:.6}; {:.3} s",
        elapsed.as_secs_f64()
    ))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples").join(name)
}

fn cli_determinism() -> Outcome {
    let ex = |n: &str| example(n).display().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["polytope".into(), ex("random_mixture.json")],
        vec!["polytope".into(), "--seed".into(), "7".into(), ex("product3.json")],
        vec!["polytope".into(), ex("ghz3.json"), ex("w3.json"), ex("two_splits_state.json"), ex("labelled.json")],
        vec!["classify".into(), "--seed".into(), "3".into(), ex("product3.json")],
        vec!["evolve".into(), ex("two_splits_state.json"), ex("chain3.json")],
        vec!["evolve".into(), ex("section3.json"), ex("section3_gate.json")],
        vec!["lattice".into(), "enumerate".into(), "5".into()],
    ];
    let bin = env!("CARGO_BIN_EXE_seppoly");
    for args in &runs {
        let outputs: Vec<Vec<u8>> = (0..3)
            .map(|_| Command::new(bin).args(args).env_remove("SEPPOLY_TOL").output())
            .map(|o| o.map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .map(|o| if o.status.success() { Ok(o.stdout) } else { Err(String::from_utf8_lossy(&o.stderr).into_owned()) })
            .collect::<Result<_, _>>()?;
        ensure!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?} differs between runs");
    }
    Ok(format!("{} commands, 3 runs each, byte-identical", runs.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("Table 1 reproduction", table_one),
        ("section 3 identification example", section_three),
        ("pure-state simplex theorem", pure_simplex_theorem),
        ("lattice suite", lattice_suite),
        ("simplicial-map suite", simplicial_map_suite),
        ("PPT numerics", ppt_numerics),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
