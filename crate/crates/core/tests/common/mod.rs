//! Brute-force oracles shared by the integration tests. Partitions are
//! handled here as label vectors (`labels[party] = block id`), independently
//! of the library's block representation.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use seppoly::complex::{build_polytope, compose, SimplicialMap};
use seppoly::dynamics::{Circuit, EvolutionTrace, GateOp};
use seppoly::partitions::{make_partition, maximal_elements, Partition, PartitionAntichain};

pub type Labels = Vec<usize>;

/// Relabels blocks in order of first appearance.
pub fn canonical(labels: &[usize]) -> Labels {
    let mut seen = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(i) => i,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect()
}

/// Every partition of `n` parties, from all `n^n` functions into `0..n`.
pub fn all_labelings(n: usize) -> Vec<Labels> {
    let mut out = BTreeSet::new();
    let total = n.pow(n as u32);
    for mut code in 0..total {
        let mut f = Vec::with_capacity(n);
        for _ in 0..n {
            f.push(code % n);
            code /= n;
        }
        out.insert(canonical(&f));
    }
    out.into_iter().collect()
}

/// `a` is finer than or equal to `b`.
pub fn finer_eq(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| a[i] != a[j] || b[i] == b[j]))
}

pub fn blocks_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let c = canonical(labels);
    let k = c.iter().max().map_or(0, |m| m + 1);
    (0..k)
        .map(|b| (0..c.len()).filter(|&i| c[i] == b).collect())
        .collect()
}

pub fn to_partition(labels: &[usize]) -> Partition {
    make_partition(&blocks_of(labels), labels.len()).unwrap()
}

pub fn labels_of(p: &Partition) -> Labels {
    let mut l = vec![0; p.party_count()];
    for (i, block) in p.to_vecs().iter().enumerate() {
        for &q in block {
            l[q] = i;
        }
    }
    canonical(&l)
}

/// Coarsest common refinement by exhaustive search.
pub fn brute_join(a: &[usize], b: &[usize]) -> Labels {
    let common: Vec<Labels> = all_labelings(a.len())
        .into_iter()
        .filter(|t| finer_eq(t, a) && finer_eq(t, b))
        .collect();
    common
        .iter()
        .find(|t| common.iter().all(|u| finer_eq(u, t)))
        .cloned()
        .expect("the partition lattice is complete")
}

/// Finest common coarsening by exhaustive search.
pub fn brute_meet(a: &[usize], b: &[usize]) -> Labels {
    let common: Vec<Labels> = all_labelings(a.len())
        .into_iter()
        .filter(|t| finer_eq(a, t) && finer_eq(b, t))
        .collect();
    common
        .iter()
        .find(|t| common.iter().all(|u| finer_eq(t, u)))
        .cloned()
        .expect("the partition lattice is complete")
}

/// Bell numbers from the Bell triangle.
pub fn bell_numbers(up_to: usize) -> Vec<u64> {
    let mut bells = vec![1u64];
    let mut row = vec![1u64];
    for _ in 1..=up_to {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            next.push(next.last().unwrap() + x);
        }
        bells.push(next[0]);
        row = next;
    }
    bells
}

/// `t` lies in the downward closure of `a` (is coarser than some element).
pub fn closure_oracle(a: &[Labels], t: &[usize]) -> bool {
    a.iter().any(|s| finer_eq(s, t))
}

pub fn random_labels<R: Rng>(n: usize, rng: &mut R) -> Labels {
    let f: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    canonical(&f)
}

/// Random antichain: maximal elements of a few random partitions.
pub fn random_antichain<R: Rng>(n: usize, rng: &mut R) -> PartitionAntichain {
    let k = rng.random_range(1..=4);
    let ps: Vec<Partition> = (0..k).map(|_| to_partition(&random_labels(n, rng))).collect();
    maximal_elements(&ps).unwrap()
}

pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Image of a partition under the party relabeling `q -> perm[q]`.
pub fn permute(p: &Partition, perm: &[usize]) -> Partition {
    let blocks: Vec<Vec<usize>> = p
        .to_vecs()
        .iter()
        .map(|b| b.iter().map(|&q| perm[q]).collect())
        .collect();
    make_partition(&blocks, p.party_count()).unwrap()
}

pub fn gaussian_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Qubit amplitudes of the product of one vector per block; bit `q` of a
/// basis index, counted from the most significant end, is party `q`.
pub fn product_amplitudes(n: usize, blocks: &[Vec<usize>], factors: &[Vec<Complex64>]) -> Vec<Complex64> {
    (0..1usize << n)
        .map(|index| {
            let bit = |q: usize| (index >> (n - 1 - q)) & 1;
            blocks
                .iter()
                .zip(factors)
                .map(|(b, f)| {
                    let local = b.iter().fold(0, |acc, &q| acc * 2 + bit(q));
                    f[local]
                })
                .product()
        })
        .collect()
}

/// Random mix of local, product and entangling gates on `n` parties.
pub fn random_circuit<R: Rng>(n: usize, max_gates: usize, rng: &mut R) -> Circuit {
    let len = rng.random_range(0..=max_gates);
    let gates = (0..len)
        .map(|_| {
            if n == 1 || rng.random_bool(0.2) {
                return GateOp::local(rng.random_range(0..n));
            }
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            if rng.random_bool(0.15) {
                GateOp::product(i, j).unwrap()
            } else {
                GateOp::entangling(i, j).unwrap()
            }
        })
        .collect();
    Circuit::new(n, gates).unwrap()
}

/// Edges of a uniformly random labeled tree, from a Prüfer sequence.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let last: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((last[0], last[1]));
    edges
}

fn block_total(a: &PartitionAntichain) -> usize {
    a.elements().iter().map(Partition::len).sum()
}

fn dimension(a: &PartitionAntichain) -> usize {
    a.elements().iter().map(Partition::len).max().unwrap_or(0)
}

/// Checks every step map, their composition, and that the total and maximum
/// block counts of the antichain never grow.
pub fn check_trace(trace: &EvolutionTrace) -> Result<(), String> {
    let mut composed = SimplicialMap::identity(&build_polytope(&trace.initial));
    let mut previous = &trace.initial;
    for (i, step) in trace.steps.iter().enumerate() {
        step.map.check().map_err(|e| format!("step {i}: {e}"))?;
        if step.map.source() != &build_polytope(previous) || step.map.target() != &build_polytope(&step.antichain) {
            return Err(format!("step {i}: map endpoints differ from the antichains"));
        }
        if block_total(&step.antichain) > block_total(previous) || dimension(&step.antichain) > dimension(previous) {
            return Err(format!("step {i}: block count grew"));
        }
        composed = compose(&composed, &step.map).map_err(|e| format!("step {i}: {e}"))?;
        previous = &step.antichain;
    }
    if composed != trace.composed {
        return Err("composed map differs from the composition of step maps".into());
    }
    trace.composed.check().map_err(|e| format!("composed: {e}"))
}
