//! Named states, standard gates, and seeded random constructions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    assemble, CMatrix, DensityMatrix, EnsembleTerm, HilbertSpec, PureState, QuantumError, Result,
    WitnessedEnsemble,
};
use crate::partitions::{Block, Partition};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn basis_vec(dim: usize, index: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(dim);
    v[index] = c(1.0);
    v
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz(n: usize) -> Result<PureState> {
    let spec = HilbertSpec::qubits(n)?;
    let d = spec.total_dim();
    let mut amps = vec![c(0.0); d];
    amps[0] = c(FRAC_1_SQRT_2);
    amps[d - 1] = c(FRAC_1_SQRT_2);
    PureState::normalized(spec, amps)
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w_state(n: usize) -> Result<PureState> {
    let spec = HilbertSpec::qubits(n)?;
    let mut amps = vec![c(0.0); spec.total_dim()];
    for p in 0..n {
        amps[1 << (n - 1 - p)] = c(1.0);
    }
    PureState::normalized(spec, amps)
}

/// `|Φ⁺⟩` on qubits `i`, `j`; every other qubit in `|0⟩`.
pub fn bell_pair(n: usize, i: usize, j: usize) -> Result<PureState> {
    let spec = HilbertSpec::qubits(n)?;
    if i == j || i >= n || j >= n {
        return Err(QuantumError::DimMismatch(format!("bell pair ({i}, {j}) on {n} qubits")));
    }
    let mut amps = vec![c(0.0); spec.total_dim()];
    amps[0] = c(FRAC_1_SQRT_2);
    amps[(1 << (n - 1 - i)) | (1 << (n - 1 - j))] = c(FRAC_1_SQRT_2);
    PureState::normalized(spec, amps)
}

/// `p |Ψ⁻⟩⟨Ψ⁻| + (1 − p) I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    let spec = HilbertSpec::qubits(2)?;
    let mut psi = DVector::zeros(4);
    psi[0b01] = c(FRAC_1_SQRT_2);
    psi[0b10] = c(-FRAC_1_SQRT_2);
    let m = (&psi * psi.adjoint()).scale(p) + CMatrix::identity(4, 4).scale((1.0 - p) / 4.0);
    DensityMatrix::new(spec, m)
}

pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(r, col)] = c(1.0);
    }
    m
}

pub fn swap() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, col)] = c(1.0);
    }
    m
}

/// Haar-random pure state: a normalized complex Gaussian vector.
pub fn haar_pure<R: Rng + ?Sized>(spec: &HilbertSpec, rng: &mut R) -> PureState {
    let amps: Vec<Complex64> = (0..spec.total_dim())
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(spec.clone(), amps).expect("gaussian vector is nonzero")
}

/// Haar-random state whose reduced state on every nonempty proper subset of
/// parties has purity at most `1 - margin` (rejection sampling).
pub fn haar_entangled<R: Rng + ?Sized>(spec: &HilbertSpec, margin: f64, rng: &mut R) -> PureState {
    let n = spec.party_count();
    loop {
        let psi = haar_pure(spec, rng);
        let mixed = (1u64..(1 << n) - 1).all(|mask| {
            let b = Block::from_mask(mask).expect("nonzero");
            psi.reduced_purity(b) <= 1.0 - margin
        });
        if n == 1 || mixed {
            return psi;
        }
    }
}

/// Random convex mixture of `terms` Haar-random products over `partition`,
/// together with the ensemble that witnesses it.
pub fn random_product_mixture<R: Rng + ?Sized>(
    spec: &HilbertSpec,
    partition: &Partition,
    terms: usize,
    rng: &mut R,
) -> Result<(DensityMatrix, WitnessedEnsemble)> {
    let terms = terms.max(1);
    let raw: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let ensemble_terms = raw
        .iter()
        .map(|w| {
            let factors: Vec<DVector<Complex64>> = partition
                .blocks()
                .iter()
                .map(|b| {
                    let sub = HilbertSpec::new(b.members().map(|p| spec.dims()[p]).collect())
                        .expect("sub-spec of a valid spec");
                    haar_pure(&sub, rng).amplitudes().clone()
                })
                .collect();
            EnsembleTerm::pure(w / total, &factors)
        })
        .collect();
    let witness = WitnessedEnsemble::new(spec.clone(), partition.clone(), ensemble_terms)?;
    Ok((assemble(&witness), witness))
}

/// GHZ-diagonal qubit mixture that is separable across exactly the cuts
/// `{p} | rest` for `p` in `splits`, with a constructive witness per cut.
///
/// The state is `2λ |GHZ⟩⟨GHZ| + λ Σ_{p ∈ splits} (|e_p⟩⟨e_p| + |ē_p⟩⟨ē_p|)`
/// where `e_p` has only bit `p` set and `λ = 1 / (2 + 2|splits|)`. Transposing
/// party `p` moves the GHZ coherence onto the `(e_p, ē_p)` block, so cuts
/// outside `splits` have partial-transpose eigenvalue `-λ`.
pub fn ghz_diagonal_mixture(n: usize, splits: &[usize]) -> Result<(DensityMatrix, Vec<WitnessedEnsemble>)> {
    let spec = HilbertSpec::qubits(n)?;
    let mut splits = splits.to_vec();
    splits.sort_unstable();
    splits.dedup();
    if n < 2 || splits.iter().any(|&p| p >= n) {
        return Err(QuantumError::DimMismatch(format!("splits {splits:?} on {n} qubits")));
    }
    let d = spec.total_dim();
    let all = d - 1;
    let lambda = 1.0 / (2.0 + 2.0 * splits.len() as f64);
    let bit = |p: usize| 1usize << (n - 1 - p);

    let ghz_state = ghz(n)?;
    let mut m = ghz_state.projector().scale(2.0 * lambda);
    for &p in &splits {
        m[(bit(p), bit(p))] += c(lambda);
        m[(all ^ bit(p), all ^ bit(p))] += c(lambda);
    }
    let rho = DensityMatrix::new(spec.clone(), m)?;

    let mut witnesses = Vec::new();
    for &p in &splits {
        let single = Block::singleton(p);
        let rest = Block::from_mask(((1u64 << n) - 1) & !single.mask()).expect("n >= 2");
        let partition = Partition::from_blocks(n, vec![single, rest])?;
        let rest_dim = 1 << (n - 1);
        // factors in the partition's block order
        let order = |single_ket: DVector<Complex64>, rest_ket: DVector<Complex64>| {
            if partition.blocks()[0] == single {
                vec![single_ket, rest_ket]
            } else {
                vec![rest_ket, single_ket]
            }
        };
        let mut terms = Vec::new();
        for k in 0..4 {
            let phase = Complex64::from_polar(1.0, k as f64 * PI / 2.0);
            let mut a = DVector::zeros(2);
            a[0] = c(FRAC_1_SQRT_2);
            a[1] = phase * FRAC_1_SQRT_2;
            let mut b = DVector::zeros(rest_dim);
            b[0] = c(FRAC_1_SQRT_2);
            b[rest_dim - 1] = phase.conj() * FRAC_1_SQRT_2;
            terms.push(EnsembleTerm::pure(lambda, &order(a, b)));
        }
        // remaining diagonal pairs are computational basis products
        let rest_index = |full: usize| {
            rest.members()
                .fold(0usize, |acc, q| (acc << 1) | ((full >> (n - 1 - q)) & 1))
        };
        for &q in splits.iter().filter(|&&q| q != p) {
            for full in [bit(q), all ^ bit(q)] {
                let a = basis_vec(2, (full >> (n - 1 - p)) & 1);
                let b = basis_vec(rest_dim, rest_index(full));
                terms.push(EnsembleTerm::pure(lambda, &order(a, b)));
            }
        }
        witnesses.push(WitnessedEnsemble::new(spec.clone(), partition, terms)?);
    }
    Ok((rho, witnesses))
}
