//! Small dense density-matrix toolkit: tensor products, partial trace and
//! transpose, PPT tests, pure-state factorization, witnessed ensembles and
//! three-valued separability profiles.
//!
//! Tensor factors are always laid out in ascending party order, party 0
//! being the most significant digit of a basis index.

pub mod families;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::partitions::{
    enumerate_partitions, maximal_elements, Block, Partition, PartitionAntichain, PartitionError,
};

/// Largest total Hilbert-space dimension handled.
pub const MAX_TOTAL_DIM: usize = 64;
/// Largest party count for [`compute_profile`].
pub const PROFILE_PARTY_LIMIT: usize = 5;
/// Default threshold for PPT and factorization decisions.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Hermiticity, trace and normalization tolerance.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Lowest eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Max-norm distance within which a witness must reassemble the state.
pub const WITNESS_TOL: f64 = 1e-9;
/// Max-norm deviation of `U U†` from the identity accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-9;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("invalid local dimensions {0:?}")]
    InvalidDims(Vec<usize>),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("state norm {0} is not 1")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace {0} is not 1")]
    TraceError(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("ensemble weights invalid (sum {0})")]
    WeightError(f64),
    #[error("empty keep set")]
    EmptyKeepSet,
    #[error("subset {0:?} is not a nonempty proper subset of the parties")]
    BadSubset(Vec<usize>),
    #[error("witness {index} deviates from the state by {deviation:e}")]
    WitnessMismatch { index: usize, deviation: f64 },
    #[error("{parties} parties exceeds the profile guard of {limit}")]
    GuardExceeded { parties: usize, limit: usize },
    #[error("partition {0} is both witnessed separable and NPT")]
    InconsistentCertificates(Partition),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

pub type Result<T> = std::result::Result<T, QuantumError>;

/// Per-party local dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    dims: Vec<usize>,
}

impl HilbertSpec {
    pub fn new(dims: Vec<usize>) -> Result<HilbertSpec> {
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match total {
            Some(t) if !dims.is_empty() && dims.iter().all(|&d| d >= 2) && t <= MAX_TOTAL_DIM => {
                Ok(HilbertSpec { dims })
            }
            _ => Err(QuantumError::InvalidDims(dims)),
        }
    }

    pub fn qubits(n: usize) -> Result<HilbertSpec> {
        HilbertSpec::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Dimension of the parties in `block`.
    pub fn block_dim(&self, block: Block) -> usize {
        block.members().map(|p| self.dims[p]).product()
    }

    fn sub(&self, block: Block) -> HilbertSpec {
        HilbertSpec {
            dims: block.members().map(|p| self.dims[p]).collect(),
        }
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Splits a full basis index into (index within `block`, index within
    /// the complement).
    fn split(&self, index: usize, block: Block) -> (usize, usize) {
        let digits = self.digits(index);
        let (mut inside, mut outside) = (0, 0);
        for (p, (&x, &d)) in digits.iter().zip(&self.dims).enumerate() {
            if block.contains(p) {
                inside = inside * d + x;
            } else {
                outside = outside * d + x;
            }
        }
        (inside, outside)
    }

    fn check_subset(&self, block: Block) -> Result<()> {
        if block.members().any(|p| p >= self.party_count()) {
            return Err(QuantumError::BadSubset(block.to_vec()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    spec: HilbertSpec,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Requires unit norm within [`STRUCTURE_TOL`].
    pub fn new(spec: HilbertSpec, amplitudes: Vec<Complex64>) -> Result<PureState> {
        if amplitudes.len() != spec.total_dim() {
            return Err(QuantumError::DimMismatch(format!(
                "{} amplitudes for dimension {}",
                amplitudes.len(),
                spec.total_dim()
            )));
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(PureState { spec, amplitudes: v })
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(spec: HilbertSpec, amplitudes: Vec<Complex64>) -> Result<PureState> {
        let norm = DVector::from_vec(amplitudes.clone()).norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QuantumError::NotNormalized(norm));
        }
        PureState::new(spec, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state from per-party digits.
    pub fn basis(spec: HilbertSpec, digits: &[usize]) -> Result<PureState> {
        if digits.len() != spec.party_count() || digits.iter().zip(spec.dims()).any(|(x, d)| x >= d) {
            return Err(QuantumError::DimMismatch(format!("basis digits {digits:?}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); spec.total_dim()];
        amps[spec.index_of(digits)] = Complex64::new(1.0, 0.0);
        PureState::new(spec, amps)
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// `Tr[ρ_σ²]` for the reduced state on `block`.
    pub fn reduced_purity(&self, block: Block) -> f64 {
        let rows = self.spec.block_dim(block);
        let cols = self.spec.total_dim() / rows;
        let mut m = CMatrix::zeros(rows, cols);
        for (k, a) in self.amplitudes.iter().enumerate() {
            let (i, j) = self.spec.split(k, block);
            m[(i, j)] = *a;
        }
        let reduced = &m * m.adjoint();
        reduced.iter().map(|z| z.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    spec: HilbertSpec,
    matrix: CMatrix,
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(h).eigenvalues.min()
}

/// Validates Hermiticity, unit trace and positivity.
fn check_density(m: &CMatrix) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > STRUCTURE_TOL {
        return Err(QuantumError::NotHermitian(dev));
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > STRUCTURE_TOL {
        return Err(QuantumError::TraceError(tr));
    }
    let low = min_eigenvalue(m);
    if low < -PSD_TOL {
        return Err(QuantumError::NotPsd(low));
    }
    Ok(())
}

impl DensityMatrix {
    pub fn new(spec: HilbertSpec, matrix: CMatrix) -> Result<DensityMatrix> {
        let d = spec.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QuantumError::DimMismatch(format!(
                "{}x{} matrix for dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_density(&matrix)?;
        Ok(DensityMatrix { spec, matrix })
    }

    pub fn from_pure(psi: &PureState) -> DensityMatrix {
        DensityMatrix {
            spec: psi.spec.clone(),
            matrix: psi.projector(),
        }
    }

    pub fn maximally_mixed(spec: HilbertSpec) -> DensityMatrix {
        let d = spec.total_dim();
        DensityMatrix {
            spec,
            matrix: CMatrix::identity(d, d).scale(1.0 / d as f64),
        }
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn party_count(&self) -> usize {
        self.spec.party_count()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Max-norm distance between two matrices of equal shape.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Dominant eigenvector, when the state is pure within `tol`.
    pub fn as_pure(&self, tol: f64) -> Option<PureState> {
        if self.purity() < 1.0 - tol {
            return None;
        }
        let eig = SymmetricEigen::new(self.matrix.clone());
        let top = eig.eigenvalues.imax();
        let v: Vec<Complex64> = eig.eigenvectors.column(top).iter().copied().collect();
        PureState::normalized(self.spec.clone(), v).ok()
    }
}

pub fn tensor_pure(factors: &[PureState]) -> Result<PureState> {
    let first = factors
        .first()
        .ok_or_else(|| QuantumError::DimMismatch("no factors".into()))?;
    let mut dims = first.spec.dims.clone();
    let mut amps = first.amplitudes.clone();
    for f in &factors[1..] {
        dims.extend_from_slice(&f.spec.dims);
        amps = amps.kronecker(&f.amplitudes);
    }
    let spec = HilbertSpec::new(dims.clone()).map_err(|_| {
        QuantumError::DimMismatch(format!("product dimensions {dims:?} exceed the guard"))
    })?;
    PureState::normalized(spec, amps.iter().copied().collect())
}

/// Rearranges a matrix whose tensor factors follow `order` (a permutation of
/// the parties) into ascending party order.
fn to_party_order(spec: &HilbertSpec, order: &[usize], m: &CMatrix) -> CMatrix {
    let permuted = HilbertSpec {
        dims: order.iter().map(|&p| spec.dims[p]).collect(),
    };
    let d = spec.total_dim();
    let position: Vec<usize> = (0..d)
        .map(|k| {
            let digits = spec.digits(k);
            let reordered: Vec<usize> = order.iter().map(|&p| digits[p]).collect();
            permuted.index_of(&reordered)
        })
        .collect();
    CMatrix::from_fn(d, d, |i, j| m[(position[i], position[j])])
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTerm {
    pub weight: f64,
    /// One density matrix per block, in the partition's block order.
    pub factors: Vec<CMatrix>,
}

impl EnsembleTerm {
    pub fn pure(weight: f64, factors: &[DVector<Complex64>]) -> EnsembleTerm {
        EnsembleTerm {
            weight,
            factors: factors.iter().map(|v| v * v.adjoint()).collect(),
        }
    }
}

/// An explicit convex decomposition into products over a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessedEnsemble {
    spec: HilbertSpec,
    partition: Partition,
    terms: Vec<EnsembleTerm>,
}

impl WitnessedEnsemble {
    pub fn new(spec: HilbertSpec, partition: Partition, terms: Vec<EnsembleTerm>) -> Result<Self> {
        if partition.party_count() != spec.party_count() {
            return Err(QuantumError::DimMismatch(format!(
                "partition over {} parties, spec over {}",
                partition.party_count(),
                spec.party_count()
            )));
        }
        let sum: f64 = terms.iter().map(|t| t.weight).sum();
        if terms.is_empty() || terms.iter().any(|t| !t.weight.is_finite() || t.weight < 0.0) || (sum - 1.0).abs() > STRUCTURE_TOL {
            return Err(QuantumError::WeightError(sum));
        }
        for t in &terms {
            if t.factors.len() != partition.len() {
                return Err(QuantumError::DimMismatch(format!(
                    "{} factors for {} blocks",
                    t.factors.len(),
                    partition.len()
                )));
            }
            for (f, b) in t.factors.iter().zip(partition.blocks()) {
                let d = spec.block_dim(*b);
                if f.nrows() != d || f.ncols() != d {
                    return Err(QuantumError::DimMismatch(format!(
                        "factor for block {b} is {}x{}, expected {d}",
                        f.nrows(),
                        f.ncols()
                    )));
                }
                check_density(f)?;
            }
        }
        Ok(WitnessedEnsemble { spec, partition, terms })
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn terms(&self) -> &[EnsembleTerm] {
        &self.terms
    }
}

/// `Σ_α p_α ⊗_i ρ^α_i`, with block factors moved into party order.
pub fn assemble(e: &WitnessedEnsemble) -> DensityMatrix {
    let order: Vec<usize> = e
        .partition
        .blocks()
        .iter()
        .flat_map(|b| b.members())
        .collect();
    let d = e.spec.total_dim();
    let mut acc = CMatrix::zeros(d, d);
    for t in &e.terms {
        let product = t.factors[1..]
            .iter()
            .fold(t.factors[0].clone(), |m, f| m.kronecker(f));
        acc += product.scale(t.weight);
    }
    DensityMatrix {
        spec: e.spec.clone(),
        matrix: to_party_order(&e.spec, &order, &acc),
    }
}

/// Reduced state on the parties in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Block) -> Result<DensityMatrix> {
    rho.spec.check_subset(keep)?;
    let spec = rho.spec.sub(keep);
    let k = spec.total_dim();
    let d = rho.spec.total_dim();
    let split: Vec<(usize, usize)> = (0..d).map(|i| rho.spec.split(i, keep)).collect();
    let mut out = CMatrix::zeros(k, k);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho.matrix[(i, j)];
            }
        }
    }
    Ok(DensityMatrix { spec, matrix: out })
}

/// Keeps `keep` parties, given as a possibly empty index list.
pub fn partial_trace_parties(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let block = Block::from_parties(keep.iter().copied()).ok_or(QuantumError::EmptyKeepSet)?;
    partial_trace(rho, block)
}

fn check_cut(spec: &HilbertSpec, side: Block) -> Result<()> {
    spec.check_subset(side)?;
    if side.len() >= spec.party_count() {
        return Err(QuantumError::BadSubset(side.to_vec()));
    }
    Ok(())
}

/// Transpose on the tensor indices of the parties in `side`.
pub fn partial_transpose(rho: &DensityMatrix, side: Block) -> Result<CMatrix> {
    check_cut(&rho.spec, side)?;
    Ok(transpose_parties(&rho.spec, &rho.matrix, side))
}

/// Like [`partial_transpose`], with an index list (empty lists are rejected).
pub fn partial_transpose_parties(rho: &DensityMatrix, side: &[usize]) -> Result<CMatrix> {
    let block = Block::from_parties(side.iter().copied())
        .ok_or_else(|| QuantumError::BadSubset(side.to_vec()))?;
    partial_transpose(rho, block)
}

fn transpose_parties(spec: &HilbertSpec, m: &CMatrix, side: Block) -> CMatrix {
    let d = spec.total_dim();
    let digits: Vec<Vec<usize>> = (0..d).map(|i| spec.digits(i)).collect();
    let mut out = CMatrix::zeros(d, d);
    let mut row = vec![0; spec.party_count()];
    let mut col = vec![0; spec.party_count()];
    for i in 0..d {
        for j in 0..d {
            for p in 0..spec.party_count() {
                let (a, b) = (digits[i][p], digits[j][p]);
                if side.contains(p) {
                    row[p] = b;
                    col[p] = a;
                } else {
                    row[p] = a;
                    col[p] = b;
                }
            }
            out[(spec.index_of(&row), spec.index_of(&col))] = m[(i, j)];
        }
    }
    out
}

/// Minimum eigenvalue of the partial transpose across `side | rest`.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix, side: Block) -> Result<f64> {
    Ok(min_eigenvalue(&partial_transpose(rho, side)?))
}

pub fn is_npt(rho: &DensityMatrix, side: Block, tol: f64) -> Result<bool> {
    Ok(ppt_min_eigenvalue(rho, side)? < -tol)
}

fn subsets_of_size(members: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if members.len() < size {
        return Vec::new();
    }
    let (head, tail) = (members[0], &members[1..]);
    let mut out: Vec<Vec<usize>> = subsets_of_size(tail, size - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, head);
            s
        })
        .collect();
    out.extend(subsets_of_size(tail, size));
    out
}

/// Finest partition over whose blocks `psi` is a product.
///
/// Blocks are peeled off one at a time: the block holding the lowest
/// remaining party is the smallest subset containing it whose reduced state
/// has purity at least `1 - tol`.
pub fn pure_factorization(psi: &PureState, tol: f64) -> Partition {
    let n = psi.spec.party_count();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut blocks = Vec::new();
    while let Some(&anchor) = remaining.first() {
        let others = &remaining[1..];
        let found = (0..=others.len()).find_map(|k| {
            subsets_of_size(others, k).into_iter().find_map(|extra| {
                let block = Block::from_parties(std::iter::once(anchor).chain(extra)).unwrap();
                (block.len() == remaining.len() || psi.reduced_purity(block) >= 1.0 - tol)
                    .then_some(block)
            })
        });
        let block = found.expect("the full remainder always qualifies");
        remaining.retain(|p| !block.contains(*p));
        blocks.push(block);
    }
    Partition::from_blocks(n, blocks).expect("peeled blocks partition the parties")
}

/// Why a partition is certified separable.
#[derive(Debug, Clone, PartialEq)]
pub enum SeparabilityWitness {
    /// Every state is separable with respect to the one-block partition.
    OneBlock,
    /// Witness `index` lives on a partition refining the target.
    Ensemble { index: usize, partition: Partition },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeparabilityVerdict {
    SeparableCertified(SeparabilityWitness),
    /// Partial transpose across `side | rest` has eigenvalue `min_eigenvalue < -tol`.
    EntangledCertified { side: Block, min_eigenvalue: f64 },
    Unknown,
}

impl SeparabilityVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, SeparabilityVerdict::SeparableCertified(_))
    }

    pub fn is_entangled(&self) -> bool {
        matches!(self, SeparabilityVerdict::EntangledCertified { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            SeparabilityVerdict::SeparableCertified(_) => "separable",
            SeparabilityVerdict::EntangledCertified { .. } => "entangled",
            SeparabilityVerdict::Unknown => "unknown",
        }
    }
}

fn check_witnesses(rho: &DensityMatrix, witnesses: &[WitnessedEnsemble]) -> Result<()> {
    for (index, w) in witnesses.iter().enumerate() {
        if w.spec != rho.spec {
            return Err(QuantumError::WitnessMismatch {
                index,
                deviation: f64::INFINITY,
            });
        }
        let deviation = assemble(w).distance(rho);
        if deviation > WITNESS_TOL {
            return Err(QuantumError::WitnessMismatch { index, deviation });
        }
    }
    Ok(())
}

fn separable_certificate(s: &Partition, witnesses: &[WitnessedEnsemble]) -> Option<SeparabilityWitness> {
    if s.len() == 1 {
        return Some(SeparabilityWitness::OneBlock);
    }
    witnesses
        .iter()
        .enumerate()
        .find(|(_, w)| w.partition.refines(s))
        .map(|(index, w)| SeparabilityWitness::Ensemble {
            index,
            partition: w.partition.clone(),
        })
}

/// Decides separability with respect to `s` where a certificate exists.
pub fn sigma_verdict(
    rho: &DensityMatrix,
    s: &Partition,
    witnesses: &[WitnessedEnsemble],
    tol: f64,
) -> Result<SeparabilityVerdict> {
    if s.party_count() != rho.party_count() {
        return Err(PartitionError::MismatchedPartySet(rho.party_count(), s.party_count()).into());
    }
    check_witnesses(rho, witnesses)?;
    if let Some(w) = separable_certificate(s, witnesses) {
        return Ok(SeparabilityVerdict::SeparableCertified(w));
    }
    for side in s.bipartition_coarsenings() {
        let low = ppt_min_eigenvalue(rho, side)?;
        if low < -tol {
            return Ok(SeparabilityVerdict::EntangledCertified {
                side,
                min_eigenvalue: low,
            });
        }
    }
    Ok(SeparabilityVerdict::Unknown)
}

/// Verdicts over the whole partition lattice of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityProfile {
    /// One entry per partition, in enumeration order.
    pub verdicts: Vec<(Partition, SeparabilityVerdict)>,
    pub certified_maximal: PartitionAntichain,
    pub unknown: Vec<Partition>,
    /// Finest product partition when the state was recognized as pure.
    pub pure_factorization: Option<Partition>,
}

impl SeparabilityProfile {
    pub fn verdict(&self, s: &Partition) -> Option<&SeparabilityVerdict> {
        self.verdicts.iter().find(|(p, _)| p == s).map(|(_, v)| v)
    }
}

/// Witness for a pure product state: a single term of reduced block states.
fn pure_witness(rho: &DensityMatrix, partition: &Partition) -> Result<WitnessedEnsemble> {
    let factors = partition
        .blocks()
        .iter()
        .map(|b| partial_trace(rho, *b).map(|r| r.matrix))
        .collect::<Result<Vec<_>>>()?;
    WitnessedEnsemble::new(
        rho.spec.clone(),
        partition.clone(),
        vec![EnsembleTerm { weight: 1.0, factors }],
    )
}

pub fn compute_profile(
    rho: &DensityMatrix,
    witnesses: &[WitnessedEnsemble],
    tol: f64,
) -> Result<SeparabilityProfile> {
    compute_profile_with(rho, witnesses, tol, Execution::default())
}

/// [`compute_profile`] with an explicit execution strategy. The result does
/// not depend on `exec`.
pub fn compute_profile_with(
    rho: &DensityMatrix,
    witnesses: &[WitnessedEnsemble],
    tol: f64,
    exec: Execution,
) -> Result<SeparabilityProfile> {
    let n = rho.party_count();
    if n > PROFILE_PARTY_LIMIT {
        return Err(QuantumError::GuardExceeded {
            parties: n,
            limit: PROFILE_PARTY_LIMIT,
        });
    }
    check_witnesses(rho, witnesses)?;
    let mut witnesses = witnesses.to_vec();

    let pure = rho.as_pure(tol).map(|psi| pure_factorization(&psi, tol));
    if let Some(p) = &pure {
        if p.len() > 1 {
            if let Ok(w) = pure_witness(rho, p) {
                if assemble(&w).distance(rho) <= WITNESS_TOL {
                    witnesses.push(w);
                }
            }
        }
    }

    // every two-group cut once, keyed by the side avoiding party 0
    let cuts: Vec<Block> = Partition::finest(n).bipartition_coarsenings();
    let cut_eigs: Vec<f64> = exec::map(exec, &cuts, |side| {
        min_eigenvalue(&transpose_parties(&rho.spec, &rho.matrix, *side))
    });
    let npt_at = |side: Block| {
        let key = if side.contains(0) {
            Block::from_mask(side.mask() ^ full(n)).expect("proper cut")
        } else {
            side
        };
        let i = cuts.iter().position(|c| *c == key).expect("cut enumerated");
        (cut_eigs[i] < -tol).then_some((key, cut_eigs[i]))
    };

    let all: Vec<Partition> = enumerate_partitions(n)?.collect();
    let raw = exec::map(exec, &all, |s| {
        let sep = separable_certificate(s, &witnesses);
        let ent = s.bipartition_coarsenings().into_iter().find_map(npt_at);
        (sep, ent)
    });

    let mut verdicts = Vec::with_capacity(all.len());
    for (s, (sep, ent)) in all.iter().zip(&raw) {
        let v = match (sep, ent) {
            (Some(_), Some(_)) => return Err(QuantumError::InconsistentCertificates(s.clone())),
            (Some(w), None) => SeparabilityVerdict::SeparableCertified(w.clone()),
            (None, Some((side, low))) => SeparabilityVerdict::EntangledCertified {
                side: *side,
                min_eigenvalue: *low,
            },
            (None, None) => SeparabilityVerdict::Unknown,
        };
        verdicts.push((s.clone(), v));
    }

    // closure pass: separability flows to coarser partitions, NPT to finer ones
    let snapshot = verdicts.clone();
    for (s, v) in verdicts.iter_mut() {
        let inherit_sep = snapshot
            .iter()
            .find(|(t, tv)| tv.is_separable() && t.refines(s))
            .map(|(_, tv)| tv.clone());
        let inherit_ent = snapshot
            .iter()
            .find(|(t, tv)| tv.is_entangled() && s.refines(t))
            .map(|(_, tv)| tv.clone());
        match (inherit_sep, inherit_ent) {
            (Some(_), Some(_)) => return Err(QuantumError::InconsistentCertificates(s.clone())),
            (Some(sep), None) if !v.is_separable() => *v = sep,
            (None, Some(ent)) if !v.is_entangled() => *v = ent,
            _ => {}
        }
    }

    let separable: Vec<&Partition> = verdicts
        .iter()
        .filter(|(_, v)| v.is_separable())
        .map(|(p, _)| p)
        .collect();
    let certified_maximal = maximal_elements(separable)?;
    let unknown = verdicts
        .iter()
        .filter(|(_, v)| matches!(v, SeparabilityVerdict::Unknown))
        .map(|(p, _)| p.clone())
        .collect();
    Ok(SeparabilityProfile {
        verdicts,
        certified_maximal,
        unknown,
        pure_factorization: pure,
    })
}

fn full(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

/// Number of operator-Schmidt terms of a two-party unitary with local
/// dimensions `dims`; 1 exactly for product gates `A ⊗ B`.
pub fn operator_schmidt_rank(u: &CMatrix, dims: (usize, usize), tol: f64) -> Result<usize> {
    let (d1, d2) = dims;
    let d = d1 * d2;
    if u.nrows() != d || u.ncols() != d {
        return Err(QuantumError::DimMismatch(format!(
            "{}x{} operator for local dimensions {d1}x{d2}",
            u.nrows(),
            u.ncols()
        )));
    }
    let dev = max_abs(&(u * u.adjoint() - CMatrix::identity(d, d)));
    if dev > UNITARY_TOL {
        return Err(QuantumError::NotUnitary(dev));
    }
    // R[(i1 j1), (i2 j2)] = U[(i1 i2), (j1 j2)]
    let r = CMatrix::from_fn(d1 * d1, d2 * d2, |row, col| {
        let (i1, j1) = (row / d1, row % d1);
        let (i2, j2) = (col / d2, col % d2);
        u[(i1 * d2 + i2, j1 * d2 + j2)]
    });
    let svd = SVD::new(r, false, false);
    Ok(svd.singular_values.iter().filter(|s| **s > tol).count())
}
