//! Input document schemas and their conversion into core types.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

use super::CliError;
use crate::dynamics::{Circuit, GateKind, GateOp};
use crate::partitions::{make_partition, maximal_elements, Partition, PartitionAntichain};
use crate::quantum::families::{bell_pair, ghz, ghz_diagonal_mixture, haar_pure, random_product_mixture, w_state};
use crate::quantum::{
    tensor_pure, CMatrix, DensityMatrix, EnsembleTerm, HilbertSpec, PureState, WitnessedEnsemble,
};

/// A party given by index or by label.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PartyRef {
    Index(usize),
    Label(String),
}

/// Bijection between user labels and party indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels(Vec<String>);

impl Labels {
    pub fn default_for(n: usize) -> Labels {
        Labels((0..n).map(|i| i.to_string()).collect())
    }

    pub fn new(n: usize, labels: Option<Vec<String>>) -> Result<Labels, CliError> {
        let Some(labels) = labels else {
            return Ok(Labels::default_for(n));
        };
        if labels.len() != n {
            return Err(CliError::Validation(format!(
                "{} labels for {n} parties",
                labels.len()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(CliError::Validation("party labels are not distinct".into()));
        }
        Ok(Labels(labels))
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn resolve(&self, r: &PartyRef) -> Result<usize, CliError> {
        match r {
            PartyRef::Index(i) if *i < self.0.len() => Ok(*i),
            PartyRef::Index(i) => Err(CliError::Validation(format!(
                "party {i} out of range for {} parties",
                self.0.len()
            ))),
            PartyRef::Label(s) => self
                .0
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| CliError::Validation(format!("unknown party label {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct PartitionDoc {
    pub n: usize,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub partitions: Vec<Vec<Vec<PartyRef>>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FamilyDoc {
    pub name: String,
    #[serde(default)]
    pub params: FamilyParams,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    pub n: Option<usize>,
    pub pair: Option<[usize; 2]>,
    pub partition: Option<Vec<Vec<usize>>>,
    pub terms: Option<usize>,
    pub splits: Option<Vec<usize>>,
    pub factors: Option<Vec<Vec<[f64; 2]>>>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    #[serde(default)]
    pub ket: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub rho: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TermDoc {
    pub weight: f64,
    pub factors: Vec<FactorDoc>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct WitnessDoc {
    pub partition: Vec<Vec<usize>>,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EnsembleDoc {
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    #[serde(default)]
    pub n: Option<usize>,
    /// The first witness defines the state; the others must reassemble it.
    pub witnesses: Vec<WitnessDoc>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StateDoc {
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub family: Option<FamilyDoc>,
    #[serde(default)]
    pub ensemble: Option<EnsembleDoc>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GateDoc {
    pub targets: Vec<PartyRef>,
    pub kind: String,
    #[serde(default)]
    pub matrix: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CircuitDoc {
    pub n: usize,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub gates: Vec<GateDoc>,
}

/// Either kind of initial document.
#[derive(Debug, Clone)]
pub enum InputDoc {
    Partitions(PartitionDoc),
    State(StateDoc),
}

fn schema_error(e: serde_json::Error) -> CliError {
    CliError::Parse(e.to_string())
}

pub fn parse_input(text: &str) -> Result<InputDoc, CliError> {
    let value: Value = serde_json::from_str(text).map_err(schema_error)?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Parse("document must be a JSON object".into()))?;
    if obj.contains_key("partitions") {
        serde_json::from_value(value).map(InputDoc::Partitions).map_err(schema_error)
    } else if obj.contains_key("family") || obj.contains_key("ensemble") {
        serde_json::from_value(value).map(InputDoc::State).map_err(schema_error)
    } else {
        Err(CliError::Parse(
            "expected a partition document (\"partitions\") or a state document (\"family\" / \"ensemble\")"
                .into(),
        ))
    }
}

pub fn parse_circuit(text: &str) -> Result<CircuitDoc, CliError> {
    serde_json::from_str(text).map_err(schema_error)
}

/// Antichain of a partition document plus any warnings raised while
/// maximalizing it.
pub fn partition_doc_antichain(
    doc: &PartitionDoc,
) -> Result<(Labels, PartitionAntichain, Vec<String>), CliError> {
    let labels = Labels::new(doc.n, doc.labels.clone())?;
    if doc.partitions.is_empty() {
        return Err(CliError::Validation("no partitions given".into()));
    }
    let mut parts = Vec::with_capacity(doc.partitions.len());
    for blocks in &doc.partitions {
        let idx = blocks
            .iter()
            .map(|b| b.iter().map(|r| labels.resolve(r)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        parts.push(make_partition(&idx, doc.n).map_err(CliError::from_partition)?);
    }
    let antichain = maximal_elements(&parts).map_err(CliError::from_partition)?;
    let mut warnings = Vec::new();
    let mut distinct = parts.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != antichain.len() {
        warnings.push(format!(
            "input is not an antichain; kept {} maximal of {} distinct partitions",
            antichain.len(),
            distinct.len()
        ));
    }
    Ok((labels, antichain, warnings))
}

fn complex_of(pair: &[f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn ket_vector(amps: &[[f64; 2]]) -> Result<DVector<Complex64>, CliError> {
    let v = DVector::from_iterator(amps.len(), amps.iter().map(complex_of));
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(CliError::Validation("zero or non-finite ket".into()));
    }
    Ok(v.unscale(norm))
}

fn factor_matrix(f: &FactorDoc) -> Result<CMatrix, CliError> {
    match (&f.ket, &f.rho) {
        (Some(k), None) => {
            let v = ket_vector(k)?;
            Ok(&v * v.adjoint())
        }
        (None, Some(rows)) => {
            let d = rows.len();
            if rows.iter().any(|r| r.len() != d) {
                return Err(CliError::Validation("factor matrix is not square".into()));
            }
            Ok(CMatrix::from_fn(d, d, |i, j| complex_of(&rows[i][j])))
        }
        _ => Err(CliError::Parse("each factor needs exactly one of \"ket\" or \"rho\"".into())),
    }
}

/// A state with its attached witnesses.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub labels: Labels,
    pub rho: DensityMatrix,
    pub witnesses: Vec<WitnessedEnsemble>,
}

pub fn load_state(doc: &StateDoc, default_seed: u64) -> Result<LoadedState, CliError> {
    let (rho, witnesses) = match (&doc.family, &doc.ensemble) {
        (Some(f), None) => load_family(f, default_seed)?,
        (None, Some(e)) => load_ensemble(e)?,
        _ => {
            return Err(CliError::Parse(
                "state document needs exactly one of \"family\" or \"ensemble\"".into(),
            ))
        }
    };
    let labels = Labels::new(rho.party_count(), doc.labels.clone())?;
    Ok(LoadedState {
        labels,
        rho,
        witnesses,
    })
}

fn load_family(f: &FamilyDoc, default_seed: u64) -> Result<(DensityMatrix, Vec<WitnessedEnsemble>), CliError> {
    let p = &f.params;
    let seed = p.seed.unwrap_or(default_seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = CliError::from_quantum;
    let pure = |s: PureState| (DensityMatrix::from_pure(&s), Vec::new());
    Ok(match f.name.as_str() {
        "ghz" => pure(ghz(p.n.unwrap_or(3)).map_err(q)?),
        "w" => pure(w_state(p.n.unwrap_or(3)).map_err(q)?),
        "bell" => {
            let [i, j] = p.pair.unwrap_or([0, 1]);
            pure(bell_pair(p.n.unwrap_or(2), i, j).map_err(q)?)
        }
        "product" => {
            let n = p.n.unwrap_or_else(|| p.factors.as_ref().map_or(3, Vec::len));
            let one = HilbertSpec::qubits(1).map_err(q)?;
            let factors = match &p.factors {
                Some(fs) if fs.len() == n => fs
                    .iter()
                    .map(|k| {
                        let v = ket_vector(k)?;
                        PureState::normalized(one.clone(), v.iter().copied().collect()).map_err(q)
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                Some(fs) => {
                    return Err(CliError::Validation(format!("{} factors for {n} parties", fs.len())))
                }
                None => (0..n).map(|_| haar_pure(&one, &mut rng)).collect(),
            };
            pure(tensor_pure(&factors).map_err(q)?)
        }
        "mixture" => {
            let n = p.n.unwrap_or(3);
            if let Some(splits) = &p.splits {
                ghz_diagonal_mixture(n, splits).map_err(q)?
            } else {
                let spec = HilbertSpec::qubits(n).map_err(q)?;
                let partition = match &p.partition {
                    Some(blocks) => make_partition(blocks, n).map_err(CliError::from_partition)?,
                    None => Partition::finest(n),
                };
                let (rho, w) =
                    random_product_mixture(&spec, &partition, p.terms.unwrap_or(3), &mut rng).map_err(q)?;
                (rho, vec![w])
            }
        }
        other => return Err(CliError::Validation(format!("unknown state family {other:?}"))),
    })
}

fn load_ensemble(e: &EnsembleDoc) -> Result<(DensityMatrix, Vec<WitnessedEnsemble>), CliError> {
    let q = CliError::from_quantum;
    let dims = match (&e.dims, e.n) {
        (Some(d), _) => d.clone(),
        (None, Some(n)) => vec![2; n],
        (None, None) => return Err(CliError::Parse("ensemble needs \"dims\" or \"n\"".into())),
    };
    let spec = HilbertSpec::new(dims).map_err(q)?;
    let mut witnesses = Vec::with_capacity(e.witnesses.len());
    for w in &e.witnesses {
        let partition = make_partition(&w.partition, spec.party_count()).map_err(CliError::from_partition)?;
        let terms = w
            .terms
            .iter()
            .map(|t| {
                Ok(EnsembleTerm {
                    weight: t.weight,
                    factors: t.factors.iter().map(factor_matrix).collect::<Result<_, CliError>>()?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        witnesses.push(WitnessedEnsemble::new(spec.clone(), partition, terms).map_err(q)?);
    }
    let first = witnesses
        .first()
        .ok_or_else(|| CliError::Validation("ensemble has no witnesses".into()))?;
    let rho = crate::quantum::assemble(first);
    Ok((rho, witnesses))
}

pub fn load_circuit(doc: &CircuitDoc, labels: &Labels) -> Result<Circuit, CliError> {
    let labels = match &doc.labels {
        Some(l) => Labels::new(doc.n, Some(l.clone()))?,
        None if labels.as_slice().len() == doc.n => labels.clone(),
        None => Labels::default_for(doc.n),
    };
    let d = CliError::from_dynamics;
    let mut gates = Vec::with_capacity(doc.gates.len());
    for g in &doc.gates {
        let targets = g
            .targets
            .iter()
            .map(|t| labels.resolve(t))
            .collect::<Result<Vec<_>, _>>()?;
        let kind = match g.kind.as_str() {
            "local" => GateKind::Local1,
            "entangling" => GateKind::Entangling2,
            "product" => GateKind::Product2,
            "explicit" => {
                let m = g
                    .matrix
                    .as_ref()
                    .ok_or_else(|| CliError::Parse("explicit gate needs \"matrix\"".into()))?;
                if m.len() != 16 {
                    return Err(CliError::Validation(format!(
                        "explicit gate matrix has {} entries, expected 16",
                        m.len()
                    )));
                }
                GateKind::Explicit2(CMatrix::from_row_iterator(4, 4, m.iter().map(complex_of)))
            }
            other => return Err(CliError::Parse(format!("unknown gate kind {other:?}"))),
        };
        gates.push(GateOp::new(targets, kind).map_err(d)?);
    }
    Circuit::new(doc.n, gates).map_err(d)
}
