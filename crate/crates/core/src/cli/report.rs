//! JSON report shapes. Field order is fixed by declaration order.

use serde::Serialize;

use crate::classify::{classify_three, polytope_signature, relloc_partition, PolytopeSignature};
use crate::complex::{build_polytope, connected_components, f_vector, is_single_simplex, SimplicialComplex, SimplicialMap};
use crate::dynamics::{EvolutionTrace, TraceStep};
use crate::partitions::{Block, Partition, PartitionAntichain};
use crate::quantum::{SeparabilityProfile, SeparabilityVerdict, SeparabilityWitness};

pub type BlockJson = Vec<usize>;
pub type PartitionJson = Vec<BlockJson>;

fn partitions_json(ps: &[Partition]) -> Vec<PartitionJson> {
    ps.iter().map(Partition::to_vecs).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub partition: PartitionJson,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<BlockJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
}

impl VerdictReport {
    fn new(p: &Partition, v: &SeparabilityVerdict) -> VerdictReport {
        let mut r = VerdictReport {
            partition: p.to_vecs(),
            verdict: v.label(),
            witness: None,
            cut: None,
            min_eigenvalue: None,
        };
        match v {
            SeparabilityVerdict::SeparableCertified(SeparabilityWitness::Ensemble { index, .. }) => {
                r.witness = Some(*index)
            }
            SeparabilityVerdict::EntangledCertified { side, min_eigenvalue } => {
                r.cut = Some(side.to_vec());
                r.min_eigenvalue = Some(*min_eigenvalue);
            }
            _ => {}
        }
        r
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub verdicts: Vec<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pure_factorization: Option<PartitionJson>,
}

impl ProfileReport {
    pub fn new(p: &SeparabilityProfile) -> ProfileReport {
        ProfileReport {
            verdicts: p.verdicts.iter().map(|(s, v)| VerdictReport::new(s, v)).collect(),
            pure_factorization: p.pure_factorization.as_ref().map(Partition::to_vecs),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PolytopeReport {
    pub n: usize,
    pub labels: Vec<String>,
    pub vertices: Vec<BlockJson>,
    /// Maximal simplices, each written as the partition it comes from.
    pub partitions: Vec<PartitionJson>,
    pub f_vector: Vec<u64>,
    pub components: usize,
    pub single_simplex: bool,
    pub relloc: PartitionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<&'static str>,
    pub unknown: Vec<PartitionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileReport>,
    pub warnings: Vec<String>,
}

impl PolytopeReport {
    pub fn new(
        labels: &[String],
        a: &PartitionAntichain,
        profile: Option<&SeparabilityProfile>,
        mut warnings: Vec<String>,
    ) -> PolytopeReport {
        let k = build_polytope(a);
        let unknown = profile.map_or_else(Vec::new, |p| partitions_json(&p.unknown));
        let class = (a.party_count() == 3)
            .then(|| classify_three(a).ok().map(|c| c.name()))
            .flatten();
        if class.is_some() && !unknown.is_empty() {
            warnings.push(class_caveat(unknown.len()));
        }
        PolytopeReport {
            n: a.party_count(),
            labels: labels.to_vec(),
            vertices: k.vertices().iter().map(|b| b.to_vec()).collect(),
            partitions: partitions_json(a.elements()),
            f_vector: f_vector(&k).0,
            components: connected_components(&k),
            single_simplex: is_single_simplex(&k),
            relloc: relloc_partition(a).expect("antichains are non-empty").to_vecs(),
            class,
            unknown,
            profile: profile.map(ProfileReport::new),
            warnings,
        }
    }
}

fn class_caveat(undecided: usize) -> String {
    format!("class is from certified partitions only; {undecided} partition(s) undecided")
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub n: usize,
    pub labels: Vec<String>,
    pub class: &'static str,
    pub splits: Vec<usize>,
    pub signature: PolytopeSignature,
    pub unknown: Vec<PartitionJson>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapEntry {
    pub from: BlockJson,
    pub to: BlockJson,
}

fn map_json(m: &SimplicialMap) -> Vec<MapEntry> {
    m.table()
        .iter()
        .map(|(a, b)| MapEntry {
            from: a.to_vec(),
            to: b.to_vec(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GateReport {
    pub targets: Vec<usize>,
    pub kind: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct MergeReport {
    pub partition: PartitionJson,
    pub blocks: [BlockJson; 2],
    pub into: BlockJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentificationReport {
    pub vertex: BlockJson,
    pub sources: Vec<BlockJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub gate: GateReport,
    pub changed: bool,
    pub before: Vec<PartitionJson>,
    pub after: Vec<PartitionJson>,
    pub vertex_map: Vec<MapEntry>,
    pub merges: Vec<MergeReport>,
    pub identifications: Vec<IdentificationReport>,
    pub squeezed: Vec<Vec<BlockJson>>,
}

fn blocks_json(bs: &[Block]) -> Vec<BlockJson> {
    bs.iter().map(|b| b.to_vec()).collect()
}

fn complex_partitions(k: &SimplicialComplex) -> Vec<PartitionJson> {
    partitions_json(&k.partitions())
}

impl StepReport {
    fn new(index: usize, s: &TraceStep) -> StepReport {
        StepReport {
            index,
            gate: GateReport {
                targets: s.gate.targets().to_vec(),
                kind: s.gate.kind().name(),
            },
            changed: s.changed,
            before: complex_partitions(&s.before),
            after: complex_partitions(&s.after),
            vertex_map: map_json(&s.map),
            merges: s
                .merges
                .iter()
                .map(|m| MergeReport {
                    partition: m.partition.to_vecs(),
                    blocks: [m.blocks.0.to_vec(), m.blocks.1.to_vec()],
                    into: m.into.to_vec(),
                })
                .collect(),
            identifications: s
                .identifications
                .iter()
                .map(|i| IdentificationReport {
                    vertex: i.vertex.to_vec(),
                    sources: blocks_json(&i.sources),
                })
                .collect(),
            squeezed: s.squeezed.iter().map(|c| blocks_json(c)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveReport {
    pub n: usize,
    pub labels: Vec<String>,
    pub initial: Vec<PartitionJson>,
    pub unknown: Vec<PartitionJson>,
    pub steps: Vec<StepReport>,
    pub composed: Vec<MapEntry>,
    #[serde(rename = "final")]
    pub final_partitions: Vec<PartitionJson>,
    pub fixed_point_index: Option<usize>,
    pub warnings: Vec<String>,
}

impl EvolveReport {
    pub fn new(
        labels: &[String],
        trace: &EvolutionTrace,
        profile: Option<&SeparabilityProfile>,
        warnings: Vec<String>,
    ) -> EvolveReport {
        EvolveReport {
            n: trace.initial.party_count(),
            labels: labels.to_vec(),
            initial: partitions_json(trace.initial.elements()),
            unknown: profile.map_or_else(Vec::new, |p| partitions_json(&p.unknown)),
            steps: trace.steps.iter().enumerate().map(|(i, s)| StepReport::new(i, s)).collect(),
            composed: map_json(&trace.composed),
            final_partitions: partitions_json(trace.final_antichain().elements()),
            fixed_point_index: trace.fixed_point_index,
            warnings,
        }
    }
}

pub fn classify_report(
    labels: &[String],
    a: &PartitionAntichain,
    unknown: &[Partition],
    mut warnings: Vec<String>,
) -> Result<ClassifyReport, crate::classify::ClassifyError> {
    let class = classify_three(a)?;
    if !unknown.is_empty() {
        warnings.push(class_caveat(unknown.len()));
    }
    Ok(ClassifyReport {
        n: 3,
        labels: labels.to_vec(),
        class: class.name(),
        splits: class.splits(),
        signature: polytope_signature(a),
        unknown: partitions_json(unknown),
        warnings,
    })
}
