//! Symbolic evolution of certified antichains under circuits of one- and
//! two-party gates.
//!
//! A gate acting on a partition either leaves it alone (local gates,
//! non-entangling gates, or both targets already in one block) or merges the
//! two blocks holding its targets. Gates never refine a partition.
//!
//! Each step also produces a vertex map from the old polytope to the new one.
//! Block `v` of partition `P` is sent to the block of `host(P)` holding the
//! lowest party of `v`, where `host(P)` is the image of `P` or, when that image
//! was absorbed during re-maximalization, the first surviving partition that
//! refines it. A vertex shared by several partitions takes its image from the
//! first of them. If that choice is not simplicial on some connected
//! component (shared vertices pulled toward different hosts), the whole
//! component is sent into the host of its first partition and reported as
//! squeezed.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::complex::{
    block_components, build_polytope, compose, make_simplicial_map, ComplexError, SimplicialComplex,
    SimplicialMap,
};
use crate::exec::{self, Execution};
use crate::partitions::{maximal_elements, merge_blocks, Block, Partition, PartitionAntichain, PartitionError};
use crate::quantum::{
    compute_profile, operator_schmidt_rank, CMatrix, DensityMatrix, QuantumError, SeparabilityProfile,
    WitnessedEnsemble,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("party {index} out of range for {n} parties")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid gate targets {0:?}")]
    BadTargets(Vec<usize>),
    #[error("circuit has {circuit} parties, initial antichain has {initial}")]
    PartyMismatch { circuit: usize, initial: usize },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// Single-party gate.
    Local1,
    /// Two-party gate treated as entangling.
    Entangling2,
    /// Two-party product gate `A ⊗ B`.
    Product2,
    /// Two-qubit unitary, row-major in the basis `|t0 t1⟩`.
    Explicit2(CMatrix),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Local1 => "local",
            GateKind::Entangling2 => "entangling",
            GateKind::Product2 => "product",
            GateKind::Explicit2(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    targets: Vec<usize>,
    kind: GateKind,
}

impl GateOp {
    pub fn new(targets: Vec<usize>, kind: GateKind) -> Result<GateOp> {
        let arity = if kind == GateKind::Local1 { 1 } else { 2 };
        if targets.len() != arity || (arity == 2 && targets[0] == targets[1]) {
            return Err(DynamicsError::BadTargets(targets));
        }
        if let GateKind::Explicit2(u) = &kind {
            if u.shape() != (4, 4) {
                return Err(QuantumError::DimMismatch(format!(
                    "explicit gate is {}x{}, expected 4x4",
                    u.nrows(),
                    u.ncols()
                ))
                .into());
            }
        }
        Ok(GateOp { targets, kind })
    }

    pub fn local(i: usize) -> GateOp {
        GateOp {
            targets: vec![i],
            kind: GateKind::Local1,
        }
    }

    pub fn entangling(i: usize, j: usize) -> Result<GateOp> {
        GateOp::new(vec![i, j], GateKind::Entangling2)
    }

    pub fn product(i: usize, j: usize) -> Result<GateOp> {
        GateOp::new(vec![i, j], GateKind::Product2)
    }

    pub fn explicit(i: usize, j: usize, u: CMatrix) -> Result<GateOp> {
        GateOp::new(vec![i, j], GateKind::Explicit2(u))
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.targets.iter().find(|&&t| t >= n) {
            Some(&index) => Err(DynamicsError::IndexOutOfRange { index, n }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    party_count: usize,
    gates: Vec<GateOp>,
}

impl Circuit {
    pub fn new(party_count: usize, gates: Vec<GateOp>) -> Result<Circuit> {
        for g in &gates {
            g.check_range(party_count)?;
        }
        Ok(Circuit { party_count, gates })
    }

    pub fn party_count(&self) -> usize {
        self.party_count
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }
}

/// Whether `g` can entangle its two targets. Explicit unitaries are judged
/// by operator Schmidt rank.
pub fn is_entangling(g: &GateOp, tol: f64) -> Result<bool> {
    Ok(match &g.kind {
        GateKind::Local1 | GateKind::Product2 => false,
        GateKind::Entangling2 => true,
        GateKind::Explicit2(u) => operator_schmidt_rank(u, (2, 2), tol)? > 1,
    })
}

pub fn gate_on_partition(s: &Partition, g: &GateOp, tol: f64) -> Result<Partition> {
    g.check_range(s.party_count())?;
    if !is_entangling(g, tol)? {
        return Ok(s.clone());
    }
    Ok(merge_blocks(s, g.targets[0], g.targets[1])?)
}

/// Two blocks of one partition fused by a gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeEvent {
    pub partition: Partition,
    pub blocks: (Block, Block),
    pub into: Block,
}

/// A new vertex reached from old vertices lying in no common simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identification {
    pub vertex: Block,
    pub sources: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub antichain: PartitionAntichain,
    pub map: SimplicialMap,
    pub merges: Vec<MergeEvent>,
    pub identifications: Vec<Identification>,
    /// Vertex sets of components mapped wholesale into a single simplex.
    pub squeezed: Vec<Vec<Block>>,
}

pub fn evolve_step(a: &PartitionAntichain, g: &GateOp, tol: f64) -> Result<StepOutcome> {
    evolve_step_with(a, g, tol, Execution::default())
}

/// [`evolve_step`] with an explicit execution strategy; the outcome does not
/// depend on `exec`.
pub fn evolve_step_with(a: &PartitionAntichain, g: &GateOp, tol: f64, exec: Execution) -> Result<StepOutcome> {
    let n = a.party_count();
    g.check_range(n)?;
    let entangling = is_entangling(g, tol)?;
    let elements = a.elements();

    let images: Vec<(Partition, Option<MergeEvent>)> = exec::map(exec, elements, |p| {
        if !entangling {
            return (p.clone(), None);
        }
        let (x, y) = (g.targets[0], g.targets[1]);
        let bx = p.block_of(x).expect("covering partition");
        let by = p.block_of(y).expect("covering partition");
        if bx == by {
            return (p.clone(), None);
        }
        let merged = merge_blocks(p, x, y).expect("targets in range");
        let (lo, hi) = if bx < by { (bx, by) } else { (by, bx) };
        let event = MergeEvent {
            partition: p.clone(),
            blocks: (lo, hi),
            into: lo.union(hi),
        };
        (merged, Some(event))
    });

    let antichain = maximal_elements(images.iter().map(|(p, _)| p))?;
    let before = build_polytope(a);
    let after = build_polytope(&antichain);

    let hosts: Vec<&Partition> = images
        .iter()
        .map(|(img, _)| {
            antichain
                .elements()
                .iter()
                .find(|m| *m == img)
                .or_else(|| antichain.elements().iter().find(|m| m.refines(img)))
                .expect("maximal elements dominate every image")
        })
        .collect();
    let target_of = |i: usize, v: Block| hosts[i].block_of(v.min_party()).expect("covering partition");

    let sets: Vec<&[Block]> = elements.iter().map(|p| p.blocks()).collect();
    let mut table: BTreeMap<Block, Block> = BTreeMap::new();
    let mut squeezed = Vec::new();
    for component in block_components(&sets) {
        let mut local: BTreeMap<Block, Block> = BTreeMap::new();
        for &i in &component {
            for v in elements[i].blocks() {
                local.entry(*v).or_insert_with(|| target_of(i, *v));
            }
        }
        let simplicial = component.iter().all(|&i| {
            let image: BTreeSet<Block> = elements[i].blocks().iter().map(|v| local[v]).collect();
            after.spans_simplex(&image)
        });
        if !simplicial {
            let first = component[0];
            for v in local.keys().copied().collect::<Vec<_>>() {
                local.insert(v, target_of(first, v));
            }
            squeezed.push(local.keys().copied().collect());
        }
        table.extend(local);
    }

    let identifications = identifications(elements, &table);
    let merges = images.into_iter().filter_map(|(_, e)| e).collect();
    let map = make_simplicial_map(&before, &after, table)?;
    Ok(StepOutcome {
        antichain,
        map,
        merges,
        identifications,
        squeezed,
    })
}

fn identifications(elements: &[Partition], table: &BTreeMap<Block, Block>) -> Vec<Identification> {
    let mut by_image: BTreeMap<Block, Vec<Block>> = BTreeMap::new();
    for (v, w) in table {
        by_image.entry(*w).or_default().push(*v);
    }
    by_image
        .into_iter()
        .filter(|(_, sources)| {
            sources.len() >= 2
                && !elements
                    .iter()
                    .any(|p| sources.iter().all(|s| p.contains_block(*s)))
        })
        .map(|(vertex, sources)| Identification { vertex, sources })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub gate: GateOp,
    pub before: SimplicialComplex,
    pub after: SimplicialComplex,
    pub antichain: PartitionAntichain,
    pub map: SimplicialMap,
    pub merges: Vec<MergeEvent>,
    pub identifications: Vec<Identification>,
    pub squeezed: Vec<Vec<Block>>,
    pub changed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub initial: PartitionAntichain,
    pub steps: Vec<TraceStep>,
    /// Composition of all per-step maps, initial to final complex.
    pub composed: SimplicialMap,
    /// Number of steps after which the complex no longer changed; `None`
    /// when the last step still changed a complex that is not yet a point.
    pub fixed_point_index: Option<usize>,
}

impl EvolutionTrace {
    pub fn final_antichain(&self) -> &PartitionAntichain {
        self.steps.last().map_or(&self.initial, |s| &s.antichain)
    }

    pub fn final_complex(&self) -> &SimplicialComplex {
        self.composed.target()
    }

    pub fn changing_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.changed).count()
    }
}

pub fn run_circuit(a0: &PartitionAntichain, c: &Circuit, tol: f64) -> Result<EvolutionTrace> {
    run_circuit_with(a0, c, tol, Execution::default())
}

pub fn run_circuit_with(a0: &PartitionAntichain, c: &Circuit, tol: f64, exec: Execution) -> Result<EvolutionTrace> {
    if c.party_count != a0.party_count() {
        return Err(DynamicsError::PartyMismatch {
            circuit: c.party_count,
            initial: a0.party_count(),
        });
    }
    let mut current = a0.clone();
    let mut composed = SimplicialMap::identity(&build_polytope(a0));
    let mut steps = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let out = evolve_step_with(&current, g, tol, exec)?;
        composed = compose(&composed, &out.map)?;
        let changed = out.antichain != current;
        steps.push(TraceStep {
            gate: g.clone(),
            before: out.map.source().clone(),
            after: out.map.target().clone(),
            antichain: out.antichain.clone(),
            map: out.map,
            merges: out.merges,
            identifications: out.identifications,
            squeezed: out.squeezed,
            changed,
        });
        current = out.antichain;
    }
    let last_change = steps.iter().rposition(|s| s.changed);
    let absorbing = current.len() == 1 && current.elements()[0].len() == 1;
    let fixed_point_index = match last_change {
        None => Some(0),
        Some(k) if k + 1 < steps.len() || absorbing => Some(k + 1),
        Some(_) => None,
    };
    Ok(EvolutionTrace {
        initial: a0.clone(),
        steps,
        composed,
        fixed_point_index,
    })
}

/// Certifies the initial state, then evolves its certified antichain.
/// Partitions left undecided are reported in the profile's `unknown` list and
/// take no part in the evolution.
pub fn profile_seeded_run(
    rho: &DensityMatrix,
    witnesses: &[WitnessedEnsemble],
    c: &Circuit,
    tol: f64,
) -> Result<(SeparabilityProfile, EvolutionTrace)> {
    let profile = compute_profile(rho, witnesses, tol)?;
    let trace = run_circuit(&profile.certified_maximal, c, tol)?;
    Ok((profile, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::make_partition;
    use crate::quantum::families::{bell_pair, cnot, ghz, random_product_mixture};
    use crate::quantum::{tensor_pure, HilbertSpec, PureState, DEFAULT_TOL};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = DEFAULT_TOL;

    fn part(blocks: &[&[usize]], n: usize) -> Partition {
        let v: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        make_partition(&v, n).unwrap()
    }

    fn blk(ps: &[usize]) -> Block {
        Block::from_parties(ps.iter().copied()).unwrap()
    }

    fn anti(ps: Vec<Partition>) -> PartitionAntichain {
        PartitionAntichain::new(ps).unwrap()
    }

    #[test]
    fn entangling_classification() {
        assert!(!is_entangling(&GateOp::local(0), TOL).unwrap());
        assert!(is_entangling(&GateOp::explicit(0, 1, cnot()).unwrap(), TOL).unwrap());
        let c = |re: f64| Complex64::new(re, 0.0);
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let z = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        assert!(!is_entangling(&GateOp::explicit(0, 1, x.kronecker(&z)).unwrap(), TOL).unwrap());
        let bad = GateOp::explicit(0, 1, CMatrix::from_element(4, 4, c(1.0))).unwrap();
        assert!(matches!(
            is_entangling(&bad, TOL),
            Err(DynamicsError::Quantum(QuantumError::NotUnitary(_)))
        ));
        assert!(GateOp::entangling(1, 1).is_err());
    }

    #[test]
    fn gate_cases() {
        let s = part(&[&[0, 1], &[2]], 3);
        let e01 = GateOp::entangling(0, 1).unwrap();
        let e12 = GateOp::entangling(1, 2).unwrap();
        assert_eq!(gate_on_partition(&s, &e01, TOL).unwrap(), s);
        assert_eq!(gate_on_partition(&s, &e12, TOL).unwrap(), Partition::one_block(3));
        assert_eq!(gate_on_partition(&s, &GateOp::local(2), TOL).unwrap(), s);
        assert_eq!(
            gate_on_partition(&s, &GateOp::product(1, 2).unwrap(), TOL).unwrap(),
            s
        );
        assert!(matches!(
            gate_on_partition(&s, &GateOp::entangling(0, 3).unwrap(), TOL),
            Err(DynamicsError::IndexOutOfRange { index: 3, n: 3 })
        ));
    }

    #[test]
    fn two_edges_identified_into_one_point() {
        let e1 = part(&[&[0, 1], &[2]], 3);
        let e2 = part(&[&[0], &[1, 2]], 3);
        let out = evolve_step(&anti(vec![e1, e2]), &GateOp::entangling(0, 2).unwrap(), TOL).unwrap();
        assert_eq!(out.antichain.elements(), &[Partition::one_block(3)]);
        for v in [blk(&[0, 1]), blk(&[2]), blk(&[0]), blk(&[1, 2])] {
            assert_eq!(out.map.image(v), Some(blk(&[0, 1, 2])));
        }
        assert_eq!(out.identifications.len(), 1);
        assert_eq!(out.identifications[0].vertex, blk(&[0, 1, 2]));
        assert_eq!(out.merges.len(), 2);
        assert!(out.squeezed.is_empty());
    }

    #[test]
    fn triangle_collapses_to_edge() {
        let out = evolve_step(
            &PartitionAntichain::singleton(Partition::finest(3)),
            &GateOp::entangling(0, 1).unwrap(),
            TOL,
        )
        .unwrap();
        assert_eq!(out.antichain.elements(), &[part(&[&[0, 1], &[2]], 3)]);
        assert_eq!(out.map.image(blk(&[0])), Some(blk(&[0, 1])));
        assert_eq!(out.map.image(blk(&[1])), Some(blk(&[0, 1])));
        assert_eq!(out.map.image(blk(&[2])), Some(blk(&[2])));
        // a collapse inside one simplex is not an identification
        assert!(out.identifications.is_empty());
    }

    #[test]
    fn local_gate_is_identity() {
        let a = anti(vec![part(&[&[0], &[1, 2]], 3), part(&[&[1], &[0, 2]], 3)]);
        let out = evolve_step(&a, &GateOp::local(1), TOL).unwrap();
        assert_eq!(out.antichain, a);
        assert!(out.map.is_identity());
    }

    #[test]
    fn absorbed_image_maps_into_surviving_host() {
        // {0|12} -> {012}, absorbed by the unchanged {01|2}
        let a = anti(vec![part(&[&[0, 1], &[2]], 3), part(&[&[0], &[1, 2]], 3)]);
        let out = evolve_step(&a, &GateOp::entangling(0, 1).unwrap(), TOL).unwrap();
        assert_eq!(out.antichain.elements(), &[part(&[&[0, 1], &[2]], 3)]);
        assert!(out.map.check().is_ok());
        assert_eq!(out.map.image(blk(&[1, 2])), Some(blk(&[0, 1])));
    }

    #[test]
    fn diverging_shared_vertex_is_squeezed() {
        // {0} is shared; the gate merges it with {12} in one simplex and {13} in the other
        let a = anti(vec![part(&[&[0], &[1, 2], &[3]], 4), part(&[&[0], &[1, 3], &[2]], 4)]);
        let out = evolve_step(&a, &GateOp::entangling(0, 1).unwrap(), TOL).unwrap();
        assert_eq!(out.antichain.len(), 2);
        assert_eq!(out.squeezed.len(), 1);
        assert!(out.map.check().is_ok());
    }

    #[test]
    fn circuit_examples() {
        let tri = PartitionAntichain::singleton(Partition::finest(3));
        let c = Circuit::new(
            3,
            vec![GateOp::entangling(0, 1).unwrap(), GateOp::entangling(1, 2).unwrap()],
        )
        .unwrap();
        let t = run_circuit(&tri, &c, TOL).unwrap();
        assert_eq!(t.final_antichain().elements(), &[Partition::one_block(3)]);
        for v in [blk(&[0]), blk(&[1]), blk(&[2])] {
            assert_eq!(t.composed.image(v), Some(blk(&[0, 1, 2])));
        }
        assert_eq!(t.fixed_point_index, Some(2));

        let empty = run_circuit(&tri, &Circuit::new(3, vec![]).unwrap(), TOL).unwrap();
        assert!(empty.steps.is_empty());
        assert!(empty.composed.is_identity());
        assert_eq!(empty.fixed_point_index, Some(0));

        let locals = Circuit::new(3, vec![GateOp::local(0), GateOp::local(2)]).unwrap();
        let t = run_circuit(&tri, &locals, TOL).unwrap();
        assert_eq!(t.fixed_point_index, Some(0));
        assert!(t.steps.iter().all(|s| !s.changed));

        let one = Circuit::new(3, vec![GateOp::entangling(0, 1).unwrap()]).unwrap();
        assert_eq!(run_circuit(&tri, &one, TOL).unwrap().fixed_point_index, None);

        assert!(matches!(
            run_circuit(&tri, &Circuit::new(4, vec![]).unwrap(), TOL),
            Err(DynamicsError::PartyMismatch { circuit: 4, initial: 3 })
        ));
        assert!(Circuit::new(3, vec![GateOp::local(3)]).is_err());
    }

    #[test]
    fn seeded_runs() {
        let any = Circuit::new(
            3,
            vec![GateOp::entangling(0, 1).unwrap(), GateOp::local(2), GateOp::entangling(1, 2).unwrap()],
        )
        .unwrap();
        let g = DensityMatrix::from_pure(&ghz(3).unwrap());
        let (_, t) = profile_seeded_run(&g, &[], &any, TOL).unwrap();
        assert!(t.steps.iter().all(|s| s.map.is_identity()));

        let zero = PureState::basis(HilbertSpec::qubits(1).unwrap(), &[0]).unwrap();
        let s = tensor_pure(&[zero, bell_pair(2, 0, 1).unwrap()]).unwrap();
        let c = Circuit::new(3, vec![GateOp::entangling(0, 1).unwrap()]).unwrap();
        let (prof, t) = profile_seeded_run(&DensityMatrix::from_pure(&s), &[], &c, TOL).unwrap();
        assert_eq!(prof.certified_maximal.elements(), &[part(&[&[0], &[1, 2]], 3)]);
        assert_eq!(t.final_antichain().elements(), &[Partition::one_block(3)]);

        let spec = HilbertSpec::qubits(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (rho, w) = random_product_mixture(&spec, &Partition::finest(3), 4, &mut rng).unwrap();
        let (_, t) = profile_seeded_run(&rho, &[w], &Circuit::new(3, vec![]).unwrap(), TOL).unwrap();
        assert_eq!(t.final_antichain().elements(), &[Partition::finest(3)]);
    }
}
