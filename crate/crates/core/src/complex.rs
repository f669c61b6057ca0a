//! Abstract simplicial complexes whose vertices are labeled by blocks of
//! parties, the polytope builder for partition antichains, and simplicial
//! maps between such complexes.
//!
//! Vertex identity is label identity: two vertices carrying the same block
//! are the same vertex. Rebuilding a complex after blocks merge therefore
//! identifies coinciding vertices automatically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::partitions::{Block, Partition, PartitionAntichain};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("vertex {0} has no image")]
    UnmappedVertex(Block),
    #[error("vertex {0} is not a vertex of the source complex")]
    UnknownSource(Block),
    #[error("image {0} is not a vertex of the target complex")]
    UnknownTarget(Block),
    #[error("image of simplex {simplex:?} lies in no target simplex")]
    NotSimplicial { simplex: Vec<Block> },
    #[error("target of the first map differs from the source of the second")]
    ChainMismatch,
}

/// A set of vertex labels, sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<Block>);

impl Simplex {
    pub fn new(mut vertices: Vec<Block>) -> Simplex {
        vertices.sort();
        vertices.dedup();
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[Block] {
        &self.0
    }

    pub fn dimension(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn contains(&self, v: Block) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.0).finish()
    }
}

/// Face counts per dimension: entry `k` is the number of distinct `k`-faces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct FVector(pub Vec<u64>);

impl FVector {
    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn dimension(&self) -> isize {
        self.0.len() as isize - 1
    }
}

/// Reasons a complex fails validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateLabel(Block),
    LabelOutOfRange(Block),
    EmptySimplex(usize),
    RepeatedVertex { simplex: usize, vertex: Block },
    UnknownVertex { simplex: usize, vertex: Block },
    OrphanVertex(Block),
    /// Maximal simplex `inner` is a face of maximal simplex `outer`.
    AntichainViolation { inner: usize, outer: usize },
    IntersectionNotFace { a: usize, b: usize },
    /// The blocks of a maximal simplex are not a partition of the parties.
    NotAPartition(usize),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    party_count: usize,
    vertices: Vec<Block>,
    simplices: Vec<Simplex>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.simplices).finish()
    }
}

impl SimplicialComplex {
    /// Unchecked construction, for complexes that did not come out of
    /// [`build_polytope`]. Run [`validate`] on the result.
    pub fn from_raw(party_count: usize, mut vertices: Vec<Block>, simplices: Vec<Vec<Block>>) -> Self {
        // sorted but not deduplicated, so validation still sees repeats
        vertices.sort();
        SimplicialComplex {
            party_count,
            vertices,
            simplices: simplices
                .into_iter()
                .map(|mut s| {
                    s.sort();
                    Simplex(s)
                })
                .collect(),
        }
    }

    pub fn party_count(&self) -> usize {
        self.party_count
    }

    pub fn vertices(&self) -> &[Block] {
        &self.vertices
    }

    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn has_vertex(&self, v: Block) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// `true` when `vertices` all lie in one maximal simplex.
    pub fn spans_simplex(&self, vertices: &BTreeSet<Block>) -> bool {
        self.simplices
            .iter()
            .any(|s| vertices.iter().all(|v| s.contains(*v)))
    }

    /// Reads each maximal simplex back as a partition.
    pub fn partitions(&self) -> Vec<Partition> {
        self.simplices
            .iter()
            .filter_map(|s| Partition::from_blocks(self.party_count, s.0.clone()).ok())
            .collect()
    }

    /// Maximal simplices grouped by connected component (indices into
    /// [`maximal_simplices`](Self::maximal_simplices), ascending).
    pub fn simplex_components(&self) -> Vec<Vec<usize>> {
        let sets: Vec<&[Block]> = self.simplices.iter().map(|s| s.0.as_slice()).collect();
        block_components(&sets)
    }
}

/// Groups vertex sets into classes connected through shared vertices;
/// indices ascending within and across groups.
pub fn block_components(sets: &[&[Block]]) -> Vec<Vec<usize>> {
    let m = sets.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: BTreeMap<Block, usize> = BTreeMap::new();
    for (i, s) in sets.iter().enumerate() {
        for v in s.iter() {
            if let Some(&j) = owner.get(v) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            } else {
                owner.insert(*v, i);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// The separability polytope of a certified antichain: one vertex per
/// distinct block, one maximal simplex per partition.
pub fn build_polytope(a: &PartitionAntichain) -> SimplicialComplex {
    let mut vertices: Vec<Block> = a
        .elements()
        .iter()
        .flat_map(|p| p.blocks().iter().copied())
        .collect();
    vertices.sort();
    vertices.dedup();
    let mut simplices: Vec<Simplex> = a
        .elements()
        .iter()
        .map(|p| Simplex::new(p.blocks().to_vec()))
        .collect();
    simplices.sort();
    SimplicialComplex {
        party_count: a.party_count(),
        vertices,
        simplices,
    }
}

pub fn validate(k: &SimplicialComplex) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for v in &k.vertices {
        if !seen.insert(*v) {
            out.push(Violation::DuplicateLabel(*v));
        }
        if v.members().any(|p| p >= k.party_count) {
            out.push(Violation::LabelOutOfRange(*v));
        }
    }
    let mut used = BTreeSet::new();
    for (i, s) in k.simplices.iter().enumerate() {
        if s.0.is_empty() {
            out.push(Violation::EmptySimplex(i));
        }
        let mut inner = BTreeSet::new();
        for v in &s.0 {
            if !inner.insert(*v) {
                out.push(Violation::RepeatedVertex { simplex: i, vertex: *v });
            }
            if !seen.contains(v) {
                out.push(Violation::UnknownVertex { simplex: i, vertex: *v });
            }
            used.insert(*v);
        }
        if !s.0.is_empty() && Partition::from_blocks(k.party_count, s.0.clone()).is_err() {
            out.push(Violation::NotAPartition(i));
        }
    }
    for v in &seen {
        if !used.contains(v) {
            out.push(Violation::OrphanVertex(*v));
        }
    }
    for (i, a) in k.simplices.iter().enumerate() {
        for (j, b) in k.simplices.iter().enumerate() {
            if i == j {
                continue;
            }
            if a.is_face_of(b) {
                out.push(Violation::AntichainViolation { inner: i, outer: j });
            }
            if i < j {
                // the common vertex set must itself be a face of both
                let common = Simplex::new(a.0.iter().copied().filter(|v| b.contains(*v)).collect());
                if !(common.is_face_of(a) && common.is_face_of(b)) {
                    out.push(Violation::IntersectionNotFace { a: i, b: j });
                }
            }
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn keep_maximal(mut family: Vec<Vec<Block>>) -> Vec<Vec<Block>> {
    family.retain(|s| !s.is_empty());
    family.sort();
    family.dedup();
    let contained = |a: &Vec<Block>, b: &Vec<Block>| a.iter().all(|v| b.binary_search(v).is_ok());
    family
        .iter()
        .filter(|a| !family.iter().any(|b| b != *a && contained(a, b)))
        .cloned()
        .collect()
}

// Distinct faces of a union of full simplices, by size-1:
// faces new in S_i = faces(S_i) minus faces of {S_i ∩ S_j : j < i}.
fn union_face_counts(family: Vec<Vec<Block>>, len: usize) -> Vec<u64> {
    let family = keep_maximal(family);
    let mut counts = vec![0u64; len];
    for (i, s) in family.iter().enumerate() {
        for (k, c) in counts.iter_mut().enumerate() {
            *c += binomial(s.len() as u64, k as u64 + 1);
        }
        let overlaps: Vec<Vec<Block>> = family[..i]
            .iter()
            .map(|t| s.iter().copied().filter(|v| t.binary_search(v).is_ok()).collect())
            .collect();
        for (c, o) in counts.iter_mut().zip(union_face_counts(overlaps, len)) {
            *c -= o;
        }
    }
    counts
}

/// Distinct faces per dimension; faces shared between maximal simplices are
/// counted once.
pub fn f_vector(k: &SimplicialComplex) -> FVector {
    let len = k.simplices.iter().map(|s| s.0.len()).max().unwrap_or(0);
    let family = k.simplices.iter().map(|s| s.0.clone()).collect();
    let mut counts = union_face_counts(family, len);
    while counts.last() == Some(&0) {
        counts.pop();
    }
    FVector(counts)
}

/// Connected components of the 1-skeleton.
pub fn connected_components(k: &SimplicialComplex) -> usize {
    k.simplex_components().len()
}

pub fn is_single_simplex(k: &SimplicialComplex) -> bool {
    k.simplices.len() == 1 && k.simplices[0].0.len() == k.vertices.len()
}

/// A vertex map between two complexes carrying every maximal simplex of the
/// source into some simplex of the target.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialMap {
    source: SimplicialComplex,
    target: SimplicialComplex,
    table: BTreeMap<Block, Block>,
}

impl fmt::Debug for SimplicialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(&self.table).finish()
    }
}

impl SimplicialMap {
    pub fn identity(k: &SimplicialComplex) -> SimplicialMap {
        SimplicialMap {
            source: k.clone(),
            target: k.clone(),
            table: k.vertices.iter().map(|v| (*v, *v)).collect(),
        }
    }

    pub fn source(&self) -> &SimplicialComplex {
        &self.source
    }

    pub fn target(&self) -> &SimplicialComplex {
        &self.target
    }

    pub fn table(&self) -> &BTreeMap<Block, Block> {
        &self.table
    }

    pub fn image(&self, v: Block) -> Option<Block> {
        self.table.get(&v).copied()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.table.iter().all(|(a, b)| a == b)
    }

    /// Re-runs the checks of [`make_simplicial_map`].
    pub fn check(&self) -> Result<(), ComplexError> {
        check_map(&self.source, &self.target, &self.table)
    }
}

fn check_map(
    src: &SimplicialComplex,
    dst: &SimplicialComplex,
    table: &BTreeMap<Block, Block>,
) -> Result<(), ComplexError> {
    for v in &src.vertices {
        let w = table.get(v).ok_or(ComplexError::UnmappedVertex(*v))?;
        if !dst.has_vertex(*w) {
            return Err(ComplexError::UnknownTarget(*w));
        }
    }
    if let Some(v) = table.keys().find(|v| !src.has_vertex(**v)) {
        return Err(ComplexError::UnknownSource(*v));
    }
    for s in &src.simplices {
        let image: BTreeSet<Block> = s.0.iter().map(|v| table[v]).collect();
        if !dst.spans_simplex(&image) {
            return Err(ComplexError::NotSimplicial { simplex: s.0.clone() });
        }
    }
    Ok(())
}

pub fn make_simplicial_map(
    src: &SimplicialComplex,
    dst: &SimplicialComplex,
    vertex_map: BTreeMap<Block, Block>,
) -> Result<SimplicialMap, ComplexError> {
    check_map(src, dst, &vertex_map)?;
    Ok(SimplicialMap {
        source: src.clone(),
        target: dst.clone(),
        table: vertex_map,
    })
}

/// `g ∘ f`: apply `f`, then `g`.
pub fn compose(f: &SimplicialMap, g: &SimplicialMap) -> Result<SimplicialMap, ComplexError> {
    if f.target != g.source {
        return Err(ComplexError::ChainMismatch);
    }
    let table = f.table.iter().map(|(v, w)| (*v, g.table[w])).collect();
    let out = SimplicialMap {
        source: f.source.clone(),
        target: g.target.clone(),
        table,
    };
    debug_assert!(out.check().is_ok());
    Ok(out)
}
