//! Set partitions of a finite party set and the refinement lattice on them.
//!
//! Parties are the integers `0..n`. A [`Partition`] is kept in canonical form
//! (blocks ordered by their smallest member), so structural equality and
//! hashing coincide with equality of partitions.
//!
//! Order convention: a partition is *greater* when it is finer. [`compare`]
//! reports the role of its first argument, so `compare(p, q) == Finer` means
//! every block of `q` is a union of blocks of `p`.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Largest party count representable by a [`Block`].
pub const MAX_PARTIES: usize = 64;

/// Largest party count accepted by [`enumerate_partitions`].
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("blocks overlap on party {0}")]
    Overlap(usize),
    #[error("blocks do not cover the party set (missing party {0})")]
    Cover(usize),
    #[error("empty block")]
    EmptyBlock,
    #[error("party {index} out of range for {n} parties")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("party count {0} outside 1..={MAX_PARTIES}")]
    PartyCount(usize),
    #[error("party sets differ: {0} vs {1} parties")]
    MismatchedPartySet(usize, usize),
    #[error("{n} parties exceeds the enumeration guard of {limit}")]
    GuardExceeded { n: usize, limit: usize },
    #[error("empty set of partitions")]
    EmptySet,
    #[error("{0} refines {1}; not an antichain")]
    NotAntichain(String, String),
}

pub type Result<T> = std::result::Result<T, PartitionError>;

/// A nonempty subset of parties, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block(u64);

impl Block {
    pub fn from_mask(mask: u64) -> Option<Block> {
        (mask != 0).then_some(Block(mask))
    }

    pub fn singleton(party: usize) -> Block {
        assert!(party < MAX_PARTIES);
        Block(1 << party)
    }

    /// Builds a block from party indices; duplicates are ignored.
    pub fn from_parties<I: IntoIterator<Item = usize>>(parties: I) -> Option<Block> {
        let mut mask = 0u64;
        for p in parties {
            if p >= MAX_PARTIES {
                return None;
            }
            mask |= 1 << p;
        }
        Block::from_mask(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn min_party(self) -> usize {
        self.0.trailing_zeros() as usize
    }

    pub fn contains(self, party: usize) -> bool {
        party < MAX_PARTIES && self.0 & (1 << party) != 0
    }

    pub fn is_subset(self, other: Block) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Block) -> bool {
        self.0 & other.0 != 0
    }

    pub fn intersection(self, other: Block) -> Option<Block> {
        Block::from_mask(self.0 & other.0)
    }

    pub fn union(self, other: Block) -> Block {
        Block(self.0 | other.0)
    }

    /// Members in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> + Clone {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(p)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.members().collect()
    }
}

/// Lexicographic order on the sorted member lists.
impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members().cmp(other.members())
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // single digits read unambiguously; wider labels need separators
        let wide = self.members().any(|p| p >= 10);
        for (i, p) in self.members().enumerate() {
            if wide && i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Outcome of [`compare`], phrased from the first argument's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum OrderRelation {
    /// First argument strictly refines the second.
    Finer,
    /// First argument is strictly refined by the second.
    Coarser,
    Equal,
    Incomparable,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<Block>,
}

impl Partition {
    /// Canonical partition from arbitrary blocks; see [`make_partition`].
    pub fn new(blocks: &[Vec<usize>], n: usize) -> Result<Partition> {
        make_partition(blocks, n)
    }

    fn from_blocks_unchecked(n: usize, mut blocks: Vec<Block>) -> Partition {
        blocks.sort_by_key(|b| b.min_party());
        Partition { n, blocks }
    }

    /// Validated construction from bit-mask blocks.
    pub fn from_blocks(n: usize, blocks: Vec<Block>) -> Result<Partition> {
        check_party_count(n)?;
        let mut seen = 0u64;
        for b in &blocks {
            if let Some(p) = Block::from_mask(b.mask() & seen) {
                return Err(PartitionError::Overlap(p.min_party()));
            }
            if let Some(p) = b.members().find(|&p| p >= n) {
                return Err(PartitionError::IndexOutOfRange { index: p, n });
            }
            seen |= b.mask();
        }
        if let Some(p) = (0..n).find(|&p| seen & (1 << p) == 0) {
            return Err(PartitionError::Cover(p));
        }
        Ok(Partition::from_blocks_unchecked(n, blocks))
    }

    /// The one-block partition `{0..n}`.
    pub fn one_block(n: usize) -> Partition {
        assert!((1..=MAX_PARTIES).contains(&n));
        Partition {
            n,
            blocks: vec![Block(full_mask(n))],
        }
    }

    /// The discrete partition into singletons.
    pub fn finest(n: usize) -> Partition {
        assert!((1..=MAX_PARTIES).contains(&n));
        Partition {
            n,
            blocks: (0..n).map(Block::singleton).collect(),
        }
    }

    pub fn party_count(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, party: usize) -> Option<Block> {
        self.blocks.iter().copied().find(|b| b.contains(party))
    }

    pub fn contains_block(&self, block: Block) -> bool {
        self.blocks.contains(&block)
    }

    /// `true` when every block of `other` is a union of blocks of `self`
    /// (including equality).
    pub fn refines(&self, other: &Partition) -> bool {
        self.n == other.n
            && self
                .blocks
                .iter()
                .all(|b| other.blocks.iter().any(|o| b.is_subset(*o)))
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.to_vec()).collect()
    }

    /// Two-group coarsenings, each reported by the side not containing party
    /// `min` of the first block (so every cut appears once).
    pub fn bipartition_coarsenings(&self) -> Vec<Block> {
        let m = self.blocks.len();
        if m < 2 {
            return Vec::new();
        }
        // block 0 always stays on the complement side
        (1u64..(1 << (m - 1)))
            .map(|sel| {
                let mask = (0..m - 1)
                    .filter(|i| sel & (1 << i) != 0)
                    .fold(0u64, |acc, i| acc | self.blocks[i + 1].mask());
                Block(mask)
            })
            .collect()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Deterministic total order used for sorted collections: fewer blocks first,
/// then blocks lexicographically.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.blocks.len().cmp(&other.blocks.len()))
            .then_with(|| self.blocks.cmp(&other.blocks))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_party_count(n: usize) -> Result<()> {
    if (1..=MAX_PARTIES).contains(&n) {
        Ok(())
    } else {
        Err(PartitionError::PartyCount(n))
    }
}

fn check_same(p: &Partition, q: &Partition) -> Result<()> {
    if p.n == q.n {
        Ok(())
    } else {
        Err(PartitionError::MismatchedPartySet(p.n, q.n))
    }
}

pub fn make_partition(blocks: &[Vec<usize>], n: usize) -> Result<Partition> {
    check_party_count(n)?;
    let mut seen = 0u64;
    let mut out = Vec::with_capacity(blocks.len());
    for members in blocks {
        if members.is_empty() {
            return Err(PartitionError::EmptyBlock);
        }
        let mut mask = 0u64;
        for &p in members {
            if p >= n {
                return Err(PartitionError::IndexOutOfRange { index: p, n });
            }
            if (seen | mask) & (1 << p) != 0 {
                return Err(PartitionError::Overlap(p));
            }
            mask |= 1 << p;
        }
        seen |= mask;
        out.push(Block(mask));
    }
    if let Some(p) = (0..n).find(|&p| seen & (1 << p) == 0) {
        return Err(PartitionError::Cover(p));
    }
    Ok(Partition::from_blocks_unchecked(n, out))
}

pub fn compare(p: &Partition, q: &Partition) -> Result<OrderRelation> {
    check_same(p, q)?;
    Ok(match (p.refines(q), q.refines(p)) {
        (true, true) => OrderRelation::Equal,
        (true, false) => OrderRelation::Finer,
        (false, true) => OrderRelation::Coarser,
        (false, false) => OrderRelation::Incomparable,
    })
}

/// Least upper bound: the coarsest common refinement.
pub fn join(p: &Partition, q: &Partition) -> Result<Partition> {
    check_same(p, q)?;
    let blocks = p
        .blocks
        .iter()
        .flat_map(|a| q.blocks.iter().filter_map(move |b| a.intersection(*b)))
        .collect();
    Ok(Partition::from_blocks_unchecked(p.n, blocks))
}

/// Greatest lower bound: the finest common coarsening.
pub fn meet(p: &Partition, q: &Partition) -> Result<Partition> {
    check_same(p, q)?;
    let mut blocks: Vec<Block> = p.blocks.clone();
    for b in &q.blocks {
        let (touching, rest): (Vec<Block>, Vec<Block>) =
            blocks.into_iter().partition(|x| x.intersects(*b));
        let merged = touching.into_iter().fold(*b, Block::union);
        blocks = rest;
        blocks.push(merged);
    }
    Ok(Partition::from_blocks_unchecked(p.n, blocks))
}

/// Replaces the blocks holding `a` and `b` by their union.
pub fn merge_blocks(p: &Partition, a: usize, b: usize) -> Result<Partition> {
    for idx in [a, b] {
        if idx >= p.n {
            return Err(PartitionError::IndexOutOfRange { index: idx, n: p.n });
        }
    }
    let ba = p.block_of(a).expect("partition covers party set");
    let bb = p.block_of(b).expect("partition covers party set");
    if ba == bb {
        return Ok(p.clone());
    }
    let mut blocks: Vec<Block> = p
        .blocks
        .iter()
        .copied()
        .filter(|x| *x != ba && *x != bb)
        .collect();
    blocks.push(ba.union(bb));
    Ok(Partition::from_blocks_unchecked(p.n, blocks))
}

/// Iterator over all partitions of `0..n` via restricted growth strings.
#[derive(Debug, Clone)]
pub struct Partitions {
    n: usize,
    // rgs[i] = block index of party i; max[i] = max(rgs[..i])
    rgs: Vec<usize>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let mut masks = vec![0u64; self.n];
        for (party, &b) in self.rgs.iter().enumerate() {
            masks[b] |= 1 << party;
        }
        let blocks = masks.into_iter().filter_map(Block::from_mask).collect();
        let out = Partition::from_blocks_unchecked(self.n, blocks);

        // advance: increment the rightmost position that may still grow
        let mut i = self.n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            let prefix_max = self.rgs[..i].iter().copied().max().unwrap_or(0);
            if self.rgs[i] <= prefix_max {
                self.rgs[i] += 1;
                for r in &mut self.rgs[i + 1..] {
                    *r = 0;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Every partition of `0..n` exactly once, starting from the one-block
/// partition and ending with the finest.
pub fn enumerate_partitions(n: usize) -> Result<Partitions> {
    check_party_count(n)?;
    if n > ENUMERATION_LIMIT {
        return Err(PartitionError::GuardExceeded {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(Partitions {
        n,
        rgs: vec![0; n],
        done: false,
    })
}

/// Partitions with no element strictly refining another, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartitionAntichain {
    n: usize,
    elements: Vec<Partition>,
}

impl PartitionAntichain {
    /// Rejects inputs that are empty, mixed, or contain comparable elements.
    /// Exact duplicates are collapsed.
    pub fn new(mut elements: Vec<Partition>) -> Result<PartitionAntichain> {
        let n = elements.first().ok_or(PartitionError::EmptySet)?.n;
        if let Some(p) = elements.iter().find(|p| p.n != n) {
            return Err(PartitionError::MismatchedPartySet(n, p.n));
        }
        elements.sort();
        elements.dedup();
        for (i, p) in elements.iter().enumerate() {
            for q in &elements[i + 1..] {
                if p.refines(q) {
                    return Err(PartitionError::NotAntichain(p.to_string(), q.to_string()));
                }
                if q.refines(p) {
                    return Err(PartitionError::NotAntichain(q.to_string(), p.to_string()));
                }
            }
        }
        Ok(PartitionAntichain { n, elements })
    }

    pub fn singleton(p: Partition) -> PartitionAntichain {
        PartitionAntichain {
            n: p.n,
            elements: vec![p],
        }
    }

    pub fn party_count(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Partition] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.elements.binary_search(p).is_ok()
    }
}

impl fmt::Debug for PartitionAntichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.elements).finish()
    }
}

/// Elements of `ps` not strictly refined by another element.
pub fn maximal_elements<'a, I>(ps: I) -> Result<PartitionAntichain>
where
    I: IntoIterator<Item = &'a Partition>,
{
    let mut all: Vec<Partition> = ps.into_iter().cloned().collect();
    let n = all.first().ok_or(PartitionError::EmptySet)?.n;
    if let Some(p) = all.iter().find(|p| p.n != n) {
        return Err(PartitionError::MismatchedPartySet(n, p.n));
    }
    all.sort();
    all.dedup();
    let elements = all
        .iter()
        .filter(|p| !all.iter().any(|q| q != *p && q.refines(p)))
        .cloned()
        .collect();
    Ok(PartitionAntichain { n, elements })
}

/// Membership of `s` in the downward closure of `a`.
pub fn closure_contains(a: &PartitionAntichain, s: &Partition) -> Result<bool> {
    if a.n != s.n {
        return Err(PartitionError::MismatchedPartySet(a.n, s.n));
    }
    Ok(a.elements.iter().any(|m| m.refines(s)))
}
