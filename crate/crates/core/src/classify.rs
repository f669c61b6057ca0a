//! Named entanglement classes for three parties and the relatively-local
//! partition of an antichain.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{build_polytope, connected_components, f_vector, is_single_simplex, FVector};
use crate::partitions::{join, Partition, PartitionAntichain, PartitionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("expected 3 parties, got {0}")]
    NotThreeParties(usize),
    #[error("antichain {0} matches no three-party class")]
    UnrecognizedAntichain(String),
    #[error("empty antichain")]
    EmptyAntichain,
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// The five entanglement patterns of three parties, by certified antichain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum ThreeQubitClass {
    /// Only the one-block partition: a single point.
    FullyEntangled,
    /// Separable across `{p} | rest` for one party `p`.
    OneQubitBiseparable(usize),
    /// Separable across two of the single-party cuts (ascending).
    TwoQubitBiseparable([usize; 2]),
    /// Separable across all three single-party cuts.
    ThreeBiseparable,
    FullySeparable,
}

impl ThreeQubitClass {
    pub fn name(&self) -> &'static str {
        match self {
            ThreeQubitClass::FullyEntangled => "FullyEntangled",
            ThreeQubitClass::OneQubitBiseparable(_) => "OneQubitBiseparable",
            ThreeQubitClass::TwoQubitBiseparable(_) => "TwoQubitBiseparable",
            ThreeQubitClass::ThreeBiseparable => "ThreeBiseparable",
            ThreeQubitClass::FullySeparable => "FullySeparable",
        }
    }

    /// Parties split off as singletons.
    pub fn splits(&self) -> Vec<usize> {
        match self {
            ThreeQubitClass::FullyEntangled => vec![],
            ThreeQubitClass::OneQubitBiseparable(p) => vec![*p],
            ThreeQubitClass::TwoQubitBiseparable(ps) => ps.to_vec(),
            ThreeQubitClass::ThreeBiseparable | ThreeQubitClass::FullySeparable => vec![0, 1, 2],
        }
    }
}

impl fmt::Display for ThreeQubitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_three(a: &PartitionAntichain) -> Result<ThreeQubitClass, ClassifyError> {
    if a.party_count() != 3 {
        return Err(ClassifyError::NotThreeParties(a.party_count()));
    }
    let elements = a.elements();
    if elements == [Partition::finest(3)] {
        return Ok(ThreeQubitClass::FullySeparable);
    }
    if elements == [Partition::one_block(3)] {
        return Ok(ThreeQubitClass::FullyEntangled);
    }
    let mut singles = Vec::new();
    for p in elements {
        let single = (p.len() == 2)
            .then(|| p.blocks().iter().find(|b| b.len() == 1))
            .flatten()
            .ok_or_else(|| ClassifyError::UnrecognizedAntichain(format!("{a:?}")))?;
        singles.push(single.min_party());
    }
    singles.sort_unstable();
    Ok(match singles.as_slice() {
        [p] => ThreeQubitClass::OneQubitBiseparable(*p),
        [p, q] => ThreeQubitClass::TwoQubitBiseparable([*p, *q]),
        [_, _, _] => ThreeQubitClass::ThreeBiseparable,
        _ => return Err(ClassifyError::UnrecognizedAntichain(format!("{a:?}"))),
    })
}

/// Coarsest partition refining every element of the antichain: gates local
/// to its blocks leave the polytope unchanged.
pub fn relloc_partition(a: &PartitionAntichain) -> Result<Partition, ClassifyError> {
    let (first, rest) = a.elements().split_first().ok_or(ClassifyError::EmptyAntichain)?;
    rest.iter()
        .try_fold(first.clone(), |acc, p| join(&acc, p))
        .map_err(ClassifyError::from)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PolytopeSignature {
    pub f_vector: FVector,
    pub components: usize,
    pub single_simplex: bool,
}

pub fn polytope_signature(a: &PartitionAntichain) -> PolytopeSignature {
    let k = build_polytope(a);
    PolytopeSignature {
        f_vector: f_vector(&k),
        components: connected_components(&k),
        single_simplex: is_single_simplex(&k),
    }
}
