//! A model paired with its population sequence, plus the finite universes that
//! quantifiers range over.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Model, ModelError};
use crate::population::{InstanceValue, PopulationSequence, Snapshot};

/// Largest universe a single snapshot may expand to.
pub const UNIVERSE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("quantification universe would exceed {UNIVERSE_LIMIT} values ({base} values, tuple arity {arity})")]
pub struct UniverseTooLarge {
    pub base: usize,
    pub arity: usize,
}

/// What an expression adds to the active domain: its constants and the tuple
/// shapes its confluences build.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniverseSpec {
    pub constants: BTreeSet<InstanceValue>,
    pub arities: BTreeSet<usize>,
    /// Maximal confluence nesting.
    pub depth: usize,
}

impl UniverseSpec {
    pub fn merge(&mut self, other: &UniverseSpec) {
        self.constants.extend(other.constants.iter().cloned());
        self.arities.extend(other.arities.iter().copied());
        self.depth = self.depth.max(other.depth);
    }

    /// The active domain plus constants, closed `depth` times under tuple
    /// formation for each arity.
    pub fn expand(&self, active: &BTreeSet<InstanceValue>) -> Result<BTreeSet<InstanceValue>, UniverseTooLarge> {
        let mut universe: BTreeSet<InstanceValue> = active.union(&self.constants).cloned().collect();
        for _ in 0..self.depth {
            let base: Vec<InstanceValue> = universe.iter().cloned().collect();
            for &arity in &self.arities {
                let size = base.len().checked_pow(arity as u32).unwrap_or(usize::MAX);
                if size > UNIVERSE_LIMIT {
                    return Err(UniverseTooLarge { base: base.len(), arity });
                }
                let mut index = vec![0usize; arity];
                if base.is_empty() {
                    continue;
                }
                loop {
                    universe.insert(InstanceValue::Tuple(index.iter().map(|&i| base[i].clone()).collect()));
                    // odometer increment
                    let mut pos = arity;
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        index[pos] += 1;
                        if index[pos] < base.len() {
                            break;
                        }
                        index[pos] = 0;
                    }
                    if index.iter().all(|&i| i == 0) {
                        break;
                    }
                }
            }
        }
        Ok(universe)
    }
}

/// Union of all object-type and fact-type populations of a snapshot.
pub fn active_domain(snapshot: &Snapshot) -> BTreeSet<InstanceValue> {
    let mut out = BTreeSet::new();
    for values in snapshot.objects.values() {
        out.extend(values.iter().cloned());
    }
    for facts in snapshot.facts.values() {
        out.extend(facts.iter().map(|f| f.value.clone()));
    }
    out
}

#[derive(Debug, Clone)]
pub struct World<'a> {
    model: &'a Model,
    seq: &'a PopulationSequence,
    active: Vec<BTreeSet<InstanceValue>>,
}

impl<'a> World<'a> {
    pub fn new(model: &'a Model, seq: &'a PopulationSequence) -> Self {
        let active = seq.snapshots().iter().map(active_domain).collect();
        World { model, seq, active }
    }

    pub fn model(&self) -> &'a Model {
        self.model
    }

    pub fn seq(&self) -> &'a PopulationSequence {
        self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn snapshot(&self, index: usize) -> &'a Snapshot {
        &self.seq.snapshots()[index]
    }

    pub fn time(&self, index: usize) -> i64 {
        self.snapshot(index).time
    }

    pub fn index_of(&self, time: i64) -> Result<usize, ModelError> {
        self.seq.index_of(time)
    }

    pub fn active_domain(&self, index: usize) -> &BTreeSet<InstanceValue> {
        &self.active[index]
    }

    /// Universes per snapshot index for the given spec.
    pub fn universes(&self, spec: &UniverseSpec) -> Result<Vec<BTreeSet<InstanceValue>>, UniverseTooLarge> {
        self.active.iter().map(|a| spec.expand(a)).collect()
    }
}
