//! Instances, population snapshots and the recorded time axis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::ModelError;

/// An instance: either an atomic label or a tuple of instances.
/// Equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InstanceValue {
    Atom(String),
    Tuple(Vec<InstanceValue>),
}

impl InstanceValue {
    pub fn atom(label: impl Into<String>) -> Self {
        InstanceValue::Atom(label.into())
    }

    pub fn tuple(components: impl IntoIterator<Item = InstanceValue>) -> Self {
        InstanceValue::Tuple(components.into_iter().collect())
    }

    /// Tuple of atoms, handy in tests and fixtures.
    pub fn tuple_of(labels: &[&str]) -> Self {
        InstanceValue::tuple(labels.iter().map(|l| InstanceValue::atom(*l)))
    }

    pub fn components(&self) -> Option<&[InstanceValue]> {
        match self {
            InstanceValue::Tuple(c) => Some(c),
            InstanceValue::Atom(_) => None,
        }
    }
}

impl fmt::Display for InstanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceValue::Atom(label) => f.write_str(label),
            InstanceValue::Tuple(components) => {
                f.write_str("⟨")?;
                for (idx, c) in components.iter().enumerate() {
                    if idx > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("⟩")
            }
        }
    }
}

impl From<&str> for InstanceValue {
    fn from(label: &str) -> Self {
        InstanceValue::atom(label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactInstance {
    pub value: InstanceValue,
    pub bindings: BTreeMap<String, InstanceValue>,
}

impl FactInstance {
    pub fn new(value: InstanceValue, bindings: impl IntoIterator<Item = (String, InstanceValue)>) -> Self {
        FactInstance {
            value,
            bindings: bindings.into_iter().collect(),
        }
    }
}

/// The population at one time point. Object instances are stored at their
/// most specific type; supertypes see them through [`crate::Model::pop`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Snapshot {
    pub time: i64,
    pub objects: BTreeMap<String, BTreeSet<InstanceValue>>,
    pub facts: BTreeMap<String, Vec<FactInstance>>,
}

impl Snapshot {
    pub fn new(time: i64) -> Self {
        Snapshot {
            time,
            ..Snapshot::default()
        }
    }

    pub fn with_objects<'a>(mut self, type_id: &str, instances: impl IntoIterator<Item = &'a str>) -> Self {
        self.objects
            .entry(type_id.to_string())
            .or_default()
            .extend(instances.into_iter().map(InstanceValue::atom));
        self
    }

    pub fn with_fact(mut self, fact_type: &str, fact: FactInstance) -> Self {
        self.facts.entry(fact_type.to_string()).or_default().push(fact);
        self
    }
}

/// A non-empty sequence of snapshots with strictly increasing times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationSequence {
    snapshots: Vec<Snapshot>,
}

impl PopulationSequence {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self, ModelError> {
        if snapshots.is_empty() {
            return Err(ModelError::EmptySequence);
        }
        for pair in snapshots.windows(2) {
            if pair[1].time <= pair[0].time {
                return Err(ModelError::NonIncreasingTime(pair[1].time));
            }
        }
        Ok(PopulationSequence { snapshots })
    }

    pub fn single(snapshot: Snapshot) -> Self {
        PopulationSequence {
            snapshots: vec![snapshot],
        }
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = i64> + '_ {
        self.snapshots.iter().map(|s| s.time)
    }

    pub fn index_of(&self, time: i64) -> Result<usize, ModelError> {
        self.snapshots
            .binary_search_by_key(&time, |s| s.time)
            .map_err(|_| ModelError::UnknownTime(time))
    }

    pub fn at(&self, time: i64) -> Result<&Snapshot, ModelError> {
        Ok(&self.snapshots[self.index_of(time)?])
    }

    /// The smallest recorded time after `time`, or `None` at the last snapshot.
    pub fn next_time(&self, time: i64) -> Result<Option<i64>, ModelError> {
        let idx = self.index_of(time)?;
        Ok(self.snapshots.get(idx + 1).map(|s| s.time))
    }
}
