use std::collections::{BTreeMap, BTreeSet};

use crate::model::{FactType, Model};
use crate::population::{FactInstance, InstanceValue, Snapshot};

use super::ConstraintError;

fn split<'f>(
    fact: &'f FactType,
    roles: &BTreeSet<String>,
) -> Result<(Vec<&'f str>, Vec<&'f str>), ConstraintError> {
    if let Some(r) = roles.iter().find(|r| !fact.role_ids().any(|id| id == r.as_str())) {
        return Err(ConstraintError::UnknownRole {
            fact_type: fact.id.clone(),
            role: r.clone(),
        });
    }
    Ok(fact.role_ids().partition(|id| roles.contains(*id)))
}

fn project(i: &FactInstance, roles: &[&str]) -> Option<Vec<InstanceValue>> {
    roles.iter().map(|r| i.bindings.get(*r).cloned()).collect()
}

fn facts<'s>(s: &'s Snapshot, fact_type: &str) -> impl Iterator<Item = &'s FactInstance> {
    s.facts.get(fact_type).into_iter().flatten()
}

/// `Variety(i, f, R)`: the `R`-projections of the facts agreeing with `i`
/// outside `R`.
pub fn variety(
    model: &Model,
    s: &Snapshot,
    fact_type: &str,
    roles: &BTreeSet<String>,
    i: &FactInstance,
) -> Result<BTreeSet<Vec<InstanceValue>>, ConstraintError> {
    let (inside, outside) = split(model.fact_type(fact_type)?, roles)?;
    let key = project(i, &outside);
    Ok(facts(s, fact_type)
        .filter(|j| key.is_some() && project(j, &outside) == key)
        .filter_map(|j| project(j, &inside))
        .collect())
}

/// Pairs of distinct complement projections sharing one variety. Each
/// projection is reported as a single value, or as a tuple when the
/// complement has several roles.
pub fn check_ext_unique(
    model: &Model,
    s: &Snapshot,
    fact_type: &str,
    roles: &BTreeSet<String>,
) -> Result<Vec<(InstanceValue, InstanceValue)>, ConstraintError> {
    let fact = model.fact_type(fact_type)?;
    let (inside, outside) = split(fact, roles)?;
    if roles.is_empty() {
        return Err(ConstraintError::EmptyRoles);
    }
    if outside.is_empty() {
        return Err(ConstraintError::Degenerate(format!(
            "existential uniqueness over every role of `{fact_type}` leaves no complement"
        )));
    }
    let mut varieties: BTreeMap<Vec<InstanceValue>, BTreeSet<Vec<InstanceValue>>> = BTreeMap::new();
    for j in facts(s, fact_type) {
        if let (Some(key), Some(part)) = (project(j, &outside), project(j, &inside)) {
            varieties.entry(key).or_default().insert(part);
        }
    }
    let as_value = |key: &Vec<InstanceValue>| match key.as_slice() {
        [single] => single.clone(),
        many => InstanceValue::tuple(many.iter().cloned()),
    };
    let entries: Vec<_> = varieties.iter().collect();
    let mut out = Vec::new();
    for (n, (a, va)) in entries.iter().enumerate() {
        for (b, vb) in &entries[n + 1..] {
            if va == vb {
                out.push((as_value(a), as_value(b)));
            }
        }
    }
    Ok(out)
}
