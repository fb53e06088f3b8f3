//! JSON file formats for models, populations and constraint lists.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::constraint::Constraint;
use crate::descriptor::names::NameTables;
use crate::model::{FactType, Model, ModelError, ObjectType, RoleType, TypeKind};
use crate::population::{FactInstance, InstanceValue, PopulationSequence, Snapshot};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl LoadError {
    /// The 1-based line of the problem, when it is known.
    pub fn line(&self) -> Option<usize> {
        match self {
            LoadError::Json { line, .. } => Some(*line),
            _ => None,
        }
    }
}

impl From<serde_json::Error> for LoadError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; the fields carry that already.
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        LoadError::Json {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ModelFile {
    #[serde(default)]
    object_types: Vec<ObjectTypeRecord>,
    #[serde(default)]
    fact_types: Vec<FactTypeRecord>,
    #[serde(default)]
    pair_names: Vec<PairNameRecord>,
}

#[derive(Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum KindRecord {
    #[default]
    Entity,
    Value,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ObjectTypeRecord {
    id: String,
    name: Option<String>,
    #[serde(default)]
    kind: KindRecord,
    #[serde(default)]
    supertypes: Vec<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct FactTypeRecord {
    id: String,
    /// Present when the fact type is objectified and referred to by name.
    name: Option<String>,
    roles: Vec<RoleRecord>,
    #[serde(default)]
    supertypes: Vec<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RoleRecord {
    id: String,
    player: String,
    role_name: Option<String>,
    reverse_role_name: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairNameRecord {
    from: String,
    to: String,
    name: String,
}

pub fn parse_model(text: &str) -> Result<Model, LoadError> {
    let file: ModelFile = serde_json::from_str(text)?;
    let mut names = NameTables::default();
    let mut edges = Vec::new();
    let object_types = file
        .object_types
        .into_iter()
        .map(|o| {
            if let Some(n) = o.name {
                names.obj_names.insert(o.id.clone(), n);
            }
            edges.extend(o.supertypes.into_iter().map(|s| (o.id.clone(), s)));
            let kind = match o.kind {
                KindRecord::Entity => TypeKind::Entity,
                KindRecord::Value => TypeKind::Value,
            };
            ObjectType { id: o.id, kind }
        })
        .collect();
    let fact_types = file
        .fact_types
        .into_iter()
        .map(|f| {
            if let Some(n) = f.name {
                names.obj_names.insert(f.id.clone(), n);
            }
            edges.extend(f.supertypes.into_iter().map(|s| (f.id.clone(), s)));
            let roles = f
                .roles
                .into_iter()
                .map(|r| {
                    if let Some(n) = r.role_name {
                        names.role_names.insert(r.id.clone(), n);
                    }
                    if let Some(n) = r.reverse_role_name {
                        names.reverse_role_names.insert(r.id.clone(), n);
                    }
                    RoleType {
                        id: r.id,
                        player: r.player,
                    }
                })
                .collect();
            FactType { id: f.id, roles }
        })
        .collect();
    for p in file.pair_names {
        names.pair_names.insert((p.from, p.to), p.name);
    }
    Ok(Model::new(object_types, fact_types, edges, names)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PopulationFile {
    snapshots: Vec<SnapshotRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotRecord {
    time: i64,
    #[serde(default)]
    objects: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    facts: BTreeMap<String, Vec<FactRecord>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FactRecord {
    value: Option<Value>,
    bindings: BTreeMap<String, Value>,
}

/// Strings and numbers are atoms, arrays are tuples.
pub fn instance_from_json(v: &Value) -> Result<InstanceValue, LoadError> {
    match v {
        Value::String(s) => Ok(InstanceValue::atom(s.as_str())),
        Value::Number(n) => Ok(InstanceValue::atom(n.to_string())),
        Value::Array(items) => Ok(InstanceValue::tuple(
            items.iter().map(instance_from_json).collect::<Result<Vec<_>, _>>()?,
        )),
        other => Err(LoadError::Invalid(format!("`{other}` is not an instance"))),
    }
}

pub fn instance_to_json(v: &InstanceValue) -> Value {
    match v.components() {
        Some(parts) => Value::Array(parts.iter().map(instance_to_json).collect()),
        None => Value::String(v.to_string()),
    }
}

/// Parses a population against `model`, which supplies the role order of
/// facts given without an explicit value.
pub fn parse_population(text: &str, model: &Model) -> Result<PopulationSequence, LoadError> {
    let file: PopulationFile = serde_json::from_str(text)?;
    let mut snapshots = Vec::with_capacity(file.snapshots.len());
    for record in file.snapshots {
        let mut s = Snapshot::new(record.time);
        for (ty, values) in record.objects {
            let set = s.objects.entry(ty).or_default();
            for v in &values {
                set.insert(instance_from_json(v)?);
            }
        }
        for (ft, facts) in record.facts {
            let order: Vec<String> = model.fact_type(&ft)?.role_ids().map(str::to_string).collect();
            for f in facts {
                let bindings = f
                    .bindings
                    .iter()
                    .map(|(r, v)| Ok((r.clone(), instance_from_json(v)?)))
                    .collect::<Result<BTreeMap<_, _>, LoadError>>()?;
                let value = match &f.value {
                    Some(v) => instance_from_json(v)?,
                    None => {
                        let parts = order
                            .iter()
                            .map(|r| {
                                bindings.get(r).cloned().ok_or_else(|| {
                                    LoadError::Invalid(format!(
                                        "fact of `{ft}` at time {} has no value and no binding for `{r}`",
                                        record.time
                                    ))
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        InstanceValue::tuple(parts)
                    }
                };
                s.facts.entry(ft.clone()).or_default().push(FactInstance { value, bindings });
            }
        }
        snapshots.push(s);
    }
    Ok(PopulationSequence::new(snapshots)?)
}

pub fn parse_constraints(text: &str) -> Result<Vec<Constraint>, LoadError> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODEL: &str = r#"{
        "objectTypes": [
            {"id": "A", "name": "Person", "kind": "entity"},
            {"id": "B", "name": "Department"},
            {"id": "S", "supertypes": ["A"]}
        ],
        "factTypes": [
            {"id": "F", "roles": [
                {"id": "p", "player": "A", "roleName": "works in", "reverseRoleName": "has worker"},
                {"id": "q", "player": "B"}
            ]}
        ],
        "pairNames": [{"from": "p", "to": "q", "name": "working for"}]
    }"#;

    #[test]
    fn model_file() {
        let m = parse_model(MODEL).unwrap();
        assert!(m.sub("S", "A").unwrap());
        assert_eq!(m.names().object_name("A"), Some("Person"));
        assert_eq!(m.names().pair_names[&("p".into(), "q".into())], "working for");
    }

    #[test]
    fn population_file_defaults_fact_values() {
        let m = parse_model(MODEL).unwrap();
        let seq = parse_population(
            r#"{"snapshots": [{"time": 0, "objects": {"A": ["1", 2], "B": ["x"]},
                "facts": {"F": [{"bindings": {"q": "x", "p": "1"}}, {"value": ["2", "x"], "bindings": {"p": 2, "q": "x"}}]}}]}"#,
            &m,
        )
        .unwrap();
        let s = &seq.snapshots()[0];
        assert_eq!(s.facts["F"][0].value, InstanceValue::tuple_of(&["1", "x"]));
        assert_eq!(s.facts["F"][1].bindings["p"], InstanceValue::atom("2"));
        assert_eq!(instance_to_json(&s.facts["F"][0].value), serde_json::json!(["1", "x"]));
    }

    #[test]
    fn errors_carry_lines() {
        let err = parse_model("{\n  \"objectTypes\": [\n    {\"id\": }\n  ]\n}").unwrap_err();
        assert_eq!(err.line(), Some(3));
        assert!(matches!(parse_model(r#"{"objectTypes": [{"id": "A", "colour": "red"}]}"#), Err(LoadError::Json { .. })));
        let m = parse_model(MODEL).unwrap();
        assert!(matches!(
            parse_population(r#"{"snapshots": [{"time": 0, "facts": {"Z": []}}]}"#, &m),
            Err(LoadError::Model(ModelError::UnknownType(_)))
        ));
        assert!(matches!(
            parse_population(r#"{"snapshots": [{"time": 1}, {"time": 0}]}"#, &m),
            Err(LoadError::Model(ModelError::NonIncreasingTime(0)))
        ));
    }
}
