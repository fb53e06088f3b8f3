//! Graphical ORM constraints, compiled to rules over paths and checked
//! against a population sequence.

mod ext_unique;
mod join_path;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::{DescriptorError, Frontend};
use crate::freq::{FreqOp, Frequency, FrequencyDomain};
use crate::model::{Model, ModelError};
use crate::path::{cartesian, HeadOp, PathError, PathExpr};
use crate::population::PopulationSequence;
use crate::rule::{CompiledRule, RuleEngine, RuleExpr, Witness, WITNESS_LIMIT};
use crate::world::World;

pub use ext_unique::{check_ext_unique, variety};
pub use join_path::{join_path, JoinPathResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstraintError {
    #[error("constraint needs at least one role")]
    EmptyRoles,
    #[error("no join path connects roles {0:?}")]
    NoJoinPath(Vec<String>),
    #[error("join path for roles {0:?} is ambiguous")]
    AmbiguousJoinPath(Vec<String>),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("role `{role}` is not a role of `{fact_type}`")]
    UnknownRole { fact_type: String, role: String },
    #[error("degenerate constraint: {0}")]
    Degenerate(String),
    #[error("rule is not sensible for subtype `{subtype}`: {reason}")]
    NotSensible { subtype: String, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum Constraint {
    Mandatory {
        object_type: String,
        roles: BTreeSet<String>,
    },
    MandatoryTuple {
        object_types: Vec<String>,
        role_tuples: Vec<Vec<String>>,
    },
    Unique {
        roles: Vec<String>,
    },
    #[serde(rename = "subset")]
    SubsetC {
        roles1: Vec<String>,
        roles2: Vec<String>,
    },
    TemporalPrecedes {
        roles1: Vec<String>,
        roles2: Vec<String>,
    },
    /// The subtype holds at least the instances matching the descriptor.
    SubtypeMin {
        subtype: String,
        rule: String,
    },
    /// The subtype holds at most the instances matching the descriptor.
    SubtypeMax {
        subtype: String,
        rule: String,
    },
    Exclusive {
        types: Vec<String>,
    },
    TotalSpec {
        #[serde(rename = "super", default, skip_serializing_if = "Option::is_none")]
        supertype: Option<String>,
        subs: Vec<String>,
    },
    ExtUnique {
        fact_type: String,
        roles: BTreeSet<String>,
    },
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &mut dyn Iterator<Item = &String>| xs.map(String::as_str).collect::<Vec<_>>().join(", ");
        match self {
            Constraint::Mandatory { object_type, roles } => {
                write!(f, "Total({object_type}: {{{}}})", list(&mut roles.iter()))
            }
            Constraint::MandatoryTuple {
                object_types,
                role_tuples,
            } => {
                let rows: Vec<String> = role_tuples.iter().map(|r| format!("⟨{}⟩", list(&mut r.iter()))).collect();
                write!(f, "Total(⟨{}⟩: {{{}}})", list(&mut object_types.iter()), rows.join(", "))
            }
            Constraint::Unique { roles } => write!(f, "Unique({})", list(&mut roles.iter())),
            Constraint::SubsetC { roles1, roles2 } => {
                write!(f, "SubSet(⟨{}⟩, ⟨{}⟩)", list(&mut roles1.iter()), list(&mut roles2.iter()))
            }
            Constraint::TemporalPrecedes { roles1, roles2 } => {
                write!(f, "precedes(⟨{}⟩, ⟨{}⟩)", list(&mut roles1.iter()), list(&mut roles2.iter()))
            }
            Constraint::SubtypeMin { subtype, rule } => write!(f, "Subset({subtype}, \"{rule}\")"),
            Constraint::SubtypeMax { subtype, rule } => write!(f, "Superset({subtype}, \"{rule}\")"),
            Constraint::Exclusive { types } => write!(f, "Exclusive({})", list(&mut types.iter())),
            Constraint::TotalSpec { supertype, subs } => match supertype {
                Some(s) => write!(f, "Total({s}: {})", list(&mut subs.iter())),
                None => write!(f, "Total({{{}}})", list(&mut subs.iter())),
            },
            Constraint::ExtUnique { fact_type, roles } => {
                write!(f, "ExtUnique({fact_type}: {{{}}})", list(&mut roles.iter()))
            }
        }
    }
}

/// A constraint ready to check: a rule, or the direct existential
/// uniqueness test.
#[derive(Debug, Clone, PartialEq)]
pub enum Compiled {
    Rule(CompiledRule),
    ExtUnique { fact_type: String, roles: BTreeSet<String> },
}

fn always_all(p: PathExpr) -> CompiledRule {
    CompiledRule::new(RuleExpr::always(RuleExpr::All(p)))
}

fn fold(op: FreqOp, parts: impl IntoIterator<Item = PathExpr>) -> Option<PathExpr> {
    parts.into_iter().reduce(|a, b| PathExpr::binary(op, a, b))
}

fn head_fold(op: HeadOp, parts: impl IntoIterator<Item = PathExpr>) -> Option<PathExpr> {
    parts.into_iter().reduce(|a, b| PathExpr::head_conn(op, a, b))
}

fn require_type(model: &Model, id: &str) -> Result<(), ConstraintError> {
    if model.is_type(id) {
        Ok(())
    } else {
        Err(ModelError::UnknownType(id.to_string()).into())
    }
}

fn require_plays(model: &Model, o: &str, role: &str) -> Result<(), ConstraintError> {
    let player = &model.role(role)?.player;
    if model.sub_eq(o, player)? {
        Ok(())
    } else {
        Err(ConstraintError::TypeMismatch(format!(
            "`{o}` cannot play role `{role}` (played by `{player}`)"
        )))
    }
}

/// The leftmost object type a descriptor path starts from.
fn leading_type(p: &PathExpr) -> Option<&str> {
    match p {
        PathExpr::ObjType(o) => Some(o),
        PathExpr::Concat(a, _) | PathExpr::HeadConn(_, a, _) => leading_type(a),
        PathExpr::Always(a) | PathExpr::Sometime(a) => leading_type(a),
        _ => None,
    }
}

fn subtype_rule(model: &Model, subtype: &str, text: &str) -> Result<PathExpr, ConstraintError> {
    require_type(model, subtype)?;
    let p = Frontend::new(model.names())?.descriptor(text)?;
    let not_sensible = |reason: String| ConstraintError::NotSensible {
        subtype: subtype.to_string(),
        reason,
    };
    let lead = leading_type(&p).ok_or_else(|| not_sensible("the rule does not start with an object type".into()))?;
    if !model.sub(subtype, lead)? {
        return Err(not_sensible(format!("`{lead}` is not a supertype of `{subtype}`")));
    }
    Ok(p)
}

fn join(model: &Model, roles: &[String]) -> Result<PathExpr, ConstraintError> {
    Ok(join_path(model, roles)?.path)
}

fn paired_joins(model: &Model, roles1: &[String], roles2: &[String]) -> Result<(PathExpr, PathExpr), ConstraintError> {
    if roles1.len() != roles2.len() {
        return Err(ConstraintError::TypeMismatch(format!(
            "role lists have lengths {} and {}",
            roles1.len(),
            roles2.len()
        )));
    }
    for (a, b) in roles1.iter().zip(roles2) {
        let (pa, pb) = (&model.role(a)?.player, &model.role(b)?.player);
        if !model.type_related(pa, pb)? {
            return Err(ConstraintError::TypeMismatch(format!(
                "players `{pa}` of `{a}` and `{pb}` of `{b}` are not type related"
            )));
        }
    }
    Ok((join(model, roles1)?, join(model, roles2)?))
}

/// Compiles one constraint against `model`.
pub fn compile(model: &Model, c: &Constraint) -> Result<Compiled, ConstraintError> {
    let rule = match c {
        Constraint::Mandatory { object_type, roles } => {
            require_type(model, object_type)?;
            for r in roles {
                require_plays(model, object_type, r)?;
            }
            let any = head_fold(HeadOp::Or, roles.iter().map(|r| PathExpr::role(r))).ok_or(ConstraintError::EmptyRoles)?;
            always_all(PathExpr::head_conn(HeadOp::Implies, PathExpr::obj(object_type), any))
        }
        Constraint::MandatoryTuple {
            object_types,
            role_tuples,
        } => {
            if object_types.is_empty() || role_tuples.is_empty() {
                return Err(ConstraintError::EmptyRoles);
            }
            for row in role_tuples {
                if row.len() != object_types.len() {
                    return Err(ConstraintError::TypeMismatch(format!(
                        "role tuple ⟨{}⟩ does not match {} object types",
                        row.join(", "),
                        object_types.len()
                    )));
                }
                let facts: BTreeSet<&str> = row
                    .iter()
                    .map(|r| Ok(model.fact_of_role(r)?.id.as_str()))
                    .collect::<Result<_, ModelError>>()?;
                if facts.len() != 1 {
                    return Err(ConstraintError::TypeMismatch(format!(
                        "roles ⟨{}⟩ span several fact types",
                        row.join(", ")
                    )));
                }
                for (o, r) in object_types.iter().zip(row) {
                    require_plays(model, o, r)?;
                }
            }
            let product = cartesian(object_types.iter().map(|o| PathExpr::obj(o)).collect())?;
            let rows = role_tuples
                .iter()
                .map(|row| PathExpr::Confluence(row.iter().map(|r| PathExpr::role(r)).collect()));
            let any = head_fold(HeadOp::Or, rows).ok_or(ConstraintError::EmptyRoles)?;
            always_all(PathExpr::head_conn(HeadOp::Implies, product, any))
        }
        Constraint::Unique { roles } => {
            let j = join(model, roles)?;
            always_all(PathExpr::implies(j.clone().reverse().concat(j), PathExpr::One))
        }
        Constraint::SubsetC { roles1, roles2 } => {
            let (j1, j2) = paired_joins(model, roles1, roles2)?;
            always_all(PathExpr::head_conn(HeadOp::Implies, j1, j2))
        }
        Constraint::TemporalPrecedes { roles1, roles2 } => {
            always_all(PathExpr::precedes(join(model, roles1)?, join(model, roles2)?))
        }
        Constraint::SubtypeMin { subtype, rule } => {
            let p = subtype_rule(model, subtype, rule)?;
            always_all(PathExpr::head_conn(HeadOp::Implies, p, PathExpr::obj(subtype)))
        }
        Constraint::SubtypeMax { subtype, rule } => {
            let p = subtype_rule(model, subtype, rule)?;
            always_all(PathExpr::head_conn(HeadOp::Implies, PathExpr::obj(subtype), p))
        }
        Constraint::Exclusive { types } => {
            if types.len() < 2 {
                return Err(ConstraintError::TypeMismatch("exclusion needs at least two types".into()));
            }
            for t in types {
                require_type(model, t)?;
            }
            let clauses = (0..types.len()).map(|i| {
                let others = types.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, t)| PathExpr::obj(t));
                let overlap = PathExpr::binary(
                    FreqOp::Meet,
                    PathExpr::obj(&types[i]),
                    fold(FreqOp::Join, others).expect("at least one other type"),
                );
                PathExpr::implies(overlap, PathExpr::Zero)
            });
            always_all(fold(FreqOp::Meet, clauses).expect("at least two clauses"))
        }
        Constraint::TotalSpec { supertype, subs } => {
            if subs.is_empty() {
                return Err(ConstraintError::TypeMismatch("totality needs at least one subtype".into()));
            }
            for t in subs {
                require_type(model, t)?;
            }
            let total = |s: &str| {
                let union = fold(FreqOp::Join, subs.iter().map(|t| PathExpr::obj(t))).expect("non-empty");
                RuleExpr::always(RuleExpr::All(PathExpr::head_conn(HeadOp::Iff, PathExpr::obj(s), union)))
            };
            match supertype {
                Some(s) => {
                    require_type(model, s)?;
                    if let Some(t) = subs.iter().find(|t| !model.sub(t, s).unwrap_or(false)) {
                        return Err(ConstraintError::TypeMismatch(format!("`{t}` is not a subtype of `{s}`")));
                    }
                    CompiledRule::new(total(s))
                }
                None => {
                    let supers = model.common_super(subs)?;
                    let rule = supers.iter().map(|s| total(s)).reduce(RuleExpr::and).ok_or_else(|| {
                        ConstraintError::TypeMismatch(format!("`{}` have no common supertype", subs.join(", ")))
                    })?;
                    CompiledRule::new(rule)
                }
            }
        }
        Constraint::ExtUnique { fact_type, roles } => {
            let fact = model.fact_type(fact_type)?;
            if roles.is_empty() {
                return Err(ConstraintError::EmptyRoles);
            }
            if let Some(r) = roles.iter().find(|r| !fact.role_ids().any(|id| id == r.as_str())) {
                return Err(ConstraintError::UnknownRole {
                    fact_type: fact_type.clone(),
                    role: r.clone(),
                });
            }
            if fact.role_ids().all(|id| roles.contains(id)) {
                return Err(ConstraintError::Degenerate(format!(
                    "existential uniqueness over every role of `{fact_type}` leaves no complement"
                )));
            }
            return Ok(Compiled::ExtUnique {
                fact_type: fact_type.clone(),
                roles: roles.clone(),
            });
        }
    };
    Ok(Compiled::Rule(rule))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintResult {
    pub label: String,
    pub passed: bool,
    pub values: Vec<(i64, Frequency)>,
    pub witnesses: Vec<Witness>,
    /// Set when a temporal operator read past the last snapshot.
    pub horizon: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintReport {
    pub results: Vec<ConstraintResult>,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

/// A constraint that failed to compile or evaluate, by position in the input.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("constraint {index} ({label}): {error}")]
pub struct CheckError {
    pub index: usize,
    pub label: String,
    pub error: ConstraintError,
}

fn check_one(
    world: &World<'_>,
    compiled: &Compiled,
    label: String,
    domain: FrequencyDomain,
    times: &[usize],
) -> Result<ConstraintResult, ConstraintError> {
    match compiled {
        Compiled::Rule(rule) => {
            let out = RuleEngine::new(world, domain).evaluate(rule, Some(times))?;
            Ok(ConstraintResult {
                label,
                passed: out.passed,
                values: out.values,
                witnesses: out.witnesses,
                horizon: out.horizon,
            })
        }
        Compiled::ExtUnique { fact_type, roles } => {
            let mut result = ConstraintResult {
                label,
                passed: true,
                values: Vec::new(),
                witnesses: Vec::new(),
                horizon: false,
            };
            for &t in times {
                let pairs = check_ext_unique(world.model(), world.snapshot(t), fact_type, roles)?;
                let time = world.time(t);
                if pairs.is_empty() {
                    result.values.push((time, domain.one()));
                    continue;
                }
                result.passed = false;
                result.values.push((time, domain.zero()));
                result.witnesses.push(Witness {
                    time,
                    truncated: pairs.len() > WITNESS_LIMIT,
                    pairs: pairs.into_iter().take(WITNESS_LIMIT).collect(),
                });
            }
            Ok(result)
        }
    }
}

/// Checks every constraint at every snapshot.
pub fn check(
    model: &Model,
    seq: &PopulationSequence,
    cs: &[Constraint],
    domain: FrequencyDomain,
) -> Result<ConstraintReport, Vec<CheckError>> {
    check_at(model, seq, cs, domain, None)
}

/// Checks every constraint at the given snapshot indices (all when `None`).
/// Errors from all constraints are collected before anything is reported.
pub fn check_at(
    model: &Model,
    seq: &PopulationSequence,
    cs: &[Constraint],
    domain: FrequencyDomain,
    times: Option<&[usize]>,
) -> Result<ConstraintReport, Vec<CheckError>> {
    let world = World::new(model, seq);
    let all: Vec<usize> = (0..world.len()).collect();
    let times = times.unwrap_or(&all);
    let mut report = ConstraintReport::default();
    let mut errors = Vec::new();
    for (index, c) in cs.iter().enumerate() {
        let label = c.to_string();
        let outcome = compile(model, c).and_then(|compiled| check_one(&world, &compiled, label.clone(), domain, times));
        match outcome {
            Ok(r) => report.results.push(r),
            Err(error) => errors.push(CheckError { index, label, error }),
        }
    }
    if errors.is_empty() {
        Ok(report)
    } else {
        Err(errors)
    }
}
