//! Population axioms checked against a model.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::Model;
use crate::population::{InstanceValue, PopulationSequence};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AxiomViolation {
    /// `Player(Pop(r)) ⊆ Pop(Player(r))` fails.
    PlayerOutsidePopulation {
        time: i64,
        role: String,
        player_type: String,
        instance: InstanceValue,
    },
    /// A fact instance leaves a role of its fact type unbound.
    UnboundRole {
        time: i64,
        fact_type: String,
        fact: InstanceValue,
        role: String,
    },
    /// A fact instance binds a role that belongs to another fact type.
    ForeignBinding {
        time: i64,
        fact_type: String,
        fact: InstanceValue,
        role: String,
    },
    /// Two fact instances of one fact type share a value.
    DuplicateFact {
        time: i64,
        fact_type: String,
        fact: InstanceValue,
    },
    /// Populations overlap although the types are not type related.
    Overlap {
        time: i64,
        left: String,
        right: String,
        shared: Vec<InstanceValue>,
    },
    /// An instance of a player type plays none of the roles open to it.
    Inactive {
        time: i64,
        player_type: String,
        instance: InstanceValue,
    },
    /// The population file mentions a type the model does not declare.
    UndeclaredType { time: i64, type_id: String },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::PlayerOutsidePopulation { time, role, player_type, instance } => write!(
                f,
                "t={time}: {instance} plays role {role} but is not in the population of {player_type}"
            ),
            AxiomViolation::UnboundRole { time, fact_type, fact, role } => {
                write!(f, "t={time}: fact {fact} of {fact_type} leaves role {role} unbound")
            }
            AxiomViolation::ForeignBinding { time, fact_type, fact, role } => {
                write!(f, "t={time}: fact {fact} of {fact_type} binds role {role} of another fact type")
            }
            AxiomViolation::DuplicateFact { time, fact_type, fact } => {
                write!(f, "t={time}: fact {fact} occurs more than once in {fact_type}")
            }
            AxiomViolation::Overlap { time, left, right, shared } => {
                let shared: Vec<String> = shared.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "t={time}: populations of {left} and {right} share {{{}}} but the types are not type related",
                    shared.join(", ")
                )
            }
            AxiomViolation::Inactive { time, player_type, instance } => {
                write!(f, "t={time}: {instance} in {player_type} plays no role")
            }
            AxiomViolation::UndeclaredType { time, type_id } => {
                write!(f, "t={time}: population mentions undeclared type {type_id}")
            }
        }
    }
}

/// Checks every snapshot and reports all violations, sorted.
pub fn validate(model: &Model, seq: &PopulationSequence) -> Vec<AxiomViolation> {
    let mut out = BTreeSet::new();
    for s in seq.snapshots() {
        let time = s.time;
        for type_id in s.objects.keys() {
            if !model.is_object_type(type_id) {
                out.insert(AxiomViolation::UndeclaredType { time, type_id: type_id.clone() });
            }
        }
        for type_id in s.facts.keys() {
            if !model.is_fact_type(type_id) {
                out.insert(AxiomViolation::UndeclaredType { time, type_id: type_id.clone() });
            }
        }

        // (b) fact totality and functionality
        for fact_type in model.fact_types() {
            let mut seen = BTreeSet::new();
            for fact in s.facts.get(&fact_type.id).into_iter().flatten() {
                if !seen.insert(&fact.value) {
                    out.insert(AxiomViolation::DuplicateFact {
                        time,
                        fact_type: fact_type.id.clone(),
                        fact: fact.value.clone(),
                    });
                }
                for role in &fact_type.roles {
                    if !fact.bindings.contains_key(&role.id) {
                        out.insert(AxiomViolation::UnboundRole {
                            time,
                            fact_type: fact_type.id.clone(),
                            fact: fact.value.clone(),
                            role: role.id.clone(),
                        });
                    }
                }
                for bound in fact.bindings.keys() {
                    if !fact_type.roles.iter().any(|r| &r.id == bound) {
                        out.insert(AxiomViolation::ForeignBinding {
                            time,
                            fact_type: fact_type.id.clone(),
                            fact: fact.value.clone(),
                            role: bound.clone(),
                        });
                    }
                }
            }
        }

        // (a) role players live in the player's population
        for role in model.roles() {
            let player_pop = model.pop(s, &role.player).expect("declared player");
            for (player, _) in model.role_extension(s, &role.id).expect("declared role") {
                if !player_pop.contains(&player) {
                    out.insert(AxiomViolation::PlayerOutsidePopulation {
                        time,
                        role: role.id.clone(),
                        player_type: role.player.clone(),
                        instance: player,
                    });
                }
            }
        }

        // (c) overlapping populations must be type related
        let object_ids: Vec<&str> = model.object_types().map(|o| o.id.as_str()).collect();
        for (i, left) in object_ids.iter().enumerate() {
            let left_pop = model.pop(s, left).expect("declared type");
            if left_pop.is_empty() {
                continue;
            }
            for right in &object_ids[i + 1..] {
                if model.type_related(left, right).expect("declared types") {
                    continue;
                }
                let right_pop = model.pop(s, right).expect("declared type");
                let shared: Vec<InstanceValue> = left_pop.intersection(&right_pop).cloned().collect();
                if !shared.is_empty() {
                    out.insert(AxiomViolation::Overlap {
                        time,
                        left: left.to_string(),
                        right: right.to_string(),
                        shared,
                    });
                }
            }
        }

        // (d) instances of player types are active in some role they may play
        for player_type in model.player_types() {
            let mut active = BTreeSet::new();
            for role in model.plays(player_type).expect("declared type") {
                for (player, _) in model.role_extension(s, &role).expect("declared role") {
                    active.insert(player);
                }
            }
            for instance in model.pop(s, player_type).expect("declared type") {
                if !active.contains(&instance) {
                    out.insert(AxiomViolation::Inactive {
                        time,
                        player_type: player_type.to_string(),
                        instance,
                    });
                }
            }
        }
    }
    out.into_iter().collect()
}
