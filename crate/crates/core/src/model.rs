//! The ORM metamodel: object types, fact types with their roles, subtyping and
//! the population functions derived from them.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::descriptor::names::{NameError, NameTables};
use crate::population::{InstanceValue, Snapshot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("identifier `{0}` is declared more than once")]
    DuplicateId(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("role `{role}` is played by undeclared type `{player}`")]
    UnknownPlayer { role: String, player: String },
    #[error("fact type `{0}` has no roles")]
    EmptyFactType(String),
    #[error("subtyping is cyclic through `{0}`")]
    SubtypeCycle(String),
    #[error("time {0} is not a recorded snapshot")]
    UnknownTime(i64),
    #[error("population sequence is empty")]
    EmptySequence,
    #[error("snapshot times must strictly increase (saw {0})")]
    NonIncreasingTime(i64),
    #[error("name table refers to unknown element `{0}`")]
    UnknownNamed(String),
    #[error(transparent)]
    Names(#[from] NameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TypeKind {
    #[default]
    Entity,
    Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectType {
    pub id: String,
    pub kind: TypeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleType {
    pub id: String,
    /// An object type or (for objectified facts) a fact type.
    pub player: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactType {
    pub id: String,
    pub roles: Vec<RoleType>,
}

impl FactType {
    pub fn role_ids(&self) -> impl Iterator<Item = &str> {
        self.roles.iter().map(|r| r.id.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    object_types: BTreeMap<String, ObjectType>,
    fact_types: BTreeMap<String, FactType>,
    role_owner: BTreeMap<String, String>,
    /// Transitive strict supertypes per type.
    supers: BTreeMap<String, BTreeSet<String>>,
    names: NameTables,
}

impl Model {
    pub fn new(
        object_types: Vec<ObjectType>,
        fact_types: Vec<FactType>,
        subtype_edges: Vec<(String, String)>,
        mut names: NameTables,
    ) -> Result<Self, ModelError> {
        let mut ids = BTreeSet::new();
        let mut objects = BTreeMap::new();
        for ot in object_types {
            if !ids.insert(ot.id.clone()) {
                return Err(ModelError::DuplicateId(ot.id));
            }
            objects.insert(ot.id.clone(), ot);
        }
        let mut facts = BTreeMap::new();
        for ft in fact_types {
            if !ids.insert(ft.id.clone()) {
                return Err(ModelError::DuplicateId(ft.id));
            }
            facts.insert(ft.id.clone(), ft);
        }
        let mut role_owner = BTreeMap::new();
        for ft in facts.values() {
            if ft.roles.is_empty() {
                return Err(ModelError::EmptyFactType(ft.id.clone()));
            }
            for role in &ft.roles {
                if ids.contains(&role.id) || role_owner.insert(role.id.clone(), ft.id.clone()).is_some() {
                    return Err(ModelError::DuplicateId(role.id.clone()));
                }
                if !ids.contains(&role.player) {
                    return Err(ModelError::UnknownPlayer {
                        role: role.id.clone(),
                        player: role.player.clone(),
                    });
                }
            }
        }

        let mut direct: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (sub, sup) in subtype_edges {
            for id in [&sub, &sup] {
                if !ids.contains(id) {
                    return Err(ModelError::UnknownType(id.clone()));
                }
            }
            direct.entry(sub).or_default().insert(sup);
        }
        let mut supers = BTreeMap::new();
        for id in &ids {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&String> = direct.get(id).into_iter().flatten().collect();
            while let Some(next) = stack.pop() {
                if next == id {
                    return Err(ModelError::SubtypeCycle(id.clone()));
                }
                if seen.insert(next.clone()) {
                    stack.extend(direct.get(next).into_iter().flatten());
                }
            }
            supers.insert(id.clone(), seen);
        }

        for id in objects.keys() {
            names.obj_names.entry(id.clone()).or_insert_with(|| id.clone());
        }
        for id in names.obj_names.keys() {
            if !ids.contains(id) {
                return Err(ModelError::UnknownNamed(id.clone()));
            }
        }
        let role_keys = names.role_names.keys().chain(names.reverse_role_names.keys());
        let pair_keys = names.pair_names.keys().flat_map(|(p, q)| [p, q]);
        for id in role_keys.chain(pair_keys) {
            if !role_owner.contains_key(id) {
                return Err(ModelError::UnknownNamed(id.clone()));
            }
        }
        names.lexicon()?;

        Ok(Model {
            object_types: objects,
            fact_types: facts,
            role_owner,
            supers,
            names,
        })
    }

    pub fn names(&self) -> &NameTables {
        &self.names
    }

    pub fn object_types(&self) -> impl Iterator<Item = &ObjectType> {
        self.object_types.values()
    }

    pub fn fact_types(&self) -> impl Iterator<Item = &FactType> {
        self.fact_types.values()
    }

    /// Object types and fact types.
    pub fn type_ids(&self) -> impl Iterator<Item = &str> {
        self.object_types.keys().chain(self.fact_types.keys()).map(String::as_str)
    }

    pub fn roles(&self) -> impl Iterator<Item = &RoleType> {
        self.fact_types.values().flat_map(|f| f.roles.iter())
    }

    pub fn is_object_type(&self, id: &str) -> bool {
        self.object_types.contains_key(id)
    }

    pub fn is_fact_type(&self, id: &str) -> bool {
        self.fact_types.contains_key(id)
    }

    pub fn is_type(&self, id: &str) -> bool {
        self.is_object_type(id) || self.is_fact_type(id)
    }

    fn check_type(&self, id: &str) -> Result<(), ModelError> {
        if self.is_type(id) {
            Ok(())
        } else {
            Err(ModelError::UnknownType(id.to_string()))
        }
    }

    pub fn fact_type(&self, id: &str) -> Result<&FactType, ModelError> {
        self.fact_types.get(id).ok_or_else(|| ModelError::UnknownType(id.to_string()))
    }

    pub fn role(&self, id: &str) -> Result<&RoleType, ModelError> {
        let fact = self.fact_of_role(id)?;
        Ok(fact.roles.iter().find(|r| r.id == id).expect("owner lists the role"))
    }

    pub fn fact_of_role(&self, id: &str) -> Result<&FactType, ModelError> {
        let owner = self.role_owner.get(id).ok_or_else(|| ModelError::UnknownRole(id.to_string()))?;
        Ok(&self.fact_types[owner])
    }

    /// `x ⊏ y`: transitive, irreflexive.
    pub fn sub(&self, x: &str, y: &str) -> Result<bool, ModelError> {
        self.check_type(x)?;
        self.check_type(y)?;
        Ok(self.supers[x].contains(y))
    }

    /// `x ⊑ y`
    pub fn sub_eq(&self, x: &str, y: &str) -> Result<bool, ModelError> {
        Ok(x == y && self.is_type(x) || self.sub(x, y)?)
    }

    pub fn supertypes(&self, x: &str) -> Result<&BTreeSet<String>, ModelError> {
        self.supers.get(x).ok_or_else(|| ModelError::UnknownType(x.to_string()))
    }

    /// `{y | y ⊏ x or y = x}`
    pub fn family(&self, x: &str) -> Result<BTreeSet<String>, ModelError> {
        self.check_type(x)?;
        Ok(self
            .supers
            .iter()
            .filter(|(id, sups)| id.as_str() == x || sups.contains(x))
            .map(|(id, _)| id.clone())
            .collect())
    }

    /// Families overlap.
    pub fn type_related(&self, x: &str, y: &str) -> Result<bool, ModelError> {
        let fx = self.family(x)?;
        let fy = self.family(y)?;
        Ok(fx.intersection(&fy).next().is_some())
    }

    /// Roles whose player is `p` or one of its supertypes.
    pub fn plays(&self, p: &str) -> Result<BTreeSet<String>, ModelError> {
        self.check_type(p)?;
        let mut out = BTreeSet::new();
        for role in self.roles() {
            if self.sub_eq(p, &role.player)? {
                out.insert(role.id.clone());
            }
        }
        Ok(out)
    }

    /// `{y | ∀x ∈ T. x ⊏ y}`
    pub fn common_super(&self, types: &[String]) -> Result<BTreeSet<String>, ModelError> {
        let mut iter = types.iter();
        let Some(first) = iter.next() else {
            return Ok(BTreeSet::new());
        };
        let mut common = self.supertypes(first)?.clone();
        for t in iter {
            let sups = self.supertypes(t)?;
            common.retain(|y| sups.contains(y));
        }
        Ok(common)
    }

    /// Types that directly play at least one role.
    pub fn player_types(&self) -> BTreeSet<&str> {
        self.roles().map(|r| r.player.as_str()).collect()
    }

    fn direct_pop(&self, s: &Snapshot, id: &str) -> BTreeSet<InstanceValue> {
        if self.is_fact_type(id) {
            s.facts.get(id).into_iter().flatten().map(|f| f.value.clone()).collect()
        } else {
            s.objects.get(id).cloned().unwrap_or_default()
        }
    }

    /// `Pop_t(id)`: the stored population united with that of every subtype.
    pub fn pop(&self, s: &Snapshot, id: &str) -> Result<BTreeSet<InstanceValue>, ModelError> {
        let mut out = BTreeSet::new();
        for member in self.family(id)? {
            out.extend(self.direct_pop(s, &member));
        }
        Ok(out)
    }

    /// `(player, fact)` pairs of a role at one snapshot.
    pub fn role_extension(
        &self,
        s: &Snapshot,
        role: &str,
    ) -> Result<BTreeSet<(InstanceValue, InstanceValue)>, ModelError> {
        let fact = self.fact_of_role(role)?;
        Ok(s.facts
            .get(&fact.id)
            .into_iter()
            .flatten()
            .filter_map(|f| f.bindings.get(role).map(|p| (p.clone(), f.value.clone())))
            .collect())
    }
}

/// Fluent construction, mostly for tests and fixtures.
#[derive(Debug, Default)]
pub struct ModelBuilder {
    object_types: Vec<ObjectType>,
    fact_types: Vec<FactType>,
    subtypes: Vec<(String, String)>,
    names: NameTables,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entity(mut self, id: &str) -> Self {
        self.object_types.push(ObjectType { id: id.into(), kind: TypeKind::Entity });
        self
    }

    pub fn value_type(mut self, id: &str) -> Self {
        self.object_types.push(ObjectType { id: id.into(), kind: TypeKind::Value });
        self
    }

    /// `roles` are `(role id, player id)` in order.
    pub fn fact(mut self, id: &str, roles: &[(&str, &str)]) -> Self {
        self.fact_types.push(FactType {
            id: id.into(),
            roles: roles
                .iter()
                .map(|(r, p)| RoleType { id: (*r).into(), player: (*p).into() })
                .collect(),
        });
        self
    }

    pub fn subtype(mut self, sub: &str, sup: &str) -> Self {
        self.subtypes.push((sub.into(), sup.into()));
        self
    }

    pub fn object_name(mut self, id: &str, name: &str) -> Self {
        self.names.obj_names.insert(id.into(), name.into());
        self
    }

    pub fn role_name(mut self, id: &str, name: &str) -> Self {
        self.names.role_names.insert(id.into(), name.into());
        self
    }

    pub fn reverse_role_name(mut self, id: &str, name: &str) -> Self {
        self.names.reverse_role_names.insert(id.into(), name.into());
        self
    }

    pub fn pair_name(mut self, from: &str, to: &str, name: &str) -> Self {
        self.names.pair_names.insert((from.into(), to.into()), name.into());
        self
    }

    pub fn build(self) -> Result<Model, ModelError> {
        Model::new(self.object_types, self.fact_types, self.subtypes, self.names)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::FactInstance;

    fn animals() -> Model {
        ModelBuilder::new()
            .entity("Animal")
            .entity("FleshEater")
            .entity("PlantEater")
            .entity("Food")
            .entity("Vehicle")
            .entity("Distance")
            .fact("Eats", &[("eater", "Animal"), ("eaten", "Food")])
            .subtype("FleshEater", "Animal")
            .subtype("PlantEater", "Animal")
            .build()
            .unwrap()
    }

    #[test]
    fn subtyping_closure() {
        let m = ModelBuilder::new()
            .entity("X")
            .entity("Y")
            .entity("Z")
            .subtype("X", "Y")
            .subtype("Y", "Z")
            .build()
            .unwrap();
        assert!(m.sub("X", "Z").unwrap());
        assert!(!m.sub("X", "X").unwrap());
        assert!(m.sub_eq("X", "X").unwrap());
        assert!(!m.sub("Z", "X").unwrap());
        assert!(matches!(m.sub("X", "Nope"), Err(ModelError::UnknownType(_))));
    }

    #[test]
    fn cycles_are_rejected() {
        let err = ModelBuilder::new()
            .entity("X")
            .entity("Y")
            .subtype("X", "Y")
            .subtype("Y", "X")
            .build()
            .unwrap_err();
        assert!(matches!(err, ModelError::SubtypeCycle(_)));
    }

    #[test]
    fn players_must_be_declared() {
        let err = ModelBuilder::new().fact("F", &[("p", "A")]).build().unwrap_err();
        assert!(matches!(err, ModelError::UnknownPlayer { .. }));
    }

    #[test]
    fn family_and_relatedness() {
        let m = animals();
        let fam: Vec<_> = m.family("Animal").unwrap().into_iter().collect();
        assert_eq!(fam, ["Animal", "FleshEater", "PlantEater"]);
        assert!(!m.type_related("Vehicle", "Distance").unwrap());
        assert!(m.type_related("Vehicle", "Vehicle").unwrap());
        assert!(m.type_related("Animal", "FleshEater").unwrap());
        assert!(!m.type_related("FleshEater", "PlantEater").unwrap());
    }

    #[test]
    fn plays_follows_supertypes() {
        let m = animals();
        assert!(m.plays("Animal").unwrap().contains("eater"));
        assert!(m.plays("FleshEater").unwrap().contains("eater"));
        assert!(m.plays("Vehicle").unwrap().is_empty());
    }

    #[test]
    fn pop_unions_subtypes() {
        let m = animals();
        let s = Snapshot::new(0).with_objects("FleshEater", ["lion"]);
        assert_eq!(m.pop(&s, "Animal").unwrap(), BTreeSet::from([InstanceValue::atom("lion")]));
        assert!(m.pop(&s, "PlantEater").unwrap().is_empty());
    }

    #[test]
    fn pop_of_fact_type_is_fact_values() {
        let m = ModelBuilder::new()
            .entity("A")
            .entity("B")
            .fact("F", &[("p", "A"), ("q", "B")])
            .build()
            .unwrap();
        let fact = |a: &str, b: &str| {
            FactInstance::new(
                InstanceValue::tuple_of(&[a, b]),
                [("p".to_string(), a.into()), ("q".to_string(), b.into())],
            )
        };
        let s = Snapshot::new(0).with_fact("F", fact("1", "A")).with_fact("F", fact("2", "B"));
        assert_eq!(m.pop(&s, "F").unwrap().len(), 2);
        let ext = m.role_extension(&s, "q").unwrap();
        assert!(ext.contains(&("A".into(), InstanceValue::tuple_of(&["1", "A"]))));
        assert!(m.role_extension(&Snapshot::new(0), "p").unwrap().is_empty());
        assert!(matches!(m.role_extension(&s, "zz"), Err(ModelError::UnknownRole(_))));
    }

    #[test]
    fn common_supertypes() {
        let m = animals();
        let cs = m.common_super(&["FleshEater".into(), "PlantEater".into()]).unwrap();
        assert_eq!(cs, BTreeSet::from(["Animal".to_string()]));
    }

    #[test]
    fn object_names_default_to_ids() {
        let m = animals();
        assert_eq!(m.names().object_name("Food"), Some("Food"));
    }
}
