//! A restricted uniquest: joins a sequence of roles through the shortest
//! unambiguous chains of role steps to a common central type.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::Model;
use crate::path::PathExpr;

use super::ConstraintError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinPathResult {
    pub path: PathExpr,
    pub central_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Step {
    Forward(String),
    Backward(String),
}

/// (steps, reverse steps): chains compare by length, then by how many
/// reverse-role steps they take.
type Cost = (usize, usize);

fn cost(chain: &[Step]) -> Cost {
    let back = chain.iter().filter(|s| matches!(s, Step::Backward(_))).count();
    (chain.len(), back)
}

struct Search<'m> {
    model: &'m Model,
    limit: usize,
    /// Per reachable type: the cheapest chains, all of equal cost.
    best: BTreeMap<String, (Cost, BTreeSet<Vec<Step>>)>,
}

impl Search<'_> {
    fn record(&mut self, node: &str, chain: &[Step]) {
        let c = cost(chain);
        let slot = self.best.entry(node.to_string()).or_insert_with(|| (c, BTreeSet::new()));
        if c < slot.0 {
            *slot = (c, BTreeSet::new());
        }
        if c == slot.0 {
            slot.1.insert(chain.to_vec());
        }
    }

    fn walk(&mut self, node: &str, visited: &mut BTreeSet<String>, chain: &mut Vec<Step>) {
        self.record(node, chain);
        if chain.len() >= self.limit {
            return;
        }
        let mut moves: Vec<(Step, String)> = Vec::new();
        if let Ok(fact) = self.model.fact_type(node) {
            for role in &fact.roles {
                moves.push((Step::Backward(role.id.clone()), role.player.clone()));
            }
        }
        for role in self.model.roles() {
            if self.model.sub_eq(node, &role.player).unwrap_or(false) {
                let fact = self.model.fact_of_role(&role.id).expect("declared role");
                moves.push((Step::Forward(role.id.clone()), fact.id.clone()));
            }
        }
        for (step, target) in moves {
            let is_fact = self.model.is_fact_type(&target);
            if is_fact && visited.contains(&target) {
                continue;
            }
            if is_fact {
                visited.insert(target.clone());
            }
            chain.push(step);
            self.walk(&target, visited, chain);
            chain.pop();
            if is_fact {
                visited.remove(&target);
            }
        }
    }
}

fn branch_path(role: &str, chain: &[Step]) -> PathExpr {
    chain.iter().fold(PathExpr::role(role), |acc, step| match step {
        Step::Forward(r) => acc.concat(PathExpr::role(r)),
        Step::Backward(r) => acc.concat(PathExpr::role(r).reverse()),
    })
}

/// `JoinPath(R)`: the confluence of one branch per role, each starting with
/// that role and ending at the central type.
pub fn join_path(model: &Model, roles: &[String]) -> Result<JoinPathResult, ConstraintError> {
    if roles.is_empty() {
        return Err(ConstraintError::EmptyRoles);
    }
    let limit = 2 * model.fact_types().count() + 1;
    let mut per_branch = Vec::with_capacity(roles.len());
    for role in roles {
        let fact = model.fact_of_role(role)?.id.clone();
        let mut search = Search {
            model,
            limit,
            best: BTreeMap::new(),
        };
        let mut visited = BTreeSet::from([fact.clone()]);
        search.walk(&fact, &mut visited, &mut Vec::new());
        per_branch.push(search.best);
    }

    let mut candidates: Vec<(Cost, &String)> = per_branch[0]
        .keys()
        .filter(|node| per_branch.iter().all(|b| b.contains_key(*node)))
        .map(|node| {
            let total = per_branch.iter().fold((0, 0), |(l, r), b| {
                let (c, _) = &b[node];
                (l + c.0, r + c.1)
            });
            (total, node)
        })
        .collect();
    candidates.sort();
    let Some(&(best_cost, central)) = candidates.first() else {
        return Err(ConstraintError::NoJoinPath(roles.to_vec()));
    };
    let tied = candidates.iter().filter(|(c, _)| *c == best_cost).count() > 1;
    let forked = per_branch.iter().any(|b| b[central].1.len() > 1);
    if tied || forked {
        return Err(ConstraintError::AmbiguousJoinPath(roles.to_vec()));
    }
    let branches = roles
        .iter()
        .zip(&per_branch)
        .map(|(role, b)| branch_path(role, b[central].1.iter().next().expect("non-empty")))
        .collect();
    Ok(JoinPathResult {
        path: PathExpr::Confluence(branches),
        central_type: central.clone(),
    })
}
