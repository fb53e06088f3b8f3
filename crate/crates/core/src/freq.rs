//! The computational layer: frequency algebras.
//!
//! A frequency states how often an element occurs in a result. Four carriers are
//! provided: booleans, naturals (multisets), integers, and finite distributions
//! over one of those three. Every carrier offers the same five binary operations
//! (`∨ ∧ ⊕ ⊗ ⊖`) and the constants one and zero.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FreqError {
    #[error("frequency domain mismatch: {left} vs {right}")]
    DomainMismatch {
        left: FrequencyDomain,
        right: FrequencyDomain,
    },
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("value {value} is not in the carrier of {base:?}")]
    InvalidCarrier { base: BaseKind, value: i64 },
    #[error("unknown frequency domain `{0}` (expected bool, nat, int, dist-bool, dist-nat or dist-int)")]
    UnknownDomain(String),
}

/// Carriers a distribution may range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseKind {
    Bool,
    Nat,
    Int,
}

impl BaseKind {
    fn contains(self, value: i64) -> bool {
        match self {
            BaseKind::Bool => value == 0 || value == 1,
            BaseKind::Nat => value >= 0,
            BaseKind::Int => true,
        }
    }

    /// The operation on raw carrier values (booleans as 0/1).
    fn apply(self, op: FreqOp, a: i64, b: i64) -> i64 {
        match (self, op) {
            (_, FreqOp::Join) => a.max(b),
            (_, FreqOp::Meet) => a.min(b),
            (BaseKind::Bool, FreqOp::Add) => a.max(b),
            (BaseKind::Bool, FreqOp::Times) => a.min(b),
            (_, FreqOp::Add) => a.saturating_add(b),
            (_, FreqOp::Times) => a.saturating_mul(b),
            (BaseKind::Int, FreqOp::Minus) => a.saturating_sub(b),
            (_, FreqOp::Minus) => a.saturating_sub(b).max(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyDomain {
    Bool,
    Nat,
    Int,
    /// Distributions over a base carrier. Nesting is ruled out by construction.
    Dist(BaseKind),
}

impl FrequencyDomain {
    pub const ALL: [FrequencyDomain; 6] = [
        FrequencyDomain::Bool,
        FrequencyDomain::Nat,
        FrequencyDomain::Int,
        FrequencyDomain::Dist(BaseKind::Bool),
        FrequencyDomain::Dist(BaseKind::Nat),
        FrequencyDomain::Dist(BaseKind::Int),
    ];

    pub fn one(self) -> Frequency {
        match self {
            FrequencyDomain::Bool => Frequency::Bool(true),
            FrequencyDomain::Nat => Frequency::Nat(1),
            FrequencyDomain::Int => Frequency::Int(1),
            FrequencyDomain::Dist(base) => Frequency::Dist(Distribution::point(base, 1)),
        }
    }

    pub fn zero(self) -> Frequency {
        match self {
            FrequencyDomain::Bool => Frequency::Bool(false),
            FrequencyDomain::Nat => Frequency::Nat(0),
            FrequencyDomain::Int => Frequency::Int(0),
            FrequencyDomain::Dist(base) => Frequency::Dist(Distribution::point(base, 0)),
        }
    }

    /// True when zero annihilates `⊗`, is neutral for `⊕`, and a `∨`-fold
    /// started at zero is unaffected by further zero terms. Evaluators may then
    /// skip zero-valued rows. Holds for the scalar carriers, not for distributions.
    pub fn zero_is_sparse(self) -> bool {
        !matches!(self, FrequencyDomain::Dist(_))
    }

    /// True when `meet(zero, v) = zero` for every reachable `v` (non-negative carriers).
    pub fn meet_zero_absorbs(self) -> bool {
        matches!(self, FrequencyDomain::Bool | FrequencyDomain::Nat)
    }

    /// Lifts a raw carrier value (booleans as 0/1) into this domain; distributions
    /// get a point mass.
    pub fn from_raw(self, value: i64) -> Result<Frequency, FreqError> {
        let base = match self {
            FrequencyDomain::Bool => BaseKind::Bool,
            FrequencyDomain::Nat => BaseKind::Nat,
            FrequencyDomain::Int => BaseKind::Int,
            FrequencyDomain::Dist(base) => base,
        };
        if !base.contains(value) {
            return Err(FreqError::InvalidCarrier { base, value });
        }
        Ok(match self {
            FrequencyDomain::Bool => Frequency::Bool(value == 1),
            FrequencyDomain::Nat => Frequency::Nat(value as u64),
            FrequencyDomain::Int => Frequency::Int(value),
            FrequencyDomain::Dist(base) => Frequency::Dist(Distribution::point(base, value)),
        })
    }
}

impl fmt::Display for FrequencyDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FrequencyDomain::Bool => "bool",
            FrequencyDomain::Nat => "nat",
            FrequencyDomain::Int => "int",
            FrequencyDomain::Dist(BaseKind::Bool) => "dist-bool",
            FrequencyDomain::Dist(BaseKind::Nat) => "dist-nat",
            FrequencyDomain::Dist(BaseKind::Int) => "dist-int",
        };
        f.write_str(s)
    }
}

impl FromStr for FrequencyDomain {
    type Err = FreqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FrequencyDomain::ALL
            .into_iter()
            .find(|d| d.to_string() == s)
            .ok_or_else(|| FreqError::UnknownDomain(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FreqOp {
    Join,
    Meet,
    Add,
    Times,
    Minus,
}

impl FreqOp {
    pub const ALL: [FreqOp; 5] = [FreqOp::Join, FreqOp::Meet, FreqOp::Add, FreqOp::Times, FreqOp::Minus];

    pub fn symbol(self) -> &'static str {
        match self {
            FreqOp::Join => "∨",
            FreqOp::Meet => "∧",
            FreqOp::Add => "⊕",
            FreqOp::Times => "⊗",
            FreqOp::Minus => "⊖",
        }
    }
}

/// A finite map from base-carrier values to probabilities. Absent keys have
/// probability zero and zero-probability keys are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    base: BaseKind,
    probs: BTreeMap<i64, f64>,
}

impl Distribution {
    pub fn new(base: BaseKind, probs: impl IntoIterator<Item = (i64, f64)>) -> Result<Self, FreqError> {
        let mut map = BTreeMap::new();
        for (value, p) in probs {
            if !base.contains(value) {
                return Err(FreqError::InvalidCarrier { base, value });
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(FreqError::InvalidProbability(p));
            }
            if p > 0.0 {
                map.insert(value, p);
            }
        }
        Ok(Distribution { base, probs: map })
    }

    pub fn point(base: BaseKind, value: i64) -> Self {
        Distribution {
            base,
            probs: BTreeMap::from([(value, 1.0)]),
        }
    }

    pub fn base(&self) -> BaseKind {
        self.base
    }

    pub fn prob(&self, value: i64) -> f64 {
        self.probs.get(&value).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().map(|(k, v)| (*k, *v))
    }

    /// `(a Θ b)(n) = 1 − Π_{i Θ j = n} (1 − a(i)·b(j))`, enumerating support pairs.
    fn combine(op: FreqOp, a: &Distribution, b: &Distribution) -> Distribution {
        let mut complement: BTreeMap<i64, f64> = BTreeMap::new();
        for (&i, &pa) in &a.probs {
            for (&j, &pb) in &b.probs {
                let n = a.base.apply(op, i, j);
                *complement.entry(n).or_insert(1.0) *= 1.0 - pa * pb;
            }
        }
        let probs = complement
            .into_iter()
            .map(|(n, c)| (n, 1.0 - c))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        Distribution { base: a.base, probs }
    }

    /// True when both have the same support and every probability is within `tol`.
    pub fn approx_eq(&self, other: &Distribution, tol: f64) -> bool {
        if self.base != other.base {
            return false;
        }
        let keys: std::collections::BTreeSet<i64> = self.probs.keys().chain(other.probs.keys()).copied().collect();
        keys.into_iter().all(|k| (self.prob(k) - other.prob(k)).abs() <= tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Frequency {
    Bool(bool),
    Nat(u64),
    Int(i64),
    Dist(Distribution),
}

impl Frequency {
    pub fn domain(&self) -> FrequencyDomain {
        match self {
            Frequency::Bool(_) => FrequencyDomain::Bool,
            Frequency::Nat(_) => FrequencyDomain::Nat,
            Frequency::Int(_) => FrequencyDomain::Int,
            Frequency::Dist(d) => FrequencyDomain::Dist(d.base),
        }
    }

    pub fn apply(&self, op: FreqOp, other: &Frequency) -> Result<Frequency, FreqError> {
        Ok(match (self, other) {
            (Frequency::Bool(a), Frequency::Bool(b)) => {
                Frequency::Bool(BaseKind::Bool.apply(op, *a as i64, *b as i64) == 1)
            }
            (Frequency::Nat(a), Frequency::Nat(b)) => Frequency::Nat(match op {
                FreqOp::Join => *a.max(b),
                FreqOp::Meet => *a.min(b),
                FreqOp::Add => a.saturating_add(*b),
                FreqOp::Times => a.saturating_mul(*b),
                FreqOp::Minus => a.saturating_sub(*b),
            }),
            (Frequency::Int(a), Frequency::Int(b)) => Frequency::Int(BaseKind::Int.apply(op, *a, *b)),
            (Frequency::Dist(a), Frequency::Dist(b)) if a.base == b.base => {
                Frequency::Dist(Distribution::combine(op, a, b))
            }
            _ => {
                return Err(FreqError::DomainMismatch {
                    left: self.domain(),
                    right: other.domain(),
                })
            }
        })
    }

    pub fn join(&self, other: &Frequency) -> Result<Frequency, FreqError> {
        self.apply(FreqOp::Join, other)
    }

    pub fn meet(&self, other: &Frequency) -> Result<Frequency, FreqError> {
        self.apply(FreqOp::Meet, other)
    }

    pub fn add(&self, other: &Frequency) -> Result<Frequency, FreqError> {
        self.apply(FreqOp::Add, other)
    }

    pub fn times(&self, other: &Frequency) -> Result<Frequency, FreqError> {
        self.apply(FreqOp::Times, other)
    }

    pub fn minus(&self, other: &Frequency) -> Result<Frequency, FreqError> {
        self.apply(FreqOp::Minus, other)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Frequency::Bool(b) => !b,
            Frequency::Nat(n) => *n == 0,
            Frequency::Int(n) => *n == 0,
            Frequency::Dist(d) => d.probs.len() == 1 && d.prob(0) == 1.0,
        }
    }

    /// Zero is false, anything else is true.
    pub fn is_truthy(&self) -> bool {
        !self.is_zero()
    }

    /// JSON rendering used by reports: booleans and integers as JSON scalars,
    /// distributions as an object keyed by the base value.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Frequency::Bool(b) => serde_json::Value::from(*b),
            Frequency::Nat(n) => serde_json::Value::from(*n),
            Frequency::Int(n) => serde_json::Value::from(*n),
            Frequency::Dist(d) => serde_json::Value::Object(
                d.iter().map(|(k, p)| (k.to_string(), serde_json::Value::from(p))).collect(),
            ),
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Bool(b) => write!(f, "{}", *b as u8),
            Frequency::Nat(n) => write!(f, "{n}"),
            Frequency::Int(n) => write!(f, "{n}"),
            Frequency::Dist(d) => {
                f.write_str("{")?;
                for (idx, (k, p)) in d.iter().enumerate() {
                    if idx > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {p}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// `Count{X} = ⊕_{x ∈ X} 1̂`, folded from zero.
pub fn count<I: IntoIterator>(items: I, domain: FrequencyDomain) -> Frequency {
    let one = domain.one();
    items.into_iter().fold(domain.zero(), |acc, _| {
        acc.add(&one).expect("one and zero share the domain")
    })
}

/// `⋀` over a non-empty sequence, reduced without a starting element so a
/// single value passes through unchanged; one when empty.
pub fn meet_all<I>(items: I, domain: FrequencyDomain) -> Result<Frequency, FreqError>
where
    I: IntoIterator<Item = Frequency>,
{
    let mut iter = items.into_iter();
    let Some(first) = iter.next() else {
        return Ok(domain.one());
    };
    iter.try_fold(first, |acc, v| acc.meet(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(base: BaseKind, probs: &[(i64, f64)]) -> Frequency {
        Frequency::Dist(Distribution::new(base, probs.iter().copied()).unwrap())
    }

    #[test]
    fn nat_times() {
        assert_eq!(Frequency::Nat(2).times(&Frequency::Nat(3)).unwrap(), Frequency::Nat(6));
    }

    #[test]
    fn bool_minus_saturates() {
        let one = Frequency::Bool(true);
        assert_eq!(one.minus(&one).unwrap(), Frequency::Bool(false));
        assert_eq!(Frequency::Bool(false).minus(&one).unwrap(), Frequency::Bool(false));
    }

    #[test]
    fn int_minus_goes_negative() {
        assert_eq!(Frequency::Int(1).minus(&Frequency::Int(3)).unwrap(), Frequency::Int(-2));
        assert_eq!(Frequency::Nat(1).minus(&Frequency::Nat(3)).unwrap(), Frequency::Nat(0));
    }

    #[test]
    fn dist_add_single_pair() {
        let a = dist(BaseKind::Nat, &[(1, 0.5)]);
        let Frequency::Dist(sum) = a.add(&a).unwrap() else { panic!() };
        let expected = Distribution::new(BaseKind::Nat, [(2, 0.25)]).unwrap();
        assert!(sum.approx_eq(&expected, 1e-12), "{sum:?}");
    }

    #[test]
    fn dist_drops_zero_probabilities() {
        let a = dist(BaseKind::Nat, &[(1, 0.0), (2, 0.5)]);
        let Frequency::Dist(d) = a else { panic!() };
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![(2, 0.5)]);
    }

    #[test]
    fn dist_rejects_bad_inputs() {
        assert!(matches!(
            Distribution::new(BaseKind::Nat, [(1, 1.5)]),
            Err(FreqError::InvalidProbability(_))
        ));
        assert!(matches!(
            Distribution::new(BaseKind::Nat, [(-1, 0.5)]),
            Err(FreqError::InvalidCarrier { .. })
        ));
        assert!(Distribution::new(BaseKind::Bool, [(2, 0.5)]).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(FrequencyDomain::Nat.one(), Frequency::Nat(1));
        assert_eq!(FrequencyDomain::Bool.zero(), Frequency::Bool(false));
        assert_eq!(
            FrequencyDomain::Dist(BaseKind::Nat).one(),
            dist(BaseKind::Nat, &[(1, 1.0)])
        );
    }

    #[test]
    fn counting() {
        assert_eq!(count(0..3, FrequencyDomain::Nat), Frequency::Nat(3));
        assert_eq!(count(0..2, FrequencyDomain::Bool), Frequency::Bool(true));
        for d in FrequencyDomain::ALL {
            assert_eq!(count(std::iter::empty::<()>(), d), d.zero());
        }
        assert_eq!(count(0..1, FrequencyDomain::Dist(BaseKind::Nat)), FrequencyDomain::Dist(BaseKind::Nat).one());
    }

    #[test]
    fn truthiness() {
        assert!(!Frequency::Nat(0).is_truthy());
        assert!(Frequency::Nat(5).is_truthy());
        assert!(!dist(BaseKind::Nat, &[(0, 1.0)]).is_truthy());
        assert!(dist(BaseKind::Nat, &[(0, 0.5)]).is_truthy());
        assert!(Frequency::Int(-1).is_truthy());
    }

    #[test]
    fn mismatch_is_an_error() {
        let err = Frequency::Nat(1).add(&Frequency::Int(1)).unwrap_err();
        assert_eq!(
            err,
            FreqError::DomainMismatch { left: FrequencyDomain::Nat, right: FrequencyDomain::Int }
        );
        let err = dist(BaseKind::Nat, &[(1, 1.0)]).add(&dist(BaseKind::Int, &[(1, 1.0)]));
        assert!(err.is_err());
    }

    #[test]
    fn domain_names_round_trip() {
        for d in FrequencyDomain::ALL {
            assert_eq!(d.to_string().parse::<FrequencyDomain>().unwrap(), d);
        }
        assert!("dist-dist".parse::<FrequencyDomain>().is_err());
    }

    #[test]
    fn bool_add_times_coincide_with_join_meet() {
        for a in [false, true] {
            for b in [false, true] {
                let (a, b) = (Frequency::Bool(a), Frequency::Bool(b));
                assert_eq!(a.add(&b).unwrap(), a.join(&b).unwrap());
                assert_eq!(a.times(&b).unwrap(), a.meet(&b).unwrap());
            }
        }
    }

    #[test]
    fn meet_with_one_is_not_neutral_above_one() {
        // min(a, 1) = a only on {0, 1}; the law is a boolean one.
        assert_eq!(Frequency::Nat(5).meet(&FrequencyDomain::Nat.one()).unwrap(), Frequency::Nat(1));
    }

    fn nat() -> impl Strategy<Value = Frequency> {
        (0u64..1000).prop_map(Frequency::Nat)
    }

    fn int() -> impl Strategy<Value = Frequency> {
        (-1000i64..1000).prop_map(Frequency::Int)
    }

    fn small_dist() -> impl Strategy<Value = Frequency> {
        proptest::collection::btree_map(0i64..4, 0.0f64..=1.0, 1..3)
            .prop_map(|m| Frequency::Dist(Distribution::new(BaseKind::Nat, m).unwrap()))
    }

    const COMMUTATIVE: [FreqOp; 4] = [FreqOp::Join, FreqOp::Meet, FreqOp::Add, FreqOp::Times];

    proptest! {
        #[test]
        fn nat_laws(a in nat(), b in nat(), c in nat()) {
            for op in COMMUTATIVE {
                prop_assert_eq!(a.apply(op, &b).unwrap(), b.apply(op, &a).unwrap());
                prop_assert_eq!(
                    a.apply(op, &b.apply(op, &c).unwrap()).unwrap(),
                    a.apply(op, &b).unwrap().apply(op, &c).unwrap()
                );
            }
            let (one, zero) = (FrequencyDomain::Nat.one(), FrequencyDomain::Nat.zero());
            prop_assert_eq!(a.times(&zero).unwrap(), zero.clone());
            prop_assert_eq!(a.meet(&zero).unwrap(), zero.clone());
            prop_assert_eq!(a.join(&zero).unwrap(), a.clone());
            prop_assert_eq!(a.add(&zero).unwrap(), a.clone());
            prop_assert_eq!(a.times(&one).unwrap(), a.clone());
            prop_assert!(!matches!(a.minus(&b).unwrap(), Frequency::Nat(n) if n > 1000));
        }

        #[test]
        fn int_laws(a in int(), b in int(), c in int()) {
            for op in COMMUTATIVE {
                prop_assert_eq!(a.apply(op, &b).unwrap(), b.apply(op, &a).unwrap());
                prop_assert_eq!(
                    a.apply(op, &b.apply(op, &c).unwrap()).unwrap(),
                    a.apply(op, &b).unwrap().apply(op, &c).unwrap()
                );
            }
            let (one, zero) = (FrequencyDomain::Int.one(), FrequencyDomain::Int.zero());
            prop_assert_eq!(a.times(&zero).unwrap(), zero.clone());
            prop_assert_eq!(a.add(&zero).unwrap(), a.clone());
            prop_assert_eq!(a.times(&one).unwrap(), a.clone());
        }

        #[test]
        fn dist_outputs_stay_probabilities(a in small_dist(), b in small_dist()) {
            for op in FreqOp::ALL {
                let Frequency::Dist(d) = a.apply(op, &b).unwrap() else { unreachable!() };
                for (_, p) in d.iter() {
                    prop_assert!((0.0..=1.0).contains(&p));
                }
            }
        }

        #[test]
        fn dist_commutes(a in small_dist(), b in small_dist()) {
            for op in COMMUTATIVE {
                let (Frequency::Dist(x), Frequency::Dist(y)) = (a.apply(op, &b).unwrap(), b.apply(op, &a).unwrap()) else { unreachable!() };
                prop_assert!(x.approx_eq(&y, 1e-12));
            }
        }
    }
}
