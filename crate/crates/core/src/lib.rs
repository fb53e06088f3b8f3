//! Object-Role Calculus: a rule engine over ORM models and their populations.
//!
//! Layers, bottom up: [`freq`] (frequency algebras), [`model`] and
//! [`population`] (schema and snapshots), [`logic`] (formula valuation),
//! [`path`] (path expressions and their tables), [`constraint`] (graphical
//! constraints) and [`descriptor`] (the natural-language rule syntax).
//! [`validate`] checks population axioms and [`io`] reads the JSON file formats.

pub mod constraint;
pub mod descriptor;
pub mod freq;
pub mod io;
pub mod logic;
pub mod model;
pub mod path;
pub mod population;
pub mod rule;
pub mod validate;
pub mod world;

pub use freq::{Frequency, FrequencyDomain};
pub use model::{Model, ModelBuilder, ModelError};
pub use population::{InstanceValue, PopulationSequence, Snapshot};
pub use world::World;
