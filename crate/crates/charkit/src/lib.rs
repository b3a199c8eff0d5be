//! Characteristic formulae for behavioural preorders and equivalences over
//! finite labelled transition systems.
//!
//! For a chosen semantics the crate builds a recursive modal declaration with
//! one equation per state of the target system, solves it by fixed-point
//! iteration, and reads the resulting greatest (or least) fixed point back as
//! a relation between states. A deliberately naive relational oracle computes
//! the same fixed points directly from their defining clauses, so the two
//! routes can be compared pair for pair; [`difftest`] automates that
//! comparison over random systems.
//!
//! All structures are immutable after construction and the solvers are pure,
//! so values can be shared freely across threads. Sizes are desk scale:
//! states, labels and agents are dense indices, state sets and relations are
//! fixed-width bitsets.

pub mod declgen;
pub mod difftest;
pub mod logic;
pub mod lts;
pub mod oracle;
pub mod semantics;
pub mod set;
pub mod solver;

pub use declgen::{expresses_upto_check, gen, GenError, GeneratedSystem};
pub use logic::{
    eval, satisfies, Declaration, Environment, FixMode, Formula, LogicError, Modality, VarId,
};
pub use lts::{parse_lts, random_lts, AgentId, LabelId, Lts, LtsBuilder, RandomLtsConfig, StateId};
pub use oracle::{gfp, lfp, step, Relation, StepFunction};
pub use semantics::Semantics;
pub use set::StateSet;
pub use solver::{env_to_relation, solve_max, solve_min, SolveError, SolveStats};
