//! Discrete Bayesian networks with exact inference.
//!
//! A [`Network`] is an immutable DAG of [`Variable`]s, each carrying a
//! conditional probability table over its parents. The joint distribution
//! factorizes as the product of those tables, and a posterior query
//! normalizes the joint summed over every hidden variable.
//!
//! Two exact engines are provided: [`posterior_enumeration`], which walks
//! every completion of the evidence and serves as the reference, and
//! [`posterior_ve`], which eliminates hidden variables factor by factor.

mod evidence;
mod factor;
mod inference;
pub mod io;
mod network;
mod prune;

pub use evidence::{Assignment, Distribution, Evidence, DISTRIBUTION_TOLERANCE};
pub use inference::{
    joint_probability, posterior_enumeration, posterior_ve, posterior_ve_with_order, EliminationOrder,
};
pub use network::{build_network, Cpt, CptDef, Network, Scale, Variable, ROW_SUM_TOLERANCE};
pub use prune::prune_barren;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BnError {
    #[error("network has no variables")]
    EmptyNetwork,
    #[error("variable `{variable}` needs at least 2 states, found {count}")]
    TooFewStates { variable: String, count: usize },
    #[error("variable `{variable}` lists state `{state}` twice")]
    DuplicateState { variable: String, state: String },
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` has no state `{state}`")]
    UnknownState { variable: String, state: String },
    #[error("state index {index} out of range for `{variable}` ({cardinality} states)")]
    StateOutOfRange { variable: String, index: usize, cardinality: usize },
    #[error("CPT for `{child}` names unknown or repeated parent `{parent}`")]
    UnknownParent { child: String, parent: String },
    #[error("variable `{0}` has more than one CPT")]
    DuplicateCpt(String),
    #[error("variable `{0}` has no CPT")]
    MissingCpt(String),
    #[error("CPT for `{child}`: expected {expected} {what}, found {found}")]
    RowLengthMismatch { child: String, expected: usize, found: usize, what: &'static str },
    #[error("CPT for `{child}` row {row}: {value} is not a probability")]
    InvalidProbability { child: String, row: usize, value: f64 },
    #[error("CPT for `{child}` row {row} sums to {sum}, not 1")]
    UnnormalizedRow { child: String, row: usize, sum: f64 },
    #[error("cycle detected among variables {variables:?}")]
    CycleDetected { variables: Vec<String> },
    #[error("assignment covers {found} of {expected} variables")]
    IncompleteAssignment { expected: usize, found: usize },
    #[error("query variable `{0}` is also observed")]
    QueryIsEvidence(String),
    #[error("evidence has zero probability under the model")]
    ZeroProbabilityEvidence,
    #[error("invalid elimination order: {0}")]
    InvalidEliminationOrder(String),
    #[error("invalid distribution over `{variable}`: {reason}")]
    InvalidDistribution { variable: String, reason: String },
}
