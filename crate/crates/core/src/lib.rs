//! Simultaneous identification of causal effects from a candidate set of
//! strictly acyclic maximally oriented partially directed graphs
//! (SA-MPDAGs), with exact evaluation on discrete distributions and a
//! brute-force oracle.

pub mod chain;
pub mod density;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod identify;
pub mod mpdag;
pub mod oracle;
pub mod random;

pub use chain::{EquivalenceVerdict, MinimalComplex, Witness};
pub use density::{DiscreteDistribution, Exact, InterventionalMarginal, Intervention, Scalar, VariableSpec};
pub use error::{Error, Result};
pub use graph::{EdgeKind, NodeId, NodeSet, PDGraph};
pub use identify::{CandidateSet, IdentFormula, IdentQuery, IdentReport, Verdict};
pub use mpdag::{BackgroundKnowledge, SaMpdag};
pub use oracle::{OracleVerdict, SearchOutcome};
