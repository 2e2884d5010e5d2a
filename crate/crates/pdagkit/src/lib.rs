//! Symbolic prompt-chain causal reasoning over verbalized premises.
//!
//! The crate reconstructs a partially directed causal graph from statements
//! such as "A correlates with C" and "A is independent of B", answers causal
//! hypotheses against it, generates labeled premise/hypothesis benchmarks from
//! exhaustive DAG enumeration, and evaluates chat-style LLM backends with the
//! nine-step prompt chain.

pub mod engine;
pub mod graph;
pub mod harness;
pub mod cli;
pub mod hypothesis;
pub mod premise;
pub mod dataset;
pub mod vars;

pub use engine::{run_engine, AdjMatrix, EngineOptions, FilterMode, RelationSet, Trace};
pub use graph::{Dag, Mec};
pub use hypothesis::{Answer, EvalMode, Hypothesis, HypothesisKind, Label, Verdict};
pub use vars::VariableTable;
