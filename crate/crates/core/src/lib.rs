//! Zero-input single-output Boolean network machines built from 2-input nodes.
//!
//! A machine is a list of nodes, each holding a 4-bit truth table and two
//! input indices, plus one designated output node. Starting from the all-zero
//! state and updating synchronously, every machine falls into a state cycle;
//! the bits seen on the output node over one period, taken up to rotation,
//! are the machine's output c-string.
//!
//! On top of the simulator the crate provides seeded sampling, a gluing rule
//! that feeds one machine's output into an input port of another, a bag of
//! machines with recombination, random and hill-climbing searches, experiment
//! harnesses producing output-length histograms, and versioned JSON formats.

pub mod cstring;
pub mod error;
pub mod experiments;
pub mod format;
pub mod glue;
pub mod histogram;
pub mod machine;
pub mod sampler;
pub mod search;

pub use cstring::{canonicalize, parse_bits, CanonicalCString};
pub use error::{Error, Result};
pub use glue::{glue, random_slot, GlueSlot};
pub use histogram::Histogram;
pub use machine::{
    efficiency_ratio, eval_node, validate, Bnm, CycleSummary, Evaluation, NodeSpec, StateVector,
    TruthTable, Violation,
};
pub use sampler::{derive_seed, sample_batch, sample_bnm, RngStream};
pub use search::{AcceptRule, Bag, BagEntry, SearchStats, TrialRecord};
