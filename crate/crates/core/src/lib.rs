//! Decides whether a one-dimensional linear quantum cellular automaton has a
//! unitary time evolution operator.
//!
//! For a well-formed automaton the rows of the evolution operator have norm
//! at most one, and the automaton is unitary exactly when every row has unit
//! norm. The squared row norm of a configuration `d` equals
//! `⟨M_{d_j…d_k} l | r⟩`, where `l` and `r` are the border vectors
//! ([`border`]) and `M_a` are the per-letter transfer operators
//! ([`transfer`]). Unitarity therefore reduces to asking whether the affine
//! hyperplane `{u : ⟨u|r⟩ = 1}` is closed for `l` under every `M_a`, which
//! [`affine::decide_closed`] answers with an incremental basis.
//!
//! [`evolution`] is an independent brute-force model of the global operator
//! on finite windows, used to cross-check every stage.

pub mod affine;
pub mod automaton;
pub mod border;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod numerics;
pub mod par;
pub mod transfer;

pub use affine::{decide_closed, ClosureVerdict, DynamicBasis, UpdateRule};
pub use automaton::{Alphabet, Automaton, Configuration, Interval, Neighborhood};
pub use border::{border_vectors, BorderVectors};
pub use error::{LqcaError, Result};
pub use evolution::{Evolution, GramReport, Superposition};
pub use numerics::{ExtNonnegReal, Tolerance};
pub use par::Execution;
pub use transfer::{build_transfer_operators, TransferOperator};
