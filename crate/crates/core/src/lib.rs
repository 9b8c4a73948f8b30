//! A saturation-based first-order prover built around pluggable literal
//! selection.

pub mod calculus;
pub mod clause;
pub mod harness;
pub mod index;
pub mod ordering;
pub mod saturation;
pub mod selection;
pub mod subst;
pub mod term;
pub mod tptp;
