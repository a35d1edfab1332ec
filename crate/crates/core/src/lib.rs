//! Converse PDL: satisfiability and validity via a cyclic focus calculus on
//! split sequents, with independently checkable proofs, verified
//! countermodels, and Craig interpolation.
//!
//! The pieces fit together as follows. [`syntax`] defines negation-normal
//! expressions, the trace relation and its closure. [`semantics`] gives
//! Kripke models with both a compositional and a game-based model checker.
//! [`paritygame`] is a generic positional parity-game solver shared by the
//! model checker and the prover. [`calculus`] holds the sequent machinery
//! and the rule inventory, [`prover`] runs proof search as a parity game and
//! emits cyclic proofs or countermodels, and [`interpolation`] synthesizes
//! and verifies Craig interpolants from those proofs.

pub mod calculus;
mod error;
pub mod interpolation;
pub mod paritygame;
pub mod prover;
pub mod semantics;
pub mod syntax;

pub use error::Error;
