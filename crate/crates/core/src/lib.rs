//! Decision procedure for regular expressions with dynamic tests.
//!
//! The language extends Kleene algebra with two test-forming operators on
//! programs: domain (`dom(e)`, holds where `e` can terminate) and antidomain
//! (`adom(e)`, holds where it cannot). Kleene algebra with tests and
//! propositional dynamic logic both live inside it as fragments.
//!
//! Equivalence `e ≡ f` is decided by the following pipeline:
//!
//! 1. [`closure::gamma_for`] computes a finite Fischer–Ladner closed set of
//!    parameters Γ from the subformulas of `e` and `f`.
//! 2. [`canonical::build_canonical`] builds the canonical model over Γ by
//!    type elimination: the consistent atoms and the action steps between them.
//! 3. [`guarded::canonical_interpret`] turns each expression into an automaton
//!    over consistently guarded strings.
//! 4. [`guarded::language_equal`] compares the two languages and extracts a
//!    shortest witness, which [`relational::export_countermodel`] turns into
//!    a finite relational countermodel.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod canonical;
pub mod closure;
pub mod decide;
mod error;
pub mod guarded;
pub mod laws;
pub mod relational;
pub mod syntax;

pub use canonical::{build_canonical, sat, Atom, AtomUniverse, CanonicalModel, SatWitness};
pub use closure::{fl_close, gamma_for, is_fl_closed, ParameterSet};
pub use decide::{decide, decide_leq, decide_leq_with, decide_with, Counterexample, Decision, DecideOptions, Side, Verdict};
pub use error::{Error, Result};
pub use guarded::{GuardedAutomaton, GuardedString};
pub use relational::{evaluate, satisfies, Relation, RelationalModel};
pub use syntax::{parse, Expr, ExprKind, FragmentId, Symbol, Vocabulary};
