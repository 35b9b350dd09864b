//! Computational toolkit for finite loops.
//!
//! Loops are Cayley tables ([`LoopTable`]). On top of them sit an identity
//! language with an exhaustive checker ([`identity`]), principal isotopes and
//! universality checks ([`isotopy`]), structural decision procedures
//! ([`structure`]), table constructions ([`constructions`]), a backtracking
//! model searcher ([`search`]) and the file formats used by the CLI ([`io`]).

pub mod constructions;
pub mod identity;
pub mod io;
pub mod isotopy;
pub mod property;
pub mod search;
pub mod structure;
pub mod table;

pub use identity::{catalog, eval_identity, parse_identity, property_report, CheckResult, Identity};
pub use table::{Element, LoopError, LoopTable};
