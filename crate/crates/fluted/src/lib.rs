//! Satisfiability toolkit for the fluted fragment of first-order logic.
//!
//! The fluted fragment restricts relational first-order logic so that atom
//! arguments are contiguous suffixes `x_l .. x_k` of a fixed variable sequence
//! and quantifiers bind only the highest-index free variable. Satisfiability
//! is decidable; this crate implements the full decision pipeline:
//!
//! * [`syntax`] — formula AST, signatures, and the fluted membership test;
//! * [`text`] — concrete syntax for formulas and finite structures, plus
//!   TPTP export;
//! * [`normal`] — conversion to the guarded clausal normal form and
//!   proposition elimination;
//! * [`types`] — fluted k-literals, k-clauses, k-types and suffix-ground
//!   consistency checking;
//! * [`sat`] — the propositional DPLL core backing all consistency checks
//!   and the bounded model finder;
//! * [`resolution`] — fluted resolution, closures, and constructive type
//!   extension;
//! * [`fl3`] — the three-variable decision procedure built on
//!   connector-types, with explicit small-model construction;
//! * [`reduce`] — the width-lowering reduction, the general decision driver,
//!   and model lifting;
//! * [`model`] — finite structures, evaluation, fluted types of tuples,
//!   domain multiplication, and the bounded model finder;
//! * [`generate`] — the tower-hard formula families and their canonical
//!   models, plus toroidal tiling encodings.

pub mod caps;
pub mod error;
pub mod fl3;
pub mod generate;
pub mod model;
pub mod normal;
pub mod reduce;
pub mod resolution;
pub mod sat;
pub mod syntax;
pub mod text;
pub mod types;

pub use caps::Caps;
pub use error::{Error, Result};
