//! Mapping between physical part-of-speech tagsets and a typed,
//! constraint-based standard tagset.
//!
//! The pipeline is:
//!
//! 1. [`typegraph`] compiles a tagset definition into a [`TypeGraph`] and
//!    enumerates its terminal classes, the finite universe every
//!    specification is interpreted against.
//! 2. [`specexpr`] parses Boolean specifications such as
//!    `[pos = v & vtype = aux & pers = 3]`, type-checks them and computes
//!    their denotations as class sets.
//! 3. [`maprules`] compiles coverage rules and the exception lexicon of one
//!    physical tagset into a [`RuleSet`].
//! 4. [`mtree`] builds the [`MTree`] and runs the consistency checks.
//! 5. [`resolver`] translates a specification into physical tag patterns
//!    with anticipated noise, and [`retagger`] rewrites tagged corpora.

pub mod classset;
pub mod cli;
pub mod diag;
pub mod fixtures;
pub mod maprules;
pub mod mtree;
pub mod resolver;
pub mod retagger;
pub mod specexpr;
pub mod typegraph;

pub use classset::ClassSet;
pub use diag::{Diagnostic, Severity, Span};
pub use maprules::{parse_rules, standard_reading, RuleSet};
pub use mtree::{build_mtree, MTree};
pub use resolver::{render_query, resolve, ResolvedQuery};
pub use specexpr::{denote, minimal_cover, parse_spec, typecheck, SpecExpr, TypedSpec};
pub use typegraph::{enumerate_terminal_classes, parse_tagset_definition, TypeGraph};
