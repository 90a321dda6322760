//! Boolean specifications over the standard tagset.
//!
//! Surface grammar:
//!
//! ```text
//! spec   := '[' expr ']' | expr
//! expr   := term ('|' term)*
//! term   := factor ('&' factor)*
//! factor := '!' factor | '(' expr ')' | atom
//! atom   := NAME (('=' | '!=') (NAME | NUMBER | QUOTED))?
//! ```

mod cover;
mod parse;
mod typed;

use std::fmt;

use crate::diag::Span;

pub use cover::{minimal_cover, Cover, Cube, CubeAtom};
pub use parse::{parse_spec, parse_spec_in};
pub use typed::{
    denote, resolve, to_dnf, typecheck, Dnf, DnfLiteral, Feat, Resolved, TypeError, TypedSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Eq,
    Neq,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Eq => "=",
            Op::Neq => "!=",
        })
    }
}

/// Right-hand side of an atom. Quoted values name physical tags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Name(String),
    Quoted(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Name(n) => f.write_str(n),
            Value::Quoted(q) => write!(f, "'{q}'"),
        }
    }
}

/// Specification AST. Equality ignores source spans.
#[derive(Debug, Clone)]
pub enum SpecExpr {
    Atom {
        feature: String,
        op: Op,
        value: Value,
        span: Span,
    },
    /// A value or hierarchy node used on its own, like `mass` or `n`.
    Bare {
        name: String,
        span: Span,
    },
    And(Box<SpecExpr>, Box<SpecExpr>),
    Or(Box<SpecExpr>, Box<SpecExpr>),
    Not(Box<SpecExpr>, Span),
}

impl SpecExpr {
    pub fn atom(feature: &str, op: Op, value: &str) -> Self {
        SpecExpr::Atom {
            feature: feature.to_string(),
            op,
            value: Value::Name(value.to_string()),
            span: Span::default(),
        }
    }

    pub fn bare(name: &str) -> Self {
        SpecExpr::Bare {
            name: name.to_string(),
            span: Span::default(),
        }
    }

    pub fn and(l: SpecExpr, r: SpecExpr) -> Self {
        SpecExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: SpecExpr, r: SpecExpr) -> Self {
        SpecExpr::Or(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: SpecExpr) -> Self {
        SpecExpr::Not(Box::new(e), Span::default())
    }

    pub fn span(&self) -> Span {
        match self {
            SpecExpr::Atom { span, .. } | SpecExpr::Bare { span, .. } => *span,
            SpecExpr::And(l, r) | SpecExpr::Or(l, r) => l.span().to(r.span()),
            SpecExpr::Not(_, span) => *span,
        }
    }

    /// `[...]` form used for readings and rule targets.
    pub fn bracketed(&self) -> String {
        format!("[{self}]")
    }

    fn precedence(&self) -> u8 {
        match self {
            SpecExpr::Or(..) => 1,
            SpecExpr::And(..) => 2,
            SpecExpr::Not(..) => 3,
            SpecExpr::Atom { .. } | SpecExpr::Bare { .. } => 4,
        }
    }
}

impl PartialEq for SpecExpr {
    fn eq(&self, other: &Self) -> bool {
        use SpecExpr::*;
        match (self, other) {
            (
                Atom {
                    feature: f1,
                    op: o1,
                    value: v1,
                    ..
                },
                Atom {
                    feature: f2,
                    op: o2,
                    value: v2,
                    ..
                },
            ) => f1 == f2 && o1 == o2 && v1 == v2,
            (Bare { name: a, .. }, Bare { name: b, .. }) => a == b,
            (And(l1, r1), And(l2, r2)) | (Or(l1, r1), Or(l2, r2)) => l1 == l2 && r1 == r2,
            (Not(a, _), Not(b, _)) => a == b,
            _ => false,
        }
    }
}

impl Eq for SpecExpr {}

impl fmt::Display for SpecExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Left operands may share the parent's precedence (left
        // associativity); right operands must bind tighter.
        fn child(f: &mut fmt::Formatter<'_>, e: &SpecExpr, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            SpecExpr::Atom {
                feature, op, value, ..
            } => write!(f, "{feature}{op}{value}"),
            SpecExpr::Bare { name, .. } => f.write_str(name),
            SpecExpr::And(l, r) => {
                child(f, l, 2)?;
                f.write_str(" & ")?;
                child(f, r, 3)
            }
            SpecExpr::Or(l, r) => {
                child(f, l, 1)?;
                f.write_str(" | ")?;
                child(f, r, 2)
            }
            SpecExpr::Not(e, _) => {
                f.write_str("!")?;
                child(f, e, 3)
            }
        }
    }
}
