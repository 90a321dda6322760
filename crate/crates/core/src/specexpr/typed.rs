//! Name resolution, closed-world denotation, DNF and type checking.
//!
//! Denotations are class sets over the universe of terminal classes:
//!
//! * `f = v` holds in the classes where `f` is appropriate and has value `v`;
//! * `f != v` holds where `f` is appropriate and has another value;
//! * `!e` is the complement of `e` within the classes where every feature
//!   mentioned in `e` is appropriate.
//!
//! The DNF uses two extra literal kinds to express `!e` exactly: `Has(f)`
//! (`f` is appropriate) and `Lacks(f)`. Disjuncts that pair `Lacks(f)` with
//! any other literal on `f` are artefacts of that encoding and are dropped.

use std::collections::BTreeSet;
use std::fmt;

use super::{Op, SpecExpr, Value};
use crate::classset::ClassSet;
use crate::diag::Span;
use crate::typegraph::{FeatureId, NodeId, TypeGraph, ValueRef, POS};

/// Feature of a resolved atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feat {
    Pos,
    Feature(FeatureId),
}

/// A specification with every name resolved against a [`TypeGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolved {
    Atom {
        feat: Feat,
        /// Node index for `Pos`, value index otherwise.
        value: usize,
        op: Op,
        span: Span,
    },
    And(Box<Resolved>, Box<Resolved>),
    Or(Box<Resolved>, Box<Resolved>),
    Not(Box<Resolved>, Span),
}

impl Resolved {
    /// Proper features mentioned anywhere below this node.
    pub fn features(&self) -> BTreeSet<FeatureId> {
        let mut out = BTreeSet::new();
        self.collect_features(&mut out);
        out
    }

    fn collect_features(&self, out: &mut BTreeSet<FeatureId>) {
        match self {
            Resolved::Atom {
                feat: Feat::Feature(f),
                ..
            } => {
                out.insert(*f);
            }
            Resolved::Atom { .. } => {}
            Resolved::And(l, r) | Resolved::Or(l, r) => {
                l.collect_features(out);
                r.collect_features(out);
            }
            Resolved::Not(e, _) => e.collect_features(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unknown feature `{name}`")]
    UnknownFeature { name: String, span: Span },
    #[error("`{value}` is not a value of `{feature}`")]
    UnknownValue {
        feature: String,
        value: String,
        span: Span,
    },
    #[error("unknown name `{name}`")]
    UnknownName { name: String, span: Span },
    #[error("`{name}` is a feature, not a value; write `{name}=<value>`")]
    FeatureWithoutValue { name: String, span: Span },
    #[error("physical tag '{tag}' cannot appear in a specification")]
    PhysicalTag { tag: String, span: Span },
    #[error(
        "ill-typed specification: disjunct `{disjunct}` denotes no class; {}",
        explain_conflict(.conflict)
    )]
    IllTyped {
        disjunct: String,
        conflict: Vec<String>,
        spans: Vec<Span>,
    },
    #[error("specification denotes no class")]
    Empty { span: Span },
}

fn explain_conflict(conflict: &[String]) -> String {
    let quoted: Vec<String> = conflict.iter().map(|c| format!("`{c}`")).collect();
    match quoted.len() {
        1 => format!("{} holds for no class", quoted[0]),
        _ => format!("{} are not type compatible", quoted.join(" and ")),
    }
}

impl TypeError {
    pub fn span(&self) -> Span {
        match self {
            TypeError::UnknownFeature { span, .. }
            | TypeError::UnknownValue { span, .. }
            | TypeError::UnknownName { span, .. }
            | TypeError::FeatureWithoutValue { span, .. }
            | TypeError::PhysicalTag { span, .. }
            | TypeError::Empty { span } => *span,
            TypeError::IllTyped { spans, .. } => {
                spans.iter().copied().reduce(Span::to).unwrap_or_default()
            }
        }
    }
}

pub fn resolve(e: &SpecExpr, g: &TypeGraph) -> Result<Resolved, TypeError> {
    Ok(match e {
        SpecExpr::Atom {
            feature,
            op,
            value,
            span,
        } => {
            let value = match value {
                Value::Name(v) => v,
                Value::Quoted(tag) => {
                    return Err(TypeError::PhysicalTag {
                        tag: tag.clone(),
                        span: *span,
                    })
                }
            };
            if feature == POS {
                let node = g
                    .node_by_name(value)
                    .ok_or_else(|| TypeError::UnknownValue {
                        feature: feature.clone(),
                        value: value.clone(),
                        span: *span,
                    })?;
                Resolved::Atom {
                    feat: Feat::Pos,
                    value: node.0,
                    op: *op,
                    span: *span,
                }
            } else {
                let f = g
                    .feature_by_name(feature)
                    .ok_or_else(|| TypeError::UnknownFeature {
                        name: feature.clone(),
                        span: *span,
                    })?;
                let v = g
                    .feature(f)
                    .values
                    .iter()
                    .position(|x| x == value)
                    .ok_or_else(|| TypeError::UnknownValue {
                        feature: feature.clone(),
                        value: value.clone(),
                        span: *span,
                    })?;
                Resolved::Atom {
                    feat: Feat::Feature(f),
                    value: v,
                    op: *op,
                    span: *span,
                }
            }
        }
        SpecExpr::Bare { name, span } => match g.lookup_value(name) {
            Some(ValueRef::Node(n)) => Resolved::Atom {
                feat: Feat::Pos,
                value: n.0,
                op: Op::Eq,
                span: *span,
            },
            Some(ValueRef::Value(f, v)) => Resolved::Atom {
                feat: Feat::Feature(f),
                value: v.0,
                op: Op::Eq,
                span: *span,
            },
            None if g.feature_by_name(name).is_some() || name == POS => {
                return Err(TypeError::FeatureWithoutValue {
                    name: name.clone(),
                    span: *span,
                })
            }
            None => {
                return Err(TypeError::UnknownName {
                    name: name.clone(),
                    span: *span,
                })
            }
        },
        SpecExpr::And(l, r) => Resolved::And(Box::new(resolve(l, g)?), Box::new(resolve(r, g)?)),
        SpecExpr::Or(l, r) => Resolved::Or(Box::new(resolve(l, g)?), Box::new(resolve(r, g)?)),
        SpecExpr::Not(inner, span) => Resolved::Not(Box::new(resolve(inner, g)?), *span),
    })
}

fn atom_set(g: &TypeGraph, feat: Feat, value: usize, op: Op) -> ClassSet {
    let pos = match feat {
        Feat::Pos => g.node_set(NodeId(value)).clone(),
        Feat::Feature(f) => g.eq_set(f, crate::typegraph::ValueId(value)).clone(),
    };
    match (op, feat) {
        (Op::Eq, _) => pos,
        (Op::Neq, Feat::Pos) => &g.universe() - &pos,
        (Op::Neq, Feat::Feature(f)) => g.has_set(f) - &pos,
    }
}

/// Classes where every feature in `features` is appropriate.
fn domain(g: &TypeGraph, features: &BTreeSet<FeatureId>) -> ClassSet {
    let mut dom = g.universe();
    for f in features {
        dom.intersect_with(g.has_set(*f));
    }
    dom
}

impl Resolved {
    pub fn denote(&self, g: &TypeGraph) -> ClassSet {
        match self {
            Resolved::Atom {
                feat, value, op, ..
            } => atom_set(g, *feat, *value, *op),
            Resolved::And(l, r) => &l.denote(g) & &r.denote(g),
            Resolved::Or(l, r) => &l.denote(g) | &r.denote(g),
            Resolved::Not(e, _) => &domain(g, &e.features()) - &e.denote(g),
        }
    }
}

/// Denotation of a specification. Fails only on unresolvable names.
pub fn denote(e: &SpecExpr, g: &TypeGraph) -> Result<ClassSet, TypeError> {
    Ok(resolve(e, g)?.denote(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DnfLiteral {
    Eq(Feat, usize),
    Neq(Feat, usize),
    Has(FeatureId),
    Lacks(FeatureId),
}

impl DnfLiteral {
    fn feature(self) -> Option<FeatureId> {
        match self {
            DnfLiteral::Eq(Feat::Feature(f), _)
            | DnfLiteral::Neq(Feat::Feature(f), _)
            | DnfLiteral::Has(f)
            | DnfLiteral::Lacks(f) => Some(f),
            _ => None,
        }
    }

    pub fn denote(self, g: &TypeGraph) -> ClassSet {
        match self {
            DnfLiteral::Eq(feat, v) => atom_set(g, feat, v, Op::Eq),
            DnfLiteral::Neq(feat, v) => atom_set(g, feat, v, Op::Neq),
            DnfLiteral::Has(f) => g.has_set(f).clone(),
            DnfLiteral::Lacks(f) => &g.universe() - g.has_set(f),
        }
    }

    pub fn render(self, g: &TypeGraph) -> String {
        let atom = |feat: Feat, v: usize, op: &str| match feat {
            Feat::Pos => format!("{POS}{op}{}", g.node(NodeId(v)).name),
            Feat::Feature(f) => format!(
                "{}{op}{}",
                g.feature(f).name,
                g.value_name(f, crate::typegraph::ValueId(v))
            ),
        };
        match self {
            DnfLiteral::Eq(feat, v) => atom(feat, v, "="),
            DnfLiteral::Neq(feat, v) => atom(feat, v, "!="),
            DnfLiteral::Has(f) => format!("{} defined", g.feature(f).name),
            DnfLiteral::Lacks(f) => format!("{} undefined", g.feature(f).name),
        }
    }
}

/// One conjunction of a DNF; literals keep the span of the source they
/// came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjunct {
    pub literals: Vec<(DnfLiteral, Span)>,
}

impl Conjunct {
    pub fn denote(&self, g: &TypeGraph) -> ClassSet {
        let mut out = g.universe();
        for (lit, _) in &self.literals {
            out.intersect_with(&lit.denote(g));
        }
        out
    }

    pub fn render(&self, g: &TypeGraph) -> String {
        self.literals
            .iter()
            .map(|(l, _)| l.render(g))
            .collect::<Vec<_>>()
            .join(" & ")
    }

    fn normalise(mut self) -> Option<Self> {
        let mut seen = BTreeSet::new();
        self.literals.retain(|(l, _)| seen.insert(*l));
        let vacuous = self.literals.iter().any(|(l, _)| {
            matches!(l, DnfLiteral::Lacks(f) if self.literals.iter().any(|(m, _)| {
                m != l && m.feature() == Some(*f)
            }))
        });
        (!vacuous).then_some(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dnf {
    pub disjuncts: Vec<Conjunct>,
}

impl Dnf {
    pub fn denote(&self, g: &TypeGraph) -> ClassSet {
        let mut out = ClassSet::empty(g.universe_len());
        for d in &self.disjuncts {
            out.union_with(&d.denote(g));
        }
        out
    }
}

type RawDnf = Vec<Vec<(DnfLiteral, Span)>>;

fn product(a: RawDnf, b: RawDnf) -> RawDnf {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            let mut c = x.clone();
            c.extend(y.iter().copied());
            out.push(c);
        }
    }
    out
}

/// DNF of `e` when `positive`, of its classical complement in the universe
/// otherwise.
fn dnf_of(e: &Resolved, positive: bool) -> RawDnf {
    match e {
        Resolved::Atom {
            feat,
            value,
            op,
            span,
        } => {
            let holds = (*op == Op::Eq) == positive;
            let lit = if holds {
                DnfLiteral::Eq(*feat, *value)
            } else {
                DnfLiteral::Neq(*feat, *value)
            };
            let mut out = vec![vec![(lit, *span)]];
            if !positive {
                if let Feat::Feature(f) = feat {
                    out.push(vec![(DnfLiteral::Lacks(*f), *span)]);
                }
            }
            out
        }
        Resolved::And(l, r) if positive => product(dnf_of(l, true), dnf_of(r, true)),
        Resolved::And(l, r) => {
            let mut out = dnf_of(l, false);
            out.extend(dnf_of(r, false));
            out
        }
        Resolved::Or(l, r) if positive => {
            let mut out = dnf_of(l, true);
            out.extend(dnf_of(r, true));
            out
        }
        Resolved::Or(l, r) => product(dnf_of(l, false), dnf_of(r, false)),
        Resolved::Not(inner, span) => {
            let feats = inner.features();
            if positive {
                let has: Vec<_> = feats.iter().map(|f| (DnfLiteral::Has(*f), *span)).collect();
                product(vec![has], dnf_of(inner, false))
            } else {
                let mut out: RawDnf = feats
                    .iter()
                    .map(|f| vec![(DnfLiteral::Lacks(*f), *span)])
                    .collect();
                out.extend(dnf_of(inner, true));
                out
            }
        }
    }
}

pub fn to_dnf(e: &Resolved) -> Dnf {
    Dnf {
        disjuncts: dnf_of(e, true)
            .into_iter()
            .filter_map(|literals| Conjunct { literals }.normalise())
            .collect(),
    }
}

/// A well-typed specification together with its denotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedSpec {
    pub expr: SpecExpr,
    pub denotation: ClassSet,
    pub compatible_leaves: BTreeSet<NodeId>,
}

impl TypedSpec {
    /// Canonical `[...]` rendering of the source expression.
    pub fn render(&self) -> String {
        self.expr.bracketed()
    }
}

/// Smallest subset of a disjunct's literals that is already unsatisfiable.
fn minimal_conflict(c: &Conjunct, g: &TypeGraph) -> Vec<usize> {
    fn search(
        sets: &[ClassSet],
        k: usize,
        from: usize,
        acc: &ClassSet,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == k {
            return acc.is_empty();
        }
        for i in from..sets.len() {
            chosen.push(i);
            if search(sets, k, i + 1, &(acc & &sets[i]), chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let sets: Vec<ClassSet> = c.literals.iter().map(|(l, _)| l.denote(g)).collect();
    for k in 1..=sets.len() {
        let mut chosen = Vec::new();
        if search(&sets, k, 0, &g.universe(), &mut chosen) {
            return chosen;
        }
    }
    (0..sets.len()).collect()
}

/// Resolves names, converts to DNF and accepts the specification only if
/// every disjunct denotes at least one terminal class.
pub fn typecheck(e: &SpecExpr, g: &TypeGraph) -> Result<TypedSpec, TypeError> {
    let resolved = resolve(e, g)?;
    let dnf = to_dnf(&resolved);
    let mut denotation = ClassSet::empty(g.universe_len());
    for d in &dnf.disjuncts {
        let set = d.denote(g);
        if set.is_empty() {
            let conflict = minimal_conflict(d, g);
            return Err(TypeError::IllTyped {
                disjunct: d.render(g),
                conflict: conflict
                    .iter()
                    .map(|&i| d.literals[i].0.render(g))
                    .collect(),
                spans: conflict.iter().map(|&i| d.literals[i].1).collect(),
            });
        }
        denotation.union_with(&set);
    }
    if denotation.is_empty() {
        return Err(TypeError::Empty { span: e.span() });
    }
    let compatible_leaves = denotation
        .iter()
        .map(|i| g.terminal_classes()[i].leaf)
        .collect();
    Ok(TypedSpec {
        expr: e.clone(),
        denotation,
        compatible_leaves,
    })
}

impl fmt::Display for TypedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
