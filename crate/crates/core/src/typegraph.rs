//! The compiled standard tagset.
//!
//! A tagset definition declares a POS hierarchy and a list of features.
//! Each feature is appropriate at a hierarchy node (and everything below it),
//! optionally only when one of a list of `feature=value` conditions holds.
//! Compilation validates the declarations and enumerates the terminal
//! classes: every leaf combined with every total, consistent assignment of
//! its appropriate features. That finite set is the universe all
//! specifications denote into.
//!
//! ```text
//! tagset demo
//! hierarchy { word { v n } }
//! feature vform for v { fin, inf, part }
//! feature tense for v when vform=fin or vform=part { past, pres }
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::classset::ClassSet;
use crate::diag::{Diagnostic, Span};

/// Name of the pseudo-feature whose values are hierarchy nodes.
pub const POS: &str = "pos";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureId(pub usize);

/// Index of a value within its feature's domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueId(pub usize);

/// Index of a terminal class in the universe.
pub type ClassId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Condition {
    pub feature: FeatureId,
    pub value: ValueId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDecl {
    pub name: String,
    pub values: Vec<String>,
    pub home: NodeId,
    /// Disjunctive; empty means unconditionally appropriate below `home`.
    pub conditions: Vec<Condition>,
    pub span: Span,
}

/// What a bare name stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueRef {
    Node(NodeId),
    Value(FeatureId, ValueId),
}

/// A leaf plus a total assignment of its appropriate features. `values` is
/// indexed by feature declaration order; `None` marks an inappropriate
/// feature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TerminalClass {
    pub leaf: NodeId,
    pub values: Vec<Option<ValueId>>,
}

impl TerminalClass {
    pub fn value(&self, f: FeatureId) -> Option<ValueId> {
        self.values[f.0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeGraph {
    pub name: String,
    nodes: Vec<Node>,
    features: Vec<FeatureDecl>,
    value_index: BTreeMap<String, ValueRef>,
    topo: Vec<FeatureId>,
    universe: Vec<TerminalClass>,
    node_sets: Vec<ClassSet>,
    has_sets: Vec<ClassSet>,
    eq_sets: Vec<Vec<ClassSet>>,
}

impl TypeGraph {
    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name).map(NodeId)
    }

    pub fn features(&self) -> &[FeatureDecl] {
        &self.features
    }

    pub fn feature(&self, id: FeatureId) -> &FeatureDecl {
        &self.features[id.0]
    }

    pub fn feature_by_name(&self, name: &str) -> Option<FeatureId> {
        self.features
            .iter()
            .position(|f| f.name == name)
            .map(FeatureId)
    }

    pub fn value_name(&self, f: FeatureId, v: ValueId) -> &str {
        &self.features[f.0].values[v.0]
    }

    pub fn lookup_value(&self, name: &str) -> Option<ValueRef> {
        self.value_index.get(name).copied()
    }

    /// Leaves in document order.
    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len())
            .map(NodeId)
            .filter(|n| self.nodes[n.0].children.is_empty())
    }

    pub fn is_ancestor_or_self(&self, ancestor: NodeId, mut node: NodeId) -> bool {
        loop {
            if node == ancestor {
                return true;
            }
            match self.nodes[node.0].parent {
                Some(p) => node = p,
                None => return false,
            }
        }
    }

    /// `node`, its parent, ..., the root.
    pub fn ancestors(&self, node: NodeId) -> Vec<NodeId> {
        let mut out = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur.0].parent {
            out.push(p);
            cur = p;
        }
        out
    }

    /// Lowest node that dominates every node in `nodes`.
    pub fn common_ancestor(&self, nodes: impl IntoIterator<Item = NodeId>) -> NodeId {
        let mut iter = nodes.into_iter();
        let Some(first) = iter.next() else {
            return self.root();
        };
        let mut chain = self.ancestors(first);
        for n in iter {
            let other = self.ancestors(n);
            chain.retain(|a| other.contains(a));
        }
        chain[0]
    }

    /// The universe of terminal classes, in enumeration order.
    pub fn terminal_classes(&self) -> &[TerminalClass] {
        &self.universe
    }

    pub fn universe_len(&self) -> usize {
        self.universe.len()
    }

    pub fn universe(&self) -> ClassSet {
        ClassSet::full(self.universe.len())
    }

    /// Classes whose leaf lies under `node`.
    pub fn node_set(&self, node: NodeId) -> &ClassSet {
        &self.node_sets[node.0]
    }

    /// Classes where `f` is appropriate.
    pub fn has_set(&self, f: FeatureId) -> &ClassSet {
        &self.has_sets[f.0]
    }

    /// Classes with `f = v`.
    pub fn eq_set(&self, f: FeatureId, v: ValueId) -> &ClassSet {
        &self.eq_sets[f.0][v.0]
    }

    /// `[pos=<leaf> & f1=v1 & ...]` with features in declaration order.
    pub fn render_class(&self, class: &TerminalClass) -> String {
        let mut out = format!("[{POS}={}", self.nodes[class.leaf.0].name);
        for (i, v) in class.values.iter().enumerate() {
            if let Some(v) = v {
                out.push_str(&format!(
                    " & {}={}",
                    self.features[i].name, self.features[i].values[v.0]
                ));
            }
        }
        out.push(']');
        out
    }

    /// Inverse of [`TypeGraph::render_class`]. Accepts any conjunction of
    /// `=` atoms that fixes the leaf and every appropriate feature.
    pub fn parse_class(&self, text: &str) -> Result<TerminalClass, String> {
        use crate::specexpr::{Op, SpecExpr, Value};

        fn atoms<'a>(e: &'a SpecExpr, out: &mut Vec<&'a SpecExpr>) -> Result<(), String> {
            match e {
                SpecExpr::And(l, r) => {
                    atoms(l, out)?;
                    atoms(r, out)
                }
                SpecExpr::Atom { .. } | SpecExpr::Bare { .. } => {
                    out.push(e);
                    Ok(())
                }
                other => Err(format!("`{other}` is not a conjunction of atoms")),
            }
        }

        let expr = crate::specexpr::parse_spec(text).map_err(|d| d.message)?;
        let mut list = Vec::new();
        atoms(&expr, &mut list)?;
        let mut leaf = None;
        let mut values = vec![None; self.features.len()];
        for atom in list {
            let (feature, value) = match atom {
                SpecExpr::Atom {
                    feature,
                    op: Op::Eq,
                    value: Value::Name(value),
                    ..
                } => (Some(feature.as_str()), value.as_str()),
                SpecExpr::Bare { name, .. } => (None, name.as_str()),
                other => return Err(format!("`{other}` is not a feature assignment")),
            };
            match (feature, self.lookup_value(value)) {
                (None | Some(POS), Some(ValueRef::Node(n))) => {
                    if leaf.replace(n).is_some() {
                        return Err("pos given twice".into());
                    }
                }
                (f, Some(ValueRef::Value(fid, vid)))
                    if f.is_none() || f == Some(self.features[fid.0].name.as_str()) =>
                {
                    if values[fid.0].replace(vid).is_some() {
                        return Err(format!(
                            "feature `{}` given twice",
                            self.features[fid.0].name
                        ));
                    }
                }
                _ => return Err(format!("`{atom}` does not name a feature value")),
            }
        }
        let class = TerminalClass {
            leaf: leaf.ok_or("missing pos")?,
            values,
        };
        if self.class_index(&class).is_none() {
            return Err(format!("`{text}` is not a terminal class"));
        }
        Ok(class)
    }

    pub fn class_index(&self, class: &TerminalClass) -> Option<ClassId> {
        self.universe.iter().position(|c| c == class)
    }

    /// Classes of the universe as canonical strings.
    pub fn render_classes(&self, set: &ClassSet) -> Vec<String> {
        set.iter()
            .map(|i| self.render_class(&self.universe[i]))
            .collect()
    }
}

/// Features appropriate at `node`: those declared for `node` or an ancestor.
/// Conditional features are included; their conditions only matter when
/// classes are enumerated.
pub fn appropriate_features<'g>(
    g: &'g TypeGraph,
    node: &str,
) -> Result<Vec<&'g FeatureDecl>, UnknownNode> {
    let id = g
        .node_by_name(node)
        .ok_or_else(|| UnknownNode(node.to_string()))?;
    Ok(g.features
        .iter()
        .filter(|f| g.is_ancestor_or_self(f.home, id))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown hierarchy node `{0}`")]
pub struct UnknownNode(pub String);

/// Recomputes the universe from the declarations.
pub fn enumerate_terminal_classes(g: &TypeGraph) -> Vec<TerminalClass> {
    enumerate(&g.nodes, &g.features, &g.topo)
}

fn enumerate(nodes: &[Node], features: &[FeatureDecl], topo: &[FeatureId]) -> Vec<TerminalClass> {
    let dominates = |anc: NodeId, mut n: NodeId| loop {
        if n == anc {
            return true;
        }
        match nodes[n.0].parent {
            Some(p) => n = p,
            None => return false,
        }
    };

    let mut out = Vec::new();
    for leaf in (0..nodes.len()).map(NodeId) {
        if !nodes[leaf.0].children.is_empty() {
            continue;
        }
        let order: Vec<FeatureId> = topo
            .iter()
            .copied()
            .filter(|f| dominates(features[f.0].home, leaf))
            .collect();
        let mut classes = Vec::new();
        let mut current = vec![None; features.len()];
        expand(features, &order, &mut current, &mut |values| {
            classes.push(TerminalClass {
                leaf,
                values: values.to_vec(),
            })
        });
        classes.sort_by(|a, b| a.values.cmp(&b.values));
        out.extend(classes);
    }
    out
}

fn expand(
    features: &[FeatureDecl],
    order: &[FeatureId],
    current: &mut Vec<Option<ValueId>>,
    emit: &mut dyn FnMut(&[Option<ValueId>]),
) {
    let Some((&f, rest)) = order.split_first() else {
        emit(current);
        return;
    };
    let decl = &features[f.0];
    let appropriate = decl.conditions.is_empty()
        || decl
            .conditions
            .iter()
            .any(|c| current[c.feature.0] == Some(c.value));
    if appropriate {
        for v in 0..decl.values.len() {
            current[f.0] = Some(ValueId(v));
            expand(features, rest, current, emit);
        }
        current[f.0] = None;
    } else {
        expand(features, rest, current, emit);
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    Comma,
    Eq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let mut toks = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                chars.next();
            }
        } else if is_ident_start(c) {
            let mut end = i;
            while let Some(&(j, c)) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                end = j + c.len_utf8();
                chars.next();
            }
            toks.push((Tok::Ident(src[i..end].to_string()), Span::new(i, end)));
        } else {
            let tok = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                '=' => Tok::Eq,
                _ => {
                    return Err(Diagnostic::error(
                        src,
                        Span::new(i, i + c.len_utf8()),
                        format!("unexpected character `{c}`"),
                    ))
                }
            };
            chars.next();
            toks.push((tok, Span::new(i, i + 1)));
        }
    }
    Ok(toks)
}

struct RawNode {
    name: String,
    span: Span,
    children: Vec<RawNode>,
}

struct RawFeature {
    name: String,
    span: Span,
    home: (String, Span),
    conditions: Vec<((String, Span), (String, Span))>,
    values: Vec<(String, Span)>,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        match self.toks.get(self.pos) {
            Some((_, s)) => *s,
            None => Span::new(self.src.len(), self.src.len()),
        }
    }

    fn error(&self, expected: &str) -> Diagnostic {
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        };
        Diagnostic::error(
            self.src,
            self.span(),
            format!("expected {expected}, found {found}"),
        )
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), Diagnostic> {
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), span)) => {
                let out = (s.clone(), *span);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.error(what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Span, Diagnostic> {
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), span)) if s == kw => {
                self.pos += 1;
                Ok(*span)
            }
            _ => Err(self.error(&format!("`{kw}`"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn punct(&mut self, tok: Tok) -> Result<Span, Diagnostic> {
        if self.peek() == Some(&tok) {
            let span = self.span();
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn node(&mut self) -> Result<RawNode, Diagnostic> {
        let (name, span) = self.ident("a node name")?;
        let mut children = Vec::new();
        if self.peek() == Some(&Tok::LBrace) {
            self.pos += 1;
            while self.peek() != Some(&Tok::RBrace) {
                children.push(self.node()?);
            }
            self.pos += 1;
        }
        Ok(RawNode {
            name,
            span,
            children,
        })
    }

    fn feature(&mut self) -> Result<RawFeature, Diagnostic> {
        self.keyword("feature")?;
        let (name, span) = self.ident("a feature name")?;
        self.keyword("for")?;
        let home = self.ident("a hierarchy node")?;
        let mut conditions = Vec::new();
        if self.at_keyword("when") {
            self.pos += 1;
            loop {
                let f = self.ident("a feature name")?;
                self.punct(Tok::Eq)?;
                let v = self.ident("a value")?;
                conditions.push((f, v));
                if !self.at_keyword("or") {
                    break;
                }
                self.pos += 1;
            }
        }
        self.punct(Tok::LBrace)?;
        let mut values = vec![self.ident("a value")?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            if self.peek() == Some(&Tok::RBrace) {
                break;
            }
            values.push(self.ident("a value")?);
        }
        self.punct(Tok::RBrace)?;
        Ok(RawFeature {
            name,
            span,
            home,
            conditions,
            values,
        })
    }
}

/// Compiles a tagset definition. Syntax errors stop at the first one;
/// declaration errors are all reported.
pub fn parse_tagset_definition(src: &str) -> Result<TypeGraph, Vec<Diagnostic>> {
    let toks = lex(src).map_err(|d| vec![d])?;
    let mut p = Parser { src, toks, pos: 0 };
    let syntax = (|| {
        p.keyword("tagset")?;
        let (name, _) = p.ident("a tagset name")?;
        p.keyword("hierarchy")?;
        p.punct(Tok::LBrace)?;
        let hier_span = p.span();
        let mut roots = Vec::new();
        while p.peek().is_some() && p.peek() != Some(&Tok::RBrace) {
            roots.push(p.node()?);
        }
        p.punct(Tok::RBrace)?;
        let mut features = Vec::new();
        while p.peek().is_some() {
            features.push(p.feature()?);
        }
        Ok((name, hier_span, roots, features))
    })();
    let (name, hier_span, roots, raw_features) = syntax.map_err(|d| vec![d])?;
    compile(src, name, hier_span, roots, raw_features)
}

fn check_name(src: &str, name: &str, span: Span, errors: &mut Vec<Diagnostic>) {
    if name.chars().any(|c| c.is_uppercase()) {
        errors.push(Diagnostic::error(
            src,
            span,
            format!("`{name}`: names in a tagset definition must be lowercase"),
        ));
    }
}

fn compile(
    src: &str,
    name: String,
    hier_span: Span,
    roots: Vec<RawNode>,
    raw_features: Vec<RawFeature>,
) -> Result<TypeGraph, Vec<Diagnostic>> {
    let mut errors = Vec::new();

    if roots.len() != 1 {
        errors.push(Diagnostic::error(
            src,
            roots.get(1).map_or(hier_span, |r| r.span),
            format!(
                "the hierarchy must have exactly one root, found {}",
                roots.len()
            ),
        ));
    }

    // Preorder flattening; document order of leaves falls out of it.
    let mut nodes: Vec<Node> = Vec::new();
    fn flatten(raw: &RawNode, parent: Option<NodeId>, nodes: &mut Vec<Node>) {
        let id = NodeId(nodes.len());
        nodes.push(Node {
            name: raw.name.clone(),
            parent,
            children: Vec::new(),
            span: raw.span,
        });
        if let Some(p) = parent {
            nodes[p.0].children.push(id);
        }
        for c in &raw.children {
            flatten(c, Some(id), nodes);
        }
    }
    if let Some(root) = roots.first() {
        flatten(root, None, &mut nodes);
    }

    let mut value_index: BTreeMap<String, ValueRef> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        check_name(src, &n.name, n.span, &mut errors);
        if n.name == POS {
            errors.push(Diagnostic::error(
                src,
                n.span,
                format!("`{POS}` is reserved"),
            ));
        }
        if value_index
            .insert(n.name.clone(), ValueRef::Node(NodeId(i)))
            .is_some()
        {
            errors.push(Diagnostic::error(
                src,
                n.span,
                format!("duplicate hierarchy node `{}`", n.name),
            ));
        }
    }

    let mut feature_ids: HashMap<&str, FeatureId> = HashMap::new();
    let mut features = Vec::new();
    for (i, rf) in raw_features.iter().enumerate() {
        check_name(src, &rf.name, rf.span, &mut errors);
        if rf.name == POS {
            errors.push(Diagnostic::error(
                src,
                rf.span,
                format!("`{POS}` is reserved"),
            ));
        }
        if feature_ids.insert(&rf.name, FeatureId(i)).is_some() {
            errors.push(Diagnostic::error(
                src,
                rf.span,
                format!("duplicate feature `{}`", rf.name),
            ));
        }
        let home = match nodes.iter().position(|n| n.name == rf.home.0) {
            Some(h) => NodeId(h),
            None => {
                errors.push(Diagnostic::error(
                    src,
                    rf.home.1,
                    format!(
                        "feature `{}` is declared for unknown node `{}`",
                        rf.name, rf.home.0
                    ),
                ));
                NodeId(0)
            }
        };
        let mut values = Vec::new();
        for (v, span) in &rf.values {
            check_name(src, v, *span, &mut errors);
            if values.contains(v) {
                errors.push(Diagnostic::error(
                    src,
                    *span,
                    format!("value `{v}` listed twice for feature `{}`", rf.name),
                ));
                continue;
            }
            match value_index.get(v) {
                Some(ValueRef::Node(_)) => errors.push(Diagnostic::error(
                    src,
                    *span,
                    format!(
                        "value `{v}` of feature `{}` clashes with a hierarchy node",
                        rf.name
                    ),
                )),
                Some(ValueRef::Value(other, _)) => errors.push(Diagnostic::error(
                    src,
                    *span,
                    format!(
                        "ambiguous value `{v}`: declared for `{}` and `{}`",
                        raw_features[other.0].name, rf.name
                    ),
                )),
                None => {
                    value_index.insert(
                        v.clone(),
                        ValueRef::Value(FeatureId(i), ValueId(values.len())),
                    );
                }
            }
            values.push(v.clone());
        }
        features.push(FeatureDecl {
            name: rf.name.clone(),
            values,
            home,
            conditions: Vec::new(),
            span: rf.span,
        });
    }

    for (i, rf) in raw_features.iter().enumerate() {
        for ((cf, cf_span), (cv, cv_span)) in &rf.conditions {
            let Some(&fid) = feature_ids.get(cf.as_str()) else {
                errors.push(Diagnostic::error(
                    src,
                    *cf_span,
                    format!("condition on undeclared feature `{cf}`"),
                ));
                continue;
            };
            let Some(vid) = features[fid.0].values.iter().position(|v| v == cv) else {
                errors.push(Diagnostic::error(
                    src,
                    *cv_span,
                    format!("`{cv}` is not a value of feature `{cf}`"),
                ));
                continue;
            };
            features[i].conditions.push(Condition {
                feature: fid,
                value: ValueId(vid),
            });
        }
    }

    let topo = match topological_order(&features) {
        Ok(t) => t,
        Err(cyclic) => {
            for f in cyclic {
                errors.push(Diagnostic::error(
                    src,
                    features[f.0].span,
                    format!(
                        "cyclic appropriateness involving feature `{}`",
                        features[f.0].name
                    ),
                ));
            }
            Vec::new()
        }
    };

    if !errors.is_empty() {
        errors.sort_by_key(|d| d.span);
        return Err(errors);
    }

    let universe = enumerate(&nodes, &features, &topo);
    let n = universe.len();
    let node_sets = (0..nodes.len())
        .map(|node| {
            ClassSet::from_indices(
                n,
                universe.iter().enumerate().filter_map(|(i, c)| {
                    let mut cur = Some(c.leaf);
                    while let Some(x) = cur {
                        if x.0 == node {
                            return Some(i);
                        }
                        cur = nodes[x.0].parent;
                    }
                    None
                }),
            )
        })
        .collect();
    let has_sets = (0..features.len())
        .map(|f| {
            ClassSet::from_indices(
                n,
                universe
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.values[f].is_some())
                    .map(|(i, _)| i),
            )
        })
        .collect();
    let eq_sets = features
        .iter()
        .enumerate()
        .map(|(f, decl)| {
            (0..decl.values.len())
                .map(|v| {
                    ClassSet::from_indices(
                        n,
                        universe
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| c.values[f] == Some(ValueId(v)))
                            .map(|(i, _)| i),
                    )
                })
                .collect()
        })
        .collect();

    Ok(TypeGraph {
        name,
        nodes,
        features,
        value_index,
        topo,
        universe,
        node_sets,
        has_sets,
        eq_sets,
    })
}

/// Kahn's algorithm, preferring declaration order among ready features.
/// On failure returns the features left on cycles.
fn topological_order(features: &[FeatureDecl]) -> Result<Vec<FeatureId>, Vec<FeatureId>> {
    let mut done = vec![false; features.len()];
    let mut order = Vec::with_capacity(features.len());
    while order.len() < features.len() {
        let next = (0..features.len()).find(|&i| {
            !done[i]
                && features[i]
                    .conditions
                    .iter()
                    .all(|c| done[c.feature.0] && c.feature.0 != i)
        });
        match next {
            Some(i) => {
                done[i] = true;
                order.push(FeatureId(i));
            }
            None => {
                return Err((0..features.len())
                    .filter(|&i| !done[i])
                    .map(FeatureId)
                    .collect());
            }
        }
    }
    Ok(order)
}
