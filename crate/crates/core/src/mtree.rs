//! The mapping tree of one physical tagset.
//!
//! The tree is kept as the cover of each tag's coverage denotation (its
//! nodes in the pruned type graph) plus the exact inverse map from terminal
//! classes to tags. Construction never fails; inconsistencies are recorded
//! as warnings.

use std::collections::BTreeMap;
use std::fmt;

use crate::classset::ClassSet;
use crate::diag::Severity;
use crate::maprules::RuleSet;
use crate::specexpr::{minimal_cover, Cover};
use crate::typegraph::TypeGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InconsistencyKind {
    DefinitionHoleSource,
    DefinitionHoleTarget,
    Nondisjunctive,
    Hierarchical,
}

impl InconsistencyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InconsistencyKind::DefinitionHoleSource => "definition_hole_source",
            InconsistencyKind::DefinitionHoleTarget => "definition_hole_target",
            InconsistencyKind::Nondisjunctive => "nondisjunctive",
            InconsistencyKind::Hierarchical => "hierarchical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconsistency {
    pub kind: InconsistencyKind,
    pub tags: Vec<String>,
    pub classes: ClassSet,
    /// Cover of `classes`, empty for source holes.
    pub cover: String,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WARN {}: {}", self.kind.as_str(), self.message)
    }
}

fn warning(
    kind: InconsistencyKind,
    tags: Vec<String>,
    classes: ClassSet,
    cover: &Cover,
    message: String,
) -> Inconsistency {
    Inconsistency {
        kind,
        tags,
        classes,
        cover: cover.text().to_string(),
        message,
        severity: Severity::Warning,
    }
}

fn classes(n: usize) -> String {
    if n == 1 {
        "1 class".to_string()
    } else {
        format!("{n} classes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MTree<'g> {
    pub graph: &'g TypeGraph,
    /// Covering nodes per tag with a coverage rule, by tag name.
    pub assignments: BTreeMap<String, Cover>,
    /// Tags whose coverage denotation contains each class, in inventory order.
    pub class_of: Vec<Vec<String>>,
    /// Classes reachable through some exception entry.
    pub exception_reach: ClassSet,
    pub diagnostics: Vec<Inconsistency>,
}

fn exception_reach(rs: &RuleSet, g: &TypeGraph) -> ClassSet {
    let mut reach = ClassSet::empty(g.universe_len());
    for e in &rs.exceptions {
        reach.union_with(&e.into.denotation);
    }
    reach
}

/// Inventory tags without a coverage rule, and classes no rule reaches.
/// Exception targets count as reached: primary auxiliaries, for instance,
/// are often only mapped through the exception lexicon.
pub fn check_definition_holes(rs: &RuleSet, g: &TypeGraph) -> Vec<Inconsistency> {
    let empty = ClassSet::empty(g.universe_len());
    let no_cover = minimal_cover(&empty, g);
    let mut out: Vec<Inconsistency> = rs
        .inventory
        .iter()
        .filter(|t| !rs.coverage.contains_key(*t))
        .map(|t| {
            warning(
                InconsistencyKind::DefinitionHoleSource,
                vec![t.clone()],
                empty.clone(),
                &no_cover,
                format!("physical tag '{t}' has no coverage rule"),
            )
        })
        .collect();

    let mut reached = exception_reach(rs, g);
    for rule in rs.coverage.values() {
        reached.union_with(&rule.target.denotation);
    }
    let holes = &g.universe() - &reached;
    if !holes.is_empty() {
        let cover = minimal_cover(&holes, g);
        out.push(warning(
            InconsistencyKind::DefinitionHoleTarget,
            Vec::new(),
            holes.clone(),
            &cover,
            format!(
                "no mapping rule covers {cover} [{}]",
                classes(holes.count())
            ),
        ));
    }
    out
}

/// One warning per pair of tags whose coverage denotations overlap.
pub fn check_nondisjointness(rs: &RuleSet, g: &TypeGraph) -> Vec<Inconsistency> {
    let rules: Vec<_> = rs
        .inventory
        .iter()
        .filter_map(|t| rs.coverage.get(t))
        .collect();
    let mut out = Vec::new();
    for (i, a) in rules.iter().enumerate() {
        for b in &rules[i + 1..] {
            let shared = &a.target.denotation & &b.target.denotation;
            if shared.is_empty() {
                continue;
            }
            let mut tags = vec![a.tag.clone(), b.tag.clone()];
            tags.sort();
            let cover = minimal_cover(&shared, g);
            let message = format!(
                "'{}' and '{}' both cover {cover} [{}]",
                tags[0],
                tags[1],
                classes(shared.count())
            );
            out.push(warning(
                InconsistencyKind::Nondisjunctive,
                tags,
                shared,
                &cover,
                message,
            ));
        }
    }
    out
}

/// A covering node of one tag that strictly contains covering nodes of
/// other tags gives its tag terminal status above their terminals.
pub fn check_hierarchical(mt: &MTree<'_>) -> Vec<Inconsistency> {
    let g = mt.graph;
    let mut out = Vec::new();
    for (tag, cover) in &mt.assignments {
        for upper in &cover.cubes {
            let mut below: Vec<(String, String)> = Vec::new();
            for (other, other_cover) in &mt.assignments {
                if other == tag {
                    continue;
                }
                for lower in &other_cover.cubes {
                    if lower.classes.is_strict_subset(&upper.classes) {
                        below.push((other.clone(), lower.render(g)));
                    }
                }
            }
            if below.is_empty() {
                continue;
            }
            let upper_text = upper.render(g);
            let message = format!(
                "'{tag}' is attached to {upper_text}, above {}",
                below
                    .iter()
                    .map(|(t, c)| format!("'{t}' ({c})"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            let mut tags = vec![tag.clone()];
            for (t, _) in below {
                if !tags.contains(&t) {
                    tags.push(t);
                }
            }
            out.push(Inconsistency {
                kind: InconsistencyKind::Hierarchical,
                tags,
                classes: upper.classes.clone(),
                cover: upper_text,
                message,
                severity: Severity::Warning,
            });
        }
    }
    out
}

pub fn build_mtree<'g>(rs: &RuleSet, g: &'g TypeGraph) -> MTree<'g> {
    let assignments = rs
        .coverage
        .iter()
        .map(|(tag, rule)| (tag.clone(), minimal_cover(&rule.target.denotation, g)))
        .collect();
    let class_of = (0..g.universe_len())
        .map(|c| {
            rs.inventory
                .iter()
                .filter(|t| {
                    rs.coverage
                        .get(*t)
                        .is_some_and(|r| r.target.denotation.contains(c))
                })
                .cloned()
                .collect()
        })
        .collect();
    let mut mt = MTree {
        graph: g,
        assignments,
        class_of,
        exception_reach: exception_reach(rs, g),
        diagnostics: Vec::new(),
    };
    let mut diagnostics = check_definition_holes(rs, g);
    diagnostics.extend(check_nondisjointness(rs, g));
    diagnostics.extend(check_hierarchical(&mt));
    diagnostics.sort_by(|a, b| (a.kind, &a.tags, &a.cover).cmp(&(b.kind, &b.tags, &b.cover)));
    mt.diagnostics = diagnostics;
    mt
}

impl MTree<'_> {
    /// `TAG -> cover [n classes]` per tag, then one `WARN` line per
    /// inconsistency.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (tag, cover) in &self.assignments {
            let n = cover.denotation(self.graph.universe_len()).count();
            out.push_str(&format!("{tag} -> {cover} [{}]\n", classes(n)));
        }
        for d in &self.diagnostics {
            out.push_str(&format!("{d}\n"));
        }
        out
    }

    pub fn diagnostics_of(&self, kind: InconsistencyKind) -> impl Iterator<Item = &Inconsistency> {
        self.diagnostics.iter().filter(move |d| d.kind == kind)
    }
}
