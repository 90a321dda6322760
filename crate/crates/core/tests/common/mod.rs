//! Brute-force reference semantics and fixture helpers shared by the
//! integration tests. Nothing here uses the library's denotation code: specs
//! are evaluated class by class against the enumerated universe.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use tagmap::specexpr::{Op, SpecExpr, Value};
use tagmap::typegraph::{NodeId, TerminalClass, TypeGraph};
use tagmap::{ClassSet, RuleSet};

pub use tagmap::fixtures::{EAGLES_EN_TAGSET, UPENN_RULES};

pub fn graph() -> TypeGraph {
    tagmap::parse_tagset_definition(EAGLES_EN_TAGSET).expect("fixture tagset compiles")
}

pub fn rules(g: &TypeGraph, src: &str) -> RuleSet {
    tagmap::parse_rules(src, g).expect("rules compile")
}

/// The fixture rules without the lines containing any of `needles`.
pub fn without_lines(needles: &[&str]) -> String {
    UPENN_RULES
        .lines()
        .filter(|l| !needles.iter().any(|n| l.contains(n)))
        .map(|l| format!("{l}\n"))
        .collect()
}

/// `src` with `tag` added to the inventory and `rule` appended.
pub fn with_rule(src: &str, tag: &str, rule: &str) -> String {
    let mut s = src.replacen("WRB\n", &format!("WRB, {tag}\n"), 1);
    s.push_str(rule);
    s.push('\n');
    s
}

fn under(g: &TypeGraph, ancestor: NodeId, mut node: NodeId) -> bool {
    loop {
        if node == ancestor {
            return true;
        }
        match g.node(node).parent {
            Some(p) => node = p,
            None => return false,
        }
    }
}

/// Feature name and value index a bare value name stands for.
fn bare_value(g: &TypeGraph, name: &str) -> Option<(usize, usize)> {
    g.features()
        .iter()
        .enumerate()
        .find_map(|(f, d)| d.values.iter().position(|v| v == name).map(|v| (f, v)))
}

fn atom_holds(g: &TypeGraph, feature: &str, eq: bool, value: &str, c: &TerminalClass) -> bool {
    if feature == "pos" {
        let node = g.node_by_name(value).expect("known node");
        return under(g, node, c.leaf) == eq;
    }
    let (f, decl) = g
        .features()
        .iter()
        .enumerate()
        .find(|(_, d)| d.name == feature)
        .expect("known feature");
    let v = decl
        .values
        .iter()
        .position(|x| x == value)
        .expect("known value");
    match c.values[f] {
        None => false,
        Some(x) => (x.0 == v) == eq,
    }
}

fn mentioned_features(g: &TypeGraph, e: &SpecExpr, out: &mut BTreeSet<usize>) {
    match e {
        SpecExpr::Atom { feature, .. } if feature == "pos" => {}
        SpecExpr::Atom { feature, .. } => {
            out.insert(
                g.features()
                    .iter()
                    .position(|d| &d.name == feature)
                    .unwrap(),
            );
        }
        SpecExpr::Bare { name, .. } => {
            if g.node_by_name(name).is_none() {
                out.insert(bare_value(g, name).unwrap().0);
            }
        }
        SpecExpr::And(l, r) | SpecExpr::Or(l, r) => {
            mentioned_features(g, l, out);
            mentioned_features(g, r, out);
        }
        SpecExpr::Not(inner, _) => mentioned_features(g, inner, out),
    }
}

/// Closed-world truth of `e` for one class. A negation only holds where
/// every feature it mentions is defined.
pub fn holds(g: &TypeGraph, e: &SpecExpr, c: &TerminalClass) -> bool {
    match e {
        SpecExpr::Atom {
            feature, op, value, ..
        } => {
            let value = match value {
                Value::Name(v) | Value::Quoted(v) => v,
            };
            atom_holds(g, feature, *op == Op::Eq, value, c)
        }
        SpecExpr::Bare { name, .. } => match g.node_by_name(name) {
            Some(_) => atom_holds(g, "pos", true, name, c),
            None => {
                let (f, v) = bare_value(g, name).expect("known name");
                c.values[f].map(|x| x.0) == Some(v)
            }
        },
        SpecExpr::And(l, r) => holds(g, l, c) && holds(g, r, c),
        SpecExpr::Or(l, r) => holds(g, l, c) || holds(g, r, c),
        SpecExpr::Not(inner, _) => {
            let mut fs = BTreeSet::new();
            mentioned_features(g, inner, &mut fs);
            fs.iter().all(|&f| c.values[f].is_some()) && !holds(g, inner, c)
        }
    }
}

pub fn brute_denote(g: &TypeGraph, e: &SpecExpr) -> ClassSet {
    let classes = g.terminal_classes();
    ClassSet::from_indices(
        classes.len(),
        classes
            .iter()
            .enumerate()
            .filter(|(_, c)| holds(g, e, c))
            .map(|(i, _)| i),
    )
}

/// Random specification biased towards the features of one leaf so that a
/// good share of the output is well-typed.
pub fn random_spec<R: Rng>(rng: &mut R, g: &TypeGraph, depth: u32) -> SpecExpr {
    let leaves: Vec<NodeId> = g.leaves().collect();
    let leaf = *leaves.choose(rng).unwrap();
    spec_near(rng, g, leaf, depth)
}

fn spec_near<R: Rng>(rng: &mut R, g: &TypeGraph, leaf: NodeId, depth: u32) -> SpecExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_atom(rng, g, leaf);
    }
    match rng.gen_range(0..5) {
        0 | 1 => SpecExpr::and(
            spec_near(rng, g, leaf, depth - 1),
            spec_near(rng, g, leaf, depth - 1),
        ),
        2 | 3 => SpecExpr::or(
            spec_near(rng, g, leaf, depth - 1),
            spec_near(rng, g, leaf, depth - 1),
        ),
        _ => SpecExpr::not(spec_near(rng, g, leaf, depth - 1)),
    }
}

fn random_atom<R: Rng>(rng: &mut R, g: &TypeGraph, leaf: NodeId) -> SpecExpr {
    let op = if rng.gen_bool(0.75) { Op::Eq } else { Op::Neq };
    let local: Vec<usize> = g
        .features()
        .iter()
        .enumerate()
        .filter(|(_, d)| under(g, d.home, leaf))
        .map(|(i, _)| i)
        .collect();
    let roll = rng.gen_range(0..10);
    if roll < 2 || local.is_empty() {
        let node = if rng.gen_bool(0.8) {
            let mut chain = vec![leaf];
            while let Some(p) = g.node(*chain.last().unwrap()).parent {
                chain.push(p);
            }
            *chain.choose(rng).unwrap()
        } else {
            NodeId(rng.gen_range(0..g.nodes().len()))
        };
        let name = g.node(node).name.clone();
        return if rng.gen_bool(0.5) {
            SpecExpr::atom("pos", op, &name)
        } else {
            SpecExpr::bare(&name)
        };
    }
    let f = if roll < 9 {
        *local.choose(rng).unwrap()
    } else {
        rng.gen_range(0..g.features().len())
    };
    let decl = &g.features()[f];
    let value = decl.values.choose(rng).unwrap().clone();
    if op == Op::Eq && rng.gen_bool(0.3) {
        SpecExpr::bare(&value)
    } else {
        SpecExpr::atom(&decl.name, op, &value)
    }
}

/// Whitespace-insensitive comparison form.
pub fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}
