//! Human-readable descriptions of class sets.
//!
//! A cube is a conjunction of `=` atoms (optionally a hierarchy node). The
//! cover of a set is a smallest list of cubes whose denotations union to
//! exactly that set. Each cube is rendered through its closure, i.e. every
//! atom shared by all of its classes, so that `{con subj, con imp}` reads
//! `vtype=con & vform=fin & (mood=subj | mood=imp)` rather than the shortest
//! distinguishing atoms.

use std::collections::HashSet;
use std::fmt;

use crate::classset::ClassSet;
use crate::typegraph::{FeatureId, NodeId, TypeGraph, ValueId, POS};

/// Ordering follows declaration order: `pos` first, then features, then
/// values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CubeAtom {
    Pos(NodeId),
    Feature(FeatureId, ValueId),
}

impl CubeAtom {
    pub fn render(self, g: &TypeGraph) -> String {
        match self {
            CubeAtom::Pos(n) => format!("{POS}={}", g.node(n).name),
            CubeAtom::Feature(f, v) => format!("{}={}", g.feature(f).name, g.value_name(f, v)),
        }
    }

    fn denote(self, g: &TypeGraph) -> &ClassSet {
        match self {
            CubeAtom::Pos(n) => g.node_set(n),
            CubeAtom::Feature(f, v) => g.eq_set(f, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cube {
    pub atoms: Vec<CubeAtom>,
    pub classes: ClassSet,
}

impl Cube {
    pub fn render(&self, g: &TypeGraph) -> String {
        render_atoms(&self.atoms, g)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub cubes: Vec<Cube>,
    text: String,
}

impl Cover {
    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Rendered expression; empty for the empty cover.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn denotation(&self, universe_len: usize) -> ClassSet {
        let mut out = ClassSet::empty(universe_len);
        for c in &self.cubes {
            out.union_with(&c.classes);
        }
        out
    }
}

impl fmt::Display for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Atoms common to every class of `set`, with the lowest dominating node
/// added only when the feature atoms alone do not pin the set down.
fn closure(set: &ClassSet, g: &TypeGraph) -> Vec<CubeAtom> {
    let classes: Vec<_> = set.iter().map(|i| &g.terminal_classes()[i]).collect();
    let lca = g.common_ancestor(classes.iter().map(|c| c.leaf));
    let mut atoms = Vec::new();
    let mut den = g.universe();
    for f in 0..g.features().len() {
        let first = classes[0].values[f];
        if let Some(v) = first {
            if classes.iter().all(|c| c.values[f] == first) {
                let atom = CubeAtom::Feature(FeatureId(f), v);
                den.intersect_with(atom.denote(g));
                atoms.push(atom);
            }
        }
    }
    if atoms.is_empty() || den != *set {
        atoms.insert(0, CubeAtom::Pos(lca));
    }
    atoms
}

/// Maximal cubes contained in `s`.
fn prime_cubes(s: &ClassSet, g: &TypeGraph) -> Vec<ClassSet> {
    let mut seen: HashSet<ClassSet> = HashSet::new();
    for t in s.iter() {
        let class = &g.terminal_classes()[t];
        let ancestors = g.ancestors(class.leaf);
        let atoms: Vec<&ClassSet> = class
            .values
            .iter()
            .enumerate()
            .filter_map(|(f, v)| v.map(|v| g.eq_set(FeatureId(f), v)))
            .collect();
        for mask in 0u64..(1 << atoms.len()) {
            let mut base = g.universe();
            for (i, a) in atoms.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    base.intersect_with(a);
                }
            }
            // ancestors run leaf to root, so denotations only grow
            for &anc in &ancestors {
                let d = &base & g.node_set(anc);
                if !d.is_subset(s) {
                    break;
                }
                seen.insert(d);
            }
        }
    }
    let mut cands: Vec<ClassSet> = seen.into_iter().collect();
    cands.sort_by(|a, b| b.count().cmp(&a.count()).then_with(|| a.cmp(b)));
    let mut primes: Vec<ClassSet> = Vec::new();
    for c in cands {
        if !primes.iter().any(|p| c.is_subset(p)) {
            primes.push(c);
        }
    }
    primes
}

struct CoverSearch<'a> {
    primes: &'a [ClassSet],
    best: Vec<usize>,
    budget: usize,
}

impl CoverSearch<'_> {
    fn greedy(&self, s: &ClassSet) -> Vec<usize> {
        let mut uncovered = s.clone();
        let mut chosen = Vec::new();
        while !uncovered.is_empty() {
            let (i, _) = self
                .primes
                .iter()
                .enumerate()
                .map(|(i, p)| (i, (p & &uncovered).count()))
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .expect("primes cover every class");
            uncovered.difference_with(&self.primes[i]);
            chosen.push(i);
        }
        chosen
    }

    fn search(&mut self, uncovered: &ClassSet, chosen: &mut Vec<usize>) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        if uncovered.is_empty() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + 1 >= self.best.len() {
            return;
        }
        // branch on the class with the fewest covering primes
        let (_, options) = uncovered
            .iter()
            .map(|e| {
                let opts: Vec<usize> = (0..self.primes.len())
                    .filter(|&p| self.primes[p].contains(e))
                    .collect();
                (e, opts)
            })
            .min_by_key(|(e, opts)| (opts.len(), *e))
            .expect("uncovered is nonempty");
        let mut options = options;
        options.sort_by_key(|&p| std::cmp::Reverse((&self.primes[p] & uncovered).count()));
        for p in options {
            chosen.push(p);
            self.search(&(uncovered - &self.primes[p]), chosen);
            chosen.pop();
        }
    }
}

/// A smallest set of cubes whose denotations union to exactly `s`.
pub fn minimal_cover(s: &ClassSet, g: &TypeGraph) -> Cover {
    if s.is_empty() {
        return Cover {
            cubes: Vec::new(),
            text: String::new(),
        };
    }
    let mut primes: Vec<(Vec<CubeAtom>, ClassSet)> = prime_cubes(s, g)
        .into_iter()
        .map(|p| (closure(&p, g), p))
        .collect();
    primes.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    let sets: Vec<ClassSet> = primes.iter().map(|p| p.1.clone()).collect();

    let mut search = CoverSearch {
        primes: &sets,
        best: Vec::new(),
        budget: 50_000,
    };
    search.best = search.greedy(s);
    search.search(s, &mut Vec::new());

    let mut chosen = search.best;
    chosen.sort_unstable();
    let cubes: Vec<Cube> = chosen
        .into_iter()
        .map(|i| Cube {
            atoms: primes[i].0.clone(),
            classes: primes[i].1.clone(),
        })
        .collect();
    let lists: Vec<&[CubeAtom]> = cubes.iter().map(|c| c.atoms.as_slice()).collect();
    let text = render_cubes(&lists, g);
    Cover { cubes, text }
}

fn render_atoms(atoms: &[CubeAtom], g: &TypeGraph) -> String {
    atoms
        .iter()
        .map(|a| a.render(g))
        .collect::<Vec<_>>()
        .join(" & ")
}

/// Renders a disjunction of cubes, factoring shared leading atoms:
/// `a & b | a & c` becomes `a & (b | c)`.
fn render_cubes(cubes: &[&[CubeAtom]], g: &TypeGraph) -> String {
    if cubes.len() == 1 {
        return render_atoms(cubes[0], g);
    }
    let common: Vec<CubeAtom> = cubes[0]
        .iter()
        .copied()
        .filter(|a| cubes.iter().all(|c| c.contains(a)))
        .collect();
    let rest: Vec<Vec<CubeAtom>> = cubes
        .iter()
        .map(|c| c.iter().copied().filter(|a| !common.contains(a)).collect())
        .collect();
    if rest.iter().any(Vec::is_empty) {
        return cubes
            .iter()
            .map(|c| render_atoms(c, g))
            .collect::<Vec<_>>()
            .join(" | ");
    }

    let mut groups: Vec<(CubeAtom, Vec<&[CubeAtom]>)> = Vec::new();
    for r in &rest {
        match groups.iter_mut().find(|(head, _)| *head == r[0]) {
            Some((_, members)) => members.push(r),
            None => groups.push((r[0], vec![r])),
        }
    }
    let disjunction = groups
        .iter()
        .map(|(_, members)| render_cubes(members, g))
        .collect::<Vec<_>>()
        .join(" | ");
    if common.is_empty() {
        disjunction
    } else {
        format!("{} & ({disjunction})", render_atoms(&common, g))
    }
}
