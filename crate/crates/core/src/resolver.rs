//! Translation of standard-tagset queries into physical tag patterns.
//!
//! Let `S` be the query denotation. A tag is retrieved by its coverage rule
//! when its denotation meets `S`. Exception entries then restrict or extend
//! the result per word: words whose reclassified reading misses `S` are
//! excluded from a retrieved tag, and words whose reading meets `S` bring in
//! their tag even when the coverage rule does not.

use std::collections::BTreeSet;

use crate::classset::ClassSet;
use crate::maprules::RuleSet;
use crate::mtree::MTree;
use crate::specexpr::{minimal_cover, Cover, TypedSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordConstraint {
    None,
    Equals(Vec<String>),
    NotEquals(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagPattern {
    pub tag: String,
    pub word_constraint: WordConstraint,
}

impl TagPattern {
    pub fn render(&self) -> String {
        match &self.word_constraint {
            WordConstraint::None => format!("(pos = \"{}\")", self.tag),
            WordConstraint::Equals(w) => {
                format!("(pos = \"{}\" & word = \"{}\")", self.tag, w.join("|"))
            }
            WordConstraint::NotEquals(w) => {
                format!("(pos = \"{}\" & word != \"{}\")", self.tag, w.join("|"))
            }
        }
    }
}

/// Classes a retrieved tag brings in beyond the query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagNoise {
    pub tag: String,
    pub classes: ClassSet,
    pub cover: Cover,
}

/// Classes that retrieved exception words bring in beyond the query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordNoise {
    pub tag: String,
    pub words: Vec<String>,
    pub classes: ClassSet,
    pub cover: Cover,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NoiseReport {
    pub tags: Vec<TagNoise>,
    pub words: Vec<WordNoise>,
}

impl NoiseReport {
    pub fn is_empty(&self) -> bool {
        self.tags.is_empty() && self.words.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedQuery {
    pub patterns: Vec<TagPattern>,
    pub noise: NoiseReport,
    /// Query classes no pattern retrieves.
    pub uncovered_classes: ClassSet,
    pub uncovered: Cover,
}

impl ResolvedQuery {
    pub fn pattern(&self, tag: &str) -> Option<&TagPattern> {
        self.patterns.iter().find(|p| p.tag == tag)
    }
}

fn push_unique(list: &mut Vec<String>, words: &[String]) {
    for w in words {
        if !list.contains(w) {
            list.push(w.clone());
        }
    }
}

pub fn resolve(q: &TypedSpec, mt: &MTree<'_>, rs: &RuleSet) -> ResolvedQuery {
    let g = mt.graph;
    let s = &q.denotation;
    let mut retrieved = ClassSet::empty(g.universe_len());
    let mut patterns = Vec::new();
    let mut noise = NoiseReport::default();

    for tag in &rs.inventory {
        let Some(rule) = rs.coverage.get(tag) else {
            continue;
        };
        let base = rule.target.denotation.intersects(s);
        let mut wanted = Vec::new();
        let mut unwanted = Vec::new();
        for e in rs.exceptions_for(tag) {
            if e.into.denotation.intersects(s) {
                push_unique(&mut wanted, &e.words);
                retrieved.union_with(&e.into.denotation);
                let extra = &e.into.denotation - s;
                if !extra.is_empty() {
                    noise.words.push(WordNoise {
                        tag: tag.clone(),
                        words: e.words.clone(),
                        cover: minimal_cover(&extra, g),
                        classes: extra,
                    });
                }
            } else {
                push_unique(&mut unwanted, &e.words);
            }
        }
        let word_constraint = if base {
            retrieved.union_with(&rule.target.denotation);
            let extra = &rule.target.denotation - s;
            if !extra.is_empty() {
                noise.tags.push(TagNoise {
                    tag: tag.clone(),
                    cover: minimal_cover(&extra, g),
                    classes: extra,
                });
            }
            unwanted.retain(|w| !wanted.contains(w));
            if unwanted.is_empty() {
                WordConstraint::None
            } else {
                WordConstraint::NotEquals(unwanted)
            }
        } else if !wanted.is_empty() {
            WordConstraint::Equals(wanted)
        } else {
            continue;
        };
        patterns.push(TagPattern {
            tag: tag.clone(),
            word_constraint,
        });
    }

    let uncovered_classes = s - &retrieved;
    ResolvedQuery {
        patterns,
        noise,
        uncovered: minimal_cover(&uncovered_classes, g),
        uncovered_classes,
    }
}

/// The pattern line followed by one `WARN` line per noise item and, when
/// part of the query cannot be retrieved, an `uncovered` line.
pub fn render_query(r: &ResolvedQuery) -> String {
    let mut out = match r.patterns.as_slice() {
        [] => "[]".to_string(),
        [p] => format!("[{}]", p.render()),
        ps => format!(
            "[({})]",
            ps.iter()
                .map(TagPattern::render)
                .collect::<Vec<_>>()
                .join("|")
        ),
    };
    out.push('\n');
    for n in &r.noise.tags {
        out.push_str(&format!("WARN noise {}: {}\n", n.tag, n.cover));
    }
    for n in &r.noise.words {
        out.push_str(&format!(
            "WARN noise {} word \"{}\": {}\n",
            n.tag,
            n.words.join("|"),
            n.cover
        ));
    }
    if !r.uncovered.is_empty() {
        out.push_str(&format!("WARN uncovered: {}\n", r.uncovered));
    }
    out
}

/// Tags retrieved for `q` by coverage alone.
pub fn base_tags(q: &TypedSpec, rs: &RuleSet) -> BTreeSet<String> {
    rs.coverage
        .iter()
        .filter(|(_, r)| r.target.denotation.intersects(&q.denotation))
        .map(|(t, _)| t.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{EAGLES_EN_TAGSET, UPENN_RULES};
    use crate::maprules::parse_rules;
    use crate::mtree::build_mtree;
    use crate::specexpr::{denote, parse_spec, typecheck};
    use crate::typegraph::{parse_tagset_definition, TypeGraph};

    fn setup() -> (TypeGraph, RuleSet) {
        let g = parse_tagset_definition(EAGLES_EN_TAGSET).unwrap();
        let rs = parse_rules(UPENN_RULES, &g).unwrap();
        (g, rs)
    }

    fn query(g: &TypeGraph, rs: &RuleSet, src: &str) -> ResolvedQuery {
        let q = typecheck(&parse_spec(src).unwrap(), g).unwrap();
        resolve(&q, &build_mtree(rs, g), rs)
    }

    fn classes(g: &TypeGraph, src: &str) -> ClassSet {
        denote(&parse_spec(src).unwrap(), g).unwrap()
    }

    #[test]
    fn infinitive_or_primary_past() {
        let (g, rs) = setup();
        let r = query(
            &g,
            &rs,
            "[(vtype=con & vform=inf) | (vtype=prim & tense=past)]",
        );
        let text = render_query(&r);
        let first = text.lines().next().unwrap();
        assert_eq!(
            first,
            r#"[((pos = "VB" & word != "be|do|have")|(pos = "VBD" & word = "was|were|had|did")|(pos = "VBN" & word = "been|had|done"))]"#
        );
        assert_eq!(r.noise.tags.len(), 1);
        assert_eq!(r.noise.tags[0].tag, "VB");
        assert_eq!(
            r.noise.tags[0].classes,
            classes(&g, "vtype=con & vform=fin & (mood=subj | mood=imp)")
        );
        assert!(r.noise.words.is_empty());
        assert!(r.uncovered.is_empty());
        assert_eq!(
            text.lines().nth(1),
            Some("WARN noise VB: vtype=con & vform=fin & (mood=subj | mood=imp)")
        );
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn indefinite_pronouns_come_from_exceptions() {
        let (g, rs) = setup();
        let r = query(&g, &rs, "[pos=pron & type=indef]");
        assert_eq!(
            r.patterns,
            vec![
                TagPattern {
                    tag: "DT".into(),
                    word_constraint: WordConstraint::Equals(
                        ["all", "some", "any", "none", "each"]
                            .map(String::from)
                            .to_vec()
                    ),
                },
                TagPattern {
                    tag: "NN".into(),
                    word_constraint: WordConstraint::Equals(
                        ["anybody", "nothing", "something", "anything"]
                            .map(String::from)
                            .to_vec()
                    ),
                },
            ]
        );
        assert!(r.noise.is_empty());
        assert!(r.uncovered.is_empty());
    }

    #[test]
    fn exception_reading_outside_query_is_word_noise() {
        let (g, rs) = setup();
        let r = query(&g, &rs, "[vtype=prim & mood=ind & tense=past & pers=1]");
        assert_eq!(r.patterns.len(), 1);
        assert_eq!(
            r.pattern("VBD").unwrap().word_constraint,
            WordConstraint::Equals(["was", "were", "had", "did"].map(String::from).to_vec())
        );
        assert!(r.noise.tags.is_empty());
        assert_eq!(r.noise.words.len(), 1);
        assert_eq!(
            r.noise.words[0].classes,
            classes(&g, "vtype=prim & mood=ind & tense=past & pers!=1")
        );
    }

    #[test]
    fn retrieved_tag_noise() {
        let (g, rs) = setup();
        let r = query(&g, &rs, "[pron & antec=prs]");
        let tags: Vec<_> = r.patterns.iter().map(|p| p.tag.as_str()).collect();
        assert_eq!(tags, ["NN", "WP"]);
        assert_eq!(r.noise.tags.len(), 1);
        assert_eq!(r.noise.tags[0].classes, classes(&g, "type=wh & antec=nprs"));
    }

    #[test]
    fn single_plain_tag() {
        let (g, rs) = setup();
        let r = query(&g, &rs, "[n & common & sg]");
        assert_eq!(render_query(&r), "[(pos = \"NN\" & word != \"anybody|nothing|something|anything\")]\nWARN noise NN: ntype=mass\n");
        let r = query(&g, &rs, "[pos=numeral]");
        assert_eq!(render_query(&r), "[(pos = \"CD\")]\n");
    }

    #[test]
    fn both_readings_wanted() {
        let (g, rs) = setup();
        // the reclassified and the standard reading of `had` both match
        let r = query(&g, &rs, "[mood=ind & tense=past]");
        assert_eq!(
            r.pattern("VBD").unwrap().word_constraint,
            WordConstraint::None
        );
        assert!(r.noise.is_empty());
    }

    #[test]
    fn holes_are_uncovered() {
        let g = parse_tagset_definition(EAGLES_EN_TAGSET).unwrap();
        let src: String = UPENN_RULES
            .lines()
            .filter(|l| !l.contains("pron"))
            .map(|l| format!("{l}\n"))
            .collect();
        let rs = parse_rules(&src, &g).unwrap();
        let r = query(&g, &rs, "[pos=pron & type=wh]");
        assert!(r.patterns.is_empty());
        assert_eq!(r.uncovered.text(), "type=wh");
        assert_eq!(render_query(&r), "[]\nWARN uncovered: type=wh\n");
    }

    #[test]
    fn equal_denotations_resolve_alike() {
        let (g, rs) = setup();
        let a = query(&g, &rs, "[!(vform=inf) & vtype=con]");
        let b = query(&g, &rs, "[vtype=con & (vform=fin | vform=part)]");
        assert_eq!(a, b);
    }

    #[test]
    fn base_inclusion_is_monotone() {
        let (g, rs) = setup();
        let small = typecheck(&parse_spec("[vform=part & tense=past]").unwrap(), &g).unwrap();
        let big = typecheck(&parse_spec("[pos=v]").unwrap(), &g).unwrap();
        assert!(base_tags(&small, &rs).is_subset(&base_tags(&big, &rs)));
    }
}
