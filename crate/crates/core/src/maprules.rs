//! Coverage rules and the exception lexicon of one physical tagset.
//!
//! ```text
//! mapping upenn for tagset eagles-en
//! tags NN, VB, VBD
//! [pos = 'NN'] => [n & (common & sg | mass)].
//! [anybody, nothing] << [pos = 'NN'] >> [pos=pron & antec=prs & type=indef].
//! ```
//!
//! Every rule ends with `.`; `#` starts a comment. All rule errors are
//! collected before compilation fails.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::diag::{Diagnostic, Span};
use crate::specexpr::{parse_spec_in, typecheck, Op, SpecExpr, TypedSpec, Value};
use crate::typegraph::{TypeGraph, POS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageRule {
    pub tag: String,
    pub target: TypedSpec,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionEntry {
    pub words: Vec<String>,
    /// The `<<` side.
    pub out_of: String,
    /// The `>>` side.
    pub into: TypedSpec,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub name: String,
    pub tagset_name: String,
    /// Declared physical tags, in header order.
    pub inventory: Vec<String>,
    pub coverage: BTreeMap<String, CoverageRule>,
    pub exceptions: Vec<ExceptionEntry>,
    /// (word, tag) to index into `exceptions`.
    pub word_index: BTreeMap<(String, String), usize>,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Coverage,
    Exception,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Coverage => "coverage",
            Provenance::Exception => "exception",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Reading<'a> {
    pub spec: &'a TypedSpec,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("definition hole: physical tag '{tag}' has no coverage rule")]
pub struct DefinitionHole {
    pub tag: String,
}

impl RuleSet {
    pub fn tag_index(&self, tag: &str) -> Option<usize> {
        self.inventory.iter().position(|t| t == tag)
    }

    /// Exception entries keyed on `tag`, in file order.
    pub fn exceptions_for<'a>(
        &'a self,
        tag: &'a str,
    ) -> impl Iterator<Item = &'a ExceptionEntry> + 'a {
        self.exceptions.iter().filter(move |e| e.out_of == tag)
    }
}

/// The reading of `word` tagged `tag`: the exception target when the pair is
/// in the exception lexicon, the tag's coverage target otherwise.
pub fn standard_reading<'a>(
    rs: &'a RuleSet,
    word: &str,
    tag: &str,
) -> Result<Reading<'a>, DefinitionHole> {
    let rule = rs.coverage.get(tag).ok_or_else(|| DefinitionHole {
        tag: tag.to_string(),
    })?;
    match rs.word_index.get(&(word.to_string(), tag.to_string())) {
        Some(&i) => Ok(Reading {
            spec: &rs.exceptions[i].into,
            provenance: Provenance::Exception,
        }),
        None => Ok(Reading {
            spec: &rule.target,
            provenance: Provenance::Coverage,
        }),
    }
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.pos >= self.src.len()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_trivia();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn here(&self) -> Span {
        let len = self.rest().chars().next().map_or(0, char::len_utf8);
        Span::new(self.pos, self.pos + len)
    }

    fn error(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.src, self.here(), msg)
    }

    /// A run of characters up to whitespace, `,`, `[` or `#`.
    fn word(&mut self) -> Option<(String, Span)> {
        self.skip_trivia();
        let rest = self.rest();
        let len = rest
            .find(|c: char| c.is_whitespace() || matches!(c, ',' | '[' | '#'))
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        let span = Span::new(self.pos, self.pos + len);
        self.pos += len;
        Some((rest[..len].to_string(), span))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), Diagnostic> {
        self.skip_trivia();
        let save = self.pos;
        match self.word() {
            Some((w, _)) if w == kw => Ok(()),
            _ => {
                self.pos = save;
                Err(self.error(format!("expected `{kw}`")))
            }
        }
    }

    /// Offset of the next `c` outside quotes, starting here.
    fn find_unquoted(&self, c: char) -> Option<usize> {
        let mut quote = None;
        for (i, ch) in self.rest().char_indices() {
            match quote {
                Some(q) if ch == q => quote = None,
                Some(_) => {}
                None if ch == '\'' || ch == '"' => quote = Some(ch),
                None if ch == c => return Some(self.pos + i),
                None if ch == '#' => quote = Some('\n'),
                None => {}
            }
        }
        None
    }

    /// Skips past the next unquoted `.` for error recovery.
    fn recover(&mut self) {
        self.pos = self.find_unquoted('.').map_or(self.src.len(), |i| i + 1);
    }

    /// `[` ... `]`, returning the inner byte range and the outer span.
    fn bracket(&mut self) -> Result<(usize, usize, Span), Diagnostic> {
        self.skip_trivia();
        let open = self.pos;
        if !self.eat("[") {
            return Err(self.error("expected `[`"));
        }
        // word lists may hold apostrophes, so no quote tracking here
        let close = self.rest().find(']').map(|i| self.pos + i).ok_or_else(|| {
            Diagnostic::error(self.src, Span::new(open, open + 1), "unclosed `[`")
        })?;
        self.pos = close + 1;
        Ok((open + 1, close, Span::new(open, close + 1)))
    }

    /// The specification between here and the terminating `.`.
    fn body(&mut self) -> Result<(SpecExpr, usize), Diagnostic> {
        self.skip_trivia();
        let start = self.pos;
        let end = self.find_unquoted('.').ok_or_else(|| {
            Diagnostic::error(
                self.src,
                Span::new(start, self.src.len()),
                "rule is not terminated by `.`",
            )
        })?;
        // on failure stay on the `.` so recovery resumes at the next rule
        self.pos = end;
        let expr = parse_spec_in(self.src, start, end)?;
        self.pos = end + 1;
        Ok((expr, end + 1))
    }
}

/// The `pos = '<TAG>'` head of a rule.
fn rule_head(src: &str, start: usize, end: usize) -> Result<(String, Span), Diagnostic> {
    let head = parse_spec_in(src, start, end)?;
    match head {
        SpecExpr::Atom {
            ref feature,
            op: Op::Eq,
            value: Value::Quoted(tag),
            span,
        } if feature == POS => Ok((tag, span)),
        _ => Err(Diagnostic::error(
            src,
            head.span(),
            format!("rule head must have the form [{POS} = '<TAG>']"),
        )),
    }
}

enum RawRule {
    Coverage {
        tag: (String, Span),
        target: SpecExpr,
        span: Span,
    },
    Exception {
        words: Vec<(String, Span)>,
        tag: (String, Span),
        into: SpecExpr,
        span: Span,
    },
}

fn parse_rule(sc: &mut Scanner<'_>) -> Result<RawRule, Diagnostic> {
    let src = sc.src;
    let (start, end, outer) = sc.bracket()?;
    if sc.eat("=>") {
        let tag = rule_head(src, start, end)?;
        let (target, stop) = sc.body()?;
        return Ok(RawRule::Coverage {
            tag,
            target,
            span: Span::new(outer.start, stop),
        });
    }
    if !sc.eat("<<") {
        return Err(sc.error("expected `=>` or `<<` after `[...]`"));
    }
    let mut words = Vec::new();
    let mut offset = start;
    for piece in src[start..end].split(',') {
        let trimmed = piece.trim();
        let lead = piece.len() - piece.trim_start().len();
        let span = Span::new(offset + lead, offset + lead + trimmed.len());
        let word = trimmed
            .strip_prefix(['\'', '"'])
            .and_then(|w| w.strip_suffix(['\'', '"']))
            .unwrap_or(trimmed);
        if word.is_empty() {
            return Err(Diagnostic::error(src, span, "empty word in exception list"));
        }
        words.push((word.to_string(), span));
        offset += piece.len() + 1;
    }
    let (hs, he, _) = sc.bracket()?;
    let tag = rule_head(src, hs, he)?;
    if !sc.eat(">>") {
        return Err(sc.error("expected `>>`"));
    }
    let (into, stop) = sc.body()?;
    Ok(RawRule::Exception {
        words,
        tag,
        into,
        span: Span::new(outer.start, stop),
    })
}

/// Compiles a rule file against `g`. The inventory comes from the `tags`
/// header.
pub fn parse_rules(src: &str, g: &TypeGraph) -> Result<RuleSet, Vec<Diagnostic>> {
    let mut sc = Scanner { src, pos: 0 };
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let header = (|| {
        sc.keyword("mapping")?;
        let (name, _) = sc
            .word()
            .ok_or_else(|| sc.error("expected a mapping name"))?;
        sc.keyword("for")?;
        sc.keyword("tagset")?;
        let (tagset, tagset_span) = sc
            .word()
            .ok_or_else(|| sc.error("expected a tagset name"))?;
        sc.keyword("tags")?;
        let mut tags = vec![sc
            .word()
            .ok_or_else(|| sc.error("expected a physical tag"))?];
        while sc.eat(",") {
            tags.push(
                sc.word()
                    .ok_or_else(|| sc.error("expected a physical tag"))?,
            );
        }
        Ok((name, tagset, tagset_span, tags))
    })();
    let (name, tagset_name, tagset_span, tags) = header.map_err(|d| vec![d])?;

    if tagset_name != g.name {
        errors.push(Diagnostic::error(
            src,
            tagset_span,
            format!(
                "rules are written for tagset `{tagset_name}`, not `{}`",
                g.name
            ),
        ));
    }
    let mut inventory: Vec<String> = Vec::new();
    for (tag, span) in tags {
        if inventory.contains(&tag) {
            errors.push(Diagnostic::error(
                src,
                span,
                format!("tag '{tag}' declared twice"),
            ));
        } else {
            inventory.push(tag);
        }
    }

    let mut raw = Vec::new();
    while !sc.at_end() {
        match parse_rule(&mut sc) {
            Ok(r) => raw.push(r),
            Err(d) => {
                errors.push(d);
                sc.recover();
            }
        }
    }

    let mut coverage: BTreeMap<String, CoverageRule> = BTreeMap::new();
    let mut pending = Vec::new();
    for rule in raw {
        match rule {
            RawRule::Coverage {
                tag: (tag, tag_span),
                target,
                span,
            } => {
                if !inventory.contains(&tag) {
                    errors.push(Diagnostic::error(
                        src,
                        tag_span,
                        format!("unknown physical tag '{tag}'"),
                    ));
                    continue;
                }
                if coverage.contains_key(&tag) {
                    errors.push(Diagnostic::error(
                        src,
                        tag_span,
                        format!("duplicate coverage rule for tag '{tag}'"),
                    ));
                    continue;
                }
                match typecheck(&target, g) {
                    Ok(target) => {
                        coverage.insert(tag.clone(), CoverageRule { tag, target, span });
                    }
                    Err(e) => errors.push(Diagnostic::error(src, e.span(), e.to_string())),
                }
            }
            RawRule::Exception {
                words,
                tag,
                into,
                span,
            } => pending.push((words, tag, into, span)),
        }
    }

    let mut exceptions = Vec::new();
    let mut word_index = BTreeMap::new();
    for (words, (tag, tag_span), into, span) in pending {
        if !inventory.contains(&tag) {
            errors.push(Diagnostic::error(
                src,
                tag_span,
                format!("unknown physical tag '{tag}'"),
            ));
            continue;
        }
        let Some(rule) = coverage.get(&tag) else {
            errors.push(Diagnostic::error(
                src,
                tag_span,
                format!("exception out of tag '{tag}', which has no coverage rule"),
            ));
            continue;
        };
        let into = match typecheck(&into, g) {
            Ok(t) => t,
            Err(e) => {
                errors.push(Diagnostic::error(src, e.span(), e.to_string()));
                continue;
            }
        };
        if into.denotation == rule.target.denotation {
            warnings.push(Diagnostic::warning(
                src,
                span,
                format!("exception out of '{tag}' reclassifies into the tag's own reading"),
            ));
        }
        let index = exceptions.len();
        let mut kept = Vec::new();
        for (word, wspan) in words {
            let key = (word.clone(), tag.clone());
            match word_index.entry(key) {
                Entry::Occupied(_) => errors.push(Diagnostic::error(
                    src,
                    wspan,
                    format!("duplicate exception for word `{word}` under tag '{tag}'"),
                )),
                Entry::Vacant(slot) => {
                    slot.insert(index);
                    kept.push(word);
                }
            }
        }
        exceptions.push(ExceptionEntry {
            words: kept,
            out_of: tag,
            into,
            span,
        });
    }

    if !errors.is_empty() {
        errors.sort_by_key(|d| d.span);
        return Err(errors);
    }
    Ok(RuleSet {
        name,
        tagset_name,
        inventory,
        coverage,
        exceptions,
        word_index,
        warnings,
    })
}
