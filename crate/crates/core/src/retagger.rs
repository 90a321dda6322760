//! Rewriting of physically tagged corpora into standard-tagset readings.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use crate::diag::{Diagnostic, Severity, Span};
use crate::maprules::{standard_reading, Provenance, RuleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    /// Whitespace-separated `word/TAG` items.
    #[default]
    Slash,
    /// One `word<TAB>TAG` token per line.
    Tsv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub word: String,
    pub tag: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetagRecord {
    pub token: Token,
    /// Canonical text of the reading; empty for holes.
    pub reading: String,
    pub provenance: Option<Provenance>,
    pub underspecified: bool,
    pub hole: bool,
}

impl RetagRecord {
    pub fn render(&self) -> String {
        let provenance = self.provenance.map_or("-", Provenance::as_str);
        let flags = match (self.underspecified, self.hole) {
            (false, false) => "-",
            (true, false) => "underspecified",
            (false, true) => "hole",
            (true, true) => "underspecified,hole",
        };
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.token.word, self.token.tag, self.reading, provenance, flags
        )
    }
}

/// Splits one corpus line into tokens. Slash items are split at their last
/// `/`, so words may themselves contain slashes.
pub fn parse_corpus_line(
    line: &str,
    line_no: usize,
    format: CorpusFormat,
) -> Result<Vec<Token>, Diagnostic> {
    match format {
        CorpusFormat::Slash => {
            let mut out = Vec::new();
            let mut rest = line;
            while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
                let len = rest[start..]
                    .find(char::is_whitespace)
                    .unwrap_or(rest.len() - start);
                let item = &rest[start..start + len];
                let offset = line.len() - rest.len() + start;
                let column = line[..offset].chars().count() + 1;
                let bad = |what: &str| Diagnostic {
                    severity: Severity::Error,
                    span: Span::new(offset, offset + len),
                    line: line_no,
                    column,
                    message: format!("item `{item}` {what}"),
                };
                let Some(slash) = item.rfind('/') else {
                    return Err(bad("has no `/TAG`"));
                };
                let (word, tag) = (&item[..slash], &item[slash + 1..]);
                if word.is_empty() {
                    return Err(bad("has an empty word"));
                }
                if tag.is_empty() {
                    return Err(bad("has an empty tag"));
                }
                out.push(Token {
                    word: word.to_string(),
                    tag: tag.to_string(),
                    line: line_no,
                    column,
                });
                rest = &rest[start + len..];
            }
            Ok(out)
        }
        CorpusFormat::Tsv => {
            if line.trim().is_empty() {
                return Ok(Vec::new());
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [word, tag] if !word.is_empty() && !tag.trim().is_empty() => Ok(vec![Token {
                    word: word.to_string(),
                    tag: tag.trim().to_string(),
                    line: line_no,
                    column: 1,
                }]),
                _ => Err(Diagnostic {
                    severity: Severity::Error,
                    span: Span::new(0, line.len()),
                    line: line_no,
                    column: 1,
                    message: format!("expected `word<TAB>tag`, found {} field(s)", fields.len()),
                }),
            }
        }
    }
}

pub fn retag_token(t: &Token, rs: &RuleSet) -> RetagRecord {
    match standard_reading(rs, &t.word, &t.tag) {
        Ok(r) => RetagRecord {
            token: t.clone(),
            reading: r.spec.render(),
            provenance: Some(r.provenance),
            underspecified: r.spec.denotation.count() > 1,
            hole: false,
        },
        Err(_) => RetagRecord {
            token: t.clone(),
            reading: String::new(),
            provenance: None,
            underspecified: false,
            hole: true,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Summary {
    pub tokens: usize,
    pub exceptions: usize,
    pub underspecified: usize,
    pub holes: BTreeMap<String, usize>,
    pub malformed: Vec<Diagnostic>,
    /// Whether a `'s` item tagged `POS` was seen.
    pub possessive_clitics: bool,
}

impl Summary {
    pub fn record(&mut self, r: &RetagRecord) {
        self.tokens += 1;
        if r.provenance == Some(Provenance::Exception) {
            self.exceptions += 1;
        }
        if r.underspecified {
            self.underspecified += 1;
        }
        if r.hole {
            *self.holes.entry(r.token.tag.clone()).or_default() += 1;
        }
        if r.token.tag == "POS" && r.token.word == "'s" {
            self.possessive_clitics = true;
        }
    }

    pub fn hole_count(&self) -> usize {
        self.holes.values().sum()
    }

    /// Combines the counts of two stream chunks.
    pub fn merge(&mut self, other: Summary) {
        self.tokens += other.tokens;
        self.exceptions += other.exceptions;
        self.underspecified += other.underspecified;
        for (tag, n) in other.holes {
            *self.holes.entry(tag).or_default() += n;
        }
        self.malformed.extend(other.malformed);
        self.possessive_clitics |= other.possessive_clitics;
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "# tokens: {}\n# exceptions: {}\n# underspecified: {}\n# holes: {}\n",
            self.tokens,
            self.exceptions,
            self.underspecified,
            self.hole_count()
        );
        for (tag, n) in &self.holes {
            out.push_str(&format!("# hole {tag}: {n}\n"));
        }
        out.push_str(&format!("# malformed lines: {}\n", self.malformed.len()));
        if self.possessive_clitics {
            out.push_str(
                "# note: 's/POS items are kept as separate tokens, no clitic bundling is done\n",
            );
        }
        out
    }
}

/// Writes one record line per token to `out` and returns the counts.
/// Malformed lines are skipped and reported in the summary.
pub fn retag_stream<R: BufRead, W: Write + ?Sized>(
    input: R,
    rs: &RuleSet,
    format: CorpusFormat,
    out: &mut W,
) -> io::Result<Summary> {
    let mut summary = Summary::default();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        match parse_corpus_line(&line, i + 1, format) {
            Ok(tokens) => {
                for t in &tokens {
                    let r = retag_token(t, rs);
                    summary.record(&r);
                    writeln!(out, "{}", r.render())?;
                }
            }
            Err(d) => summary.malformed.push(d),
        }
    }
    Ok(summary)
}
