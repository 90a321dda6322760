use std::fmt;

use super::{Op, SpecExpr, Value};
use crate::diag::{Diagnostic, Span};
use crate::typegraph::{is_ident_char, is_ident_start};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBracket,
    RBracket,
    LParen,
    RParen,
    And,
    Or,
    Not,
    Eq,
    Neq,
    Name(String),
    Quoted(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Not => "`!`",
            Tok::Eq => "`=`",
            Tok::Neq => "`!=`",
            Tok::Name(n) => return write!(f, "`{n}`"),
            Tok::Quoted(q) => return write!(f, "'{q}'"),
        };
        f.write_str(s)
    }
}

fn lex(src: &str, start: usize, end: usize) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let text = &src[start..end];
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        let at = start + i;
        let single = |t| (t, Span::new(at, at + 1));
        match c {
            c if c.is_whitespace() => {}
            '#' => {
                while it.peek().is_some_and(|&(_, d)| d != '\n') {
                    it.next();
                }
            }
            '[' => out.push(single(Tok::LBracket)),
            ']' => out.push(single(Tok::RBracket)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            '&' => out.push(single(Tok::And)),
            '|' => out.push(single(Tok::Or)),
            '=' => out.push(single(Tok::Eq)),
            '!' => {
                if it.peek().is_some_and(|&(_, c)| c == '=') {
                    it.next();
                    out.push((Tok::Neq, Span::new(at, at + 2)));
                } else {
                    out.push(single(Tok::Not));
                }
            }
            '\'' | '"' => {
                let mut close = None;
                for (j, d) in it.by_ref() {
                    if d == c {
                        close = Some(j);
                        break;
                    }
                }
                let Some(j) = close else {
                    return Err(Diagnostic::error(
                        src,
                        Span::new(at, end),
                        "unterminated quoted tag",
                    ));
                };
                out.push((
                    Tok::Quoted(text[i + 1..j].to_string()),
                    Span::new(at, start + j + 1),
                ));
            }
            c if is_ident_start(c) => {
                let mut stop = i + c.len_utf8();
                while let Some(&(j, d)) = it.peek() {
                    if !is_ident_char(d) {
                        break;
                    }
                    stop = j + d.len_utf8();
                    it.next();
                }
                out.push((
                    Tok::Name(text[i..stop].to_string()),
                    Span::new(at, start + stop),
                ));
            }
            other => {
                return Err(Diagnostic::error(
                    src,
                    Span::new(at, at + other.len_utf8()),
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> Span {
        self.toks
            .get(self.pos)
            .map_or(Span::new(self.end, self.end), |(_, s)| *s)
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_string(), |t| t.to_string());
        Diagnostic::error(
            self.src,
            self.span(),
            format!("expected {expected}, found {found}"),
        )
    }

    fn expr(&mut self) -> Result<SpecExpr, Diagnostic> {
        let mut left = self.term()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let right = self.term()?;
            left = SpecExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<SpecExpr, Diagnostic> {
        let mut left = self.factor()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let right = self.factor()?;
            left = SpecExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<SpecExpr, Diagnostic> {
        let start = self.span();
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                let inner = self.factor()?;
                let span = start.to(inner.span());
                Ok(SpecExpr::Not(Box::new(inner), span))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Tok::Name(_)) => self.atom(),
            _ => Err(self.unexpected("a name, `!` or `(`")),
        }
    }

    fn atom(&mut self) -> Result<SpecExpr, Diagnostic> {
        let (Tok::Name(name), name_span) = self.toks[self.pos].clone() else {
            unreachable!("atom called on a non-name token")
        };
        self.pos += 1;
        let op = match self.peek() {
            Some(Tok::Eq) => Op::Eq,
            Some(Tok::Neq) => Op::Neq,
            _ => {
                return Ok(SpecExpr::Bare {
                    name,
                    span: name_span,
                })
            }
        };
        let op_span = self.span();
        self.pos += 1;
        let value = match self.toks.get(self.pos) {
            Some((Tok::Name(v), s)) => (Value::Name(v.clone()), *s),
            Some((Tok::Quoted(q), s)) => (Value::Quoted(q.clone()), *s),
            _ => {
                return Err(Diagnostic::error(
                    self.src,
                    op_span,
                    format!("`{op}` is not followed by a value"),
                ))
            }
        };
        self.pos += 1;
        Ok(SpecExpr::Atom {
            feature: name,
            op,
            value: value.0,
            span: name_span.to(value.1),
        })
    }
}

/// Parses a whole string as a specification.
pub fn parse_spec(src: &str) -> Result<SpecExpr, Diagnostic> {
    parse_spec_in(src, 0, src.len())
}

/// Parses `src[start..end]`; spans and positions refer to all of `src`.
pub fn parse_spec_in(src: &str, start: usize, end: usize) -> Result<SpecExpr, Diagnostic> {
    let toks = lex(src, start, end)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        end,
    };
    let bracketed = p.peek() == Some(&Tok::LBracket);
    if bracketed {
        p.pos += 1;
    }
    if p.peek().is_none() || (bracketed && p.peek() == Some(&Tok::RBracket)) {
        return Err(Diagnostic::error(
            src,
            Span::new(start, end),
            "empty specification",
        ));
    }
    let expr = p.expr()?;
    if bracketed {
        if p.peek() != Some(&Tok::RBracket) {
            return Err(p.unexpected("`]`"));
        }
        p.pos += 1;
    }
    if p.peek().is_some() {
        return Err(p.unexpected("end of specification"));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use SpecExpr as E;

    #[test]
    fn auxiliary_example() {
        let e = parse_spec("[pos = v & vtype = aux & pers = 3]").unwrap();
        let want = E::and(
            E::and(E::atom("pos", Op::Eq, "v"), E::atom("vtype", Op::Eq, "aux")),
            E::atom("pers", Op::Eq, "3"),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn bare_atoms_and_precedence() {
        let e = parse_spec("[n & ( common & sg | mass ) ]").unwrap();
        let want = E::and(
            E::bare("n"),
            E::or(E::and(E::bare("common"), E::bare("sg")), E::bare("mass")),
        );
        assert_eq!(e, want);

        let e = parse_spec("!a | b & c").unwrap();
        assert_eq!(
            e,
            E::or(E::not(E::bare("a")), E::and(E::bare("b"), E::bare("c")))
        );
        let e = parse_spec("a | b | c").unwrap();
        assert_eq!(e, E::or(E::or(E::bare("a"), E::bare("b")), E::bare("c")));
    }

    #[test]
    fn dangling_equals() {
        let d = parse_spec("[pos = & v]").unwrap_err();
        assert_eq!(d.span, Span::new(5, 6));
        assert_eq!(d.column, 6);
        assert!(d.message.contains("`=` is not followed by a value"));
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "[]", "", "  ", "[a", "a)", "(a", "a &", "a b", "[a] b", "a = 'x", "a ? b",
        ] {
            assert!(parse_spec(bad).is_err(), "{bad:?} should not parse");
        }
        assert!(parse_spec("[]").unwrap_err().message.contains("empty"));
    }

    #[test]
    fn quoted_tags_and_neq() {
        let e = parse_spec("[pos = 'NN']").unwrap();
        assert!(matches!(e, E::Atom { value: Value::Quoted(ref q), .. } if q == "NN"));
        let e = parse_spec("case!=gen").unwrap();
        assert_eq!(e, E::atom("case", Op::Neq, "gen"));
        assert_eq!(e.span(), Span::new(0, 9));
    }

    #[test]
    fn offsets_in_larger_text() {
        let src = "xx\n[pos = & v] yy";
        let d = parse_spec_in(src, 3, 14).unwrap_err();
        assert_eq!((d.line, d.column), (2, 6));
    }

    #[test]
    fn pretty_keeps_structure() {
        for src in [
            "[n & (common & sg | mass)]",
            "[a & (b & c)]",
            "[a | (b | c)]",
            "[!(a & b) | !!c]",
            "[pos=pron & antec=prs & type=indef]",
        ] {
            let e = parse_spec(src).unwrap();
            assert_eq!(e.bracketed(), src);
        }
    }

    fn arb_expr() -> impl Strategy<Value = SpecExpr> {
        let leaf = prop_oneof![
            "[a-z][a-z0-9]{0,3}".prop_map(|n| E::bare(&n)),
            ("[a-z]{1,3}", any::<bool>(), "[a-z0-9]{1,3}")
                .prop_map(|(f, eq, v)| { E::atom(&f, if eq { Op::Eq } else { Op::Neq }, &v) }),
            "[A-Z$]{1,4}".prop_map(|t| E::Atom {
                feature: "pos".into(),
                op: Op::Eq,
                value: Value::Quoted(t),
                span: Span::default()
            }),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| E::and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| E::or(l, r)),
                inner.prop_map(E::not),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(e in arb_expr()) {
            let text = e.bracketed();
            let back = parse_spec(&text).unwrap();
            prop_assert_eq!(back, e);
        }
    }
}
