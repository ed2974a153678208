use thiserror::Error;

use super::{ContextFormula, Formula, Literal, Variant};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty input")]
    Empty,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected {found}, expected {expected}")]
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("unknown variant tag `{0}` (expected 1.1, 1.2, 2.1 or 2.2)")]
    UnknownVariant(String),
    #[error("relativization `^` applied to nothing")]
    DanglingRelativization,
    #[error("context formulas only admit literals, `true`, `false` and `&`; found {0}")]
    NotALiteral(String),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Tag given to operators written without one (`K{i} a`, `K_i a`).
    /// `None` keeps them untagged.
    pub default_variant: Option<Variant>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Know,
    Poss,
    Not,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Caret,
    Underscore,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Know => "`K`".into(),
            Tok::Poss => "`P`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Underscore => "`_`".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_lowercase() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        let err = |kind| ParseError { offset: pos, kind };
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&(_, c)) = it.peek() {
                if !is_ident_char(c) {
                    break;
                }
                s.push(c);
                it.next();
            }
            out.push((pos, Tok::Ident(s)));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, c)) = it.peek() {
                if !(c.is_ascii_digit() || c == '.') {
                    break;
                }
                s.push(c);
                it.next();
            }
            out.push((pos, Tok::Number(s)));
            continue;
        }
        it.next();
        let tok = match c {
            'K' | 'P' | '◇' => {
                out.push((pos, if c == 'K' { Tok::Know } else { Tok::Poss }));
                if let Some(&(upos, '_')) = it.peek() {
                    it.next();
                    out.push((upos, Tok::Underscore));
                }
                continue;
            }
            '~' | '¬' => Tok::Not,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '→' => Tok::Imp,
            '↔' => Tok::Iff,
            '-' => match it.next() {
                Some((_, '>')) => Tok::Imp,
                _ => return Err(err(ParseErrorKind::UnexpectedChar('-'))),
            },
            '<' => match (it.next(), it.next()) {
                (Some((_, '-')), Some((_, '>'))) => Tok::Iff,
                _ => return Err(err(ParseErrorKind::UnexpectedChar('<'))),
            },
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '^' => Tok::Caret,
            other => return Err(err(ParseErrorKind::UnexpectedChar(other))),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    opts: &'a ParseOptions,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let kind = match self.peek() {
            Some(t) => ParseErrorKind::UnexpectedToken {
                found: t.describe(),
                expected,
            },
            None => ParseErrorKind::UnexpectedEnd(expected),
        };
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self, expected: &'static str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.peek() == Some(&Tok::Imp) {
            self.pos += 1;
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Know) | Some(Tok::Poss) => {
                let know = self.bump() == Some(Tok::Know);
                let (agent, variant) = self.tag()?;
                let body = Box::new(self.unary()?);
                Ok(if know {
                    Formula::Know(agent, variant, body)
                } else {
                    Formula::Poss(agent, variant, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn tag(&mut self) -> Result<(String, Option<Variant>), ParseError> {
        match self.peek() {
            Some(Tok::Underscore) => {
                self.pos += 1;
                let agent = self.ident("agent name")?;
                Ok((agent, self.opts.default_variant))
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let agent = self.ident("agent name")?;
                let variant = if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    let at = self.offset();
                    match self.bump() {
                        Some(Tok::Number(n)) => {
                            Some(n.parse::<Variant>().map_err(|_| ParseError {
                                offset: at,
                                kind: ParseErrorKind::UnknownVariant(n),
                            })?)
                        }
                        Some(Tok::Ident(n)) => {
                            return Err(ParseError {
                                offset: at,
                                kind: ParseErrorKind::UnknownVariant(n),
                            })
                        }
                        _ => {
                            self.pos -= 1;
                            return Err(self.unexpected("variant tag"));
                        }
                    }
                } else {
                    self.opts.default_variant
                };
                self.expect(Tok::RBrace, "`}`")?;
                Ok((agent, variant))
            }
            _ => Err(self.unexpected("`{` or `_` after operator")),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let base = match self.peek() {
            Some(Tok::Ident(_)) => Formula::Atom(self.ident("atom")?),
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                inner
            }
            Some(Tok::Caret) => {
                return Err(ParseError {
                    offset: self.offset(),
                    kind: ParseErrorKind::DanglingRelativization,
                })
            }
            _ => return Err(self.unexpected("formula")),
        };
        let mut f = base;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let ctx = self.ident("context name after `^`")?;
            f = Formula::rel(f, ctx);
        }
        Ok(f)
    }
}

/// Parses a formula, keeping untagged operators untagged.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &ParseOptions::default())
}

pub fn parse_formula_with(text: &str, opts: &ParseOptions) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        opts,
    };
    let f = p.formula()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Parses a context formula (`true`, `false`, or a `&`-conjunction of
/// literals, where `true`/`false` may also appear as conjuncts).
pub fn parse_context(text: &str) -> Result<ContextFormula, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let end = text.len();
    let not_lit = |offset: usize, what: String| ParseError {
        offset,
        kind: ParseErrorKind::NotALiteral(what),
    };
    let mut lits = Vec::new();
    let mut bot = false;
    let mut i = 0;
    loop {
        let Some((off, tok)) = toks.get(i) else {
            return Err(ParseError {
                offset: end,
                kind: ParseErrorKind::UnexpectedEnd("literal"),
            });
        };
        match tok {
            Tok::Ident(s) if s == "true" => {}
            Tok::Ident(s) if s == "false" => bot = true,
            Tok::Ident(s) => lits.push(Literal::pos(s.clone())),
            Tok::Not => {
                i += 1;
                match toks.get(i) {
                    Some((_, Tok::Ident(s))) if s != "true" && s != "false" => {
                        lits.push(Literal::neg(s.clone()))
                    }
                    Some((o, t)) => {
                        return Err(not_lit(*o, format!("negation of {}", t.describe())))
                    }
                    None => {
                        return Err(ParseError {
                            offset: end,
                            kind: ParseErrorKind::UnexpectedEnd("atom"),
                        })
                    }
                }
            }
            other => return Err(not_lit(*off, other.describe())),
        }
        i += 1;
        match toks.get(i) {
            None => break,
            Some((_, Tok::And)) => i += 1,
            Some((o, t)) => return Err(not_lit(*o, t.describe())),
        }
    }
    if bot {
        return Ok(ContextFormula::Bot);
    }
    Ok(ContextFormula::from_literals(lits))
}
