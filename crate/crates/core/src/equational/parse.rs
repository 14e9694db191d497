use std::fmt;

use super::Term;

/// A syntax error, positioned at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Expected(&'static str),
    UnexpectedEnd,
    TrailingInput,
    BadNumber,
    UnknownState { state: usize, states: usize },
    Arity { expected: usize, found: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: ", self.position)?;
        match &self.kind {
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::TrailingInput => write!(f, "unexpected trailing input"),
            ParseErrorKind::BadNumber => write!(f, "index does not fit in a machine word"),
            ParseErrorKind::UnknownState { state, states } => {
                write!(
                    f,
                    "update subscript {state} is not a state (|S| = {states})"
                )
            }
            ParseErrorKind::Arity { expected, found } => {
                write!(f, "lookup takes {expected} branches, found {found}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses `x<k>`, `u<s>(t)` and `l(t0, ..., t{n-1})` for `n = states`.
/// Whitespace between tokens is ignored.
pub fn parse(text: &str, states: usize) -> Result<Term, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        states,
    };
    let term = p.term()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(ParseErrorKind::TrailingInput));
    }
    Ok(term)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    states: usize,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8, what: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(b) if b == byte => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(self.error(ParseErrorKind::Expected(what))),
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(ParseErrorKind::Expected("a decimal index")));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError {
                position: start,
                kind: ParseErrorKind::BadNumber,
            })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some(b'x') => {
                self.pos += 1;
                Ok(Term::Var(self.number()?))
            }
            Some(b'u') => {
                self.pos += 1;
                let state = self.number()?;
                if state >= self.states {
                    return Err(ParseError {
                        position: start,
                        kind: ParseErrorKind::UnknownState {
                            state,
                            states: self.states,
                        },
                    });
                }
                self.expect(b'(', "`(`")?;
                let arg = self.term()?;
                self.expect(b')', "`)`")?;
                Ok(Term::update(state, arg))
            }
            Some(b'l') => {
                self.pos += 1;
                self.expect(b'(', "`(`")?;
                let mut branches = vec![self.term()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    branches.push(self.term()?);
                }
                self.expect(b')', "`,` or `)`")?;
                if branches.len() != self.states {
                    return Err(ParseError {
                        position: start,
                        kind: ParseErrorKind::Arity {
                            expected: self.states,
                            found: branches.len(),
                        },
                    });
                }
                Ok(Term::Lookup(branches))
            }
            Some(_) => Err(self.error(ParseErrorKind::Expected("`x`, `u` or `l`"))),
        }
    }
}
