//! De Bruijn terms: representation, concrete syntax, size and openness.
//!
//! The concrete syntax is `\` (or `λ`) for abstraction, decimal indices
//! starting at 1, parentheses for grouping and juxtaposition for
//! application. Application is left-associative and an abstraction body
//! extends as far to the right as possible, so `\ \ 2 1` is
//! `λ(λ(2 1))`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::SizeModel;

/// A lambda term in De Bruijn form. Subterms are reference counted so that
/// enumerators can share them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// Variable with De Bruijn index `>= 1`.
    Var(usize),
    Abs(Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn var(index: usize) -> Term {
        assert!(index >= 1, "De Bruijn indices start at 1");
        Term::Var(index)
    }

    pub fn abs(body: Term) -> Term {
        Term::Abs(Arc::new(body))
    }

    pub fn app(left: Term, right: Term) -> Term {
        Term::App(Arc::new(left), Arc::new(right))
    }

    /// Size under `model`.
    pub fn size(&self, model: &SizeModel) -> usize {
        match self {
            Term::Var(k) => model.var_size(*k),
            Term::Abs(body) => body.size(model) + model.c() as usize,
            Term::App(l, r) => l.size(model) + r.size(model) + model.d() as usize,
        }
    }

    /// Least `m` such that `m` leading abstractions close the term.
    pub fn openness(&self) -> usize {
        match self {
            Term::Var(k) => *k,
            Term::Abs(body) => body.openness().saturating_sub(1),
            Term::App(l, r) => l.openness().max(r.openness()),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.openness() == 0
    }

    /// Largest De Bruijn index occurring in the term.
    pub fn max_index(&self) -> usize {
        match self {
            Term::Var(k) => *k,
            Term::Abs(body) => body.max_index(),
            Term::App(l, r) => l.max_index().max(r.max_index()),
        }
    }

    pub fn parse(text: &str) -> Result<Term> {
        Parser::new(text).parse_all()
    }
}

pub fn parse_term(text: &str) -> Result<Term> {
    Term::parse(text)
}

pub fn term_size(t: &Term, model: &SizeModel) -> usize {
    t.size(model)
}

pub fn openness(t: &Term) -> usize {
    t.openness()
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        Term::parse(s)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(k) => write!(f, "{k}"),
            Term::Abs(body) => write!(f, "\\ {body}"),
            Term::App(l, r) => {
                match l.as_ref() {
                    Term::Abs(_) => write!(f, "({l})")?,
                    _ => write!(f, "{l}")?,
                }
                match r.as_ref() {
                    Term::Var(_) => write!(f, " {r}"),
                    _ => write!(f, " ({r})"),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token {
    Lambda,
    Index(usize),
    Open,
    Close,
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    lex_error: Option<Error>,
}

impl Parser {
    fn new(text: &str) -> Self {
        let mut tokens = Vec::new();
        let mut lex_error = None;
        let mut chars = text.char_indices().peekable();
        while let Some(&(i, ch)) = chars.peek() {
            match ch {
                c if c.is_whitespace() => {
                    chars.next();
                }
                '\\' | 'λ' => {
                    chars.next();
                    tokens.push((i, Token::Lambda));
                }
                '(' => {
                    chars.next();
                    tokens.push((i, Token::Open));
                }
                ')' => {
                    chars.next();
                    tokens.push((i, Token::Close));
                }
                '0'..='9' => {
                    let mut value: usize = 0;
                    let mut overflow = false;
                    while let Some(&(_, d)) = chars.peek() {
                        let Some(digit) = d.to_digit(10) else { break };
                        chars.next();
                        match value
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(digit as usize))
                        {
                            Some(v) => value = v,
                            None => overflow = true,
                        }
                    }
                    if overflow {
                        lex_error.get_or_insert(Error::Syntax {
                            pos: i,
                            msg: "index too large".into(),
                        });
                    } else if value == 0 {
                        lex_error.get_or_insert(Error::ZeroIndex { pos: i });
                    }
                    tokens.push((i, Token::Index(value)));
                }
                other => {
                    lex_error.get_or_insert(Error::Syntax {
                        pos: i,
                        msg: format!("unexpected character `{other}`"),
                    });
                    break;
                }
            }
        }
        Parser {
            tokens,
            pos: 0,
            end: text.len(),
            lex_error,
        }
    }

    fn peek(&self) -> Option<(usize, Token)> {
        self.tokens.get(self.pos).copied()
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |(p, _)| p)
    }

    fn parse_all(mut self) -> Result<Term> {
        if let Some(err) = self.lex_error.take() {
            return Err(err);
        }
        let term = self.term()?;
        match self.peek() {
            None => Ok(term),
            Some((pos, Token::Close)) => Err(Error::Syntax {
                pos,
                msg: "unbalanced `)`".into(),
            }),
            Some((pos, _)) => Err(Error::Syntax {
                pos,
                msg: "trailing input".into(),
            }),
        }
    }

    // term := '\' term | atom+ ['\' term]
    fn term(&mut self) -> Result<Term> {
        if let Some((_, Token::Lambda)) = self.peek() {
            self.pos += 1;
            return Ok(Term::abs(self.term()?));
        }
        let mut acc = self.atom()?;
        loop {
            match self.peek() {
                Some((_, Token::Index(_))) | Some((_, Token::Open)) => {
                    let arg = self.atom()?;
                    acc = Term::app(acc, arg);
                }
                Some((_, Token::Lambda)) => {
                    self.pos += 1;
                    let arg = Term::abs(self.term()?);
                    return Ok(Term::app(acc, arg));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek() {
            Some((_, Token::Index(k))) => {
                self.pos += 1;
                Ok(Term::Var(k))
            }
            Some((_, Token::Open)) => {
                self.pos += 1;
                let inner = self.term()?;
                match self.peek() {
                    Some((_, Token::Close)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Syntax {
                        pos: self.here(),
                        msg: "expected `)`".into(),
                    }),
                }
            }
            Some((pos, Token::Close)) => Err(Error::Syntax {
                pos,
                msg: "expected a term".into(),
            }),
            Some((pos, Token::Lambda)) => Err(Error::Syntax {
                pos,
                msg: "unexpected `\\`".into(),
            }),
            None => Err(Error::Syntax {
                pos: self.end,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}
