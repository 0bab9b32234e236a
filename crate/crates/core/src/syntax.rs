//! Concrete syntax: lexer, recursive-descent parser and minimal-parenthesis
//! printer for formulas and sequents.
//!
//! Precedence, tightest first: `~`, `/\`, `\/`, `->` (right), `<->` (right).
//! Quantifiers extend as far right as possible.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::{Formula, Signature, Variable};

/// Name of the placeholder variable produced by `_` in context mode.
pub const HOLE: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    And,
    Or,
    Arrow,
    Iff,
    Turnstile,
    Hole,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::And => f.write_str("`/\\`"),
            Tok::Or => f.write_str("`\\/`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::Turnstile => f.write_str("`|-`"),
            Tok::Hole => f.write_str("`_`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &text[i..];
        let tok = if c.is_ascii_alphabetic() {
            let mut j = i + 1;
            while j < bytes.len()
                && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
            {
                j += 1;
            }
            let t = Tok::Ident(text[i..j].to_string());
            i = j;
            t
        } else if rest.starts_with("<->") {
            i += 3;
            Tok::Iff
        } else if rest.starts_with("->") {
            i += 2;
            Tok::Arrow
        } else if rest.starts_with("/\\") {
            i += 2;
            Tok::And
        } else if rest.starts_with("\\/") {
            i += 2;
            Tok::Or
        } else if rest.starts_with("|-") {
            i += 2;
            Tok::Turnstile
        } else {
            i += 1;
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'~' => Tok::Tilde,
                b'_' => Tok::Hole,
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(ParseError {
                        offset: start,
                        expected: vec!["a token".into()],
                        found: format!("`{ch}`"),
                    });
                }
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
    allow_holes: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature, allow_holes: bool) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            sig,
            allow_holes,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, label: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(name) if name == "exists" || name == "forall" => {
                self.bump();
                let v = match self.bump() {
                    Tok::Ident(n) if !is_keyword(&n) && !self.sig.is_symbol(&n) => {
                        Variable::new(n)
                    }
                    _ => {
                        self.pos -= 1;
                        return Err(self.error(&["a bound variable"]));
                    }
                };
                self.expect(Tok::Dot, "`.`")?;
                let body = self.formula()?;
                Ok(if name == "exists" {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Hole if self.allow_holes => {
                self.bump();
                Ok(Formula::var(HOLE))
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.bump();
                match name.as_str() {
                    "bot" => return Ok(Formula::Bottom),
                    "top" => return Ok(Formula::top()),
                    _ => {}
                }
                if let Some(arity) = self.sig.arity(&name) {
                    let args = self.arguments(arity, at, &name)?;
                    return Ok(Formula::app(&name, args));
                }
                if let Some(m) = self.sig.macro_def(&name).cloned() {
                    let args = self.arguments(m.params.len(), at, &name)?;
                    let map: BTreeMap<Variable, Formula> =
                        m.params.iter().cloned().zip(args).collect();
                    return Ok(m.body.substitute(&map));
                }
                if *self.peek() == Tok::LParen {
                    return Err(ParseError {
                        offset: at,
                        expected: vec!["a declared connective".into()],
                        found: format!("`{name}`"),
                    });
                }
                Ok(Formula::var(name))
            }
            _ => {
                let mut exp = vec!["a variable", "`bot`", "`top`", "`~`", "`(`", "a quantifier"];
                if self.allow_holes {
                    exp.push("`_`");
                }
                Err(self.error(&exp))
            }
        }
    }

    fn arguments(&mut self, arity: usize, at: usize, name: &str) -> Result<Vec<Formula>, ParseError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            if *self.peek() != Tok::RParen {
                args.push(self.formula()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.formula()?);
                }
            }
            self.expect(Tok::RParen, "`)` or `,`")?;
        } else if arity > 0 {
            return Err(self.error(&["`(`"]));
        }
        if args.len() != arity {
            return Err(ParseError {
                offset: at,
                expected: vec![format!("{arity} argument(s) for `{name}`")],
                found: format!("{}", args.len()),
            });
        }
        Ok(args)
    }

    fn sequent(&mut self) -> Result<(Vec<Formula>, Formula), ParseError> {
        let mut hyps = Vec::new();
        if *self.peek() != Tok::Turnstile {
            hyps.push(self.formula()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                hyps.push(self.formula()?);
            }
        }
        if *self.peek() != Tok::Turnstile {
            return Err(self.error(&["`,`", "`|-`"]));
        }
        self.bump();
        let concl = if *self.peek() == Tok::Eof {
            Formula::Bottom
        } else {
            self.formula()?
        };
        Ok((hyps, concl))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input", "a binary connective"]))
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "bot" | "top" | "exists" | "forall")
}

/// Parses a formula over the empty signature.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_in(text, &Signature::default())
}

pub fn parse_formula_in(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, sig, false)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a context formula in which `_` marks the hole (read as the
/// variable [`HOLE`]).
pub fn parse_context(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, sig, true)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses the longest formula at the start of `text` and returns it along
/// with the byte offset where parsing stopped.
pub fn parse_formula_prefix(
    text: &str,
    sig: &Signature,
    allow_holes: bool,
) -> Result<(Formula, usize), ParseError> {
    let mut p = Parser::new(text, sig, allow_holes)?;
    let f = p.formula()?;
    Ok((f, p.offset()))
}

/// Parses `phi1, ..., phin |- psi`; an empty right side denotes `bot`.
pub fn parse_sequent_parts(
    text: &str,
    sig: &Signature,
) -> Result<(Vec<Formula>, Formula), ParseError> {
    let mut p = Parser::new(text, sig, false)?;
    let s = p.sequent()?;
    p.finish()?;
    Ok(s)
}

const PREC_QUANT: u8 = 0;
const PREC_IFF: u8 = 1;
const PREC_IMP: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_NOT: u8 = 5;
const PREC_ATOM: u8 = 6;

enum View<'a> {
    Atomic,
    Not(&'a Formula),
    Iff(&'a Formula, &'a Formula),
    Imp(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    And(&'a Formula, &'a Formula),
    Quant,
}

fn view(f: &Formula) -> View<'_> {
    match f {
        _ if f.is_top() => View::Atomic,
        Formula::Var(_) | Formula::Bottom | Formula::App(..) => View::Atomic,
        Formula::Implies(a, b) if **b == Formula::Bottom => View::Not(a),
        Formula::Implies(a, b) => View::Imp(a, b),
        Formula::And(l, r) => match (&**l, &**r) {
            (Formula::Implies(a, b), Formula::Implies(b2, a2))
                if a == a2 && b == b2 && **b != Formula::Bottom && **a2 != Formula::Bottom =>
            {
                View::Iff(a, b)
            }
            _ => View::And(l, r),
        },
        Formula::Or(a, b) => View::Or(a, b),
        Formula::Exists(..) | Formula::Forall(..) => View::Quant,
    }
}

fn prec(f: &Formula) -> u8 {
    match view(f) {
        View::Atomic => PREC_ATOM,
        View::Not(_) => PREC_NOT,
        View::And(..) => PREC_AND,
        View::Or(..) => PREC_OR,
        View::Imp(..) => PREC_IMP,
        View::Iff(..) => PREC_IFF,
        View::Quant => PREC_QUANT,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut String) {
    let p = prec(f);
    // Quantifiers swallow everything to their right, so any operand
    // position gets parentheses.
    if p < min || (p == PREC_QUANT && min > PREC_QUANT) {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    match view(f) {
        View::Atomic => match f {
            Formula::Var(v) => out.push_str(v.name()),
            Formula::Bottom => out.push_str("bot"),
            Formula::App(name, args) => {
                out.push_str(name);
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        write_at(a, PREC_QUANT, out);
                    }
                    out.push(')');
                }
            }
            _ => out.push_str("top"),
        },
        View::Not(a) => {
            out.push('~');
            write_at(a, PREC_NOT, out);
        }
        View::And(a, b) => {
            write_at(a, PREC_AND, out);
            out.push_str(" /\\ ");
            write_at(b, PREC_NOT, out);
        }
        View::Or(a, b) => {
            write_at(a, PREC_OR, out);
            out.push_str(" \\/ ");
            write_at(b, PREC_AND, out);
        }
        View::Imp(a, b) => {
            write_at(a, PREC_OR, out);
            out.push_str(" -> ");
            write_at(b, PREC_IMP, out);
        }
        View::Iff(a, b) => {
            write_at(a, PREC_IMP, out);
            out.push_str(" <-> ");
            write_at(b, PREC_IFF, out);
        }
        View::Quant => match f {
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                out.push_str(if matches!(f, Formula::Exists(..)) {
                    "exists "
                } else {
                    "forall "
                });
                out.push_str(v.name());
                out.push_str(". ");
                write_formula(body, out);
            }
            _ => unreachable!(),
        },
    }
}

/// Renders a formula with minimal parentheses.
pub fn print(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(f, &mut s);
    s
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}
