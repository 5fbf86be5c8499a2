//! Problem files.
//!
//! ```text
//! theory core | signed | with-one | growth
//! growth 1 2 5/2            # growth theory only, strictly increasing
//! assume f + g = h + O(k)
//! prove f = l + O(k) | !(f = O(g))
//! ```
//!
//! Formula connectives by increasing looseness: `!`, `&`, `|`, `->` (right
//! associative). In term position `|t|` is an absolute value. The literal
//! `1` is the constant one, `g[q]` a growth symbol, and `c * t` scales by a
//! rational `c`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::engine::Backend;
use crate::oracle::{Reading, Semantics};
use crate::rational::{self, Rational};
use crate::scales::GrowthContext;
use crate::terms::{Atom, BigOAtom, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unknown theory `{name}`")]
    UnknownTheory { line: usize, col: usize, name: String },
    #[error("{line}:{col}: growth indices must be strictly increasing")]
    GrowthIndexOutOfOrder { line: usize, col: usize },
    #[error("{line}:{col}: growth symbol g[{index}] is not declared")]
    UndeclaredGrowth {
        line: usize,
        col: usize,
        index: String,
    },
    #[error("{line}:{col}: {message}")]
    TheoryMismatch {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("the growth theory is read eventually only")]
    PointwiseGrowth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Theory {
    /// Nonnegative functions.
    Core,
    /// Functions of any sign.
    #[default]
    Signed,
    /// Functions of any sign, with `1` the constant one.
    WithOne,
    /// Functions of any sign, with growth symbols `g[q]`, read eventually.
    Growth,
}

impl Theory {
    pub fn name(self) -> &'static str {
        match self {
            Theory::Core => "core",
            Theory::Signed => "signed",
            Theory::WithOne => "with-one",
            Theory::Growth => "growth",
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core" => Ok(Theory::Core),
            "signed" => Ok(Theory::Signed),
            "with-one" => Ok(Theory::WithOne),
            "growth" => Ok(Theory::Growth),
            _ => Err(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub theory: Theory,
    pub reading: Reading,
    pub assumptions: Vec<BigOAtom>,
    pub goal: Formula,
    /// Declared growth indices; empty means those occurring in the formula.
    pub growth_indices: Vec<Rational>,
}

impl Problem {
    pub fn new(theory: Theory, assumptions: Vec<BigOAtom>, goal: Formula) -> Self {
        Problem {
            theory,
            reading: default_reading(theory),
            assumptions,
            goal,
            growth_indices: Vec::new(),
        }
    }

    /// `assumptions -> goal`.
    pub fn formula(&self) -> Formula {
        Formula::entailment(&self.assumptions, self.goal.clone())
    }

    pub fn with_reading(mut self, reading: Reading) -> Result<Self, ProblemError> {
        if self.theory == Theory::Growth && reading == Reading::Pointwise {
            return Err(ProblemError::PointwiseGrowth);
        }
        self.reading = reading;
        Ok(self)
    }

    pub fn growth_context(&self) -> GrowthContext {
        if self.growth_indices.is_empty() {
            GrowthContext::of_formula(&self.formula())
        } else {
            GrowthContext::new(self.growth_indices.clone()).expect("indices checked when parsed")
        }
    }

    /// The backend and whether sign splitting applies.
    pub fn backend(&self) -> (Backend, bool) {
        match self.theory {
            Theory::Core => (Backend::Core, false),
            Theory::Signed => (Backend::Core, true),
            Theory::WithOne => (Backend::WithOne, true),
            Theory::Growth => (Backend::Growth(self.growth_context()), true),
        }
    }

    pub fn semantics(&self) -> Semantics {
        Semantics {
            reading: self.reading,
            nonnegative: self.theory == Theory::Core,
            growth: match self.theory {
                Theory::Growth => self.growth_context().indices().to_vec(),
                _ => Vec::new(),
            },
        }
    }
}

fn default_reading(theory: Theory) -> Reading {
    match theory {
        Theory::Growth => Reading::Eventually,
        _ => Reading::Pointwise,
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theory {}", self.theory)?;
        if !self.growth_indices.is_empty() {
            let idx: Vec<String> = self.growth_indices.iter().map(rational::format).collect();
            writeln!(f, "growth {}", idx.join(" "))?;
        }
        for a in &self.assumptions {
            writeln!(f, "assume {a}")?;
        }
        writeln!(f, "prove {}", self.goal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(BigInt),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

const SYMBOLS: [&str; 14] = ["->", "+", "-", "*", "/", "=", "(", ")", "[", "]", ",", "|", "&", "!"];

fn tokenize(text: &str, line: usize) -> Result<Vec<(Tok, usize)>, ProblemError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Num(s.parse().expect("digits")), col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push((Tok::Sym(s), col));
                i += s.len();
            }
            None => {
                return Err(ProblemError::Syntax {
                    line,
                    col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Occurrences of fixed symbols, for theory checks.
#[derive(Debug, Default)]
struct Seen {
    one: Option<usize>,
    growth: Vec<(Rational, usize)>,
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
    seen: Seen,
}

type PResult<T> = Result<T, ProblemError>;

impl<'a> Parser<'a> {
    fn new(toks: &'a [(Tok, usize)], line: usize, end_col: usize) -> Self {
        Parser {
            toks,
            pos: 0,
            line,
            end_col,
            seen: Seen::default(),
        }
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_ident(&self, k: usize, s: &str) -> bool {
        matches!(self.peek_at(k), Some(Tok::Ident(x)) if x == s)
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ProblemError::Syntax {
            line: self.line,
            col: self.col(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn finish(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.unexpected("end of line"),
        }
    }

    fn rational(&mut self) -> PResult<Rational> {
        let negative = self.is_sym("-");
        if negative {
            self.pos += 1;
        }
        let Some(Tok::Num(n)) = self.peek().cloned() else {
            return self.unexpected("a number");
        };
        self.pos += 1;
        let mut q = Rational::from_integer(n);
        if self.is_sym("/") {
            self.pos += 1;
            let Some(Tok::Num(d)) = self.peek().cloned() else {
                return self.unexpected("a denominator");
            };
            if d.is_zero() {
                return self.error("zero denominator");
            }
            self.pos += 1;
            q /= Rational::from_integer(d);
        }
        Ok(if negative { -q } else { q })
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.unary()?;
        loop {
            if self.is_sym("+") {
                if self.is_ident(1, "O") && matches!(self.peek_at(2), Some(Tok::Sym("("))) {
                    break;
                }
                self.pos += 1;
                t = t + self.unary()?;
            } else if self.is_sym("-") {
                self.pos += 1;
                t = t - self.unary()?;
            } else {
                break;
            }
        }
        Ok(t)
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.is_sym("-") {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Term> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(_)) => {
                let q = self.rational()?;
                if self.is_sym("*") {
                    self.pos += 1;
                    return Ok(Term::scale(q, self.unary()?));
                }
                if q.is_zero() {
                    Ok(Term::Zero)
                } else {
                    self.seen.one.get_or_insert(col);
                    if q.is_one() {
                        Ok(Term::one())
                    } else {
                        Ok(Term::scale(q, Term::one()))
                    }
                }
            }
            Some(Tok::Ident(name)) => {
                if name == "g" && matches!(self.peek_at(1), Some(Tok::Sym("["))) {
                    self.pos += 2;
                    let q = self.rational()?;
                    self.expect("]")?;
                    self.seen.growth.push((q.clone(), col));
                    return Ok(Term::growth(q));
                }
                if (name == "min" || name == "max") && matches!(self.peek_at(1), Some(Tok::Sym("("))) {
                    self.pos += 2;
                    let a = self.term()?;
                    self.expect(",")?;
                    let b = self.term()?;
                    self.expect(")")?;
                    return Ok(if name == "min" { Term::min(a, b) } else { Term::max(a, b) });
                }
                if name == "O" {
                    return self.error("`O` is reserved for bounds");
                }
                self.pos += 1;
                Ok(Term::var(&name))
            }
            Some(Tok::Sym("|")) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect("|")?;
                Ok(Term::abs(t))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            _ => self.unexpected("a term"),
        }
    }

    fn bound(&mut self) -> PResult<Term> {
        self.pos += 1;
        self.expect("(")?;
        let b = self.term()?;
        self.expect(")")?;
        Ok(b)
    }

    fn atom(&mut self) -> PResult<BigOAtom> {
        let lhs = self.term()?;
        self.expect("=")?;
        if self.is_ident(0, "O") {
            let b = self.bound()?;
            return Ok(BigOAtom::big_o(lhs, b));
        }
        let rhs = self.term()?;
        if self.is_sym("+") && self.is_ident(1, "O") {
            self.pos += 1;
            let b = self.bound()?;
            return Ok(BigOAtom::new(lhs, rhs, b));
        }
        Ok(BigOAtom::equation(lhs, rhs))
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.is_sym("->") {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while self.is_sym("|") {
            self.pos += 1;
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.negation()?;
        while self.is_sym("&") {
            self.pos += 1;
            f = Formula::and(f, self.negation()?);
        }
        Ok(f)
    }

    fn negation(&mut self) -> PResult<Formula> {
        if self.is_sym("!") {
            self.pos += 1;
            return Ok(Formula::not(self.negation()?));
        }
        let start = self.pos;
        let seen = self.seen.growth.len();
        let one = self.seen.one;
        match self.atom() {
            Ok(a) => Ok(Formula::Atom(a)),
            Err(atom_err) if self.toks.get(start).map(|t| &t.0) == Some(&Tok::Sym("(")) => {
                let atom_pos = self.pos;
                self.pos = start + 1;
                self.seen.growth.truncate(seen);
                self.seen.one = one;
                match self.formula().and_then(|f| self.expect(")").map(|_| f)) {
                    Ok(f) => Ok(f),
                    Err(e) => Err(if self.pos >= atom_pos { e } else { atom_err }),
                }
            }
            Err(e) => Err(e),
        }
    }
}

/// Parses a problem file.
pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let mut theory = None;
    let mut growth: Option<(Vec<Rational>, usize)> = None;
    let mut assumptions = Vec::new();
    let mut goal = None;
    let mut seen = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let toks = tokenize(raw, line)?;
        let Some((Tok::Ident(kw), kw_col)) = toks.first().cloned() else {
            if toks.is_empty() {
                continue;
            }
            return Err(ProblemError::Syntax {
                line,
                col: toks[0].1,
                message: "expected `theory`, `growth`, `assume` or `prove`".into(),
            });
        };
        let mut p = Parser::new(&toks[1..], line, raw.chars().count() + 1);
        match kw.as_str() {
            "theory" => {
                let col = p.col();
                let Some(Tok::Ident(mut name)) = p.peek().cloned() else {
                    return p.unexpected("a theory name");
                };
                p.pos += 1;
                if name == "with" && p.is_sym("-") && p.is_ident(1, "one") {
                    name = "with-one".into();
                    p.pos += 2;
                }
                p.finish()?;
                let t = name
                    .parse::<Theory>()
                    .map_err(|name| ProblemError::UnknownTheory { line, col, name })?;
                if theory.replace(t).is_some() {
                    return Err(ProblemError::Syntax {
                        line,
                        col: kw_col,
                        message: "theory declared twice".into(),
                    });
                }
            }
            "growth" => {
                let mut idx: Vec<Rational> = Vec::new();
                while p.peek().is_some() {
                    let col = p.col();
                    let q = p.rational()?;
                    if idx.last().is_some_and(|last| *last >= q) {
                        return Err(ProblemError::GrowthIndexOutOfOrder { line, col });
                    }
                    idx.push(q);
                }
                if idx.is_empty() {
                    return p.unexpected("a growth index");
                }
                if growth.replace((idx, line)).is_some() {
                    return Err(ProblemError::Syntax {
                        line,
                        col: kw_col,
                        message: "growth declared twice".into(),
                    });
                }
            }
            "assume" => {
                let a = p.atom()?;
                p.finish()?;
                assumptions.push(a);
                seen.push((line, p.seen));
            }
            "prove" => {
                let f = p.formula()?;
                p.finish()?;
                if goal.replace(f).is_some() {
                    return Err(ProblemError::Syntax {
                        line,
                        col: kw_col,
                        message: "only one `prove` line is allowed".into(),
                    });
                }
                seen.push((line, p.seen));
            }
            _ => {
                return Err(ProblemError::Syntax {
                    line,
                    col: kw_col,
                    message: format!("unknown directive `{kw}`"),
                })
            }
        }
    }
    let theory = theory.unwrap_or_default();
    let goal = goal.ok_or_else(|| ProblemError::Syntax {
        line: text.lines().count().max(1),
        col: 1,
        message: "missing `prove` line".into(),
    })?;
    let mismatch = |line, col, message: &str| ProblemError::TheoryMismatch {
        line,
        col,
        message: message.to_string(),
    };
    if let Some((_, line)) = &growth {
        if theory != Theory::Growth {
            return Err(mismatch(*line, 1, "`growth` needs `theory growth`"));
        }
    }
    for (line, s) in &seen {
        if let Some(col) = s.one {
            if theory != Theory::WithOne {
                return Err(mismatch(*line, col, "the constant `1` needs `theory with-one`"));
            }
        }
        for (q, col) in &s.growth {
            if theory != Theory::Growth {
                return Err(mismatch(*line, *col, "growth symbols need `theory growth`"));
            }
            if let Some((idx, _)) = &growth {
                if !idx.contains(q) {
                    return Err(ProblemError::UndeclaredGrowth {
                        line: *line,
                        col: *col,
                        index: rational::format(q),
                    });
                }
            }
        }
    }
    Ok(Problem {
        theory,
        reading: default_reading(theory),
        assumptions,
        goal,
        growth_indices: growth.map(|g| g.0).unwrap_or_default(),
    })
}

/// Parses a single formula, with no theory checks.
pub fn parse_formula(text: &str) -> Result<Formula, ProblemError> {
    let toks = tokenize(text, 1)?;
    let mut p = Parser::new(&toks, 1, text.chars().count() + 1);
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a single atom, with no theory checks.
pub fn parse_atom(text: &str) -> Result<BigOAtom, ProblemError> {
    let toks = tokenize(text, 1)?;
    let mut p = Parser::new(&toks, 1, text.chars().count() + 1);
    let a = p.atom()?;
    p.finish()?;
    Ok(a)
}

/// Parses an atom name as printed: `1`, `g[q]` or a variable.
pub fn parse_atom_name(s: &str) -> Option<Atom> {
    if s == "1" {
        return Some(Atom::One);
    }
    if let Some(inner) = s.strip_prefix("g[").and_then(|r| r.strip_suffix(']')) {
        return rational::parse(inner).map(Atom::Growth);
    }
    let valid = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_' || c == '~')
        && s.chars().skip(1).all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    valid.then(|| Atom::var(s))
}
