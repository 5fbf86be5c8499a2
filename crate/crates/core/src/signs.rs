//! Reduction of the full language (negative values, `|.|`, `min`, `max`) to
//! clauses over nonnegative functions.
//!
//! Bounds are first wrapped in `|.|`, `min` and `max` are rewritten with
//! absolute values, and every `|t|` with a compound `t` is named by a fresh
//! variable `h` with the hypothesis `h = t`, innermost first. A clause is then
//! valid over arbitrary functions iff every substitution of `+v` or `-v` for
//! its variables `v`, now read as nonnegative, gives a valid clause.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::engine::{self, Backend, DecideError};
use crate::formula::{ImplicativeClause, BOTTOM_VAR};
use crate::rational::{self, Rational};
use crate::terms::{Atom, BigOAtom, Formula, LinearExpr, Term, TermError, FRESH_PREFIX};
use crate::verdict::{Counterexample, Verdict};

/// `fresh = body`, introduced to name `|body|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsDef {
    pub fresh: Atom,
    pub body: Term,
}

impl AbsDef {
    pub fn hypothesis(&self) -> BigOAtom {
        BigOAtom::equation(Term::Atom(self.fresh.clone()), self.body.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> Rational {
        match self {
            Sign::Plus => Rational::one(),
            Sign::Minus => -Rational::one(),
        }
    }
}

/// A choice of sign for each variable of a clause.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SignAssignment {
    pub signs: BTreeMap<Atom, Sign>,
}

impl SignAssignment {
    pub fn sign(&self, a: &Atom) -> Sign {
        self.signs.get(a).copied().unwrap_or(Sign::Plus)
    }

    /// The `index`-th assignment over `vars` in lexicographic order, `+` first.
    pub fn nth(vars: &[Atom], index: usize) -> Self {
        let n = vars.len();
        let signs = vars
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let s = if (index >> (n - 1 - i)) & 1 == 1 { Sign::Minus } else { Sign::Plus };
                (a.clone(), s)
            })
            .collect();
        SignAssignment { signs }
    }

    /// Maps a counterexample for the branch back to the original variables:
    /// each negated variable has its values negated.
    pub fn map_back(&self, mut cx: Counterexample) -> Counterexample {
        for (a, s) in &self.signs {
            if *s == Sign::Minus {
                if let Some(points) = cx.values.get_mut(a) {
                    for p in points.iter_mut().flatten() {
                        *p = -p.clone();
                    }
                }
            }
        }
        if let Some(cs) = cx.components.take() {
            cx.components = Some(cs.into_iter().map(|c| self.map_back(c)).collect());
        }
        cx
    }
}

impl fmt::Display for SignAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .signs
            .iter()
            .map(|(a, s)| format!("{a}{}", if *s == Sign::Plus { '+' } else { '-' }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn wrap(t: &Term) -> Term {
    match t {
        Term::Zero => Term::Zero,
        Term::Abs(_) => t.clone(),
        _ => Term::abs(t.clone()),
    }
}

/// Replaces every bound `t` by `|t|`.
pub fn wrap_bounds(phi: &Formula) -> Formula {
    phi.map_atoms(&|a| BigOAtom::new(a.lhs.clone(), a.rhs.clone(), wrap(&a.bound)))
}

/// Rewrites `min(f, g)` as `(f + g - |f - g|) / 2` and `max(f, g)` as
/// `(f + g + |f - g|) / 2`.
pub fn eliminate_minmax(t: &Term) -> Term {
    let half = rational::frac(1, 2);
    match t {
        Term::Zero | Term::Atom(_) => t.clone(),
        Term::Add(a, b) => eliminate_minmax(a) + eliminate_minmax(b),
        Term::Sub(a, b) => eliminate_minmax(a) - eliminate_minmax(b),
        Term::Neg(a) => -eliminate_minmax(a),
        Term::Scale(c, a) => Term::scale(c.clone(), eliminate_minmax(a)),
        Term::Abs(a) => Term::abs(eliminate_minmax(a)),
        Term::Min(a, b) | Term::Max(a, b) => {
            let (a, b) = (eliminate_minmax(a), eliminate_minmax(b));
            let d = Term::abs(a.clone() - b.clone());
            let sum = a + b;
            let body = if matches!(t, Term::Min(..)) { sum - d } else { sum + d };
            Term::scale(half, body)
        }
    }
}

fn atom_eliminate_minmax(a: &BigOAtom) -> BigOAtom {
    a.map_terms(eliminate_minmax)
}

/// Linear form over leaves, where a leaf is an atom or `|atom|`.
fn leaves(t: &Term, c: &Rational, out: &mut BTreeMap<Term, Rational>) {
    let mut add = |leaf: Term, c: &Rational| {
        let e = out.entry(leaf).or_insert_with(Rational::zero);
        *e += c;
    };
    match t {
        Term::Zero => {}
        Term::Atom(_) => add(t.clone(), c),
        Term::Abs(_) => add(t.clone(), c),
        Term::Add(a, b) => {
            leaves(a, c, out);
            leaves(b, c, out);
        }
        Term::Sub(a, b) => {
            leaves(a, c, out);
            leaves(b, &-c, out);
        }
        Term::Neg(a) => leaves(a, &-c, out),
        Term::Scale(k, a) => leaves(a, &(c * k), out),
        Term::Min(..) | Term::Max(..) => unreachable!("min and max are eliminated first"),
    }
}

fn from_leaves(map: &BTreeMap<Term, Rational>) -> Term {
    Term::sum(map.iter().map(|(leaf, c)| {
        if c.is_one() {
            leaf.clone()
        } else {
            Term::scale(c.clone(), leaf.clone())
        }
    }))
}

fn scaled(c: Rational, t: Term) -> Term {
    if c.is_one() {
        t
    } else {
        Term::scale(c, t)
    }
}

/// Names compound absolute values by fresh variables `~h1`, `~h2`, ...
#[derive(Debug, Default)]
pub struct Extractor {
    defs: Vec<AbsDef>,
    names: BTreeMap<Term, Atom>,
}

impl Extractor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn defs(&self) -> &[AbsDef] {
        &self.defs
    }

    pub fn into_defs(self) -> Vec<AbsDef> {
        self.defs
    }

    /// Rewrites `t` so that `|.|` only applies to single variables.
    pub fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Zero | Term::Atom(_) => t.clone(),
            Term::Add(a, b) => self.term(a) + self.term(b),
            Term::Sub(a, b) => self.term(a) - self.term(b),
            Term::Neg(a) => -self.term(a),
            Term::Scale(c, a) => Term::scale(c.clone(), self.term(a)),
            Term::Min(..) | Term::Max(..) => self.term(&eliminate_minmax(t)),
            Term::Abs(inner) => {
                let body = self.term(inner);
                if let Term::Abs(_) = body {
                    return body;
                }
                let mut map = BTreeMap::new();
                leaves(&body, &Rational::one(), &mut map);
                map.retain(|_, c| !c.is_zero());
                if map.is_empty() {
                    return Term::Zero;
                }
                if map.len() == 1 {
                    let (leaf, c) = map.into_iter().next().unwrap();
                    let c = c.abs();
                    return match leaf {
                        Term::Atom(Atom::Var(_)) => scaled(c, Term::abs(leaf)),
                        leaf => scaled(c, leaf),
                    };
                }
                let coeffs: Vec<Rational> = map.values().cloned().collect();
                let mut k = rational::primitive_scale(&coeffs);
                if coeffs[0].is_negative() {
                    k = -k;
                }
                for c in map.values_mut() {
                    *c *= &k;
                }
                let body = from_leaves(&map);
                let fresh = match self.names.get(&body) {
                    Some(a) => a.clone(),
                    None => {
                        let a = Atom::var(format!("{FRESH_PREFIX}h{}", self.defs.len() + 1));
                        self.names.insert(body.clone(), a.clone());
                        self.defs.push(AbsDef {
                            fresh: a.clone(),
                            body,
                        });
                        a
                    }
                };
                scaled(k.abs().recip(), Term::abs(Term::Atom(fresh)))
            }
        }
    }

    pub fn atom(&mut self, a: &BigOAtom) -> BigOAtom {
        BigOAtom::new(self.term(&a.lhs), self.term(&a.rhs), self.term(&a.bound))
    }
}

/// Names every compound absolute value of `phi`, innermost first.
pub fn extract_abs(phi: &Formula) -> (Formula, Vec<AbsDef>) {
    fn go(phi: &Formula, ex: &mut Extractor) -> Formula {
        match phi {
            Formula::Atom(a) => Formula::Atom(ex.atom(&atom_eliminate_minmax(a))),
            Formula::Not(p) => Formula::not(go(p, ex)),
            Formula::And(p, q) => {
                let p = go(p, ex);
                Formula::and(p, go(q, ex))
            }
            Formula::Or(p, q) => {
                let p = go(p, ex);
                Formula::or(p, go(q, ex))
            }
            Formula::Implies(p, q) => {
                let p = go(p, ex);
                Formula::implies(p, go(q, ex))
            }
        }
    }
    let mut ex = Extractor::new();
    let out = go(phi, &mut ex);
    (out, ex.into_defs())
}

/// Prepares a clause for sign splitting: bounds wrapped, `min`/`max`
/// eliminated, compound absolute values named. The definitions come first
/// among the hypotheses.
pub fn extract_clause(clause: &ImplicativeClause) -> (ImplicativeClause, Vec<AbsDef>) {
    let mut ex = Extractor::new();
    let prep = |a: &BigOAtom| {
        let a = atom_eliminate_minmax(a);
        BigOAtom::new(a.lhs, a.rhs, wrap(&a.bound))
    };
    let hyps: Vec<BigOAtom> = clause.hyps.iter().map(|a| ex.atom(&prep(a))).collect();
    let disjuncts: Vec<BigOAtom> = clause.disjuncts.iter().map(|a| ex.atom(&prep(a))).collect();
    let defs = ex.into_defs();
    let mut all_hyps: Vec<BigOAtom> = defs.iter().map(AbsDef::hypothesis).collect();
    all_hyps.extend(hyps);
    (
        ImplicativeClause {
            hyps: all_hyps,
            disjuncts,
        },
        defs,
    )
}

/// Linear form of `t` in the branch `sigma`, every variable now standing for
/// a nonnegative function: `v` becomes `sigma(v) v` and `|v|` becomes `v`.
pub fn branch_linear(t: &Term, sigma: &SignAssignment) -> Result<LinearExpr, TermError> {
    fn go(
        t: &Term,
        c: &Rational,
        sigma: &SignAssignment,
        out: &mut LinearExpr,
    ) -> Result<(), TermError> {
        match t {
            Term::Zero => Ok(()),
            Term::Atom(a) => {
                out.add_term(a.clone(), c * sigma.sign(a).factor());
                Ok(())
            }
            Term::Abs(inner) => match inner.as_ref() {
                Term::Atom(a) => {
                    out.add_term(a.clone(), c.clone());
                    Ok(())
                }
                _ => Err(TermError::NonLinearNode("abs")),
            },
            Term::Add(a, b) => {
                go(a, c, sigma, out)?;
                go(b, c, sigma, out)
            }
            Term::Sub(a, b) => {
                go(a, c, sigma, out)?;
                go(b, &-c, sigma, out)
            }
            Term::Neg(a) => go(a, &-c, sigma, out),
            Term::Scale(k, a) => go(a, &(c * k), sigma, out),
            Term::Min(..) => Err(TermError::NonLinearNode("min")),
            Term::Max(..) => Err(TermError::NonLinearNode("max")),
        }
    }
    let mut out = LinearExpr::zero();
    go(t, &Rational::one(), sigma, &mut out)?;
    Ok(out)
}

pub fn branch_atom(a: &BigOAtom, sigma: &SignAssignment) -> Result<BigOAtom, TermError> {
    Ok(BigOAtom::new(
        Term::from_linear(&branch_linear(&a.lhs, sigma)?),
        Term::from_linear(&branch_linear(&a.rhs, sigma)?),
        Term::from_linear(&branch_linear(&a.bound, sigma)?),
    ))
}

/// Variables that receive a sign: every variable except the bottom marker.
pub fn split_vars(clause: &ImplicativeClause) -> Vec<Atom> {
    let mut vars = BTreeSet::new();
    for a in clause.hyps.iter().chain(&clause.disjuncts) {
        a.collect_atoms(&mut vars);
    }
    vars.into_iter()
        .filter(|a| matches!(a, Atom::Var(n) if n != BOTTOM_VAR))
        .collect()
}

/// All sign branches of an extracted clause, in lexicographic order with
/// `+` first. Branches giving the same linear clause as an earlier branch are
/// skipped.
pub fn branches(
    clause: &ImplicativeClause,
) -> Result<Vec<(SignAssignment, ImplicativeClause)>, TermError> {
    let vars = split_vars(clause);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for index in 0..(1usize << vars.len()) {
        let sigma = SignAssignment::nth(&vars, index);
        let hyps = clause
            .hyps
            .iter()
            .map(|a| branch_atom(a, &sigma))
            .collect::<Result<Vec<_>, _>>()?;
        let disjuncts = clause
            .disjuncts
            .iter()
            .map(|a| branch_atom(a, &sigma))
            .collect::<Result<Vec<_>, _>>()?;
        let linear = ImplicativeClause { hyps, disjuncts };
        let key = normalized_key(&linear)?;
        if seen.insert(key) {
            out.push((sigma, linear));
        }
    }
    Ok(out)
}

type ReducedKey = (Vec<(LinearExpr, BTreeSet<Atom>)>, Vec<(LinearExpr, BTreeSet<Atom>)>);

fn normalized_key(c: &ImplicativeClause) -> Result<ReducedKey, TermError> {
    let reduce = |atoms: &[BigOAtom]| -> Result<Vec<_>, TermError> {
        atoms.iter().map(crate::terms::reduce_atom).collect()
    };
    let mut hyps = reduce(&c.hyps)?;
    hyps.sort();
    hyps.dedup();
    Ok((hyps, reduce(&c.disjuncts)?))
}

/// Decides `phi` with variables ranging over arbitrary rational-valued functions.
pub fn decide_signed(phi: &Formula) -> Result<Verdict, DecideError> {
    engine::decide(phi, &Backend::Core, true)
}
