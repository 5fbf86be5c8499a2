//! Terms, big-O atoms and formulas, and their normalization into linear forms.
//!
//! A [`BigOAtom`] `lhs = rhs + O(bound)` is reduced to a pair
//! `(s, support)`: `s` is the linear form of `lhs - rhs` with every atom of
//! the bound deleted, and `support` is the set of atoms occurring in the
//! bound. Only the atoms of a bound matter, never their multiplicities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("term contains a {0} node; run the sign reduction first")]
    NonLinearNode(&'static str),
}

/// A function symbol: a variable, the constant-one function, or a growth symbol.
///
/// The derived order is the canonical one: `One`, then growth symbols by
/// index, then variables by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    One,
    Growth(Rational),
    Var(String),
}

/// Prefix of internally generated variable names. Never produced by the parser.
pub const FRESH_PREFIX: char = '~';

impl Atom {
    pub fn var(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "variable names are nonempty");
        Atom::Var(name)
    }

    pub fn growth(index: Rational) -> Self {
        Atom::Growth(index)
    }

    /// True for variables introduced by the decision procedure itself.
    pub fn is_fresh(&self) -> bool {
        matches!(self, Atom::Var(n) if n.starts_with(FRESH_PREFIX))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Atom::Var(_))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::One => write!(f, "1"),
            Atom::Growth(q) => write!(f, "g[{}]", rational::format(q)),
            Atom::Var(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Zero,
    Atom(Atom),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Scale(Rational, Box<Term>),
    Min(Box<Term>, Box<Term>),
    Max(Box<Term>, Box<Term>),
    Abs(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Atom(Atom::var(name))
    }

    pub fn one() -> Term {
        Term::Atom(Atom::One)
    }

    pub fn growth(index: Rational) -> Term {
        Term::Atom(Atom::Growth(index))
    }

    pub fn scale(c: Rational, t: Term) -> Term {
        Term::Scale(c, Box::new(t))
    }

    pub fn min(a: Term, b: Term) -> Term {
        Term::Min(Box::new(a), Box::new(b))
    }

    pub fn max(a: Term, b: Term) -> Term {
        Term::Max(Box::new(a), Box::new(b))
    }

    pub fn abs(t: Term) -> Term {
        Term::Abs(Box::new(t))
    }

    /// Sum of the given terms, `Zero` when empty.
    pub fn sum(terms: impl IntoIterator<Item = Term>) -> Term {
        terms
            .into_iter()
            .reduce(|a, b| Term::Add(Box::new(a), Box::new(b)))
            .unwrap_or(Term::Zero)
    }

    /// Rebuilds a term from a linear form, atoms in canonical order.
    /// Negative coefficients after the first become subtractions.
    pub fn from_linear(e: &LinearExpr) -> Term {
        let monomial = |a: &Atom, c: &Rational| {
            if c.is_one() {
                Term::Atom(a.clone())
            } else if (-c).is_one() {
                -Term::Atom(a.clone())
            } else {
                Term::scale(c.clone(), Term::Atom(a.clone()))
            }
        };
        let mut out: Option<Term> = None;
        for (a, c) in e.iter() {
            out = Some(match out {
                None => monomial(a, c),
                Some(t) if c.is_negative() => t - monomial(a, &-c),
                Some(t) => t + monomial(a, c),
            });
        }
        out.unwrap_or(Term::Zero)
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Term::Zero => {}
            Term::Atom(a) => {
                out.insert(a.clone());
            }
            Term::Neg(t) | Term::Scale(_, t) | Term::Abs(t) => t.collect_atoms(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Min(a, b) | Term::Max(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    /// True if any `Min`, `Max` or `Abs` node occurs.
    pub fn is_nonlinear(&self) -> bool {
        match self {
            Term::Zero | Term::Atom(_) => false,
            Term::Min(..) | Term::Max(..) | Term::Abs(_) => true,
            Term::Neg(t) | Term::Scale(_, t) => t.is_nonlinear(),
            Term::Add(a, b) | Term::Sub(a, b) => a.is_nonlinear() || b.is_nonlinear(),
        }
    }

    /// Replaces every atom by the term `f` returns for it.
    pub fn substitute(&self, f: &impl Fn(&Atom) -> Term) -> Term {
        let bx = |t: &Term| Box::new(t.substitute(f));
        match self {
            Term::Zero => Term::Zero,
            Term::Atom(a) => f(a),
            Term::Add(a, b) => Term::Add(bx(a), bx(b)),
            Term::Sub(a, b) => Term::Sub(bx(a), bx(b)),
            Term::Neg(t) => Term::Neg(bx(t)),
            Term::Scale(c, t) => Term::Scale(c.clone(), bx(t)),
            Term::Min(a, b) => Term::Min(bx(a), bx(b)),
            Term::Max(a, b) => Term::Max(bx(a), bx(b)),
            Term::Abs(t) => Term::Abs(bx(t)),
        }
    }
}

impl From<Atom> for Term {
    fn from(a: Atom) -> Self {
        Term::Atom(a)
    }
}

impl ops::Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        Term::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        Term::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        Term::Neg(Box::new(self))
    }
}

impl ops::Mul<Term> for Rational {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        Term::Scale(self, Box::new(rhs))
    }
}

impl ops::Mul<Term> for i64 {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        Term::Scale(rational::int(self), Box::new(rhs))
    }
}

// Printing follows the problem-file grammar so that printed terms reparse.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn additive(t: &Term) -> bool {
            matches!(t, Term::Add(..) | Term::Sub(..))
        }
        fn operand(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if additive(t) || matches!(t, Term::Neg(_) | Term::Scale(..)) {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self {
            Term::Zero => write!(f, "0"),
            Term::Atom(a) => write!(f, "{a}"),
            Term::Add(a, b) | Term::Sub(a, b) => {
                let op = if matches!(self, Term::Add(..)) { "+" } else { "-" };
                write!(f, "{a} {op} ")?;
                if additive(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Term::Neg(t) => {
                write!(f, "-")?;
                operand(t, f)
            }
            Term::Scale(c, t) => {
                if c.is_negative() {
                    write!(f, "-({} * ", rational::format(&-c))?;
                    operand(t, f)?;
                    write!(f, ")")
                } else {
                    write!(f, "{} * ", rational::format(c))?;
                    operand(t, f)
                }
            }
            Term::Min(a, b) => write!(f, "min({a}, {b})"),
            Term::Max(a, b) => write!(f, "max({a}, {b})"),
            Term::Abs(t) => write!(f, "|{t}|"),
        }
    }
}

/// A finite rational linear combination of atoms. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearExpr {
    coeffs: BTreeMap<Atom, Rational>,
}

impl LinearExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn atom(a: Atom) -> Self {
        Self::term(a, Rational::one())
    }

    pub fn term(a: Atom, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(a, c);
        e
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Atom, Rational)>) -> Self {
        let mut e = Self::zero();
        for (a, c) in pairs {
            e.add_term(a, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, a: &Atom) -> Rational {
        self.coeffs.get(a).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Rational)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> BTreeSet<Atom> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn add_term(&mut self, a: Atom, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(a).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &LinearExpr, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (a, v) in &other.coeffs {
            let entry = self.coeffs.entry(a.clone()).or_insert_with(Rational::zero);
            *entry += v * c;
        }
        self.coeffs.retain(|_, v| !v.is_zero());
    }

    pub fn scaled(&self, c: &Rational) -> LinearExpr {
        if c.is_zero() {
            return LinearExpr::zero();
        }
        LinearExpr {
            coeffs: self.coeffs.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    /// The form with the coefficient of every atom in `set` set to zero.
    pub fn without(&self, set: &BTreeSet<Atom>) -> LinearExpr {
        LinearExpr {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| !set.contains(*a))
                .map(|(a, v)| (a.clone(), v.clone()))
                .collect(),
        }
    }

    /// Value under an assignment; unassigned atoms count as zero.
    pub fn eval(&self, value: impl Fn(&Atom) -> Rational) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (a, c)| acc + c * value(a))
    }
}

impl ops::Add for &LinearExpr {
    type Output = LinearExpr;
    fn add(self, rhs: &LinearExpr) -> LinearExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl ops::Sub for &LinearExpr {
    type Output = LinearExpr;
    fn sub(self, rhs: &LinearExpr) -> LinearExpr {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Term::from_linear(self))
    }
}

/// `lhs = rhs + O(bound)`. Plain equality is the bound `Zero`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigOAtom {
    pub lhs: Term,
    pub rhs: Term,
    pub bound: Term,
}

impl BigOAtom {
    pub fn new(lhs: Term, rhs: Term, bound: Term) -> Self {
        BigOAtom { lhs, rhs, bound }
    }

    /// `lhs = O(bound)`.
    pub fn big_o(lhs: Term, bound: Term) -> Self {
        BigOAtom::new(lhs, Term::Zero, bound)
    }

    /// `lhs = rhs`, i.e. `lhs = rhs + O(0)`.
    pub fn equation(lhs: Term, rhs: Term) -> Self {
        BigOAtom::new(lhs, rhs, Term::Zero)
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        self.lhs.collect_atoms(out);
        self.rhs.collect_atoms(out);
        self.bound.collect_atoms(out);
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn is_nonlinear(&self) -> bool {
        self.lhs.is_nonlinear() || self.rhs.is_nonlinear() || self.bound.is_nonlinear()
    }

    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> BigOAtom {
        BigOAtom::new(f(&self.lhs), f(&self.rhs), f(&self.bound))
    }
}

impl fmt::Display for BigOAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.rhs, &self.bound) {
            (rhs, Term::Zero) => write!(f, "{} = {}", self.lhs, rhs),
            (Term::Zero, b) => write!(f, "{} = O({})", self.lhs, b),
            (rhs, b) => write!(f, "{} = {} + O({})", self.lhs, rhs, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(BigOAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `hyps[0] & ... & hyps[n-1] -> concl`, or just `concl` without hypotheses.
    pub fn entailment(hyps: &[BigOAtom], concl: Formula) -> Formula {
        let mut it = hyps.iter().cloned().map(Formula::Atom);
        match it.next() {
            None => concl,
            Some(first) => Formula::implies(it.fold(first, Formula::and), concl),
        }
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => a.collect_atoms(out),
            Formula::Not(p) => p.collect_atoms(out),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                p.collect_atoms(out);
                q.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    /// Visits every big-O atom, left to right.
    pub fn for_each_atom(&self, f: &mut impl FnMut(&BigOAtom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(p) => p.for_each_atom(f),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                p.for_each_atom(f);
                q.for_each_atom(f);
            }
        }
    }

    pub fn map_atoms(&self, f: &impl Fn(&BigOAtom) -> BigOAtom) -> Formula {
        let bx = |p: &Formula| Box::new(p.map_atoms(f));
        match self {
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::Not(p) => Formula::Not(bx(p)),
            Formula::And(p, q) => Formula::And(bx(p), bx(q)),
            Formula::Or(p, q) => Formula::Or(bx(p), bx(q)),
            Formula::Implies(p, q) => Formula::Implies(bx(p), bx(q)),
        }
    }
}

impl From<BigOAtom> for Formula {
    fn from(a: BigOAtom) -> Self {
        Formula::Atom(a)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(p) => write!(f, "!({p})"),
            Formula::And(p, q) => write!(f, "({p}) & ({q})"),
            Formula::Or(p, q) => write!(f, "({p}) | ({q})"),
            Formula::Implies(p, q) => write!(f, "({p}) -> ({q})"),
        }
    }
}

pub fn linearize(t: &Term) -> Result<LinearExpr, TermError> {
    fn go(t: &Term, c: &Rational, out: &mut LinearExpr) -> Result<(), TermError> {
        match t {
            Term::Zero => Ok(()),
            Term::Atom(a) => {
                out.add_term(a.clone(), c.clone());
                Ok(())
            }
            Term::Add(a, b) => {
                go(a, c, out)?;
                go(b, c, out)
            }
            Term::Sub(a, b) => {
                go(a, c, out)?;
                go(b, &-c, out)
            }
            Term::Neg(a) => go(a, &-c, out),
            Term::Scale(k, a) => go(a, &(c * k), out),
            Term::Min(..) => Err(TermError::NonLinearNode("min")),
            Term::Max(..) => Err(TermError::NonLinearNode("max")),
            Term::Abs(_) => Err(TermError::NonLinearNode("abs")),
        }
    }
    let mut out = LinearExpr::zero();
    go(t, &Rational::one(), &mut out)?;
    Ok(out)
}

pub fn bound_support(t: &Term) -> Result<BTreeSet<Atom>, TermError> {
    Ok(linearize(t)?.support())
}

/// Normal form of `lhs = rhs + O(bound)`: the linear form of `lhs - rhs`
/// restricted to atoms outside the bound, together with the bound's atoms.
pub fn reduce_atom(a: &BigOAtom) -> Result<(LinearExpr, BTreeSet<Atom>), TermError> {
    let support = bound_support(&a.bound)?;
    let diff = &linearize(&a.lhs)? - &linearize(&a.rhs)?;
    Ok((diff.without(&support), support))
}

/// Rebuilds a big-O atom `s = O(t_support)` from its reduced form.
pub fn reduced_to_atom(s: &LinearExpr, support: &BTreeSet<Atom>) -> BigOAtom {
    BigOAtom::big_o(
        Term::from_linear(s),
        Term::sum(support.iter().cloned().map(Term::Atom)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn a(n: &str) -> Atom {
        Atom::var(n)
    }

    fn set(names: &[&str]) -> BTreeSet<Atom> {
        names.iter().map(|n| a(n)).collect()
    }

    #[test]
    fn linearize_flattens_sums() {
        let t = (v("f") + v("f")) + -v("g");
        let e = linearize(&t).unwrap();
        assert_eq!(e, LinearExpr::from_pairs([(a("f"), int(2)), (a("g"), int(-1))]));
    }

    #[test]
    fn linearize_moves_rhs_across() {
        let t = 3 * v("f1") + 2 * v("f2") - 5 * v("f3");
        let e = linearize(&t).unwrap();
        assert_eq!(e.coeff(&a("f1")), int(3));
        assert_eq!(e.coeff(&a("f2")), int(2));
        assert_eq!(e.coeff(&a("f3")), int(-5));
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn linearize_zero_and_rejects_nonlinear() {
        assert!(linearize(&Term::Zero).unwrap().is_zero());
        assert_eq!(
            linearize(&Term::abs(v("f"))),
            Err(TermError::NonLinearNode("abs"))
        );
        assert_eq!(
            linearize(&(v("f") + Term::min(v("f"), v("g")))),
            Err(TermError::NonLinearNode("min"))
        );
    }

    #[test]
    fn bound_support_discards_multiplicity() {
        assert_eq!(bound_support(&(v("f2") + 3 * v("f4"))).unwrap(), set(&["f2", "f4"]));
        assert_eq!(bound_support(&(v("f") + v("f"))).unwrap(), set(&["f"]));
        assert!(bound_support(&Term::Zero).unwrap().is_empty());
    }

    #[test]
    fn reduce_atom_deletes_bound_atoms() {
        // 3 f1 + 2 f2 = 5 f3 + O(f2 + 3 f4)  ~>  3 f1 - 5 f3 = O(f2 + f4)
        let atom = BigOAtom::new(
            3 * v("f1") + 2 * v("f2"),
            5 * v("f3"),
            v("f2") + 3 * v("f4"),
        );
        let (s, t) = reduce_atom(&atom).unwrap();
        assert_eq!(s, LinearExpr::from_pairs([(a("f1"), int(3)), (a("f3"), int(-5))]));
        assert_eq!(t, set(&["f2", "f4"]));

        let refl = BigOAtom::equation(v("f"), v("f"));
        let (s, t) = reduce_atom(&refl).unwrap();
        assert!(s.is_zero() && t.is_empty());

        let atom = BigOAtom::big_o(v("f") + v("g"), v("g"));
        let (s, t) = reduce_atom(&atom).unwrap();
        assert_eq!(s, LinearExpr::atom(a("f")));
        assert_eq!(t, set(&["g"]));
    }

    #[test]
    fn display_forms() {
        let atom = BigOAtom::new(v("f") + v("g"), v("h"), v("k"));
        assert_eq!(atom.to_string(), "f + g = h + O(k)");
        assert_eq!(BigOAtom::big_o(v("f"), v("g")).to_string(), "f = O(g)");
        assert_eq!(BigOAtom::equation(v("f"), v("g")).to_string(), "f = g");
        let t = frac(1, 2) * (v("f") - (v("g") - v("h")));
        assert_eq!(t.to_string(), "1/2 * (f - (g - h))");
        assert_eq!(Term::growth(int(2)).to_string(), "g[2]");
    }

    #[test]
    fn canonical_atom_order() {
        let mut atoms = vec![a("b"), Atom::Growth(int(3)), a("a"), Atom::One, Atom::Growth(frac(1, 2))];
        atoms.sort();
        assert_eq!(
            atoms,
            vec![Atom::One, Atom::Growth(frac(1, 2)), Atom::Growth(int(3)), a("a"), a("b")]
        );
        assert!(Atom::var("~h1") > a("zeta"));
    }

    fn arb_linear_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::Zero),
            prop::sample::select(vec!["f", "g", "h"]).prop_map(Term::var),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
                inner.clone().prop_map(|a| -a),
                (-4i64..=4, 1i64..=3, inner).prop_map(|(n, d, a)| frac(n, d) * a),
            ]
        })
    }

    fn eval_term(t: &Term, val: &dyn Fn(&str) -> Rational) -> Rational {
        match t {
            Term::Zero => int(0),
            Term::Atom(Atom::Var(n)) => val(n),
            Term::Atom(_) => unreachable!(),
            Term::Add(a, b) => eval_term(a, val) + eval_term(b, val),
            Term::Sub(a, b) => eval_term(a, val) - eval_term(b, val),
            Term::Neg(a) => -eval_term(a, val),
            Term::Scale(c, a) => c * eval_term(a, val),
            _ => unreachable!(),
        }
    }

    proptest! {
        #[test]
        fn linearize_is_a_homomorphism(x in arb_linear_term(), y in arb_linear_term(), n in -5i64..=5) {
            let lx = linearize(&x).unwrap();
            let ly = linearize(&y).unwrap();
            prop_assert_eq!(linearize(&(x.clone() + y.clone())).unwrap(), &lx + &ly);
            prop_assert_eq!(linearize(&(n * x)).unwrap(), lx.scaled(&int(n)));
        }

        #[test]
        fn linearize_preserves_pointwise_value(
            t in arb_linear_term(),
            vals in prop::collection::vec((-6i64..=6, 1i64..=3), 3),
        ) {
            let value = |n: &str| {
                let i = ["f", "g", "h"].iter().position(|m| *m == n).unwrap();
                frac(vals[i].0, vals[i].1)
            };
            let e = linearize(&t).unwrap();
            let lin = e.eval(|at| match at { Atom::Var(n) => value(n), _ => unreachable!() });
            prop_assert_eq!(eval_term(&t, &value), lin);
        }

        #[test]
        fn reduce_atom_is_idempotent(l in arb_linear_term(), r in arb_linear_term(), b in arb_linear_term()) {
            let (s, t) = reduce_atom(&BigOAtom::new(l, r, b)).unwrap();
            let again = reduce_atom(&reduced_to_atom(&s, &t)).unwrap();
            prop_assert_eq!(again, (s, t));
        }
    }
}
