//! Direct semantic evaluation, used to check counterexamples and to test
//! the decision procedure against brute force.
//!
//! Nothing here goes through the solver's linear forms: terms are evaluated
//! from the syntax tree, either at points (finite domains) or as
//! polynomials in `x` over the positive integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rational::Rational;
use crate::terms::{Atom, BigOAtom, Formula, Term};
use crate::verdict::Counterexample;

/// Points below this bound are checked one by one in the pointwise reading
/// of polynomial models.
const MAX_THRESHOLD: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("atom `{0}` has no value")]
    UnboundAtom(String),
    #[error("polynomial roots extend past {0}; pointwise check abandoned")]
    ThresholdTooLarge(BigInt),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Reading {
    /// `|f(x)| <= C |g(x)|` at every point.
    #[default]
    Pointwise,
    /// `|f(x)| <= C |g(x)|` beyond some point.
    Eventually,
}

/// Functions on `{1, ..., domain_size}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAssignment {
    pub domain_size: usize,
    pub values: BTreeMap<Atom, Vec<Rational>>,
}

impl FiniteAssignment {
    fn lookup(&self, a: &Atom, x: usize) -> Result<Rational, OracleError> {
        match self.values.get(a) {
            Some(v) => Ok(v[x].clone()),
            None if *a == Atom::One => Ok(Rational::one()),
            None => Err(OracleError::UnboundAtom(a.to_string())),
        }
    }
}

/// A polynomial in `x` with rational coefficients, constant term first and
/// no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(degree: usize) -> Self {
        let mut v = vec![Rational::zero(); degree + 1];
        v[degree] = Rational::one();
        Poly(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    fn zip(&self, other: &Poly, f: impl Fn(&Rational, &Rational) -> Rational) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| f(self.0.get(i).unwrap_or(&zero), other.0.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|a| a * c).collect())
    }

    /// Sign for all large `x`: the sign of the leading coefficient.
    pub fn eventual_sign(&self) -> i32 {
        let l = self.lead();
        if l.is_positive() {
            1
        } else if l.is_negative() {
            -1
        } else {
            0
        }
    }

    /// An integer beyond which the polynomial has no root.
    pub fn root_bound(&self) -> BigInt {
        let Some(n) = self.degree() else {
            return BigInt::zero();
        };
        if n == 0 {
            return BigInt::zero();
        }
        let lead = self.lead().abs();
        let max = self.0[..n]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        max.ceil().to_integer() + 1
    }
}

/// One polynomial per atom. `1` is the constant one unless given.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyAssignment {
    pub values: BTreeMap<Atom, Poly>,
}

impl PolyAssignment {
    fn lookup(&self, a: &Atom) -> Result<Poly, OracleError> {
        match self.values.get(a) {
            Some(p) => Ok(p.clone()),
            None if *a == Atom::One => Ok(Poly::constant(Rational::one())),
            None => Err(OracleError::UnboundAtom(a.to_string())),
        }
    }
}

/// Exact value of `t` at a point.
pub fn eval_point(
    t: &Term,
    value: &dyn Fn(&Atom) -> Result<Rational, OracleError>,
) -> Result<Rational, OracleError> {
    Ok(match t {
        Term::Zero => Rational::zero(),
        Term::Atom(a) => value(a)?,
        Term::Add(a, b) => eval_point(a, value)? + eval_point(b, value)?,
        Term::Sub(a, b) => eval_point(a, value)? - eval_point(b, value)?,
        Term::Neg(a) => -eval_point(a, value)?,
        Term::Scale(c, a) => c * eval_point(a, value)?,
        Term::Min(a, b) => eval_point(a, value)?.min(eval_point(b, value)?),
        Term::Max(a, b) => eval_point(a, value)?.max(eval_point(b, value)?),
        Term::Abs(a) => eval_point(a, value)?.abs(),
    })
}

/// The polynomial that `t` agrees with at every integer past the returned
/// threshold.
fn eval_poly(t: &Term, asg: &PolyAssignment) -> Result<(Poly, BigInt), OracleError> {
    Ok(match t {
        Term::Zero => (Poly::default(), BigInt::zero()),
        Term::Atom(a) => (asg.lookup(a)?, BigInt::zero()),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Min(a, b) | Term::Max(a, b) => {
            let (p, s) = eval_poly(a, asg)?;
            let (q, u) = eval_poly(b, asg)?;
            let threshold = s.max(u);
            match t {
                Term::Add(..) => (p.add(&q), threshold),
                Term::Sub(..) => (p.sub(&q), threshold),
                _ => {
                    let diff = p.sub(&q);
                    let threshold = threshold.max(diff.root_bound());
                    let p_smaller = diff.eventual_sign() < 0;
                    let pick_p = p_smaller == matches!(t, Term::Min(..));
                    (if pick_p { p } else { q }, threshold)
                }
            }
        }
        Term::Neg(a) => {
            let (p, s) = eval_poly(a, asg)?;
            (p.scale(&-Rational::one()), s)
        }
        Term::Scale(c, a) => {
            let (p, s) = eval_poly(a, asg)?;
            (p.scale(c), s)
        }
        Term::Abs(a) => {
            let (p, s) = eval_poly(a, asg)?;
            let threshold = s.max(p.root_bound());
            if p.eventual_sign() < 0 {
                (p.scale(&-Rational::one()), threshold)
            } else {
                (p, threshold)
            }
        }
    })
}

/// `a` on a finite domain: wherever the bound vanishes, the two sides agree.
/// On a finite set that is exactly the existence of a bounding constant.
pub fn holds_pointwise(a: &BigOAtom, asg: &FiniteAssignment) -> Result<bool, OracleError> {
    for x in 0..asg.domain_size {
        let value = |atom: &Atom| asg.lookup(atom, x);
        let bound = eval_point(&a.bound, &value)?;
        if bound.is_zero() && eval_point(&a.lhs, &value)? != eval_point(&a.rhs, &value)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn degree_le(d: &Poly, b: &Poly) -> bool {
    match (d.degree(), b.degree()) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

/// `a` eventually, with polynomial values: the difference grows no faster
/// than the bound.
pub fn holds_eventually_poly(a: &BigOAtom, asg: &PolyAssignment) -> Result<bool, OracleError> {
    let (l, _) = eval_poly(&a.lhs, asg)?;
    let (r, _) = eval_poly(&a.rhs, asg)?;
    let (b, _) = eval_poly(&a.bound, asg)?;
    Ok(degree_le(&l.sub(&r), &b))
}

/// `a` at every positive integer, with polynomial values. Past the point
/// where every absolute value and the bound have constant sign this is the
/// degree test; the points before it are checked one by one.
pub fn holds_pointwise_poly(a: &BigOAtom, asg: &PolyAssignment) -> Result<bool, OracleError> {
    let (l, s1) = eval_poly(&a.lhs, asg)?;
    let (r, s2) = eval_poly(&a.rhs, asg)?;
    let (b, s3) = eval_poly(&a.bound, asg)?;
    let threshold = s1.max(s2).max(s3).max(b.root_bound());
    let limit = threshold
        .to_u64()
        .filter(|t| *t <= MAX_THRESHOLD)
        .ok_or(OracleError::ThresholdTooLarge(threshold))?;
    for x in 1..=limit {
        let x = Rational::from_integer(BigInt::from(x));
        let value = |atom: &Atom| asg.lookup(atom).map(|p| p.eval(&x));
        let bound = eval_point(&a.bound, &value)?;
        if bound.is_zero() && eval_point(&a.lhs, &value)? != eval_point(&a.rhs, &value)? {
            return Ok(false);
        }
    }
    Ok(degree_le(&l.sub(&r), &b))
}

/// What a formula is evaluated in.
#[derive(Debug, Clone, Copy)]
pub enum Model<'a> {
    Finite(&'a FiniteAssignment),
    Poly(&'a PolyAssignment),
    /// Disjoint copies of the positive integers, each cofinal in the domain;
    /// an atom holds iff it holds on every copy.
    Slices(&'a [PolyAssignment]),
}

fn atom_holds(a: &BigOAtom, model: Model<'_>, reading: Reading) -> Result<bool, OracleError> {
    match model {
        Model::Finite(asg) => holds_pointwise(a, asg),
        Model::Poly(asg) => match reading {
            Reading::Pointwise => holds_pointwise_poly(a, asg),
            Reading::Eventually => holds_eventually_poly(a, asg),
        },
        Model::Slices(slices) => {
            for s in slices {
                if !atom_holds(a, Model::Poly(s), reading)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Truth value of `phi`. A finite domain read eventually is taken as
/// constant functions on cofinal copies, which gives the pointwise truth
/// values.
pub fn eval_formula(phi: &Formula, model: Model<'_>, reading: Reading) -> Result<bool, OracleError> {
    Ok(match phi {
        Formula::Atom(a) => atom_holds(a, model, reading)?,
        Formula::Not(p) => !eval_formula(p, model, reading)?,
        Formula::And(p, q) => eval_formula(p, model, reading)? && eval_formula(q, model, reading)?,
        Formula::Or(p, q) => eval_formula(p, model, reading)? || eval_formula(q, model, reading)?,
        Formula::Implies(p, q) => {
            !eval_formula(p, model, reading)? || eval_formula(q, model, reading)?
        }
    })
}

/// How a theory interprets a counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Semantics {
    pub reading: Reading,
    /// Variables range over nonnegative functions.
    pub nonnegative: bool,
    /// Declared growth indices; `g[q]` at position `i` is `x^i`.
    pub growth: Vec<Rational>,
}

fn nonnegative_on_positive_integers(p: &Poly, reading: Reading) -> Result<bool, OracleError> {
    if p.eventual_sign() < 0 {
        return Ok(false);
    }
    if reading == Reading::Eventually {
        return Ok(true);
    }
    let bound = p.root_bound();
    let limit = bound
        .to_u64()
        .filter(|t| *t <= MAX_THRESHOLD)
        .ok_or(OracleError::ThresholdTooLarge(bound))?;
    Ok((1..=limit).all(|x| !p.eval(&Rational::from_integer(BigInt::from(x))).is_negative()))
}

/// Copies of the positive integers described by `cx`, with `1` and the
/// growth symbols fixed to their meaning. `None` when `cx` gives a fixed
/// symbol another value, or a negative value where the semantics forbids it.
pub fn slices(
    cx: &Counterexample,
    sem: &Semantics,
) -> Result<Option<Vec<PolyAssignment>>, OracleError> {
    let mut fixed: BTreeMap<Atom, Poly> = BTreeMap::new();
    fixed.insert(Atom::One, Poly::constant(Rational::one()));
    for (i, q) in sem.growth.iter().enumerate() {
        fixed.insert(Atom::Growth(q.clone()), Poly::monomial(i + 1));
    }
    let mut out = Vec::with_capacity(cx.domain_size);
    for point in 0..cx.domain_size {
        let mut asg = PolyAssignment::default();
        for (a, v) in &cx.values {
            let p = Poly::new(v[point].clone());
            if let Some(f) = fixed.get(a) {
                if *f != p {
                    return Ok(None);
                }
            } else if let Atom::Growth(_) = a {
                return Ok(None);
            }
            if sem.nonnegative && a.is_var() && !nonnegative_on_positive_integers(&p, sem.reading)? {
                return Ok(None);
            }
            asg.values.insert(a.clone(), p);
        }
        for (a, f) in &fixed {
            asg.values.entry(a.clone()).or_insert_with(|| f.clone());
        }
        out.push(asg);
    }
    Ok(Some(out))
}

/// Whether `cx` is a model of the semantics in which `phi` is false.
pub fn falsifies(phi: &Formula, cx: &Counterexample, sem: &Semantics) -> Result<bool, OracleError> {
    match slices(cx, sem)? {
        Some(s) => Ok(!eval_formula(phi, Model::Slices(&s), sem.reading)?),
        None => Ok(false),
    }
}

/// Whether `cx` is a model of the semantics in which `phi` is true.
pub fn satisfies(phi: &Formula, cx: &Counterexample, sem: &Semantics) -> Result<bool, OracleError> {
    match slices(cx, sem)? {
        Some(s) => eval_formula(phi, Model::Slices(&s), sem.reading),
        None => Ok(false),
    }
}

/// Sampling parameters for [`random_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub domain_size: usize,
    /// Values are integers in `0..=max_value`, or `-max_value..=max_value`.
    pub max_value: i64,
    pub nonnegative: bool,
    pub seed: u64,
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            domain_size: 1,
            max_value: 4,
            nonnegative: true,
            seed: 7,
        }
    }
}

/// Samples integer assignments to the variables of `phi` until one
/// falsifies it. Formulas with growth symbols are not searched.
pub fn random_search(phi: &Formula, budget: usize, profile: &Profile) -> Option<FiniteAssignment> {
    let atoms = phi.atoms();
    if atoms.iter().any(|a| matches!(a, Atom::Growth(_))) {
        return None;
    }
    let vars: Vec<Atom> = atoms.into_iter().filter(|a| a.is_var()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let lo = if profile.nonnegative { 0 } else { -profile.max_value };
    for _ in 0..budget {
        let values = vars
            .iter()
            .map(|a| {
                let v = (0..profile.domain_size)
                    .map(|_| Rational::from_integer(rng.gen_range(lo..=profile.max_value).into()))
                    .collect();
                (a.clone(), v)
            })
            .collect();
        let asg = FiniteAssignment {
            domain_size: profile.domain_size,
            values,
        };
        if let Ok(false) = eval_formula(phi, Model::Finite(&asg), Reading::Pointwise) {
            return Some(asg);
        }
    }
    None
}
