//! Decision procedure for Horn clauses over nonnegative functions.
//!
//! A clause `q_1 = O(r_1) & ... & q_n = O(r_n) -> s = O(t)` is decided by
//! growing the set `A` of atoms known to be `O(t)`. A hypothesis whose bound
//! atoms all lie in `A` contributes the row `q[A]`; an atom joins `A` when
//! some combination of rows is nonnegative outside `A` and positive on it.
//! At the fixed point the clause is valid exactly when `s[A]` lies in the
//! span of the rows. Otherwise an explicit counterexample on a one-point
//! domain is built from the dual certificates.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};
use crate::terms::{self, Atom, BigOAtom, LinearExpr, TermError};
use crate::verdict::{Counterexample, Derivation, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HornError {
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

/// `q = O(r)` in reduced form: no atom of `r_support` occurs in `q`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hypothesis {
    pub q: LinearExpr,
    pub r_support: BTreeSet<Atom>,
}

impl Hypothesis {
    pub fn new(q: LinearExpr, r_support: BTreeSet<Atom>) -> Self {
        Hypothesis {
            q: q.without(&r_support),
            r_support,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornClause {
    pub hyps: Vec<Hypothesis>,
    pub s: LinearExpr,
    pub t_support: BTreeSet<Atom>,
    /// Every atom of the clause in canonical order.
    pub vars: Vec<Atom>,
}

impl HornClause {
    pub fn new(hyps: Vec<Hypothesis>, s: LinearExpr, t_support: BTreeSet<Atom>) -> Self {
        let s = s.without(&t_support);
        let mut vars: BTreeSet<Atom> = t_support.clone();
        vars.extend(s.support());
        for h in &hyps {
            vars.extend(h.q.support());
            vars.extend(h.r_support.iter().cloned());
        }
        HornClause {
            hyps,
            s,
            t_support,
            vars: vars.into_iter().collect(),
        }
    }

    /// Reduces each atom; every atom written in the terms, even with a
    /// cancelled coefficient, is kept as a variable of the clause.
    pub fn from_atoms(hyps: &[BigOAtom], concl: &BigOAtom) -> Result<Self, TermError> {
        let mut written = concl.atoms();
        let mut reduced = Vec::with_capacity(hyps.len());
        for h in hyps {
            let (q, r) = terms::reduce_atom(h)?;
            reduced.push(Hypothesis::new(q, r));
            h.collect_atoms(&mut written);
        }
        let (s, t) = terms::reduce_atom(concl)?;
        Ok(HornClause::new(reduced, s, t).with_universe(written))
    }

    /// Adds atoms that the clause does not constrain but that a
    /// counterexample must still assign.
    pub fn with_universe(mut self, extra: impl IntoIterator<Item = Atom>) -> Self {
        let mut vars: BTreeSet<Atom> = self.vars.into_iter().collect();
        vars.extend(extra);
        self.vars = vars.into_iter().collect();
        self
    }

    /// Hypotheses whose bound atoms all lie in `set`, with their rows `q[set]`.
    pub fn active_rows(&self, set: &BTreeSet<Atom>) -> (Vec<usize>, Vec<LinearExpr>) {
        self.hyps
            .iter()
            .enumerate()
            .filter(|(_, h)| h.r_support.is_subset(set))
            .map(|(i, h)| (i, h.q.without(set)))
            .unzip()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationState {
    /// Atoms known to be `O(t)`.
    pub set: BTreeSet<Atom>,
    /// Indices of the active hypotheses.
    pub active: Vec<usize>,
    /// Their rows `q[set]`.
    pub rows: Vec<LinearExpr>,
    pub trace: Vec<Step>,
}

fn internal(e: impl std::fmt::Display) -> HornError {
    HornError::InternalInvariantViolation(e.to_string())
}

pub fn saturate(h: &HornClause) -> SaturationState {
    saturate_in_order(h, &h.vars)
}

/// Saturation probing candidate atoms in the given order. The final set does
/// not depend on the order; only the trace does.
pub fn saturate_in_order(h: &HornClause, order: &[Atom]) -> SaturationState {
    let mut set = h.t_support.clone();
    let mut trace = Vec::new();
    loop {
        let (active, rows) = h.active_rows(&set);
        let cols: Vec<Atom> = order.iter().filter(|a| !set.contains(*a)).cloned().collect();
        let m = Matrix::from_exprs(&rows, &cols);
        let mut grown = false;
        let mut blocked = vec![false; cols.len()];
        for j in 0..cols.len() {
            if blocked[j] {
                continue;
            }
            if let Some(f) = linalg::kernel_witness(&m, j).expect("column in range") {
                for (b, x) in blocked.iter_mut().zip(f.values()) {
                    *b |= x.is_positive();
                }
                continue;
            }
            let witness = linalg::positive_combination(&m, j).expect("column in range");
            if let Some(w) = witness {
                let combined = m.left_mul(w.weights());
                let added: Vec<Atom> = cols
                    .iter()
                    .zip(&combined)
                    .filter(|(_, c)| c.is_positive())
                    .map(|(a, _)| a.clone())
                    .collect();
                set.extend(added.iter().cloned());
                trace.push(Step {
                    added,
                    weights: w.into_weights(),
                });
                grown = true;
                break;
            }
        }
        if !grown {
            return SaturationState {
                set,
                active,
                rows,
                trace,
            };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Valid(Derivation),
    Invalid(Counterexample),
}

impl Outcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, Outcome::Valid(_))
    }
}

/// Decides `h`, also returning the saturation state it ended in.
pub fn decide_with_state(h: &HornClause) -> Result<(SaturationState, Outcome), HornError> {
    let st = saturate(h);
    let target = h.s.without(&st.set);
    let derivation = |coefficients| Derivation {
        coefficients,
        final_set: st.set.clone(),
        trace: st.trace.clone(),
    };
    let outcome = if target.is_zero() {
        Outcome::Valid(derivation(Vec::new()))
    } else if let Some(b) = linalg::span_membership(&st.rows, &target) {
        Outcome::Valid(derivation(b))
    } else {
        Outcome::Invalid(build_counterexample(h, &st)?)
    };
    Ok((st, outcome))
}

/// The derivation of `h`, skipping the counterexample when there is none.
pub fn prove(h: &HornClause) -> Option<Derivation> {
    let st = saturate(h);
    let target = h.s.without(&st.set);
    let coefficients = if target.is_zero() {
        Vec::new()
    } else {
        linalg::span_membership(&st.rows, &target)?
    };
    Some(Derivation {
        coefficients,
        final_set: st.set,
        trace: st.trace,
    })
}

pub fn decide(h: &HornClause) -> Result<Outcome, HornError> {
    decide_with_state(h).map(|(_, o)| o)
}

/// Counterexample on a one-point domain for a clause whose saturation `st`
/// failed the span test.
///
/// Atoms of the final set get zero. The others get `e c_i + d_i`, where `c`
/// is a strictly positive kernel vector of the active rows, `d` is a kernel
/// vector on which the reduced conclusion is nonzero, and `e` is the least
/// positive integer making every value positive and the conclusion nonzero.
pub fn build_counterexample(
    h: &HornClause,
    st: &SaturationState,
) -> Result<Counterexample, HornError> {
    let cols: Vec<Atom> = h.vars.iter().filter(|a| !st.set.contains(*a)).cloned().collect();
    let m = Matrix::from_exprs(&st.rows, &cols);
    let all: BTreeSet<usize> = (0..cols.len()).collect();
    let c = linalg::positive_kernel(&m, &all)
        .map_err(internal)?
        .ok_or_else(|| internal("no positive kernel vector at the saturation fixed point"))?;
    let target = h.s.without(&st.set);
    let s: Vec<Rational> = cols.iter().map(|a| target.coeff(a)).collect();
    let d = linalg::nullspace(&m)
        .into_iter()
        .find(|v| !linalg::dot(&s, v).is_zero())
        .ok_or_else(|| internal("conclusion lies in the row span"))?;

    let c = primitive(&c);
    let d = primitive(&d);
    if c.iter().any(|x| !x.is_positive()) {
        return Err(internal("kernel vector is not strictly positive"));
    }
    let s: Vec<BigInt> = linalg::integer_scale(&s);
    let dot = |u: &[BigInt], v: &[BigInt]| -> BigInt { u.iter().zip(v).map(|(a, b)| a * b).sum() };
    let x = dot(&s, &c);
    let y = dot(&s, &d);

    // Least e >= 1 with e c_i + d_i > 0, i.e. e > -d_i / c_i.
    let mut e = BigInt::one();
    for (ci, di) in c.iter().zip(&d) {
        let need = (-di).div_floor(ci) + 1;
        if need > e {
            e = need;
        }
    }
    if &e * &x + &y == BigInt::zero() {
        e += 1;
    }

    let mut values: BTreeMap<Atom, Rational> = BTreeMap::new();
    for a in &st.set {
        values.insert(a.clone(), Rational::zero());
    }
    for (a, (ci, di)) in cols.iter().zip(c.iter().zip(&d)) {
        values.insert(a.clone(), Rational::from_integer(&e * ci + di));
    }
    for a in &h.vars {
        values.entry(a.clone()).or_insert_with(Rational::zero);
    }
    Ok(Counterexample::singleton(values))
}

/// `v` scaled to coprime integers.
fn primitive(v: &[Rational]) -> Vec<BigInt> {
    let k = rational::primitive_scale(v);
    v.iter().map(|x| (x * &k).to_integer()).collect()
}

impl Derivation {
    /// Replays the trace against `h` using only exact arithmetic: every step
    /// must be justified by its weights, and the final coefficients must
    /// rebuild the reduced conclusion.
    pub fn check(&self, h: &HornClause) -> bool {
        let mut set = h.t_support.clone();
        for step in &self.trace {
            let (_, rows) = h.active_rows(&set);
            if step.weights.len() != rows.len() || step.added.is_empty() {
                return false;
            }
            let mut combo = LinearExpr::zero();
            for (w, r) in step.weights.iter().zip(&rows) {
                combo.add_scaled(r, w);
            }
            if combo.iter().any(|(_, c)| c.is_negative()) {
                return false;
            }
            for a in &step.added {
                if set.contains(a) || !combo.coeff(a).is_positive() {
                    return false;
                }
            }
            set.extend(step.added.iter().cloned());
        }
        if set != self.final_set {
            return false;
        }
        let (_, rows) = h.active_rows(&set);
        let target = h.s.without(&set);
        if self.coefficients.is_empty() {
            return target.is_zero();
        }
        if self.coefficients.len() != rows.len() {
            return false;
        }
        let mut combo = LinearExpr::zero();
        for (w, r) in self.coefficients.iter().zip(&rows) {
            combo.add_scaled(r, w);
        }
        combo == target
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, AtomShape};
    use crate::oracle::{self, Profile, Semantics};
    use crate::rational::int;
    use crate::terms::{Formula, Term};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn set(names: &[&str]) -> BTreeSet<Atom> {
        names.iter().map(|n| Atom::var(*n)).collect()
    }

    fn clause(hyps: &[BigOAtom], concl: BigOAtom) -> HornClause {
        HornClause::from_atoms(hyps, &concl).unwrap()
    }

    #[test]
    fn saturation_absorbs_summands() {
        let h = clause(&[BigOAtom::big_o(v("f") + v("g"), v("h"))], BigOAtom::big_o(v("f"), v("h")));
        assert_eq!(saturate(&h).set, set(&["f", "g", "h"]));
        assert!(decide(&h).unwrap().is_valid());
    }

    #[test]
    fn saturation_adds_nothing_for_mixed_signs() {
        let h = clause(
            &[
                BigOAtom::big_o(v("f") + v("g") - v("hp"), v("k")),
                BigOAtom::big_o(v("g") + v("l") - v("hp"), v("k")),
            ],
            BigOAtom::big_o(v("f") - v("l"), v("k")),
        );
        let st = saturate(&h);
        assert_eq!(st.set, set(&["k"]));
        assert!(st.trace.is_empty());
    }

    #[test]
    fn saturation_without_hypotheses() {
        let h = clause(&[], BigOAtom::big_o(v("f"), v("g")));
        assert_eq!(saturate(&h).set, set(&["g"]));
    }

    #[test]
    fn intro_entailments_are_valid() {
        let h = clause(
            &[
                BigOAtom::new(v("f") + v("g"), v("h"), v("k")),
                BigOAtom::new(v("g") + v("l"), v("h"), v("k")),
            ],
            BigOAtom::new(v("f"), v("l"), v("k")),
        );
        match decide(&h).unwrap() {
            Outcome::Valid(d) => {
                assert_eq!(d.coefficients, vec![int(1), int(-1)]);
                assert!(d.check(&h));
            }
            Outcome::Invalid(_) => panic!("expected valid"),
        }

        let h = clause(
            &[
                BigOAtom::new(v("f") + v("g"), v("h"), v("k")),
                BigOAtom::big_o(v("g"), v("l")),
                BigOAtom::big_o(v("k"), v("l")),
            ],
            BigOAtom::new(v("f"), v("h"), v("l")),
        );
        match decide(&h).unwrap() {
            Outcome::Valid(d) => assert!(d.check(&h)),
            Outcome::Invalid(_) => panic!("expected valid"),
        }
    }

    #[test]
    fn counterexample_without_hypotheses() {
        let h = clause(&[], BigOAtom::big_o(v("f"), v("g")));
        let Outcome::Invalid(cx) = decide(&h).unwrap() else { panic!() };
        assert_eq!(cx.value(&Atom::var("f"), 0), int(2));
        assert_eq!(cx.value(&Atom::var("g"), 0), int(0));
    }

    #[test]
    fn counterexample_with_equality_hypothesis() {
        let h = clause(&[BigOAtom::equation(v("f"), v("gp"))], BigOAtom::big_o(v("f"), Term::Zero));
        let Outcome::Invalid(cx) = decide(&h).unwrap() else { panic!() };
        let f = cx.value(&Atom::var("f"), 0);
        assert_eq!(f, cx.value(&Atom::var("gp"), 0));
        assert!(f.is_positive());
    }

    #[test]
    fn counterexample_zeroes_the_bound_set() {
        let h = clause(
            &[BigOAtom::big_o(v("f") + v("g"), v("t0"))],
            BigOAtom::big_o(v("l"), v("t0")),
        );
        let Outcome::Invalid(cx) = decide(&h).unwrap() else { panic!() };
        for n in ["f", "g", "t0"] {
            assert_eq!(cx.value(&Atom::var(n), 0), int(0));
        }
        assert_eq!(cx.value(&Atom::var("l"), 0), int(2));
    }

    #[test]
    fn tampered_derivation_fails_check() {
        let h = clause(
            &[
                BigOAtom::new(v("f") + v("g"), v("h"), v("k")),
                BigOAtom::new(v("g") + v("l"), v("h"), v("k")),
            ],
            BigOAtom::new(v("f"), v("l"), v("k")),
        );
        let Outcome::Valid(mut d) = decide(&h).unwrap() else { panic!() };
        d.coefficients[1] = int(1);
        assert!(!d.check(&h));
    }

    #[test]
    fn degenerate_conclusion_is_valid_with_empty_certificate() {
        let h = clause(&[], BigOAtom::big_o(v("f"), v("f") + v("g")));
        let Outcome::Valid(d) = decide(&h).unwrap() else { panic!() };
        assert!(d.coefficients.is_empty());
        assert!(d.check(&h));
    }

    fn sample(seed: u64) -> (Vec<BigOAtom>, BigOAtom) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        gen::horn(&mut rng, &AtomShape::core(5, 3), 4)
    }

    fn nonnegative() -> Semantics {
        Semantics {
            nonnegative: true,
            ..Semantics::default()
        }
    }

    proptest! {
        #[test]
        fn verdicts_check_against_the_oracle(seed in any::<u64>()) {
            let (hyps, concl) = sample(seed);
            let h = clause(&hyps, concl.clone());
            match decide(&h).unwrap() {
                Outcome::Valid(d) => prop_assert!(d.check(&h)),
                Outcome::Invalid(cx) => {
                    let phi = Formula::entailment(&hyps, concl.into());
                    prop_assert!(oracle::falsifies(&phi, &cx, &nonnegative()).unwrap());
                }
            }
        }

        #[test]
        fn saturation_is_confluent(seed in any::<u64>()) {
            let (hyps, concl) = sample(seed);
            let h = clause(&hyps, concl);
            let set = saturate(&h).set;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            for _ in 0..10 {
                let mut order = h.vars.clone();
                order.shuffle(&mut rng);
                prop_assert_eq!(&saturate_in_order(&h, &order).set, &set);
            }
        }

        #[test]
        fn weakening_keeps_validity(seed in any::<u64>()) {
            let (mut hyps, concl) = sample(seed);
            if decide(&clause(&hyps, concl.clone())).unwrap().is_valid() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
                hyps.push(gen::atom(&mut rng, &AtomShape::core(5, 3)));
                prop_assert!(decide(&clause(&hyps, concl)).unwrap().is_valid());
            }
        }

        #[test]
        fn bounds_only_matter_up_to_support(seed in any::<u64>(), k in 1i64..=5) {
            let (hyps, concl) = sample(seed);
            let before = decide(&clause(&hyps, concl.clone())).unwrap().is_valid();
            let scaled: Vec<BigOAtom> = hyps
                .iter()
                .map(|a| {
                    let mut b = a.clone();
                    b.bound = Term::scale(int(k), b.bound.clone());
                    if let Some(x) = a.bound.atoms().into_iter().next() {
                        b.bound = b.bound + Term::Atom(x);
                    }
                    b
                })
                .collect();
            prop_assert_eq!(decide(&clause(&scaled, concl)).unwrap().is_valid(), before);
        }

        #[test]
        fn reduced_atoms_decide_alike(seed in any::<u64>()) {
            let (hyps, concl) = sample(seed);
            let before = decide(&clause(&hyps, concl.clone())).unwrap().is_valid();
            let reduce = |a: &BigOAtom| {
                let (s, t) = terms::reduce_atom(a).unwrap();
                terms::reduced_to_atom(&s, &t)
            };
            let hyps: Vec<BigOAtom> = hyps.iter().map(reduce).collect();
            prop_assert_eq!(decide(&clause(&hyps, reduce(&concl))).unwrap().is_valid(), before);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn valid_clauses_survive_search(seed in any::<u64>()) {
            let (hyps, concl) = sample(seed);
            if decide(&clause(&hyps, concl.clone())).unwrap().is_valid() {
                let phi = Formula::entailment(&hyps, concl.into());
                prop_assert!(oracle::random_search(&phi, 2000, &Profile::default()).is_none());
            }
        }
    }
}
