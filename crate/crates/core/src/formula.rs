//! Clause decomposition of quantifier-free formulas and amalgamation of
//! counterexamples.
//!
//! A formula is valid exactly when each of its CNF clauses is. A clause
//! `h_1 & ... & h_k -> d_1 | ... | d_l` over nonnegative functions is valid
//! exactly when one of the Horn clauses `h_1 & ... & h_k -> d_j` is; when
//! none is, the one-point counterexamples of the `l` Horn clauses are laid
//! side by side on an `l`-point domain.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::engine::{self, Backend, DecideError};
use crate::rational::Rational;
use crate::terms::{BigOAtom, Formula, Term};
use crate::verdict::{Counterexample, Verdict};

/// Variable of the unsatisfiable disjunct `~w = O(0)` that stands for an
/// empty disjunction.
pub const BOTTOM_VAR: &str = "~w";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("basis degree mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: usize, found: usize },
    #[error("expected a one-point counterexample, found domain size {0}")]
    NotSingleton(usize),
    #[error("nothing to amalgamate")]
    Empty,
}

/// `hyps -> disjuncts`, with a nonempty disjunct list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ImplicativeClause {
    pub hyps: Vec<BigOAtom>,
    pub disjuncts: Vec<BigOAtom>,
}

impl ImplicativeClause {
    pub fn horn(hyps: Vec<BigOAtom>, concl: BigOAtom) -> Self {
        ImplicativeClause {
            hyps,
            disjuncts: vec![concl],
        }
    }

    pub fn to_formula(&self) -> Formula {
        let concl = self
            .disjuncts
            .iter()
            .cloned()
            .map(Formula::Atom)
            .reduce(Formula::or)
            .unwrap_or_else(|| Formula::Atom(bottom()));
        Formula::entailment(&self.hyps, concl)
    }

    pub fn map_atoms(&self, f: impl Fn(&BigOAtom) -> BigOAtom) -> Self {
        ImplicativeClause {
            hyps: self.hyps.iter().map(&f).collect(),
            disjuncts: self.disjuncts.iter().map(&f).collect(),
        }
    }
}

impl fmt::Display for ImplicativeClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |atoms: &[BigOAtom], sep: &str| {
            atoms
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        if !self.hyps.is_empty() {
            write!(f, "{} -> ", join(&self.hyps, " & "))?;
        }
        write!(f, "{}", join(&self.disjuncts, " | "))
    }
}

/// The atom `~w = O(0)`.
pub fn bottom() -> BigOAtom {
    BigOAtom::big_o(Term::var(BOTTOM_VAR), Term::Zero)
}

type Literal = (bool, BigOAtom);

fn push_unique<T: PartialEq>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}

fn product(a: Vec<Vec<Literal>>, b: Vec<Vec<Literal>>) -> Vec<Vec<Literal>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            let mut c = x.clone();
            for l in y {
                push_unique(&mut c, l.clone());
            }
            out.push(c);
        }
    }
    out
}

/// CNF of `phi` (or of its negation when `positive` is false).
fn cnf(phi: &Formula, positive: bool) -> Vec<Vec<Literal>> {
    match phi {
        Formula::Atom(a) => vec![vec![(positive, a.clone())]],
        Formula::Not(p) => cnf(p, !positive),
        Formula::And(p, q) if positive => [cnf(p, true), cnf(q, true)].concat(),
        Formula::And(p, q) => product(cnf(p, false), cnf(q, false)),
        Formula::Or(p, q) if positive => product(cnf(p, true), cnf(q, true)),
        Formula::Or(p, q) => [cnf(p, false), cnf(q, false)].concat(),
        Formula::Implies(p, q) if positive => product(cnf(p, false), cnf(q, true)),
        Formula::Implies(p, q) => [cnf(p, true), cnf(q, false)].concat(),
    }
}

/// Distributive CNF with duplicate literals and clauses removed. Negative
/// literals become hypotheses and positive ones disjuncts; a clause with no
/// positive literal gets the single disjunct [`bottom`].
pub fn to_clauses(phi: &Formula) -> Vec<ImplicativeClause> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for lits in cnf(phi, true) {
        let key: BTreeSet<Literal> = lits.iter().cloned().collect();
        if !seen.insert(key) {
            continue;
        }
        let (pos, neg): (Vec<Literal>, Vec<Literal>) = lits.into_iter().partition(|l| l.0);
        let mut disjuncts: Vec<BigOAtom> = pos.into_iter().map(|l| l.1).collect();
        if disjuncts.is_empty() {
            disjuncts.push(bottom());
        }
        out.push(ImplicativeClause {
            hyps: neg.into_iter().map(|l| l.1).collect(),
            disjuncts,
        });
    }
    out
}

/// Lays one-point counterexamples side by side: point `j` of the result is
/// `cxs[j]`. Atoms missing from some input are zero there.
pub fn amalgamate(cxs: &[Counterexample]) -> Result<Counterexample, FormulaError> {
    let first = cxs.first().ok_or(FormulaError::Empty)?;
    let degree = first.basis_degree;
    for cx in cxs {
        if cx.domain_size != 1 {
            return Err(FormulaError::NotSingleton(cx.domain_size));
        }
        if cx.basis_degree != degree {
            return Err(FormulaError::BasisMismatch {
                expected: degree,
                found: cx.basis_degree,
            });
        }
    }
    let atoms: BTreeSet<_> = cxs.iter().flat_map(|c| c.values.keys().cloned()).collect();
    let values = atoms
        .into_iter()
        .map(|a| {
            let points = cxs
                .iter()
                .map(|c| {
                    c.values
                        .get(&a)
                        .map(|p| p[0].clone())
                        .unwrap_or_else(|| vec![Rational::zero(); degree + 1])
                })
                .collect();
            (a, points)
        })
        .collect();
    Ok(Counterexample {
        domain_size: cxs.len(),
        basis_degree: degree,
        values,
        components: None,
    })
}

/// Decides `phi` with its variables ranging over nonnegative functions.
/// Every bound must be a nonnegative combination of atoms.
pub fn decide_qf(phi: &Formula) -> Result<Verdict, DecideError> {
    engine::decide(phi, &Backend::Core, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::gen::{self, AtomShape};
    use crate::horn::{self, HornClause};
    use crate::oracle::{self, eval_formula, FiniteAssignment, Model, Reading, Semantics};
    use crate::terms::Atom;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeMap, BTreeSet};

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    fn fog(a: &str, b: &str) -> BigOAtom {
        BigOAtom::big_o(v(a), v(b))
    }

    fn single(pairs: &[(&str, i64)]) -> Counterexample {
        Counterexample::singleton(
            pairs
                .iter()
                .map(|(n, x)| (Atom::var(*n), int(*x)))
                .collect::<BTreeMap<_, _>>(),
        )
    }

    #[test]
    fn horn_clause_is_its_own_cnf() {
        let phi = Formula::entailment(&[fog("f", "g")], fog("g", "h").into());
        assert_eq!(
            to_clauses(&phi),
            vec![ImplicativeClause::horn(vec![fog("f", "g")], fog("g", "h"))]
        );
    }

    #[test]
    fn disjunction_is_one_clause() {
        let phi = Formula::or(fog("f", "g").into(), fog("g", "f").into());
        let cs = to_clauses(&phi);
        assert_eq!(cs.len(), 1);
        assert!(cs[0].hyps.is_empty());
        assert_eq!(cs[0].disjuncts, vec![fog("f", "g"), fog("g", "f")]);
    }

    #[test]
    fn negation_gets_bottom_disjunct() {
        let cs = to_clauses(&Formula::not(fog("f", "g").into()));
        assert_eq!(cs, vec![ImplicativeClause::horn(vec![fog("f", "g")], bottom())]);
    }

    #[test]
    fn duplicate_clauses_are_merged() {
        let p: Formula = fog("f", "g").into();
        let phi = Formula::and(p.clone(), Formula::or(p.clone(), p));
        assert_eq!(to_clauses(&phi).len(), 1);
    }

    #[test]
    fn amalgamation_fills_with_zero() {
        let out = amalgamate(&[single(&[("f", 1), ("g", 0)]), single(&[("f", 0), ("g", 1)])]).unwrap();
        assert_eq!(out.domain_size, 2);
        assert_eq!(out.value(&Atom::var("f"), 0), int(1));
        assert_eq!(out.value(&Atom::var("f"), 1), int(0));
        assert_eq!(out.value(&Atom::var("g"), 1), int(1));

        let out = amalgamate(&[single(&[("f", 1)]), single(&[("g", 1)])]).unwrap();
        assert_eq!(out.value(&Atom::var("f"), 1), int(0));
        assert_eq!(out.value(&Atom::var("g"), 0), int(0));

        let one = single(&[("f", 3)]);
        assert_eq!(amalgamate(std::slice::from_ref(&one)).unwrap(), one);
    }

    #[test]
    fn amalgamation_rejects_mixed_bases() {
        let a = single(&[("f", 1)]);
        let b = single(&[("f", 1)]).with_degree(1);
        assert_eq!(
            amalgamate(&[a, b]),
            Err(FormulaError::BasisMismatch { expected: 0, found: 1 })
        );
    }

    #[test]
    fn comparability_disjunction_is_invalid_on_two_points() {
        let phi = Formula::or(fog("f", "g").into(), fog("g", "f").into());
        let verdict = decide_qf(&phi).unwrap();
        let cx = verdict.counterexample().unwrap();
        assert_eq!(cx.domain_size, 2);
        let f = Atom::var("f");
        let g = Atom::var("g");
        assert!(cx.value(&f, 0) > int(0) && cx.value(&g, 0) == int(0));
        assert!(cx.value(&g, 1) > int(0) && cx.value(&f, 1) == int(0));
    }

    #[test]
    fn reflexivity_and_intro_entailment() {
        assert!(decide_qf(&fog("f", "f").into()).unwrap().is_valid());
        let phi = Formula::entailment(
            &[
                BigOAtom::new(v("f") + v("g"), v("h"), v("k")),
                BigOAtom::new(v("g") + v("l"), v("h"), v("k")),
            ],
            BigOAtom::new(v("f"), v("l"), v("k")).into(),
        );
        assert!(decide_qf(&phi).unwrap().is_valid());
    }

    fn core_formula(seed: u64, depth: usize) -> Formula {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        gen::formula(&mut rng, &AtomShape::core(3, 2), depth)
    }

    fn nonnegative() -> Semantics {
        Semantics {
            nonnegative: true,
            ..Semantics::default()
        }
    }

    fn clause_atoms(clauses: &[ImplicativeClause]) -> BTreeSet<Atom> {
        let mut atoms = BTreeSet::new();
        for c in clauses {
            for a in c.hyps.iter().chain(&c.disjuncts) {
                a.collect_atoms(&mut atoms);
            }
        }
        atoms
    }

    proptest! {
        #[test]
        fn clauses_agree_with_the_formula(seed in any::<u64>()) {
            let phi = core_formula(seed, 4);
            let clauses = to_clauses(&phi);
            let atoms = clause_atoms(&clauses);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
            for _ in 0..50 {
                let n = rng.gen_range(1..=3);
                let values = atoms
                    .iter()
                    .map(|a| {
                        let xs = if a.is_fresh() {
                            vec![int(1); n]
                        } else {
                            (0..n).map(|_| int(rng.gen_range(0..=3))).collect()
                        };
                        (a.clone(), xs)
                    })
                    .collect();
                let asg = FiniteAssignment { domain_size: n, values };
                let model = Model::Finite(&asg);
                let whole = eval_formula(&phi, model, Reading::Pointwise).unwrap();
                let mut split = true;
                for c in &clauses {
                    split &= eval_formula(&c.to_formula(), model, Reading::Pointwise).unwrap();
                }
                prop_assert_eq!(whole, split);
            }
        }

        #[test]
        fn amalgams_refute_the_failing_clause(seed in any::<u64>()) {
            let phi = core_formula(seed, 3);
            if let Verdict::Invalid(r) = decide_qf(&phi).unwrap() {
                let sem = nonnegative();
                prop_assert!(oracle::falsifies(&phi, &r.counterexample, &sem).unwrap());
                for h in &r.clause.hyps {
                    prop_assert!(oracle::satisfies(&h.clone().into(), &r.counterexample, &sem).unwrap());
                }
                for d in r.clause.disjuncts.iter().filter(|d| !d.atoms().iter().any(Atom::is_fresh)) {
                    prop_assert!(oracle::falsifies(&d.clone().into(), &r.counterexample, &sem).unwrap());
                }
            }
        }

        #[test]
        fn horn_inputs_match_horn_decide(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (hyps, concl) = gen::horn(&mut rng, &AtomShape::core(4, 3), 4);
            let phi = Formula::entailment(&hyps, concl.clone().into());
            let h = HornClause::from_atoms(&hyps, &concl).unwrap();
            prop_assert_eq!(decide_qf(&phi).unwrap().is_valid(), horn::decide(&h).unwrap().is_valid());
        }
    }
}
