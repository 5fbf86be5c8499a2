//! The constant function one and sequences of growth symbols.
//!
//! With `1` read as a variable, a formula is valid for the constant one iff
//! it is valid whenever `1 != O(0)`.
//!
//! With symbols `g_1 < ... < g_k` of strictly increasing growth, read
//! eventually, the reduction of a Horn clause adds the hypotheses
//! `g_i = O(g_{i+1})` and the collapse disjuncts `g_1 = O(0)`,
//! `g_{i+1} = O(g_i)`. The clause is valid iff the reduction is valid under
//! every placement of the variables among the growth symbols. Placements
//! matter: `h + g_1 = g_2 -> g_1 = O(h)` is valid, but its reduction alone
//! is not. Counterexamples are built over the polynomial model `1`,
//! `g_i = x^i`, `G = x^(k+1)`; the decision itself never looks at the model.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::engine::{self, Backend, DecideError};
use crate::horn::{self, HornClause, HornError, Outcome, SaturationState};
use crate::rational::Rational;
use crate::terms::{Atom, BigOAtom, Formula, LinearExpr, Term, TermError};
use crate::verdict::{Counterexample, Derivation, ProofTree, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalesError {
    #[error("growth indices must be strictly increasing")]
    IndicesNotIncreasing,
    #[error("triangular system is singular at row {0}")]
    SingularSystem(usize),
    #[error("growth symbol g[{0}] is not declared")]
    UnknownGrowth(String),
}

/// The growth symbols of a query, renumbered `1..=k` by increasing index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthContext {
    indices: Vec<Rational>,
}

impl GrowthContext {
    pub fn new(indices: Vec<Rational>) -> Result<Self, ScalesError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ScalesError::IndicesNotIncreasing);
        }
        Ok(GrowthContext { indices })
    }

    /// Context of the growth symbols occurring in `phi`.
    pub fn of_formula(phi: &Formula) -> Self {
        let indices = phi
            .atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Growth(q) => Some(q),
                _ => None,
            })
            .collect();
        GrowthContext { indices }
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[Rational] {
        &self.indices
    }

    /// `g_i` for `1 <= i <= k`.
    pub fn symbol(&self, i: usize) -> Atom {
        Atom::Growth(self.indices[i - 1].clone())
    }

    pub fn symbols(&self) -> Vec<Atom> {
        (1..=self.k()).map(|i| self.symbol(i)).collect()
    }

    /// Position of `g[q]` in `1..=k`.
    pub fn position(&self, q: &Rational) -> Option<usize> {
        self.indices.binary_search(q).ok().map(|i| i + 1)
    }

    /// `g_i = O(g_{i+1})` for each consecutive pair.
    pub fn ordering_hyps(&self) -> Vec<BigOAtom> {
        (1..self.k())
            .map(|i| BigOAtom::big_o(self.symbol(i).into(), self.symbol(i + 1).into()))
            .collect()
    }

    /// `g_1 = O(0)` and `g_{i+1} = O(g_i)`.
    pub fn collapse_disjuncts(&self) -> Vec<BigOAtom> {
        (1..=self.k())
            .map(|i| {
                let bound = if i == 1 { Term::Zero } else { self.symbol(i - 1).into() };
                BigOAtom::big_o(self.symbol(i).into(), bound)
            })
            .collect()
    }

    /// The collapse disjuncts followed by `d`.
    pub fn reduction(&self, d: &BigOAtom) -> Vec<BigOAtom> {
        let mut out = self.collapse_disjuncts();
        out.push(d.clone());
        out
    }

    /// Degrees of the standard model: `g_i` is `x^i` and the top scale is `x^(k+1)`.
    pub fn model_degrees(&self) -> BTreeMap<Atom, usize> {
        (1..=self.k()).map(|i| (self.symbol(i), i)).collect()
    }
}

/// `1 = O(0)`.
pub fn one_vanishes() -> BigOAtom {
    BigOAtom::big_o(Term::one(), Term::Zero)
}

fn violation(msg: impl Into<String>) -> DecideError {
    HornError::InternalInvariantViolation(msg.into()).into()
}

fn failing_run(
    hyps: &[BigOAtom],
    concl: &BigOAtom,
    universe: &BTreeSet<Atom>,
) -> Result<(HornClause, SaturationState, Counterexample), DecideError> {
    let h = HornClause::from_atoms(hyps, concl)?.with_universe(universe.iter().cloned());
    match horn::decide_with_state(&h)? {
        (st, Outcome::Invalid(cx)) => Ok((h, st, cx)),
        (_, Outcome::Valid(_)) => Err(violation(format!("`{concl}` follows from the hypotheses"))),
    }
}

fn constants(cx: &Counterexample) -> BTreeMap<Atom, Rational> {
    cx.values.iter().map(|(a, v)| (a.clone(), v[0][0].clone())).collect()
}

/// Counterexample to `hyps -> concl` with `1` the constant one, given that
/// neither `concl` nor `1 = O(0)` follows from `hyps`. The result has basis
/// `(1, x)` on a single copy of the positive integers.
pub fn with_one_counterexample(
    hyps: &[BigOAtom],
    concl: &BigOAtom,
    universe: &BTreeSet<Atom>,
) -> Result<Counterexample, DecideError> {
    let mut universe = universe.clone();
    universe.insert(Atom::One);
    let (_, _, first) = failing_run(hyps, &one_vanishes(), &universe)?;
    let (_, st, second) = failing_run(hyps, concl, &universe)?;
    let c = constants(&first);
    let d = constants(&second);
    let u = c[&Atom::One].clone();
    if !u.is_positive() {
        return Err(violation("the constant one vanishes in the first run"));
    }
    let values: BTreeMap<Atom, Vec<Rational>> = if !st.set.contains(&Atom::One) {
        let v = d[&Atom::One].clone();
        d.into_iter().map(|(a, x)| (a, vec![x / &v])).collect()
    } else {
        d.into_iter()
            .map(|(a, x)| {
                let constant = &c[&a] / &u;
                (a, vec![constant, x])
            })
            .collect()
    };
    Ok(Counterexample::polynomial(1, values))
}

/// Solves `sum_j a[i][j] H_j = x^(i+1)` for the lower triangular `a`.
/// Each returned polynomial has `k + 1` coefficients, constant term first.
pub fn solve_h_basis(a: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, ScalesError> {
    let k = a.len();
    let mut hs: Vec<Vec<Rational>> = Vec::with_capacity(k);
    for i in 0..k {
        let diag = &a[i][i];
        if diag.is_zero() {
            return Err(ScalesError::SingularSystem(i + 1));
        }
        let mut p = vec![Rational::zero(); k + 1];
        p[i + 1] = Rational::one();
        for (j, h) in hs.iter().enumerate() {
            for (pc, hc) in p.iter_mut().zip(h) {
                *pc -= &a[i][j] * hc;
            }
        }
        for pc in p.iter_mut() {
            *pc /= diag;
        }
        hs.push(p);
    }
    Ok(hs)
}

fn eval(e: &LinearExpr, c: &BTreeMap<Atom, Rational>) -> Rational {
    e.eval(|a| c.get(a).cloned().unwrap_or_else(Rational::zero))
}

/// Counterexample to `hyps -> concl` in the standard growth model, given
/// that some placement of the variables keeps its reduction invalid.
///
/// The first such placement in search order is used. The runs for `g_1 = O(0)`, `g_{i+1} = O(g_i)` then give
/// a chain `A_0 <= ... <= A_{k-1}` with assignments `c^0, ..., c^(k-1)`; the
/// run for `concl` gives `(B, d)`, which replaces the link of the chain where
/// `B` fits. A variable `f` gets `sum_j c^j(f) H_(j+1) + c^k(f) x^(k+1)`, where
/// the `H_i` are solved for so that `g_i` is exactly `x^i`.
pub fn growth_counterexample(
    hyps: &[BigOAtom],
    concl: &BigOAtom,
    ctx: &GrowthContext,
    universe: &BTreeSet<Atom>,
) -> Result<Counterexample, DecideError> {
    let k = ctx.k();
    let gs = ctx.symbols();
    let mut universe = universe.clone();
    universe.extend(gs.iter().cloned());
    let mut hyps: Vec<BigOAtom> = hyps.to_vec();
    for o in ctx.ordering_hyps() {
        if !hyps.contains(&o) {
            hyps.push(o);
        }
    }
    let disjuncts = ctx.reduction(concl);
    let vars: Vec<Atom> = universe.iter().filter(|a| a.is_var()).cloned().collect();
    let hyps = match search_placements(&hyps, &disjuncts, &vars, &gs, &universe)? {
        Placement::Refuted(placed) => placed,
        Placement::Proved(_) => return Err(violation("growth reduction is valid under every placement")),
    };

    let mut sets: Vec<BTreeSet<Atom>> = Vec::with_capacity(k + 1);
    let mut assigns: Vec<BTreeMap<Atom, Rational>> = Vec::with_capacity(k + 1);
    for d in &disjuncts[..k] {
        let (_, st, cx) = failing_run(&hyps, d, &universe)?;
        sets.push(st.set);
        assigns.push(constants(&cx));
    }
    sets.push(universe.clone());
    assigns.push(universe.iter().map(|a| (a.clone(), Rational::zero())).collect());

    let (last, st, cx) = failing_run(&hyps, concl, &universe)?;
    let m = gs.iter().take_while(|g| st.set.contains(*g)).count();
    if gs[m..].iter().any(|g| st.set.contains(g)) {
        return Err(violation("growth symbols in the bound set are not a prefix"));
    }
    let d = constants(&cx);
    if last.s.is_zero() || eval(&last.s, &d).is_zero() {
        return Err(violation("conclusion does not fail in its run"));
    }
    sets[m] = st.set;
    assigns[m] = d;

    check_chain(&sets, &assigns, &gs, &last, m)?;

    let a: Vec<Vec<Rational>> = (1..=k)
        .map(|i| {
            (1..=k)
                .map(|j| if j <= i { assigns[j - 1][&gs[i - 1]].clone() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let hs = solve_h_basis(&a)?;

    let mut values = BTreeMap::new();
    for f in &universe {
        let mut p = vec![Rational::zero(); k + 2];
        for (j, h) in hs.iter().enumerate() {
            let c = &assigns[j][f];
            for (pc, hc) in p.iter_mut().zip(h) {
                *pc += c * hc;
            }
        }
        p[k + 1] = assigns[k][f].clone();
        values.insert(f.clone(), p);
    }
    for (i, g) in gs.iter().enumerate() {
        let mut expected = vec![Rational::zero(); k + 2];
        expected[i + 1] = Rational::one();
        if values[g] != expected {
            return Err(violation(format!("{g} is not interpreted as x^{}", i + 1)));
        }
    }
    Ok(Counterexample::polynomial(k + 1, values))
}

/// Hypotheses putting `v` at `level` among the growth symbols: above the
/// first `level` of them and below the rest.
pub fn level_hyps(v: &Atom, gs: &[Atom], level: usize) -> Vec<BigOAtom> {
    gs.iter()
        .enumerate()
        .map(|(i, g)| {
            if i < level {
                BigOAtom::big_o(g.clone().into(), v.clone().into())
            } else {
                BigOAtom::big_o(v.clone().into(), g.clone().into())
            }
        })
        .collect()
}

/// Outcome of the placement search for one reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placement {
    Proved(ProofTree),
    /// Hypotheses, with every variable placed, under which no disjunct of
    /// the reduction follows.
    Refuted(Vec<BigOAtom>),
}

fn first_valid(
    hyps: &[BigOAtom],
    disjuncts: &[BigOAtom],
    universe: &BTreeSet<Atom>,
) -> Result<Option<(usize, Derivation)>, DecideError> {
    for (i, d) in disjuncts.iter().enumerate() {
        let h = HornClause::from_atoms(hyps, d)?.with_universe(universe.iter().cloned());
        if let Some(der) = horn::prove(&h) {
            return Ok(Some((i, der)));
        }
    }
    Ok(None)
}

/// Searches the placements of `vars` for one keeping every disjunct
/// unprovable. The variable with the fewest open levels is split first.
pub fn search_placements(
    hyps: &[BigOAtom],
    disjuncts: &[BigOAtom],
    vars: &[Atom],
    gs: &[Atom],
    universe: &BTreeSet<Atom>,
) -> Result<Placement, DecideError> {
    let search = Search {
        disjuncts,
        gs,
        universe,
        memo: RefCell::new(HashMap::new()),
    };
    if let Some(refuted) = search.greedy(hyps, vars)? {
        return Ok(Placement::Refuted(refuted));
    }
    search.run(hyps, vars, &BTreeSet::new())
}

type Found = Option<(usize, Derivation)>;

struct Search<'a> {
    disjuncts: &'a [BigOAtom],
    gs: &'a [Atom],
    universe: &'a BTreeSet<Atom>,
    /// Placements reached in different orders share a hypothesis set.
    memo: RefCell<HashMap<BTreeSet<BigOAtom>, Found>>,
}

impl Search<'_> {
    fn first_valid(&self, hyps: &[BigOAtom]) -> Result<Found, DecideError> {
        let key: BTreeSet<BigOAtom> = hyps.iter().cloned().collect();
        if let Some(found) = self.memo.borrow().get(&key) {
            return Ok(found.clone());
        }
        let found = first_valid(hyps, self.disjuncts, self.universe)?;
        self.memo.borrow_mut().insert(key, found.clone());
        Ok(found)
    }

    fn placed(&self, hyps: &[BigOAtom], v: &Atom, level: usize) -> Vec<BigOAtom> {
        let mut trial = hyps.to_vec();
        trial.extend(level_hyps(v, self.gs, level));
        trial
    }

    /// Places each variable at its first open level, if that gets through.
    fn greedy(&self, hyps: &[BigOAtom], vars: &[Atom]) -> Result<Option<Vec<BigOAtom>>, DecideError> {
        if self.first_valid(hyps)?.is_some() {
            return Ok(None);
        }
        let mut current = hyps.to_vec();
        for v in vars {
            let mut next = None;
            for level in 0..=self.gs.len() {
                let trial = self.placed(&current, v, level);
                if self.first_valid(&trial)?.is_none() {
                    next = Some(trial);
                    break;
                }
            }
            match next {
                Some(trial) => current = trial,
                None => return Ok(None),
            }
        }
        Ok(Some(current))
    }

    /// `closed` holds levels already known to make a disjunct provable;
    /// adding hypotheses keeps them so.
    fn run(
        &self,
        hyps: &[BigOAtom],
        vars: &[Atom],
        closed: &BTreeSet<(Atom, usize)>,
    ) -> Result<Placement, DecideError> {
        if let Some((i, der)) = self.first_valid(hyps)? {
            return Ok(Placement::Proved(ProofTree::leaf(i, der)));
        }
        if vars.is_empty() {
            return Ok(Placement::Refuted(hyps.to_vec()));
        }
        let mut closed = closed.clone();
        let mut best: Option<(usize, Vec<Found>, usize)> = None;
        for (vi, v) in vars.iter().enumerate() {
            let mut levels = Vec::with_capacity(self.gs.len() + 1);
            let mut open = 0;
            for level in 0..=self.gs.len() {
                if closed.contains(&(v.clone(), level)) {
                    levels.push(None);
                    continue;
                }
                let found = self.first_valid(&self.placed(hyps, v, level))?;
                match &found {
                    Some(_) => {
                        closed.insert((v.clone(), level));
                    }
                    None => open += 1,
                }
                levels.push(found);
            }
            if best.as_ref().is_none_or(|(_, _, o)| open < *o) {
                best = Some((vi, levels, open));
            }
            if open <= 1 {
                break;
            }
        }
        let (vi, levels, _) = best.expect("vars is nonempty");
        let v = &vars[vi];
        let rest: Vec<Atom> = vars.iter().filter(|a| *a != v).cloned().collect();
        let mut children = Vec::with_capacity(levels.len());
        for (level, known) in levels.into_iter().enumerate() {
            let trial = self.placed(hyps, v, level);
            if !closed.contains(&(v.clone(), level)) {
                match self.run(&trial, &rest, &closed)? {
                    Placement::Proved(t) => children.push(t),
                    refuted => return Ok(refuted),
                }
                continue;
            }
            let (i, der) = match known {
                Some(k) => k,
                None => self.first_valid(&trial)?
                    .ok_or_else(|| violation("a closed level became open"))?,
            };
            children.push(ProofTree::leaf(i, der));
        }
        Ok(Placement::Proved(ProofTree::Split {
            var: v.clone(),
            children,
        }))
    }
}

/// Replays a placement tree: every split covers all levels of a variable
/// and every leaf derivation checks under the levels above it.
pub fn check_tree(
    tree: &ProofTree,
    hyps: &[BigOAtom],
    disjuncts: &[BigOAtom],
    gs: &[Atom],
    universe: &BTreeSet<Atom>,
) -> Result<bool, TermError> {
    match tree {
        ProofTree::Leaf { disjunct, derivation } => {
            let Some(d) = disjuncts.get(*disjunct) else {
                return Ok(false);
            };
            let h = HornClause::from_atoms(hyps, d)?.with_universe(universe.iter().cloned());
            Ok(derivation.check(&h))
        }
        ProofTree::Split { var, children } => {
            if !var.is_var() || children.len() != gs.len() + 1 {
                return Ok(false);
            }
            for (level, child) in children.iter().enumerate() {
                let mut trial = hyps.to_vec();
                trial.extend(level_hyps(var, gs, level));
                if !check_tree(child, &trial, disjuncts, gs, universe)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// The chain conditions the construction relies on.
fn check_chain(
    sets: &[BTreeSet<Atom>],
    assigns: &[BTreeMap<Atom, Rational>],
    gs: &[Atom],
    last: &HornClause,
    m: usize,
) -> Result<(), DecideError> {
    for w in sets.windows(2) {
        if !w[0].is_subset(&w[1]) {
            return Err(violation("chain of bound sets is not increasing"));
        }
    }
    for (i, g) in gs.iter().enumerate() {
        if !sets[i + 1].contains(g) || sets[i].contains(g) {
            return Err(violation(format!("{g} is misplaced in the chain")));
        }
    }
    if !last.t_support.is_subset(&sets[m]) || eval(&last.s, &assigns[m]).is_zero() {
        return Err(violation("conclusion is not separated by the chain"));
    }
    for (set, c) in sets.iter().zip(assigns) {
        for (a, x) in c {
            if set.contains(a) != x.is_zero() || x.is_negative() {
                return Err(violation(format!("assignment does not match its set at {a}")));
            }
        }
    }
    Ok(())
}

/// Decides `phi` with `1` the constant one and variables nonnegative.
pub fn decide_with_one(phi: &Formula) -> Result<Verdict, DecideError> {
    engine::decide(phi, &Backend::WithOne, false)
}

/// Decides a Horn clause over nonnegative variables and the growth symbols of `ctx`.
pub fn decide_growth_horn(
    hyps: &[BigOAtom],
    concl: &BigOAtom,
    ctx: &GrowthContext,
) -> Result<Verdict, DecideError> {
    let phi = Formula::entailment(hyps, concl.clone().into());
    engine::decide(&phi, &Backend::Growth(ctx.clone()), false)
}

/// Decides `phi` over arbitrary functions, reading big-O eventually, with
/// the growth symbols of `ctx`.
pub fn decide_growth_qf(phi: &Formula, ctx: &GrowthContext) -> Result<Verdict, DecideError> {
    engine::decide(phi, &Backend::Growth(ctx.clone()), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, AtomShape};
    use crate::oracle::{self, Reading, Semantics};
    use crate::rational::{frac, int};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(i: i64) -> Term {
        Term::growth(int(i))
    }

    fn ctx(k: i64) -> GrowthContext {
        GrowthContext::new((1..=k).map(int).collect()).unwrap()
    }

    #[test]
    fn h_basis_examples() {
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(
            solve_h_basis(&id).unwrap(),
            vec![vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]]
        );
        let a = vec![vec![int(2), int(0)], vec![int(1), int(1)]];
        assert_eq!(
            solve_h_basis(&a).unwrap(),
            vec![vec![int(0), frac(1, 2), int(0)], vec![int(0), frac(-1, 2), int(1)]]
        );
        assert!(solve_h_basis(&[]).unwrap().is_empty());
        let singular = vec![vec![int(0)]];
        assert_eq!(solve_h_basis(&singular), Err(ScalesError::SingularSystem(1)));
    }

    #[test]
    fn indices_must_increase() {
        assert!(GrowthContext::new(vec![int(2), int(1)]).is_err());
        let c = GrowthContext::new(vec![frac(1, 2), int(3)]).unwrap();
        assert_eq!(c.position(&int(3)), Some(2));
        assert_eq!(c.position(&int(1)), None);
    }

    #[test]
    fn one_examples() {
        let f = Term::var("f");
        let phi = Formula::entailment(
            &[BigOAtom::big_o(f.clone(), Term::one())],
            BigOAtom::big_o(f.clone() + Term::one(), Term::one()).into(),
        );
        assert!(decide_with_one(&phi).unwrap().is_valid());

        let v = decide_with_one(&BigOAtom::big_o(Term::one(), f.clone()).into()).unwrap();
        let cx = v.counterexample().unwrap();
        assert_eq!(cx.at(&Atom::One, 0), vec![int(1), int(0)]);
        assert_eq!(cx.at(&Atom::var("f"), 0), vec![int(0), int(0)]);

        let v = decide_with_one(&BigOAtom::big_o(f, Term::one()).into()).unwrap();
        let cx = v.counterexample().unwrap();
        assert_eq!(cx.at(&Atom::One, 0), vec![int(1), int(0)]);
        let fx = cx.at(&Atom::var("f"), 0);
        assert!(fx[1].is_positive());
    }

    #[test]
    fn growth_examples() {
        let c = ctx(2);
        let sum = BigOAtom::big_o(g(1) + g(2), g(2));
        assert!(decide_growth_horn(&[], &sum, &c).unwrap().is_valid());

        let v = decide_growth_horn(&[], &BigOAtom::big_o(g(2), g(1)), &c).unwrap();
        let cx = v.counterexample().unwrap();
        assert_eq!(cx.basis_degree, 3);
        assert_eq!(cx.at(&Atom::Growth(int(1)), 0), vec![int(0), int(1), int(0), int(0)]);
        assert_eq!(cx.at(&Atom::Growth(int(2)), 0), vec![int(0), int(0), int(1), int(0)]);

        let f = Term::var("f");
        let phi_h = [BigOAtom::big_o(f.clone(), g(1))];
        assert!(decide_growth_horn(&phi_h, &BigOAtom::big_o(f, g(2)), &c).unwrap().is_valid());
    }

    #[test]
    fn growth_counterexample_places_variables() {
        let c = ctx(2);
        let f = Term::var("f");
        let hyps = [BigOAtom::big_o(f.clone(), g(2))];
        let v = decide_growth_horn(&hyps, &BigOAtom::big_o(f, g(1)), &c).unwrap();
        let cx = v.counterexample().unwrap();
        let fx = cx.at(&Atom::var("f"), 0);
        assert!(fx[2].is_positive());
        assert!(fx[3].is_zero());
    }

    #[test]
    fn case_split_entailment() {
        let c = ctx(2);
        let hyps = [BigOAtom::equation(Term::var("h") + g(1), g(2))];
        let goal = BigOAtom::big_o(g(1), Term::var("h"));
        let Verdict::Valid(cert) = decide_growth_horn(&hyps, &goal, &c).unwrap() else {
            panic!("expected valid")
        };
        let tree = &cert.proofs[0].tree;
        assert!(matches!(tree, ProofTree::Split { .. }));

        let phi = Formula::entailment(&hyps, goal.into());
        let backend = Backend::Growth(c.clone());
        assert!(engine::check_certificate(&phi, &backend, false, &cert).unwrap());

        let mut bad = cert.clone();
        if let ProofTree::Split { children, .. } = &mut bad.proofs[0].tree {
            children.pop();
        }
        assert!(!engine::check_certificate(&phi, &backend, false, &bad).unwrap());

        let mut bad = cert;
        if let ProofTree::Split { var, .. } = &mut bad.proofs[0].tree {
            *var = Atom::var("zz");
        }
        assert!(!engine::check_certificate(&phi, &backend, false, &bad).unwrap());
    }

    #[test]
    fn reduction_alone_is_not_enough() {
        // Without case splits this entailment would be refuted.
        let c = ctx(2);
        let hyps = [BigOAtom::equation(Term::var("h") + g(1), g(2))];
        let red = c.reduction(&BigOAtom::big_o(g(1), Term::var("h")));
        let mut all = c.ordering_hyps();
        all.extend(hyps.iter().cloned());
        let universe: BTreeSet<Atom> = [Atom::var("h"), Atom::growth(int(1)), Atom::growth(int(2))].into();
        assert!(first_valid(&all, &red, &universe).unwrap().is_none());
        let found = search_placements(&all, &red, &[Atom::var("h")], &c.symbols(), &universe).unwrap();
        assert!(matches!(found, Placement::Proved(_)));
    }

    fn one_as_var(t: &Term) -> Term {
        match t {
            Term::Zero => Term::Zero,
            Term::Atom(Atom::One) => Term::var("u"),
            Term::Atom(_) => t.clone(),
            Term::Add(a, b) => one_as_var(a) + one_as_var(b),
            Term::Sub(a, b) => one_as_var(a) - one_as_var(b),
            Term::Neg(a) => -one_as_var(a),
            Term::Scale(c, a) => Term::scale(c.clone(), one_as_var(a)),
            Term::Min(a, b) => Term::min(one_as_var(a), one_as_var(b)),
            Term::Max(a, b) => Term::max(one_as_var(a), one_as_var(b)),
            Term::Abs(a) => Term::abs(one_as_var(a)),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn one_is_a_nonvanishing_variable(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = AtomShape::core(3, 2).with_atoms([Atom::One]);
            let phi = gen::formula(&mut rng, &shape, 2);
            let verdict = decide_with_one(&phi).unwrap();
            let u_nonzero = Formula::not(BigOAtom::big_o(Term::var("u"), Term::Zero).into());
            let reduced = Formula::implies(u_nonzero, phi.map_atoms(&|a| a.map_terms(one_as_var)));
            prop_assert_eq!(verdict.is_valid(), crate::formula::decide_qf(&reduced).unwrap().is_valid());
            if let Verdict::Invalid(r) = verdict {
                let cx = &r.counterexample;
                for i in 0..cx.domain_size {
                    let one = cx.at(&Atom::One, i);
                    prop_assert_eq!(&one[0], &int(1));
                    prop_assert!(one[1..].iter().all(Zero::is_zero));
                }
                let sem = Semantics { nonnegative: true, ..Semantics::default() };
                prop_assert!(oracle::falsifies(&phi, cx, &sem).unwrap());
            }
        }

        #[test]
        fn growth_counterexamples_use_monomials(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = AtomShape::core(2, 2).with_atoms([Atom::growth(int(1)), Atom::growth(int(2))]);
            let (hyps, concl) = gen::horn(&mut rng, &shape, 3);
            let c = ctx(2);
            if let Verdict::Invalid(r) = decide_growth_horn(&hyps, &concl, &c).unwrap() {
                let cx = &r.counterexample;
                for i in 0..cx.domain_size {
                    for k in 1..=2 {
                        let g = cx.at(&Atom::growth(int(k as i64)), i);
                        prop_assert!(g.iter().enumerate().all(|(d, x)| *x == int((d == k) as i64)));
                    }
                }
                let sem = Semantics {
                    reading: Reading::Eventually,
                    nonnegative: true,
                    growth: vec![int(1), int(2)],
                };
                let phi = Formula::entailment(&hyps, concl.into());
                prop_assert!(oracle::falsifies(&phi, cx, &sem).unwrap());
            }
        }
    }
}
