//! The decision pipeline shared by every theory.
//!
//! A formula is split into CNF clauses. In the signed setting each clause is
//! further split into sign branches over nonnegative variables. Each
//! resulting obligation is augmented by its backend (extra hypotheses and
//! disjuncts for the constant one or for growth symbols) and is valid when
//! one of its Horn clauses is; with growth symbols, when one is under every
//! placement of the variables among them. The first obligation that fails
//! yields the counterexample.

use std::collections::BTreeSet;

use num_traits::Signed;
use thiserror::Error;

use crate::formula::{self, FormulaError, ImplicativeClause};
use crate::horn::{self, HornClause, HornError, Outcome};
use crate::scales::{self, GrowthContext, Placement, ScalesError};
use crate::signs::{self, SignAssignment};
use crate::terms::{self, Atom, BigOAtom, Formula, TermError};
use crate::verdict::{Certificate, Counterexample, Proof, ProofTree, Refutation, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Horn(#[from] HornError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Scales(#[from] ScalesError),
    #[error("bound of `{0}` has a negative coefficient; nonnegative variables need nonnegative bounds")]
    NegativeBound(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    /// Plain variables.
    Core,
    /// `1` is the constant function one.
    WithOne,
    /// `g[q]` are functions of strictly increasing growth.
    Growth(GrowthContext),
}

impl Backend {
    fn augment(&self, base: &ImplicativeClause) -> ImplicativeClause {
        let mut out = base.clone();
        match self {
            Backend::Core => {}
            Backend::WithOne => out.disjuncts.push(scales::one_vanishes()),
            Backend::Growth(ctx) => {
                out.hyps.extend(ctx.ordering_hyps());
                out.disjuncts.extend(ctx.collapse_disjuncts());
            }
        }
        out
    }

    fn counterexample(&self, ob: &Obligation) -> Result<Counterexample, DecideError> {
        let hyps = &ob.augmented.hyps;
        let mut parts = Vec::with_capacity(ob.base.disjuncts.len());
        for d in &ob.base.disjuncts {
            let cx = match self {
                Backend::Core => {
                    let h = HornClause::from_atoms(hyps, d)?.with_universe(ob.universe.clone());
                    match horn::decide(&h)? {
                        Outcome::Invalid(cx) => cx,
                        Outcome::Valid(_) => {
                            return Err(HornError::InternalInvariantViolation(format!(
                                "disjunct `{d}` became valid"
                            ))
                            .into())
                        }
                    }
                }
                Backend::WithOne => scales::with_one_counterexample(&ob.base.hyps, d, &ob.universe)?,
                Backend::Growth(ctx) => {
                    scales::growth_counterexample(&ob.base.hyps, d, ctx, &ob.universe)?
                }
            };
            parts.push(cx);
        }
        let mut cx = formula::amalgamate(&parts)?;
        if let Backend::Growth(_) = self {
            cx.components = Some(parts);
        }
        Ok(cx)
    }
}

/// One clause, in one sign branch, ready for the Horn procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub clause_index: usize,
    /// The CNF clause as written.
    pub clause: ImplicativeClause,
    pub branch: Option<SignAssignment>,
    /// Linear clause over nonnegative variables.
    pub base: ImplicativeClause,
    /// `base` with the backend's hypotheses and disjuncts.
    pub augmented: ImplicativeClause,
    /// Atoms a counterexample must assign.
    pub universe: BTreeSet<Atom>,
}

impl Obligation {
    pub fn horn_clause(&self, disjunct: usize) -> Result<HornClause, TermError> {
        Ok(HornClause::from_atoms(&self.augmented.hyps, &self.augmented.disjuncts[disjunct])?
            .with_universe(self.universe.clone()))
    }
}

fn check_bound(a: &BigOAtom) -> Result<(), DecideError> {
    let b = terms::linearize(&a.bound)?;
    if b.iter().any(|(_, c)| c.is_negative()) {
        return Err(DecideError::NegativeBound(a.to_string()));
    }
    Ok(())
}

pub fn obligations(
    phi: &Formula,
    backend: &Backend,
    signed: bool,
) -> Result<Vec<Obligation>, DecideError> {
    let formula_atoms = phi.atoms();
    let mut out = Vec::new();
    for (clause_index, clause) in formula::to_clauses(phi).into_iter().enumerate() {
        let bases: Vec<(Option<SignAssignment>, ImplicativeClause)> = if signed {
            let (extracted, _) = signs::extract_clause(&clause);
            signs::branches(&extracted)?
                .into_iter()
                .map(|(s, c)| (Some(s), c))
                .collect()
        } else {
            for a in clause.hyps.iter().chain(&clause.disjuncts) {
                terms::reduce_atom(a)?;
                check_bound(a)?;
            }
            vec![(None, clause.clone())]
        };
        for (branch, base) in bases {
            let augmented = backend.augment(&base);
            let mut universe = formula_atoms.clone();
            for a in augmented.hyps.iter().chain(&augmented.disjuncts) {
                a.collect_atoms(&mut universe);
            }
            out.push(Obligation {
                clause_index,
                clause: clause.clone(),
                branch,
                base,
                augmented,
                universe,
            });
        }
    }
    Ok(out)
}

fn universe_vars(ob: &Obligation) -> Vec<Atom> {
    ob.universe.iter().filter(|a| a.is_var()).cloned().collect()
}

/// First provable disjunct, with its proof. See [`Proof`] for what the
/// index refers to.
pub fn prove(ob: &Obligation, backend: &Backend) -> Result<Option<(usize, ProofTree)>, DecideError> {
    if let Backend::Growth(ctx) = backend {
        let (gs, vars) = (ctx.symbols(), universe_vars(ob));
        for (j, d) in ob.base.disjuncts.iter().enumerate() {
            let reduction = ctx.reduction(d);
            let found = scales::search_placements(&ob.augmented.hyps, &reduction, &vars, &gs, &ob.universe)?;
            if let Placement::Proved(tree) = found {
                return Ok(Some((j, tree)));
            }
        }
        return Ok(None);
    }
    for j in 0..ob.augmented.disjuncts.len() {
        if let Some(d) = horn::prove(&ob.horn_clause(j)?) {
            return Ok(Some((j, ProofTree::leaf(j, d))));
        }
    }
    Ok(None)
}

/// Counterexample to a failed obligation, over the original variables.
pub fn refute(
    ob: &Obligation,
    index: usize,
    backend: &Backend,
) -> Result<Refutation, DecideError> {
    let mut cx = backend.counterexample(ob)?;
    if let Some(sigma) = &ob.branch {
        cx = sigma.map_back(cx);
    }
    Ok(Refutation {
        counterexample: cx.without_fresh(),
        obligation: index,
        clause: ob.base.clone(),
        branch: ob.branch.clone(),
    })
}

pub fn decide(phi: &Formula, backend: &Backend, signed: bool) -> Result<Verdict, DecideError> {
    let mut proofs = Vec::new();
    for (index, ob) in obligations(phi, backend, signed)?.iter().enumerate() {
        match prove(ob, backend)? {
            Some((disjunct, tree)) => proofs.push(Proof {
                obligation: index,
                disjunct,
                tree,
            }),
            None => return Ok(Verdict::Invalid(Box::new(refute(ob, index, backend)?))),
        }
    }
    Ok(Verdict::Valid(Certificate { proofs }))
}

/// Checks that `cert` discharges every obligation of `phi`.
pub fn check_certificate(
    phi: &Formula,
    backend: &Backend,
    signed: bool,
    cert: &Certificate,
) -> Result<bool, DecideError> {
    let obs = obligations(phi, backend, signed)?;
    if cert.proofs.len() != obs.len() {
        return Ok(false);
    }
    for (i, (ob, p)) in obs.iter().zip(&cert.proofs).enumerate() {
        if p.obligation != i {
            return Ok(false);
        }
        let ok = match (backend, &p.tree) {
            (Backend::Growth(ctx), tree) => match ob.base.disjuncts.get(p.disjunct) {
                Some(d) => scales::check_tree(
                    tree,
                    &ob.augmented.hyps,
                    &ctx.reduction(d),
                    &ctx.symbols(),
                    &ob.universe,
                )?,
                None => false,
            },
            (_, ProofTree::Leaf { disjunct, derivation }) => {
                *disjunct == p.disjunct
                    && p.disjunct < ob.augmented.disjuncts.len()
                    && derivation.check(&ob.horn_clause(p.disjunct)?)
            }
            _ => false,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::Term;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn negative_bound_is_rejected_without_signs() {
        let phi: Formula = BigOAtom::big_o(v("f"), v("f") - v("g")).into();
        assert!(matches!(
            decide(&phi, &Backend::Core, false),
            Err(DecideError::NegativeBound(_))
        ));
        assert!(decide(&phi, &Backend::Core, true).is_ok());
    }

    #[test]
    fn certificates_round_trip() {
        let phi = Formula::entailment(
            &[BigOAtom::big_o(v("f"), v("h")), BigOAtom::big_o(v("g"), v("h"))],
            BigOAtom::big_o(v("f") + v("g"), v("h")).into(),
        );
        for signed in [false, true] {
            let Verdict::Valid(cert) = decide(&phi, &Backend::Core, signed).unwrap() else {
                panic!()
            };
            assert!(check_certificate(&phi, &Backend::Core, signed, &cert).unwrap());
            let mut bad = cert.clone();
            bad.proofs.pop();
            assert!(!check_certificate(&phi, &Backend::Core, signed, &bad).unwrap());
        }
    }
}
