//! Verdicts, certificates, and counterexamples shared by every theory.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::formula::ImplicativeClause;
use crate::rational::Rational;
use crate::signs::SignAssignment;
use crate::terms::Atom;

/// One growth of the bound set during saturation: the hypothesis weights
/// (over the active rows, in hypothesis order) whose combination is
/// nonnegative outside the set and positive on every added atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub added: Vec<Atom>,
    pub weights: Vec<Rational>,
}

/// Proof of a single Horn clause: the saturation trace and the weights
/// reconstructing the reduced conclusion from the final active rows.
/// An empty coefficient vector stands for the zero combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub coefficients: Vec<Rational>,
    pub final_set: BTreeSet<Atom>,
    pub trace: Vec<Step>,
}

/// Horn derivations below case splits on where variables sit among the
/// growth symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofTree {
    /// Disjunct `disjunct` follows from the hypotheses and the levels chosen
    /// on the way down.
    Leaf { disjunct: usize, derivation: Derivation },
    /// One subtree per level of `var`, lowest first. At level `i` the
    /// variable is above the first `i` growth symbols and below the rest.
    Split { var: Atom, children: Vec<ProofTree> },
}

impl ProofTree {
    pub fn leaf(disjunct: usize, derivation: Derivation) -> Self {
        ProofTree::Leaf { disjunct, derivation }
    }

    pub fn leaves(&self) -> usize {
        match self {
            ProofTree::Leaf { .. } => 1,
            ProofTree::Split { children, .. } => children.iter().map(ProofTree::leaves).sum(),
        }
    }
}

/// Discharges obligation `obligation` through its disjunct `disjunct`.
///
/// Without growth symbols `disjunct` indexes the augmented clause and the
/// tree is a single leaf for it. With growth symbols `disjunct` indexes the
/// clause as split, and leaves index its reduction `g_1 = O(0), ...,
/// g_k = O(g_(k-1)), d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub obligation: usize,
    pub disjunct: usize,
    pub tree: ProofTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub proofs: Vec<Proof>,
}

/// Interpretation of atoms on a finite set of points.
///
/// At each point an atom's value is a polynomial in `x` given by
/// `basis_degree + 1` coefficients (constant term first). With degree zero
/// the functions are plain values on `{1, ..., domain_size}`; otherwise each
/// point is a copy of the integers `x >= x0` for large enough `x0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub domain_size: usize,
    pub basis_degree: usize,
    pub values: BTreeMap<Atom, Vec<Vec<Rational>>>,
    /// Per-disjunct single-point counterexamples, when reported separately.
    pub components: Option<Vec<Counterexample>>,
}

impl Counterexample {
    /// Constant values on a one-point domain.
    pub fn singleton(values: BTreeMap<Atom, Rational>) -> Self {
        Counterexample {
            domain_size: 1,
            basis_degree: 0,
            values: values.into_iter().map(|(a, v)| (a, vec![vec![v]])).collect(),
            components: None,
        }
    }

    /// One polynomial per atom on a one-point domain.
    pub fn polynomial(basis_degree: usize, values: BTreeMap<Atom, Vec<Rational>>) -> Self {
        Counterexample {
            domain_size: 1,
            basis_degree,
            values: values
                .into_iter()
                .map(|(a, mut p)| {
                    p.resize(basis_degree + 1, Rational::zero());
                    (a, vec![p])
                })
                .collect(),
            components: None,
        }
    }

    /// Coefficients of `atom` at `point`; zero when unassigned.
    pub fn at(&self, atom: &Atom, point: usize) -> Vec<Rational> {
        self.values
            .get(atom)
            .map(|v| v[point].clone())
            .unwrap_or_else(|| vec![Rational::zero(); self.basis_degree + 1])
    }

    /// Constant value of a degree-zero counterexample at `point`.
    pub fn value(&self, atom: &Atom, point: usize) -> Rational {
        self.at(atom, point)[0].clone()
    }

    /// Raises the basis degree by padding with zero coefficients.
    pub fn with_degree(mut self, degree: usize) -> Self {
        assert!(degree >= self.basis_degree);
        for points in self.values.values_mut() {
            for p in points.iter_mut() {
                p.resize(degree + 1, Rational::zero());
            }
        }
        self.basis_degree = degree;
        self
    }

    /// Assigns `default` to every atom of `atoms` not yet assigned.
    pub fn fill(&mut self, atoms: &BTreeSet<Atom>, default: impl Fn(&Atom) -> Vec<Rational>) {
        for a in atoms {
            if !self.values.contains_key(a) {
                let mut p = default(a);
                p.resize(self.basis_degree + 1, Rational::zero());
                self.values.insert(a.clone(), vec![p; self.domain_size]);
            }
        }
    }

    /// Drops internally generated variables.
    pub fn without_fresh(mut self) -> Self {
        self.values.retain(|a, _| !a.is_fresh());
        if let Some(cs) = self.components.take() {
            self.components = Some(cs.into_iter().map(Counterexample::without_fresh).collect());
        }
        self
    }
}

/// Why a formula is invalid: the counterexample plus the obligation that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub counterexample: Counterexample,
    pub obligation: usize,
    /// The failing clause, over nonnegative variables.
    pub clause: ImplicativeClause,
    pub branch: Option<SignAssignment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid(Certificate),
    Invalid(Box<Refutation>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Valid(_) => None,
            Verdict::Invalid(r) => Some(&r.counterexample),
        }
    }
}
