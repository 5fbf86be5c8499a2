//! Running problems and serializing verdicts.
//!
//! A [`VerdictReport`] is what the command line prints. Counterexamples are
//! always re-checked by the [`oracle`](crate::oracle) before they are
//! reported, and [`verify`] re-checks a report read back from JSON.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, DecideError};
use crate::formula::{self, ImplicativeClause};
use crate::oracle::{self, OracleError, Profile, Semantics};
use crate::problem::{parse_atom_name, Problem, Theory};
use crate::rational::{self, Rational};
use crate::terms::{Atom, Formula};
use crate::verdict::{Certificate, Counterexample, Derivation, Proof, ProofTree, Step, Verdict};

/// Samples tried against every valid verdict.
pub const SEARCH_BUDGET: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("refusing to report: {0}")]
    Unverified(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub added: Vec<String>,
    pub weights: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeReport {
    Leaf {
        disjunct: usize,
        coefficients: Vec<String>,
        final_set: Vec<String>,
        trace: Vec<StepReport>,
    },
    Split {
        var: String,
        children: Vec<TreeReport>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofReport {
    pub obligation: usize,
    /// Sign branch, as `f+ g-`, in the signed theories.
    pub branch: Option<String>,
    pub disjunct: usize,
    pub tree: TreeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub proofs: Vec<ProofReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub domain_size: usize,
    /// Labels of the polynomial basis, `1, x, x^2, ...`.
    pub basis: Vec<String>,
    /// Per atom, per point, the coefficients over `basis`.
    pub values: BTreeMap<String, Vec<Vec<String>>>,
    pub components: Option<Vec<CounterexampleReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: String,
    pub certificate: Option<CertificateReport>,
    pub counterexample: Option<CounterexampleReport>,
    pub verified: bool,
    pub ms: f64,
}

impl VerdictReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == "valid"
    }

    /// Pretty JSON, one key per line.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational::format).collect()
}

fn names<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Vec<String> {
    atoms.into_iter().map(Atom::to_string).collect()
}

pub fn basis_labels(degree: usize) -> Vec<String> {
    (0..=degree)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        })
        .collect()
}

pub fn certificate_report(cert: &Certificate, branches: &[Option<String>]) -> CertificateReport {
    CertificateReport {
        proofs: cert
            .proofs
            .iter()
            .map(|p| ProofReport {
                obligation: p.obligation,
                branch: branches.get(p.obligation).cloned().flatten(),
                disjunct: p.disjunct,
                tree: tree_report(&p.tree),
            })
            .collect(),
    }
}

fn tree_report(t: &ProofTree) -> TreeReport {
    match t {
        ProofTree::Leaf { disjunct, derivation } => TreeReport::Leaf {
            disjunct: *disjunct,
            coefficients: strings(&derivation.coefficients),
            final_set: names(&derivation.final_set),
            trace: derivation
                .trace
                .iter()
                .map(|s| StepReport {
                    added: names(&s.added),
                    weights: strings(&s.weights),
                })
                .collect(),
        },
        ProofTree::Split { var, children } => TreeReport::Split {
            var: var.to_string(),
            children: children.iter().map(tree_report).collect(),
        },
    }
}

fn parse_tree(t: &TreeReport) -> Option<ProofTree> {
    Some(match t {
        TreeReport::Leaf {
            disjunct,
            coefficients,
            final_set,
            trace,
        } => {
            let mut steps = Vec::with_capacity(trace.len());
            for s in trace {
                steps.push(Step {
                    added: parse_atoms(&s.added)?,
                    weights: parse_rationals(&s.weights)?,
                });
            }
            ProofTree::leaf(
                *disjunct,
                Derivation {
                    coefficients: parse_rationals(coefficients)?,
                    final_set: parse_atoms(final_set)?.into_iter().collect(),
                    trace: steps,
                },
            )
        }
        TreeReport::Split { var, children } => ProofTree::Split {
            var: parse_atom_name(var)?,
            children: children.iter().map(parse_tree).collect::<Option<_>>()?,
        },
    })
}

pub fn counterexample_report(cx: &Counterexample) -> CounterexampleReport {
    CounterexampleReport {
        domain_size: cx.domain_size,
        basis: basis_labels(cx.basis_degree),
        values: cx
            .values
            .iter()
            .map(|(a, pts)| (a.to_string(), pts.iter().map(|p| strings(p)).collect()))
            .collect(),
        components: cx
            .components
            .as_ref()
            .map(|cs| cs.iter().map(counterexample_report).collect()),
    }
}

fn parse_rationals(v: &[String]) -> Option<Vec<Rational>> {
    v.iter().map(|s| rational::parse(s)).collect()
}

fn parse_atoms(v: &[String]) -> Option<Vec<Atom>> {
    v.iter().map(|s| parse_atom_name(s)).collect()
}

/// Inverse of [`certificate_report`]; `None` on malformed entries.
pub fn parse_certificate(r: &CertificateReport) -> Option<Certificate> {
    let mut proofs = Vec::with_capacity(r.proofs.len());
    for p in &r.proofs {
        proofs.push(Proof {
            obligation: p.obligation,
            disjunct: p.disjunct,
            tree: parse_tree(&p.tree)?,
        });
    }
    Some(Certificate { proofs })
}

/// Inverse of [`counterexample_report`]; `None` on malformed entries.
pub fn parse_counterexample(r: &CounterexampleReport) -> Option<Counterexample> {
    if r.basis != basis_labels(r.basis.len().checked_sub(1)?) {
        return None;
    }
    let mut values = BTreeMap::new();
    for (name, pts) in &r.values {
        if pts.len() != r.domain_size {
            return None;
        }
        let pts: Option<Vec<Vec<Rational>>> = pts
            .iter()
            .map(|p| (p.len() == r.basis.len()).then(|| parse_rationals(p)).flatten())
            .collect();
        values.insert(parse_atom_name(name)?, pts?);
    }
    let components = match &r.components {
        Some(cs) => Some(cs.iter().map(parse_counterexample).collect::<Option<Vec<_>>>()?),
        None => None,
    };
    Some(Counterexample {
        domain_size: r.domain_size,
        basis_degree: r.basis.len() - 1,
        values,
        components,
    })
}

/// Whether `cx` falsifies `phi`, and each component falsifies the matching
/// disjunct of one CNF clause of `phi` while satisfying its hypotheses.
pub fn counterexample_holds(
    phi: &Formula,
    cx: &Counterexample,
    sem: &Semantics,
) -> Result<bool, OracleError> {
    if !oracle::falsifies(phi, cx, sem)? {
        return Ok(false);
    }
    let Some(components) = &cx.components else {
        return Ok(true);
    };
    let component_fails = |c: &ImplicativeClause, j: usize, part: &Counterexample| {
        let d = &c.disjuncts[j];
        if *d != formula::bottom() {
            return oracle::falsifies(&Formula::entailment(&c.hyps, d.clone().into()), part, sem);
        }
        for h in &c.hyps {
            if !oracle::satisfies(&h.clone().into(), part, sem)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    for clause in formula::to_clauses(phi) {
        if clause.disjuncts.len() != components.len() {
            continue;
        }
        let mut all = true;
        for (j, part) in components.iter().enumerate() {
            if !component_fails(&clause, j, part)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

fn search_profile(problem: &Problem, seed: u64) -> Profile {
    Profile {
        domain_size: 1,
        max_value: 4,
        nonnegative: problem.theory == Theory::Core,
        seed,
    }
}

/// [`run_seeded`] with the default seed.
pub fn run(problem: &Problem) -> Result<VerdictReport, RunError> {
    run_seeded(problem, Profile::default().seed)
}

/// Decides `problem` and checks the outcome: certificates are replayed, a
/// valid verdict must survive a seeded random search, and a counterexample
/// must pass the oracle. Anything unverified is an error.
pub fn run_seeded(problem: &Problem, seed: u64) -> Result<VerdictReport, RunError> {
    let start = Instant::now();
    let phi = problem.formula();
    let (backend, signed) = problem.backend();
    let verdict = engine::decide(&phi, &backend, signed)?;
    let sem = problem.semantics();
    let report = match &verdict {
        Verdict::Valid(cert) => {
            if !engine::check_certificate(&phi, &backend, signed, cert)? {
                return Err(RunError::Unverified("certificate does not replay".into()));
            }
            if let Some(asg) = oracle::random_search(&phi, SEARCH_BUDGET, &search_profile(problem, seed)) {
                return Err(RunError::Unverified(format!(
                    "valid verdict contradicted by sampled values {:?}",
                    asg.values
                        .iter()
                        .map(|(a, v)| (a.to_string(), strings(v)))
                        .collect::<Vec<_>>()
                )));
            }
            let branches: Vec<Option<String>> = engine::obligations(&phi, &backend, signed)?
                .iter()
                .map(|ob| ob.branch.as_ref().map(ToString::to_string))
                .collect();
            VerdictReport {
                verdict: "valid".into(),
                certificate: Some(certificate_report(cert, &branches)),
                counterexample: None,
                verified: true,
                ms: 0.0,
            }
        }
        Verdict::Invalid(r) => {
            if !counterexample_holds(&phi, &r.counterexample, &sem)? {
                return Err(RunError::Unverified("counterexample fails the oracle".into()));
            }
            VerdictReport {
                verdict: "invalid".into(),
                certificate: None,
                counterexample: Some(counterexample_report(&r.counterexample)),
                verified: true,
                ms: 0.0,
            }
        }
    };
    let ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(VerdictReport {
        ms: (ms * 1000.0).round() / 1000.0,
        ..report
    })
}

/// Re-checks a report independently of how it was produced.
pub fn verify(report: &VerdictReport, problem: &Problem) -> bool {
    let phi = problem.formula();
    match (report.verdict.as_str(), &report.certificate, &report.counterexample) {
        ("valid", Some(c), None) => {
            let (backend, signed) = problem.backend();
            parse_certificate(c)
                .map(|cert| engine::check_certificate(&phi, &backend, signed, &cert) == Ok(true))
                .unwrap_or(false)
        }
        ("invalid", None, Some(c)) => parse_counterexample(c)
            .map(|cx| counterexample_holds(&phi, &cx, &problem.semantics()) == Ok(true))
            .unwrap_or(false),
        _ => false,
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    const INTRO: &str =
        "theory core\nassume f + g = h + O(k)\nassume g + l = h + O(k)\nprove f = l + O(k)";

    #[test]
    fn intro_is_valid_and_verifies() {
        let p = parse_problem(INTRO).unwrap();
        let r = run(&p).unwrap();
        assert!(r.is_valid() && r.verified);
        assert!(verify(&r, &p));
        let back = VerdictReport::from_json(&r.to_json()).unwrap();
        assert!(verify(&back, &p));
    }

    #[test]
    fn signed_counterexample_negates() {
        let p = parse_problem("theory signed\nprove f = O(f + g)").unwrap();
        let r = run(&p).unwrap();
        assert_eq!(r.verdict, "invalid");
        let cx = r.counterexample.as_ref().unwrap();
        let f = &cx.values["f"][0][0];
        let g = &cx.values["g"][0][0];
        assert_eq!(rational::parse(f).unwrap(), -rational::parse(g).unwrap());
        assert!(verify(&r, &p));
    }

    #[test]
    fn growth_counterexample_is_polynomial() {
        let p = parse_problem("theory growth\ngrowth 1 2\nprove g[2] = O(g[1])").unwrap();
        let r = run(&p).unwrap();
        assert_eq!(r.verdict, "invalid");
        let cx = r.counterexample.as_ref().unwrap();
        assert_eq!(cx.values["g[1]"][0], vec!["0", "1", "0", "0"]);
        assert_eq!(cx.values["g[2]"][0], vec!["0", "0", "1", "0"]);
        assert!(verify(&r, &p));
    }

    #[test]
    fn tampering_is_detected() {
        let p = parse_problem("theory core\nprove f = O(g)").unwrap();
        let mut r = run(&p).unwrap();
        for pts in r.counterexample.as_mut().unwrap().values.values_mut() {
            pts[0][0] = "0".into();
        }
        assert!(!verify(&r, &p));

        let p = parse_problem(INTRO).unwrap();
        let mut r = run(&p).unwrap();
        let proof = &mut r.certificate.as_mut().unwrap().proofs[0];
        let TreeReport::Leaf { coefficients, .. } = &mut proof.tree else { panic!() };
        coefficients[0] = "7/3".into();
        assert!(!verify(&r, &p));
    }

    #[test]
    fn json_is_stable_apart_from_timing() {
        let p = parse_problem("theory signed\nprove f = O(f + g) | g = O(f)").unwrap();
        let mut a = run(&p).unwrap();
        let mut b = run(&p).unwrap();
        a.ms = 0.0;
        b.ms = 0.0;
        assert_eq!(a.to_json(), b.to_json());
    }
}
