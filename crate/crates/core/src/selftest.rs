//! Built-in regression suites: the axioms of positive big O equations and
//! linear duality on random matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{self, Backend};
use crate::gen;
use crate::linalg::{self, CombinationWitness, KernelWitness, LinalgError};
use crate::rational::int;
use crate::terms::{BigOAtom, Formula, Term};
use crate::verdict::Verdict;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Values for the metavariables of the axiom schemes.
#[derive(Debug, Clone)]
pub struct Instance {
    pub f: Term,
    pub g: Term,
    pub h: Term,
    pub k: Term,
    pub f2: Term,
    pub g2: Term,
}

impl Instance {
    /// Each metavariable is the variable of the same name.
    pub fn plain() -> Self {
        let v = Term::var;
        Instance {
            f: v("f"),
            g: v("g"),
            h: v("h"),
            k: v("k"),
            f2: v("f2"),
            g2: v("g2"),
        }
    }

    /// Random nonnegative sums over `f, g, h`.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let vars = gen::variables(3);
        let mut t = || {
            let e = gen::linear(rng, &vars, 1, 3);
            Term::from_linear(&e)
        };
        Instance {
            f: t(),
            g: t(),
            h: t(),
            k: t(),
            f2: t(),
            g2: t(),
        }
    }
}

fn at(l: &Term, r: &Term, b: &Term) -> Formula {
    BigOAtom::new(l.clone(), r.clone(), b.clone()).into()
}

fn eq(l: Term, r: Term) -> Formula {
    BigOAtom::equation(l, r).into()
}

fn times(k: i64, t: &Term) -> Term {
    Term::sum((0..k).map(|_| t.clone()))
}

/// Every axiom scheme at `i`, with `6c` for `k = 1..=5`.
pub fn axiom_instances(i: &Instance) -> Vec<(String, Formula)> {
    let Instance { f, g, h, k, f2, g2 } = i;
    let z = Term::Zero;
    let mut out = vec![
        (
            "1".to_string(),
            Formula::and(
                Formula::implies(eq(f.clone(), g.clone()), at(f, g, &z)),
                Formula::implies(at(f, g, &z), eq(f.clone(), g.clone())),
            ),
        ),
        (
            "2 assoc".into(),
            eq(f.clone() + (g.clone() + h.clone()), (f.clone() + g.clone()) + h.clone()),
        ),
        ("2 comm".into(), eq(f.clone() + g.clone(), g.clone() + f.clone())),
        ("2 identity".into(), eq(f.clone() + Term::Zero, f.clone())),
        ("3 refl".into(), at(f, f, h)),
        ("3 symm".into(), Formula::implies(at(f, g, h), at(g, f, h))),
        (
            "3 trans".into(),
            Formula::implies(Formula::and(at(f, g, h), at(g, k, h)), at(f, k, h)),
        ),
        ("4".into(), at(f, &z, &(f.clone() + g.clone()))),
        (
            "5".into(),
            Formula::implies(Formula::and(at(f, g, h), at(h, &z, k)), at(f, g, k)),
        ),
        (
            "6a".into(),
            Formula::implies(
                Formula::and(at(f, g, h), at(f2, g2, h)),
                at(&(f.clone() + f2.clone()), &(g.clone() + g2.clone()), h),
            ),
        ),
        (
            "6b".into(),
            Formula::implies(
                Formula::and(at(&(f.clone() + f2.clone()), &(g.clone() + g2.clone()), h), at(f, g, h)),
                at(f2, g2, h),
            ),
        ),
    ];
    for n in 1..=5 {
        out.push((
            format!("6c k={n}"),
            Formula::implies(at(&times(n, f), &times(n, g), h), at(f, g, h)),
        ));
    }
    out
}

/// The consequences derived right after the axioms, with random weights
/// `1..=10` in the last two.
pub fn derived_facts<R: Rng>(rng: &mut R) -> Vec<(String, Formula)> {
    let v = Term::var;
    let z = Term::Zero;
    let fs: Vec<Term> = ["f", "g", "h", "k"].into_iter().map(v).collect();
    let weighted = Term::sum(fs.iter().map(|t| Term::scale(int(rng.gen_range(1..=10)), t.clone())));
    let plain = Term::sum(fs.iter().cloned());
    vec![
        (
            "f + g = O(h) -> f = O(h)".into(),
            Formula::implies(at(&(v("f") + v("g")), &z, &v("h")), at(&v("f"), &z, &v("h"))),
        ),
        (
            "strengthened linearity".into(),
            Formula::implies(
                Formula::and(at(&v("f"), &v("g"), &v("h")), at(&v("f2"), &v("g2"), &v("h2"))),
                at(&(v("f") + v("f2")), &(v("g") + v("g2")), &(v("h") + v("h2"))),
            ),
        ),
        (
            "O(k1 f1 + ...) in O(f1 + ...)".into(),
            at(&weighted, &z, &plain),
        ),
        (
            "O(f1 + ...) in O(k1 f1 + ...)".into(),
            at(&plain, &z, &weighted),
        ),
    ]
}

fn decide_core(name: &str, phi: &Formula) -> Check {
    match engine::decide(phi, &Backend::Core, false) {
        Ok(Verdict::Valid(cert)) => {
            let replayed = engine::check_certificate(phi, &Backend::Core, false, &cert) == Ok(true);
            Check::new(name, replayed, if replayed { "valid" } else { "certificate rejected" })
        }
        Ok(Verdict::Invalid(_)) => Check::new(name, false, format!("invalid: {phi}")),
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

/// Axiom schemes at the plain instance and `random` random instances, then
/// the derived facts.
pub fn axiom_suite(seed: u64, random: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Check> = axiom_instances(&Instance::plain())
        .iter()
        .map(|(n, phi)| decide_core(&format!("axiom {n}"), phi))
        .collect();
    for r in 0..random {
        let inst = Instance::random(&mut rng);
        for (n, phi) in axiom_instances(&inst) {
            out.push(decide_core(&format!("axiom {n} #{r}"), &phi));
        }
    }
    for (n, phi) in derived_facts(&mut rng) {
        out.push(decide_core(&n, &phi));
    }
    out
}

/// For every column exactly one side of the alternative has a witness, and
/// the witness checks.
pub fn duality_check(a: &linalg::Matrix) -> Result<bool, LinalgError> {
    for v in 0..a.cols() {
        let comb = linalg::positive_combination(a, v)?;
        let kern = linalg::kernel_witness(a, v)?;
        let ok = match (&comb, &kern) {
            (Some(w), None) => CombinationWitness::new(a, v, w.weights().to_vec()).is_some(),
            (None, Some(w)) => KernelWitness::new(a, v, w.values().to_vec()).is_some(),
            _ => false,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `count` random matrices with up to six rows and columns and entries in
/// `-5..=5`.
pub fn duality_suite(seed: u64, count: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let rows = rng.gen_range(1..=6);
            let cols = rng.gen_range(1..=6);
            let a = gen::matrix(&mut rng, rows, cols, 5);
            let name = format!("duality #{i} ({rows}x{cols})");
            match duality_check(&a) {
                Ok(ok) => Check::new(name, ok, if ok { "exclusive" } else { "both or neither" }),
                Err(e) => Check::new(name, false, e.to_string()),
            }
        })
        .collect()
}
