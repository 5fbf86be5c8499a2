//! One line per acceptance criterion. Lines go straight to stderr so they
//! show up without `--nocapture`.

use std::io::Write;
use std::time::{Duration, Instant};

use bigo::engine::{self, Backend};
use bigo::formula::decide_qf;
use bigo::gen::{self, AtomShape};
use bigo::horn::{self, HornClause, Outcome};
use bigo::oracle::{self, FiniteAssignment, Profile, Reading, Semantics};
use bigo::problem::{parse_problem, Problem, Theory};
use bigo::rational::int;
use bigo::report;
use bigo::scales::{decide_growth_horn, decide_with_one, GrowthContext};
use bigo::selftest;
use bigo::signs::{decide_signed, Sign};
use bigo::{Atom, BigOAtom, Counterexample, Formula, Term, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;
const INTRO_LIMIT: Duration = Duration::from_millis(50);
const DUALITY_MATRICES: usize = 500;
const DUALITY_LIMIT: Duration = Duration::from_secs(10);
const HORN_FUZZ: usize = 1000;
const SEARCH_SAMPLES: usize = 2000;
const CORPUS: usize = 300;
const GROWTH_FUZZ: usize = 300;
const DENSE_INSTANCES: usize = 100;
const DENSE_LIMIT: Duration = Duration::from_secs(1);

type Report = Result<String, String>;
type Criterion = (&'static str, fn() -> Report);

fn v(n: &str) -> Term {
    Term::var(n)
}

fn g(i: i64) -> Term {
    Term::growth(int(i))
}

fn nonnegative() -> Semantics {
    Semantics {
        nonnegative: true,
        ..Semantics::default()
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

const INTRO: [&str; 2] = [
    "assume f + g = h + O(k)\nassume g + l = h + O(k)\nprove f = l + O(k)",
    "assume f + g = h + O(k)\nassume g = O(l)\nassume k = O(l)\nprove f = h + O(l)",
];

fn intro_entailments() -> Report {
    let mut slowest = Duration::ZERO;
    for theory in ["core", "signed"] {
        for (i, body) in INTRO.iter().enumerate() {
            let p = parse_problem(&format!("theory {theory}\n{body}")).map_err(|e| e.to_string())?;
            let (backend, signed) = p.backend();
            let start = Instant::now();
            let verdict = engine::decide(&p.formula(), &backend, signed).map_err(|e| e.to_string())?;
            let took = start.elapsed();
            slowest = slowest.max(took);
            ensure(verdict.is_valid(), || format!("entailment {} not valid in {theory}", i + 1))?;
            ensure(took < INTRO_LIMIT, || format!("entailment {} took {took:?} in {theory}", i + 1))?;
            let r = report::run(&p).map_err(|e| e.to_string())?;
            ensure(r.verified, || "report not verified".into())?;
        }
    }
    Ok(format!("4 decisions valid, slowest {:.2} ms", slowest.as_secs_f64() * 1e3))
}

fn axioms() -> Report {
    let checks = selftest::axiom_suite(SEED, 20);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    ensure(failed.is_empty(), || format!("failed: {}", failed.join(", ")))?;
    Ok(format!("{} instances valid with checked certificates", checks.len()))
}

fn separations() -> Report {
    let phi: Formula = BigOAtom::big_o(v("f"), v("f") + v("g")).into();
    ensure(decide_qf(&phi).unwrap().is_valid(), || "f = O(f + g) not valid in core".into())?;
    let Verdict::Invalid(r) = decide_signed(&phi).unwrap() else {
        return Err("f = O(f + g) valid in signed".into());
    };
    ensure(oracle::falsifies(&phi, &r.counterexample, &Semantics::default()).unwrap(), || {
        "signed counterexample does not falsify".into()
    })?;

    let worked = Formula::entailment(
        &[BigOAtom::equation(v("h"), v("f") + v("g"))],
        BigOAtom::big_o(v("f"), Term::abs(v("h"))).into(),
    );
    let Verdict::Invalid(r) = decide_signed(&worked).unwrap() else {
        return Err("worked example valid".into());
    };
    ensure(oracle::falsifies(&worked, &r.counterexample, &Semantics::default()).unwrap(), || {
        "worked counterexample does not falsify".into()
    })?;
    let sigma = r.branch.as_ref().ok_or("no branch")?;
    let signs = [Sign::Plus, Sign::Minus, Sign::Plus];
    ensure(
        ["f", "g", "h"].iter().zip(signs).all(|(n, s)| sigma.sign(&Atom::var(*n)) == s),
        || format!("failing branch is {sigma}"),
    )?;
    // Under its hypothesis the failing clause is `g + h = O(h)`.
    let target = BigOAtom::big_o(v("g") + v("h"), v("h"));
    let concl: Formula = r.clause.disjuncts[0].clone().into();
    let same = Formula::and(
        Formula::implies(concl.clone(), target.clone().into()),
        Formula::implies(target.clone().into(), concl),
    );
    let equivalent = Formula::entailment(&r.clause.hyps, same);
    ensure(decide_qf(&equivalent).unwrap().is_valid(), || format!("clause {} differs", r.clause))?;
    ensure(!decide_qf(&target.clone().into()).unwrap().is_valid(), || "target valid".into())?;
    Ok(format!("branch [{sigma}], clause {} ~ {target}", r.clause))
}

fn duality() -> Report {
    let start = Instant::now();
    let checks = selftest::duality_suite(SEED, DUALITY_MATRICES);
    let took = start.elapsed();
    let failed = checks.iter().filter(|c| !c.passed).count();
    ensure(failed == 0, || format!("{failed} matrices fail the alternative"))?;
    ensure(took < DUALITY_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("{} matrices in {:.2} s", checks.len(), took.as_secs_f64()))
}

fn finite(cx: &Counterexample) -> FiniteAssignment {
    FiniteAssignment {
        domain_size: cx.domain_size,
        values: cx
            .values
            .iter()
            .map(|(a, pts)| (a.clone(), pts.iter().map(|p| p[0].clone()).collect()))
            .collect(),
    }
}

fn horn_fuzz() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shape = AtomShape::core(5, 3);
    let (mut valid, mut invalid) = (0, 0);
    for i in 0..HORN_FUZZ {
        let (hyps, concl) = gen::horn(&mut rng, &shape, 4);
        let h = HornClause::from_atoms(&hyps, &concl).unwrap();
        match horn::decide(&h).map_err(|e| format!("#{i}: {e}"))? {
            Outcome::Valid(d) => {
                valid += 1;
                ensure(d.check(&h), || format!("#{i}: certificate fails"))?;
                let phi = Formula::entailment(&hyps, concl.into());
                let profile = Profile {
                    seed: SEED + i as u64,
                    ..Profile::default()
                };
                let found = oracle::random_search(&phi, SEARCH_SAMPLES, &profile);
                ensure(found.is_none(), || format!("#{i}: valid but falsified by {found:?}"))?;
            }
            Outcome::Invalid(cx) => {
                invalid += 1;
                let asg = finite(&cx);
                for a in &hyps {
                    ensure(oracle::holds_pointwise(a, &asg).unwrap(), || format!("#{i}: hypothesis {a} fails"))?;
                }
                ensure(!oracle::holds_pointwise(&concl, &asg).unwrap(), || format!("#{i}: conclusion holds"))?;
            }
        }
    }
    Ok(format!("{valid} valid, {invalid} invalid, 0 discrepancies"))
}

fn comparability() -> Report {
    let (a, b) = (BigOAtom::big_o(v("f"), v("g")), BigOAtom::big_o(v("g"), v("f")));
    let phi = Formula::or(a.clone().into(), b.clone().into());
    let verdict = decide_qf(&phi).unwrap();
    let cx = verdict.counterexample().ok_or("comparability decided valid")?;
    ensure(cx.domain_size == 2, || format!("domain size {}", cx.domain_size))?;
    for d in [a, b] {
        ensure(oracle::falsifies(&d.clone().into(), cx, &nonnegative()).unwrap(), || format!("{d} holds"))?;
    }
    Ok("invalid on two points, both disjuncts false".into())
}

fn reading_corpus() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shape = AtomShape::core(3, 2);
    let mut valid = 0;
    for i in 0..CORPUS {
        let p = Problem::new(Theory::Core, Vec::new(), gen::formula(&mut rng, &shape, 3));
        let mut verdicts = Vec::new();
        for reading in [Reading::Pointwise, Reading::Eventually] {
            let q = p.clone().with_reading(reading).unwrap();
            let r = report::run_seeded(&q, SEED + i as u64).map_err(|e| format!("#{i}: {e}"))?;
            verdicts.push(r.verdict);
        }
        ensure(verdicts[0] == verdicts[1], || format!("#{i}: readings disagree on\n{p}"))?;
        valid += (verdicts[0] == "valid") as usize;
    }
    Ok(format!("{CORPUS} formulas, {valid} valid, identical verdicts under both readings"))
}

fn one_as_var(t: &Term) -> Term {
    t.substitute(&|a| match a {
        Atom::One => v("u"),
        _ => Term::Atom(a.clone()),
    })
}

fn constant_one() -> Report {
    let f = v("f");
    let bounded = Formula::entailment(
        &[BigOAtom::big_o(f.clone(), Term::one())],
        BigOAtom::big_o(f.clone() + Term::one(), Term::one()).into(),
    );
    ensure(decide_with_one(&bounded).unwrap().is_valid(), || "f = O(1) -> f + 1 = O(1) invalid".into())?;
    let below: Formula = BigOAtom::big_o(Term::one(), f).into();
    let verdict = decide_with_one(&below).unwrap();
    let cx = verdict.counterexample().ok_or("1 = O(f) valid")?;
    ensure(cx.at(&Atom::One, 0) == vec![int(1), int(0)], || "1 is not the constant one".into())?;
    ensure(oracle::falsifies(&below, cx, &nonnegative()).unwrap(), || "1 = O(f) not falsified".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shape = AtomShape::core(3, 2).with_atoms([Atom::One]);
    for i in 0..CORPUS {
        let phi = gen::formula(&mut rng, &shape, 2);
        let direct = decide_with_one(&phi).unwrap().is_valid();
        let u_nonzero = Formula::not(BigOAtom::big_o(v("u"), Term::Zero).into());
        let reduced = Formula::implies(u_nonzero, phi.map_atoms(&|a| a.map_terms(one_as_var)));
        ensure(direct == decide_qf(&reduced).unwrap().is_valid(), || format!("#{i}: {phi}"))?;
    }
    Ok(format!("examples hold, {CORPUS} formulas agree with the reduction"))
}

fn growth() -> Report {
    let ctx = GrowthContext::new(vec![int(1), int(2)]).unwrap();
    ensure(
        decide_growth_horn(&[], &BigOAtom::big_o(g(1) + g(2), g(2)), &ctx).unwrap().is_valid(),
        || "g[1] + g[2] = O(g[2]) invalid".into(),
    )?;
    let order = BigOAtom::big_o(g(2), g(1));
    let verdict = decide_growth_horn(&[], &order, &ctx).unwrap();
    let cx = verdict.counterexample().ok_or("g[2] = O(g[1]) valid")?;
    let sem = Semantics {
        reading: Reading::Eventually,
        nonnegative: true,
        growth: vec![int(1), int(2)],
    };
    let deg = |a: Atom| cx.at(&a, 0).iter().rposition(|c| *c != int(0));
    ensure(deg(Atom::growth(int(1))) == Some(1) && deg(Atom::growth(int(2))) == Some(2), || {
        "growth symbols are not x and x^2".into()
    })?;
    ensure(oracle::falsifies(&order.clone().into(), cx, &sem).unwrap(), || "not falsified eventually".into())?;

    let ctx3 = GrowthContext::new(vec![int(1), int(2), int(3)]).unwrap();
    let sem3 = Semantics {
        growth: vec![int(1), int(2), int(3)],
        ..sem
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let shape = AtomShape::core(3, 2).with_atoms((1..=3).map(|i| Atom::growth(int(i))));
    let backend = Backend::Growth(ctx3.clone());
    let (mut valid, mut invalid) = (0, 0);
    for i in 0..GROWTH_FUZZ {
        let (hyps, concl) = gen::horn(&mut rng, &shape, 3);
        let phi = Formula::entailment(&hyps, concl.clone().into());
        match decide_growth_horn(&hyps, &concl, &ctx3).map_err(|e| format!("#{i}: {e}"))? {
            Verdict::Valid(cert) => {
                valid += 1;
                let ok = engine::check_certificate(&phi, &backend, false, &cert).unwrap();
                ensure(ok, || format!("#{i}: certificate fails"))?;
            }
            Verdict::Invalid(r) => {
                invalid += 1;
                let ok = oracle::falsifies(&phi, &r.counterexample, &sem3).unwrap();
                ensure(ok, || format!("#{i}: counterexample does not falsify"))?;
            }
        }
    }
    Ok(format!("examples hold, {GROWTH_FUZZ} clauses ({valid} valid, {invalid} invalid), no chain violations"))
}

fn dense() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let atoms = gen::variables(10);
    let mut slowest = Duration::ZERO;
    let mut valid = 0;
    for i in 0..DENSE_INSTANCES {
        let (hyps, concl) = gen::dense_horn(&mut rng, &atoms, 10, 3);
        let h = HornClause::from_atoms(&hyps, &concl).unwrap();
        let start = Instant::now();
        let outcome = horn::decide(&h).map_err(|e| format!("#{i}: {e}"))?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        valid += outcome.is_valid() as usize;
        ensure(took < DENSE_LIMIT, || format!("#{i} took {took:?}"))?;
    }
    Ok(format!("{DENSE_INSTANCES} instances ({valid} valid), slowest {:.1} ms", slowest.as_secs_f64() * 1e3))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("intro entailments", intro_entailments),
        ("axiom regression", axioms),
        ("signed separations", separations),
        ("duality alternative", duality),
        ("horn differential fuzz", horn_fuzz),
        ("amalgamation", comparability),
        ("pointwise vs eventually", reading_corpus),
        ("constant one", constant_one),
        ("growth scales", growth),
        ("dense performance", dense),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    writeln!(err).unwrap();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let line = match &result {
            Ok(detail) => format!("PASS {:>2} {name}: {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failed.push(i + 1);
                format!("FAIL {:>2} {name}: {detail} [{secs:.2} s]", i + 1)
            }
        };
        writeln!(err, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
