//! Where negative values change the answer: `f = O(f + g)` holds for
//! nonnegative functions and fails once `g` may cancel `f`.

use bigo::formula::decide_qf;
use bigo::signs::{self, decide_signed};
use bigo::{Atom, BigOAtom, Formula, Term, Verdict};

fn v(n: &str) -> Term {
    Term::var(n)
}

fn report(label: &str, verdict: &Verdict) {
    match verdict {
        Verdict::Valid(c) => println!("{label}: valid ({} obligations)", c.proofs.len()),
        Verdict::Invalid(r) => {
            let branch = r.branch.as_ref().map(|b| b.to_string()).unwrap_or_default();
            println!("{label}: invalid in branch [{branch}]");
            println!("  failing clause {}", r.clause);
            for (a, pts) in &r.counterexample.values {
                println!("  {a} = {}", pts[0][0]);
            }
        }
    }
}

fn main() {
    let phi: Formula = BigOAtom::big_o(v("f"), v("f") + v("g")).into();
    println!("{phi}");
    report("  nonnegative", &decide_qf(&phi).unwrap());
    report("  signed", &decide_signed(&phi).unwrap());

    let worked = Formula::entailment(
        &[BigOAtom::equation(v("h"), v("f") + v("g"))],
        BigOAtom::big_o(v("f"), Term::abs(v("h"))).into(),
    );
    println!("\n{worked}");
    let (extracted, defs) = signs::extract_abs(&worked);
    for d in &defs {
        println!("  {} names {}", d.fresh, d.body);
    }
    println!("  extracted {extracted}");
    let verdict = decide_signed(&worked).unwrap();
    report("  signed", &verdict);
    if let Some(cx) = verdict.counterexample() {
        let (f, g) = (cx.value(&Atom::var("f"), 0), cx.value(&Atom::var("g"), 0));
        println!("  g = -f: {}", g == -f);
    }
}
