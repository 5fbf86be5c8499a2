//! Disjunctions fail on larger domains: each disjunct gets its own
//! counterexample and the pieces are placed side by side.

use bigo::formula::{self, decide_qf};
use bigo::oracle::{self, Semantics};
use bigo::{BigOAtom, Formula, Term};

fn main() {
    let (f, g) = (Term::var("f"), Term::var("g"));
    let phi = Formula::or(
        BigOAtom::big_o(f.clone(), g.clone()).into(),
        BigOAtom::big_o(g, f).into(),
    );
    println!("{phi}");
    for c in formula::to_clauses(&phi) {
        println!("  clause {c}");
    }
    let verdict = decide_qf(&phi).unwrap();
    let cx = verdict.counterexample().expect("comparability is not valid");
    println!("  domain size {}", cx.domain_size);
    for (a, pts) in &cx.values {
        let pts: Vec<String> = pts.iter().map(|p| p[0].to_string()).collect();
        println!("  {a} = ({})", pts.join(", "));
    }
    let sem = Semantics {
        nonnegative: true,
        ..Semantics::default()
    };
    if let Formula::Or(p, q) = &phi {
        for d in [p, q] {
            println!("  {d} false: {}", oracle::falsifies(d, cx, &sem).unwrap());
        }
    }

    let negated = Formula::not(BigOAtom::big_o(Term::var("f"), Term::var("f")).into());
    println!("\n{negated}");
    for c in formula::to_clauses(&negated) {
        println!("  clause {c}");
    }
    println!("  valid: {}", decide_qf(&negated).unwrap().is_valid());
}
