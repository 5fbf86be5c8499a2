//! The two opening entailments, decided as Horn clauses with their
//! saturation traces and certificates.

use std::time::Instant;

use bigo::horn::{self, HornClause, Outcome};
use bigo::{BigOAtom, Term};

fn v(n: &str) -> Term {
    Term::var(n)
}

fn show(name: &str, hyps: &[BigOAtom], concl: BigOAtom) {
    let h = HornClause::from_atoms(hyps, &concl).expect("linear atoms");
    let start = Instant::now();
    let outcome = horn::decide(&h).expect("decidable");
    let took = start.elapsed();
    println!("{name}");
    for a in hyps {
        println!("  assume {a}");
    }
    println!("  prove  {concl}");
    match outcome {
        Outcome::Valid(d) => {
            for (i, step) in d.trace.iter().enumerate() {
                let added: Vec<String> = step.added.iter().map(|a| a.to_string()).collect();
                println!("  step {i}: adds {{{}}}", added.join(", "));
            }
            let final_set: Vec<String> = d.final_set.iter().map(|a| a.to_string()).collect();
            let coeffs: Vec<String> = d.coefficients.iter().map(|c| c.to_string()).collect();
            println!("  bound set {{{}}}", final_set.join(", "));
            println!("  valid: combination ({}), checks {}", coeffs.join(", "), d.check(&h));
        }
        Outcome::Invalid(cx) => println!("  invalid: {cx:?}"),
    }
    println!("  {:.3} ms\n", took.as_secs_f64() * 1e3);
}

fn main() {
    show(
        "first entailment",
        &[
            BigOAtom::new(v("f") + v("g"), v("h"), v("k")),
            BigOAtom::new(v("g") + v("l"), v("h"), v("k")),
        ],
        BigOAtom::new(v("f"), v("l"), v("k")),
    );
    show(
        "second entailment",
        &[
            BigOAtom::new(v("f") + v("g"), v("h"), v("k")),
            BigOAtom::big_o(v("g"), v("l")),
            BigOAtom::big_o(v("k"), v("l")),
        ],
        BigOAtom::new(v("f"), v("h"), v("l")),
    );
    show(
        "absorbing a summand",
        &[BigOAtom::big_o(v("f") + v("g"), v("h"))],
        BigOAtom::big_o(v("f"), v("h")),
    );
}
