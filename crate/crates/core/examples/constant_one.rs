//! The constant function one as an atom.

use bigo::scales::decide_with_one;
use bigo::{Atom, BigOAtom, Formula, Term};

fn main() {
    let f = Term::var("f");
    let cases = [
        Formula::entailment(
            &[BigOAtom::big_o(f.clone(), Term::one())],
            BigOAtom::big_o(f.clone() + Term::one(), Term::one()).into(),
        ),
        BigOAtom::big_o(Term::one(), f.clone()).into(),
        BigOAtom::big_o(f.clone(), Term::one()).into(),
        Formula::implies(
            Formula::not(BigOAtom::big_o(f.clone(), Term::one()).into()),
            Formula::not(BigOAtom::big_o(f.clone(), Term::Zero).into()),
        ),
    ];
    for phi in &cases {
        let verdict = decide_with_one(phi).unwrap();
        println!("{phi}");
        match verdict.counterexample() {
            None => println!("  valid"),
            Some(cx) => {
                println!("  invalid, over the basis (1, x):");
                for (a, pts) in &cx.values {
                    let coeffs: Vec<String> = pts[0].iter().map(|c| c.to_string()).collect();
                    let pin = if *a == Atom::One { "  (fixed)" } else { "" };
                    println!("    {a} = [{}]{pin}", coeffs.join(", "));
                }
            }
        }
    }
}
