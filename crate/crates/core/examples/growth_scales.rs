//! Symbols of strictly increasing growth, read eventually. Counterexamples
//! are polynomials with `g[i]` interpreted as `x^i`.

use bigo::rational::int;
use bigo::scales::{decide_growth_horn, GrowthContext};
use bigo::verdict::ProofTree;
use bigo::{BigOAtom, Term, Verdict};

fn g(i: i64) -> Term {
    Term::growth(int(i))
}

fn outline(t: &ProofTree, depth: usize) {
    let pad = "  ".repeat(depth + 2);
    match t {
        ProofTree::Leaf { disjunct, .. } => println!("{pad}disjunct {disjunct}"),
        ProofTree::Split { var, children } => {
            for (level, c) in children.iter().enumerate() {
                println!("{pad}{var} at level {level}:");
                outline(c, depth + 1);
            }
        }
    }
}

fn main() {
    let ctx = GrowthContext::new(vec![int(1), int(2)]).unwrap();
    let h = Term::var("h");
    let cases = [
        (vec![], BigOAtom::big_o(g(1) + g(2), g(2))),
        (vec![], BigOAtom::big_o(g(2), g(1))),
        (vec![BigOAtom::big_o(h.clone(), g(1))], BigOAtom::big_o(h.clone(), g(2))),
        (
            vec![BigOAtom::equation(h.clone() + g(1), g(2))],
            BigOAtom::big_o(g(1), h.clone()),
        ),
    ];
    for (hyps, concl) in &cases {
        for a in hyps {
            println!("assume {a}");
        }
        println!("prove  {concl}");
        match decide_growth_horn(hyps, concl, &ctx).unwrap() {
            Verdict::Valid(cert) => {
                println!("  valid");
                outline(&cert.proofs[0].tree, 0);
            }
            Verdict::Invalid(r) => {
                let cx = &r.counterexample;
                println!("  invalid, polynomials of degree <= {}", cx.basis_degree);
                for (a, pts) in &cx.values {
                    let coeffs: Vec<String> = pts[0].iter().map(|c| c.to_string()).collect();
                    println!("    {a} = [{}]", coeffs.join(", "));
                }
            }
        }
        println!();
    }
}
