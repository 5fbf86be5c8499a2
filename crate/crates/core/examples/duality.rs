//! Exactly one of two linear certificates exists for every column: a
//! combination of rows that is nonnegative and positive there, or a
//! nonnegative kernel vector that is positive there.

use bigo::gen;
use bigo::linalg::{self, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn show(a: &Matrix) {
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|x| format!("{x:>3}")).collect();
        println!("  [{}]", row.join(" "));
    }
    for v in 0..a.cols() {
        let comb = linalg::positive_combination(a, v).unwrap();
        let kern = linalg::kernel_witness(a, v).unwrap();
        let fmt = |xs: &[bigo::Rational]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        match (comb, kern) {
            (Some(b), None) => println!("  column {v}: rows combine with weights ({})", fmt(b.weights())),
            (None, Some(f)) => println!("  column {v}: kernel vector ({})", fmt(f.values())),
            _ => println!("  column {v}: both or neither, which cannot happen"),
        }
    }
}

fn main() {
    println!("f + g - h and g + l - h over (f, g, h, l):");
    show(&Matrix::from_i64(&[&[1, 1, -1, 0], &[0, 1, -1, 1]]));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2 {
        let (n, m) = (rng.gen_range(2..=3), rng.gen_range(3..=4));
        println!("\nrandom {n}x{m}:");
        show(&gen::matrix(&mut rng, n, m, 3));
    }

    let checks = bigo::selftest::duality_suite(7, 500);
    let ok = checks.iter().filter(|c| c.passed).count();
    println!("\n{ok} of {} random matrices satisfy the alternative", checks.len());
}
