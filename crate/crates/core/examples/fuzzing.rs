//! A short fuzz run per theory. Every verdict is re-checked: certificates
//! are replayed and counterexamples evaluated by the oracle.

use bigo::fuzz::{self, FuzzProfile};
use bigo::problem::Theory;

fn main() {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    for t in [Theory::Core, Theory::Signed, Theory::WithOne, Theory::Growth] {
        let s = fuzz::fuzz(FuzzProfile(t), count, 7);
        println!(
            "{t:<9} {count} problems: {} valid, {} invalid, {} failures",
            s.valid,
            s.invalid,
            s.failures.len()
        );
        for (i, p, e) in &s.failures {
            println!("  #{i} {e}\n{p}");
        }
    }
    println!("\nsample growth problem:\n{}", fuzz::problem(FuzzProfile(Theory::Growth), 7, 0));
}
