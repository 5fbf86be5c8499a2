//! The axiom schemes of positive big O equations, instantiated and
//! decided, followed by a few derived facts with random weights.

use bigo::engine::{self, Backend};
use bigo::selftest::{self, Instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rows = selftest::axiom_instances(&Instance::plain());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    rows.extend(selftest::derived_facts(&mut rng));
    let mut failed = 0;
    for (name, phi) in &rows {
        let verdict = engine::decide(phi, &Backend::Core, false).expect("decidable");
        let mark = if verdict.is_valid() { "valid  " } else { "INVALID" };
        if !verdict.is_valid() {
            failed += 1;
        }
        println!("{mark} {name:<24} {phi}");
    }
    println!("\n{} instances, {failed} not valid", rows.len());
}
