//! Differential fuzzing of whole problems against the oracle.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gen::{self, AtomShape};
use crate::problem::{Problem, Theory};
use crate::rational::int;
use crate::report;
use crate::terms::Atom;

/// Which theory random problems are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzProfile(pub Theory);

impl FromStr for FuzzProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(FuzzProfile).map_err(|s| format!("unknown profile `{s}`"))
    }
}

impl fmt::Display for FuzzProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The `index`-th problem of the run seeded by `seed`.
pub fn problem(profile: FuzzProfile, seed: u64, index: u64) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let shape = match profile.0 {
        Theory::Core => AtomShape::core(4, 3),
        Theory::Signed => AtomShape::signed(3, 2),
        Theory::WithOne => AtomShape::signed(3, 2).with_atoms([Atom::One]),
        Theory::Growth => AtomShape::signed(2, 2).with_atoms([Atom::growth(int(1)), Atom::growth(int(2))]),
    };
    let goal = gen::formula(&mut rng, &shape, 2);
    let mut p = Problem::new(profile.0, Vec::new(), goal);
    if profile.0 == Theory::Growth {
        p.growth_indices = vec![int(1), int(2)];
    }
    p
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzSummary {
    pub valid: usize,
    pub invalid: usize,
    /// Index, problem text and error of every discrepancy.
    pub failures: Vec<(u64, String, String)>,
}

/// Runs `count` problems; every one must decide and verify.
pub fn fuzz(profile: FuzzProfile, count: u64, seed: u64) -> FuzzSummary {
    let mut s = FuzzSummary::default();
    for i in 0..count {
        let p = problem(profile, seed, i);
        match report::run_seeded(&p, seed.wrapping_add(i)) {
            Ok(r) if r.is_valid() => s.valid += 1,
            Ok(_) => s.invalid += 1,
            Err(e) => s.failures.push((i, p.to_string(), e.to_string())),
        }
    }
    s
}
