//! Decision procedures for linear big-O entailments.
//!
//! A formula relates functions by `f = g + O(h)`: `|f - g|` is bounded by a
//! constant multiple of `|h|`. [`formula::decide_qf`] decides quantifier-free
//! formulas over nonnegative functions, [`signs::decide_signed`] over
//! arbitrary ones, and [`scales`] adds the constant one and symbols of
//! increasing growth. Valid formulas come with checkable certificates;
//! invalid ones with explicit counterexamples, which [`oracle`] evaluates
//! independently.
//!
//! ```
//! use bigo::problem::parse_problem;
//! use bigo::report::run;
//!
//! let p = parse_problem("theory signed\nprove f = O(f + g)").unwrap();
//! let report = run(&p).unwrap();
//! assert_eq!(report.verdict, "invalid");
//! assert!(report.verified);
//! ```

pub mod engine;
pub mod formula;
pub mod fuzz;
pub mod gen;
pub mod horn;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod rational;
pub mod report;
pub mod scales;
pub mod selftest;
pub mod signs;
pub mod terms;
pub mod verdict;

pub use engine::{Backend, DecideError};
pub use rational::Rational;
pub use terms::{Atom, BigOAtom, Formula, LinearExpr, Term};
pub use verdict::{Counterexample, Verdict};
