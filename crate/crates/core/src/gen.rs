//! Seeded random instances for fuzzing and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::linalg::Matrix;
use crate::rational::int;
use crate::terms::{Atom, BigOAtom, Formula, LinearExpr, Term};

/// `f, g, h, k, l`, then `x5, x6, ...`.
pub fn variables(n: usize) -> Vec<Atom> {
    const NAMES: [&str; 5] = ["f", "g", "h", "k", "l"];
    (0..n)
        .map(|i| match NAMES.get(i) {
            Some(s) => Atom::var(*s),
            None => Atom::var(format!("x{i}")),
        })
        .collect()
}

/// Shape of generated atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomShape {
    pub atoms: Vec<Atom>,
    /// Coefficients range over `-coeff..=coeff`.
    pub coeff: i64,
    /// Bounds may carry negative coefficients.
    pub signed_bounds: bool,
    /// Terms may use `|.|`, `min` and `max`.
    pub nonlinear: bool,
}

impl AtomShape {
    pub fn core(vars: usize, coeff: i64) -> Self {
        AtomShape {
            atoms: variables(vars),
            coeff,
            signed_bounds: false,
            nonlinear: false,
        }
    }

    pub fn signed(vars: usize, coeff: i64) -> Self {
        AtomShape {
            signed_bounds: true,
            nonlinear: true,
            ..AtomShape::core(vars, coeff)
        }
    }

    pub fn with_atoms(mut self, extra: impl IntoIterator<Item = Atom>) -> Self {
        self.atoms.extend(extra);
        self
    }
}

/// Each atom appears with probability one half.
pub fn linear<R: Rng>(rng: &mut R, atoms: &[Atom], lo: i64, hi: i64) -> LinearExpr {
    let mut pairs = Vec::new();
    for a in atoms {
        if rng.gen_bool(0.5) {
            pairs.push((a.clone(), int(rng.gen_range(lo..=hi))));
        }
    }
    LinearExpr::from_pairs(pairs)
}

pub fn term<R: Rng>(rng: &mut R, shape: &AtomShape) -> Term {
    let t = Term::from_linear(&linear(rng, &shape.atoms, -shape.coeff, shape.coeff));
    if !shape.nonlinear {
        return t;
    }
    match rng.gen_range(0..8) {
        0 => Term::abs(t),
        1 => Term::min(t, Term::from_linear(&linear(rng, &shape.atoms, -shape.coeff, shape.coeff))),
        2 => Term::max(t, Term::from_linear(&linear(rng, &shape.atoms, -shape.coeff, shape.coeff))),
        3 => t + Term::abs(Term::from_linear(&linear(rng, &shape.atoms, -shape.coeff, shape.coeff))),
        _ => t,
    }
}

pub fn bound<R: Rng>(rng: &mut R, shape: &AtomShape) -> Term {
    let lo = if shape.signed_bounds { -shape.coeff } else { 0 };
    let b = Term::from_linear(&linear(rng, &shape.atoms, lo, shape.coeff.max(1)));
    if shape.nonlinear && rng.gen_bool(0.25) {
        Term::abs(b)
    } else {
        b
    }
}

/// `q = r + O(t)`, an equation one time in six.
pub fn atom<R: Rng>(rng: &mut R, shape: &AtomShape) -> BigOAtom {
    let lhs = term(rng, shape);
    let rhs = if rng.gen_bool(0.3) { term(rng, shape) } else { Term::Zero };
    let b = if rng.gen_ratio(1, 6) { Term::Zero } else { bound(rng, shape) };
    BigOAtom::new(lhs, rhs, b)
}

/// Up to `max_hyps` hypotheses and a conclusion.
pub fn horn<R: Rng>(rng: &mut R, shape: &AtomShape, max_hyps: usize) -> (Vec<BigOAtom>, BigOAtom) {
    let n = rng.gen_range(0..=max_hyps);
    let hyps = (0..n).map(|_| atom(rng, shape)).collect();
    (hyps, atom(rng, shape))
}

/// Exactly `hyps` hypotheses, each over every atom.
pub fn dense_horn<R: Rng>(rng: &mut R, atoms: &[Atom], hyps: usize, coeff: i64) -> (Vec<BigOAtom>, BigOAtom) {
    let mut dense = || {
        let q = LinearExpr::from_pairs(atoms.iter().map(|a| (a.clone(), int(rng.gen_range(-coeff..=coeff)))));
        let k = rng.gen_range(1..=atoms.len().min(3));
        let t = LinearExpr::from_pairs(atoms.choose_multiple(rng, k).map(|a| (a.clone(), int(1))));
        BigOAtom::big_o(Term::from_linear(&q), Term::from_linear(&t))
    };
    let hs = (0..hyps).map(|_| dense()).collect();
    (hs, dense())
}

/// A formula of connective depth at most `depth`.
pub fn formula<R: Rng>(rng: &mut R, shape: &AtomShape, depth: usize) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 3) {
        return atom(rng, shape).into();
    }
    let op = rng.gen_range(0..4);
    let p = formula(rng, shape, depth - 1);
    if op == 0 {
        return Formula::not(p);
    }
    let q = formula(rng, shape, depth - 1);
    match op {
        1 => Formula::and(p, q),
        2 => Formula::or(p, q),
        _ => Formula::implies(p, q),
    }
}

/// Integer entries in `-range..=range`.
pub fn matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, range: i64) -> Matrix {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| int(rng.gen_range(-range..=range))).collect())
        .collect();
    Matrix::from_rows(cols, data).expect("rows have equal length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generation_is_seeded() {
        let shape = AtomShape::signed(4, 3);
        let a = formula(&mut ChaCha8Rng::seed_from_u64(3), &shape, 3);
        let b = formula(&mut ChaCha8Rng::seed_from_u64(3), &shape, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn core_shapes_have_nonnegative_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shape = AtomShape::core(5, 3);
        for _ in 0..200 {
            let a = atom(&mut rng, &shape);
            let b = crate::terms::linearize(&a.bound).unwrap();
            assert!(b.iter().all(|(_, c)| *c >= int(0)));
        }
    }

    #[test]
    fn variable_names() {
        assert_eq!(variables(6)[5], Atom::var("x5"));
    }
}
