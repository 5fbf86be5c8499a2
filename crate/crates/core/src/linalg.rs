//! Exact rational linear algebra: span membership, nullspaces,
//! Fourier–Motzkin feasibility, and the two sides of the LP duality used by
//! the saturation loop.
//!
//! Column and variable indices are zero-based throughout.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::terms::{Atom, LinearExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for {len} columns")]
    IndexOutOfRange { index: usize, len: usize },
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds from explicit rows; `cols` fixes the width even when there are no rows.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| rational::int(x)).collect())
            .collect();
        Matrix::from_rows(cols, rows).expect("rectangular literal")
    }

    /// Matrix whose rows are the coefficients of `exprs` on `columns`.
    pub fn from_exprs(exprs: &[LinearExpr], columns: &[Atom]) -> Self {
        let rows = exprs
            .iter()
            .map(|e| columns.iter().map(|a| e.coeff(a)).collect())
            .collect();
        Matrix::from_rows(columns.len(), rows).expect("rows built to width")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `b A`.
    pub fn left_mul(&self, b: &[Rational]) -> Vec<Rational> {
        assert_eq!(b.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(Rational::zero(), |acc, i| acc + &b[i] * self.get(i, j))
            })
            .collect()
    }

    /// `A f`.
    pub fn right_mul(&self, f: &[Rational]) -> Vec<Rational> {
        assert_eq!(f.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(self.row(i), f))
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Reduced row echelon form in place; returns the pivot columns in row order.
fn rref(rows: &mut [Vec<Rational>], width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                let (pivot_row, other) = if i < r {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = rows.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (x, y) in other.iter_mut().zip(pivot_row.iter()) {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `M x = y` exactly. Free variables are set to zero.
pub fn solve(m: &Matrix, y: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
    if y.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows(),
            found: y.len(),
        });
    }
    let n = m.cols();
    let mut aug: Vec<Vec<Rational>> = (0..m.rows())
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.push(y[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, n);
    // A pivot in the augmented column, or a zero row with nonzero rhs, means no solution.
    for row in aug.iter().skip(pivots.len()) {
        if !row[n].is_zero() {
            return Ok(None);
        }
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Ok(Some(x))
}

/// Basis of `{ f : A f = 0 }`, one vector per free column.
pub fn nullspace(a: &Matrix) -> Vec<Vec<Rational>> {
    let n = a.cols();
    let mut rows: Vec<Vec<Rational>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    let pivots = rref(&mut rows, n);
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    (0..n)
        .filter(|c| !pivot_set.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[r][free].clone();
            }
            v
        })
        .collect()
}

/// Indices of a maximal linearly independent subset of the rows, greedily in order.
pub fn independent_rows(a: &Matrix) -> Vec<usize> {
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut chosen = Vec::new();
    for i in 0..a.rows() {
        let mut row = a.row(i).to_vec();
        for (b, &p) in basis.iter().zip(&pivots) {
            if !row[p].is_zero() {
                let factor = row[p].clone();
                for (x, y) in row.iter_mut().zip(b) {
                    *x -= &factor * y;
                }
            }
        }
        if let Some(p) = row.iter().position(|x| !x.is_zero()) {
            let inv = row[p].recip();
            for x in row.iter_mut() {
                *x *= &inv;
            }
            // Keep earlier basis rows reduced against the new pivot.
            for b in basis.iter_mut() {
                if !b[p].is_zero() {
                    let factor = b[p].clone();
                    for (x, y) in b.iter_mut().zip(&row) {
                        *x -= &factor * y;
                    }
                }
            }
            basis.push(row);
            pivots.push(p);
            chosen.push(i);
        }
    }
    chosen
}

/// Coefficients `b` with `sum b_i rows_i = target`, or `None` outside the span.
pub fn span_membership(rows: &[LinearExpr], target: &LinearExpr) -> Option<Vec<Rational>> {
    let mut atoms: BTreeSet<Atom> = target.support();
    for r in rows {
        atoms.extend(r.support());
    }
    let atoms: Vec<Atom> = atoms.into_iter().collect();
    // One equation per atom, one unknown per row.
    let m = Matrix::from_exprs(rows, &atoms).transpose();
    let y: Vec<Rational> = atoms.iter().map(|a| target.coeff(a)).collect();
    solve(&m, &y).expect("dimensions built to match")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Geq,
}

/// `coeffs · x (= | >=) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinConstraint {
    pub fn geq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        LinConstraint {
            coeffs,
            relation: Relation::Geq,
            rhs,
        }
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        LinConstraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        }
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Geq => lhs >= self.rhs,
        }
    }
}

/// Set of original inequality indices a derived inequality was combined from.
#[derive(Debug, Clone, PartialEq, Eq)]
struct History(Vec<u64>);

impl History {
    fn single(i: usize, n: usize) -> Self {
        let mut words = vec![0u64; n.div_ceil(64).max(1)];
        words[i / 64] |= 1 << (i % 64);
        History(words)
    }

    fn union(&self, other: &History) -> History {
        History(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn is_subset(&self, other: &History) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// `coeffs · x >= rhs`, normalized to coprime integer coefficients.
#[derive(Debug, Clone)]
struct Ineq {
    coeffs: Vec<Rational>,
    rhs: Rational,
    history: History,
}

enum Normalized {
    Keep(Ineq),
    Trivial,
    Contradiction,
}

impl Ineq {
    fn normalize(mut self) -> Normalized {
        if self.coeffs.iter().all(Zero::is_zero) {
            return if self.rhs.is_positive() {
                Normalized::Contradiction
            } else {
                Normalized::Trivial
            };
        }
        let k = rational::primitive_scale(&self.coeffs);
        if !k.is_one() {
            for c in self.coeffs.iter_mut() {
                *c *= &k;
            }
            self.rhs *= &k;
        }
        Normalized::Keep(self)
    }
}

/// `x_pivot = (rhs - sum_{j != pivot} coeffs_j x_j) / coeffs_pivot`.
struct Substitution {
    pivot: usize,
    coeffs: Vec<Rational>,
    rhs: Rational,
}

fn eliminate_with(target: &mut [Rational], rhs: &mut Rational, sub: &Substitution) {
    let c = target[sub.pivot].clone();
    if c.is_zero() {
        return;
    }
    let factor = c / &sub.coeffs[sub.pivot];
    for (x, y) in target.iter_mut().zip(&sub.coeffs) {
        *x -= &factor * y;
    }
    *rhs -= &factor * &sub.rhs;
}

/// Drops inequalities whose history contains another's (Kohler) and keeps
/// only histories of size at most `eliminated + 1` (Chernikov).
fn prune(ineqs: Vec<Ineq>, eliminated: usize) -> Vec<Ineq> {
    let bound = eliminated as u32 + 1;
    let mut kept: Vec<Ineq> = ineqs
        .into_iter()
        .filter(|q| eliminated == 0 || q.history.len() <= bound)
        .collect();
    kept.sort_by_key(|q| q.history.len());
    let mut out: Vec<Ineq> = Vec::with_capacity(kept.len());
    'outer: for q in kept {
        for p in &out {
            if p.history.is_subset(&q.history) {
                // Same history means the same combination up to scaling, unless the
                // coefficient vectors differ; keep only provably dominated duplicates.
                if p.history != q.history || (p.coeffs == q.coeffs && p.rhs >= q.rhs) {
                    continue 'outer;
                }
            }
        }
        out.push(q);
    }
    out
}

fn pick_in_interval(lo: Option<Rational>, hi: Option<Rational>) -> Rational {
    match (lo, hi) {
        (Some(l), Some(h)) => (l + h) / rational::int(2),
        (Some(l), None) => l + Rational::one(),
        (None, Some(h)) => h - Rational::one(),
        (None, None) => Rational::zero(),
    }
}

/// Finds a rational point satisfying every constraint over `dim` variables,
/// or `None` when the system is infeasible.
///
/// Equalities are eliminated first by exact substitution. The remaining
/// inequalities go through Fourier–Motzkin in ascending variable order, and a
/// witness is rebuilt by back-substitution, taking interval midpoints, the
/// finite endpoint moved by one on half-lines, and zero for free variables.
pub fn fm_feasible(
    dim: usize,
    constraints: &[LinConstraint],
) -> Result<Option<Vec<Rational>>, LinalgError> {
    for c in constraints {
        if c.coeffs.len() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                found: c.coeffs.len(),
            });
        }
    }

    let n_ineq = constraints
        .iter()
        .filter(|c| c.relation == Relation::Geq)
        .count();
    let mut ineqs: Vec<Ineq> = Vec::with_capacity(n_ineq);
    let mut eqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for c in constraints {
        match c.relation {
            Relation::Geq => ineqs.push(Ineq {
                coeffs: c.coeffs.clone(),
                rhs: c.rhs.clone(),
                history: History::single(ineqs.len(), n_ineq),
            }),
            Relation::Eq => eqs.push((c.coeffs.clone(), c.rhs.clone())),
        }
    }

    let mut subs: Vec<Substitution> = Vec::new();
    for i in 0..eqs.len() {
        let (coeffs, rhs) = eqs[i].clone();
        let Some(pivot) = coeffs.iter().position(|c| !c.is_zero()) else {
            if rhs.is_zero() {
                continue;
            }
            return Ok(None);
        };
        let sub = Substitution { pivot, coeffs, rhs };
        for (c, r) in eqs[i + 1..].iter_mut() {
            eliminate_with(c, r, &sub);
        }
        for q in ineqs.iter_mut() {
            eliminate_with(&mut q.coeffs, &mut q.rhs, &sub);
        }
        subs.push(sub);
    }

    let mut current = Vec::with_capacity(ineqs.len());
    for q in ineqs {
        match q.normalize() {
            Normalized::Keep(q) => current.push(q),
            Normalized::Trivial => {}
            Normalized::Contradiction => return Ok(None),
        }
    }

    let pivots: BTreeSet<usize> = subs.iter().map(|s| s.pivot).collect();
    let mut stages: Vec<(usize, Vec<Ineq>)> = Vec::new();
    let mut eliminated = 0;
    for var in (0..dim).filter(|v| !pivots.contains(v)) {
        let (involved, rest): (Vec<Ineq>, Vec<Ineq>) =
            current.into_iter().partition(|q| !q.coeffs[var].is_zero());
        if involved.is_empty() {
            current = rest;
            stages.push((var, Vec::new()));
            continue;
        }
        eliminated += 1;
        let (pos, neg): (Vec<&Ineq>, Vec<&Ineq>) =
            involved.iter().partition(|q| q.coeffs[var].is_positive());
        let mut next = rest;
        for p in &pos {
            for q in &neg {
                let history = p.history.union(&q.history);
                if history.len() > eliminated as u32 + 1 {
                    continue;
                }
                let a = p.coeffs[var].clone();
                let b = -q.coeffs[var].clone();
                let coeffs: Vec<Rational> = p
                    .coeffs
                    .iter()
                    .zip(&q.coeffs)
                    .map(|(x, y)| x * &b + y * &a)
                    .collect();
                let rhs = &p.rhs * &b + &q.rhs * &a;
                match (Ineq { coeffs, rhs, history }).normalize() {
                    Normalized::Keep(r) => next.push(r),
                    Normalized::Trivial => {}
                    Normalized::Contradiction => return Ok(None),
                }
            }
        }
        current = prune(next, eliminated);
        stages.push((var, involved));
    }
    debug_assert!(current.is_empty());

    let mut x = vec![Rational::zero(); dim];
    for (var, involved) in stages.iter().rev() {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for q in involved {
            let a = &q.coeffs[*var];
            let rest = dot(&q.coeffs, &x) - a * &x[*var];
            let bound = (&q.rhs - rest) / a;
            if a.is_positive() {
                if lo.as_ref().is_none_or(|l| bound > *l) {
                    lo = Some(bound);
                }
            } else if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        }
        x[*var] = pick_in_interval(lo, hi);
    }
    for sub in subs.iter().rev() {
        let rest = dot(&sub.coeffs, &x) - &sub.coeffs[sub.pivot] * &x[sub.pivot];
        x[sub.pivot] = (&sub.rhs - rest) / &sub.coeffs[sub.pivot];
    }
    debug_assert!(constraints.iter().all(|c| c.holds_at(&x)));
    Ok(Some(x))
}

/// A vector `b` with `b A >= 0` componentwise and `(b A)_v >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationWitness {
    b: Vec<Rational>,
}

impl CombinationWitness {
    /// Checks the defining inequalities; `None` if they fail.
    pub fn new(a: &Matrix, v: usize, b: Vec<Rational>) -> Option<Self> {
        if b.len() != a.rows() || v >= a.cols() {
            return None;
        }
        let ba = a.left_mul(&b);
        let ok = ba.iter().all(|x| !x.is_negative()) && ba[v] >= Rational::one();
        ok.then_some(CombinationWitness { b })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.b
    }

    pub fn into_weights(self) -> Vec<Rational> {
        self.b
    }
}

/// A vector `f >= 0` with `A f = 0` and `f_v >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelWitness {
    f: Vec<Rational>,
}

impl KernelWitness {
    pub fn new(a: &Matrix, v: usize, f: Vec<Rational>) -> Option<Self> {
        if f.len() != a.cols() || v >= a.cols() {
            return None;
        }
        let ok = f.iter().all(|x| !x.is_negative())
            && f[v] >= Rational::one()
            && a.right_mul(&f).iter().all(Zero::is_zero);
        ok.then_some(KernelWitness { f })
    }

    pub fn values(&self) -> &[Rational] {
        &self.f
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.f
    }
}

fn check_column(a: &Matrix, v: usize) -> Result<(), LinalgError> {
    if v >= a.cols() {
        return Err(LinalgError::IndexOutOfRange {
            index: v,
            len: a.cols(),
        });
    }
    Ok(())
}

/// Searches for `b` with `b A >= 0` and `(b A)_v >= 1`.
///
/// Only a linearly independent subset of the rows carries unknowns; every
/// combination of all rows is a combination of those.
pub fn positive_combination(
    a: &Matrix,
    v: usize,
) -> Result<Option<CombinationWitness>, LinalgError> {
    check_column(a, v)?;
    let basis = independent_rows(a);
    let constraints: Vec<LinConstraint> = (0..a.cols())
        .map(|j| {
            let coeffs = basis.iter().map(|&i| a.get(i, j).clone()).collect();
            let rhs = if j == v { Rational::one() } else { Rational::zero() };
            LinConstraint::geq(coeffs, rhs)
        })
        .collect();
    let Some(sol) = fm_feasible(basis.len(), &constraints)? else {
        return Ok(None);
    };
    let mut b = vec![Rational::zero(); a.rows()];
    for (&i, x) in basis.iter().zip(sol) {
        b[i] = x;
    }
    Ok(Some(
        CombinationWitness::new(a, v, b).expect("feasible point satisfies its constraints"),
    ))
}

/// Searches for `f >= 0` with `A f = 0` and `f_v >= 1`.
pub fn kernel_witness(a: &Matrix, v: usize) -> Result<Option<KernelWitness>, LinalgError> {
    check_column(a, v)?;
    let m = a.cols();
    let mut constraints: Vec<LinConstraint> = (0..a.rows())
        .map(|i| LinConstraint::eq(a.row(i).to_vec(), Rational::zero()))
        .collect();
    for j in 0..m {
        let mut e = vec![Rational::zero(); m];
        e[j] = Rational::one();
        let rhs = if j == v { Rational::one() } else { Rational::zero() };
        constraints.push(LinConstraint::geq(e, rhs));
    }
    let Some(f) = fm_feasible(m, &constraints)? else {
        return Ok(None);
    };
    Ok(Some(
        KernelWitness::new(a, v, f).expect("feasible point satisfies its constraints"),
    ))
}

/// Sum of kernel witnesses for every index in `indices`: nonnegative, in the
/// kernel, and strictly positive on `indices`. `None` if some index has no witness.
pub fn positive_kernel(
    a: &Matrix,
    indices: &BTreeSet<usize>,
) -> Result<Option<Vec<Rational>>, LinalgError> {
    let mut sum = vec![Rational::zero(); a.cols()];
    for &v in indices {
        if sum[v].is_positive() {
            continue;
        }
        let Some(w) = kernel_witness(a, v)? else {
            return Ok(None);
        };
        for (s, x) in sum.iter_mut().zip(w.values()) {
            *s += x;
        }
    }
    Ok(Some(sum))
}

/// Multiplies by the least common multiple of the denominators.
pub fn integer_scale(v: &[Rational]) -> Vec<BigInt> {
    let lcm = rational::denominator_lcm(v);
    v.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}
