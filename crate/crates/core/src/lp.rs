//! Two-phase dense simplex with Bland's rule.
//!
//! Solves `maximize cᵀx subject to A x = b, x ≥ 0`. With exact scalars the
//! result is exact; with floats every comparison uses the supplied tolerance.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<F> {
    Optimal { x: Vec<F>, value: F },
    Infeasible,
    Unbounded,
}

impl<F> LpOutcome<F> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }

    pub fn point(self) -> Option<Vec<F>> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

struct Tableau<F> {
    rows: Vec<Vec<F>>,
    basis: Vec<usize>,
    tol: f64,
}

impl<F: Scalar> Tableau<F> {
    fn rhs(&self, i: usize) -> &F {
        self.rows[i].last().expect("tableau row has rhs")
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c].clone();
            if factor.is_zero_tol(0.0) {
                continue;
            }
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v = v.clone() - factor.clone() * p.clone();
            }
            if !F::EXACT {
                row[c] = F::zero();
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` over columns `0..active`; returns false if unbounded.
    fn optimize(&mut self, cost: &[F], active: usize) -> bool {
        loop {
            let entering = (0..active).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = self
                    .basis
                    .iter()
                    .enumerate()
                    .fold(cost[j].clone(), |acc, (i, &b)| acc - cost[b].clone() * self.rows[i][j].clone());
                reduced.is_positive(self.tol)
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, F)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive(self.tol) {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let better = ratio.clone() - br.clone();
                        if better.is_negative(self.tol)
                            || (better.is_zero_tol(self.tol) && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, j);
        }
    }
}

/// Maximizes `cᵀx` subject to `A x = b`, `x ≥ 0`.
pub fn maximize<F: Scalar>(a: &Matrix<F>, b: &[F], c: &[F], tol: f64) -> LpOutcome<F> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m, "rhs length");
    assert_eq!(c.len(), n, "objective length");

    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative(0.0);
        let mut row = Vec::with_capacity(n + m + 1);
        for j in 0..n {
            let v = a[(i, j)].clone();
            row.push(if flip { -v } else { v });
        }
        for k in 0..m {
            row.push(if k == i { F::one() } else { F::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis: (n..n + m).collect(), tol };

    let mut phase1 = vec![F::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = -F::one();
    }
    tab.optimize(&phase1, n + m);
    let infeasibility = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .fold(F::zero(), |acc, i| acc + tab.rhs(i).clone());
    if infeasibility.is_positive(tol.max(if F::EXACT { 0.0 } else { 1e-9 })) {
        return LpOutcome::Infeasible;
    }

    // Drive artificial variables out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero_tol(tol)) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut phase2 = c.to_vec();
    phase2.extend((0..m).map(|_| F::zero()));
    if !tab.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![F::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.rhs(i).clone();
        }
    }
    let value = crate::scalar::dot(c, &x);
    LpOutcome::Optimal { x, value }
}

/// Some `x ≥ 0` with `A x = b`.
pub fn feasible_point<F: Scalar>(a: &Matrix<F>, b: &[F], tol: f64) -> Option<Vec<F>> {
    maximize(a, b, &vec![F::zero(); a.cols()], tol).point()
}

/// Nonnegative coefficients `t` with `Σ tᵢ gᵢ = v`, if any.
pub fn conic_combination<F: Scalar>(generators: &[Vec<F>], v: &[F], tol: f64) -> Option<Vec<F>> {
    if generators.is_empty() {
        return v.iter().all(|x| x.is_zero_tol(tol)).then(Vec::new);
    }
    let a = Matrix::from_columns(generators);
    feasible_point(&a, v, tol)
}

/// Convex weights `t` with `Σ tᵢ pᵢ = v`, if any.
pub fn convex_combination<F: Scalar>(points: &[Vec<F>], v: &[F], tol: f64) -> Option<Vec<F>> {
    if points.is_empty() {
        return None;
    }
    let lifted: Vec<Vec<F>> = points
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.push(F::one());
            q
        })
        .collect();
    let mut target = v.to_vec();
    target.push(F::one());
    conic_combination(&lifted, &target, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn small_exact_program() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = Matrix::from_rows(&[
            vec![q(1), q(2), q(1), q(0)],
            vec![q(3), q(1), q(0), q(1)],
        ]);
        let out = maximize(&a, &[q(4), q(6)], &[q(1), q(1), q(0), q(0)], 0.0);
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, Rational::ratio(14, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let a = Matrix::from_rows(&[vec![q(1), q(1)]]);
        assert_eq!(maximize(&a, &[q(-1)], &[q(0), q(0)], 0.0), LpOutcome::Infeasible);
        let a = Matrix::from_rows(&[vec![q(1), q(-1)]]);
        assert_eq!(maximize(&a, &[q(0)], &[q(1), q(0)], 0.0), LpOutcome::Unbounded);
    }

    #[test]
    fn convex_membership() {
        let pts = vec![vec![q(0), q(0)], vec![q(1), q(0)], vec![q(0), q(1)]];
        let inside = [Rational::ratio(1, 3), Rational::ratio(1, 3)];
        assert!(convex_combination(&pts, &inside, 0.0).is_some());
        assert!(convex_combination(&pts, &[q(1), q(1)], 0.0).is_none());
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = Matrix::from_rows(&[vec![q(1), q(1)], vec![q(2), q(2)]]);
        let x = feasible_point(&a, &[q(1), q(2)], 0.0).unwrap();
        assert_eq!(x[0].clone() + x[1].clone(), q(1));
    }
}
