//! Dense row-major matrices over a [`Scalar`] with exact or
//! tolerance-based Gaussian elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalar::{dot, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of a row reduction.
#[derive(Clone, Debug)]
pub struct Echelon<F: Scalar> {
    /// Reduced row echelon form (zero rows removed).
    pub reduced: Matrix<F>,
    /// Pivot column of each nonzero row.
    pub pivots: Vec<usize>,
    /// Original row index chosen as pivot source, in pivot order.
    pub pivot_rows: Vec<usize>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<F>]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[F]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn outer(a: &[F], b: &[F]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i].clone() * b[j].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column_vecs(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero_tol(0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `vᵀ M`.
    pub fn vec_mul(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.rows, v.len(), "dimension mismatch in vector-matrix product");
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(F::zero(), |acc, i| acc + v[i].clone() * self[(i, j)].clone())
            })
            .collect()
    }

    /// Bilinear evaluation `aᵀ M b`.
    pub fn bilinear(&self, a: &[F], b: &[F]) -> F {
        dot(a, &self.mul_vec(b))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)].clone()
                * other[(i % other.rows, j % other.cols)].clone()
        })
    }

    /// Columns `cols` of the matrix, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.transpose(), tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|a| a.is_zero_tol(tol))
    }

    /// Gauss-Jordan elimination with partial pivoting for floats and
    /// first-nonzero pivoting for exact scalars.
    pub fn echelon(&self, tol: f64) -> Echelon<F> {
        let mut m = self.clone();
        let mut row_ids: Vec<usize> = (0..self.rows).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let candidate = if F::EXACT {
                (r..m.rows).find(|&i| !m[(i, c)].is_zero_tol(tol))
            } else {
                (r..m.rows)
                    .filter(|&i| !m[(i, c)].is_zero_tol(tol))
                    .max_by(|&a, &b| {
                        m[(a, c)].to_f64().abs().total_cmp(&m[(b, c)].to_f64().abs())
                    })
            };
            let Some(p) = candidate else { continue };
            m.swap_rows(r, p);
            row_ids.swap(r, p);
            let inv = m[(r, c)].recip();
            for j in 0..m.cols {
                let v = m[(r, j)].clone() * inv.clone();
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m[(i, c)].clone();
                if factor.is_zero_tol(0.0) {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m[(i, j)].clone() - factor.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
                if !F::EXACT {
                    m[(i, c)] = F::zero();
                }
            }
            pivots.push(c);
            r += 1;
        }
        let reduced = m.select_rows(&(0..r).collect::<Vec<_>>());
        Echelon { reduced, pivots, pivot_rows: row_ids[..r].to_vec() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.echelon(tol).pivots.len()
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<F>> {
        let ech = self.echelon(tol);
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &ech.pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !pivot_set[c]) {
            let mut x = vec![F::zero(); self.cols];
            x[free] = F::one();
            for (r, &p) in ech.pivots.iter().enumerate() {
                x[p] = -ech.reduced[(r, free)].clone();
            }
            basis.push(x);
        }
        basis
    }

    /// Some solution of `M x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[F], tol: f64) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let aug = Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let ech = aug.echelon(tol);
        if ech.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (r, &p) in ech.pivots.iter().enumerate() {
            x[p] = ech.reduced[(r, self.cols)].clone();
        }
        if !F::EXACT {
            // Reject least-squares-like solutions that only pass the pivot threshold.
            let residual = self.mul_vec(&x);
            let scale = b.iter().map(|v| v.to_f64().abs()).fold(1.0, f64::max);
            if residual
                .iter()
                .zip(b)
                .any(|(r, bi)| (r.clone() - bi.clone()).to_f64().abs() > 1e3 * tol.max(1e-12) * scale)
            {
                return None;
            }
        }
        Some(x)
    }

    /// Solves `M X = B` column by column.
    pub fn solve_matrix(&self, rhs: &Self, tol: f64) -> Option<Self> {
        let cols: Option<Vec<Vec<F>>> =
            (0..rhs.cols).map(|j| self.solve(&rhs.column(j), tol)).collect();
        Some(Self::from_columns(&cols?))
    }

    pub fn inverse(&self, tol: f64) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                F::one()
            } else {
                F::zero()
            }
        });
        let ech = aug.echelon(tol);
        if ech.pivots.len() < n || ech.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| ech.reduced[(i, n + j)].clone()))
    }

    pub fn determinant(&self, tol: f64) -> F {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero_tol(tol)) else {
                return F::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det = det * pivot.clone();
            for i in c + 1..n {
                let factor = m[(i, c)].clone() / pivot.clone();
                for j in c..n {
                    let v = m[(i, j)].clone() - factor.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    /// Leading principal minors `det(M[..k, ..k])` for `k = 1..=n`.
    pub fn leading_minors(&self) -> Vec<F> {
        (1..=self.rows)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.select_rows(&idx).select_columns(&idx).determinant(0.0)
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows).map(|i| crate::scalar::vec_to_json(self.row(i))).collect(),
        )
    }
}

/// Indices of a maximal linearly independent subset of `vectors`, greedy in order.
pub fn independent_subset<F: Scalar>(vectors: &[Vec<F>], tol: f64) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    // Pivot rows of the transpose echelon are not order-stable, so grow greedily.
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<F>> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        rows.push(v.clone());
        if Matrix::from_rows(&rows).rank(tol) > chosen.len() {
            chosen.push(i);
        } else {
            rows.pop();
        }
    }
    chosen
}

/// Symmetric eigen-decomposition of a real symmetric matrix (ascending eigenvalues).
pub fn symmetric_eigen(m: &Matrix<f64>) -> (Vec<f64>, Matrix<f64>) {
    let n = m.rows();
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = nalgebra::SymmetricEigen::new(dm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Positive-definiteness: leading principal minors for exact scalars,
/// smallest eigenvalue above `tol` for floats.
pub fn is_positive_definite<F: Scalar>(m: &Matrix<F>, tol: f64) -> bool {
    if !m.is_symmetric(tol) {
        return false;
    }
    if m.rows() == 0 {
        return true;
    }
    if F::EXACT {
        m.leading_minors().iter().all(|d| d.is_positive(0.0))
    } else {
        let (values, _) = symmetric_eigen(&m.to_f64());
        values[0] > tol
    }
}

/// Positive semidefiniteness with the same conventions as [`is_positive_definite`].
pub fn is_positive_semidefinite<F: Scalar>(m: &Matrix<F>, tol: f64) -> bool {
    if !m.is_symmetric(tol) {
        return false;
    }
    if m.rows() == 0 {
        return true;
    }
    if F::EXACT {
        // LDLᵀ with symmetric pivoting on the diagonal.
        let mut a = m.clone();
        let n = a.rows();
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            let pick = active.iter().position(|&i| a[(i, i)].is_positive(0.0));
            match pick {
                None => {
                    // All remaining diagonal entries are <= 0: need them zero with zero rows.
                    return active.iter().all(|&i| {
                        a[(i, i)].is_zero_tol(0.0)
                            && active.iter().all(|&j| a[(i, j)].is_zero_tol(0.0))
                    });
                }
                Some(pos) => {
                    let p = active.remove(pos);
                    let d = a[(p, p)].clone();
                    for &i in &active {
                        for &j in &active {
                            let v = a[(i, j)].clone() - a[(i, p)].clone() * a[(p, j)].clone() / d.clone();
                            a[(i, j)] = v;
                        }
                    }
                }
            }
        }
        true
    } else {
        let (values, _) = symmetric_eigen(&m.to_f64());
        values[0] >= -tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn inverse_and_solve_agree_exactly() {
        let m = Matrix::from_rows(&[vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]]);
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        let x = m.solve(&[q(1, 1), q(2, 1)], 0.0).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn nullspace_of_rank_deficient_matrix() {
        let m = Matrix::from_rows(&[
            vec![q(1, 1), q(1, 1), q(0, 1)],
            vec![q(2, 1), q(2, 1), q(0, 1)],
        ]);
        let ns = m.nullspace(0.0);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(|x| x.is_zero_tol(0.0)));
        }
        assert_eq!(m.rank(0.0), 1);
    }

    #[test]
    fn inconsistent_system_has_no_solution() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(m.solve(&[1.0, 3.0], 1e-9).is_none());
    }

    #[test]
    fn definiteness_tests() {
        let pd = Matrix::from_rows(&[vec![q(1, 2), q(1, 4)], vec![q(1, 4), q(1, 2)]]);
        assert!(is_positive_definite(&pd, 0.0));
        let rank_one = Matrix::outer(&[q(1, 1), q(1, 1)], &[q(1, 1), q(1, 1)]);
        assert!(!is_positive_definite(&rank_one, 0.0));
        assert!(is_positive_semidefinite(&rank_one, 0.0));
        let indefinite = Matrix::from_rows(&[vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]);
        assert!(!is_positive_semidefinite(&indefinite, 0.0));
    }

    #[test]
    fn independent_subset_is_greedy() {
        let vs = vec![vec![q(1, 1), q(0, 1)], vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]];
        assert_eq!(independent_subset(&vs, 0.0), vec![0, 2]);
    }
}
