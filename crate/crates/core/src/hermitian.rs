//! Hermitian matrices as real coordinate vectors, Haar sampling, and
//! helpers for the spin-factor family.
//!
//! Coordinates of an `n×n` Hermitian `h`: the diagonal `h_ii`, then for each
//! `i < j` in lexicographic order `Re h_ij` and `Im h_ij`. The real basis is
//! `E_ii`, `E_ij + E_ji`, `iE_ij − iE_ji`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::Matrix;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn coord_dim(n: usize) -> usize {
    n * n
}

fn off_diagonal_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

pub fn to_coords(h: &CMatrix) -> Vec<f64> {
    let n = h.nrows();
    let mut v: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    for (i, j) in off_diagonal_pairs(n) {
        v.push(h[(i, j)].re);
        v.push(h[(i, j)].im);
    }
    v
}

pub fn from_coords(v: &[f64], n: usize) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(v[i], 0.0);
    }
    for (k, (i, j)) in off_diagonal_pairs(n).into_iter().enumerate() {
        let z = Complex64::new(v[n + 2 * k], v[n + 2 * k + 1]);
        h[(i, j)] = z;
        h[(j, i)] = z.conj();
    }
    h
}

/// Coordinates of the real basis element `k`.
pub fn basis_element(n: usize, k: usize) -> CMatrix {
    let mut v = vec![0.0; coord_dim(n)];
    v[k] = 1.0;
    from_coords(&v, n)
}

/// Gram matrix of the trace form `Tr(ab)` in coordinates.
pub fn trace_gram(n: usize) -> Matrix<f64> {
    let d: Vec<f64> = (0..coord_dim(n)).map(|k| if k < n { 1.0 } else { 2.0 }).collect();
    Matrix::diagonal(&d)
}

/// Covector of `Tr(·)`.
pub fn trace_covector(n: usize) -> Vec<f64> {
    (0..coord_dim(n)).map(|k| if k < n { 1.0 } else { 0.0 }).collect()
}

/// Coordinates of the identity (the order unit).
pub fn identity_coords(n: usize) -> Vec<f64> {
    trace_covector(n)
}

/// Covector `c` with `c · a = Tr(ρ a)`.
pub fn state_covector(rho: &CMatrix) -> Vec<f64> {
    let n = rho.nrows();
    trace_gram(n).mul_vec(&to_coords(rho))
}

/// Entrywise complex conjugation (transpose, on Hermitian matrices).
pub fn conjugate_coords(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    for k in 0..off_diagonal_pairs(n).len() {
        out[n + 2 * k + 1] = -out[n + 2 * k + 1];
    }
    out
}

pub fn projector(psi: &CVector) -> CMatrix {
    let norm = psi.norm();
    let p = psi / Complex64::new(norm, 0.0);
    &p * p.adjoint()
}

pub fn basis_projector(n: usize, i: usize) -> CMatrix {
    let mut psi = CVector::zeros(n);
    psi[i] = Complex64::new(1.0, 0.0);
    projector(&psi)
}

pub fn diagonal(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(values[i], 0.0) } else { Complex64::new(0.0, 0.0) })
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / Complex64::new(d.norm(), 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * phases
}

/// Haar-distributed orthogonal matrix (real analogue of [`haar_unitary`]).
pub fn haar_orthogonal<R: Rng + ?Sized>(k: usize, rng: &mut R) -> DMatrix<f64> {
    let z = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            if r[(i, i)] < 0.0 {
                -1.0
            } else {
                1.0
            }
        } else {
            0.0
        }
    });
    q * signs
}

pub fn random_unit_vector<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Real matrix of `a ↦ U a U†` in coordinates.
pub fn conjugation_action(u: &CMatrix) -> Matrix<f64> {
    let n = u.nrows();
    let cols: Vec<Vec<f64>> = (0..coord_dim(n))
        .map(|k| to_coords(&(u * basis_element(n, k) * u.adjoint())))
        .collect();
    Matrix::from_columns(&cols)
}

/// Real matrix of `a ↦ W a W` (W Hermitian).
pub fn sandwich_action(w: &CMatrix) -> Matrix<f64> {
    let n = w.nrows();
    let cols: Vec<Vec<f64>> = (0..coord_dim(n))
        .map(|k| to_coords(&(w * basis_element(n, k) * w)))
        .collect();
    Matrix::from_columns(&cols)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    (values, vectors)
}

pub fn is_psd(h: &CMatrix, tol: f64) -> bool {
    eigh(h).0.first().is_none_or(|&l| l >= -tol)
}

/// `f(h)` for Hermitian `h` via its spectral decomposition.
pub fn spectral_map(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = eigh(h);
    let n = h.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (l, v) in values.iter().zip(&vectors) {
        out += v * v.adjoint() * Complex64::new(f(*l), 0.0);
    }
    out
}

pub fn trace(h: &CMatrix) -> f64 {
    h.trace().re
}

/// Spin factor `V_k = ℝ ⊕ ℝ^k`: Lorentz-cone membership of `(t, x)`.
pub fn in_lorentz_cone(v: &[f64], tol: f64) -> bool {
    let norm = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    v[0] + tol >= norm
}

/// Jordan product on the spin factor: `(s, x)∘(t, y) = (st + x·y, sy + tx)`.
pub fn spin_jordan_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()];
    out.extend(a[1..].iter().zip(&b[1..]).map(|(x, y)| a[0] * y + b[0] * x));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coordinates_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_vector(3, &mut rng);
        let p = projector(&psi);
        let back = from_coords(&to_coords(&p), 3);
        assert!((back - &p).norm() < 1e-12);
    }

    #[test]
    fn gram_matches_trace_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = projector(&random_vector(2, &mut rng));
        let b = projector(&random_vector(2, &mut rng));
        let g = trace_gram(2);
        let direct = (&a * &b).trace().re;
        assert!((g.bilinear(&to_coords(&a), &to_coords(&b)) - direct).abs() < 1e-12);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(3, &mut rng);
        let err = (&u * u.adjoint() - CMatrix::identity(3, 3)).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn lorentz_cone_contains_jordan_squares() {
        let a = [0.3, -1.2, 0.5, 2.0];
        assert!(in_lorentz_cone(&spin_jordan_product(&a, &a), 1e-12));
        assert!(!in_lorentz_cone(&[1.0, 2.0, 0.0], 1e-12));
    }
}
