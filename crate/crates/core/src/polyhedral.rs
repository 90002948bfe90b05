//! Double description for pointed polyhedral cones.

use crate::matrix::{independent_subset, Matrix};
use crate::scalar::{dot, normalize_ray, vec_approx_eq, Scalar};

/// Extreme rays of `{v : aᵢ · v ≥ 0 for every row aᵢ}`.
///
/// The constraint rows must span the ambient space (the cone is pointed);
/// returns `None` otherwise.
pub fn rays_of_inequalities<F: Scalar>(rows: &[Vec<F>], tol: f64) -> Option<Vec<Vec<F>>> {
    let d = rows.first()?.len();
    let basis = independent_subset(rows, tol);
    if basis.len() < d {
        return None;
    }
    let initial = Matrix::from_rows(&basis.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>());
    let inv = initial.inverse(tol)?;
    let mut rays: Vec<Vec<F>> = inv.column_vecs();
    let mut processed: Vec<usize> = basis.clone();

    for (idx, row) in rows.iter().enumerate() {
        if basis.contains(&idx) {
            continue;
        }
        let values: Vec<F> = rays.iter().map(|r| dot(row, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive(tol)).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative(tol)).collect();
        if neg.is_empty() {
            processed.push(idx);
            continue;
        }
        let zero_sets: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .copied()
                    .filter(|&k| dot(&rows[k], r).is_zero_tol(tol))
                    .collect()
            })
            .collect();
        let mut next: Vec<Vec<F>> = (0..rays.len())
            .filter(|i| !neg.contains(i))
            .map(|i| rays[i].clone())
            .collect();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<usize> =
                    zero_sets[p].iter().copied().filter(|k| zero_sets[n].contains(k)).collect();
                if d >= 2 && common.len() < d - 2 {
                    continue;
                }
                if !adjacent(rows, &common, d, tol) {
                    continue;
                }
                let combo: Vec<F> = rays[n]
                    .iter()
                    .zip(&rays[p])
                    .map(|(rn, rp)| values[p].clone() * rn.clone() - values[n].clone() * rp.clone())
                    .collect();
                next.push(combo);
            }
        }
        rays = dedup_rays(next, tol);
        processed.push(idx);
    }
    Some(dedup_rays(rays, tol))
}

fn adjacent<F: Scalar>(rows: &[Vec<F>], common: &[usize], d: usize, tol: f64) -> bool {
    if d < 2 {
        return true;
    }
    if common.is_empty() {
        return d == 2;
    }
    let sub = Matrix::from_rows(&common.iter().map(|&k| rows[k].clone()).collect::<Vec<_>>());
    sub.rank(tol) == d - 2
}

/// Normalizes rays and removes duplicates.
pub fn dedup_rays<F: Scalar>(rays: Vec<Vec<F>>, tol: f64) -> Vec<Vec<F>> {
    let mut out: Vec<Vec<F>> = Vec::new();
    for r in rays {
        let Some(n) = normalize_ray(&r, tol) else { continue };
        let cmp_tol = if F::EXACT { 0.0 } else { tol.max(1e-9) * 10.0 };
        if !out.iter().any(|o| vec_approx_eq(o, &n, cmp_tol)) {
            out.push(n);
        }
    }
    out
}

/// Facet normals of `cone(generators)`, i.e. extreme rays of its dual.
pub fn facets_of_generators<F: Scalar>(generators: &[Vec<F>], tol: f64) -> Option<Vec<Vec<F>>> {
    rays_of_inequalities(generators, tol)
}

/// The generators that span extreme rays of `cone(generators)`, deduplicated.
pub fn extreme_generators<F: Scalar>(generators: &[Vec<F>], tol: f64) -> Option<Vec<Vec<F>>> {
    let d = generators.first()?.len();
    let facets = facets_of_generators(generators, tol)?;
    let candidates = dedup_rays(generators.to_vec(), tol);
    Some(
        candidates
            .into_iter()
            .filter(|g| {
                let tight: Vec<Vec<F>> =
                    facets.iter().filter(|f| dot(f, g).is_zero_tol(tol)).cloned().collect();
                d == 1 || (!tight.is_empty() && Matrix::from_rows(&tight).rank(tol) == d - 1)
            })
            .collect(),
    )
}

/// True if the two ray sets agree up to positive scaling.
pub fn same_rays<F: Scalar>(a: &[Vec<F>], b: &[Vec<F>], tol: f64) -> bool {
    let a = dedup_rays(a.to_vec(), tol);
    let b = dedup_rays(b.to_vec(), tol);
    let cmp_tol = if F::EXACT { 0.0 } else { tol.max(1e-9) * 10.0 };
    a.len() == b.len() && a.iter().all(|r| b.iter().any(|s| vec_approx_eq(r, s, cmp_tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn orthant_is_self_dual() {
        let rows = vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]];
        let rays = rays_of_inequalities(&rows, 0.0).unwrap();
        assert!(same_rays(&rays, &rows, 0.0));
    }

    #[test]
    fn square_cone_has_four_facets() {
        // cone over the square with vertices (1, ±1, ±1)
        let gens = vec![
            vec![q(1), q(1), q(1)],
            vec![q(1), q(1), q(-1)],
            vec![q(1), q(-1), q(1)],
            vec![q(1), q(-1), q(-1)],
        ];
        let facets = facets_of_generators(&gens, 0.0).unwrap();
        assert_eq!(facets.len(), 4);
        let expected = vec![
            vec![q(1), q(1), q(0)],
            vec![q(1), q(-1), q(0)],
            vec![q(1), q(0), q(1)],
            vec![q(1), q(0), q(-1)],
        ];
        assert!(same_rays(&facets, &expected, 0.0));
        // the dual of the dual recovers the generators
        let back = rays_of_inequalities(&facets, 0.0).unwrap();
        assert!(same_rays(&back, &gens, 0.0));
    }

    #[test]
    fn interior_generators_are_not_extreme() {
        let gens = vec![vec![q(1), q(0)], vec![q(0), q(1)], vec![q(1), q(1)]];
        let ext = extreme_generators(&gens, 0.0).unwrap();
        assert_eq!(ext.len(), 2);
    }
}
