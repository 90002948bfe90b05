use proptest::prelude::*;

use gptj::analysis;
use gptj::builders;
use gptj::composites::{self, BipartiteState};
use gptj::hermitian;
use gptj::matrix::Matrix;
use gptj::model::{act_on_weight, Model};
use gptj::scalar::normalize_ray;
use gptj::spinforms;
use gptj::{Rational, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn finite_models() -> Vec<Model<Rational>> {
    vec![
        builders::classical(3),
        builders::classical(4),
        builders::square_bit(),
        builders::reducible_fixture(),
        builders::imprimitive_fixture(),
    ]
}

fn rational_vec(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-12i64..=12, 1i64..=6), len).prop_map(|v| v.into_iter().map(|(n, d)| q(n, d)).collect())
}

fn positive_weights(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1i64..=20, len).prop_map(|v| {
        let total: i64 = v.iter().sum();
        v.into_iter().map(|n| q(n, total)).collect()
    })
}

fn ray_set(rays: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = rays.iter().filter_map(|r| normalize_ray(r, 0.0)).collect();
    out.sort_by_key(|r| format!("{r:?}"));
    out.dedup();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetries_preserve_distinguishability(model in 0usize..5, g in 0usize..64, x in 0usize..8, y in 0usize..8) {
        let m = &finite_models()[model];
        let elems = m.group_elements().unwrap();
        let g = &elems[g % elems.len()];
        let n = m.testspace().len();
        let (x, y) = (x % n, y % n);
        let ts = m.testspace();
        prop_assert_eq!(ts.distinguishable(x, y), ts.distinguishable(g.apply(x), g.apply(y)));
    }

    #[test]
    fn weights_stay_weights_under_symmetry(g in 0usize..64, w in positive_weights(2), v in positive_weights(2)) {
        let m = builders::square_bit::<Rational>();
        let elems = m.group_elements().unwrap();
        let g = &elems[g % elems.len()];
        let weight = vec![w[0].clone(), w[1].clone(), v[0].clone(), v[1].clone()];
        let ts = m.testspace();
        prop_assert!(ts.is_probability_weight(&weight, 0.0).unwrap());
        prop_assert!(ts.is_probability_weight(&act_on_weight(g, &weight), 0.0).unwrap());
        let broken = vec![w[0].clone(), w[1].clone(), v[0].clone(), v[1].clone() + q(1, 7)];
        prop_assert!(!ts.is_probability_weight(&act_on_weight(g, &broken), 0.0).unwrap());
    }

    #[test]
    fn group_matrices_are_a_representation(model in 0usize..5, g in 0usize..64, h in 0usize..64) {
        let m = &finite_models()[model];
        let elems = m.group_elements().unwrap();
        let (g, h) = (&elems[g % elems.len()], &elems[h % elems.len()]);
        let gh = m.element_matrix(&g.compose(h)).unwrap();
        let prod = m.element_matrix(g).unwrap().mul(&m.element_matrix(h).unwrap());
        prop_assert_eq!(gh, prod);
        // Outcome vectors are permuted among themselves.
        let mg = m.element_matrix(g).unwrap();
        for x in m.outcome_vectors() {
            let img = mg.mul_vec(x);
            prop_assert!(m.outcome_vectors().contains(&img));
        }
    }

    #[test]
    fn spin_forms_agree_against_the_unit(model in 0usize..5, a in rational_vec(3), num in 1i64..40) {
        let m = &finite_models()[model];
        let a: Vec<Rational> = a.into_iter().take(m.dim()).chain(std::iter::repeat(q(0, 1))).take(m.dim()).collect();
        let base = spinforms::canonical_inner_product(m).unwrap();
        let uniform = spinforms::uniform_form(m).unwrap();
        let lambda = q(num, 13);
        let family = spinforms::lambda_family(&base, m, &lambda);
        let u = m.unit();
        prop_assert_eq!(base.eval(&a, u), uniform.eval(&a, u));
        prop_assert_eq!(base.eval(&a, u), family.eval(&a, u));
        prop_assert!(spinforms::is_spin_form(&base, m).holds());
        // Invariance of every family member under the generators.
        for g in m.permutation_generators() {
            let mg = m.element_matrix(g).unwrap();
            let b = rational_probe(m.dim());
            prop_assert_eq!(family.eval(&mg.mul_vec(&a), &mg.mul_vec(&b)), family.eval(&a, &b));
        }
    }

    #[test]
    fn dual_of_dual_returns_the_cone(model in 0usize..5, num in 1i64..30) {
        let m = &finite_models()[model];
        let base = spinforms::canonical_inner_product(m).unwrap();
        let window = match spinforms::positivity_window(&base, m) {
            Ok(w) => w,
            Err(_) => return Ok(()),
        };
        // A positive λ inside the window keeps the form an inner product.
        let lambda = window.upper.clone() * q(num, 30);
        let form = spinforms::lambda_family(&base, m, &lambda);
        let primal = analysis::primal_cone(m).unwrap();
        let dual = analysis::dual_cone(m, &form).unwrap();
        let back = analysis::dual_of_generators(&dual.generators, &form.matrix, 0.0).unwrap();
        prop_assert_eq!(ray_set(&back.generators), ray_set(&primal.generators));
    }

    #[test]
    fn classical_filters_scale_their_test(factors in prop::collection::vec(1i64..=10, 3)) {
        let m = builders::classical::<Rational>(3);
        let t: Vec<Rational> = factors.iter().map(|&f| q(f, 10)).collect();
        let f = analysis::filter_on_test(&m, 0, &t).unwrap();
        prop_assert_eq!(f.matrix.mul(&f.inverse), Matrix::identity(3));
        let star = f.state_action();
        for (k, &x) in m.testspace().tests()[0].iter().enumerate() {
            let delta = analysis::delta(&m, x).unwrap();
            let scaled: Vec<Rational> = delta.iter().map(|v| v.clone() * t[k].clone()).collect();
            prop_assert_eq!(star.mul_vec(&delta), scaled);
            prop_assert!(m.cone_contains(&f.matrix.mul_vec(m.outcome_vector(x))).unwrap());
            prop_assert!(m.cone_contains(&f.inverse.mul_vec(m.outcome_vector(x))).unwrap());
        }
    }

    #[test]
    fn qubit_filters_scale_their_test(seed in 0u64..1000, t0 in 0.05f64..1.0, t1 in 0.05f64..1.0) {
        let m = builders::quantum(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = hermitian::haar_unitary(2, &mut rng);
        let outcomes: Vec<Vec<f64>> =
            (0..2).map(|i| hermitian::to_coords(&hermitian::projector(&u.column(i).into_owned()))).collect();
        let f = analysis::filter(&m, &outcomes, &[t0, t1]).unwrap();
        for (x, t) in outcomes.iter().zip([t0, t1]) {
            let img = f.matrix.mul_vec(x);
            prop_assert!(img.iter().zip(x).all(|(a, b)| (a - t * b).abs() < 1e-9));
        }
        prop_assert!(f.matrix.mul(&f.inverse).max_abs_diff(&Matrix::identity(4)) < 1e-9);
    }

    #[test]
    fn decomposition_remixes_exactly(w in positive_weights(3)) {
        let m = builders::classical::<Rational>(3);
        let alpha = m.state_covector(&w).unwrap();
        let d = analysis::decompose_state(&m, &alpha).unwrap();
        prop_assert_eq!(d.remix(), alpha);
        prop_assert!(d.is_interior());
    }

    #[test]
    fn qubit_decomposition_remixes(seed in 0u64..1000, p in 0.0f64..1.0) {
        let m = builders::quantum(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = hermitian::haar_unitary(2, &mut rng);
        let rho = &u * hermitian::diagonal(&[p, 1.0 - p]) * u.adjoint();
        let alpha = hermitian::state_covector(&rho);
        let d = analysis::decompose_state(&m, &alpha).unwrap();
        prop_assert!(composites::max_residual(&d.remix(), &alpha) < 1e-9);
    }

    #[test]
    fn isotypic_projections_split_the_complement(model in 0usize..5, v in rational_vec(4)) {
        let m = &finite_models()[model];
        let v: Vec<Rational> = v.into_iter().take(m.dim()).collect();
        let dec = analysis::isotypic_decomposition(m).unwrap();
        let perp = analysis::unit_complement_projection(m, &dec.form);
        let mut sum = vec![q(0, 1); m.dim()];
        for (i, bi) in dec.blocks.iter().enumerate() {
            let pv = bi.projection.mul_vec(&v);
            prop_assert_eq!(bi.projection.mul_vec(&pv), pv.clone());
            for (j, bj) in dec.blocks.iter().enumerate() {
                if i != j {
                    prop_assert!(bj.projection.mul_vec(&pv).iter().all(|x| *x == q(0, 1)));
                }
            }
            for g in m.permutation_generators() {
                let mg = m.element_matrix(g).unwrap();
                prop_assert_eq!(mg.mul_vec(&pv), bi.projection.mul_vec(&mg.mul_vec(&v)));
            }
            sum = sum.iter().zip(&pv).map(|(a, b)| a.clone() + b.clone()).collect();
        }
        prop_assert_eq!(sum, perp.mul_vec(&v));
    }

    #[test]
    fn mixtures_of_products_do_not_signal(weights in positive_weights(3), picks in prop::collection::vec((0usize..8, 0usize..8), 3)) {
        let a = builders::square_bit::<Rational>();
        let b = builders::square_bit::<Rational>();
        let ext_a = a.extreme_states();
        let ext_b = b.extreme_states();
        let mut form = Matrix::zeros(a.dim(), b.dim());
        for (w, (i, j)) in weights.iter().zip(&picks) {
            let alpha = &a.orbit_covectors()[ext_a[i % ext_a.len()]];
            let beta = &b.orbit_covectors()[ext_b[j % ext_b.len()]];
            form = form.add(&Matrix::outer(alpha, beta).scale(w));
        }
        let omega = BipartiteState::new(form, &a, &b).unwrap();
        composites::validate(&a, &b, &omega).unwrap();
        for x in a.outcome_vectors() {
            let sums: Vec<Rational> = b
                .testspace()
                .tests()
                .iter()
                .map(|t| t.iter().fold(q(0, 1), |acc, &y| acc + omega.eval(x, b.outcome_vector(y))))
                .collect();
            prop_assert!(sums.windows(2).all(|p| p[0] == p[1]));
        }
        for x in 0..a.testspace().len() {
            if let Ok(c) = composites::conditional_state(&a, &b, &omega, x, false) {
                prop_assert!(composites::in_state_space(&b, &c).unwrap());
            }
        }
    }

    #[test]
    fn classical_homogeneity_is_exact(w in positive_weights(3), v in positive_weights(3)) {
        let m = builders::classical::<Rational>(3);
        let alpha = m.state_covector(&w).unwrap();
        let beta = m.state_covector(&v).unwrap();
        let h = analysis::homogeneity_automorphism(&m, &alpha, &beta).unwrap();
        prop_assert!(h.order_automorphism);
        prop_assert_eq!(h.state_map().mul_vec(&alpha), beta);
    }
}

fn rational_probe(d: usize) -> Vec<Rational> {
    (0..d).map(|i| q(i as i64 * 2 - 1, 3)).collect()
}
