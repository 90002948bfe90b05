use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gptj::analysis;
use gptj::builders;
use gptj::composites;
use gptj::hermitian;
use gptj::model::Model;
use gptj::quotient;
use gptj::spinforms;
use gptj::verdict::Mode;
use gptj::{lp, Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn exact_builtins() -> Vec<Model<Rational>> {
    vec![
        builders::classical(2),
        builders::classical(3),
        builders::classical(5),
        builders::example5(),
        builders::square_bit(),
        builders::square_bit_from_cosets(),
        builders::reducible_fixture(),
        builders::imprimitive_fixture(),
    ]
}

fn analytic_builtins() -> Vec<Model<f64>> {
    vec![
        builders::quantum(2).unwrap(),
        builders::quantum(3).unwrap(),
        builders::spin_factor(2).unwrap(),
        builders::spin_factor(3).unwrap(),
        builders::spin_factor(5).unwrap(),
    ]
}

#[test]
fn tests_sum_to_the_unit() {
    for m in exact_builtins() {
        for t in m.testspace().tests() {
            let sum = t.iter().fold(vec![q(0, 1); m.dim()], |acc, &x| {
                acc.iter().zip(m.outcome_vector(x)).map(|(a, b)| a.clone() + b.clone()).collect()
            });
            assert_eq!(sum, m.unit(), "{}", m.name());
        }
    }
}

#[test]
fn designated_states_lie_in_the_positive_state_space() {
    for m in exact_builtins() {
        let vertices = m.positive_state_vertices().unwrap();
        for c in m.orbit_covectors() {
            assert!(lp::convex_combination(&vertices, c, 0.0).is_some(), "{}", m.name());
        }
    }
}

#[test]
fn identity_morphisms_lift_to_positive_unital_maps() {
    for m in exact_builtins() {
        let ids: Vec<usize> = (0..m.testspace().len()).collect();
        let gens = m.permutation_generators().to_vec();
        let mor = m.apply_morphism(&m, &ids, &gens).unwrap();
        assert_eq!(mor.lifted.mul_vec(m.unit()), m.unit());
        for x in m.outcome_vectors() {
            assert!(m.cone_contains(&mor.lifted.mul_vec(x)).unwrap());
        }
    }
}

#[test]
fn square_bit_does_not_map_onto_the_classical_bit() {
    let sq = builders::square_bit::<Rational>();
    let bit = builders::classical::<Rational>(2);
    let swap = bit.permutation_generators()[0].clone();
    let res = sq.apply_morphism(&bit, &[0, 1, 0, 1], &[swap.clone(), swap]);
    assert!(res.is_err());
}

#[test]
fn window_endpoint_is_sharp() {
    for m in analytic_builtins() {
        let base = spinforms::canonical_inner_product(&m).unwrap();
        let w = spinforms::positivity_window(&base, &m).unwrap();
        assert!(w.min_value(&w.upper).abs() < 1e-9, "{}", m.name());
        assert!(w.min_value(&(w.upper * (1.0 + 1e-6))) < 0.0, "{}", m.name());
        assert!(w.min_value(&(w.lower * (1.0 + 1e-6))) < 0.0, "{}", m.name());
    }
    for m in exact_builtins() {
        let base = spinforms::canonical_inner_product(&m).unwrap();
        let Ok(w) = spinforms::positivity_window(&base, &m) else { continue };
        assert_eq!(w.min_value(&w.upper), q(0, 1), "{}", m.name());
        assert!(w.min_value(&(w.upper.clone() * q(1_000_001, 1_000_000))).is_negative(0.0));
    }
}

fn orthogonalizing_matches_minimizing<F: Scalar>(m: &Model<F>) {
    if !analysis::is_irreducible(m).unwrap().holds {
        assert!(spinforms::orthogonalizing_form(m).is_err(), "{}", m.name());
        return;
    }
    let base = spinforms::canonical_inner_product(m).unwrap();
    let params = spinforms::parameters(&base, m).unwrap();
    let res = spinforms::orthogonalizing_form(m).unwrap();
    if m.dim() > 1 {
        assert_eq!(res.form.is_some(), spinforms::is_minimizing(&params), "{}", m.name());
    }
    if let Some(form) = &res.form {
        assert!(spinforms::is_orthogonalizing(form, m), "{}", m.name());
        assert!(spinforms::is_spin_form(form, m).holds(), "{}", m.name());
        if m.dim() > 1 {
            assert!(spinforms::is_minimizing(&spinforms::parameters(form, m).unwrap()), "{}", m.name());
        }
    }
}

#[test]
fn orthogonalizing_forms_exist_exactly_when_canonical_is_minimizing() {
    for m in exact_builtins() {
        orthogonalizing_matches_minimizing(&m);
    }
    for m in analytic_builtins() {
        orthogonalizing_matches_minimizing(&m);
    }
}

#[test]
fn orthogonalizing_form_is_unique_along_the_family() {
    let m = builders::square_bit::<Rational>();
    let base = spinforms::canonical_inner_product(&m).unwrap();
    let orth = spinforms::orthogonalizing_form(&m).unwrap().form.unwrap();
    let mut hits = 0;
    for num in -40..=40 {
        let f = spinforms::lambda_family(&base, &m, &q(num, 8));
        if spinforms::is_orthogonalizing(&f, &m) {
            hits += 1;
            assert_eq!(f.matrix, orth.matrix);
        }
    }
    assert_eq!(hits, 1);
    let family = spinforms::renormalize_family(&m).unwrap();
    assert_eq!(family.at(&q(1, 1)).matrix, orth.matrix);
}

#[test]
fn sharp_state_complete_models_are_self_dual() {
    for m in exact_builtins() {
        let sharp = m.is_sharp().unwrap().holds;
        let complete = m.is_state_complete().unwrap().holds;
        let bisym = m.is_bisymmetric().unwrap().holds;
        let Ok(res) = spinforms::orthogonalizing_form(&m) else { continue };
        let Some(form) = res.form else { continue };
        if sharp && complete && bisym {
            assert!(analysis::is_self_dual(&m, &form).unwrap().holds, "{}", m.name());
        }
    }
    for m in analytic_builtins() {
        let form = spinforms::orthogonalizing_form(&m).unwrap().form.unwrap();
        assert!(analysis::is_self_dual(&m, &form).unwrap().holds, "{}", m.name());
    }
    let sq = builders::square_bit::<Rational>();
    let form = spinforms::orthogonalizing_form(&sq).unwrap().form.unwrap();
    assert!(!analysis::is_self_dual(&sq, &form).unwrap().holds);
}

#[test]
fn incompressible_sharp_complete_models_are_self_dual() {
    for n in 2..=5 {
        let m = builders::classical::<Rational>(n);
        assert!(quotient::is_incompressible(&m).unwrap().holds);
        let form = spinforms::orthogonalizing_form(&m).unwrap().form.unwrap();
        assert!(analysis::is_self_dual(&m, &form).unwrap().holds);
    }
}

#[test]
fn correlator_conditionals_stay_in_the_state_space() {
    let c3 = builders::classical::<Rational>(3);
    let conj = composites::build_conjugate(&c3).unwrap();
    for x in 0..c3.testspace().len() {
        composites::conditional_state(&c3, &conj.model, &conj.correlator, x, true).unwrap();
    }
    let qubit = builders::quantum(2).unwrap();
    let conj = composites::build_conjugate(&qubit).unwrap();
    for x in 0..qubit.testspace().len() {
        composites::conditional_state(&qubit, &conj.model, &conj.correlator, x, true).unwrap();
    }
}

#[test]
fn equivalence_clauses_agree_on_builtins() {
    for m in [builders::classical::<Rational>(2), builders::classical(3), builders::classical(5), builders::square_bit()] {
        assert!(composites::self_duality_equivalence(&m).unwrap().agree(), "{}", m.name());
    }
    for m in analytic_builtins() {
        let r = composites::self_duality_equivalence(&m).unwrap();
        assert!(r.agree() && r.a.holds, "{}", m.name());
    }
}

#[test]
fn dilation_is_supported_on_the_conjugate_graph() {
    let m = builders::quantum(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = hermitian::haar_unitary(2, &mut rng);
    let w = &u * hermitian::diagonal(&[0.7, 0.3]) * u.adjoint();
    let d = composites::strong_conjugate_dilation(&m, &w).unwrap();
    assert!(d.diagonal_residual() < 1e-12);
    assert!(d.marginal_residual < 1e-12);
    assert!(d.stabilizer_residual < 1e-12);
}

#[test]
fn reduced_components_inherit_bisymmetry_and_separation() {
    let m = builders::reducible_fixture::<Rational>();
    assert!(m.is_bisymmetric().unwrap().holds);
    let dec = analysis::isotypic_decomposition(&m).unwrap();
    for j in 0..dec.len() {
        let r = quotient::reduce_with(&m, &dec, j).unwrap();
        assert!(r.model.is_bisymmetric().unwrap().holds);
        let ts = r.model.testspace();
        for x in 0..ts.len() {
            for y in 0..x {
                let separated = r.model.orbit_states().iter().any(|s| s[x] != s[y]);
                assert!(separated, "component {j}: outcomes {x} and {y} coincide on every state");
            }
        }
    }
    let combined = quotient::combined_inner_product(&m).unwrap();
    assert!(combined.positive_definite && combined.orthogonalizing && combined.spin);
}

#[test]
fn qubit_and_three_dimensional_spin_factor_share_parameters() {
    let qubit = builders::quantum(2).unwrap();
    let spin = builders::spin_factor(3).unwrap();
    let pq = spinforms::parameters(&spinforms::canonical_inner_product(&qubit).unwrap(), &qubit).unwrap();
    let ps = spinforms::parameters(&spinforms::canonical_inner_product(&spin).unwrap(), &spin).unwrap();
    assert!((pq.r_squared - ps.r_squared).abs() < 1e-12);
    assert!((pq.m - ps.m).abs() < 1e-12);
    assert!((pq.big_m - ps.big_m).abs() < 1e-12);
    assert!((pq.c.unwrap() - ps.c.unwrap()).abs() < 1e-12);
}

#[test]
fn jordan_squares_fill_the_self_dual_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let qubit = builders::quantum(3).unwrap();
    let form = spinforms::orthogonalizing_form(&qubit).unwrap().form.unwrap();
    for _ in 0..50 {
        let u = hermitian::haar_unitary(3, &mut rng);
        let h = &u * hermitian::diagonal(&[1.3, -0.4, 0.2]) * u.adjoint();
        let sq = hermitian::to_coords(&(&h * &h));
        assert!(qubit.cone_contains(&sq).unwrap());
        assert!(analysis::in_dual_cone(&qubit, &form, &sq));
    }
    let spin = builders::spin_factor(4).unwrap();
    let form = spinforms::orthogonalizing_form(&spin).unwrap().form.unwrap();
    for _ in 0..50 {
        let mut v = vec![rand::Rng::random_range(&mut rng, -1.0..1.0)];
        v.extend(hermitian::random_unit_vector(4, &mut rng).iter().map(|x| x * 0.8));
        let sq = hermitian::spin_jordan_product(&v, &v);
        assert!(spin.cone_contains(&sq).unwrap());
        assert!(analysis::in_dual_cone(&spin, &form, &sq));
    }
}

#[test]
fn analytic_verdicts_never_claim_exactness() {
    for m in analytic_builtins() {
        let verdicts = [
            m.is_sharp().unwrap(),
            m.is_state_complete().unwrap(),
            m.is_bisymmetric().unwrap(),
            analysis::is_irreducible(&m).unwrap(),
        ];
        for v in verdicts {
            assert!(matches!(v.mode, Mode::Analytic | Mode::Probabilistic | Mode::Float), "{}", m.name());
        }
    }
    for m in exact_builtins() {
        assert_eq!(m.is_sharp().unwrap().mode, Mode::Exact);
    }
}

#[test]
fn coset_square_bit_matches_the_direct_square_bit() {
    let a = builders::square_bit::<Rational>();
    let b = builders::square_bit_from_cosets::<Rational>();
    assert_eq!(a.dim(), b.dim());
    assert_eq!(a.testspace().tests().len(), b.testspace().tests().len());
    let fa = spinforms::orthogonalizing_form(&a).unwrap().form.unwrap();
    let fb = spinforms::orthogonalizing_form(&b).unwrap().form.unwrap();
    let pa = spinforms::parameters(&fa, &a).unwrap();
    let pb = spinforms::parameters(&fb, &b).unwrap();
    assert_eq!(pa, pb);
    assert!(!analysis::is_irreducible(&builders::reducible_fixture::<Rational>()).unwrap().holds);
}

#[test]
fn float_and_exact_square_bits_agree() {
    let e = builders::square_bit::<Rational>();
    let f = builders::square_bit::<f64>();
    let fe = spinforms::orthogonalizing_form(&e).unwrap().form.unwrap().matrix;
    let ff = spinforms::orthogonalizing_form(&f).unwrap().form.unwrap().matrix;
    assert!(fe.to_f64().max_abs_diff(&ff) < 1e-12);
}
