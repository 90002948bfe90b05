//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so the pass/fail lines always print.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gptj::analysis;
use gptj::builders;
use gptj::composites;
use gptj::hermitian::{self, CMatrix};
use gptj::matrix::Matrix;
use gptj::model::Model;
use gptj::quotient;
use gptj::spinforms;
use gptj::{Rational, Scalar};

/// Identities in float mode.
const FLOAT_IDENTITY_TOL: f64 = 1e-9;
/// Entrywise agreement of the qubit orthogonalizing form with Tr(ab)/2.
const QUBIT_FORM_TOL: f64 = 1e-12;
/// Haar Monte-Carlo oracle for the canonical qubit form.
const HAAR_SAMPLES: usize = 100_000;
const HAAR_TOL: f64 = 1e-2;
/// Total probability for the qubit correlator.
const QUBIT_COMPOSITE_TOL: f64 = 1e-12;
/// Dilation marginal and correlations.
const DILATION_TOL: f64 = 1e-12;
/// Homogeneity reconstruction.
const HOMOGENEITY_TOL: f64 = 1e-9;
/// Wall-clock budget for the identity audit.
const AUDIT_BUDGET_SECS: f64 = 5.0;

type Check = fn() -> Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn audit_model<F: Scalar>(m: &Model<F>) -> Result<(), String> {
    let form = spinforms::canonical_inner_product(m).map_err(err)?;
    let audit = spinforms::lemma1_audit(&form, m).map_err(err)?;
    if !audit.passed() {
        return Err(format!("{}: audit failed\n{}", m.name(), audit.to_text()));
    }
    Ok(())
}

fn identity_audit() -> Result<String, String> {
    let start = Instant::now();
    for n in [2, 3, 5] {
        audit_model(&builders::classical::<Rational>(n))?;
    }
    audit_model(&builders::square_bit::<Rational>())?;
    audit_model(&builders::quantum(2).map_err(err)?)?;
    audit_model(&builders::quantum(3).map_err(err)?)?;
    for k in [2, 3, 5] {
        audit_model(&builders::spin_factor(k).map_err(err)?)?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < AUDIT_BUDGET_SECS, format!("took {secs:.2}s"))?;
    Ok(format!("9 models, {secs:.2}s, float identities within {FLOAT_IDENTITY_TOL:e}"))
}

fn qubit_pipeline() -> Result<String, String> {
    let m = builders::quantum(2).map_err(err)?;
    let base = spinforms::canonical_inner_product(&m).map_err(err)?;

    // Oracle: average α(a)α(b) over Haar-random pure states.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let d = m.dim();
    let mut acc = Matrix::<f64>::zeros(d, d);
    for _ in 0..HAAR_SAMPLES {
        let psi = hermitian::random_vector(2, &mut rng);
        let c = hermitian::state_covector(&hermitian::projector(&psi));
        acc = acc.add(&Matrix::outer(&c, &c));
    }
    let mc = acc.scale(&(1.0 / HAAR_SAMPLES as f64));
    let mc_err = mc.max_abs_diff(&base.matrix);
    ensure(mc_err <= HAAR_TOL, format!("Haar oracle differs by {mc_err}"))?;

    let p = spinforms::parameters(&base, &m).map_err(err)?;
    let close = |a: f64, b: f64| (a - b).abs() <= FLOAT_IDENTITY_TOL;
    let c = p.c.ok_or("missing c")?;
    ensure(
        close(p.r_squared, 1.0 / 3.0) && close(c, 1.0 / 6.0) && close(p.m, 1.0 / 6.0) && close(p.big_m, 1.0 / 3.0),
        format!("parameters {:?}", (p.r_squared, c, p.m, p.big_m)),
    )?;
    let w = spinforms::positivity_window(&base, &m).map_err(err)?;
    ensure(close(w.lower, -3.0) && close(w.upper, 3.0), format!("window [{}, {}]", w.lower, w.upper))?;
    let orth = spinforms::orthogonalizing_form(&m).map_err(err)?;
    let lambda = orth.lambda_bar.ok_or("no λ̄")?;
    ensure(close(lambda, 3.0), format!("λ̄ = {lambda}"))?;
    let form = orth.form.ok_or("no orthogonalizing form")?;
    let half_trace = hermitian::trace_gram(2).scale(&0.5);
    let form_err = form.matrix.max_abs_diff(&half_trace);
    ensure(form_err <= QUBIT_FORM_TOL, format!("B₃ differs from Tr(ab)/2 by {form_err}"))?;
    for (x, y) in m.testspace().perp_pairs() {
        let v = form.eval(m.outcome_vector(x), m.outcome_vector(y));
        ensure(v.abs() <= QUBIT_FORM_TOL, format!("orthogonal pair gives {v}"))?;
    }
    Ok(format!("Haar oracle within {mc_err:.1e}, window [-3, 3], λ̄ = 3, B₃ = Tr(ab)/2 within {form_err:.1e}"))
}

fn square_bit() -> Result<String, String> {
    let m = builders::square_bit::<Rational>();
    ensure(!m.is_sharp().map_err(err)?.holds, "square bit reported sharp")?;
    let form = spinforms::orthogonalizing_form(&m).map_err(err)?.form.ok_or("no orthogonalizing form")?;
    let ts = m.testspace();
    let x = |l: &str| m.outcome_vector(ts.outcome(l).unwrap()).to_vec();
    let values = (form.eval(&x("a"), &x("a")), form.eval(&x("a"), &x("a'")), form.eval(&x("a"), &x("b")));
    ensure(values == (q(1, 2), q(0, 1), q(1, 4)), format!("Gram values {values:?}"))?;
    let sd = analysis::is_self_dual(&m, &form).map_err(err)?;
    ensure(!sd.holds, "square bit reported self-dual")?;
    let witness = sd.witness.ok_or("no witness ray")?;
    ensure(witness.get("ray").is_some(), "witness lacks a ray")?;
    Ok(format!("not sharp, Gram (1/2, 0, 1/4), not self-dual, witness ray {}", witness["ray"]))
}

fn segment_model() -> Result<String, String> {
    let m = builders::example5::<Rational>();
    let v = m.is_state_complete().map_err(err)?;
    ensure(!v.holds, "segment model reported state-complete")?;
    let witness = v.witness.ok_or("no witness weight")?;
    ensure(m.dim() == 2, format!("hull dimension {}", m.dim()))?;
    let cone = analysis::primal_cone(&m).map_err(err)?;
    ensure(cone.generators.len() == 2, "cone is not two-ray")?;
    // The extreme rays are the two outcomes, so E₊ is the first quadrant in that basis.
    for g in &cone.generators {
        let parallel = m.outcome_vectors().iter().any(|x| {
            let ratio = g[0].clone() / x[0].clone();
            g.iter().zip(x).all(|(a, b)| a.clone() == ratio.clone() * b.clone()) && ratio > q(0, 1)
        });
        ensure(parallel, "extreme ray is not an outcome")?;
    }
    Ok(format!("not state-complete (witness {witness}), hull ℝ² with the outcome quadrant"))
}

fn equivalence<F: Scalar>(m: &Model<F>) -> Result<composites::EquivalenceReport, String> {
    composites::self_duality_equivalence(m).map_err(|e| format!("{}: {e}", m.name()))
}

fn self_duality_equivalence() -> Result<String, String> {
    let positive = [
        equivalence(&builders::classical::<Rational>(3))?,
        equivalence(&builders::quantum(2).map_err(err)?)?,
        equivalence(&builders::spin_factor(3).map_err(err)?)?,
    ];
    for r in &positive {
        ensure(r.agree() && r.a.holds, format!("clauses {:?}", (r.a.holds, r.b.holds, r.c.holds)))?;
    }
    let sq = equivalence(&builders::square_bit::<Rational>())?;
    ensure(!sq.b.holds && !sq.c.holds && sq.agree(), format!("square bit clauses {:?}", (sq.a.holds, sq.b.holds, sq.c.holds)))?;
    Ok("classical(3), qubit, spin factor k=3 all true; square bit all false".into())
}

fn composite_laws() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..100 {
        let (na, nb) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let a = builders::classical::<Rational>(na);
        let b = builders::classical::<Rational>(nb);
        let mut raw: Vec<Vec<i64>> = (0..na).map(|_| (0..nb).map(|_| rng.random_range(0..20)).collect()).collect();
        raw[0][0] += 1;
        let total: i64 = raw.iter().flatten().sum();
        let joint = Matrix::from_fn(na, nb, |i, j| q(raw[i][j], total));
        let omega = composites::BipartiteState::new(joint, &a, &b).map_err(err)?;
        composites::validate(&a, &b, &omega).map_err(err)?;
        let ta: Vec<Vec<Rational>> = a.testspace().tests()[0].iter().map(|&x| a.outcome_vector(x).to_vec()).collect();
        let tb: Vec<Vec<Rational>> = b.testspace().tests()[0].iter().map(|&x| b.outcome_vector(x).to_vec()).collect();
        let audit = composites::total_probability_audit(&a, &b, &omega, &ta, &tb);
        ensure(audit.holds, format!("classical trial {trial}: {}", audit.to_json()))?;
    }

    let m = builders::quantum(2).map_err(err)?;
    let conj = composites::build_conjugate(&m).map_err(err)?;
    let eta = &conj.correlator;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let u = hermitian::haar_unitary(2, &mut rng);
        let basis: Vec<Vec<f64>> =
            (0..2).map(|i| hermitian::to_coords(&hermitian::projector(&u.column(i).into_owned()))).collect();
        let audit = composites::total_probability_audit(&m, &conj.model, eta, &basis, &basis);
        worst = worst.max(audit.left_residual).max(audit.right_residual);
        for x in &basis {
            let v = eta.eval(x, &conj.gamma.mul_vec(x));
            ensure((v - 0.5).abs() <= QUBIT_COMPOSITE_TOL, format!("η(x, x̄) = {v}"))?;
        }
    }
    ensure(worst <= QUBIT_COMPOSITE_TOL, format!("qubit residual {worst}"))?;
    ensure(composites::is_correlator(&m, &conj), "η(x, x̄) ≠ 1/n on the battery")?;
    let mixed = hermitian::state_covector(&hermitian::diagonal(&[0.5, 0.5]));
    let (m1, m2) = composites::marginals(&m, &conj.model, eta);
    let marg = composites::max_residual(&m1, &mixed).max(composites::max_residual(&m2, &mixed));
    ensure(marg <= QUBIT_COMPOSITE_TOL, format!("marginals off by {marg}"))?;
    let iso = composites::is_isomorphism_state(&m, &conj.model, eta).map_err(err)?;
    ensure(iso.holds, "Bell correlator is not an isomorphism state")?;
    Ok(format!("100 classical states exact; qubit residual {worst:.1e} over 20 bases; marginals mixed; iso-state"))
}

fn dilation() -> Result<String, String> {
    let m = builders::quantum(2).map_err(err)?;
    let w = CMatrix::from_fn(2, 2, |i, j| {
        Complex64::new(if i != j { 0.0 } else if i == 0 { 0.9 } else { 0.1 }, 0.0)
    });
    let d = composites::strong_conjugate_dilation(&m, &w).map_err(err)?;
    ensure(d.marginal_residual <= DILATION_TOL, format!("marginal residual {}", d.marginal_residual))?;
    ensure(d.diagonal_residual() <= DILATION_TOL, format!("correlation residual {}", d.diagonal_residual()))?;
    let mut eig = d.eigenvalues.clone();
    eig.sort_by(f64::total_cmp);
    ensure((eig[0] - 0.1).abs() <= DILATION_TOL && (eig[1] - 0.9).abs() <= DILATION_TOL, format!("eigenvalues {eig:?}"))?;
    Ok(format!("marginal residual {:.1e}, ω(x, x̄) = α(x), off-diagonal zero", d.marginal_residual))
}

fn quotient_chain() -> Result<String, String> {
    let m = builders::reducible_fixture::<Rational>();
    let dec = analysis::isotypic_decomposition(&m).map_err(err)?;
    ensure(dec.len() >= 2, format!("k = {}", dec.len()))?;
    for j in 0..dec.len() {
        let r = quotient::reduce_with(&m, &dec, j).map_err(err)?;
        ensure(analysis::is_irreducible(&r.model).map_err(err)?.holds, format!("component {j} reducible"))?;
        let orth = spinforms::orthogonalizing_form(&r.model).map_err(err)?;
        ensure(orth.form.is_some(), format!("component {j} lacks an orthogonalizing form"))?;
    }
    let combined = quotient::combined_inner_product(&m).map_err(err)?;
    ensure(
        combined.positive_definite && combined.spin && combined.orthogonalizing,
        "combined form is not a positive-definite orthogonalizing SPIN form",
    )?;
    for (x, y) in m.testspace().perp_pairs() {
        let v = combined.form.eval(m.outcome_vector(x), m.outcome_vector(y));
        ensure(v == q(0, 1), format!("⟨x, y⟩_* = {v} on an orthogonal pair"))?;
    }
    Ok(format!("k = {}, per-block orthogonalizing forms, combined form PD + SPIN + orthogonalizing (exact)", dec.len()))
}

fn incompressibility() -> Result<String, String> {
    for n in 2..=5 {
        let v = quotient::is_incompressible(&builders::classical::<Rational>(n)).map_err(err)?;
        ensure(v.holds, format!("classical({n}) reported compressible"))?;
    }
    let v = quotient::is_incompressible(&builders::imprimitive_fixture::<Rational>()).map_err(err)?;
    ensure(!v.holds, "imprimitive fixture reported incompressible")?;
    let blocks = v.witness.ok_or("no block certificate")?;
    for n in 2..=3 {
        let v = quotient::is_incompressible(&builders::quantum(n).map_err(err)?).map_err(err)?;
        ensure(v.holds && v.mode == gptj::verdict::Mode::Analytic, format!("quantum({n}) verdict {v:?}"))?;
    }
    Ok(format!("classical n = 2..5 primitive; fixture blocks {blocks}; quantum analytic"))
}

fn random_classical_state(rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let raw: Vec<i64> = (0..3).map(|_| rng.random_range(1..=12)).collect();
    let total: i64 = raw.iter().sum();
    raw.iter().map(|&v| q(v, total)).collect()
}

fn random_qubit_state(m: &Model<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let u = hermitian::haar_unitary(2, rng);
    let p: f64 = rng.random_range(0.1..0.9);
    let rho = &u * hermitian::diagonal(&[p, 1.0 - p]) * u.adjoint();
    let c = hermitian::state_covector(&rho);
    analysis::normalize_state(m, &c)
}

fn homogeneity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c3 = builders::classical::<Rational>(3);
    for trial in 0..20 {
        let alpha = c3.state_covector(&random_classical_state(&mut rng)).map_err(err)?;
        let beta = c3.state_covector(&random_classical_state(&mut rng)).map_err(err)?;
        let w = analysis::homogeneity_automorphism(&c3, &alpha, &beta).map_err(err)?;
        ensure(w.order_automorphism && w.image == beta, format!("classical trial {trial}: residual {}", w.residual))?;
        let star = w.filter.state_action();
        for (x, t) in w.filter.outcomes.iter().zip(&w.filter.factors) {
            let i = c3.outcome_vectors().iter().position(|o| o == x).ok_or("filter outcome not found")?;
            let delta = analysis::delta(&c3, i).map_err(err)?;
            let lhs = star.mul_vec(&delta);
            let rhs: Vec<Rational> = delta.iter().map(|v| v.clone() * t.clone()).collect();
            ensure(lhs == rhs, format!("classical trial {trial}: Φ*(δ_x) ≠ t_x δ_x"))?;
        }
    }
    let qubit = builders::quantum(2).map_err(err)?;
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let alpha = random_qubit_state(&qubit, &mut rng);
        let beta = random_qubit_state(&qubit, &mut rng);
        let w = analysis::homogeneity_automorphism(&qubit, &alpha, &beta).map_err(err)?;
        ensure(w.order_automorphism, format!("qubit trial {trial}: not an order automorphism"))?;
        let res = composites::max_residual(&w.state_map().mul_vec(&alpha), &beta);
        ensure(res <= HOMOGENEITY_TOL, format!("qubit trial {trial}: residual {res}"))?;
        worst = worst.max(res);
    }
    Ok(format!("20 exact classical(3) pairs with Φ*(δ_x) = t_x δ_x; 20 qubit pairs, worst residual {worst:.1e}"))
}

fn fixtures() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("fixtures directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    out.sort();
    out
}

fn determinism() -> Result<String, String> {
    let files = fixtures();
    ensure(!files.is_empty(), "no fixtures")?;
    for f in &files {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_gptj"))
                .args(["--seed", "7", "analyze"])
                .arg(f)
                .env_remove("GPTJ_SEED")
                .output()
                .map_err(err)
        };
        let (first, second) = (run()?, run()?);
        ensure(first.status.success(), format!("{}: exit {:?}", f.display(), first.status.code()))?;
        ensure(first.stdout == second.stdout, format!("{}: outputs differ", f.display()))?;
    }
    Ok(format!("{} fixtures byte-identical across two runs", files.len()))
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("spin-form identities on canonical forms", identity_audit),
        ("qubit pipeline", qubit_pipeline),
        ("square bit", square_bit),
        ("non-state-complete segment model", segment_model),
        ("self-duality equivalence", self_duality_equivalence),
        ("composite laws", composite_laws),
        ("strong-conjugate dilation", dilation),
        ("quotient chain", quotient_chain),
        ("incompressibility", incompressibility),
        ("homogeneity probe", homogeneity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
