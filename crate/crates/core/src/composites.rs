//! Non-signaling bipartite states as bilinear forms, conditioning,
//! conjugates and correlators, dilations, and dagger adjoints.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::analysis;
use crate::error::{Error, Result};
use crate::hermitian::{self, CMatrix};
use crate::lp;
use crate::matrix::Matrix;
use crate::model::{Model, ModelKind};
use crate::polyhedral;
use crate::scalar::{dot, vec_approx_eq, vec_scale, vec_sub, vec_to_json, Scalar};
use crate::spinforms::{self, BilinearForm, Provenance};
use crate::verdict::{Mode, Verdict};

/// Which tensor cone membership annotations are computed against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TensorCone {
    #[default]
    Projective,
    Injective,
}

impl TensorCone {
    pub fn tag(self) -> &'static str {
        match self {
            TensorCone::Projective => "projective",
            TensorCone::Injective => "injective",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "projective" => Some(TensorCone::Projective),
            "injective" => Some(TensorCone::Injective),
            _ => None,
        }
    }
}

/// A bipartite state `ω(x, y) = B_ω(x, y)` with `B_ω` of shape `dim E(A) × dim E(B)`.
#[derive(Clone, Debug)]
pub struct BipartiteState<F: Scalar> {
    pub form: Matrix<F>,
    pub left: String,
    pub right: String,
    pub tensor_cone: TensorCone,
}

impl<F: Scalar> BipartiteState<F> {
    pub fn new(form: Matrix<F>, left: &Model<F>, right: &Model<F>) -> Result<Self> {
        if form.rows() != left.dim() || form.cols() != right.dim() {
            return Err(Error::DimensionMismatch { expected: left.dim() * right.dim(), found: form.rows() * form.cols() });
        }
        Ok(Self { form, left: left.name().to_string(), right: right.name().to_string(), tensor_cone: TensorCone::default() })
    }

    pub fn with_tensor_cone(mut self, cone: TensorCone) -> Self {
        self.tensor_cone = cone;
        self
    }

    pub fn eval(&self, a: &[F], b: &[F]) -> F {
        self.form.bilinear(a, b)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "left": self.left,
            "right": self.right,
            "tensorCone": self.tensor_cone.tag(),
            "form": self.form.to_json(),
        })
    }
}

/// Positive on outcome pairs and normalized.
pub fn validate<F: Scalar>(a: &Model<F>, b: &Model<F>, omega: &BipartiteState<F>) -> Result<()> {
    let tol = a.tol();
    for (i, x) in a.outcome_vectors().iter().enumerate() {
        for (j, y) in b.outcome_vectors().iter().enumerate() {
            let v = omega.eval(x, y);
            if v.is_negative(tol) {
                return Err(Error::Precondition(format!(
                    "ω({}, {}) = {v} < 0",
                    a.testspace().label(i),
                    b.testspace().label(j)
                )));
            }
        }
    }
    let total = omega.eval(a.unit(), b.unit());
    if !total.approx_eq(&F::one(), tol.max(if F::EXACT { 0.0 } else { 1e-9 })) {
        return Err(Error::Precondition(format!("ω(u, u) = {total} ≠ 1")));
    }
    Ok(())
}

/// `γ(xy) = α(x) β(y)`.
pub fn product_state<F: Scalar>(a: &Model<F>, b: &Model<F>, alpha: &[F], beta: &[F]) -> Result<BipartiteState<F>> {
    BipartiteState::new(Matrix::outer(alpha, beta), a, b)
}

/// `(ω₁, ω₂) = (B_ω(·, u), B_ω(u, ·))` as covectors.
pub fn marginals<F: Scalar>(a: &Model<F>, b: &Model<F>, omega: &BipartiteState<F>) -> (Vec<F>, Vec<F>) {
    (omega.form.mul_vec(b.unit()), omega.form.vec_mul(a.unit()))
}

/// `α ∈ Ω` for a state covector.
pub fn in_state_space<F: Scalar>(model: &Model<F>, c: &[F]) -> Result<bool> {
    let tol = model.tol();
    if !dot(c, model.unit()).approx_eq(&F::one(), tol.max(if F::EXACT { 0.0 } else { 1e-9 })) {
        return Ok(false);
    }
    Ok(match model.kind() {
        ModelKind::Finite => {
            let ext: Vec<Vec<F>> = model.extreme_states().iter().map(|&i| model.orbit_covectors()[i].clone()).collect();
            lp::convex_combination(&ext, c, tol).is_some()
        }
        _ => in_state_cone(model, c),
    })
}

/// Membership in `V₊`, the cone generated by `Ω`.
pub fn in_state_cone<F: Scalar>(model: &Model<F>, c: &[F]) -> bool {
    let tol = model.tol().max(if F::EXACT { 0.0 } else { 1e-10 });
    match model.kind() {
        ModelKind::Finite => {
            let ext: Vec<Vec<F>> = model.extreme_states().iter().map(|&i| model.orbit_covectors()[i].clone()).collect();
            lp::conic_combination(&ext, c, model.tol()).is_some()
        }
        ModelKind::Quantum(n) => {
            let gram = hermitian::trace_gram(n);
            let h: Vec<f64> = c.iter().enumerate().map(|(k, v)| v.to_f64() / gram[(k, k)]).collect();
            hermitian::is_psd(&hermitian::from_coords(&h, n), tol)
        }
        ModelKind::SpinFactor(_) => {
            hermitian::in_lorentz_cone(&c.iter().map(Scalar::to_f64).collect::<Vec<_>>(), tol)
        }
    }
}

/// `ω_{2|x} = ω(x, ·) / ω₁(x)`.
///
/// With `check` set, the result is required to lie in `Ω(B)`.
pub fn conditional_state<F: Scalar>(
    a: &Model<F>,
    b: &Model<F>,
    omega: &BipartiteState<F>,
    x: usize,
    check: bool,
) -> Result<Vec<F>> {
    let xv = a.outcome_vector(x);
    let mass = omega.eval(xv, b.unit());
    if mass.is_zero_tol(a.tol()) {
        return Err(Error::ZeroMarginal(a.testspace().label(x).to_string()));
    }
    let cond: Vec<F> = omega.form.vec_mul(xv).into_iter().map(|v| v / mass.clone()).collect();
    if check && !in_state_space(b, &cond)? {
        return Err(Error::ConditionalOutsideStateSpace(a.testspace().label(x).to_string()));
    }
    Ok(cond)
}

/// Conditioning on an outcome of the right factor: `ω_{1|y}`.
pub fn conditional_state_left<F: Scalar>(a: &Model<F>, b: &Model<F>, omega: &BipartiteState<F>, y: usize) -> Result<Vec<F>> {
    let yv = b.outcome_vector(y);
    let mass = omega.eval(a.unit(), yv);
    if mass.is_zero_tol(b.tol()) {
        return Err(Error::ZeroMarginal(b.testspace().label(y).to_string()));
    }
    Ok(omega.form.mul_vec(yv).into_iter().map(|v| v / mass.clone()).collect())
}

#[derive(Clone, Debug)]
pub struct TotalProbabilityReport {
    pub left_residual: f64,
    pub right_residual: f64,
    pub holds: bool,
}

impl TotalProbabilityReport {
    pub fn to_json(&self) -> Value {
        json!({"holds": self.holds, "leftResidual": self.left_residual, "rightResidual": self.right_residual})
    }
}

/// `ω₁ = Σ_{y∈F} ω₂(y) ω_{1|y}` and `ω₂ = Σ_{x∈E} ω₁(x) ω_{2|x}`, with the
/// tests given as outcome vectors.
pub fn total_probability_audit<F: Scalar>(
    a: &Model<F>,
    b: &Model<F>,
    omega: &BipartiteState<F>,
    test_a: &[Vec<F>],
    test_b: &[Vec<F>],
) -> TotalProbabilityReport {
    let tol = a.tol();
    let (m1, m2) = marginals(a, b, omega);
    let mut left = vec![F::zero(); a.dim()];
    for y in test_b {
        let w = omega.eval(a.unit(), y);
        if w.is_zero_tol(tol) {
            continue;
        }
        let cond: Vec<F> = omega.form.mul_vec(y).into_iter().map(|v| v / w.clone()).collect();
        left = crate::scalar::vec_add(&left, &vec_scale(&cond, &w));
    }
    let mut right = vec![F::zero(); b.dim()];
    for x in test_a {
        let w = omega.eval(x, b.unit());
        if w.is_zero_tol(tol) {
            continue;
        }
        let cond: Vec<F> = omega.form.vec_mul(x).into_iter().map(|v| v / w.clone()).collect();
        right = crate::scalar::vec_add(&right, &vec_scale(&cond, &w));
    }
    let res = |p: &[F], q: &[F]| vec_sub(p, q).iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let left_residual = res(&left, &m1);
    let right_residual = res(&right, &m2);
    let holds = if F::EXACT {
        left == m1 && right == m2
    } else {
        left_residual <= 1e-12 && right_residual <= 1e-12
    };
    TotalProbabilityReport { left_residual, right_residual, holds }
}

/// The conditioning map `a ↦ B_ω(a, ·)` as a matrix `dim E(B) × dim E(A)`,
/// with whether its range on `E₊(A)` lies in `V(B)₊`.
pub fn conditioning_map<F: Scalar>(a: &Model<F>, b: &Model<F>, omega: &BipartiteState<F>) -> (Matrix<F>, bool) {
    let map = omega.form.transpose();
    let positive = a.outcome_vectors().iter().all(|x| in_state_cone(b, &map.mul_vec(x)));
    (map, positive)
}

/// Conditioning map is an order-isomorphism `E(A) → V(B)`.
pub fn is_isomorphism_state<F: Scalar>(a: &Model<F>, b: &Model<F>, omega: &BipartiteState<F>) -> Result<Verdict> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let (map, positive) = conditioning_map(a, b, omega);
    let mode = if a.is_analytic() { Mode::Analytic } else { Mode::for_scalar::<F>() };
    let Some(inverse) = map.inverse(a.tol()) else {
        return Ok(Verdict::new("isomorphism-state", false, mode).with_note("conditioning map is singular"));
    };
    if !positive {
        return Ok(Verdict::new("isomorphism-state", false, mode).with_note("range leaves the state cone"));
    }
    if a.is_analytic() {
        // Pull sampled states back and require them to land in E₊(A).
        for c in b.orbit_covectors() {
            if !a.cone_contains(&inverse.mul_vec(c))? {
                return Ok(Verdict::new("isomorphism-state", false, mode)
                    .with_witness(json!({"state": vec_to_json(c)}))
                    .with_note("a state pulls back outside E₊(A)"));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(a.options().seed);
        for _ in 0..64 {
            let c = random_state_covector(b, &mut rng);
            if !a.cone_contains(&inverse.mul_vec(&c))? {
                return Ok(Verdict::new("isomorphism-state", false, mode)
                    .with_witness(json!({"state": vec_to_json(&c)}))
                    .with_note("a sampled state pulls back outside E₊(A)"));
            }
        }
        return Ok(Verdict::new("isomorphism-state", true, mode)
            .with_note("invertible; positive on outcomes; inverse positive on pure and sampled states"));
    }
    let tol = a.tol();
    let images: Vec<Vec<F>> = analysis::primal_cone(a)?.generators.iter().map(|g| map.mul_vec(g)).collect();
    let states: Vec<Vec<F>> = b.extreme_states().iter().map(|&i| b.orbit_covectors()[i].clone()).collect();
    let target = polyhedral::extreme_generators(&states, tol).unwrap_or(states);
    let holds = polyhedral::same_rays(&images, &target, tol);
    Ok(Verdict::new("isomorphism-state", holds, mode)
        .with_note(format!("{} outcome rays against {} state rays", images.len(), target.len())))
}

fn random_state_covector<F: Scalar>(model: &Model<F>, rng: &mut ChaCha8Rng) -> Vec<F> {
    match model.kind() {
        ModelKind::Quantum(n) => {
            let u = hermitian::haar_unitary(n, rng);
            let mut p: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= s);
            let rho = &u * hermitian::diagonal(&p) * u.adjoint();
            hermitian::state_covector(&rho).into_iter().map(F::from_f64).collect()
        }
        ModelKind::SpinFactor(k) => {
            let dir = hermitian::random_unit_vector(k, rng);
            let r: f64 = rng.random_range(0.0..1.0);
            let mut c = vec![F::one()];
            c.extend(dir.iter().map(|d| F::from_f64(d * r)));
            c
        }
        ModelKind::Finite => model.orbit_covectors()[0].clone(),
    }
}

/// A conjugate system: an isomorphic copy with a correlator along `γ`.
#[derive(Clone, Debug)]
pub struct Conjugate<F: Scalar> {
    pub model: Model<F>,
    /// Outcome bijection `x ↦ γ(x)` (finite kinds; identity labels).
    pub outcome_map: Vec<usize>,
    /// `γ` on hull coordinates.
    pub gamma: Matrix<F>,
    pub correlator: BipartiteState<F>,
    /// The SPIN form `B(a, b) = η(a, γ(b))`.
    pub form: BilinearForm<F>,
}

impl<F: Scalar> Conjugate<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "conjugate": self.model.name(),
            "gamma": self.gamma.to_json(),
            "correlator": self.correlator.to_json(),
            "form": self.form.to_json(),
        })
    }
}

/// Builds `Ā` and the correlator `η(a, b) = B̄(a, γ⁻¹ b)` from the orthogonalizing form.
pub fn build_conjugate<F: Scalar>(model: &Model<F>) -> Result<Conjugate<F>> {
    let res = spinforms::orthogonalizing_form(model)?;
    let form = res.form.ok_or_else(|| Error::NoOrthogonalizingForm {
        c: res.canonical.c.as_ref().map(|c| c.to_string()).unwrap_or_default(),
        m: res.canonical.m.to_string(),
    })?;
    let gamma = match model.kind() {
        ModelKind::Quantum(n) => {
            let d: Vec<F> = hermitian::conjugate_coords(&vec![1.0; n * n], n).into_iter().map(F::from_f64).collect();
            Matrix::diagonal(&d)
        }
        _ => Matrix::identity(model.dim()),
    };
    let conj = model.clone().with_name(&format!("{}-bar", model.name()));
    // γ is an involution in every supported kind, so γ⁻¹ = γ.
    let eta = form.matrix.mul(&gamma);
    let correlator = BipartiteState::new(eta, model, &conj)?;
    if !model.is_analytic() {
        // η must be a state of a non-signaling composite: both conditionals land in Ω.
        for x in 0..model.testspace().len() {
            let right = conditional_state(model, &conj, &correlator, x, true);
            let left = conditional_state_left(model, &conj, &correlator, x);
            let left_ok = match &left {
                Ok(c) => in_state_space(model, c)?,
                Err(_) => false,
            };
            if right.is_err() || !left_ok {
                return Err(Error::Precondition(format!(
                    "no conjugate: conditioning the candidate correlator on `{}` leaves the state space",
                    model.testspace().label(x)
                )));
            }
        }
    }
    let mut form = form;
    form.provenance = Provenance::Correlator;
    Ok(Conjugate { outcome_map: (0..model.testspace().len()).collect(), model: conj, gamma, correlator, form })
}

/// `η(x, γ(x)) = 1/n` on every outcome.
pub fn is_correlator<F: Scalar>(model: &Model<F>, conj: &Conjugate<F>) -> bool {
    let n = F::from_usize(model.rank()).recip();
    let tol = if F::EXACT { 0.0 } else { 1e-9 };
    model
        .outcome_vectors()
        .iter()
        .all(|x| conj.correlator.eval(x, &conj.gamma.mul_vec(x)).approx_eq(&n, tol))
}

/// Transpose-average then group-average of a correlator along an identity `γ`.
///
/// Returns the symmetrized state and whether it was already invariant
/// (analytic kinds are returned unchanged).
pub fn symmetrize_correlator<F: Scalar>(eta: &BipartiteState<F>, model: &Model<F>) -> Result<(BipartiteState<F>, bool)> {
    if model.is_analytic() {
        return Ok((eta.clone(), true));
    }
    let sym = eta.form.add(&eta.form.transpose()).scale(&F::ratio(1, 2));
    let mats = model.all_group_matrices()?;
    let mut acc = Matrix::zeros(model.dim(), model.dim());
    for g in &mats {
        acc = acc.add(&g.transpose().mul(&sym).mul(g));
    }
    let avg = acc.scale(&F::from_usize(mats.len()).recip());
    let unchanged = avg.approx_eq(&eta.form, model.tol());
    let mut out = eta.clone();
    out.form = avg;
    Ok((out, unchanged))
}

/// Invariance of a form under every group element (finite) or the battery.
pub fn is_invariant_form<F: Scalar>(form: &Matrix<F>, model: &Model<F>) -> Result<bool> {
    let tol = if F::EXACT { 0.0 } else { 1e-9 };
    Ok(model.all_group_matrices()?.iter().all(|g| g.transpose().mul(form).mul(g).approx_eq(form, tol)))
}

/// Purification of a density matrix as a correlating bipartite state.
#[derive(Clone, Debug)]
pub struct Dilation {
    pub state: BipartiteState<f64>,
    pub eigenvalues: Vec<f64>,
    pub marginal_residual: f64,
    pub stabilizer_residual: f64,
    /// `ω(x_i, γ(x_j))` on the diagonalizing test.
    pub correlations: Vec<Vec<f64>>,
}

impl Dilation {
    pub fn diagonal_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.correlations.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expected = if i == j { self.eigenvalues[i] } else { 0.0 };
                worst = worst.max((v - expected).abs());
            }
        }
        worst
    }

    pub fn to_json(&self) -> Value {
        json!({
            "state": self.state.to_json(),
            "eigenvalues": self.eigenvalues,
            "marginalResidual": self.marginal_residual,
            "stabilizerResidual": self.stabilizer_residual,
            "correlations": self.correlations,
        })
    }
}

/// `Ψ_W = Σ √λ_x x ⊗ x̄` and the state `ω(a, b) = ⟨Ψ_W, a ⊗ b Ψ_W⟩`.
pub fn strong_conjugate_dilation(model: &Model<f64>, w: &CMatrix) -> Result<Dilation> {
    let ModelKind::Quantum(n) = model.kind() else {
        return Err(Error::Unsupported("strong-conjugate dilation needs a quantum model".into()));
    };
    if w.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.nrows() });
    }
    let (values, vectors) = hermitian::eigh(w);
    let mut psi = DVector::<Complex64>::zeros(n * n);
    for (l, v) in values.iter().zip(&vectors) {
        let amp = Complex64::new(l.max(0.0).sqrt(), 0.0);
        psi += v.kronecker(&v.map(|z| z.conj())) * amp;
    }
    let pairing = |psi: &DVector<Complex64>, a: &CMatrix, b: &CMatrix| (psi.adjoint() * a.kronecker(b) * psi)[(0, 0)].re;
    let d = n * n;
    let basis: Vec<CMatrix> = (0..d).map(|k| hermitian::basis_element(n, k)).collect();
    let form = Matrix::from_fn(d, d, |k, l| pairing(&psi, &basis[k], &basis[l]));
    let conj = model.clone().with_name(&format!("{}-bar", model.name()));
    let state = BipartiteState::new(form, model, &conj)?;

    let (m1, _) = marginals(model, &conj, &state);
    let target = hermitian::state_covector(w);
    let marginal_residual = vec_sub(&m1, &target).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));

    // A unitary in the stabilizer of W: a function of W with random phases.
    let mut rng = ChaCha8Rng::seed_from_u64(model.options().seed);
    let mut u = CMatrix::zeros(n, n);
    for v in &vectors {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        u += v * v.adjoint() * Complex64::from_polar(1.0, theta);
    }
    let ubar = u.map(|z| z.conj());
    let moved = u.kronecker(&ubar) * &psi;
    let mut stabilizer_residual: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            stabilizer_residual = stabilizer_residual.max((pairing(&moved, &basis[k], &basis[l]) - state.form[(k, l)]).abs());
        }
    }

    let projectors: Vec<Vec<f64>> = vectors.iter().map(|v| hermitian::to_coords(&hermitian::projector(v))).collect();
    let correlations = projectors
        .iter()
        .map(|x| projectors.iter().map(|y| state.eval(x, &hermitian::conjugate_coords(y, n))).collect())
        .collect();
    Ok(Dilation { state, eigenvalues: values, marginal_residual, stabilizer_residual, correlations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorBranch {
    Orthogonalizing,
    Uniform,
    Violation,
}

impl FactorBranch {
    pub fn tag(self) -> &'static str {
        match self {
            FactorBranch::Orthogonalizing => "orthogonalizing",
            FactorBranch::Uniform => "uniform",
            FactorBranch::Violation => "violation",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FactorabilityReport<F> {
    /// `c₁r₂²`, `r₁²c₂`, `c₁c₂`: the values on the three kinds of distinguishable product pairs.
    pub pair_values: [F; 3],
    pub consistent: bool,
    pub branch: FactorBranch,
}

impl<F: Scalar> FactorabilityReport<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "pairValues": vec_to_json(&self.pair_values),
            "consistent": self.consistent,
            "branch": self.branch.tag(),
        })
    }
}

/// Audit of a product form `B₁ ⊗ B₂` on `E(A) ⊗ E(B)`: a SPIN form must take
/// one value on distinguishable pairs, which forces both factors to be
/// orthogonalizing or the product to be uniform.
pub fn factorability_audit<F: Scalar>(
    a: &Model<F>,
    b: &Model<F>,
    omega: &Matrix<F>,
    b1: &BilinearForm<F>,
    b2: &BilinearForm<F>,
) -> Result<FactorabilityReport<F>> {
    let product = b1.matrix.kron(&b2.matrix);
    let tol = if F::EXACT { 0.0 } else { 1e-9 };
    if !omega.approx_eq(&product, tol) {
        return Err(Error::Precondition("factorization inconsistent with the supplied form".into()));
    }
    let p1 = spinforms::parameters(b1, a)?;
    let p2 = spinforms::parameters(b2, b)?;
    let c1 = p1.c.clone().unwrap_or_else(F::zero);
    let c2 = p2.c.clone().unwrap_or_else(F::zero);
    let values = [
        c1.clone() * p2.r_squared.clone(),
        p1.r_squared.clone() * c2.clone(),
        c1.clone() * c2.clone(),
    ];
    let consistent = values[0].approx_eq(&values[1], tol) && values[1].approx_eq(&values[2], tol);
    let branch = if !consistent {
        FactorBranch::Violation
    } else if c1.is_zero_tol(tol) && c2.is_zero_tol(tol) {
        FactorBranch::Orthogonalizing
    } else {
        FactorBranch::Uniform
    };
    Ok(FactorabilityReport { pair_values: values, consistent, branch })
}

/// `φ† = B_A⁻¹ φᵀ B_B` for `φ: E(A) → E(B)` given as a `dim B × dim A` matrix.
pub fn dagger_adjoint<F: Scalar>(phi: &Matrix<F>, form_a: &BilinearForm<F>, form_b: &BilinearForm<F>, tol: f64) -> Result<Matrix<F>> {
    let inv = form_a
        .matrix
        .inverse(tol)
        .ok_or_else(|| Error::Precondition("degenerate form on the domain".into()))?;
    if form_b.matrix.inverse(tol).is_none() {
        return Err(Error::Precondition("degenerate form on the codomain".into()));
    }
    Ok(inv.mul(&phi.transpose()).mul(&form_b.matrix))
}

/// `π(g⁻¹) = π(g)†` for every group matrix of the model.
pub fn group_dagger_check<F: Scalar>(model: &Model<F>, form: &BilinearForm<F>) -> Result<Verdict> {
    let tol = model.tol();
    let cmp = if F::EXACT { 0.0 } else { 1e-9 };
    let mats = model.all_group_matrices()?;
    for (k, g) in mats.iter().enumerate() {
        let dagger = dagger_adjoint(g, form, form, tol)?;
        let inv = g.inverse(tol).ok_or_else(|| Error::Precondition("singular group matrix".into()))?;
        if !dagger.approx_eq(&inv, cmp) {
            return Ok(Verdict::new("dagger", false, Mode::for_scalar::<F>()).with_witness(json!({"element": k})));
        }
    }
    let mode = if model.is_analytic() { Mode::Analytic } else { Mode::for_scalar::<F>() };
    Ok(Verdict::new("dagger", true, mode).with_note(format!("checked {} group matrices", mats.len())))
}

/// `dim E(AB) = dim E(A) · dim E(B)`.
pub fn is_locally_tomographic(dim_a: usize, dim_b: usize, composite_dim: usize) -> bool {
    composite_dim == dim_a * dim_b
}

/// The three clauses of the self-duality equivalence, computed independently.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub a: Verdict,
    pub b: Verdict,
    pub c: Verdict,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.a.holds == self.b.holds && self.b.holds == self.c.holds
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "c": self.c.to_json(),
            "agree": self.agree(),
        })
    }
}

/// (a) state-complete with an isomorphism correlator; (b) self-dual under
/// `B(a, b) = η(a, γ(b))`; (c) state-complete and sharp.
pub fn self_duality_equivalence<F: Scalar>(model: &Model<F>) -> Result<EquivalenceReport> {
    let complete = model.is_state_complete()?;
    let conj = build_conjugate(model)?;
    let iso = is_isomorphism_state(model, &conj.model, &conj.correlator)?;
    let a = Verdict::new("state-complete and isomorphism correlator", complete.holds && iso.holds, iso.mode)
        .with_note(format!("state-complete: {}, isomorphism state: {}", complete.holds, iso.holds));
    let pairing = BilinearForm::new(conj.correlator.form.mul(&conj.gamma), Provenance::Correlator);
    let b = analysis::is_self_dual(model, &pairing)?;
    let b = Verdict { property: "self-dual under the correlator pairing".into(), ..b };
    let sharp = model.is_sharp()?;
    let c = Verdict::new("state-complete and sharp", complete.holds && sharp.holds, sharp.mode)
        .with_note(format!("state-complete: {}, sharp: {}", complete.holds, sharp.holds));
    Ok(EquivalenceReport { a, b, c })
}

/// Residual helper shared by tests: max entrywise difference.
pub fn max_residual<F: Scalar>(a: &[F], b: &[F]) -> f64 {
    if vec_approx_eq(a, b, 0.0) {
        return 0.0;
    }
    vec_sub(a, b).iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::scalar::Rational;

    #[test]
    fn product_state_marginals() {
        let a = builders::classical::<Rational>(2);
        let b = builders::classical::<Rational>(3);
        let alpha = vec![Rational::ratio(1, 4), Rational::ratio(3, 4)];
        let beta = vec![Rational::ratio(1, 3); 3];
        let omega = product_state(&a, &b, &alpha, &beta).unwrap();
        validate(&a, &b, &omega).unwrap();
        assert_eq!(marginals(&a, &b, &omega), (alpha, beta.clone()));
        assert_eq!(conditional_state(&a, &b, &omega, 0, true).unwrap(), beta);
    }

    #[test]
    fn qubit_bell_correlator() {
        let m = builders::quantum(2).unwrap();
        let conj = build_conjugate(&m).unwrap();
        assert!(is_correlator(&m, &conj));
        let (m1, m2) = marginals(&m, &conj.model, &conj.correlator);
        let mixed = hermitian::state_covector(&hermitian::diagonal(&[0.5, 0.5]));
        assert!(vec_approx_eq(&m1, &mixed, 1e-12) && vec_approx_eq(&m2, &mixed, 1e-12));
        assert!(is_isomorphism_state(&m, &conj.model, &conj.correlator).unwrap().holds);
    }

    #[test]
    fn dilation_of_a_diagonal_state() {
        let m = builders::quantum(2).unwrap();
        let d = strong_conjugate_dilation(&m, &hermitian::diagonal(&[0.9, 0.1])).unwrap();
        assert!(d.marginal_residual < 1e-12);
        assert!(d.stabilizer_residual < 1e-12);
        assert!(d.diagonal_residual() < 1e-12);
    }

    #[test]
    fn square_bit_equivalence_agrees_negatively() {
        let m = builders::square_bit::<Rational>();
        let r = self_duality_equivalence(&m).unwrap();
        assert!(!r.b.holds && !r.c.holds && r.agree());
    }

    #[test]
    fn dagger_of_group_elements_is_inverse() {
        let m = builders::square_bit::<Rational>();
        let b = spinforms::orthogonalizing_form(&m).unwrap().form.unwrap();
        assert!(group_dagger_check(&m, &b).unwrap().holds);
    }
}
