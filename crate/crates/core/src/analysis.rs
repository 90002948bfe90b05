//! Structural verdicts: self-duality, irreducibility, isotypic splitting,
//! filters, spectral decomposition of states and homogeneity witnesses.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hermitian::{self, CMatrix};
use crate::lp;
use crate::matrix::Matrix;
use crate::model::{Model, ModelKind};
use crate::polyhedral;
use crate::scalar::{dot, rational_approximation, vec_approx_eq, vec_scale, vec_sub, vec_to_json, Scalar};
use crate::spinforms::{self, BilinearForm};
use crate::verdict::{Mode, Verdict};

/// Largest hull dimension handled by exact double description.
pub const DD_MAX_DIM: usize = 12;
const SAMPLE_BATTERY: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticCone {
    PositiveSemidefinite,
    Lorentz,
}

impl AnalyticCone {
    pub fn tag(self) -> &'static str {
        match self {
            AnalyticCone::PositiveSemidefinite => "psd",
            AnalyticCone::Lorentz => "lorentz",
        }
    }
}

/// A cone given by extreme rays and supporting functionals, or an analytic tag.
#[derive(Clone, Debug)]
pub struct ConeDescription<F> {
    pub generators: Vec<Vec<F>>,
    pub facets: Vec<Vec<F>>,
    pub analytic: Option<AnalyticCone>,
}

impl<F: Scalar> ConeDescription<F> {
    pub fn to_json(&self) -> Value {
        match self.analytic {
            Some(tag) => json!({"analytic": tag.tag()}),
            None => json!({
                "generators": self.generators.iter().map(|g| vec_to_json(g)).collect::<Vec<_>>(),
                "facets": self.facets.iter().map(|g| vec_to_json(g)).collect::<Vec<_>>(),
            }),
        }
    }
}

fn cmp_tol<F: Scalar>(model: &Model<F>) -> f64 {
    if F::EXACT {
        0.0
    } else {
        model.tol().max(1e-9) * 100.0
    }
}

fn require_inner_product<F: Scalar>(form: &BilinearForm<F>, model: &Model<F>) -> Result<()> {
    if form.matrix.rows() != model.dim() || form.matrix.cols() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: form.matrix.rows() });
    }
    if !spinforms::is_inner_product(form, model.tol()) {
        return Err(Error::Precondition("degenerate form: not an inner product".into()));
    }
    Ok(())
}

/// `E₊` as extreme rays and facets.
pub fn primal_cone<F: Scalar>(model: &Model<F>) -> Result<ConeDescription<F>> {
    match model.kind() {
        ModelKind::Quantum(_) => {
            return Ok(ConeDescription { generators: vec![], facets: vec![], analytic: Some(AnalyticCone::PositiveSemidefinite) })
        }
        ModelKind::SpinFactor(_) => {
            return Ok(ConeDescription { generators: vec![], facets: vec![], analytic: Some(AnalyticCone::Lorentz) })
        }
        ModelKind::Finite => {}
    }
    let tol = model.tol();
    let outcomes = model.outcome_vectors();
    let generators = polyhedral::extreme_generators(outcomes, tol)
        .ok_or_else(|| Error::Precondition("outcome cone is not full-dimensional".into()))?;
    let facets = polyhedral::facets_of_generators(outcomes, tol)
        .ok_or_else(|| Error::Precondition("outcome cone is not full-dimensional".into()))?;
    Ok(ConeDescription { generators, facets, analytic: None })
}

/// Dual of `cone(generators)` with respect to `B`.
pub fn dual_of_generators<F: Scalar>(generators: &[Vec<F>], form: &Matrix<F>, tol: f64) -> Option<ConeDescription<F>> {
    let rows: Vec<Vec<F>> = generators.iter().map(|g| form.mul_vec(g)).collect();
    let rays = polyhedral::rays_of_inequalities(&rows, tol)?;
    let facets = polyhedral::extreme_generators(&rows, tol)?;
    Some(ConeDescription { generators: polyhedral::dedup_rays(rays, tol), facets, analytic: None })
}

/// `E⁺ = {a : ⟨a, b⟩ ≥ 0 for all b ∈ E₊}`.
pub fn dual_cone<F: Scalar>(model: &Model<F>, form: &BilinearForm<F>) -> Result<ConeDescription<F>> {
    require_inner_product(form, model)?;
    let primal = primal_cone(model)?;
    if let Some(tag) = primal.analytic {
        return Ok(ConeDescription { generators: vec![], facets: vec![], analytic: Some(tag) });
    }
    if model.dim() > DD_MAX_DIM {
        return Err(Error::Unsupported(format!("double description beyond dimension {DD_MAX_DIM}")));
    }
    dual_of_generators(&primal.generators, &form.matrix, model.tol())
        .ok_or_else(|| Error::Precondition("dual cone is not pointed".into()))
}

/// Membership of `a` in `E⁺` computed from the pairing alone.
pub fn in_dual_cone<F: Scalar>(model: &Model<F>, form: &BilinearForm<F>, a: &[F]) -> bool {
    let w: Vec<f64> = form.matrix.mul_vec(a).iter().map(Scalar::to_f64).collect();
    let tol = model.tol().max(1e-10);
    match model.kind() {
        ModelKind::Quantum(n) => {
            // ⟨a, P⟩ = Tr(HP) with H the Hermitian matrix whose trace pairing is Ba.
            let gram = hermitian::trace_gram(n);
            let h: Vec<f64> = w.iter().enumerate().map(|(k, v)| v / gram[(k, k)]).collect();
            hermitian::is_psd(&hermitian::from_coords(&h, n), tol)
        }
        ModelKind::SpinFactor(_) => hermitian::in_lorentz_cone(&w, tol),
        ModelKind::Finite => model
            .outcome_vectors()
            .iter()
            .all(|x| !form.matrix.bilinear(a, x).is_negative(model.tol())),
    }
}

/// `E₊ = E⁺` for the given inner product.
pub fn is_self_dual<F: Scalar>(model: &Model<F>, form: &BilinearForm<F>) -> Result<Verdict> {
    require_inner_product(form, model)?;
    if model.is_analytic() {
        return analytic_self_duality(model, form);
    }
    if model.dim() > DD_MAX_DIM {
        return sampled_self_duality(model, form);
    }
    let mode = Mode::for_scalar::<F>();
    let primal = primal_cone(model)?;
    let dual = dual_cone(model, form)?;
    let tol = model.tol();
    if polyhedral::same_rays(&primal.generators, &dual.generators, tol) {
        return Ok(Verdict::new("self-dual", true, mode)
            .with_note(format!("{} extreme rays on both sides", primal.generators.len())));
    }
    for r in &dual.generators {
        if !model.cone_contains(r)? {
            return Ok(Verdict::new("self-dual", false, mode).with_witness(json!({
                "ray": vec_to_json(r),
                "inDual": true,
                "inPrimal": false,
            })));
        }
    }
    for g in &primal.generators {
        if !in_dual_cone(model, form, g) {
            return Ok(Verdict::new("self-dual", false, mode).with_witness(json!({
                "ray": vec_to_json(g),
                "inDual": false,
                "inPrimal": true,
            })));
        }
    }
    Ok(Verdict::new("self-dual", false, mode).with_note("ray sets differ"))
}

fn sampled_self_duality<F: Scalar>(model: &Model<F>, form: &BilinearForm<F>) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.options().seed);
    let outcomes = model.outcome_vectors();
    for _ in 0..SAMPLE_BATTERY {
        let mut a = vec![F::zero(); model.dim()];
        for x in outcomes {
            let c = F::from_i64(rng.random_range(0..4));
            a = crate::scalar::vec_add(&a, &vec_scale(x, &c));
        }
        if !in_dual_cone(model, form, &a) {
            return Ok(Verdict::new("self-dual", false, Mode::Probabilistic)
                .with_witness(json!({"ray": vec_to_json(&a), "inDual": false, "inPrimal": true})));
        }
    }
    Ok(Verdict::new("self-dual", true, Mode::Probabilistic)
        .with_note(format!("no disagreement on {SAMPLE_BATTERY} sampled primal points")))
}

fn analytic_self_duality<F: Scalar>(model: &Model<F>, form: &BilinearForm<F>) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.options().seed);
    let samples: Vec<Vec<f64>> = match model.kind() {
        ModelKind::Quantum(n) => (0..SAMPLE_BATTERY)
            .map(|_| {
                let u = hermitian::haar_unitary(n, &mut rng);
                let eig: Vec<f64> = (0..n).map(|_| rng.random_range(-0.4..1.0)).collect();
                hermitian::to_coords(&(&u * hermitian::diagonal(&eig) * u.adjoint()))
            })
            .collect(),
        ModelKind::SpinFactor(k) => (0..SAMPLE_BATTERY)
            .map(|_| {
                let dir = hermitian::random_unit_vector(k, &mut rng);
                let t: f64 = rng.random_range(0.2..1.0);
                let r: f64 = t * rng.random_range(0.5..1.5);
                let mut v = vec![t];
                v.extend(dir.iter().map(|d| d * r));
                v
            })
            .collect(),
        ModelKind::Finite => unreachable!(),
    };
    let mut disagreements = 0usize;
    let mut witness = None;
    for s in &samples {
        let a: Vec<F> = s.iter().map(|v| F::from_f64(*v)).collect();
        let p = model.cone_contains(&a)?;
        let d = in_dual_cone(model, form, &a);
        if p != d {
            disagreements += 1;
            witness.get_or_insert_with(|| json!({"ray": s, "inPrimal": p, "inDual": d}));
        }
    }
    // Identification: the dual is the primal cone exactly when B is a multiple of
    // the self-dualizing pairing (trace form / Euclidean form).
    let b = form.matrix.to_f64();
    let reference = match model.kind() {
        ModelKind::Quantum(n) => hermitian::trace_gram(n),
        ModelKind::SpinFactor(k) => Matrix::identity(k + 1),
        ModelKind::Finite => unreachable!(),
    };
    let scale = b[(0, 0)] / reference[(0, 0)];
    let identified = scale > 0.0 && b.approx_eq(&reference.scale(&scale), 1e-9);
    let holds = identified && disagreements == 0;
    let mut v = Verdict::new("self-dual", holds, Mode::Analytic).with_note(format!(
        "form {} a multiple of the self-dualizing pairing; {disagreements} disagreements on {} sampled elements",
        if identified { "is" } else { "is not" },
        samples.len()
    ));
    if let Some(w) = witness {
        v = v.with_witness(w);
    }
    Ok(v)
}

/// Group matrices used for commutant solves: lifted generators for finite
/// models, the sampled battery for analytic ones.
fn commutant_generators<F: Scalar>(model: &Model<F>) -> Vec<Matrix<F>> {
    model.hull().group_matrices.clone()
}

/// `u^⊥` with respect to the canonical inner product, as basis columns.
fn unit_complement<F: Scalar>(model: &Model<F>, form: &Matrix<F>) -> Vec<Vec<F>> {
    let bu = form.mul_vec(model.unit());
    Matrix::from_rows(&[bu]).nullspace(null_tol(model))
}

fn null_tol<F: Scalar>(model: &Model<F>) -> f64 {
    if F::EXACT {
        0.0
    } else {
        model.tol().max(1e-9) * 10.0
    }
}

/// A subspace with its induced group action and Gram matrix.
struct Restricted<F: Scalar> {
    basis: Matrix<F>,
    gram: Matrix<F>,
    coeff: Matrix<F>,
    actions: Vec<Matrix<F>>,
}

impl<F: Scalar> Restricted<F> {
    fn new(basis_cols: &[Vec<F>], form: &Matrix<F>, gens: &[Matrix<F>], tol: f64) -> Result<Self> {
        let basis = Matrix::from_columns(basis_cols);
        let gram = basis.transpose().mul(form).mul(&basis);
        let gram_inv = gram.inverse(tol).ok_or_else(|| Error::Precondition("degenerate restricted form".into()))?;
        let coeff = gram_inv.mul(&basis.transpose()).mul(form);
        let actions = gens.iter().map(|g| coeff.mul(g).mul(&basis)).collect();
        Ok(Self { basis, gram, coeff, actions })
    }

    fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Basis of `{P : P g = g P for every generator, G P = Pᵀ G}`.
    fn symmetric_commutant(&self, tol: f64) -> Vec<Matrix<F>> {
        let k = self.dim();
        let idx = |i: usize, j: usize| i * k + j;
        let mut rows: Vec<Vec<F>> = Vec::new();
        for g in &self.actions {
            for i in 0..k {
                for j in 0..k {
                    let mut row = vec![F::zero(); k * k];
                    for l in 0..k {
                        row[idx(i, l)] = row[idx(i, l)].clone() + g[(l, j)].clone();
                        row[idx(l, j)] = row[idx(l, j)].clone() - g[(i, l)].clone();
                    }
                    rows.push(row);
                }
            }
        }
        let gm = &self.gram;
        for i in 0..k {
            for j in 0..k {
                let mut row = vec![F::zero(); k * k];
                for l in 0..k {
                    row[idx(l, j)] = row[idx(l, j)].clone() + gm[(i, l)].clone();
                    row[idx(l, i)] = row[idx(l, i)].clone() - gm[(l, j)].clone();
                }
                rows.push(row);
            }
        }
        if rows.is_empty() {
            return vec![Matrix::identity(k)];
        }
        Matrix::from_rows(&rows)
            .nullspace(tol)
            .into_iter()
            .map(|v| Matrix::from_fn(k, k, |i, j| v[idx(i, j)].clone()))
            .collect()
    }

    /// The subspace-coordinate operator `P` as a map on the whole hull.
    fn lift(&self, p: &Matrix<F>) -> Matrix<F> {
        self.basis.mul(p).mul(&self.coeff)
    }
}

fn is_scalar_matrix<F: Scalar>(p: &Matrix<F>, tol: f64) -> bool {
    let d = p[(0, 0)].clone();
    p.approx_eq(&Matrix::identity(p.rows()).scale(&d), tol)
}

/// No proper invariant subspace of `u^⊥`; the certificate is a non-scalar
/// self-adjoint operator commuting with the group.
pub fn is_irreducible<F: Scalar>(model: &Model<F>) -> Result<Verdict> {
    let mode = if model.is_analytic() { Mode::Analytic } else { Mode::for_scalar::<F>() };
    if model.dim() <= 2 {
        return Ok(Verdict::new("irreducible", true, mode).with_note(format!("dim u^⊥ = {}", model.dim() - 1)));
    }
    let form = spinforms::canonical_inner_product(model)?;
    let tol = null_tol(model);
    let perp = unit_complement(model, &form.matrix);
    let restricted = Restricted::new(&perp, &form.matrix, &commutant_generators(model), tol)?;
    let commutant = restricted.symmetric_commutant(tol);
    let note = format!("symmetric commutant on u^⊥ has dimension {}", commutant.len());
    let mut v = match commutant.iter().find(|p| !is_scalar_matrix(p, tol)) {
        None => Verdict::new("irreducible", true, mode).with_note(note),
        Some(p) => Verdict::new("irreducible", false, mode)
            .with_note(note)
            .with_witness(json!({"commutingOperator": restricted.lift(p).to_json()})),
    };
    if model.is_analytic() {
        let extra = format!("{}; solved against {} sampled group elements", v.note.clone().unwrap_or_default(), model.hull().group_matrices.len());
        v.note = Some(extra);
    }
    Ok(v)
}

/// One irreducible invariant block of `u^⊥`.
#[derive(Clone, Debug)]
pub struct IsotypicBlock<F: Scalar> {
    pub basis: Vec<Vec<F>>,
    /// Orthogonal projection (w.r.t. the canonical form) onto the block.
    pub projection: Matrix<F>,
}

#[derive(Clone, Debug)]
pub struct IsotypicDecomposition<F: Scalar> {
    pub blocks: Vec<IsotypicBlock<F>>,
    pub form: Matrix<F>,
    pub mode: Mode,
    pub notes: Vec<String>,
}

impl<F: Scalar> IsotypicDecomposition<F> {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.blocks.len(),
            "mode": self.mode,
            "blocks": self.blocks.iter().map(|b| json!({
                "dim": b.basis.len(),
                "basis": b.basis.iter().map(|v| vec_to_json(v)).collect::<Vec<_>>(),
                "projection": b.projection.to_json(),
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

/// Projection onto `u^⊥` along `u`.
pub fn unit_complement_projection<F: Scalar>(model: &Model<F>, form: &Matrix<F>) -> Matrix<F> {
    let bu = form.mul_vec(model.unit());
    Matrix::identity(model.dim()).sub(&Matrix::outer(model.unit(), &bu))
}

/// Splits `u^⊥` into irreducible invariant blocks via eigenspaces of
/// self-adjoint commutant elements.
pub fn isotypic_decomposition<F: Scalar>(model: &Model<F>) -> Result<IsotypicDecomposition<F>> {
    let form = spinforms::canonical_inner_product(model)?.matrix;
    let tol = null_tol(model);
    let gens = commutant_generators(model);
    let mut rng = ChaCha8Rng::seed_from_u64(model.options().seed);
    let mut notes = Vec::new();
    let mut done: Vec<Vec<Vec<F>>> = Vec::new();
    let mut pending = vec![unit_complement(model, &form)];
    while let Some(block) = pending.pop() {
        if block.len() <= 1 {
            done.push(block);
            continue;
        }
        let r = Restricted::new(&block, &form, &gens, tol)?;
        let commutant = r.symmetric_commutant(tol);
        if commutant.len() <= 1 {
            done.push(block);
            continue;
        }
        match split_block(&r, &commutant, &mut rng, tol) {
            Some(parts) => pending.extend(parts.into_iter().rev()),
            None => {
                notes.push(format!("a block of dimension {} could not be split exactly", block.len()));
                done.push(block);
            }
        }
    }
    // Deterministic order: smaller blocks first, then by basis.
    done.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| block_key(a).cmp(&block_key(b))));
    let mut blocks = Vec::new();
    for basis in done {
        let r = Restricted::new(&basis, &form, &[], tol)?;
        let projection = r.basis.mul(&r.coeff);
        blocks.push(IsotypicBlock { basis, projection });
    }
    let mode = if model.is_analytic() { Mode::Analytic } else { Mode::for_scalar::<F>() };
    Ok(IsotypicDecomposition { blocks, form, mode, notes })
}

fn block_key<F: Scalar>(b: &[Vec<F>]) -> Vec<String> {
    b.iter().flat_map(|v| v.iter().map(|x| format!("{:+.15e}", x.to_f64()))).collect()
}

fn split_block<F: Scalar>(
    r: &Restricted<F>,
    commutant: &[Matrix<F>],
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Option<Vec<Vec<Vec<F>>>> {
    let k = r.dim();
    for _ in 0..8 {
        let mut p = Matrix::zeros(k, k);
        for c in commutant {
            p = p.add(&c.scale(&F::from_i64(rng.random_range(1..=9))));
        }
        if is_scalar_matrix(&p, tol) {
            continue;
        }
        let mut parts = Vec::new();
        let mut covered = 0;
        for mu in self_adjoint_eigenvalues(&p, &r.gram) {
            let shifted = p.sub(&Matrix::identity(k).scale(&mu));
            let space = shifted.nullspace(tol);
            if space.is_empty() {
                continue;
            }
            covered += space.len();
            parts.push(space.iter().map(|v| r.basis.mul_vec(v)).collect::<Vec<_>>());
        }
        if covered == k && parts.len() >= 2 {
            return Some(parts);
        }
    }
    None
}

/// Distinct eigenvalues of `P` (self-adjoint for the Gram matrix `G`), as
/// exact rationals when the scalar type is exact.
fn self_adjoint_eigenvalues<F: Scalar>(p: &Matrix<F>, gram: &Matrix<F>) -> Vec<F> {
    let k = p.rows();
    let g = DMatrix::from_fn(k, k, |i, j| gram[(i, j)].to_f64());
    let pm = DMatrix::from_fn(k, k, |i, j| p[(i, j)].to_f64());
    let Some(chol) = g.clone().cholesky() else { return vec![] };
    let l = chol.l();
    let l_inv = l.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(k, k));
    let s = l.transpose() * pm * l_inv.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let mut values: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    let mut distinct: Vec<f64> = Vec::new();
    for v in values {
        if distinct.last().is_none_or(|last| (v - last).abs() > 1e-6 * (1.0 + v.abs())) {
            distinct.push(v);
        }
    }
    distinct
        .into_iter()
        .filter_map(|v| {
            if F::EXACT {
                rational_approximation(v, 1_000_000).map(|(n, d)| F::ratio(n, d))
            } else {
                Some(F::from_f64(v))
            }
        })
        .collect()
}

/// An invertible positive map with `Φ(x) = t_x x` on a chosen test.
#[derive(Clone, Debug)]
pub struct Filter<F: Scalar> {
    pub matrix: Matrix<F>,
    pub inverse: Matrix<F>,
    pub outcomes: Vec<Vec<F>>,
    pub factors: Vec<F>,
    pub mode: Mode,
}

impl<F: Scalar> Filter<F> {
    /// The dual action `Φ*` on state covectors.
    pub fn state_action(&self) -> Matrix<F> {
        self.matrix.transpose()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "matrix": self.matrix.to_json(),
            "factors": vec_to_json(&self.factors),
            "mode": self.mode,
        })
    }
}

/// Filter on the test with the given index.
pub fn filter_on_test<F: Scalar>(model: &Model<F>, test: usize, factors: &[F]) -> Result<Filter<F>> {
    let t = model
        .testspace()
        .tests()
        .get(test)
        .ok_or_else(|| Error::Precondition(format!("test index {test} out of range")))?;
    let outcomes: Vec<Vec<F>> = t.iter().map(|&x| model.outcome_vector(x).to_vec()).collect();
    filter(model, &outcomes, factors)
}

/// Filter on an arbitrary orthogonal family of outcomes given as hull vectors.
pub fn filter<F: Scalar>(model: &Model<F>, outcomes: &[Vec<F>], factors: &[F]) -> Result<Filter<F>> {
    if outcomes.len() != factors.len() {
        return Err(Error::DimensionMismatch { expected: outcomes.len(), found: factors.len() });
    }
    let tol = model.tol();
    if let Some(t) = factors.iter().find(|t| !t.is_positive(0.0) || ((*t).clone() - F::one()).is_positive(tol)) {
        return Err(Error::Precondition(format!("filter factor {t} outside (0, 1]")));
    }
    let d = model.dim();
    let matrix = match model.kind() {
        ModelKind::Quantum(n) => {
            let mut w = CMatrix::zeros(n, n);
            for (x, t) in outcomes.iter().zip(factors) {
                let xs: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
                w += hermitian::from_coords(&xs, n) * num_complex::Complex64::new(t.to_f64(), 0.0);
            }
            let root = hermitian::spectral_map(&w, |l| l.max(0.0).sqrt());
            hermitian::sandwich_action(&root).map(|v| F::from_f64(*v))
        }
        ModelKind::SpinFactor(_) => {
            // Quadratic representation P_w(a) = 2w∘(w∘a) − (w∘w)∘a.
            let mut w = vec![0.0; d];
            for (x, t) in outcomes.iter().zip(factors) {
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi += t.to_f64().sqrt() * xi.to_f64();
                }
            }
            let w2 = hermitian::spin_jordan_product(&w, &w);
            let cols: Vec<Vec<F>> = (0..d)
                .map(|k| {
                    let mut e = vec![0.0; d];
                    e[k] = 1.0;
                    let wa = hermitian::spin_jordan_product(&w, &e);
                    let wwa = hermitian::spin_jordan_product(&w, &wa);
                    let w2a = hermitian::spin_jordan_product(&w2, &e);
                    wwa.iter().zip(&w2a).map(|(p, q)| F::from_f64(2.0 * p - q)).collect()
                })
                .collect();
            Matrix::from_columns(&cols)
        }
        ModelKind::Finite => finite_filter(model, outcomes, factors)?,
    };
    let inverse = matrix
        .inverse(tol)
        .ok_or_else(|| Error::Precondition("filter is not invertible".into()))?;
    let check_tol = cmp_tol(model);
    for (x, t) in outcomes.iter().zip(factors) {
        if !vec_approx_eq(&matrix.mul_vec(x), &vec_scale(x, t), check_tol) {
            return Err(Error::Precondition("filter does not scale its test as prescribed".into()));
        }
    }
    for y in model.outcome_vectors() {
        if !model.cone_contains(&matrix.mul_vec(y))? || !model.cone_contains(&inverse.mul_vec(y))? {
            return Err(Error::Precondition("no positive filter: Φ or Φ⁻¹ leaves the cone".into()));
        }
    }
    let mode = if model.is_analytic() { Mode::Analytic } else { Mode::for_scalar::<F>() };
    Ok(Filter { matrix, inverse, outcomes: outcomes.to_vec(), factors: factors.to_vec(), mode })
}

fn finite_filter<F: Scalar>(model: &Model<F>, outcomes: &[Vec<F>], factors: &[F]) -> Result<Matrix<F>> {
    let d = model.dim();
    let tol = model.tol();
    let x = Matrix::from_columns(outcomes);
    if outcomes.len() == d {
        if let Some(inv) = x.inverse(tol) {
            return Ok(x.mul(&Matrix::diagonal(factors)).mul(&inv));
        }
    }
    // The test does not determine Φ: look for any positive map with the
    // prescribed action by linear feasibility over its entries.
    let cone = primal_cone(model)?;
    let gens = &cone.generators;
    let facets = &cone.facets;
    let n_entries = d * d;
    let n_slack = facets.len() * gens.len();
    let n_vars = 2 * n_entries + n_slack;
    let mut rows: Vec<Vec<F>> = Vec::new();
    let mut rhs: Vec<F> = Vec::new();
    let entry = |i: usize, j: usize| i * d + j;
    for (xv, t) in outcomes.iter().zip(factors) {
        for i in 0..d {
            let mut row = vec![F::zero(); n_vars];
            for j in 0..d {
                row[entry(i, j)] = xv[j].clone();
                row[n_entries + entry(i, j)] = -xv[j].clone();
            }
            rows.push(row);
            rhs.push(t.clone() * xv[i].clone());
        }
    }
    let mut slack = 2 * n_entries;
    for f in facets {
        for y in gens {
            let mut row = vec![F::zero(); n_vars];
            for i in 0..d {
                for j in 0..d {
                    let c = f[i].clone() * y[j].clone();
                    row[entry(i, j)] = c.clone();
                    row[n_entries + entry(i, j)] = -c;
                }
            }
            row[slack] = -F::one();
            slack += 1;
            rows.push(row);
            rhs.push(F::zero());
        }
    }
    let a = Matrix::from_rows(&rows);
    let sol = lp::feasible_point(&a, &rhs, tol)
        .ok_or_else(|| Error::Unsupported("no positive map scales this test as prescribed".into()))?;
    let to_map = |s: &[F]| Matrix::from_fn(d, d, |i, j| s[entry(i, j)].clone() - s[n_entries + entry(i, j)].clone());
    let mut phi = to_map(&sol);
    // A vertex of the feasible set is often singular; average in the maps
    // that push each positivity slack to its maximum until one is invertible.
    let mut count = 1usize;
    for k in 2 * n_entries..n_vars {
        if phi.inverse(tol).is_some() {
            break;
        }
        let mut c = vec![F::zero(); n_vars];
        c[k] = F::one();
        if let Some(x) = lp::maximize(&a, &rhs, &c, tol).point() {
            count += 1;
            let w = F::from_usize(count).recip();
            phi = phi.scale(&(F::one() - w.clone())).add(&to_map(&x).scale(&w));
        }
    }
    Ok(phi)
}

/// `α = Σ_{x∈E} t_x δ_x` over some test `E`.
#[derive(Clone, Debug)]
pub struct StateDecomposition<F: Scalar> {
    pub test: Option<usize>,
    pub outcomes: Vec<Vec<F>>,
    pub deltas: Vec<Vec<F>>,
    pub weights: Vec<F>,
}

impl<F: Scalar> StateDecomposition<F> {
    pub fn remix(&self) -> Vec<F> {
        let d = self.deltas.first().map_or(0, Vec::len);
        self.deltas
            .iter()
            .zip(&self.weights)
            .fold(vec![F::zero(); d], |acc, (delta, t)| crate::scalar::vec_add(&acc, &vec_scale(delta, t)))
    }

    pub fn is_interior(&self) -> bool {
        self.weights
            .iter()
            .all(|t| if F::EXACT { t.is_positive(0.0) } else { t.to_f64() >= 1e-9 })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "test": self.test,
            "weights": vec_to_json(&self.weights),
            "outcomes": self.outcomes.iter().map(|v| vec_to_json(v)).collect::<Vec<_>>(),
        })
    }
}

/// The unique state with value 1 at outcome `x` (sharp finite models).
pub fn delta<F: Scalar>(model: &Model<F>, x: usize) -> Result<Vec<F>> {
    model.require_finite("δ_x lookup")?;
    let tol = model.tol();
    let hits: Vec<usize> = model
        .extreme_states()
        .iter()
        .copied()
        .filter(|&i| model.orbit_states()[i][x].approx_eq(&F::one(), tol))
        .collect();
    match hits.as_slice() {
        [i] => Ok(model.orbit_covectors()[*i].clone()),
        _ => Err(Error::Precondition(format!(
            "outcome `{}` has {} states assigning it probability 1",
            model.testspace().label(x),
            hits.len()
        ))),
    }
}

/// Spectral decomposition of a state covector.
pub fn decompose_state<F: Scalar>(model: &Model<F>, alpha: &[F]) -> Result<StateDecomposition<F>> {
    if alpha.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: alpha.len() });
    }
    let tol = model.tol();
    match model.kind() {
        ModelKind::Quantum(n) => {
            let gram = hermitian::trace_gram(n);
            let coords: Vec<f64> = alpha.iter().enumerate().map(|(k, v)| v.to_f64() / gram[(k, k)]).collect();
            let rho = hermitian::from_coords(&coords, n);
            let (values, vectors) = hermitian::eigh(&rho);
            let mut out = StateDecomposition { test: None, outcomes: vec![], deltas: vec![], weights: vec![] };
            for (l, v) in values.iter().zip(&vectors).rev() {
                let p = hermitian::projector(v);
                out.outcomes.push(hermitian::to_coords(&p).into_iter().map(F::from_f64).collect());
                out.deltas.push(hermitian::state_covector(&p).into_iter().map(F::from_f64).collect());
                out.weights.push(F::from_f64(*l));
            }
            if out.weights.iter().any(|t| t.is_negative(tol.max(1e-9))) {
                return Err(Error::Precondition("state has a negative eigenvalue".into()));
            }
            Ok(out)
        }
        ModelKind::SpinFactor(k) => {
            let w: Vec<f64> = alpha[1..].iter().map(Scalar::to_f64).collect();
            let r = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dir: Vec<f64> = if r > 1e-12 {
                w.iter().map(|x| x / r).collect()
            } else {
                (0..k).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
            };
            let mut out = StateDecomposition { test: None, outcomes: vec![], deltas: vec![], weights: vec![] };
            for sign in [1.0, -1.0] {
                let mut x = vec![F::from_f64(0.5)];
                x.extend(dir.iter().map(|d| F::from_f64(sign * d / 2.0)));
                let mut c = vec![F::one()];
                c.extend(dir.iter().map(|d| F::from_f64(sign * d)));
                out.outcomes.push(x);
                out.deltas.push(c);
                out.weights.push(F::from_f64((1.0 + sign * r) / 2.0));
            }
            Ok(out)
        }
        ModelKind::Finite => {
            let ts = model.testspace();
            let check = if F::EXACT { 0.0 } else { tol.max(1e-9) };
            for (ti, t) in ts.tests().iter().enumerate() {
                let deltas: Vec<Vec<F>> = t.iter().map(|&x| delta(model, x)).collect::<Result<_>>()?;
                let Some(weights) = Matrix::from_columns(&deltas).solve(alpha, tol) else { continue };
                if weights.iter().any(|w| w.is_negative(check)) {
                    continue;
                }
                let out = StateDecomposition {
                    test: Some(ti),
                    outcomes: t.iter().map(|&x| model.outcome_vector(x).to_vec()).collect(),
                    deltas,
                    weights,
                };
                if vec_approx_eq(&out.remix(), alpha, check * 10.0) {
                    return Ok(out);
                }
            }
            Err(Error::Precondition("no test admits a nonnegative decomposition of this state".into()))
        }
    }
}

/// An order-automorphism whose dual maps `α` to `β`.
#[derive(Clone, Debug)]
pub struct HomogeneityWitness<F: Scalar> {
    pub filter: Filter<F>,
    /// Hull matrix of the group element.
    pub group_matrix: Matrix<F>,
    /// The automorphism of `E(A)`; its transpose acts on states.
    pub map: Matrix<F>,
    pub image: Vec<F>,
    pub residual: f64,
    pub order_automorphism: bool,
}

impl<F: Scalar> HomogeneityWitness<F> {
    pub fn state_map(&self) -> Matrix<F> {
        self.map.transpose()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "filter": self.filter.to_json(),
            "groupMatrix": self.group_matrix.to_json(),
            "map": self.map.to_json(),
            "image": vec_to_json(&self.image),
            "residual": self.residual,
            "orderAutomorphism": self.order_automorphism,
        })
    }
}

/// A filter followed by a symmetry carrying the eigen-test of `α` to that of `β`.
pub fn homogeneity_automorphism<F: Scalar>(model: &Model<F>, alpha: &[F], beta: &[F]) -> Result<HomogeneityWitness<F>> {
    let da = decompose_state(model, alpha)?;
    let db = decompose_state(model, beta)?;
    if !da.is_interior() || !db.is_interior() {
        return Err(Error::Precondition("states must be interior (all decomposition weights positive)".into()));
    }
    let tol = model.tol();
    // `order[i]` is the index in β's decomposition matched to α's i-th outcome.
    let (group_matrix, order) = match model.kind() {
        ModelKind::Finite => {
            let ts = model.testspace();
            let (ea, eb) = (da.test.unwrap_or(0), db.test.unwrap_or(0));
            let target = &ts.tests()[eb];
            let g = model
                .group_elements()?
                .iter()
                .find(|g| ts.image_test(g, ea) == Some(eb))
                .ok_or_else(|| Error::Precondition("no symmetry carries one decomposition test onto the other".into()))?;
            let order: Vec<usize> = ts.tests()[ea]
                .iter()
                .map(|&x| target.iter().position(|&y| y == g.apply(x)).unwrap_or(0))
                .collect();
            (model.element_matrix(g)?, order)
        }
        ModelKind::Quantum(n) => {
            let ea = eigenvectors_from_projectors(&da.outcomes, n);
            let eb = eigenvectors_from_projectors(&db.outcomes, n);
            let mut u = CMatrix::zeros(n, n);
            for (a, b) in ea.iter().zip(&eb) {
                u += b * a.adjoint();
            }
            (hermitian::conjugation_action(&u).map(|v| F::from_f64(*v)), (0..n).collect())
        }
        ModelKind::SpinFactor(k) => {
            let ua: Vec<f64> = da.deltas[0][1..].iter().map(Scalar::to_f64).collect();
            let ub: Vec<f64> = db.deltas[0][1..].iter().map(Scalar::to_f64).collect();
            let diff: Vec<f64> = ua.iter().zip(&ub).map(|(a, b)| a - b).collect();
            let norm = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut m = Matrix::identity(k + 1);
            if norm > 1e-12 {
                // Householder reflection sending û_α to û_β.
                for i in 0..k {
                    for j in 0..k {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        m[(i + 1, j + 1)] = delta - 2.0 * diff[i] * diff[j] / (norm * norm);
                    }
                }
            }
            (m.map(|v| F::from_f64(*v)), vec![0, 1])
        }
    };
    let ratios: Vec<F> = da
        .weights
        .iter()
        .zip(&order)
        .map(|(t, &j)| db.weights[j].clone() / t.clone())
        .collect();
    // Ratios may exceed 1; rescale so that the filter is a contraction and undo
    // the rescaling afterwards (positive scalars are order-automorphisms).
    let peak = ratios.iter().fold(F::zero(), |acc, r| if *r > acc { r.clone() } else { acc });
    let scaled: Vec<F> = ratios.iter().map(|r| r.clone() / peak.clone()).collect();
    let filt = filter(model, &da.outcomes, &scaled)?;
    let g_inv = group_matrix.inverse(tol).ok_or_else(|| Error::Precondition("singular group matrix".into()))?;
    let map = filt.matrix.scale(&peak).mul(&g_inv);
    let image = map.transpose().mul_vec(alpha);
    let residual = vec_sub(&image, beta).iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let inverse = map.inverse(tol).ok_or_else(|| Error::Precondition("witness is not invertible".into()))?;
    let mut order_automorphism = true;
    for y in model.outcome_vectors() {
        if !model.cone_contains(&map.mul_vec(y))? || !model.cone_contains(&inverse.mul_vec(y))? {
            order_automorphism = false;
            break;
        }
    }
    Ok(HomogeneityWitness { filter: filt, group_matrix, map, image, residual, order_automorphism })
}

fn eigenvectors_from_projectors<F: Scalar>(outcomes: &[Vec<F>], n: usize) -> Vec<hermitian::CVector> {
    outcomes
        .iter()
        .map(|x| {
            let p = hermitian::from_coords(&x.iter().map(Scalar::to_f64).collect::<Vec<_>>(), n);
            let (_, vectors) = hermitian::eigh(&p);
            vectors[n - 1].clone()
        })
        .collect()
}

/// Normalized covector `α / α(u)`.
pub fn normalize_state<F: Scalar>(model: &Model<F>, alpha: &[F]) -> Vec<F> {
    let s = dot(alpha, model.unit());
    alpha.iter().map(|v| v.clone() / s.clone()).collect()
}
