//! Invariant bilinear forms: the canonical group average, the λ-family, its
//! positivity window, and the orthogonalizing member.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hermitian;
use crate::matrix::{is_positive_definite, is_positive_semidefinite, Matrix};
use crate::model::{Model, ModelKind};
use crate::scalar::{vec_to_json, Scalar};
use crate::verdict::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Canonical,
    Uniform,
    Lambda,
    Orthogonalizing,
    Correlator,
    Combined,
    User,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Canonical => "canonical",
            Provenance::Uniform => "uniform",
            Provenance::Lambda => "lambda",
            Provenance::Orthogonalizing => "orthogonalizing",
            Provenance::Correlator => "correlator",
            Provenance::Combined => "combined",
            Provenance::User => "user",
        }
    }
}

/// A bilinear form on `E(A)` as a matrix in hull coordinates.
#[derive(Clone, Debug)]
pub struct BilinearForm<F: Scalar> {
    pub matrix: Matrix<F>,
    pub provenance: Provenance,
    pub lambda: Option<F>,
    /// Set when the canonical average depended on the chosen pure state.
    pub base_state_dependent: bool,
    pub notes: Vec<String>,
}

impl<F: Scalar> BilinearForm<F> {
    pub fn new(matrix: Matrix<F>, provenance: Provenance) -> Self {
        Self { matrix, provenance, lambda: None, base_state_dependent: false, notes: Vec::new() }
    }

    pub fn eval(&self, a: &[F], b: &[F]) -> F {
        self.matrix.bilinear(a, b)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "provenance": self.provenance.tag(),
            "matrix": self.matrix.to_json(),
        });
        if let Some(l) = &self.lambda {
            v["lambda"] = l.to_json();
        }
        if self.base_state_dependent {
            v["baseStateDependent"] = json!(true);
        }
        if !self.notes.is_empty() {
            v["notes"] = json!(self.notes);
        }
        v
    }
}

/// `(r², c, m, M)` of a SPIN form on a rank-`n` model.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinParameters<F> {
    pub n: usize,
    pub r_squared: F,
    /// Common value on distinguishable pairs; absent when `n = 1`.
    pub c: Option<F>,
    pub m: F,
    pub big_m: F,
}

impl<F: Scalar> SpinParameters<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "rSquared": self.r_squared.to_json(),
            "c": self.c.as_ref().map(Scalar::to_json),
            "m": self.m.to_json(),
            "M": self.big_m.to_json(),
        })
    }
}

/// Canonical inner product: the average of `α(a)α(b)` over the orbit of a pure state.
pub fn canonical_inner_product<F: Scalar>(model: &Model<F>) -> Result<BilinearForm<F>> {
    let matrix = match model.kind() {
        ModelKind::Quantum(n) => {
            let t = hermitian::trace_covector(n);
            let g = hermitian::trace_gram(n);
            let scale = 1.0 / (n * (n + 1)) as f64;
            Matrix::outer(&t, &t).add(&g).scale(&scale).map(|v| F::from_f64(*v))
        }
        ModelKind::SpinFactor(k) => {
            let mut d = vec![F::ratio(1, k as i64); k + 1];
            d[0] = F::one();
            Matrix::diagonal(&d)
        }
        ModelKind::Finite => {
            let ext = model.extreme_states();
            let &base = ext.first().ok_or_else(|| Error::Precondition("no extreme state".into()))?;
            let orbit = model.orbit_states();
            let label = model.orbit_label_of(base);
            let members: Vec<usize> = (0..orbit.len()).filter(|&i| model.orbit_label_of(i) == label).collect();
            let d = model.dim();
            let mut acc = Matrix::zeros(d, d);
            for &i in &members {
                let c = &model.orbit_covectors()[i];
                acc = acc.add(&Matrix::outer(c, c));
            }
            let mut form = BilinearForm::new(acc.scale(&F::from_usize(members.len()).recip()), Provenance::Canonical);
            form.base_state_dependent = !model.is_bisymmetric()?.holds;
            return Ok(form);
        }
    };
    Ok(BilinearForm::new(matrix, Provenance::Canonical))
}

/// `B(·, u)` as a covector; independent of the SPIN form.
pub fn unit_functional<F: Scalar>(form: &BilinearForm<F>, model: &Model<F>) -> Vec<F> {
    form.matrix.mul_vec(model.unit())
}

/// `B_o(a, b) = B(a, u) B(b, u)`.
pub fn uniform_form<F: Scalar>(model: &Model<F>) -> Result<BilinearForm<F>> {
    let base = canonical_inner_product(model)?;
    let w = unit_functional(&base, model);
    Ok(BilinearForm::new(Matrix::outer(&w, &w), Provenance::Uniform))
}

/// Result of checking the four SPIN properties.
#[derive(Clone, Debug)]
pub struct SpinReport {
    pub symmetric: bool,
    pub positive: bool,
    pub invariant: bool,
    pub normalized: bool,
    pub violations: Vec<String>,
    pub mode: Mode,
}

impl SpinReport {
    pub fn holds(&self) -> bool {
        self.symmetric && self.positive && self.invariant && self.normalized
    }

    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds(),
            "symmetric": self.symmetric,
            "positive": self.positive,
            "invariant": self.invariant,
            "normalized": self.normalized,
            "violations": self.violations,
            "mode": self.mode,
        })
    }
}

/// Symmetric, positive on outcome pairs, invariant under the group, `B(u,u) = 1`.
pub fn is_spin_form<F: Scalar>(form: &BilinearForm<F>, model: &Model<F>) -> SpinReport {
    let tol = model.tol();
    let b = &form.matrix;
    let mut violations = Vec::new();
    let symmetric = b.is_symmetric(tol);
    if !symmetric {
        violations.push("matrix is not symmetric".to_string());
    }
    let xs = model.outcome_vectors();
    let labels = model.testspace().labels();
    let mut positive = true;
    'outer: for (i, x) in xs.iter().enumerate() {
        for (j, y) in xs.iter().enumerate() {
            let v = b.bilinear(x, y);
            if v.is_negative(tol) {
                positive = false;
                violations.push(format!("B({}, {}) = {} < 0", labels[i], labels[j], v));
                break 'outer;
            }
        }
    }
    let normalized = b.bilinear(model.unit(), model.unit()).approx_eq(&F::one(), tol);
    if !normalized {
        violations.push("B(u, u) ≠ 1".to_string());
    }
    let mut invariant = true;
    for (k, g) in model.hull().group_matrices.iter().enumerate() {
        let moved = g.transpose().mul(b).mul(g);
        if !moved.approx_eq(b, tol.max(if F::EXACT { 0.0 } else { 1e-9 }) * 10.0) {
            invariant = false;
            violations.push(format!("not invariant under group generator {k}"));
            break;
        }
    }
    let mode = if model.is_analytic() { Mode::Analytic } else { Mode::for_scalar::<F>() };
    SpinReport { symmetric, positive, invariant, normalized, violations, mode }
}

/// `r²`, `c`, `m`, `M`, verifying that `r²` and `c` are constant.
pub fn parameters<F: Scalar>(form: &BilinearForm<F>, model: &Model<F>) -> Result<SpinParameters<F>> {
    let tol = if F::EXACT { 0.0 } else { model.tol().max(1e-9) * 10.0 };
    let xs = model.outcome_vectors();
    let ts = model.testspace();
    let b = &form.matrix;
    let diag: Vec<F> = xs.iter().map(|x| b.bilinear(x, x)).collect();
    let r_squared = diag[0].clone();
    if let Some(i) = diag.iter().position(|v| !v.approx_eq(&r_squared, tol)) {
        return Err(Error::Precondition(format!(
            "B(x, x) is not constant: {} at {} vs {} at {}",
            r_squared,
            ts.label(0),
            diag[i],
            ts.label(i)
        )));
    }
    let pairs = ts.perp_pairs();
    let c = match pairs.first() {
        None => None,
        Some(&(x, y)) => {
            let c = b.bilinear(&xs[x], &xs[y]);
            for &(p, q) in &pairs {
                let v = b.bilinear(&xs[p], &xs[q]);
                if !v.approx_eq(&c, tol) {
                    return Err(Error::Precondition(format!(
                        "B is not constant on distinguishable pairs: {} vs {}",
                        c, v
                    )));
                }
            }
            Some(c)
        }
    };
    let (m, big_m) = if model.is_analytic() {
        // Invariant forms are affine in the overlap of the two outcomes, so the
        // extremes sit at x = y and at x ⊥ y.
        let c = c.clone().unwrap_or_else(|| r_squared.clone());
        if c < r_squared {
            (c, r_squared.clone())
        } else {
            (r_squared.clone(), c)
        }
    } else {
        let mut m = r_squared.clone();
        let mut big_m = r_squared.clone();
        for x in xs {
            for y in xs {
                let v = b.bilinear(x, y);
                if v < m {
                    m = v.clone();
                }
                if v > big_m {
                    big_m = v;
                }
            }
        }
        (m, big_m)
    };
    Ok(SpinParameters { n: model.rank(), r_squared, c, m, big_m })
}

#[derive(Clone, Debug)]
pub struct ClauseResult {
    pub clause: char,
    pub statement: &'static str,
    pub applicable: bool,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Lemma1Audit {
    pub clauses: Vec<ClauseResult>,
    pub notes: Vec<String>,
}

impl Lemma1Audit {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| !c.applicable || c.holds)
    }

    pub fn clause(&self, c: char) -> Option<&ClauseResult> {
        self.clauses.iter().find(|r| r.clause == c)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "clauses": self.clauses.iter().map(|c| json!({
                "clause": c.clause.to_string(),
                "statement": c.statement,
                "applicable": c.applicable,
                "holds": c.holds,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("clause | holds | statement | detail\n");
        for c in &self.clauses {
            let status = if !c.applicable { "n/a" } else if c.holds { "yes" } else { "NO" };
            out.push_str(&format!("({}) | {} | {} | {}\n", c.clause, status, c.statement, c.detail));
        }
        out
    }
}

/// Checks the structural identities and bounds satisfied by every SPIN form
/// of a two-symmetric model.
pub fn lemma1_audit<F: Scalar>(form: &BilinearForm<F>, model: &Model<F>) -> Result<Lemma1Audit> {
    let tol = if F::EXACT { 0.0 } else { 1e-9 };
    let p = parameters(form, model)?;
    let n = F::from_usize(p.n);
    let inv_n = n.recip();
    let inv_n2 = inv_n.clone() * inv_n.clone();
    let le = |a: &F, b: &F| !(a.clone() - b.clone()).is_positive(tol);
    let b = &form.matrix;
    let mut clauses = Vec::new();

    let worst = model
        .outcome_vectors()
        .iter()
        .map(|x| (b.bilinear(x, model.unit()) - inv_n.clone()).abs())
        .fold(F::zero(), |acc, v| if v > acc { v } else { acc });
    clauses.push(ClauseResult {
        clause: 'a',
        statement: "B(x,u) = 1/n for every outcome",
        applicable: true,
        holds: worst.is_zero_tol(tol),
        detail: format!("max |B(x,u) - 1/n| = {worst}"),
    });

    let c = p.c.clone().unwrap_or_else(F::zero);
    let lhs = p.r_squared.clone() + F::from_usize(p.n - 1) * c.clone();
    clauses.push(ClauseResult {
        clause: 'b',
        statement: "r² + (n-1)c = 1/n",
        applicable: true,
        holds: lhs.approx_eq(&inv_n, tol),
        detail: format!("r² + (n-1)c = {lhs}, 1/n = {inv_n}"),
    });
    clauses.push(ClauseResult {
        clause: 'c',
        statement: "r² ≤ 1/n",
        applicable: true,
        holds: le(&p.r_squared, &inv_n),
        detail: format!("r² = {}", p.r_squared),
    });
    clauses.push(ClauseResult {
        clause: 'd',
        statement: "m ≤ 1/n² ≤ M",
        applicable: true,
        holds: le(&p.m, &inv_n2) && le(&inv_n2, &p.big_m),
        detail: format!("m = {}, 1/n² = {}, M = {}", p.m, inv_n2, p.big_m),
    });
    let psd = is_positive_semidefinite(b, model.tol().max(if F::EXACT { 0.0 } else { 1e-12 }));
    clauses.push(ClauseResult {
        clause: 'e',
        statement: "if B is positive semidefinite: r² ≥ 1/n² ≥ c",
        applicable: psd,
        holds: le(&inv_n2, &p.r_squared) && le(&c, &inv_n2),
        detail: format!("positive semidefinite: {psd}"),
    });
    let pd = is_inner_product(form, model.tol());
    let at_bound = p.r_squared.approx_eq(&inv_n2, tol);
    clauses.push(ClauseResult {
        clause: 'f',
        statement: "if B is an inner product and r² = 1/n², then dim E = 1",
        applicable: pd && at_bound,
        holds: model.dim() == 1,
        detail: format!("inner product: {pd}, r² = 1/n²: {at_bound}, dim = {}", model.dim()),
    });
    Ok(Lemma1Audit {
        clauses,
        notes: vec![
            "the proof's final inequality is labelled (g), which has no counterpart in the statement; only (a)-(f) are audited".into(),
            "the proof of the positivity window cites clause (d) for r² > 1/n²; that bound is clause (e)".into(),
        ],
    })
}

/// `B_λ(a, b) = λ B(a, b) + (1 − λ) B(a, u) B(u, b)`.
pub fn lambda_family<F: Scalar>(base: &BilinearForm<F>, model: &Model<F>, lambda: &F) -> BilinearForm<F> {
    let w = unit_functional(base, model);
    let uniform = Matrix::outer(&w, &w);
    let matrix = base.matrix.scale(lambda).add(&uniform.scale(&(F::one() - lambda.clone())));
    let mut form = BilinearForm::new(matrix, Provenance::Lambda);
    form.lambda = Some(lambda.clone());
    if let Ok(v) = crate::analysis::is_irreducible(model) {
        if !v.holds {
            form.notes.push("model is reducible: the λ-family may not exhaust the invariant forms".into());
        }
    }
    form
}

/// Closed interval of λ for which `B_λ` is positive.
#[derive(Clone, Debug)]
pub struct PositivityWindow<F> {
    pub lower: F,
    pub upper: F,
    pub params: SpinParameters<F>,
}

impl<F: Scalar> PositivityWindow<F> {
    /// Minimum of `B_λ` over outcome pairs.
    pub fn min_value(&self, lambda: &F) -> F {
        let n = F::from_usize(self.params.n);
        let inv_n2 = (n.clone() * n).recip();
        let extreme = if lambda.is_negative(0.0) { &self.params.big_m } else { &self.params.m };
        lambda.clone() * extreme.clone() + (F::one() - lambda.clone()) * inv_n2
    }

    /// Inner product iff λ > 0 (the base being an inner product).
    pub fn is_inner_product_at(&self, lambda: &F) -> bool {
        lambda.is_positive(0.0)
    }

    pub fn contains(&self, lambda: &F, tol: f64) -> bool {
        !(self.lower.clone() - lambda.clone()).is_positive(tol) && !(lambda.clone() - self.upper.clone()).is_positive(tol)
    }

    pub fn to_json(&self) -> Value {
        json!({"lower": self.lower.to_json(), "upper": self.upper.to_json(), "parameters": self.params.to_json()})
    }
}

/// `[1/(1 − M n²), 1/(1 − m n²)]`.
pub fn positivity_window<F: Scalar>(base: &BilinearForm<F>, model: &Model<F>) -> Result<PositivityWindow<F>> {
    if model.dim() <= 1 {
        return Err(Error::Precondition("dim E = 1: every invariant form is uniform, the window is all of ℝ".into()));
    }
    let params = parameters(base, model)?;
    let n2 = F::from_usize(params.n * params.n);
    let tol = if F::EXACT { 0.0 } else { 1e-12 };
    let lo_den = F::one() - params.big_m.clone() * n2.clone();
    let hi_den = F::one() - params.m.clone() * n2;
    if lo_den.is_zero_tol(tol) || hi_den.is_zero_tol(tol) {
        return Err(Error::Precondition("degenerate parameters: m or M equals 1/n²".into()));
    }
    Ok(PositivityWindow { lower: lo_den.recip(), upper: hi_den.recip(), params })
}

/// Positive definiteness of the form's matrix.
pub fn is_inner_product<F: Scalar>(form: &BilinearForm<F>, tol: f64) -> bool {
    let t = if F::EXACT { 0.0 } else { tol.max(1e-12) };
    is_positive_definite(&form.matrix, t)
}

/// `B(x, y) = 0` for every distinguishable pair.
pub fn is_orthogonalizing<F: Scalar>(form: &BilinearForm<F>, model: &Model<F>) -> bool {
    let tol = if F::EXACT { 0.0 } else { model.tol().max(1e-9) * 10.0 };
    let xs = model.outcome_vectors();
    model.testspace().perp_pairs().iter().all(|&(x, y)| form.eval(&xs[x], &xs[y]).is_zero_tol(tol))
}

/// The minimum over outcome pairs is attained at a distinguishable pair.
pub fn is_minimizing<F: Scalar>(params: &SpinParameters<F>) -> bool {
    match &params.c {
        None => true,
        Some(c) => knife_edge_eq(c, &params.m),
    }
}

fn knife_edge_eq<F: Scalar>(a: &F, b: &F) -> bool {
    if F::EXACT {
        a == b
    } else {
        let (x, y) = (a.to_f64(), b.to_f64());
        (x - y).abs() <= 1e-8 * x.abs().max(y.abs()).max(1e-300) || (x - y).abs() <= 1e-12
    }
}

/// Outcome of the orthogonalizing-form computation.
#[derive(Clone, Debug)]
pub struct OrthogonalizingResult<F: Scalar> {
    pub form: Option<BilinearForm<F>>,
    pub lambda_bar: Option<F>,
    pub canonical: SpinParameters<F>,
}

impl<F: Scalar> OrthogonalizingResult<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "present": self.form.is_some(),
            "lambdaBar": self.lambda_bar.as_ref().map(Scalar::to_json),
            "canonicalParameters": self.canonical.to_json(),
            "form": self.form.as_ref().map(BilinearForm::to_json),
        })
    }
}

/// The unique orthogonalizing SPIN form `B_λ̄`, λ̄ = 1/(1 − m n²), when the
/// canonical form is minimizing.
pub fn orthogonalizing_form<F: Scalar>(model: &Model<F>) -> Result<OrthogonalizingResult<F>> {
    let irreducible = crate::analysis::is_irreducible(model)?;
    if !irreducible.holds {
        return Err(Error::Precondition("the orthogonalizing form is only unique on irreducible models".into()));
    }
    let base = canonical_inner_product(model)?;
    let canonical = parameters(&base, model)?;
    if model.dim() <= 1 {
        let mut form = uniform_form(model)?;
        form.provenance = Provenance::Orthogonalizing;
        form.notes.push("dim E = 1: the uniform form is the only SPIN form".into());
        return Ok(OrthogonalizingResult { form: Some(form), lambda_bar: None, canonical });
    }
    if !is_minimizing(&canonical) {
        return Ok(OrthogonalizingResult { form: None, lambda_bar: None, canonical });
    }
    let n2 = F::from_usize(canonical.n * canonical.n);
    let lambda_bar = (F::one() - canonical.m.clone() * n2).recip();
    let mut form = lambda_family(&base, model, &lambda_bar);
    form.provenance = Provenance::Orthogonalizing;
    if !F::EXACT {
        form.matrix = symmetrize(&form.matrix);
    }
    Ok(OrthogonalizingResult { form: Some(form), lambda_bar: Some(lambda_bar), canonical })
}

fn symmetrize<F: Scalar>(m: &Matrix<F>) -> Matrix<F> {
    m.add(&m.transpose()).scale(&F::ratio(1, 2))
}

/// The λ-family re-based so that the orthogonalizing member sits at λ = 1.
#[derive(Clone, Debug)]
pub struct SpinFamily<F: Scalar> {
    pub orthogonalizing: BilinearForm<F>,
    pub uniform: BilinearForm<F>,
}

impl<F: Scalar> SpinFamily<F> {
    pub fn at(&self, lambda: &F) -> BilinearForm<F> {
        let matrix = self
            .orthogonalizing
            .matrix
            .scale(lambda)
            .add(&self.uniform.matrix.scale(&(F::one() - lambda.clone())));
        let mut f = BilinearForm::new(matrix, Provenance::Lambda);
        f.lambda = Some(lambda.clone());
        f
    }
}

pub fn renormalize_family<F: Scalar>(model: &Model<F>) -> Result<SpinFamily<F>> {
    let res = orthogonalizing_form(model)?;
    let orthogonalizing = res.form.ok_or_else(|| Error::NoOrthogonalizingForm {
        c: res.canonical.c.as_ref().map(|c| c.to_string()).unwrap_or_default(),
        m: res.canonical.m.to_string(),
    })?;
    Ok(SpinFamily { orthogonalizing, uniform: uniform_form(model)? })
}

/// Parameters and report block for a form, as JSON.
pub fn form_report<F: Scalar>(form: &BilinearForm<F>, model: &Model<F>) -> Value {
    let mut v = form.to_json();
    v["spin"] = is_spin_form(form, model).to_json();
    if let Ok(p) = parameters(form, model) {
        v["parameters"] = p.to_json();
    }
    v["innerProduct"] = json!(is_inner_product(form, model.tol()));
    v["unitFunctional"] = vec_to_json(&unit_functional(form, model));
    v
}
