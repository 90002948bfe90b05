//! Reduced models from isotypic components, the combined orthogonalizing
//! inner product, surjective images, and incompressibility.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::analysis::{self, IsotypicDecomposition};
use crate::builders;
use crate::error::{Error, Result};
use crate::lp;
use crate::matrix::{independent_subset, is_positive_definite, Matrix};
use crate::model::{act_on_weight, Model, ModelKind};
use crate::perm::{self, Permutation};
use crate::polyhedral;
use crate::scalar::{vec_add, vec_approx_eq, vec_scale, vec_to_json, Scalar};
use crate::spinforms::{self, BilinearForm, Provenance};
use crate::testspace::TestSpace;
use crate::verdict::{Mode, Verdict};

/// Largest outcome set for which all test-space symmetries are enumerated.
pub const MAX_ENUMERATED_OUTCOMES: usize = 8;

/// A model built on one invariant component `M_j` of `u^⊥`.
#[derive(Clone, Debug)]
pub struct ReducedModel<F: Scalar> {
    pub model: Model<F>,
    pub parent: String,
    pub component: usize,
    pub epsilon: F,
    /// `x_j = p_j(x) + u/n` in parent coordinates, per parent outcome.
    pub projected: Vec<Vec<F>>,
    /// `class[x]`: the reduced outcome that parent outcome `x` lands on.
    pub class: Vec<usize>,
    /// Parent coordinates → reduced hull coordinates on `M_j ⊕ ℝu`.
    pub coordinate_map: Matrix<F>,
}

impl<F: Scalar> ReducedModel<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "parent": self.parent,
            "component": self.component,
            "epsilon": self.epsilon.to_json(),
            "model": self.model.summary_json(),
            "outcomeClasses": self.class,
        })
    }
}

/// Builds the model on component `j` with `Ω₁ = co(G v_ε)`.
pub fn reduce<F: Scalar>(model: &Model<F>, j: usize) -> Result<ReducedModel<F>> {
    let dec = analysis::isotypic_decomposition(model)?;
    reduce_with(model, &dec, j)
}

pub fn reduce_with<F: Scalar>(model: &Model<F>, dec: &IsotypicDecomposition<F>, j: usize) -> Result<ReducedModel<F>> {
    model.require_finite("reduction")?;
    let block = dec
        .blocks
        .get(j)
        .ok_or_else(|| Error::Precondition(format!("component {j} out of range (k = {})", dec.len())))?;
    let tol = model.tol();
    let b = &dec.form;
    let p = &block.projection;
    let n = F::from_usize(model.rank());
    let u = model.unit();
    let u_over_n = vec_scale(u, &n.recip());
    let projected: Vec<Vec<F>> = model.outcome_vectors().iter().map(|x| vec_add(&p.mul_vec(x), &u_over_n)).collect();

    // Merge outcomes whose projections coincide.
    let mut reps: Vec<usize> = Vec::new();
    let mut class = Vec::with_capacity(projected.len());
    for (x, v) in projected.iter().enumerate() {
        match reps.iter().position(|&r| vec_approx_eq(&projected[r], v, tol)) {
            Some(c) => class.push(c),
            None => {
                class.push(reps.len());
                reps.push(x);
            }
        }
    }
    let ts = model.testspace();
    let labels: Vec<String> = (0..reps.len())
        .map(|c| {
            (0..class.len())
                .filter(|&x| class[x] == c)
                .map(|x| ts.label(x).to_string())
                .collect::<Vec<_>>()
                .join("=")
        })
        .collect();
    let tests: Vec<Vec<usize>> = ts.tests().iter().map(|t| t.iter().map(|&x| class[x]).collect()).collect();
    for (t, image) in ts.tests().iter().zip(&tests) {
        if image.iter().collect::<BTreeSet<_>>().len() != t.len() {
            return Err(Error::Precondition("projection identifies two outcomes of one test".into()));
        }
    }
    let reduced_ts = TestSpace::new(labels, tests)?;
    let generators: Vec<Permutation> = model
        .permutation_generators()
        .iter()
        .map(|g| {
            let mut images = vec![0; reps.len()];
            for (c, &r) in reps.iter().enumerate() {
                images[c] = class[g.apply(r)];
            }
            Permutation::new(images)
        })
        .collect::<Result<_>>()?;

    // v: the first pure state, as a vector through the canonical form.
    let pure = model.extreme_states()[0];
    let b_inv = b.inverse(tol).ok_or_else(|| Error::Precondition("degenerate canonical form".into()))?;
    let v = b_inv.mul_vec(&model.orbit_covectors()[pure]);
    let pv = p.mul_vec(&v);
    // ⟨v_ε, x_j⟩ = 1/n + ε⟨p v, p x⟩; take the largest ε ≤ 1 keeping all values ≥ 0.
    let mut epsilon = F::one();
    for x in model.outcome_vectors() {
        let a = b.bilinear(&pv, &p.mul_vec(x));
        if a.is_negative(tol) {
            let bound = -(n.clone() * a).recip();
            if bound < epsilon {
                epsilon = bound;
            }
        }
    }
    let weight: Vec<F> = reps
        .iter()
        .map(|&r| n.recip() + epsilon.clone() * b.bilinear(&pv, &p.mul_vec(model.outcome_vector(r))))
        .collect();
    let name = format!("{}/M{}", model.name(), j);
    let reduced = Model::finite(&name, reduced_ts, vec![weight], generators, model.options().clone())?;

    // S_j: solve S X = Y on an independent set of projected outcomes.
    let rep_vectors: Vec<Vec<F>> = reps.iter().map(|&r| projected[r].clone()).collect();
    let basis = independent_subset(&rep_vectors, tol);
    let x_b = Matrix::from_columns(&basis.iter().map(|&i| rep_vectors[i].clone()).collect::<Vec<_>>());
    let y_b = Matrix::from_columns(&basis.iter().map(|&i| reduced.outcome_vector(i).to_vec()).collect::<Vec<_>>());
    let gram = x_b.transpose().mul(&x_b);
    let left = gram
        .inverse(tol)
        .ok_or_else(|| Error::Precondition("projected outcomes are degenerate".into()))?
        .mul(&x_b.transpose());
    let coordinate_map = y_b.mul(&left);
    Ok(ReducedModel { model: reduced, parent: model.name().to_string(), component: j, epsilon, projected, class, coordinate_map })
}

/// Validation data for the combined form.
#[derive(Clone, Debug)]
pub struct CombinedForm<F: Scalar> {
    pub form: BilinearForm<F>,
    pub positive_definite: bool,
    pub orthogonalizing: bool,
    pub spin: bool,
}

impl<F: Scalar> CombinedForm<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "form": self.form.to_json(),
            "positiveDefinite": self.positive_definite,
            "orthogonalizing": self.orthogonalizing,
            "spin": self.spin,
        })
    }
}

/// `⟨a, b⟩_* = (1/k)[Σ_j ⟨p_j a, p_j b⟩_j + k⟨a, u⟩⟨b, u⟩]`, the sum rescaled
/// so that `⟨u, u⟩_* = 1`.
pub fn combined_inner_product<F: Scalar>(model: &Model<F>) -> Result<CombinedForm<F>> {
    let dec = analysis::isotypic_decomposition(model)?;
    let k = dec.len();
    let mut acc = Matrix::zeros(model.dim(), model.dim());
    for j in 0..k {
        let reduced = reduce_with(model, &dec, j)?;
        let res = spinforms::orthogonalizing_form(&reduced.model)?;
        let fj = res.form.ok_or_else(|| Error::NoOrthogonalizingForm {
            c: format!("component {j}: {}", res.canonical.c.as_ref().map(|c| c.to_string()).unwrap_or_default()),
            m: res.canonical.m.to_string(),
        })?;
        let sp = reduced.coordinate_map.mul(&dec.blocks[j].projection);
        acc = acc.add(&sp.transpose().mul(&fj.matrix).mul(&sp));
    }
    let bu = dec.form.mul_vec(model.unit());
    let kf = F::from_usize(k);
    let total = acc.add(&Matrix::outer(&bu, &bu).scale(&kf)).scale(&kf.recip());
    let form = BilinearForm::new(total, Provenance::Combined);
    let positive_definite = is_positive_definite(&form.matrix, model.tol());
    let orthogonalizing = spinforms::is_orthogonalizing(&form, model);
    let spin = spinforms::is_spin_form(&form, model).holds();
    Ok(CombinedForm { form, positive_definite, orthogonalizing, spin })
}

/// The image `B` of `A` under a surjective outcome map with group images.
///
/// `Ω(B) = {β : β∘φ ∈ Ω(A)}`. Collapsing everything to a single outcome
/// yields the trivial model.
pub fn image_model<F: Scalar>(
    model: &Model<F>,
    labels: Vec<String>,
    outcome_map: &[usize],
    group_images: &[Permutation],
) -> Result<Model<F>> {
    model.require_finite("image construction")?;
    let ts = model.testspace();
    let fail = |d: &str| Error::MorphismInvalid { condition: "surjectivity".into(), detail: d.into() };
    if outcome_map.len() != ts.len() || outcome_map.iter().any(|&y| y >= labels.len()) {
        return Err(fail("outcome map has the wrong shape"));
    }
    let hit: BTreeSet<usize> = outcome_map.iter().copied().collect();
    if hit.len() != labels.len() {
        return Err(fail("outcome map is not onto"));
    }
    if labels.len() == 1 {
        return Ok(builders::classical::<F>(1).with_name(&format!("{}/trivial", model.name())));
    }
    let gens = model.permutation_generators();
    if group_images.len() != gens.len() {
        return Err(fail("one image per group generator is required"));
    }
    for (g, psi) in gens.iter().zip(group_images) {
        if psi.degree() != labels.len() || (0..ts.len()).any(|x| outcome_map[g.apply(x)] != psi.apply(outcome_map[x])) {
            return Err(Error::MorphismInvalid {
                condition: "equivariance".into(),
                detail: format!("φ(gx) ≠ ψ(g)φ(x) for g = {g}"),
            });
        }
    }
    let tests: Vec<Vec<usize>> = ts.tests().iter().map(|t| t.iter().map(|&x| outcome_map[x]).collect()).collect();
    for (t, image) in ts.tests().iter().zip(&tests) {
        if image.iter().collect::<BTreeSet<_>>().len() != t.len() {
            return Err(fail("a test is not mapped injectively"));
        }
    }
    let target = TestSpace::new(labels, tests)?;

    // Unknowns (β, c): Φβ = X c, with c in the state cone of A and β ≥ 0.
    let tol = model.tol();
    let ny = target.len();
    let d = model.dim();
    let mut eq_rows = Vec::new();
    for x in 0..ts.len() {
        let mut row = vec![F::zero(); ny + d];
        row[outcome_map[x]] = F::one();
        for (i, v) in model.outcome_vector(x).iter().enumerate() {
            row[ny + i] = -v.clone();
        }
        eq_rows.push(row);
    }
    let null = Matrix::from_rows(&eq_rows).nullspace(tol);
    if null.is_empty() {
        return Err(fail("no weight on the image pulls back into the hull"));
    }
    let n_mat = Matrix::from_columns(&null);
    let states: Vec<Vec<F>> = model.extreme_states().iter().map(|&i| model.orbit_covectors()[i].clone()).collect();
    let facets = polyhedral::facets_of_generators(&states, tol)
        .ok_or_else(|| Error::Precondition("state cone is not full-dimensional".into()))?;
    let mut ineq: Vec<Vec<F>> = Vec::new();
    for y in 0..ny {
        ineq.push(n_mat.row(y).to_vec());
    }
    for f in &facets {
        let mut row = vec![F::zero(); null.len()];
        for (i, fi) in f.iter().enumerate() {
            for (k, r) in row.iter_mut().enumerate() {
                *r = r.clone() + fi.clone() * n_mat[(ny + i, k)].clone();
            }
        }
        ineq.push(row);
    }
    let rays = if null.len() == 1 {
        let z = vec![F::one()];
        let neg = vec![-F::one()];
        [z, neg].into_iter().filter(|z| ineq.iter().all(|r| !crate::scalar::dot(r, z).is_negative(tol))).collect()
    } else {
        polyhedral::rays_of_inequalities(&ineq, tol).ok_or_else(|| fail("image state cone is not pointed"))?
    };
    let first_test = target.tests()[0].clone();
    let weights: Vec<Vec<F>> = rays
        .iter()
        .filter_map(|z| {
            let beta: Vec<F> = (0..ny).map(|y| crate::scalar::dot(n_mat.row(y), z)).collect();
            let s = first_test.iter().fold(F::zero(), |acc, &y| acc + beta[y].clone());
            (!s.is_zero_tol(tol)).then(|| beta.into_iter().map(|v| v / s.clone()).collect())
        })
        .collect();
    if weights.is_empty() {
        return Err(Error::Precondition("image state space is empty".into()));
    }
    Model::finite(&format!("{}/image", model.name()), target, weights, group_images.to_vec(), model.options().clone())
}

/// Primitivity of the outcome action plus invariance of `Ω` under every
/// symmetry of the test space.
pub fn is_incompressible<F: Scalar>(model: &Model<F>) -> Result<Verdict> {
    match model.kind() {
        ModelKind::Quantum(_) => {
            return Ok(Verdict::new("incompressible", true, Mode::Analytic)
                .with_note("every quantum model is incompressible"))
        }
        ModelKind::SpinFactor(_) => {
            return Err(Error::Unsupported("incompressibility of spin-factor models".into()));
        }
        ModelKind::Finite => {}
    }
    let ts = model.testspace();
    let gens = model.permutation_generators();
    let mode = Mode::for_scalar::<F>();
    if !perm::is_transitive(gens, ts.len()) {
        return Err(Error::Precondition("the group does not act transitively on outcomes".into()));
    }
    if let Some(blocks) = perm::nontrivial_block_system(gens, ts.len()) {
        let named: Vec<Vec<&str>> = blocks.iter().map(|b| b.iter().map(|&x| ts.label(x)).collect()).collect();
        return Ok(Verdict::new("incompressible", false, mode).with_witness(json!({"blocks": named})));
    }
    if ts.len() > MAX_ENUMERATED_OUTCOMES {
        return Ok(Verdict::new("incompressible", true, mode)
            .with_note("primitive; test-space symmetries not enumerated at this size"));
    }
    let tol = model.tol();
    let ext: Vec<Vec<F>> = model.extreme_states().iter().map(|&i| model.orbit_states()[i].clone()).collect();
    for g in test_space_symmetries(ts) {
        for s in &ext {
            let moved = act_on_weight(&g, s);
            if lp::convex_combination(&ext, &moved, tol).is_none() {
                return Ok(Verdict::new("incompressible", false, mode).with_witness(json!({
                    "symmetry": g.to_string(),
                    "movedState": vec_to_json(&moved),
                })).with_note("primitive, but Ω is not invariant under every test-space symmetry"));
            }
        }
    }
    Ok(Verdict::new("incompressible", true, mode).with_note("primitive action; Ω invariant under all test-space symmetries"))
}

/// Every permutation of the outcomes mapping tests to tests (small spaces).
pub fn test_space_symmetries(ts: &TestSpace) -> Vec<Permutation> {
    let n = ts.len();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(ts: &TestSpace, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        let n = ts.len();
        if current.len() == n {
            let p = Permutation(current.clone());
            if ts.is_symmetry(&p).unwrap_or(false) {
                out.push(p);
            }
            return;
        }
        let x = current.len();
        for y in 0..n {
            // Distinguishability must be preserved among the outcomes placed so far.
            if used[y] || (0..x).any(|z| ts.distinguishable(z, x) != ts.distinguishable(current[z], y)) {
                continue;
            }
            used[y] = true;
            current.push(y);
            go(ts, current, used, out);
            current.pop();
            used[y] = false;
        }
    }
    go(ts, &mut current, &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn irreducible_parent_reduces_to_itself() {
        let m = builders::square_bit::<Rational>();
        let r = reduce(&m, 0).unwrap();
        assert_eq!(r.model.dim(), m.dim());
        assert_eq!(r.epsilon, Rational::one());
        assert_eq!(r.model.testspace().tests(), m.testspace().tests());
    }

    #[test]
    fn square_bit_combined_form_is_orthogonalizing_form() {
        let m = builders::square_bit::<Rational>();
        let c = combined_inner_product(&m).unwrap();
        let orth = spinforms::orthogonalizing_form(&m).unwrap().form.unwrap();
        assert_eq!(c.form.matrix, orth.matrix);
    }

    #[test]
    fn reducible_fixture_combined_form() {
        let m = builders::reducible_fixture::<Rational>();
        let c = combined_inner_product(&m).unwrap();
        assert!(c.positive_definite && c.orthogonalizing && c.spin);
        for j in 0..2 {
            let r = reduce(&m, j).unwrap();
            assert!(analysis::is_irreducible(&r.model).unwrap().holds);
        }
    }

    #[test]
    fn incompressibility_verdicts() {
        assert!(is_incompressible(&builders::classical::<Rational>(3)).unwrap().holds);
        let v = is_incompressible(&builders::imprimitive_fixture::<Rational>()).unwrap();
        assert!(!v.holds && v.witness.is_some());
    }

    #[test]
    fn collapse_to_a_point_is_trivial() {
        let m = builders::classical::<Rational>(3);
        let t = image_model(&m, vec!["*".into()], &[0, 0, 0], &[]).unwrap();
        assert_eq!(t.testspace().len(), 1);
    }

    #[test]
    fn identity_image_is_the_same_model() {
        let m = builders::square_bit::<Rational>();
        let labels = m.testspace().labels().to_vec();
        let img = image_model(&m, labels, &[0, 1, 2, 3], m.permutation_generators()).unwrap();
        assert_eq!(img.dim(), m.dim());
        assert_eq!(img.extreme_states().len(), m.extreme_states().len());
    }
}
