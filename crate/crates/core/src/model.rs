//! Probabilistic models, their linear hulls, and symmetry-level predicates.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;

use serde_json::json;

use crate::error::{Error, Result};
use crate::hermitian;
use crate::lp;
use crate::matrix::{independent_subset, Matrix};
use crate::perm::{self, Permutation};
use crate::polyhedral;
use crate::scalar::{default_tolerance, dot, vec_approx_eq, vec_to_json, Scalar};
use crate::testspace::TestSpace;
use crate::verdict::{Mode, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Finite,
    /// Complex quantum system of the given Hilbert dimension.
    Quantum(usize),
    /// Spin factor `ℝ ⊕ ℝ^k` with its Lorentz cone.
    SpinFactor(usize),
}

impl ModelKind {
    pub fn is_analytic(self) -> bool {
        !matches!(self, ModelKind::Finite)
    }

    pub fn tag(self) -> String {
        match self {
            ModelKind::Finite => "finite".into(),
            ModelKind::Quantum(n) => format!("quantum({n})"),
            ModelKind::SpinFactor(k) => format!("spin_factor({k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupHandle {
    Finite { generators: Vec<Permutation> },
    Unitary(usize),
    Orthogonal(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelOptions {
    /// Absolute tolerance for float comparisons (ignored in exact mode).
    pub tolerance: f64,
    /// Largest group closure that will be enumerated.
    pub max_group: usize,
    /// Seed for sample batteries of analytic models.
    pub seed: u64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_group: 1_000_000, seed: 7 }
    }
}

/// The ordered vector space `E(A)` in fixed coordinates.
#[derive(Clone, Debug)]
pub struct LinearHull<F: Scalar> {
    pub dim: usize,
    /// Coordinates of each outcome (a sample battery for analytic kinds).
    pub outcome_vectors: Vec<Vec<F>>,
    pub unit: Vec<F>,
    /// One matrix per group generator (a sampled battery for analytic kinds).
    pub group_matrices: Vec<Matrix<F>>,
    /// Covectors of the orbit states (a battery of pure states for analytic kinds).
    pub state_covectors: Vec<Vec<F>>,
    /// Outcomes whose vectors form a basis of `E(A)` (finite kinds).
    pub outcome_basis: Vec<usize>,
}

impl<F: Scalar> LinearHull<F> {
    pub fn evaluate(&self, covector: &[F], v: &[F]) -> F {
        dot(covector, v)
    }
}

#[derive(Clone, Debug)]
pub struct Model<F: Scalar> {
    name: String,
    kind: ModelKind,
    testspace: TestSpace,
    generators: Vec<Vec<F>>,
    group: GroupHandle,
    options: ModelOptions,
    orbit: Vec<Vec<F>>,
    orbit_label: Vec<usize>,
    hull: LinearHull<F>,
    closure: OnceLock<std::result::Result<Vec<Permutation>, usize>>,
    extreme: OnceLock<Vec<usize>>,
}

/// A validated morphism together with its lift `E(A) → E(B)`.
#[derive(Clone, Debug)]
pub struct Morphism<F: Scalar> {
    pub outcome_map: Vec<usize>,
    pub group_map: Vec<Permutation>,
    pub lifted: Matrix<F>,
}

impl<F: Scalar> Model<F> {
    /// Builds a finite model. `states` are probability weights indexed by
    /// outcome; `Ω` is the convex hull of their orbit.
    pub fn finite(
        name: &str,
        testspace: TestSpace,
        states: Vec<Vec<F>>,
        generators: Vec<Permutation>,
        options: ModelOptions,
    ) -> Result<Self> {
        let tol = effective_tol::<F>(&options);
        if states.is_empty() {
            return Err(Error::Precondition("a model needs at least one state".into()));
        }
        for (k, s) in states.iter().enumerate() {
            if s.len() != testspace.len() {
                return Err(Error::DimensionMismatch { expected: testspace.len(), found: s.len() });
            }
            if !testspace.is_probability_weight(s, tol)? {
                return Err(Error::Precondition(format!("state {k} is not a probability weight")));
            }
        }
        for g in &generators {
            if !testspace.is_symmetry(g)? {
                return Err(Error::NotSymmetry(g.to_string()));
            }
        }
        let (orbit, orbit_label) = state_orbits(&states, &generators, tol, options.max_group)?;

        let basis_states = independent_subset(&orbit, tol);
        let eval = Matrix::from_rows(&basis_states.iter().map(|&i| orbit[i].clone()).collect::<Vec<_>>());
        let dim = basis_states.len();
        let outcome_vectors: Vec<Vec<F>> = (0..testspace.len()).map(|x| eval.column(x)).collect();
        for x in 0..outcome_vectors.len() {
            for y in x + 1..outcome_vectors.len() {
                if vec_approx_eq(&outcome_vectors[x], &outcome_vectors[y], tol) {
                    return Err(Error::NotSeparating(
                        testspace.label(x).to_string(),
                        testspace.label(y).to_string(),
                    ));
                }
            }
        }
        let unit = vec![F::one(); dim];
        let outcome_basis = independent_subset(&outcome_vectors, tol);
        let basis_matrix = Matrix::from_columns(
            &outcome_basis.iter().map(|&x| outcome_vectors[x].clone()).collect::<Vec<_>>(),
        );
        let basis_inverse = basis_matrix
            .inverse(tol)
            .ok_or_else(|| Error::Precondition("outcomes do not span the hull".into()))?;
        let lift = |g: &Permutation| -> Result<Matrix<F>> {
            let images = Matrix::from_columns(
                &outcome_basis.iter().map(|&x| outcome_vectors[g.apply(x)].clone()).collect::<Vec<_>>(),
            );
            let m = images.mul(&basis_inverse);
            for (x, v) in outcome_vectors.iter().enumerate() {
                if !vec_approx_eq(&m.mul_vec(v), &outcome_vectors[g.apply(x)], tol * 10.0) {
                    return Err(Error::NotSymmetry(format!("{g} does not act linearly on the hull")));
                }
            }
            Ok(m)
        };
        let group_matrices = generators.iter().map(lift).collect::<Result<Vec<_>>>()?;
        let solve_matrix = Matrix::from_columns(&outcome_vectors).transpose();
        let state_covectors = orbit
            .iter()
            .map(|s| {
                solve_matrix
                    .solve(s, tol)
                    .ok_or_else(|| Error::Precondition("state outside the span of the hull".into()))
            })
            .collect::<Result<Vec<_>>>()?;

        let hull = LinearHull { dim, outcome_vectors, unit, group_matrices, state_covectors, outcome_basis };
        Ok(Self {
            name: name.to_string(),
            kind: ModelKind::Finite,
            testspace,
            generators: states,
            group: GroupHandle::Finite { generators },
            options,
            orbit,
            orbit_label,
            hull,
            closure: OnceLock::new(),
            extreme: OnceLock::new(),
        })
    }

    /// Assembles an analytic model from a representative battery.
    pub(crate) fn analytic(
        name: &str,
        kind: ModelKind,
        battery: TestSpace,
        hull: LinearHull<F>,
        group: GroupHandle,
        options: ModelOptions,
    ) -> Self {
        let n_states = hull.state_covectors.len();
        Self {
            name: name.to_string(),
            kind,
            testspace: battery,
            generators: Vec::new(),
            group,
            options,
            orbit: Vec::new(),
            orbit_label: vec![0; n_states],
            hull,
            closure: OnceLock::new(),
            extreme: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn is_analytic(&self) -> bool {
        self.kind.is_analytic()
    }

    /// The test space (the representative battery for analytic kinds).
    pub fn testspace(&self) -> &TestSpace {
        &self.testspace
    }

    pub fn group(&self) -> &GroupHandle {
        &self.group
    }

    pub fn options(&self) -> &ModelOptions {
        &self.options
    }

    pub fn tol(&self) -> f64 {
        effective_tol::<F>(&self.options)
    }

    pub fn hull(&self) -> &LinearHull<F> {
        &self.hull
    }

    pub fn dim(&self) -> usize {
        self.hull.dim
    }

    pub fn unit(&self) -> &[F] {
        &self.hull.unit
    }

    /// Rank `n`: the common test size.
    pub fn rank(&self) -> usize {
        match self.kind {
            ModelKind::Finite => self.testspace.rank(),
            ModelKind::Quantum(n) => n,
            ModelKind::SpinFactor(_) => 2,
        }
    }

    pub fn outcome_vector(&self, x: usize) -> &[F] {
        &self.hull.outcome_vectors[x]
    }

    pub fn outcome_vectors(&self) -> &[Vec<F>] {
        &self.hull.outcome_vectors
    }

    pub fn state_generators(&self) -> &[Vec<F>] {
        &self.generators
    }

    pub fn permutation_generators(&self) -> &[Permutation] {
        match &self.group {
            GroupHandle::Finite { generators } => generators,
            _ => &[],
        }
    }

    /// Orbit states as probability weights (finite kinds).
    pub fn orbit_states(&self) -> &[Vec<F>] {
        &self.orbit
    }

    /// Orbit states as covectors in hull coordinates.
    /// Index of the generator orbit containing orbit state `i`.
    pub fn orbit_label_of(&self, i: usize) -> usize {
        self.orbit_label[i]
    }

    pub fn orbit_covectors(&self) -> &[Vec<F>] {
        &self.hull.state_covectors
    }

    /// Covector of a probability weight on the outcomes.
    pub fn state_covector(&self, weight: &[F]) -> Result<Vec<F>> {
        self.require_finite("state covector from a weight")?;
        if weight.len() != self.testspace.len() {
            return Err(Error::DimensionMismatch { expected: self.testspace.len(), found: weight.len() });
        }
        Matrix::from_columns(&self.hull.outcome_vectors)
            .transpose()
            .solve(weight, self.tol())
            .ok_or_else(|| Error::Precondition("weight is not a linear functional on the hull".into()))
    }

    /// Values of a covector on every outcome.
    pub fn weight_of(&self, covector: &[F]) -> Vec<F> {
        self.hull.outcome_vectors.iter().map(|x| dot(covector, x)).collect()
    }

    pub(crate) fn require_finite(&self, what: &str) -> Result<()> {
        if self.is_analytic() {
            Err(Error::Unsupported(format!("{what} needs a finite model, found {}", self.kind.tag())))
        } else {
            Ok(())
        }
    }

    /// All group elements (finite kinds), identity first.
    pub fn group_elements(&self) -> Result<&[Permutation]> {
        self.require_finite("group enumeration")?;
        let res = self.closure.get_or_init(|| {
            perm::closure(self.permutation_generators(), self.testspace.len(), self.options.max_group)
                .map_err(|_| self.options.max_group)
        });
        match res {
            Ok(v) => Ok(v),
            Err(limit) => Err(Error::GroupTooLarge { limit: *limit }),
        }
    }

    /// Hull matrix of a group element.
    pub fn element_matrix(&self, g: &Permutation) -> Result<Matrix<F>> {
        self.require_finite("element matrix")?;
        let basis = &self.hull.outcome_basis;
        let from = Matrix::from_columns(
            &basis.iter().map(|&x| self.hull.outcome_vectors[x].clone()).collect::<Vec<_>>(),
        );
        let to = Matrix::from_columns(
            &basis.iter().map(|&x| self.hull.outcome_vectors[g.apply(x)].clone()).collect::<Vec<_>>(),
        );
        let inv = from.inverse(self.tol()).ok_or_else(|| Error::Precondition("singular outcome basis".into()))?;
        Ok(to.mul(&inv))
    }

    /// Hull matrices for every group element (finite) or the battery (analytic).
    pub fn all_group_matrices(&self) -> Result<Vec<Matrix<F>>> {
        if self.is_analytic() {
            return Ok(self.hull.group_matrices.clone());
        }
        self.group_elements()?.iter().map(|g| self.element_matrix(g)).collect()
    }

    /// `v ∈ E₊`.
    pub fn cone_contains(&self, v: &[F]) -> Result<bool> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        let tol = self.tol();
        Ok(match self.kind {
            ModelKind::Finite => lp::conic_combination(&self.hull.outcome_vectors, v, tol).is_some(),
            ModelKind::Quantum(n) => {
                let h = hermitian::from_coords(&v.iter().map(Scalar::to_f64).collect::<Vec<_>>(), n);
                hermitian::is_psd(&h, tol.max(1e-12))
            }
            ModelKind::SpinFactor(_) => {
                // Outcome (1/2, û/2) in these coordinates; the cone is t ≥ |x|.
                hermitian::in_lorentz_cone(&v.iter().map(Scalar::to_f64).collect::<Vec<_>>(), tol.max(1e-12))
            }
        })
    }

    /// Indices (into the orbit) of extreme points of `Ω`.
    pub fn extreme_states(&self) -> &[usize] {
        self.extreme.get_or_init(|| {
            if self.is_analytic() {
                return (0..self.hull.state_covectors.len()).collect();
            }
            let tol = self.tol();
            let mut extreme_label: HashMap<usize, bool> = HashMap::new();
            let mut out = Vec::new();
            for (i, s) in self.orbit.iter().enumerate() {
                let label = self.orbit_label[i];
                let is_extreme = *extreme_label.entry(label).or_insert_with(|| {
                    let others: Vec<Vec<F>> = self
                        .orbit
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, t)| t.clone())
                        .collect();
                    lp::convex_combination(&others, s, tol).is_none()
                });
                if is_extreme {
                    out.push(i);
                }
            }
            out
        })
    }

    /// `G` transitive on tests and on ordered distinguishable pairs.
    pub fn is_two_symmetric(&self) -> Result<Verdict> {
        if self.is_analytic() {
            return Ok(Verdict::new("two-symmetric", true, Mode::Analytic)
                .with_note("the full unitary/orthogonal group is transitive on orthogonal pairs"));
        }
        let elements = self.group_elements()?;
        let ts = &self.testspace;
        let test_orbit: BTreeSet<usize> = elements.iter().filter_map(|g| ts.image_test(g, 0)).collect();
        if test_orbit.len() != ts.tests().len() {
            let missing = (0..ts.tests().len()).find(|t| !test_orbit.contains(t)).unwrap_or(0);
            return Ok(Verdict::new("two-symmetric", false, Mode::Exact)
                .with_witness(json!({"unreachableTest": self.test_labels(missing)})));
        }
        let pairs = ts.perp_pairs();
        if let Some(&(x, y)) = pairs.first() {
            let orbit: HashSet<(usize, usize)> = elements.iter().map(|g| (g.apply(x), g.apply(y))).collect();
            if let Some(&(a, b)) = pairs.iter().find(|p| !orbit.contains(p)) {
                return Ok(Verdict::new("two-symmetric", false, Mode::Exact).with_witness(
                    json!({"unreachablePair": [ts.label(a), ts.label(b)], "from": [ts.label(x), ts.label(y)]}),
                ));
            }
        }
        Ok(Verdict::new("two-symmetric", true, Mode::Exact))
    }

    /// Equal test sizes, and every bijection between tests is implemented by `G`.
    pub fn is_fully_symmetric(&self) -> Result<Verdict> {
        if self.is_analytic() {
            return Ok(Verdict::new("fully-symmetric", true, Mode::Analytic)
                .with_note("any bijection between orthonormal bases extends to a unitary/orthogonal map"));
        }
        let ts = &self.testspace;
        if !ts.has_uniform_rank() {
            return Ok(Verdict::new("fully-symmetric", false, Mode::Exact).with_note("tests differ in size"));
        }
        let elements = self.group_elements()?;
        let e0 = &ts.tests()[0];
        let n = e0.len();
        let needed: usize = (1..=n).product();
        let mut realized: Vec<HashSet<Vec<usize>>> = vec![HashSet::new(); ts.tests().len()];
        for g in elements {
            if let Some(t) = ts.image_test(g, 0) {
                realized[t].insert(e0.iter().map(|&x| g.apply(x)).collect());
            }
        }
        if let Some(t) = realized.iter().position(|r| r.len() != needed) {
            return Ok(Verdict::new("fully-symmetric", false, Mode::Exact).with_witness(json!({
                "test": self.test_labels(t),
                "realizedBijections": realized[t].len(),
                "required": needed,
            })));
        }
        Ok(Verdict::new("fully-symmetric", true, Mode::Exact))
    }

    /// Two-symmetric and transitive on the extreme points of `Ω`.
    pub fn is_bisymmetric(&self) -> Result<Verdict> {
        if self.is_analytic() {
            return Ok(Verdict::new("bisymmetric", true, Mode::Analytic)
                .with_note("the group acts transitively on pure states"));
        }
        let two = self.is_two_symmetric()?;
        if !two.holds {
            return Ok(Verdict::new("bisymmetric", false, two.mode).with_note("not two-symmetric"));
        }
        let ext = self.extreme_states();
        let labels: BTreeSet<usize> = ext.iter().map(|&i| self.orbit_label[i]).collect();
        let mode = Mode::for_scalar::<F>();
        if labels.len() > 1 {
            let reps: Vec<_> = labels
                .iter()
                .map(|&l| {
                    let i = ext.iter().copied().find(|&i| self.orbit_label[i] == l).unwrap_or(0);
                    self.weight_json(&self.orbit[i])
                })
                .collect();
            return Ok(Verdict::new("bisymmetric", false, mode)
                .with_witness(json!({"extremeOrbitRepresentatives": reps})));
        }
        Ok(Verdict::new("bisymmetric", true, mode).with_note(format!("{} extreme points in one orbit", ext.len())))
    }

    /// Every outcome `x` has a unique state with `α(x) = 1`.
    pub fn is_sharp(&self) -> Result<Verdict> {
        if self.is_analytic() {
            let note = match self.kind {
                ModelKind::Quantum(_) => "Tr(ρP) = 1 forces ρ = P for a rank-one projection P",
                _ => "a unit vector has a unique supporting pure state on the ball",
            };
            return Ok(Verdict::new("sharp", true, Mode::Analytic).with_note(note));
        }
        let mode = Mode::for_scalar::<F>();
        let tol = self.tol();
        let ext = self.extreme_states();
        let reps: Vec<usize> = perm::orbits(self.permutation_generators(), self.testspace.len())
            .into_iter()
            .map(|o| o[0])
            .collect();
        for x in reps {
            // The face {α(x) = 1} of the polytope is the hull of the vertices on it.
            let on_face: Vec<usize> =
                ext.iter().copied().filter(|&i| self.orbit[i][x].approx_eq(&F::one(), tol)).collect();
            let label = self.testspace.label(x);
            if on_face.is_empty() {
                return Ok(Verdict::new("sharp", false, mode)
                    .with_witness(json!({"outcome": label, "face": "empty"})));
            }
            if on_face.len() > 1 {
                return Ok(Verdict::new("sharp", false, mode).with_witness(json!({
                    "outcome": label,
                    "faceVertices": on_face.iter().take(2).map(|&i| self.weight_json(&self.orbit[i])).collect::<Vec<_>>(),
                })));
            }
        }
        Ok(Verdict::new("sharp", true, mode))
    }

    /// Vertices of `Ω̂`: normalized extreme rays of the cone of positive functionals.
    pub fn positive_state_vertices(&self) -> Result<Vec<Vec<F>>> {
        self.require_finite("state-space enumeration")?;
        let tol = self.tol();
        let rays = polyhedral::rays_of_inequalities(&self.hull.outcome_vectors, tol)
            .ok_or_else(|| Error::Precondition("outcome cone is not full-dimensional".into()))?;
        Ok(rays
            .into_iter()
            .map(|r| {
                let s = dot(&r, &self.hull.unit);
                r.into_iter().map(|v| v / s.clone()).collect()
            })
            .collect())
    }

    /// `Ω = Ω̂`.
    pub fn is_state_complete(&self) -> Result<Verdict> {
        if self.is_analytic() {
            return Ok(Verdict::new("state-complete", true, Mode::Analytic)
                .with_note("every positive normalized functional is a density operator / ball point"));
        }
        let mode = Mode::for_scalar::<F>();
        let tol = self.tol();
        let cmp_tol = if F::EXACT { 0.0 } else { tol * 100.0 };
        let ext: Vec<&Vec<F>> = self.extreme_states().iter().map(|&i| &self.hull.state_covectors[i]).collect();
        let vertices = self.positive_state_vertices()?;
        for v in &vertices {
            if !ext.iter().any(|e| vec_approx_eq(e, v, cmp_tol)) {
                return Ok(Verdict::new("state-complete", false, mode).with_witness(json!({
                    "weightOutsideOmega": self.weight_json(&self.weight_of(v)),
                })));
            }
        }
        Ok(Verdict::new("state-complete", true, mode)
            .with_note(format!("{} vertices of the positive state space, all in Ω", vertices.len())))
    }

    /// Validates `(φ, ψ)` as a morphism `self → target` and lifts it.
    ///
    /// `group_map[i]` is the image of the `i`-th generator of `self`.
    pub fn apply_morphism(
        &self,
        target: &Model<F>,
        outcome_map: &[usize],
        group_map: &[Permutation],
    ) -> Result<Morphism<F>> {
        self.require_finite("morphism validation")?;
        target.require_finite("morphism validation")?;
        let tol = self.tol();
        let invalid = |condition: &str, detail: String| Error::MorphismInvalid { condition: condition.into(), detail };
        if outcome_map.len() != self.testspace.len() || outcome_map.iter().any(|&y| y >= target.testspace.len()) {
            return Err(invalid("(i)", "outcome map has the wrong domain or range".into()));
        }
        for t in self.testspace.tests() {
            let image: Vec<usize> = t.iter().map(|&x| outcome_map[x]).collect();
            let distinct: BTreeSet<usize> = image.iter().copied().collect();
            if distinct.len() != image.len() || !target.testspace.is_test(&image) {
                return Err(invalid(
                    "(i)",
                    format!("test {:?} is not pushed forward to a test", self.labels_of(t)),
                ));
            }
        }
        for (k, beta) in target.orbit_states().iter().enumerate() {
            let pulled: Vec<F> = outcome_map.iter().map(|&y| beta[y].clone()).collect();
            if lp::convex_combination(&self.orbit, &pulled, tol).is_none() {
                return Err(invalid("(i)", format!("pull-back of target state {k} is not in Ω")));
            }
        }
        let gens = self.permutation_generators();
        if group_map.len() != gens.len() {
            return Err(invalid("(ii)", "one image per generator is required".into()));
        }
        let target_group: HashSet<&Permutation> = target.group_elements()?.iter().collect();
        for h in group_map {
            if !target_group.contains(h) {
                return Err(invalid("(ii)", format!("{h} is not in the target group")));
            }
        }
        check_homomorphism(gens, group_map, self.testspace.len(), target.testspace.len(), self.options.max_group)
            .map_err(|d| invalid("(ii)", d))?;
        for (g, h) in gens.iter().zip(group_map) {
            for x in 0..self.testspace.len() {
                if outcome_map[g.apply(x)] != h.apply(outcome_map[x]) {
                    return Err(invalid(
                        "(iii)",
                        format!(
                            "φ({g}·{}) ≠ ψ({g})·φ({})",
                            self.testspace.label(x),
                            self.testspace.label(x)
                        ),
                    ));
                }
            }
        }
        let basis = &self.hull.outcome_basis;
        let from = Matrix::from_columns(
            &basis.iter().map(|&x| self.hull.outcome_vectors[x].clone()).collect::<Vec<_>>(),
        );
        let to = Matrix::from_columns(
            &basis.iter().map(|&x| target.hull.outcome_vectors[outcome_map[x]].clone()).collect::<Vec<_>>(),
        );
        let lifted = to.mul(&from.inverse(tol).ok_or_else(|| Error::Precondition("singular basis".into()))?);
        for (x, v) in self.hull.outcome_vectors.iter().enumerate() {
            if !vec_approx_eq(&lifted.mul_vec(v), &target.hull.outcome_vectors[outcome_map[x]], tol * 10.0) {
                return Err(invalid("(i)", "outcome map does not extend linearly to the hull".into()));
            }
        }
        if !vec_approx_eq(&lifted.mul_vec(&self.hull.unit), &target.hull.unit, tol * 10.0) {
            return Err(invalid("(i)", "lifted map does not preserve the unit".into()));
        }
        Ok(Morphism { outcome_map: outcome_map.to_vec(), group_map: group_map.to_vec(), lifted })
    }

    pub fn test_labels(&self, t: usize) -> Vec<String> {
        self.labels_of(&self.testspace.tests()[t])
    }

    fn labels_of(&self, t: &[usize]) -> Vec<String> {
        t.iter().map(|&x| self.testspace.label(x).to_string()).collect()
    }

    /// A probability weight as a JSON object keyed by outcome label.
    pub fn weight_json(&self, w: &[F]) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .testspace
            .labels()
            .iter()
            .zip(w)
            .map(|(l, v)| (l.clone(), v.to_json()))
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "name": self.name,
            "kind": self.kind.tag(),
            "dim": self.dim(),
            "rank": self.rank(),
            "unit": vec_to_json(&self.hull.unit),
        })
    }
}

pub(crate) fn effective_tol<F: Scalar>(options: &ModelOptions) -> f64 {
    if F::EXACT {
        default_tolerance::<F>()
    } else {
        options.tolerance
    }
}

/// Applies a permutation to a probability weight: `(gα)(gx) = α(x)`.
pub fn act_on_weight<F: Scalar>(g: &Permutation, w: &[F]) -> Vec<F> {
    let mut out = w.to_vec();
    for (x, v) in w.iter().enumerate() {
        out[g.apply(x)] = v.clone();
    }
    out
}

fn state_orbits<F: Scalar>(
    states: &[Vec<F>],
    generators: &[Permutation],
    tol: f64,
    limit: usize,
) -> Result<(Vec<Vec<F>>, Vec<usize>)> {
    let mut orbit: Vec<Vec<F>> = Vec::new();
    let mut label: Vec<usize> = Vec::new();
    let mut keys: HashSet<Vec<String>> = HashSet::new();
    let find = |orbit: &[Vec<F>], s: &[F]| orbit.iter().any(|o| vec_approx_eq(o, s, tol));
    let key = |s: &[F]| -> Option<Vec<String>> { s.iter().map(Scalar::exact_key).collect() };
    for (k, s) in states.iter().enumerate() {
        let seen = match key(s) {
            Some(kk) => keys.contains(&kk),
            None => find(&orbit, s),
        };
        if seen {
            continue;
        }
        let start = orbit.len();
        if let Some(kk) = key(s) {
            keys.insert(kk);
        }
        orbit.push(s.clone());
        label.push(k);
        let mut i = start;
        while i < orbit.len() {
            for g in generators {
                let t = act_on_weight(g, &orbit[i]);
                let fresh = match key(&t) {
                    Some(kk) => keys.insert(kk),
                    None => !find(&orbit, &t),
                };
                if fresh {
                    orbit.push(t);
                    label.push(k);
                    if orbit.len() > limit {
                        return Err(Error::GroupTooLarge { limit });
                    }
                }
            }
            i += 1;
        }
    }
    Ok((orbit, label))
}

/// Checks that generator images extend to a homomorphism by walking the closure.
fn check_homomorphism(
    gens: &[Permutation],
    images: &[Permutation],
    degree: usize,
    target_degree: usize,
    limit: usize,
) -> std::result::Result<(), String> {
    let mut map: HashMap<Permutation, Permutation> = HashMap::new();
    let id = Permutation::identity(degree);
    map.insert(id.clone(), Permutation::identity(target_degree));
    let mut queue = vec![id];
    while let Some(g) = queue.pop() {
        let image = map[&g].clone();
        for (s, t) in gens.iter().zip(images) {
            let h = s.compose(&g);
            let hi = t.compose(&image);
            match map.get(&h) {
                Some(existing) if *existing != hi => {
                    return Err(format!("generator images are inconsistent at {h}"));
                }
                Some(_) => {}
                None => {
                    if map.len() >= limit {
                        return Err("group too large to verify".into());
                    }
                    map.insert(h.clone(), hi);
                    queue.push(h);
                }
            }
        }
    }
    Ok(())
}
