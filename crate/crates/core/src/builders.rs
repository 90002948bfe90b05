//! Constructors for the standard example models and the coset construction.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hermitian;
use crate::matrix::Matrix;
use crate::model::{GroupHandle, LinearHull, Model, ModelKind, ModelOptions};
use crate::perm::{self, Permutation};
use crate::scalar::Scalar;
use crate::testspace::TestSpace;

/// Number of random tests added to the standard one in analytic batteries.
const BATTERY_TESTS: usize = 4;
/// Number of random group elements sampled for analytic batteries.
const BATTERY_GROUP: usize = 4;
/// Largest group accepted by the coset construction.
pub const MAX_COSET_GROUP: usize = 10_000;

fn symmetric_group_generators(n: usize) -> Vec<Permutation> {
    match n {
        0 | 1 => vec![],
        2 => vec![Permutation(vec![1, 0])],
        _ => vec![
            Permutation((0..n).map(|i| (i + 1) % n).collect()),
            Permutation::from_cycles(n, &[&[0, 1]]).expect("valid transposition"),
        ],
    }
}

fn point_masses<F: Scalar>(n: usize) -> Vec<Vec<F>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect()).collect()
}

fn classical_testspace(n: usize) -> TestSpace {
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    TestSpace::new(labels, vec![(0..n).collect()]).expect("single test is valid")
}

/// One test of size `n`, the full simplex of states, and `Sₙ`.
pub fn classical<F: Scalar>(n: usize) -> Model<F> {
    classical_with_group(n, symmetric_group_generators(n)).expect("classical model is valid")
}

/// Classical model with the full simplex and a caller-chosen group.
pub fn classical_with_group<F: Scalar>(n: usize, generators: Vec<Permutation>) -> Result<Model<F>> {
    if n == 0 {
        return Err(Error::Precondition("a classical model needs n ≥ 1".into()));
    }
    Model::finite(&format!("classical({n})"), classical_testspace(n), point_masses(n), generators, ModelOptions::default())
}

/// Two outcomes, states the segment between (3/5, 2/5) and (2/5, 3/5), group `S₂`.
pub fn example5<F: Scalar>() -> Model<F> {
    let ts = TestSpace::from_labels(&[vec!["x", "y"]]).expect("valid");
    let p1 = vec![F::ratio(3, 5), F::ratio(2, 5)];
    Model::finite("example5", ts, vec![p1], symmetric_group_generators(2), ModelOptions::default())
        .expect("segment model is valid")
}

/// Two disjoint two-outcome tests, the unit square of states, and the dihedral group of order 8.
pub fn square_bit<F: Scalar>() -> Model<F> {
    let ts = TestSpace::from_labels(&[vec!["a", "a'"], vec!["b", "b'"]]).expect("valid");
    let corner = vec![F::one(), F::zero(), F::one(), F::zero()];
    let flip = Permutation::from_cycles(4, &[&[0, 1]]).expect("valid");
    let exchange = Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).expect("valid");
    Model::finite("square_bit", ts, vec![corner], vec![flip, exchange], ModelOptions::default())
        .expect("square bit is valid")
}

/// Complex quantum system of dimension `n`, described analytically with a
/// seeded battery of orthonormal bases and unitaries.
pub fn quantum(n: usize) -> Result<Model<f64>> {
    quantum_with(n, ModelOptions::default())
}

pub fn quantum_with(n: usize, options: ModelOptions) -> Result<Model<f64>> {
    if !(2..=4).contains(&n) {
        return Err(Error::Precondition(format!("quantum dimension must be in 2..=4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut labels = Vec::new();
    let mut tests = Vec::new();
    let mut projectors = Vec::new();
    for b in 0..=BATTERY_TESTS {
        let u = if b == 0 { hermitian::CMatrix::identity(n, n) } else { hermitian::haar_unitary(n, &mut rng) };
        let mut test = Vec::new();
        for i in 0..n {
            let psi = u.column(i).into_owned();
            test.push(labels.len());
            labels.push(if b == 0 { format!("e{i}") } else { format!("b{b}.{i}") });
            projectors.push(hermitian::projector(&psi));
        }
        tests.push(test);
    }
    let battery = TestSpace::new(labels, tests)?;
    let outcome_vectors: Vec<Vec<f64>> = projectors.iter().map(hermitian::to_coords).collect();
    let state_covectors: Vec<Vec<f64>> = projectors.iter().map(hermitian::state_covector).collect();
    let group_matrices = (0..BATTERY_GROUP)
        .map(|_| hermitian::conjugation_action(&hermitian::haar_unitary(n, &mut rng)))
        .collect();
    let hull = LinearHull {
        dim: hermitian::coord_dim(n),
        outcome_vectors,
        unit: hermitian::identity_coords(n),
        group_matrices,
        state_covectors,
        outcome_basis: Vec::new(),
    };
    Ok(Model::analytic(&format!("quantum({n})"), ModelKind::Quantum(n), battery, hull, GroupHandle::Unitary(n), options))
}

/// Spin factor `ℝ ⊕ ℝ^k`: outcomes `(1 ± û)/2`, states the unit ball, group `O(k)`.
pub fn spin_factor(k: usize) -> Result<Model<f64>> {
    spin_factor_with(k, ModelOptions::default())
}

pub fn spin_factor_with(k: usize, options: ModelOptions) -> Result<Model<f64>> {
    if !(2..=8).contains(&k) {
        return Err(Error::Precondition(format!("spin factor dimension must be in 2..=8, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut directions: Vec<Vec<f64>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..BATTERY_TESTS {
        directions.push(hermitian::random_unit_vector(k, &mut rng));
    }
    let mut labels = Vec::new();
    let mut tests = Vec::new();
    let mut outcome_vectors = Vec::new();
    let mut state_covectors = Vec::new();
    for (d, dir) in directions.iter().enumerate() {
        let mut test = Vec::new();
        for (sign, tag) in [(1.0, "+"), (-1.0, "-")] {
            test.push(labels.len());
            labels.push(format!("s{d}{tag}"));
            let mut x = vec![0.5];
            x.extend(dir.iter().map(|v| sign * v / 2.0));
            outcome_vectors.push(x);
            let mut c = vec![1.0];
            c.extend(dir.iter().map(|v| sign * v));
            state_covectors.push(c);
        }
        tests.push(test);
    }
    let group_matrices = (0..BATTERY_GROUP)
        .map(|_| {
            let o = hermitian::haar_orthogonal(k, &mut rng);
            Matrix::from_fn(k + 1, k + 1, |i, j| match (i, j) {
                (0, 0) => 1.0,
                (0, _) | (_, 0) => 0.0,
                _ => o[(i - 1, j - 1)],
            })
        })
        .collect();
    let mut unit = vec![0.0; k + 1];
    unit[0] = 1.0;
    let hull = LinearHull {
        dim: k + 1,
        outcome_vectors,
        unit,
        group_matrices,
        state_covectors,
        outcome_basis: Vec::new(),
    };
    Ok(Model::analytic(
        &format!("spin_factor({k})"),
        ModelKind::SpinFactor(k),
        TestSpace::new(labels, tests)?,
        hull,
        GroupHandle::Orthogonal(k),
        options,
    ))
}

/// Input to the coset construction `X = G/K`.
#[derive(Clone, Debug)]
pub struct CosetSpec<F> {
    /// Generators of `G`, as permutations of an auxiliary domain.
    pub group: Vec<Permutation>,
    /// Generators of `H ≤ G`; the standard test is the orbit `H·x₀`.
    pub subgroup_h: Vec<Permutation>,
    /// Generators of `K ≤ G`.
    pub subgroup_k: Vec<Permutation>,
    /// Base point `x₀` of the auxiliary domain.
    pub base_point: usize,
    /// Base state `δ₀`, indexed by coset in [`coset_order`] order.
    pub base_state: Vec<F>,
}

/// Cosets `gK` in order of first appearance while enumerating `G`
/// breadth-first, each as its lexicographically least element.
pub fn coset_order(group: &[Permutation], subgroup_k: &[Permutation], degree: usize) -> Result<Vec<Permutation>> {
    let g = perm::closure(group, degree, MAX_COSET_GROUP)?;
    let k = perm::closure(subgroup_k, degree, MAX_COSET_GROUP)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in &g {
        let rep = k.iter().map(|h| x.compose(h)).min().expect("K contains the identity");
        if seen.insert(rep.clone()) {
            out.push(rep);
        }
    }
    Ok(out)
}

pub fn build_coset<F: Scalar>(name: &str, spec: &CosetSpec<F>) -> Result<Model<F>> {
    let degree = spec
        .group
        .first()
        .map(Permutation::degree)
        .ok_or_else(|| Error::Precondition("G needs at least one generator".into()))?;
    let all = spec.group.iter().chain(&spec.subgroup_h).chain(&spec.subgroup_k);
    if all.clone().any(|p| p.degree() != degree) {
        return Err(Error::Precondition("all generators must act on the same domain".into()));
    }
    let g = perm::closure(&spec.group, degree, MAX_COSET_GROUP)?;
    let g_set: HashSet<&Permutation> = g.iter().collect();
    if spec.subgroup_h.iter().chain(&spec.subgroup_k).any(|p| !g_set.contains(p)) {
        return Err(Error::Precondition("H and K must be subgroups of G".into()));
    }
    let h = perm::closure(&spec.subgroup_h, degree, MAX_COSET_GROUP)?;
    let k = perm::closure(&spec.subgroup_k, degree, MAX_COSET_GROUP)?;
    let x0 = spec.base_point;
    if x0 >= degree {
        return Err(Error::Precondition("base point outside the domain".into()));
    }
    let stabilizer: BTreeSet<&Permutation> = h.iter().filter(|p| p.apply(x0) == x0).collect();
    let k_set: HashSet<&Permutation> = k.iter().collect();
    let intersection: BTreeSet<&Permutation> = h.iter().filter(|p| k_set.contains(p)).collect();
    if intersection != stabilizer {
        return Err(Error::Precondition("K ∩ H must equal the stabilizer of the base point in H".into()));
    }
    let standard: BTreeSet<usize> = h.iter().map(|p| p.apply(x0)).collect();
    let pairs: BTreeSet<(usize, usize)> = h.iter().map(|p| (p.apply(x0), p.apply(standard_partner(&standard, x0)))).collect();
    if standard.len() > 1 && pairs.len() != standard.len() * (standard.len() - 1) {
        return Err(Error::Precondition("H must act 2-transitively on the standard test".into()));
    }

    let rep_of = |x: &Permutation| k.iter().map(|q| x.compose(q)).min().expect("K nonempty");
    let cosets = coset_order(&spec.group, &spec.subgroup_k, degree)?;
    let index: BTreeMap<Permutation, usize> = cosets.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    if spec.base_state.len() != cosets.len() {
        return Err(Error::DimensionMismatch { expected: cosets.len(), found: spec.base_state.len() });
    }
    let mut embedded: BTreeMap<usize, usize> = BTreeMap::new();
    for p in &h {
        let coset = index[&rep_of(p)];
        if let Some(&prev) = embedded.get(&p.apply(x0)) {
            if prev != coset {
                return Err(Error::Precondition("embedding of the standard test is ill-defined".into()));
            }
        }
        embedded.insert(p.apply(x0), coset);
    }
    let standard_test: Vec<usize> = embedded.values().copied().collect();
    let induced: Vec<Permutation> = spec
        .group
        .iter()
        .map(|s| Permutation(cosets.iter().map(|c| index[&rep_of(&s.compose(c))]).collect()))
        .collect();
    let tests: BTreeSet<Vec<usize>> = perm::closure(&induced, cosets.len(), MAX_COSET_GROUP)?
        .iter()
        .map(|p| {
            let mut t: Vec<usize> = standard_test.iter().map(|&x| p.apply(x)).collect();
            t.sort_unstable();
            t
        })
        .collect();
    let labels: Vec<String> = cosets.iter().map(|c| format!("{c}K")).collect();
    let ts = TestSpace::new(labels, tests.into_iter().collect())?;
    Model::finite(name, ts, vec![spec.base_state.clone()], induced, ModelOptions::default())
}

fn standard_partner(standard: &BTreeSet<usize>, x0: usize) -> usize {
    standard.iter().copied().find(|&y| y != x0).unwrap_or(x0)
}

/// `Z₂ × Z₂` acting regularly on four cosets, tests `{K, hK}` and `{tK, htK}`,
/// and a base state whose orbit leaves `u^⊥` split into two lines.
pub fn reducible_fixture<F: Scalar>() -> Model<F> {
    let h = Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).expect("valid");
    let t = Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).expect("valid");
    let spec = CosetSpec {
        group: vec![h.clone(), t],
        subgroup_h: vec![h],
        subgroup_k: vec![],
        base_point: 0,
        base_state: vec![F::one(), F::zero(), F::ratio(1, 2), F::ratio(1, 2)],
    };
    build_coset("reducible", &spec).expect("reducible fixture is valid")
}

/// A single four-outcome test under the cyclic group `C₄`, whose action has
/// the block system `{0, 2}, {1, 3}`.
pub fn imprimitive_fixture<F: Scalar>() -> Model<F> {
    let c = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).expect("valid");
    Model::finite("imprimitive", classical_testspace(4), point_masses(4), vec![c], ModelOptions::default())
        .expect("imprimitive fixture is valid")
}

/// The square bit obtained from the coset construction over the dihedral group.
pub fn square_bit_from_cosets<F: Scalar>() -> Model<F> {
    let r = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).expect("valid");
    let s = Permutation::from_cycles(4, &[&[1, 3]]).expect("valid");
    let h = Permutation::from_cycles(4, &[&[0, 2]]).expect("valid");
    let cosets = coset_order(&[r.clone(), s.clone()], std::slice::from_ref(&s), 4).expect("small group");
    // Corner state: weight one on the cosets sending 0 to 0 or 1.
    let base_state: Vec<F> = cosets
        .iter()
        .map(|c| match c.apply(0) {
            0 | 1 => F::one(),
            _ => F::zero(),
        })
        .collect();
    let spec = CosetSpec { group: vec![r, s.clone()], subgroup_h: vec![h], subgroup_k: vec![s], base_point: 0, base_state };
    build_coset("square_bit_cosets", &spec).expect("dihedral coset model is valid")
}
