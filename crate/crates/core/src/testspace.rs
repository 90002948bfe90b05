//! Outcome sets, tests and probability weights.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Scalar;

/// A finite test space: labelled outcomes covered by tests.
///
/// Tests are stored as sorted index lists and kept in sorted order, so two
/// test spaces over the same labels compare equal iff they have the same tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestSpace {
    labels: Vec<String>,
    tests: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl TestSpace {
    pub fn new(labels: Vec<String>, tests: Vec<Vec<usize>>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidTestSpace(format!("duplicate outcome label `{l}`")));
            }
        }
        let mut canonical: BTreeSet<Vec<usize>> = BTreeSet::new();
        for t in tests {
            if t.is_empty() {
                return Err(Error::InvalidTestSpace("empty test".into()));
            }
            let mut t = t;
            t.sort_unstable();
            t.dedup();
            if let Some(&bad) = t.iter().find(|&&i| i >= labels.len()) {
                return Err(Error::InvalidTestSpace(format!("outcome index {bad} out of range")));
            }
            canonical.insert(t);
        }
        let mut covered = vec![false; labels.len()];
        for t in &canonical {
            for &i in t {
                covered[i] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidTestSpace(format!("outcome `{}` lies in no test", labels[i])));
        }
        Ok(Self { labels, tests: canonical.into_iter().collect(), index })
    }

    /// Builds a test space from label lists.
    pub fn from_labels<S: AsRef<str>>(tests: &[Vec<S>]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut idx: HashMap<String, usize> = HashMap::new();
        let mut index_tests = Vec::new();
        for t in tests {
            let mut it = Vec::new();
            for l in t {
                let l = l.as_ref().to_string();
                let next = labels.len();
                let i = *idx.entry(l.clone()).or_insert_with(|| {
                    labels.push(l);
                    next
                });
                it.push(i);
            }
            index_tests.push(it);
        }
        Self::new(labels, index_tests)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn tests(&self) -> &[Vec<usize>] {
        &self.tests
    }

    pub fn outcome(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    /// Largest test size.
    pub fn rank(&self) -> usize {
        self.tests.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_uniform_rank(&self) -> bool {
        let n = self.rank();
        self.tests.iter().all(|t| t.len() == n)
    }

    pub fn is_test(&self, set: &[usize]) -> bool {
        let mut s = set.to_vec();
        s.sort_unstable();
        self.tests.binary_search(&s).is_ok()
    }

    /// `x ⊥ y`: distinct and jointly contained in some test.
    pub fn distinguishable(&self, x: usize, y: usize) -> bool {
        x != y && self.tests.iter().any(|t| t.contains(&x) && t.contains(&y))
    }

    pub fn distinguishable_by_label(&self, x: &str, y: &str) -> Result<bool> {
        Ok(self.distinguishable(self.outcome(x)?, self.outcome(y)?))
    }

    /// Ordered distinguishable pairs.
    pub fn perp_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = BTreeSet::new();
        for t in &self.tests {
            for &x in t {
                for &y in t {
                    if x != y {
                        out.insert((x, y));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Values in `[0, 1]` summing to one on every test.
    pub fn is_probability_weight<F: Scalar>(&self, w: &[F], tol: f64) -> Result<bool> {
        if w.len() < self.len() {
            return Err(Error::MissingValue(self.labels[w.len()].clone()));
        }
        let in_range = w.iter().all(|v| !v.is_negative(tol) && !(v.clone() - F::one()).is_positive(tol));
        Ok(in_range
            && self.tests.iter().all(|t| {
                let s = t.iter().fold(F::zero(), |acc, &i| acc + w[i].clone());
                s.approx_eq(&F::one(), tol)
            }))
    }

    /// Reads a weight given by label.
    pub fn weight_from_labels<F: Scalar>(&self, values: &[(&str, F)]) -> Result<Vec<F>> {
        let mut w: Vec<Option<F>> = vec![None; self.len()];
        for (l, v) in values {
            w[self.outcome(l)?] = Some(v.clone());
        }
        w.into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MissingValue(self.labels[i].clone())))
            .collect()
    }

    /// Image of every test under `g` is a test.
    pub fn is_symmetry(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.len() {
            return Err(Error::NotBijection(format!(
                "permutation of degree {} on {} outcomes",
                g.degree(),
                self.len()
            )));
        }
        Permutation::new(g.0.clone())?;
        Ok(self.tests.iter().all(|t| {
            let image: Vec<usize> = t.iter().map(|&i| g.apply(i)).collect();
            self.is_test(&image)
        }))
    }

    /// Index of the test equal to the image of test `t` under `g`.
    pub fn image_test(&self, g: &Permutation, t: usize) -> Option<usize> {
        let mut image: Vec<usize> = self.tests[t].iter().map(|&i| g.apply(i)).collect();
        image.sort_unstable();
        self.tests.binary_search(&image).ok()
    }
}
