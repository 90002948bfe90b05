//! Permutations of `0..n`, group closure, orbits and block systems.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A permutation stored as its image list: `p.0[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(pub Vec<usize>);

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Validates that `images` is a bijection of `0..images.len()`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotBijection(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Self(images))
    }

    /// Builds a permutation of `0..n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a >= n || b >= n {
                    return Err(Error::NotBijection(format!("cycle entry out of range in {cycle:?}")));
                }
                images[a] = b;
            }
        }
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Self(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.0[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.0[cur];
            }
            out.push(cycle);
        }
        out
    }
}

/// All elements generated by `generators`, identity first, in BFS order.
pub fn closure(generators: &[Permutation], degree: usize, limit: usize) -> Result<Vec<Permutation>> {
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut order = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = s.compose(&g);
            if seen.insert(h.clone()) {
                if seen.len() > limit {
                    return Err(Error::GroupTooLarge { limit });
                }
                order.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(order)
}

/// Orbits of the group generated by `generators` on `0..degree`.
pub fn orbits(generators: &[Permutation], degree: usize) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; degree];
    let mut out = Vec::new();
    for start in 0..degree {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut orbit = vec![start];
        label[start] = id;
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for g in generators {
                let y = g.apply(x);
                if label[y] == usize::MAX {
                    label[y] = id;
                    orbit.push(y);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

pub fn is_transitive(generators: &[Permutation], degree: usize) -> bool {
    degree <= 1 || orbits(generators, degree).len() == 1
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Finest block system in which `a` and `b` share a block.
pub fn minimal_block_system(generators: &[Permutation], degree: usize, a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(degree);
    let mut queue = VecDeque::new();
    if uf.union(a, b) {
        queue.push_back((a, b));
    }
    while let Some((x, y)) = queue.pop_front() {
        for g in generators {
            let (gx, gy) = (g.apply(x), g.apply(y));
            if uf.union(gx, gy) {
                queue.push_back((gx, gy));
            }
        }
    }
    let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
    for x in 0..degree {
        let r = uf.find(x);
        blocks.entry(r).or_default().push(x);
    }
    let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
    out.sort();
    out
}

/// `None` if the transitive action is primitive, otherwise a nontrivial
/// block system certifying imprimitivity.
pub fn nontrivial_block_system(generators: &[Permutation], degree: usize) -> Option<Vec<Vec<usize>>> {
    (1..degree)
        .map(|b| minimal_block_system(generators, degree, 0, b))
        .find(|blocks| blocks.len() > 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_square_has_eight_elements() {
        let r = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let s = Permutation::from_cycles(4, &[&[1, 3]]).unwrap();
        let g = closure(&[r, s], 4, 1000).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g[0].is_identity());
    }

    #[test]
    fn closure_limit_is_enforced() {
        let a = Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        let b = Permutation::from_cycles(5, &[&[0, 1]]).unwrap();
        assert!(matches!(closure(&[a, b], 5, 50), Err(Error::GroupTooLarge { limit: 50 })));
    }

    #[test]
    fn cyclic_four_is_imprimitive() {
        let c = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let blocks = nontrivial_block_system(&[c], 4).unwrap();
        assert_eq!(blocks, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn symmetric_group_is_primitive() {
        let a = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let b = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
        assert!(nontrivial_block_system(&[a, b], 4).is_none());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert_eq!(Permutation::new(vec![1, 2, 0]).unwrap().inverse().0, vec![2, 0, 1]);
    }
}
