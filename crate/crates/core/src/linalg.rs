//! Sparse exact linear algebra over `Q` with arbitrary ordered coordinates.

use std::collections::BTreeMap;
use std::ops::Bound;

use num_traits::{One, Zero};

use crate::rational::Q;

pub type SparseVec<K> = BTreeMap<K, Q>;

/// `y += c·x`, dropping cancelled entries.
pub fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, c: &Q, x: &SparseVec<K>) {
    if c.is_zero() {
        return;
    }
    for (k, v) in x {
        let entry = y.entry(k.clone()).or_insert_with(Q::zero);
        *entry += c * v;
        if entry.is_zero() {
            y.remove(k);
        }
    }
}

pub fn scale<K: Ord + Clone>(x: &SparseVec<K>, c: &Q) -> SparseVec<K> {
    if c.is_zero() {
        return SparseVec::new();
    }
    x.iter().map(|(k, v)| (k.clone(), v * c)).collect()
}

/// A row-echelon basis of a subspace, each row normalised to pivot 1 at its
/// smallest key. Optionally tracks each row as a combination of the inserted
/// vectors.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, (SparseVec<K>, SparseVec<usize>)>,
    inserted: usize,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Self { rows: BTreeMap::new(), inserted: 0 }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_tracked(&self, v: SparseVec<K>, mut combo: SparseVec<usize>) -> (SparseVec<K>, SparseVec<usize>) {
        let mut out = v;
        let mut pos: Option<K> = None;
        loop {
            let next = match &pos {
                None => out.keys().next().cloned(),
                Some(p) => out.range((Bound::Excluded(p.clone()), Bound::Unbounded)).next().map(|(k, _)| k.clone()),
            };
            let Some(k) = next else { break };
            if let Some((row, rc)) = self.rows.get(&k) {
                let c = -out[&k].clone();
                axpy(&mut out, &c, row);
                axpy(&mut combo, &c, rc);
            }
            pos = Some(k);
        }
        (out, combo)
    }

    /// The remainder of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec<K>) -> SparseVec<K> {
        self.reduce_tracked(v.clone(), SparseVec::new()).0
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns `true` if it was independent of the span.
    pub fn insert(&mut self, v: &SparseVec<K>) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let mut combo = SparseVec::new();
        combo.insert(id, Q::one());
        let (rem, combo) = self.reduce_tracked(v.clone(), combo);
        let Some((pivot, lead)) = rem.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lead.recip();
        self.rows.insert(pivot, (scale(&rem, &inv), scale(&combo, &inv)));
        true
    }

    /// Coefficients expressing `v` in the inserted vectors (by insertion
    /// index), if `v` lies in the span.
    pub fn solve(&self, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let (rem, combo) = self.reduce_tracked(v.clone(), SparseVec::new());
        if rem.is_empty() {
            Some(scale(&combo, &-Q::one()))
        } else {
            None
        }
    }
}

/// Coordinates of `v` in a linearly independent list, if it lies in the span.
pub fn coordinates<K: Ord + Clone>(basis: &[SparseVec<K>], v: &SparseVec<K>) -> Option<Vec<Q>> {
    let mut ech = Echelon::new();
    for b in basis {
        ech.insert(b);
    }
    let combo = ech.solve(v)?;
    Some((0..basis.len()).map(|i| combo.get(&i).cloned().unwrap_or_else(Q::zero)).collect())
}

/// Basis of `{x ∈ Qⁿ : row·x = 0 for every row}`.
pub fn nullspace(ncols: usize, rows: &[SparseVec<usize>]) -> Vec<Vec<Q>> {
    let mut ech: Echelon<usize> = Echelon::new();
    for r in rows {
        ech.insert(r);
    }
    // Full back-substitution on the pivot rows.
    let pivots: Vec<usize> = ech.rows.keys().copied().collect();
    let mut reduced: BTreeMap<usize, SparseVec<usize>> = BTreeMap::new();
    for &p in pivots.iter().rev() {
        let mut row = ech.rows[&p].0.clone();
        let later: Vec<(usize, Q)> = row.iter().filter(|(k, _)| **k != p && reduced.contains_key(k)).map(|(k, c)| (*k, c.clone())).collect();
        for (k, c) in later {
            axpy(&mut row, &-c, &reduced[&k]);
        }
        reduced.insert(p, row);
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !reduced.contains_key(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); ncols];
            x[f] = Q::one();
            for (&p, row) in &reduced {
                if let Some(c) = row.get(&f) {
                    x[p] = -c.clone();
                }
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn v(items: &[(usize, i64)]) -> SparseVec<usize> {
        items.iter().map(|&(k, c)| (k, int(c))).collect()
    }

    #[test]
    fn rank_and_membership() {
        let mut e = Echelon::new();
        assert!(e.insert(&v(&[(0, 1), (1, 2)])));
        assert!(e.insert(&v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(&v(&[(0, 1), (1, 3), (2, 1)])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&v(&[(0, 2), (1, 4)])));
        assert!(!e.contains(&v(&[(2, 1)])));
    }

    #[test]
    fn coordinates_in_basis() {
        let basis = vec![v(&[(0, 1), (1, 1)]), v(&[(1, 1), (2, 1)])];
        let c = coordinates(&basis, &v(&[(0, 2), (1, -1), (2, -3)])).unwrap();
        assert_eq!(c, vec![int(2), int(-3)]);
        assert!(coordinates(&basis, &v(&[(0, 1)])).is_none());
    }

    #[test]
    fn nullspace_matches_brute_force() {
        let rows = vec![v(&[(0, 1), (1, 1), (2, 1)]), v(&[(1, 1), (3, -1)])];
        let ns = nullspace(4, &rows);
        assert_eq!(ns.len(), 2);
        for x in &ns {
            for r in &rows {
                let dot: Q = r.iter().map(|(k, c)| c * &x[*k]).sum();
                assert!(dot.is_zero());
            }
        }
        assert_eq!(nullspace(3, &[]).len(), 3);
    }
}
