use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A sorted, duplicate-free set of column indices.
///
/// All set algebra is merge-based so that the column order of every
/// submatrix built from an `IndexSet` is ascending and reproducible.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// Builds a set from arbitrary indices, sorting and removing duplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexSet(indices)
    }

    /// `{0, 1, ..., n-1}`
    pub fn range(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, usize>> {
        self.0.iter().copied()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IndexSet(out)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        IndexSet(out)
    }

    /// `self ∖ other`
    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() {
            if j >= b.len() {
                out.extend_from_slice(&a[i..]);
                break;
            }
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        IndexSet(out)
    }

    /// Complement with respect to `{0, ..., universe-1}`.
    pub fn complement(&self, universe: usize) -> IndexSet {
        IndexSet::range(universe).difference(self)
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl From<Vec<usize>> for IndexSet {
    fn from(v: Vec<usize>) -> Self {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a IndexSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_sorts_and_dedups() {
        let s = IndexSet::new(vec![5, 1, 3, 1, 5]);
        assert_eq!(s.as_slice(), &[1, 3, 5]);
    }

    #[test]
    fn algebra_small() {
        let a = IndexSet::new(vec![0, 2, 4, 6]);
        let b = IndexSet::new(vec![1, 2, 3, 4]);
        assert_eq!(a.union(&b).as_slice(), &[0, 1, 2, 3, 4, 6]);
        assert_eq!(a.intersection(&b).as_slice(), &[2, 4]);
        assert_eq!(a.difference(&b).as_slice(), &[0, 6]);
        assert_eq!(a.complement(8).as_slice(), &[1, 3, 5, 7]);
    }

    proptest! {
        #[test]
        fn merge_algebra_matches_naive(a in proptest::collection::vec(0usize..40, 0..20),
                                       b in proptest::collection::vec(0usize..40, 0..20)) {
            let sa = IndexSet::new(a.clone());
            let sb = IndexSet::new(b.clone());
            let naive_union: IndexSet = a.iter().chain(b.iter()).copied().collect();
            let naive_inter: IndexSet = a.iter().copied().filter(|i| b.contains(i)).collect();
            let naive_diff: IndexSet = a.iter().copied().filter(|i| !b.contains(i)).collect();
            prop_assert_eq!(sa.union(&sb), naive_union);
            prop_assert_eq!(sa.intersection(&sb), naive_inter);
            prop_assert_eq!(sa.difference(&sb), naive_diff);
        }
    }
}
