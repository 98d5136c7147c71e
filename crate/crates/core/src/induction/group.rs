use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A finite group given by its multiplication table on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    n: usize,
    mul: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Checks closure, associativity, identity and inverses.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(invalid("a group needs at least one element"));
        }
        let mut mul = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!("row {i} of the multiplication table has the wrong length")));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return Err(invalid(format!("product {x} is out of range")));
            }
            mul.extend_from_slice(row);
        }
        let at = |a: usize, b: usize| mul[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| invalid("multiplication table has no identity"))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(invalid(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inverse = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or_else(|| invalid(format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }
        Ok(Self {
            n,
            mul,
            identity,
            inverse,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(rows).expect("cyclic group table is valid")
    }

    /// The group generated by permutations of `0..degree`, together with the
    /// permutation realizing each element. Elements are sorted
    /// lexicographically, so the identity is element 0. Composition is
    /// `(ab)(i) = a(b(i))`.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<(Self, Vec<Vec<usize>>)> {
        let degree = gens.first().map_or(0, Vec::len);
        for g in gens {
            check_permutation(g, degree)?;
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut seen: BTreeMap<Vec<usize>, ()> = BTreeMap::from([(identity, ())]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let next = compose(&elements[i], g);
                if seen.insert(next.clone(), ()).is_none() {
                    elements.push(next);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let elements: Vec<Vec<usize>> = seen.into_keys().collect();
        let index: BTreeMap<&Vec<usize>, usize> =
            elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let rows = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        Ok((Self::from_table(rows)?, elements))
    }

    /// Direct product; element `(a, b)` has index `a * other.order() + b`.
    pub fn product(&self, other: &Self) -> Self {
        let m = other.order();
        let n = self.order() * m;
        let rows = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        Self::from_table(rows).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn check_element(&self, g: usize) -> Result<()> {
        if g < self.n {
            Ok(())
        } else {
            Err(Error::UnknownElement(g))
        }
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Checks that `subset` is a subgroup and returns its membership mask.
    pub fn subgroup_mask(&self, subset: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &g in subset {
            self.check_element(g)?;
            mask[g] = true;
        }
        if !mask[self.identity] {
            return Err(Error::NotSubgroup("identity is missing".into()));
        }
        for &a in subset {
            if !mask[self.inv(a)] {
                return Err(Error::NotSubgroup(format!("inverse of {a} is missing")));
            }
            for &b in subset {
                if !mask[self.mul(a, b)] {
                    return Err(Error::NotSubgroup(format!("product of {a} and {b} is missing")));
                }
            }
        }
        Ok(mask)
    }

    /// Word lengths with respect to `gens` (closed under inverses here).
    /// `target` is the set the generators must reach.
    pub fn word_metric(&self, gens: &[usize], target: &[usize]) -> Result<WordMetric> {
        for &s in gens {
            self.check_element(s)?;
        }
        let mut len = vec![u32::MAX; self.n];
        len[self.identity] = 0;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                for step in [s, self.inv(s)] {
                    let h = self.mul(g, step);
                    if len[h] == u32::MAX {
                        len[h] = len[g] + 1;
                        queue.push_back(h);
                    }
                }
            }
        }
        if let Some(&g) = target.iter().find(|&&g| len[g] == u32::MAX) {
            return Err(invalid(format!("generators {gens:?} do not reach element {g}")));
        }
        Ok(WordMetric { len })
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.n).map(<[usize]>::to_vec).collect()
    }
}

pub(crate) fn check_permutation(p: &[usize], degree: usize) -> Result<()> {
    if p.len() != degree {
        return Err(invalid(format!("permutation has length {}, expected {degree}", p.len())));
    }
    let mut seen = vec![false; degree];
    for &x in p {
        if x >= degree || std::mem::replace(&mut seen[x], true) {
            return Err(invalid(format!("{p:?} is not a permutation")));
        }
    }
    Ok(())
}

/// `a ∘ b`: apply `b`, then `a`.
pub(crate) fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// Left-invariant word metric `d(g, h) = |g^{-1} h|`.
#[derive(Debug, Clone)]
pub struct WordMetric {
    len: Vec<u32>,
}

impl WordMetric {
    /// Word length of `g`; `None` outside the generated subgroup.
    pub fn length(&self, g: usize) -> Option<u32> {
        (self.len[g] != u32::MAX).then_some(self.len[g])
    }

    pub fn dist(&self, group: &FiniteGroup, g: usize, h: usize) -> Option<u32> {
        self.length(group.mul(group.inv(g), h))
    }
}

/// On-disk form of a group with a lattice and generating sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    pub lattice: Vec<usize>,
    pub gens_lattice: Vec<usize>,
    pub gens_group: Vec<usize>,
}

impl GroupFile {
    pub fn group(&self) -> Result<FiniteGroup> {
        if self.order != self.mul.len() {
            return Err(invalid(format!(
                "declared order {} but the table has {} rows",
                self.order,
                self.mul.len()
            )));
        }
        FiniteGroup::from_table(self.mul.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_basics() {
        let z6 = FiniteGroup::cyclic(6);
        assert_eq!(z6.identity(), 0);
        assert_eq!(z6.inv(5), 1);
        assert_eq!(z6.element_order(2), 3);
        assert_eq!(z6.pow(5, 4), 2);
        assert!(z6.subgroup_mask(&[0, 2, 4]).is_ok());
        assert!(matches!(z6.subgroup_mask(&[0, 2]), Err(Error::NotSubgroup(_))));
        assert!(matches!(z6.subgroup_mask(&[2, 4]), Err(Error::NotSubgroup(_))));
    }

    #[test]
    fn symmetric_group_from_transpositions() {
        let (s3, perms) = FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.identity(), 0);
        assert_eq!(perms[0], vec![0, 1, 2]);
        // Non-abelian.
        assert_ne!(s3.mul(1, 2), s3.mul(2, 1));
    }

    #[test]
    fn word_metric_on_cyclic_group() {
        let z6 = FiniteGroup::cyclic(6);
        let wm = z6.word_metric(&[1], &(0..6).collect::<Vec<_>>()).unwrap();
        assert_eq!(wm.length(3), Some(3));
        assert_eq!(wm.length(5), Some(1));
        assert_eq!(wm.dist(&z6, 2, 5), Some(3));
        assert!(z6.word_metric(&[2], &[1]).is_err());
    }

    #[test]
    fn rejects_non_groups() {
        assert!(FiniteGroup::from_table(vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 2]]).is_err());
        // Associativity failure in a loop of order 5 with an identity.
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table(rows).is_err());
    }

    #[test]
    fn direct_product() {
        let g = FiniteGroup::cyclic(2).product(&FiniteGroup::cyclic(3));
        assert_eq!(g.order(), 6);
        assert_eq!(g.element_order(1 * 3 + 1), 6);
    }
}
