use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{FiniteMedianAlgebra, IntervalTable};
use crate::error::{invalid, Error, Result};

/// A wall: a partition of the algebra into two nonempty convex halfspaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Halfspace {
    pub minus: Vec<usize>,
    pub plus: Vec<usize>,
}

impl Halfspace {
    /// Checks partition, nonemptiness and convexity of both sides.
    pub fn is_valid_wall(&self, alg: &FiniteMedianAlgebra) -> Result<bool> {
        if self.minus.is_empty() || self.plus.is_empty() {
            return Ok(false);
        }
        let mut seen = FixedBitSet::with_capacity(alg.len());
        for &x in self.minus.iter().chain(&self.plus) {
            alg.check_element(x)?;
            if seen.put(x) {
                return Ok(false);
            }
        }
        if seen.count_ones(..) != alg.len() {
            return Ok(false);
        }
        Ok(alg.is_convex(&self.minus)?.is_none() && alg.is_convex(&self.plus)?.is_none())
    }

    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.minus.contains(&x) && self.plus.contains(&y)
    }
}

/// A wall with `x` in the minus side and `y` in the plus side.
///
/// Grows a convex set from `{x}`: each candidate, in index order, is absorbed
/// together with the convex hull it generates unless that hull reaches `y`.
/// The result is a maximal convex set avoiding `y`, whose complement must
/// then be convex; that is checked before returning.
pub fn find_wall(alg: &FiniteMedianAlgebra, x: usize, y: usize) -> Result<Halfspace> {
    alg.check_element(x)?;
    alg.check_element(y)?;
    if x == y {
        return Err(invalid("a wall separates two distinct points"));
    }
    let intervals = IntervalTable::new(alg);
    find_wall_with(alg, &intervals, x, y)
}

pub(crate) fn find_wall_with(
    alg: &FiniteMedianAlgebra,
    intervals: &IntervalTable,
    x: usize,
    y: usize,
) -> Result<Halfspace> {
    let n = alg.len();
    let mut side = FixedBitSet::with_capacity(n);
    side.insert(x);
    loop {
        let mut grown = false;
        for z in 0..n {
            if side.contains(z) || z == y {
                continue;
            }
            let mut seed = side.clone();
            seed.insert(z);
            let hull = alg.convex_hull(&seed, intervals);
            if !hull.contains(y) {
                side = hull;
                grown = true;
            }
        }
        if !grown {
            break;
        }
    }
    let minus: Vec<usize> = side.ones().collect();
    let plus: Vec<usize> = (0..n).filter(|&i| !side.contains(i)).collect();
    if alg.is_convex(&plus)?.is_some() {
        return Err(Error::InternalContradiction(format!(
            "complement of a maximal convex set avoiding {y} is not convex; the median table is broken"
        )));
    }
    Ok(Halfspace { minus, plus })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> FiniteMedianAlgebra {
        FiniteMedianAlgebra::from_fn((0..n).map(|i| i.to_string()).collect(), |a, b, c| {
            let mut v = [a, b, c];
            v.sort_unstable();
            v[1]
        })
        .unwrap()
    }

    #[test]
    fn cube_wall_splits_first_coordinate() {
        let cube = FiniteMedianAlgebra::boolean_power(3).unwrap();
        let x = cube.index_of("000").unwrap();
        let y = cube.index_of("100").unwrap();
        let w = find_wall(&cube, x, y).unwrap();
        assert_eq!(w.minus.len(), 4);
        assert_eq!(w.plus.len(), 4);
        assert!(w.minus.iter().all(|&i| cube.label(i).starts_with('0')));
        assert!(w.is_valid_wall(&cube).unwrap());
    }

    #[test]
    fn path_wall_between_end_and_middle() {
        let p = path(3);
        let w = find_wall(&p, 0, 1).unwrap();
        assert_eq!(w.minus, vec![0]);
        assert_eq!(w.plus, vec![1, 2]);
    }

    #[test]
    fn equal_points_are_rejected() {
        let p = path(3);
        assert!(matches!(find_wall(&p, 1, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn broken_table_never_yields_a_bogus_wall() {
        // Symmetric and absorbing, but distinct triples go to the largest
        // point, which breaks (M3).
        let alg = FiniteMedianAlgebra::from_fn((0..4).map(|i| i.to_string()).collect(), |a, b, c| {
            if a == b || a == c {
                a
            } else if b == c {
                b
            } else {
                a.max(b).max(c)
            }
        })
        .unwrap();
        assert!(crate::median::verify_median_axioms(&alg).m3.is_some());
        for x in 0..4 {
            for y in 0..4 {
                if x == y {
                    continue;
                }
                match find_wall(&alg, x, y) {
                    Ok(w) => assert!(w.is_valid_wall(&alg).unwrap() && w.separates(x, y)),
                    Err(e) => assert!(matches!(e, Error::InternalContradiction(_))),
                }
            }
        }
    }

    #[test]
    fn every_pair_of_a_path_and_cube_is_separated() {
        for alg in [path(5), FiniteMedianAlgebra::boolean_power(3).unwrap()] {
            for x in 0..alg.len() {
                for y in 0..alg.len() {
                    if x != y {
                        let w = find_wall(&alg, x, y).unwrap();
                        assert!(w.separates(x, y));
                        assert!(w.is_valid_wall(&alg).unwrap());
                    }
                }
            }
        }
    }
}
