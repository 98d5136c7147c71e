use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::FiniteMedianAlgebra;
use crate::error::{invalid, Result};

/// On-disk form: `{"elements": [...], "mu": [[i, j, k, m], ...]}` listing
/// `mu(i, j, k) = m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub elements: Vec<String>,
    pub mu: Vec<[usize; 4]>,
}

impl From<&FiniteMedianAlgebra> for AlgebraFile {
    fn from(alg: &FiniteMedianAlgebra) -> Self {
        let n = alg.len();
        let mut mu = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    mu.push([a, b, c, alg.median(a, b, c)]);
                }
            }
        }
        Self {
            elements: alg.labels().to_vec(),
            mu,
        }
    }
}

impl AlgebraFile {
    /// Expands the listed entries into a full table. Cells that are not
    /// listed are filled from a listed permutation of the same triple; a
    /// missing triple, or listed permutations that disagree, is an error.
    pub fn into_algebra(self) -> Result<FiniteMedianAlgebra> {
        let n = self.elements.len();
        let mut given: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for [a, b, c, m] in self.mu {
            if a >= n || b >= n || c >= n || m >= n {
                return Err(invalid(format!("entry [{a},{b},{c},{m}] is out of range")));
            }
            if let Some(&prev) = given.get(&(a, b, c)) {
                if prev != m {
                    return Err(invalid(format!("mu({a},{b},{c}) is listed as both {prev} and {m}")));
                }
            }
            given.insert((a, b, c), m);
        }
        let mut table = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if let Some(&m) = given.get(&(a, b, c)) {
                        table.push(m);
                        continue;
                    }
                    let perms = [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)];
                    let mut value = None;
                    for p in perms {
                        if let Some(&m) = given.get(&p) {
                            if value.is_some_and(|v| v != m) {
                                return Err(invalid(format!(
                                    "permutations of ({a},{b},{c}) disagree; cannot complete the table"
                                )));
                            }
                            value = Some(m);
                        }
                    }
                    match value {
                        Some(m) => table.push(m),
                        None => return Err(invalid(format!("mu({a},{b},{c}) is missing"))),
                    }
                }
            }
        }
        FiniteMedianAlgebra::from_table(self.elements, table)
    }
}

impl FiniteMedianAlgebra {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&AlgebraFile::from(self)).expect("algebra serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<AlgebraFile>(text)?.into_algebra()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let cube = FiniteMedianAlgebra::boolean_power(2).unwrap();
        let text = cube.to_json();
        let back = FiniteMedianAlgebra::from_json(&text).unwrap();
        assert_eq!(back, cube);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn symmetric_entries_are_expanded() {
        // Two-point algebra given by sorted triples only.
        let file = AlgebraFile {
            elements: vec!["x".into(), "y".into()],
            mu: vec![[0, 0, 0, 0], [0, 0, 1, 0], [0, 1, 1, 1], [1, 1, 1, 1]],
        };
        let alg = file.into_algebra().unwrap();
        assert_eq!(alg.median(1, 0, 0), 0);
        assert_eq!(alg.median(1, 0, 1), 1);
    }

    #[test]
    fn missing_and_conflicting_entries_fail() {
        let missing = AlgebraFile {
            elements: vec!["x".into(), "y".into()],
            mu: vec![[0, 0, 0, 0], [0, 0, 1, 0]],
        };
        assert!(missing.into_algebra().is_err());
        let conflict = AlgebraFile {
            elements: vec!["x".into()],
            mu: vec![[0, 0, 0, 0], [0, 0, 0, 1]],
        };
        assert!(conflict.into_algebra().is_err());
        assert!(FiniteMedianAlgebra::from_json("{\"elements\": 3}").is_err());
    }
}
