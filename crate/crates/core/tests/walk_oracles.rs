use lattice_median::acceptance::{free_group_expected_lengths, integer_walk_expected_ratio};
use lattice_median::corpus::Corpus;
use lattice_median::walks::{
    discretized_walk, estimate_drift, kac_check, translation_length, FreeGroupWalk, FreeWordPower,
    HomogeneousSpace, IntegerWalk, LineShift, WalkConfig,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `E|S_n|` from the binomial law of the number of up-steps.
fn binomial_mean_abs(n: usize) -> f64 {
    let mut p = vec![1.0f64];
    for _ in 0..n {
        let mut next = vec![0.0; p.len() + 1];
        for (k, &q) in p.iter().enumerate() {
            next[k] += q / 2.0;
            next[k + 1] += q / 2.0;
        }
        p = next;
    }
    p.iter().enumerate().map(|(k, q)| q * (2.0 * k as f64 - n as f64).abs()).sum()
}

/// `E|w_n|` by enumerating every sequence of `n` letters in rank 2.
fn enumerated_free_lengths(n: usize) -> f64 {
    let mut total = 0usize;
    for code in 0..4usize.pow(n as u32) {
        let mut word: Vec<usize> = Vec::new();
        for i in 0..n {
            let l = code / 4usize.pow(i as u32) % 4;
            if word.last() == Some(&(l ^ 1)) {
                word.pop();
            } else {
                word.push(l);
            }
        }
        total += word.len();
    }
    total as f64 / 4f64.powi(n as i32)
}

fn prism() -> HomogeneousSpace {
    let corpus = Corpus::builtin();
    corpus.kac.iter().find(|k| k.name == "z6_prism").unwrap().build().unwrap()
}

#[test]
fn integer_ratio_matches_binomial_law() {
    for n in [1, 2, 3, 10, 101, 500, 1000] {
        let exact = binomial_mean_abs(n) / n as f64;
        assert!((integer_walk_expected_ratio(n) - exact).abs() < 1e-9, "n = {n}");
    }
}

#[test]
fn free_group_chain_matches_enumeration() {
    let chain = free_group_expected_lengths(2, 9);
    for n in 1..=9 {
        assert!((chain[n - 1] - enumerated_free_lengths(n)).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn free_group_drift_is_one_half() {
    let est = estimate_drift(&FreeGroupWalk { rank: 2 }, 4000, 100, 3).unwrap();
    assert!((est.slope - 0.5).abs() < 0.02, "{}", est.slope);
    let rank3 = estimate_drift(&FreeGroupWalk { rank: 3 }, 4000, 100, 3).unwrap();
    assert!((rank3.slope - 2.0 / 3.0).abs() < 0.02, "{}", rank3.slope);
}

#[test]
fn integer_drift_vanishes() {
    let est = estimate_drift(&IntegerWalk, 10_000, 200, 5).unwrap();
    assert!(est.slope < 0.05, "{}", est.slope);
}

#[test]
fn drift_is_seed_deterministic() {
    let a = estimate_drift(&FreeGroupWalk { rank: 2 }, 300, 20, 9).unwrap();
    let b = estimate_drift(&FreeGroupWalk { rank: 2 }, 300, 20, 9).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
}

#[test]
fn kac_on_prism_matches_degree_mass() {
    let hs = prism();
    // Stationary mass of the orbit class is its share of the total degree.
    let total: usize = (0..hs.graph.vertex_count()).map(|v| hs.graph.degree(v)).sum();
    let orbit: usize = hs.lattice.iter().map(|&g| hs.graph.degree(hs.action.act(g, hs.basepoint))).sum();
    let expected = total as f64 / orbit as f64;
    let cfg = WalkConfig { basepoint: hs.basepoint, steps: 100_000, trials: 1, seed: 0 };
    let r = kac_check(&hs, &cfg).unwrap();
    assert!((r.predicted - expected).abs() < 1e-9, "{} vs {expected}", r.predicted);
    assert!(r.relative_error < 0.05, "{r:?}");
}

/// Increments `γ_{k-1}^{-1} γ_k` between consecutive returns, starting at
/// the first return.
fn increments(hs: &HomogeneousSpace, trial: u64) -> Vec<usize> {
    let cfg = WalkConfig { basepoint: hs.basepoint, steps: 4000, trials: 1, seed: 21 };
    let w = discretized_walk(hs, &cfg, trial, None, false).unwrap();
    w.lattice_steps
        .windows(2)
        .map(|p| hs.group.mul(hs.group.inv(p[0]), p[1]))
        .collect()
}

#[test]
fn discretized_increments_are_homogeneous() {
    let hs = prism();
    let index = |g: usize| hs.lattice.iter().position(|&l| l == g).unwrap();
    let k = hs.lattice.len();
    let mut table = vec![vec![0.0f64; k]; 2];
    for trial in 0..200 {
        let inc = increments(&hs, trial);
        let half = inc.len() / 2;
        for (i, &g) in inc.iter().enumerate() {
            table[usize::from(i >= half)][index(g)] += 1.0;
        }
    }
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..k).map(|j| table[0][j] + table[1][j]).collect();
    let total: f64 = rows.iter().sum();
    let mut stat = 0.0;
    for i in 0..2 {
        for j in 0..k {
            let expected = rows[i] * cols[j] / total;
            if expected > 0.0 {
                stat += (table[i][j] - expected).powi(2) / expected;
            }
        }
    }
    let dof = (k - 1) as f64;
    let p = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
    assert!(p > 0.01, "chi-square {stat} on {dof} dof, p = {p}");
}

#[test]
fn strict_returns_are_a_subset() {
    let hs = prism();
    let cfg = WalkConfig { basepoint: hs.basepoint, steps: 2000, trials: 1, seed: 4 };
    let all = discretized_walk(&hs, &cfg, 0, None, false).unwrap();
    let strict = discretized_walk(&hs, &cfg, 0, None, true).unwrap();
    assert!(strict.stopping_times.iter().all(|t| all.stopping_times.contains(t)));
    assert!(strict.lattice_steps.iter().all(|&g| g == hs.group.identity()));
}

#[test]
fn translation_lengths() {
    let line = translation_length(&LineShift { shift: -4, half_width: 1000 }, 100, 1e-3).unwrap();
    assert!((line.estimate - 4.0).abs() < 1e-9 && line.loxodromic);
    let identity = translation_length(&LineShift { shift: 0, half_width: 10 }, 100, 1e-3).unwrap();
    assert!(!identity.loxodromic);
    // a b a^-1 is conjugate to b: length 1 once reduced cyclically.
    let conj = translation_length(&FreeWordPower { word: vec![0, 2, 1], depth_cap: 500 }, 100, 1e-3).unwrap();
    assert!((conj.estimate - 1.0).abs() < 0.05, "{}", conj.estimate);
    let commutator = translation_length(&FreeWordPower { word: vec![0, 2, 1, 3], depth_cap: 500 }, 100, 1e-3).unwrap();
    assert!((commutator.estimate - 4.0).abs() < 1e-9);
}
