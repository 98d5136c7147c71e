//! One line per acceptance criterion; exits nonzero if any fails.
//!
//! Criteria 1-11 run in-process against the bundled corpus. Determinism is
//! checked end to end: the binary runs `--check-all` twice and the two
//! reports must match byte for byte.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use lattice_median::acceptance::{run_criterion, time_limit, CRITERIA};
use lattice_median::corpus::Corpus;

const SEED: u64 = 0;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn check_all_report(dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lattice-median"))
        .arg("--check-all")
        .arg("--corpus")
        .arg(dir)
        .args(["--seed", &SEED.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    match out.status.code() {
        Some(0) => Ok(out.stdout),
        code => Err(format!("check-all exited with {code:?}")),
    }
}

fn determinism(dir: &Path) -> (bool, String) {
    match (check_all_report(dir), check_all_report(dir)) {
        (Ok(a), Ok(b)) if a == b => (true, format!("two runs, {} identical bytes", a.len())),
        (Ok(a), Ok(b)) => (false, format!("reports differ ({} vs {} bytes)", a.len(), b.len())),
        (Err(e), _) | (_, Err(e)) => (false, e),
    }
}

fn main() {
    let dir = corpus_dir();
    let corpus = match Corpus::load(&dir) {
        Ok(c) => c,
        Err(e) => {
            println!("FAIL corpus: {e}");
            std::process::exit(1);
        }
    };
    let mut failed = 0;
    for &(id, name) in &CRITERIA {
        let start = Instant::now();
        let (mut passed, detail) = if id == 12 {
            determinism(&dir)
        } else {
            let r = run_criterion(id, &corpus, SEED);
            let bad: Vec<&String> = r.detail.iter().filter(|l| l.starts_with("FAIL")).collect();
            let detail = match bad.first() {
                Some(line) => line.to_string(),
                None => format!("{} checks", r.detail.len()),
            };
            (r.passed, detail)
        };
        let secs = start.elapsed().as_secs_f64();
        let mut timing = format!("{secs:.1}s");
        if let Some(limit) = time_limit(id) {
            if secs > limit as f64 {
                passed = false;
            }
            timing = format!("{timing} of {limit}s");
        }
        println!(
            "{} criterion {id:>2} {name}: {detail} [{timing}]",
            if passed { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!passed);
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
