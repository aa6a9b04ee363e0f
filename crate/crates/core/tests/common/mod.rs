//! Generators, oracles and fixture helpers shared by the integration tests
//! and the acceptance runner.
#![allow(dead_code)]

pub mod defer_model;
pub mod export_model;
pub mod laws;
pub mod units;

use std::path::{Path, PathBuf};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// `(display name, source)` for fixture paths relative to the fixture dir.
pub fn fixtures(paths: &[&str]) -> Vec<(String, String)> {
    paths
        .iter()
        .map(|p| {
            let full = fixture_dir().join(p);
            let src = std::fs::read_to_string(&full).unwrap_or_else(|e| panic!("{}: {e}", full.display()));
            (p.to_string(), src)
        })
        .collect()
}

/// Every `.ml1` file under `dir` (relative to the fixture dir), sorted.
pub fn fixture_glob(dir: &str) -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(fixture_dir().join(dir))
        .unwrap()
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            name.ends_with(".ml1").then(|| format!("{dir}/{name}"))
        })
        .collect();
    out.sort();
    out
}

pub fn salat_before() -> Vec<(String, String)> {
    let mut paths = fixture_glob("salat/common");
    paths.extend(fixture_glob("salat/before"));
    fixtures(&paths.iter().map(String::as_str).collect::<Vec<_>>())
}

pub fn salat_after() -> Vec<(String, String)> {
    let mut paths = fixture_glob("salat/common");
    paths.extend(fixture_glob("salat/after"));
    fixtures(&paths.iter().map(String::as_str).collect::<Vec<_>>())
}

/// Draws `n` values from `strategy` with a fixed seed. Used where every case
/// must be checked and counted instead of stopping at the first failure.
pub fn sample<S: Strategy>(strategy: &S, n: usize, seed: u8) -> Vec<S::Value> {
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]);
    let mut runner = TestRunner::new_with_rng(Config::default(), rng);
    (0..n).map(|_| strategy.new_tree(&mut runner).expect("strategy generates").current()).collect()
}

/// Runs the `ml1` CLI in-process; returns (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["ml1"];
    argv.extend_from_slice(args);
    let code = ml1::cli::run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Fixture paths as CLI arguments.
pub fn paths(rel: &[&str]) -> Vec<String> {
    rel.iter().map(|p| fixture_dir().join(p).display().to_string()).collect()
}
