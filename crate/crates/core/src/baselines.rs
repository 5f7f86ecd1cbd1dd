//! Classical query algorithms for the constant/balanced promise problem.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::oracle::{classical_query_index, classify, FunctionSpec, Oracle, Verdict, MAX_TABLE_N};
use crate::ontic::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryBudgetReport {
    pub verdict: Verdict,
    pub queries_used: u64,
    /// Verdict disagrees with the known class of the function.
    pub error_flag: bool,
}

/// How the randomized decider draws its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// `k` distinct inputs. Error on balanced `f` is strictly below `2^(1-k)`.
    #[default]
    WithoutReplacement,
    /// `k` independent uniform inputs. Error on balanced `f` is exactly `2^(1-k)`.
    WithReplacement,
}

/// Worst-case query count of the deterministic decider: `2^(n-1) + 1`.
pub fn deterministic_budget(n: usize) -> u64 {
    (1u64 << (n - 1)) + 1
}

/// Scan `x = 0, 1, ...` until two outputs differ or `2^(n-1) + 1` agree.
pub fn deterministic_scan<Q>(n: usize, mut query: Q) -> Result<(Verdict, u64)>
where
    Q: FnMut(u64) -> Result<bool>,
{
    if n == 0 || n > MAX_TABLE_N {
        return Err(Error::TooLarge { n, max: MAX_TABLE_N, what: "deterministic enumeration" });
    }
    let first = query(0)?;
    let budget = deterministic_budget(n);
    for x in 1..budget {
        if query(x)? != first {
            return Ok((Verdict::Balanced, x + 1));
        }
    }
    Ok((Verdict::Constant, budget))
}

/// Query `k` inputs; balanced iff two outputs differ.
pub fn randomized_scan<Q>(n: usize, k: usize, sampling: Sampling, rng: &mut RandomSource, mut query: Q) -> Result<(Verdict, u64)>
where
    Q: FnMut(u64) -> Result<bool>,
{
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k = {k} must be at least 2")));
    }
    if n == 0 || n > 64 {
        return Err(Error::InvalidArgument(format!("n = {n} must be in 1..=64")));
    }
    // 0 stands for 2^64 in `below`
    let space = if n == 64 { 0 } else { 1u64 << n };
    let xs: Vec<u64> = match sampling {
        Sampling::WithReplacement => (0..k).map(|_| rng.below(space)).collect(),
        Sampling::WithoutReplacement => {
            if n < 64 && k as u64 > space {
                return Err(Error::InvalidArgument(format!("k = {k} exceeds the {space} distinct inputs")));
            }
            let mut seen = HashSet::with_capacity(k);
            let mut xs = Vec::with_capacity(k);
            while xs.len() < k {
                let x = rng.below(space);
                if seen.insert(x) {
                    xs.push(x);
                }
            }
            xs
        }
    };
    let first = query(xs[0])?;
    for &x in &xs[1..] {
        if query(x)? != first {
            return Ok((Verdict::Balanced, k as u64));
        }
    }
    Ok((Verdict::Constant, k as u64))
}

fn report(f: &FunctionSpec, (verdict, queries_used): (Verdict, u64)) -> Result<QueryBudgetReport> {
    let truth = classify(f)?.verdict();
    Ok(QueryBudgetReport { verdict, queries_used, error_flag: verdict != truth })
}

/// Deterministic decider reading the function directly.
pub fn deterministic_classical(f: &FunctionSpec) -> Result<QueryBudgetReport> {
    report(f, deterministic_scan(f.n(), |x| f.eval_index(x))?)
}

/// Deterministic decider querying through the toy-model oracle.
pub fn deterministic_classical_via_oracle(oracle: &Oracle, rng: &mut RandomSource) -> Result<QueryBudgetReport> {
    let scan = deterministic_scan(oracle.n(), |x| classical_query_index(oracle, x, rng))?;
    report(oracle.function(), scan)
}

pub fn randomized_classical(
    f: &FunctionSpec,
    k: usize,
    sampling: Sampling,
    rng: &mut RandomSource,
) -> Result<QueryBudgetReport> {
    report(f, randomized_scan(f.n(), k, sampling, rng, |x| f.eval_index(x))?)
}

/// Randomized decider querying through the toy-model oracle. Draws the same
/// inputs as [`randomized_classical`] for the same `rng` state.
pub fn randomized_classical_via_oracle(
    oracle: &Oracle,
    k: usize,
    sampling: Sampling,
    rng: &mut RandomSource,
) -> Result<QueryBudgetReport> {
    let mut prep = rng.clone().fork();
    let scan = randomized_scan(oracle.n(), k, sampling, rng, |x| classical_query_index(oracle, x, &mut prep))?;
    report(oracle.function(), scan)
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval needs at least one trial");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489004;
