//! Scaling harness: one protocol run per `n`, timed, with the register's
//! memory footprint reported from its representation.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::dj::run_dj;
use crate::error::{Error, Result};
use crate::oracle::{build_oracle, Family, FunctionSpec, Verdict, MAX_TABLE_N};
use crate::ontic::{RandomSource, ToyRegister};

/// What to benchmark at each `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BenchSubject {
    Family(Family),
    /// A fresh random balanced truth table per `n`; limited to small `n`.
    RandomBalancedTable,
}

impl BenchSubject {
    pub fn name(&self) -> String {
        match self {
            BenchSubject::Family(f) => f.name().to_string(),
            BenchSubject::RandomBalancedTable => "table".to_string(),
        }
    }

    fn function(&self, n: usize, rng: &mut RandomSource) -> Result<FunctionSpec> {
        match self {
            BenchSubject::Family(f) => FunctionSpec::family(n, f.clone()),
            BenchSubject::RandomBalancedTable => {
                if n > MAX_TABLE_N {
                    return Err(Error::TooLarge { n, max: MAX_TABLE_N, what: "explicit truth tables" });
                }
                FunctionSpec::random_balanced(n, rng)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub family: String,
    /// Median over the repetitions.
    pub wall_seconds: f64,
    pub state_bytes: usize,
    pub queries: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    pub repetitions: usize,
    /// Run different `n` concurrently. Timings are then less reliable.
    pub parallel: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { repetitions: 5, parallel: false }
    }
}

/// Bytes held by a register with `n` inputs: two bit planes of
/// `ceil((n + 1) / 64)` words each.
pub fn declared_state_bytes(n: usize) -> usize {
    2 * 8 * (n + 1).div_ceil(64)
}

pub fn run_bench(subject: &BenchSubject, n_list: &[usize], seed: u64) -> Result<Vec<BenchRecord>> {
    run_bench_with(subject, n_list, seed, BenchOptions::default())
}

pub fn run_bench_with(
    subject: &BenchSubject,
    n_list: &[usize],
    seed: u64,
    options: BenchOptions,
) -> Result<Vec<BenchRecord>> {
    if options.repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be positive".into()));
    }
    if n_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("n list must be ascending".into()));
    }
    // one stream per n, independent of scheduling
    let mut root = RandomSource::new(seed);
    let jobs: Vec<(usize, RandomSource)> = n_list.iter().map(|&n| (n, root.fork())).collect();
    let run = |(n, rng): (usize, RandomSource)| bench_one(subject, n, rng, options.repetitions);
    if options.parallel {
        jobs.into_par_iter().map(run).collect()
    } else {
        jobs.into_iter().map(run).collect()
    }
}

fn bench_one(subject: &BenchSubject, n: usize, mut rng: RandomSource, reps: usize) -> Result<BenchRecord> {
    let f = subject.function(n, &mut rng)?;
    let oracle = build_oracle(&f)?;
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let mut run_rng = rng.fork();
        let start = Instant::now();
        let result = run_dj(&oracle, &mut run_rng)?;
        times.push(start.elapsed().as_secs_f64());
        if let Some((verdict, _)) = last {
            if verdict != result.verdict {
                return Err(Error::InvalidArgument(format!("verdict changed between repetitions at n = {n}")));
            }
        }
        last = Some((result.verdict, result.queries_used));
    }
    times.sort_by(f64::total_cmp);
    let (verdict, queries) = last.expect("at least one repetition");
    Ok(BenchRecord {
        n,
        family: subject.name(),
        wall_seconds: times[times.len() / 2],
        state_bytes: ToyRegister::new(n).state_bytes(),
        queries,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("linear fit needs two or more paired points".into()));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("x values are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit { slope, intercept, r_squared })
}

/// Six significant digits, printf `%g` style.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        let e: i32 = exponent.parse().expect("integer exponent");
        format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    }
}

pub const CSV_HEADER: [&str; 6] = ["n", "family", "wall_seconds", "state_bytes", "queries", "verdict"];

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv write failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.family.clone(),
            format_sig6(r.wall_seconds),
            r.state_bytes.to_string(),
            r.queries.to_string(),
            r.verdict.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv flush failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_records() {
        let recs = run_bench(&BenchSubject::Family(Family::Parity), &[10, 100, 1000], 0).unwrap();
        assert_eq!(recs.len(), 3);
        for r in &recs {
            assert_eq!(r.verdict, Verdict::Balanced);
            assert_eq!(r.queries, 1);
            assert_eq!(r.state_bytes, declared_state_bytes(r.n));
            assert_eq!(r.family, "parity");
        }
    }

    #[test]
    fn constant_state_grows_linearly() {
        let ns = [100, 1000, 10_000];
        let recs = run_bench(&BenchSubject::Family(Family::Constant0), &ns, 1).unwrap();
        for r in &recs {
            assert_eq!(r.verdict, Verdict::Constant);
            assert!(r.state_bytes <= (2 * (r.n + 1)).div_ceil(8) + crate::ontic::STATE_OVERHEAD_BYTES);
        }
        let fit = linear_fit(
            &ns.map(|n| n as f64),
            &recs.iter().map(|r| r.state_bytes as f64).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(fit.r_squared > 0.999);
    }

    #[test]
    fn table_subject_size_guard() {
        let err = run_bench(&BenchSubject::RandomBalancedTable, &[4, 25], 0).unwrap_err();
        assert!(matches!(err, Error::TooLarge { n: 25, .. }));
        let recs = run_bench(&BenchSubject::RandomBalancedTable, &[3, 6], 0).unwrap();
        assert!(recs.iter().all(|r| r.verdict == Verdict::Balanced));
    }

    #[test]
    fn unsorted_list_rejected() {
        assert!(run_bench(&BenchSubject::Family(Family::Parity), &[10, 5], 0).is_err());
    }

    #[test]
    fn parallel_mode_matches_sequential_outcomes() {
        let subject = BenchSubject::Family(Family::BitK(2));
        let opts = BenchOptions { repetitions: 2, parallel: true };
        let par = run_bench_with(&subject, &[8, 16, 32], 5, opts).unwrap();
        let seq = run_bench_with(&subject, &[8, 16, 32], 5, BenchOptions { parallel: false, ..opts }).unwrap();
        for (a, b) in par.iter().zip(&seq) {
            assert_eq!((a.n, a.verdict, a.state_bytes), (b.n, b.verdict, b.state_bytes));
        }
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.000123456789), "0.000123457");
        assert_eq!(format_sig6(1.5), "1.5");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1234567.0), "1.23457e+06");
        assert_eq!(format_sig6(0.0000012345678), "1.23457e-06");
        assert_eq!(format_sig6(0.0), "0");
    }

    #[test]
    fn linear_fit_exact_line() {
        let fit = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn csv_layout() {
        let recs = vec![BenchRecord {
            n: 10,
            family: "parity".into(),
            wall_seconds: 0.0000123456789,
            state_bytes: 16,
            queries: 1,
            verdict: Verdict::Balanced,
        }];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,family,wall_seconds,state_bytes,queries,verdict\n10,parity,1.23457e-05,16,1,Balanced\n"
        );
    }
}
