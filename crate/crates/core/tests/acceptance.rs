//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! to stderr; the test fails if any criterion fails.
//!
//! Run with `cargo test -p toydj --test acceptance`.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use toydj::baselines::{deterministic_budget, deterministic_classical, randomized_classical, wilson_interval, Sampling, Z_99};
use toydj::bench::{linear_fit, run_bench_with, BenchOptions, BenchSubject};
use toydj::dj::{run_dj_with_phases, Stage};
use toydj::oracle::{classical_query_index, enumerate_promise_functions};
use toydj::quantum::{oracle_gate_matrix, oracle_unitary_equivalence, run_quantum_dj};
use toydj::transforms::{apply_basis_perm, apply_cnot, apply_h, apply_x, apply_z, toffoli};
use toydj::{
    build_oracle, run_dj, trace_dj, BasisPermutation, DjConfig, EpistemicPair, Family, FunctionSpec, PackedBits,
    RandomSource, ToyRegister, Verdict,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn table_of(f: &FunctionSpec) -> Vec<bool> {
    f.to_table().unwrap().to_vec()
}

/// Constant iff every entry agrees; computed from the table alone.
fn truth(f: &FunctionSpec) -> Verdict {
    let t = table_of(f);
    if t.iter().all(|&v| v == t[0]) {
        Verdict::Constant
    } else {
        Verdict::Balanced
    }
}

fn promise_tables(n: usize) -> Vec<FunctionSpec> {
    enumerate_promise_functions(n).unwrap()
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn criterion_1() -> Outcome {
    let mut runs = 0;
    for (n, expected) in [(1, 4), (2, 8), (3, 72)] {
        let fs = promise_tables(n);
        ensure!(fs.len() == expected, "n = {n}: {} promise functions, expected {expected}", fs.len());
        for f in &fs {
            let oracle = build_oracle(f).unwrap();
            for phases in 0..1u64 << (n + 1) {
                let bits = PackedBits::from_u64(phases, n + 1);
                let r = run_dj_with_phases(&oracle, &bits, DjConfig::default()).unwrap();
                ensure!(r.verdict == truth(f), "n = {n}, f = {}, phases {bits}: wrong verdict", f.to_table().unwrap());
                ensure!(r.queries_used == 1, "queries_used = {}", r.queries_used);
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} runs over 84 functions, all correct with 1 query"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for f in promise_tables(n) {
            let p = run_quantum_dj(&f).unwrap();
            let t = table_of(&f);
            let signed: i64 = t.iter().map(|&v| if v { -1 } else { 1 }).sum();
            let closed = (signed as f64 / (1u64 << n) as f64).powi(2);
            let expected = if truth(&f) == Verdict::Constant { 1.0 } else { 0.0 };
            ensure!((closed - expected).abs() < 1e-12, "closed form disagrees with class");
            worst = worst.max((p - expected).abs());
            ensure!((p - expected).abs() < 1e-9, "n = {n}: probability {p}, expected {expected}");
        }
    }
    let mut rng = RandomSource::new(2024);
    for _ in 0..500 {
        let f = FunctionSpec::random_balanced(8, &mut rng).unwrap();
        let p = run_quantum_dj(&f).unwrap();
        let quantum = if p > 0.5 { Verdict::Constant } else { Verdict::Balanced };
        let toy = run_dj(&build_oracle(&f).unwrap(), &mut rng).unwrap().verdict;
        ensure!(quantum == toy, "n = 8: quantum {quantum}, toy {toy}");
    }
    Ok(format!("max deviation {worst:.1e} on 84 functions; 500/500 verdicts agree at n = 8"))
}

/// `U_f` built here from the table: column `j = x + 2^n y` maps to
/// `x + 2^n (y xor f(x))`.
fn check_unitary(f: &FunctionSpec) -> Result<(), String> {
    let n = f.n();
    let t = 1usize << n;
    let table = table_of(f);
    let m = oracle_gate_matrix(&build_oracle(f).unwrap()).unwrap();
    ensure!(m.shape() == [2 * t, 2 * t], "shape {:?}", m.shape());
    for col in 0..2 * t {
        let image = if table[col % t] { col ^ t } else { col };
        for row in 0..2 * t {
            let want = if row == image { 1.0 } else { 0.0 };
            ensure!(m[[row, col]] == want, "n = {n}: entry ({row}, {col}) = {}", m[[row, col]]);
        }
    }
    ensure!(oracle_unitary_equivalence(f).unwrap(), "library equivalence check disagrees");
    Ok(())
}

fn criterion_3() -> Outcome {
    let mut count = 0;
    for n in 1..=3 {
        for f in promise_tables(n) {
            check_unitary(&f)?;
            count += 1;
        }
    }
    let mut rng = RandomSource::new(77);
    for n in [5, 6] {
        for _ in 0..50 {
            check_unitary(&FunctionSpec::random_balanced(n, &mut rng).unwrap())?;
            count += 1;
        }
    }
    Ok(format!("{count} oracle matrices equal U_f entrywise"))
}

fn criterion_4() -> Outcome {
    let mut rng = RandomSource::new(4);
    let mut queries = 0;
    for n in 1..=4 {
        for f in promise_tables(n) {
            let oracle = build_oracle(&f).unwrap();
            let t = table_of(&f);
            for x in 0..1u64 << n {
                let got = classical_query_index(&oracle, x, &mut rng).unwrap();
                ensure!(got == t[x as usize], "n = {n}, x = {x}: query {got}, table {}", t[x as usize]);
                queries += 1;
            }
        }
    }
    let families = [
        Family::Constant0,
        Family::Constant1,
        Family::MostSignificantBit,
        Family::BitK(17),
        Family::Parity,
        Family::MaskedParity(vec![0, 5, 31, 63]),
    ];
    for fam in families {
        let f = FunctionSpec::family(64, fam.clone()).unwrap();
        let oracle = build_oracle(&f).unwrap();
        for _ in 0..1000 {
            let x = rng.next_u64();
            let expected = match &fam {
                Family::Constant0 => false,
                Family::Constant1 => true,
                Family::MostSignificantBit => x >> 63 == 1,
                Family::BitK(k) => (x >> k) & 1 == 1,
                Family::Parity => x.count_ones() % 2 == 1,
                Family::MaskedParity(m) => m.iter().filter(|&&i| (x >> i) & 1 == 1).count() % 2 == 1,
            };
            let got = classical_query_index(&oracle, x, &mut rng).unwrap();
            ensure!(got == expected, "{fam} at x = {x:#x}: query {got}, expected {expected}");
            queries += 1;
        }
    }
    Ok(format!("{queries} queries match f(x)"))
}

fn criterion_5() -> Outcome {
    for n in 1..=4 {
        let mut worst = 0;
        for f in promise_tables(n) {
            let r = deterministic_classical(&f).unwrap();
            ensure!(!r.error_flag && r.verdict == truth(&f), "deterministic decider wrong at n = {n}");
            ensure!(r.queries_used <= (1 << (n - 1)) + 1, "n = {n}: {} queries", r.queries_used);
            worst = worst.max(r.queries_used);
        }
        ensure!(worst == deterministic_budget(n), "n = {n}: worst case {worst}");
    }
    let prefix = FunctionSpec::from_table_str("00001111").unwrap();
    let r = deterministic_classical(&prefix).unwrap();
    ensure!(r.verdict == Verdict::Balanced && r.queries_used == 5, "prefix-constant used {} queries", r.queries_used);

    // Balanced f at n = 4, cycling through 64 random tables.
    const TRIALS: u64 = 100_000;
    let n = 4u64;
    let size = 1u64 << n;
    let mut rng = RandomSource::new(5);
    let mut fs = Vec::new();
    for _ in 0..64 {
        fs.push(FunctionSpec::random_balanced(n as usize, &mut rng).unwrap());
    }
    let mut detail = Vec::new();
    for k in [2usize, 5, 10] {
        let bound = 2f64.powi(1 - k as i32);
        let exact = 2.0 * binomial(size / 2, k as u64) / binomial(size, k as u64);
        let mut errors = 0;
        for i in 0..TRIALS {
            let r = randomized_classical(&fs[i as usize % fs.len()], k, Sampling::default(), &mut rng).unwrap();
            errors += u64::from(r.error_flag);
        }
        let (lo, hi) = wilson_interval(errors, TRIALS, Z_99);
        ensure!(hi < bound, "k = {k}: {errors}/{TRIALS} errors, upper 99% bound {hi:.5} not below {bound:.5}");
        ensure!(lo <= exact && exact <= hi, "k = {k}: exact error {exact:.5} outside [{lo:.5}, {hi:.5}]");
        detail.push(format!("k={k} err={:.5} (<{bound:.5})", errors as f64 / TRIALS as f64));
    }
    Ok(format!("deterministic worst case 2^(n-1)+1 for n <= 4; {}", detail.join(", ")))
}

fn registers(len: usize) -> impl Iterator<Item = ToyRegister> {
    (0..4usize.pow(len as u32)).map(move |code| {
        let labels: Vec<u8> = (0..len).map(|i| (code / 4usize.pow(i as u32) % 4) as u8 + 1).collect();
        ToyRegister::from_labels(&labels).unwrap()
    })
}

fn twice(reg: &ToyRegister, g: impl Fn(&mut ToyRegister)) -> ToyRegister {
    let mut r = reg.clone();
    g(&mut r);
    g(&mut r);
    r
}

fn criterion_6() -> Outcome {
    let mut checks = 0;
    for reg in registers(1) {
        ensure!(twice(&reg, |r| apply_x(r, 0).unwrap()) == reg, "X^2 != I");
        ensure!(twice(&reg, |r| apply_z(r, 0).unwrap()) == reg, "Z^2 != I");
        ensure!(twice(&reg, |r| apply_h(r, 0).unwrap()) == reg, "H^2 != I");
        let (mut hxh, mut z) = (reg.clone(), reg.clone());
        apply_h(&mut hxh, 0).unwrap();
        apply_x(&mut hxh, 0).unwrap();
        apply_h(&mut hxh, 0).unwrap();
        apply_z(&mut z, 0).unwrap();
        ensure!(hxh == z, "HXH != Z on {:?}", reg.labels());
        let (mut hzh, mut x) = (reg.clone(), reg.clone());
        apply_h(&mut hzh, 0).unwrap();
        apply_z(&mut hzh, 0).unwrap();
        apply_h(&mut hzh, 0).unwrap();
        apply_x(&mut x, 0).unwrap();
        ensure!(hzh == x, "HZH != X on {:?}", reg.labels());
        checks += 5;
    }
    for reg in registers(2) {
        for (c, t) in [(0, 1), (1, 0)] {
            ensure!(twice(&reg, |r| apply_cnot(r, c, t).unwrap()) == reg, "CNOT^2 != I on {:?}", reg.labels());
            checks += 1;
        }
    }
    for reg in registers(3) {
        ensure!(twice(&reg, |r| toffoli(r, 0, 1, 2).unwrap()) == reg, "Toffoli^2 != I on {:?}", reg.labels());
        checks += 1;
    }
    // every permutation of {0..2^m} for m <= 3
    for m in 1..=3usize {
        let size = 1usize << m;
        let mut perm: Vec<u64> = (0..size as u64).collect();
        let mut perms = 0;
        loop {
            let pi = BasisPermutation::from_table(perm.clone()).unwrap();
            let inv = pi.inverse();
            let indices: Vec<usize> = (0..m).collect();
            for reg in registers(m) {
                let mut r = reg.clone();
                apply_basis_perm(&mut r, &pi, &indices).unwrap();
                apply_basis_perm(&mut r, &inv, &indices).unwrap();
                ensure!(r == reg, "pi^-1 pi != I for {perm:?} on {:?}", reg.labels());
                let mut r = reg.clone();
                apply_basis_perm(&mut r, &inv, &indices).unwrap();
                apply_basis_perm(&mut r, &pi, &indices).unwrap();
                ensure!(r == reg, "pi pi^-1 != I for {perm:?} on {:?}", reg.labels());
                checks += 2;
            }
            perms += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        let factorial: usize = (1..=size).product();
        ensure!(perms == factorial, "m = {m}: {perms} permutations enumerated");
    }
    Ok(format!("{checks} exhaustive identities hold"))
}

fn next_permutation(v: &mut [u64]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn criterion_7() -> Outcome {
    let ns = [10_000usize, 100_000, 1_000_000];
    let opts = BenchOptions { repetitions: 5, parallel: false };
    let recs = run_bench_with(&BenchSubject::Family(Family::Parity), &ns, 7, opts).unwrap();
    for r in &recs {
        ensure!(r.verdict == Verdict::Balanced && r.queries == 1, "n = {}: {} with {} queries", r.n, r.verdict, r.queries);
        let reg = ToyRegister::new(r.n);
        ensure!(reg.payload_bits() == 2 * (r.n + 1), "n = {}: payload {} bits", r.n, reg.payload_bits());
        ensure!(r.state_bytes == 16 * (r.n + 1).div_ceil(64), "n = {}: {} bytes", r.n, r.state_bytes);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = recs.iter().map(|r| r.wall_seconds).collect();
    let fit = linear_fit(&xs, &ys).unwrap();
    ensure!(fit.r_squared >= 0.9, "R^2 = {:.4} for times {ys:?}", fit.r_squared);
    Ok(format!(
        "payload 2(n+1) bits; times {:.2e}/{:.2e}/{:.2e} s, R^2 = {:.4}",
        ys[0], ys[1], ys[2], fit.r_squared
    ))
}

fn criterion_8() -> Outcome {
    use EpistemicPair::*;
    let n = 3;
    let expected = [
        (Stage::Prepared, [Z0, Z0, Z0, Z1]),
        (Stage::FirstHadamard, [X0, X0, X0, X1]),
        (Stage::Oracle, [X0, X0, X1, X1]),
        (Stage::FinalHadamard, [Z0, Z0, Z1, X1]),
    ];
    let balanced: Vec<FunctionSpec> = promise_tables(n).into_iter().filter(|f| truth(f) == Verdict::Balanced).collect();
    ensure!(balanced.len() == 70, "{} balanced functions", balanced.len());
    for f in &balanced {
        let trace = trace_dj(&build_oracle(f).unwrap(), &PackedBits::zeros(n + 1)).unwrap();
        ensure!(trace.len() == 4, "{} snapshots", trace.len());
        for (snap, (stage, pairs)) in trace.iter().zip(expected) {
            ensure!(snap.stage == stage, "stage {:?}, expected {stage:?}", snap.stage);
            for (i, pair) in pairs.iter().enumerate() {
                let label = snap.register.label(i).unwrap();
                ensure!(
                    pair.contains(label),
                    "f = {}, {stage:?}: system {i} in {label}, expected {pair}",
                    f.to_table().unwrap()
                );
            }
        }
    }
    Ok(format!("{} balanced oracles follow the stage pairs", balanced.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("one-query exact solution", criterion_1),
        ("quantum reference equivalence", criterion_2),
        ("oracle unitary equivalence", criterion_3),
        ("classical query fidelity", criterion_4),
        ("classical baseline bounds", criterion_5),
        ("gate algebra", criterion_6),
        ("linear scaling", criterion_7),
        ("trace conformance", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| {
                let msg = e.downcast_ref::<String>().cloned();
                Err(msg.or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
            });
        let line = match outcome {
            Ok(detail) => format!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {}: FAIL {name}: {why}", i + 1)
            }
        };
        // straight to the handle so the line shows even when output is captured
        let _ = writeln!(std::io::stderr(), "{line}");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
