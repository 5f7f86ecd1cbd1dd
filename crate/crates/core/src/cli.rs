//! `toydj` command line.
//!
//! Exit codes: 0 success, 1 usage, parse or validation failure, 2 promise
//! violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench_with, write_csv, BenchOptions, BenchSubject};
use crate::dj::{run_dj, run_dj_with, run_dj_with_phases, DjConfig};
use crate::error::Error;
use crate::oracle::{
    build_oracle, classical_query_index, classify, enumerate_promise_functions, parse_table_file, Family,
    FunctionSpec, Verdict,
};
use crate::ontic::RandomSource;
use crate::quantum::{oracle_unitary_equivalence, run_quantum_dj, MAX_QUANTUM_N, MAX_UNITARY_N};
use crate::bits::PackedBits;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PROMISE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "toydj", version, about = "Deutsch-Jozsa in the extended Spekkens toy model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the one-query protocol and print the verdict.
    Run {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Apply the final Hadamard to the target as well.
        #[arg(long)]
        h_target: bool,
    },
    /// Evaluate f(x) through the oracle.
    Query {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cross-check the toy-model protocol against the statevector reference.
    Validate {
        #[arg(long)]
        n: usize,
        /// Random balanced tables to test instead of exhaustive enumeration.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List every promise function with its verdict and determinism check.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Time single protocol runs over a list of sizes.
    Bench {
        #[arg(long, value_enum)]
        family: BenchFamily,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        mask: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyName {
    Const0,
    Const1,
    Msb,
    Bitk,
    Parity,
    MaskedParity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchFamily {
    Const0,
    Const1,
    Msb,
    Bitk,
    Parity,
    MaskedParity,
    Table,
}

#[derive(Debug, Args)]
struct FunctionArgs {
    #[arg(long, value_enum, conflicts_with = "table", required_unless_present = "table")]
    family: Option<FamilyName>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Decimal or 0x-prefixed hex.
    #[arg(long)]
    mask: Option<String>,
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::PromiseViolation { .. }) { EXIT_PROMISE } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn parse_mask(s: &str) -> Result<u64, Failure> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    match parsed {
        Ok(0) => Err(usage("--mask must be non-zero")),
        Ok(m) => Ok(m),
        Err(_) => Err(usage(format!("invalid --mask {s:?}"))),
    }
}

fn family_of(name: FamilyName, k: Option<usize>, mask: Option<&str>) -> Result<Family, Failure> {
    Ok(match name {
        FamilyName::Const0 => Family::Constant0,
        FamilyName::Const1 => Family::Constant1,
        FamilyName::Msb => Family::MostSignificantBit,
        FamilyName::Parity => Family::Parity,
        FamilyName::Bitk => Family::BitK(k.ok_or_else(|| usage("--family bitk requires --k"))?),
        FamilyName::MaskedParity => Family::masked_parity_from_u64(parse_mask(
            mask.ok_or_else(|| usage("--family masked-parity requires --mask"))?,
        )?),
    })
}

impl FunctionArgs {
    fn load(&self) -> Result<FunctionSpec, Failure> {
        if let Some(path) = &self.table {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let f = parse_table_file(&text)?;
            if let Some(n) = self.n {
                if n != f.n() {
                    return Err(usage(format!("--n {n} disagrees with table width {}", f.n())));
                }
            }
            return Ok(f);
        }
        let name = self.family.ok_or_else(|| usage("one of --family or --table is required"))?;
        let n = self.n.ok_or_else(|| usage("--family requires --n"))?;
        Ok(FunctionSpec::family(n, family_of(name, self.k, self.mask.as_deref())?)?)
    }
}

/// Parse `args` (including the program name) and execute. Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    usage(format!("write failed: {e}"))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Run { function, seed, h_target } => {
            let f = function.load()?;
            let oracle = build_oracle(&f)?;
            let config = DjConfig { final_h_on_target: h_target };
            let r = run_dj_with(&oracle, &mut RandomSource::new(seed), config)?;
            let plural = if r.queries_used == 1 { "query" } else { "queries" };
            writeln!(out, "{}, {} {plural}", r.verdict, r.queries_used).map_err(io)?;
            writeln!(out, "readout: {}", r.final_input_readout).map_err(io)?;
        }
        Command::Query { function, x, seed } => {
            let f = function.load()?;
            let oracle = build_oracle(&f)?;
            let bit = classical_query_index(&oracle, x, &mut RandomSource::new(seed))?;
            writeln!(out, "{}", u8::from(bit)).map_err(io)?;
        }
        Command::Validate { n, samples, seed } => validate(n, samples, seed, out)?,
        Command::Enumerate { n } => enumerate(n, out)?,
        Command::Bench { family, n_list, k, mask, seed, csv, reps, parallel } => {
            let subject = match family {
                BenchFamily::Table => BenchSubject::RandomBalancedTable,
                BenchFamily::Const0 => BenchSubject::Family(Family::Constant0),
                BenchFamily::Const1 => BenchSubject::Family(Family::Constant1),
                BenchFamily::Msb => BenchSubject::Family(Family::MostSignificantBit),
                BenchFamily::Parity => BenchSubject::Family(Family::Parity),
                BenchFamily::Bitk => BenchSubject::Family(family_of(FamilyName::Bitk, k, None)?),
                BenchFamily::MaskedParity => {
                    BenchSubject::Family(family_of(FamilyName::MaskedParity, None, mask.as_deref())?)
                }
            };
            let options = BenchOptions { repetitions: reps, parallel };
            let records = run_bench_with(&subject, &n_list, seed, options)?;
            for r in &records {
                writeln!(
                    out,
                    "n={} family={} wall_seconds={:.6} state_bytes={} queries={} verdict={}",
                    r.n, r.family, r.wall_seconds, r.state_bytes, r.queries, r.verdict
                )
                .map_err(io)?;
            }
            if let Some(path) = csv {
                let file = fs::File::create(&path)
                    .map_err(|e| usage(format!("cannot create {}: {e}", path.display())))?;
                write_csv(&records, file)?;
            }
        }
    }
    Ok(())
}

fn validate(n: usize, samples: Option<usize>, seed: u64, out: &mut dyn Write) -> Result<(), Failure> {
    let mut rng = RandomSource::new(seed);
    let functions = match samples {
        None => {
            if n > 4 {
                return Err(usage("exhaustive validation needs n <= 4; pass --samples for larger n"));
            }
            enumerate_promise_functions(n)?
        }
        Some(count) => {
            if n == 0 || n > MAX_QUANTUM_N {
                return Err(usage(format!("sampled validation needs 1 <= n <= {MAX_QUANTUM_N}")));
            }
            let mut fs = vec![
                FunctionSpec::family(n, Family::Constant0)?,
                FunctionSpec::family(n, Family::Constant1)?,
            ];
            for _ in 0..count {
                fs.push(FunctionSpec::random_balanced(n, &mut rng)?);
            }
            fs
        }
    };
    let mut passed = 0;
    for f in &functions {
        let oracle = build_oracle(f)?;
        let toy = run_dj(&oracle, &mut rng)?.verdict;
        let p = run_quantum_dj(f)?;
        let quantum = if p >= 0.5 { Verdict::Constant } else { Verdict::Balanced };
        let unitary_ok = n > MAX_UNITARY_N || oracle_unitary_equivalence(f)?;
        if toy == quantum && unitary_ok {
            passed += 1;
        } else {
            writeln!(out, "FAIL {f}: toy {toy}, quantum {quantum} (p0 = {p}), unitary match {unitary_ok}")
                .map_err(io)?;
        }
    }
    writeln!(out, "{passed}/{} functions pass", functions.len()).map_err(io)?;
    if passed == functions.len() {
        Ok(())
    } else {
        Err(usage(format!("{} functions failed validation", functions.len() - passed)))
    }
}

fn enumerate(n: usize, out: &mut dyn Write) -> Result<(), Failure> {
    if n == 0 || n > 4 {
        return Err(usage("n too large for enumeration (need 1 <= n <= 4)"));
    }
    for f in enumerate_promise_functions(n)? {
        let oracle = build_oracle(&f)?;
        let truth = classify(&f)?.verdict();
        let mut verdicts = Vec::with_capacity(1 << (n + 1));
        for code in 0..1u64 << (n + 1) {
            let phases = PackedBits::from_u64(code, n + 1);
            verdicts.push(run_dj_with_phases(&oracle, &phases, DjConfig::default())?);
        }
        let deterministic = verdicts.windows(2).all(|w| {
            w[0].verdict == w[1].verdict && w[0].final_input_readout == w[1].final_input_readout
        });
        let verdict = verdicts[0].verdict;
        writeln!(
            out,
            "{} {verdict} {} {}",
            f.to_table().map_err(Failure::from)?,
            if deterministic { "deterministic" } else { "nondeterministic" },
            if verdict == truth { "correct" } else { "wrong" }
        )
        .map_err(io)?;
    }
    Ok(())
}
