//! The toy-model Deutsch-Jozsa protocol.
//!
//! ```text
//!   prepare  (1v2, ..., 1v2, 3v4)
//!   H all    (1v3, ..., 1v3, 2v4)
//!   oracle   constant: unchanged inputs; balanced: msb -> 2v4
//!   H inputs constant: (1v2, ...);      balanced: (3v4, 1v2, ...)
//! ```
//!
//! The inputs are then read computationally. All zeros means the register is
//! back in its initial epistemic state and the function is constant.

use crate::bits::PackedBits;
use crate::error::{Error, Result};
use crate::ontic::{measure, prepare_with_samples, EpistemicPair, MeasurementBasis, RandomSource, ToyRegister};
use crate::oracle::{ToyOracle, Verdict};
use crate::transforms::apply_h;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DjConfig {
    /// Also apply the final Hadamard to the target. The verdict does not
    /// depend on it; it only changes the target's final ontic state.
    pub final_h_on_target: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DjResult {
    pub verdict: Verdict,
    pub queries_used: usize,
    /// Computational readout of inputs `0..n`.
    pub final_input_readout: PackedBits,
    /// Within-pair samples drawn at preparation, one per system.
    pub sampled_phase_bits: PackedBits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Prepared,
    FirstHadamard,
    Oracle,
    FinalHadamard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub stage: Stage,
    pub register: ToyRegister,
}

/// The initial product state: `n` copies of logical 0, target in logical 1.
pub fn dj_input_pairs(n: usize) -> Vec<EpistemicPair> {
    let mut pairs = vec![EpistemicPair::Z0; n];
    pairs.push(EpistemicPair::Z1);
    pairs
}

pub fn run_dj<O: ToyOracle + ?Sized>(oracle: &O, rng: &mut RandomSource) -> Result<DjResult> {
    run_dj_with(oracle, rng, DjConfig::default())
}

pub fn run_dj_with<O: ToyOracle + ?Sized>(oracle: &O, rng: &mut RandomSource, config: DjConfig) -> Result<DjResult> {
    let phases = rng.bits(oracle.n_inputs() + 1);
    run_dj_with_phases(oracle, &phases, config)
}

/// One protocol run with the preparation samples given explicitly.
pub fn run_dj_with_phases<O: ToyOracle + ?Sized>(
    oracle: &O,
    phase_bits: &PackedBits,
    config: DjConfig,
) -> Result<DjResult> {
    let mut queries_used = 0;
    let reg = execute(oracle, phase_bits, config, &mut queries_used, |_, _| {})?;
    let n = oracle.n_inputs();
    let readout: PackedBits = (0..n)
        .map(|i| measure(&reg, i, MeasurementBasis::Computational))
        .collect::<Result<_>>()?;
    let verdict = if readout.any() { Verdict::Balanced } else { Verdict::Constant };
    Ok(DjResult { verdict, queries_used, final_input_readout: readout, sampled_phase_bits: phase_bits.clone() })
}

/// Register snapshots after each protocol stage.
pub fn trace_dj<O: ToyOracle + ?Sized>(oracle: &O, phase_bits: &PackedBits) -> Result<Vec<Snapshot>> {
    trace_dj_with(oracle, phase_bits, DjConfig::default())
}

pub fn trace_dj_with<O: ToyOracle + ?Sized>(
    oracle: &O,
    phase_bits: &PackedBits,
    config: DjConfig,
) -> Result<Vec<Snapshot>> {
    let mut snapshots = Vec::with_capacity(4);
    let mut queries = 0;
    execute(oracle, phase_bits, config, &mut queries, |stage, reg| {
        snapshots.push(Snapshot { stage, register: reg.clone() })
    })?;
    Ok(snapshots)
}

fn execute<O, F>(
    oracle: &O,
    phase_bits: &PackedBits,
    config: DjConfig,
    queries: &mut usize,
    mut observe: F,
) -> Result<ToyRegister>
where
    O: ToyOracle + ?Sized,
    F: FnMut(Stage, &ToyRegister),
{
    let n = oracle.n_inputs();
    if n == 0 {
        return Err(Error::InvalidArgument("oracle needs at least one input".into()));
    }
    if phase_bits.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} phase bits, got {}",
            n + 1,
            phase_bits.len()
        )));
    }
    let mut reg = prepare_with_samples(&dj_input_pairs(n), &phase_bits.to_vec())?;
    observe(Stage::Prepared, &reg);

    for i in 0..=n {
        apply_h(&mut reg, i)?;
    }
    observe(Stage::FirstHadamard, &reg);

    oracle.apply(&mut reg)?;
    *queries += 1;
    observe(Stage::Oracle, &reg);

    let last = if config.final_h_on_target { n } else { n - 1 };
    for i in 0..=last {
        apply_h(&mut reg, i)?;
    }
    observe(Stage::FinalHadamard, &reg);
    Ok(reg)
}
