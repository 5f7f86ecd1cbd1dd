//! Ontic and epistemic states of toy bits.
//!
//! Each elementary system sits in one of four ontic states, labelled 1..=4.
//! A state is stored as two bits: the computational bit `b` and the phase bit
//! `p`, with label `2b + p + 1`. An observer only ever knows a two-element
//! subset of the labels (an epistemic pair), so
//!
//! ```text
//!   label  b p   Z cell  X cell  Y cell
//!     1    0 0   1v2     1v3     1v4
//!     2    0 1   1v2     2v4     2v3
//!     3    1 0   3v4     1v3     2v3
//!     4    1 1   3v4     2v4     1v4
//! ```
//!
//! A register holds `n` input systems (indices `0..n`, index `n - 1` the most
//! significant) followed by one target system at index `n`. Integers map onto
//! the computational bits little-endian: bit `i` of `x` sits in system `i`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::PackedBits;
use crate::error::{Error, Result};

/// One ontic state of an elementary system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ToyBit {
    pub b: bool,
    pub p: bool,
}

impl ToyBit {
    pub const fn new(b: bool, p: bool) -> Self {
        Self { b, p }
    }

    pub const fn label(self) -> u8 {
        2 * self.b as u8 + self.p as u8 + 1
    }

    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            1..=4 => {
                let v = label - 1;
                Ok(Self { b: v & 2 != 0, p: v & 1 != 0 })
            }
            _ => Err(Error::InvalidArgument(format!("ontic label {label} not in 1..=4"))),
        }
    }

    /// All four ontic states in label order.
    pub const ALL: [ToyBit; 4] = [
        ToyBit::new(false, false),
        ToyBit::new(false, true),
        ToyBit::new(true, false),
        ToyBit::new(true, true),
    ];
}

/// A uniform distribution over two of the four ontic labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EpistemicPair {
    /// 1∨2, logical 0.
    Z0,
    /// 3∨4, logical 1.
    Z1,
    /// 1∨3
    X0,
    /// 2∨4
    X1,
    /// 1∨4
    Y0,
    /// 2∨3
    Y1,
}

impl EpistemicPair {
    pub const ALL: [EpistemicPair; 6] = [Self::Z0, Self::Z1, Self::X0, Self::X1, Self::Y0, Self::Y1];

    pub const fn labels(self) -> [u8; 2] {
        match self {
            Self::Z0 => [1, 2],
            Self::Z1 => [3, 4],
            Self::X0 => [1, 3],
            Self::X1 => [2, 4],
            Self::Y0 => [1, 4],
            Self::Y1 => [2, 3],
        }
    }

    pub fn contains(self, label: u8) -> bool {
        self.labels().contains(&label)
    }

    pub fn contains_bit(self, bit: ToyBit) -> bool {
        self.contains(bit.label())
    }

    /// The ontic state selected by a within-pair sample: `false` picks the
    /// lower label, `true` the higher one.
    pub const fn ontic(self, sample: bool) -> ToyBit {
        match self {
            Self::Z0 => ToyBit::new(false, sample),
            Self::Z1 => ToyBit::new(true, sample),
            Self::X0 => ToyBit::new(sample, false),
            Self::X1 => ToyBit::new(sample, true),
            Self::Y0 => ToyBit::new(sample, sample),
            Self::Y1 => ToyBit::new(sample, !sample),
        }
    }

    pub const fn basis(self) -> MeasurementBasis {
        match self {
            Self::Z0 | Self::Z1 => MeasurementBasis::Computational,
            Self::X0 | Self::X1 => MeasurementBasis::Phase,
            Self::Y0 | Self::Y1 => MeasurementBasis::Y,
        }
    }

    /// Which cell of its basis this pair is.
    pub const fn outcome(self) -> bool {
        matches!(self, Self::Z1 | Self::X1 | Self::Y1)
    }
}

impl fmt::Display for EpistemicPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.labels();
        write!(f, "{a}v{b}")
    }
}

/// The three even partitions of the ontic space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementBasis {
    /// Z0 / Z1; reads `b`.
    Computational,
    /// X0 / X1; reads `p`.
    Phase,
    /// Y1 / Y0; reads `b ^ p`.
    Y,
}

impl MeasurementBasis {
    pub const ALL: [MeasurementBasis; 3] = [Self::Computational, Self::Phase, Self::Y];

    /// The partition cell holding `bit`.
    pub const fn cell(self, bit: ToyBit) -> bool {
        match self {
            Self::Computational => bit.b,
            Self::Phase => bit.p,
            Self::Y => bit.b ^ bit.p,
        }
    }
}

/// The epistemic pair certified by measuring `outcome` in `basis`.
pub const fn readout_epistemic(outcome: bool, basis: MeasurementBasis) -> EpistemicPair {
    match (basis, outcome) {
        (MeasurementBasis::Computational, false) => EpistemicPair::Z0,
        (MeasurementBasis::Computational, true) => EpistemicPair::Z1,
        (MeasurementBasis::Phase, false) => EpistemicPair::X0,
        (MeasurementBasis::Phase, true) => EpistemicPair::X1,
        (MeasurementBasis::Y, false) => EpistemicPair::Y0,
        (MeasurementBasis::Y, true) => EpistemicPair::Y1,
    }
}

/// Seeded deterministic generator. Children come from [`RandomSource::fork`].
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bit(&mut self) -> bool {
        self.rng.random()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random()
    }

    /// Uniform in `0..bound`; `bound == 0` means the full `u64` range.
    pub fn below(&mut self, bound: u64) -> u64 {
        if bound == 0 {
            self.rng.random()
        } else {
            self.rng.random_range(0..bound)
        }
    }

    pub fn bits(&mut self, len: usize) -> PackedBits {
        (0..len).map(|_| self.bit()).collect()
    }

    /// Independent child generator, reseeded from this one's stream.
    pub fn fork(&mut self) -> RandomSource {
        RandomSource::new(self.next_u64())
    }

    pub(crate) fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Ordered toy bits: `n` inputs followed by the target.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ToyRegister {
    b: PackedBits,
    p: PackedBits,
}

/// Word-rounding slack of [`ToyRegister::state_bytes`] over the exact payload.
pub const STATE_OVERHEAD_BYTES: usize = 16;

impl ToyRegister {
    /// All systems in label 1. `n_inputs` may be zero (target only).
    pub fn new(n_inputs: usize) -> Self {
        let len = n_inputs + 1;
        Self { b: PackedBits::zeros(len), p: PackedBits::zeros(len) }
    }

    pub fn from_bits(b: PackedBits, p: PackedBits) -> Result<Self> {
        if b.len() != p.len() || b.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "bit vectors must be equal and non-empty (b: {}, p: {})",
                b.len(),
                p.len()
            )));
        }
        Ok(Self { b, p })
    }

    pub fn from_labels(labels: &[u8]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("register needs at least one system".into()));
        }
        let mut reg = Self::new(labels.len() - 1);
        for (i, &l) in labels.iter().enumerate() {
            reg.set(i, ToyBit::from_label(l)?)?;
        }
        Ok(reg)
    }

    pub fn from_toy_bits(bits: &[ToyBit]) -> Result<Self> {
        Self::from_bits(bits.iter().map(|t| t.b).collect(), bits.iter().map(|t| t.p).collect())
    }

    /// Number of systems including the target.
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_inputs(&self) -> usize {
        self.len() - 1
    }

    pub fn target(&self) -> usize {
        self.len() - 1
    }

    #[inline]
    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.len() })
        }
    }

    pub fn get(&self, i: usize) -> Result<ToyBit> {
        self.check_index(i)?;
        Ok(ToyBit::new(self.b.get(i), self.p.get(i)))
    }

    pub fn set(&mut self, i: usize, bit: ToyBit) -> Result<()> {
        self.check_index(i)?;
        self.b.set(i, bit.b);
        self.p.set(i, bit.p);
        Ok(())
    }

    pub fn label(&self, i: usize) -> Result<u8> {
        self.get(i).map(ToyBit::label)
    }

    pub fn labels(&self) -> Vec<u8> {
        (0..self.len()).map(|i| ToyBit::new(self.b.get(i), self.p.get(i)).label()).collect()
    }

    pub fn comp_bits(&self) -> &PackedBits {
        &self.b
    }

    pub fn phase_bits(&self) -> &PackedBits {
        &self.p
    }

    pub(crate) fn comp_bits_mut(&mut self) -> &mut PackedBits {
        &mut self.b
    }

    pub(crate) fn phase_bits_mut(&mut self) -> &mut PackedBits {
        &mut self.p
    }

    /// Computational bits of the input systems only.
    pub fn input_value(&self) -> PackedBits {
        (0..self.n_inputs()).map(|i| self.b.get(i)).collect()
    }

    /// Logical state size: two bits per system.
    pub fn payload_bits(&self) -> usize {
        2 * self.len()
    }

    /// Bytes actually held: both bit planes rounded up to whole words.
    pub fn state_bytes(&self) -> usize {
        self.b.storage_bytes() + self.p.storage_bytes()
    }
}

impl fmt::Debug for ToyRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ToyRegister").field("labels", &self.labels()).finish()
    }
}

/// Sample a register from a product of epistemic pairs.
pub fn prepare(pairs: &[EpistemicPair], rng: &mut RandomSource) -> Result<ToyRegister> {
    let samples: Vec<bool> = pairs.iter().map(|_| rng.bit()).collect();
    prepare_with_samples(pairs, &samples)
}

/// [`prepare`] with the within-pair samples supplied explicitly.
pub fn prepare_with_samples(pairs: &[EpistemicPair], samples: &[bool]) -> Result<ToyRegister> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("prepare needs at least one pair".into()));
    }
    if pairs.len() != samples.len() {
        return Err(Error::InvalidArgument(format!(
            "{} pairs but {} samples",
            pairs.len(),
            samples.len()
        )));
    }
    let bits: Vec<ToyBit> = pairs.iter().zip(samples).map(|(pair, &s)| pair.ontic(s)).collect();
    ToyRegister::from_toy_bits(&bits)
}

/// Non-disturbing readout of the partition cell of system `index`.
pub fn measure(reg: &ToyRegister, index: usize, basis: MeasurementBasis) -> Result<bool> {
    reg.get(index).map(|bit| basis.cell(bit))
}

/// Readout followed by the knowledge-balance update: the ontic state is
/// resampled uniformly within the observed pair, erasing what was known in
/// the complementary bases.
pub fn measure_disturbing(
    reg: &mut ToyRegister,
    index: usize,
    basis: MeasurementBasis,
    rng: &mut RandomSource,
) -> Result<bool> {
    let outcome = measure(reg, index, basis)?;
    let pair = readout_epistemic(outcome, basis);
    reg.set(index, pair.ontic(rng.bit()))?;
    Ok(outcome)
}
