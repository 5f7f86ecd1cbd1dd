//! Promise functions and the extended toy-model oracle.
//!
//! Every balanced `f` is reduced to the most-significant-bit function through
//! a basis permutation `pi_f` with `f(x) = msb(pi_f(x))`. The oracle is then
//!
//! ```text
//!   pi_f  ->  CNOT(msb -> target)  ->  pi_f^-1
//! ```
//!
//! For constant functions the centre gate is dropped (constant zero) or
//! replaced by X on the target (constant one), and `pi_f` is the identity.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::bits::PackedBits;
use crate::error::{Error, Result};
use crate::ontic::{measure, prepare, EpistemicPair, MeasurementBasis, RandomSource, ToyRegister};
use crate::transforms::{apply_cnot, apply_x, apply_z, BasisPermutation, BitPermutation};

/// Largest `n` accepted for explicit truth tables.
pub const MAX_TABLE_N: usize = 24;

/// Programmatic function families, all constant or balanced by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    Constant0,
    Constant1,
    /// `f(x) = x_{n-1}`
    MostSignificantBit,
    /// `f(x) = x_k`
    BitK(usize),
    /// XOR of all input bits.
    Parity,
    /// XOR of the input bits at the listed positions (non-empty).
    MaskedParity(Vec<usize>),
}

impl Family {
    /// Mask positions from the set bits of an integer.
    pub fn masked_parity_from_u64(mask: u64) -> Self {
        Family::MaskedParity((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Constant0 => "const0",
            Family::Constant1 => "const1",
            Family::MostSignificantBit => "msb",
            Family::BitK(_) => "bitk",
            Family::Parity => "parity",
            Family::MaskedParity(_) => "masked-parity",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::BitK(k) => write!(f, "bitk({k})"),
            Family::MaskedParity(m) => write!(f, "masked-parity({m:?})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionBody {
    /// Entry `x` is `f(x)`.
    Table(PackedBits),
    Family(Family),
}

/// A Boolean function on `n` input bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpec {
    n: usize,
    body: FunctionBody,
}

impl FunctionSpec {
    pub fn from_table(n: usize, table: PackedBits) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if n > MAX_TABLE_N {
            return Err(Error::TooLarge { n, max: MAX_TABLE_N, what: "explicit truth tables" });
        }
        if table.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "table length {} != 2^{n}",
                table.len()
            )));
        }
        Ok(Self { n, body: FunctionBody::Table(table) })
    }

    /// Table from a string of `0`/`1`, `n` inferred from the length.
    pub fn from_table_str(s: &str) -> Result<Self> {
        let len = s.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Parse(format!("table length {len} is not 2^n with n >= 1")));
        }
        let table = parse_bits(s)?;
        Self::from_table(len.trailing_zeros() as usize, table)
    }

    pub fn family(n: usize, family: Family) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        match &family {
            Family::BitK(k) if *k >= n => {
                return Err(Error::InvalidArgument(format!("bit {k} out of range for n = {n}")))
            }
            Family::MaskedParity(mask) => {
                if mask.is_empty() {
                    return Err(Error::InvalidArgument("masked parity needs a non-zero mask".into()));
                }
                if let Some(&i) = mask.iter().find(|&&i| i >= n) {
                    return Err(Error::InvalidArgument(format!("mask bit {i} out of range for n = {n}")));
                }
            }
            _ => {}
        }
        let family = match family {
            Family::MaskedParity(mut mask) => {
                mask.sort_unstable();
                mask.dedup();
                Family::MaskedParity(mask)
            }
            other => other,
        };
        Ok(Self { n, body: FunctionBody::Family(family) })
    }

    /// A uniformly random balanced table.
    pub fn random_balanced(n: usize, rng: &mut RandomSource) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_N {
            return Err(Error::TooLarge { n, max: MAX_TABLE_N, what: "explicit truth tables" });
        }
        let size = 1usize << n;
        let mut entries: Vec<bool> = (0..size).map(|x| x < size / 2).collect();
        entries.shuffle(rng.rng_mut());
        Self::from_table(n, entries.into_iter().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn body(&self) -> &FunctionBody {
        &self.body
    }

    pub fn is_table(&self) -> bool {
        matches!(self.body, FunctionBody::Table(_))
    }

    /// Evaluate on an `n`-bit input.
    pub fn eval(&self, x: &PackedBits) -> bool {
        assert_eq!(x.len(), self.n, "input width must equal n");
        match &self.body {
            FunctionBody::Table(t) => t.get(x.to_u64() as usize),
            FunctionBody::Family(f) => match f {
                Family::Constant0 => false,
                Family::Constant1 => true,
                Family::MostSignificantBit => x.get(self.n - 1),
                Family::BitK(k) => x.get(*k),
                Family::Parity => x.count_ones() % 2 == 1,
                Family::MaskedParity(mask) => x.parity_at(mask),
            },
        }
    }

    pub fn check_input(&self, x: u64) -> Result<()> {
        if self.n < 64 && x >> self.n != 0 {
            return Err(Error::InputOutOfRange { x, n: self.n });
        }
        Ok(())
    }

    /// Evaluate on an integer input (higher input bits zero when `n > 64`).
    pub fn eval_index(&self, x: u64) -> Result<bool> {
        self.check_input(x)?;
        if let FunctionBody::Table(t) = &self.body {
            return Ok(t.get(x as usize));
        }
        Ok(self.eval(&PackedBits::from_u64(x, self.n)))
    }

    /// Full truth table; `n` must not exceed [`MAX_TABLE_N`].
    pub fn to_table(&self) -> Result<PackedBits> {
        if self.n > MAX_TABLE_N {
            return Err(Error::TooLarge { n: self.n, max: MAX_TABLE_N, what: "explicit truth tables" });
        }
        if let FunctionBody::Table(t) = &self.body {
            return Ok(t.clone());
        }
        (0..1u64 << self.n).map(|x| self.eval_index(x)).collect()
    }

    /// Truth table file contents: `n`, newline, table, newline.
    pub fn to_table_file(&self) -> Result<String> {
        Ok(format!("{}\n{}\n", self.n, self.to_table()?))
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            FunctionBody::Table(t) => write!(f, "{t}"),
            FunctionBody::Family(fam) => write!(f, "{fam} on {} bits", self.n),
        }
    }
}

fn parse_bits(s: &str) -> Result<PackedBits> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("unexpected character {other:?} in table"))),
        })
        .collect()
}

/// Parse a truth table file: first line decimal `n`, second line `2^n`
/// characters over `{0,1}` in ascending `x`, then only whitespace.
pub fn parse_table_file(text: &str) -> Result<FunctionSpec> {
    let mut lines = text.lines();
    let n_line = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?.trim_end();
    let n: usize = n_line
        .parse()
        .map_err(|_| Error::Parse(format!("first line {n_line:?} is not a decimal n")))?;
    if n == 0 {
        return Err(Error::Parse("n must be positive".into()));
    }
    if n > MAX_TABLE_N {
        return Err(Error::TooLarge { n, max: MAX_TABLE_N, what: "explicit truth tables" });
    }
    let table_line = lines.next().ok_or_else(|| Error::Parse("missing table line".into()))?.trim_end();
    if table_line.len() != 1 << n {
        return Err(Error::Parse(format!(
            "table has {} characters, expected 2^{n} = {}",
            table_line.len(),
            1u64 << n
        )));
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::Parse("trailing content after table".into()));
    }
    FunctionSpec::from_table(n, parse_bits(table_line)?)
}

/// All promise functions on `n <= 4` bits: both constants, then every
/// balanced table in ascending order of its integer encoding.
pub fn enumerate_promise_functions(n: usize) -> Result<Vec<FunctionSpec>> {
    if n == 0 || n > 4 {
        return Err(Error::TooLarge { n, max: 4, what: "exhaustive enumeration" });
    }
    let size = 1usize << n;
    let mut out = vec![
        FunctionSpec::family(n, Family::Constant0)?,
        FunctionSpec::family(n, Family::Constant1)?,
    ];
    for code in 0u64..1 << size {
        if code.count_ones() as usize == size / 2 {
            out.push(FunctionSpec::from_table(n, PackedBits::from_u64(code, size))?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PromiseClass {
    ConstantZero,
    ConstantOne,
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Constant,
    Balanced,
}

impl PromiseClass {
    pub fn verdict(self) -> Verdict {
        match self {
            PromiseClass::Balanced => Verdict::Balanced,
            _ => Verdict::Constant,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Constant => "Constant",
            Verdict::Balanced => "Balanced",
        })
    }
}

pub fn classify(f: &FunctionSpec) -> Result<PromiseClass> {
    match &f.body {
        FunctionBody::Table(t) => {
            let size = t.len() as u64;
            match t.count_ones() {
                0 => Ok(PromiseClass::ConstantZero),
                ones if ones == size => Ok(PromiseClass::ConstantOne),
                ones if 2 * ones == size => Ok(PromiseClass::Balanced),
                ones => Err(Error::PromiseViolation { ones, size }),
            }
        }
        FunctionBody::Family(Family::Constant0) => Ok(PromiseClass::ConstantZero),
        FunctionBody::Family(Family::Constant1) => Ok(PromiseClass::ConstantOne),
        FunctionBody::Family(_) => Ok(PromiseClass::Balanced),
    }
}

/// Basis permutation `pi_f` with `msb(pi_f(x)) = f(x)` for balanced `f`.
///
/// Tables use sorted-rank matching: the i-th zero of `f` goes to `i`, the i-th
/// one to `2^(n-1) + i`. Families get closed-form bijections.
pub fn build_pi_f(f: &FunctionSpec) -> Result<BasisPermutation> {
    match classify(f) {
        Ok(PromiseClass::Balanced) => {}
        Ok(_) | Err(Error::PromiseViolation { .. }) => return Err(Error::NotBalanced),
        Err(e) => return Err(e),
    }
    let n = f.n;
    match &f.body {
        FunctionBody::Table(t) => {
            let half = 1u64 << (n - 1);
            let (mut zeros, mut ones) = (0u64, half);
            let forward = t
                .iter()
                .map(|bit| {
                    let slot = if bit { &mut ones } else { &mut zeros };
                    *slot += 1;
                    *slot - 1
                })
                .collect();
            BasisPermutation::from_table(forward)
        }
        FunctionBody::Family(Family::MostSignificantBit) => Ok(BasisPermutation::identity(n)),
        FunctionBody::Family(Family::BitK(k)) => {
            Ok(BasisPermutation::programmatic(Arc::new(SwapBits { arity: n, a: *k, b: n - 1 })))
        }
        FunctionBody::Family(Family::Parity) => Ok(BasisPermutation::programmatic(Arc::new(
            XorIntoMsb::new(n, (0..n).collect()),
        ))),
        FunctionBody::Family(Family::MaskedParity(mask)) => {
            Ok(BasisPermutation::programmatic(Arc::new(XorIntoMsb::new(n, mask.clone()))))
        }
        FunctionBody::Family(Family::Constant0 | Family::Constant1) => unreachable!(),
    }
}

/// Swap two bit positions. An involution.
#[derive(Debug)]
struct SwapBits {
    arity: usize,
    a: usize,
    b: usize,
}

impl BitPermutation for SwapBits {
    fn arity(&self) -> usize {
        self.arity
    }
    fn forward(&self, bits: &mut PackedBits) {
        bits.swap(self.a, self.b);
    }
    fn inverse(&self, bits: &mut PackedBits) {
        bits.swap(self.a, self.b);
    }
}

/// Overwrite the pivot (highest mask position) with the mask parity, then
/// move it to the top. Invertible because the pivot is itself in the mask.
#[derive(Debug)]
struct XorIntoMsb {
    arity: usize,
    mask: Vec<usize>,
    pivot: usize,
}

impl XorIntoMsb {
    fn new(arity: usize, mask: Vec<usize>) -> Self {
        let pivot = *mask.iter().max().expect("mask is non-empty");
        Self { arity, mask, pivot }
    }

    fn fold(&self, bits: &mut PackedBits) {
        let parity = bits.parity_at(&self.mask);
        bits.set(self.pivot, parity);
    }
}

impl BitPermutation for XorIntoMsb {
    fn arity(&self) -> usize {
        self.arity
    }
    fn forward(&self, bits: &mut PackedBits) {
        self.fold(bits);
        bits.swap(self.pivot, self.arity - 1);
    }
    fn inverse(&self, bits: &mut PackedBits) {
        bits.swap(self.pivot, self.arity - 1);
        self.fold(bits);
    }
}

/// The gate between `pi_f` and its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Center {
    None,
    XOnTarget,
    CnotMsbToTarget,
}

/// Anything that acts as a one-shot oracle on a toy register.
pub trait ToyOracle {
    fn n_inputs(&self) -> usize;
    fn apply(&self, reg: &mut ToyRegister) -> Result<()>;
}

#[derive(Debug, Clone)]
pub struct Oracle {
    function: FunctionSpec,
    class: PromiseClass,
    pi_f: BasisPermutation,
    center: Center,
}

pub fn build_oracle(f: &FunctionSpec) -> Result<Oracle> {
    let class = classify(f)?;
    let (pi_f, center) = match class {
        PromiseClass::Balanced => (build_pi_f(f)?, Center::CnotMsbToTarget),
        PromiseClass::ConstantZero => (BasisPermutation::identity(f.n), Center::None),
        PromiseClass::ConstantOne => (BasisPermutation::identity(f.n), Center::XOnTarget),
    };
    Ok(Oracle { function: f.clone(), class, pi_f, center })
}

impl Oracle {
    pub fn n(&self) -> usize {
        self.function.n
    }

    pub fn class(&self) -> PromiseClass {
        self.class
    }

    pub fn center(&self) -> Center {
        self.center
    }

    pub fn pi_f(&self) -> &BasisPermutation {
        &self.pi_f
    }

    pub fn function(&self) -> &FunctionSpec {
        &self.function
    }

    fn check_register(&self, reg: &ToyRegister) -> Result<()> {
        if reg.n_inputs() != self.n() {
            return Err(Error::SizeMismatch { expected: self.n(), actual: reg.n_inputs() });
        }
        Ok(())
    }

    /// Gate-sequence form: `pi_f`, centre gate, `pi_f^-1`.
    pub fn apply_oracle(&self, reg: &mut ToyRegister) -> Result<()> {
        self.check_register(reg)?;
        let n = self.n();
        let target = reg.target();
        permute_inputs(reg, &self.pi_f, n);
        match self.center {
            Center::None => {}
            Center::XOnTarget => apply_x(reg, target)?,
            Center::CnotMsbToTarget => apply_cnot(reg, n - 1, target)?,
        }
        permute_inputs(reg, &self.pi_f.inverse(), n);
        Ok(())
    }

    /// Direct ontic description: X on the target iff `f(x) = 1`, then, for
    /// balanced `f`, Z on the most significant input iff the target is in 2 or 4.
    pub fn apply_direct(&self, reg: &mut ToyRegister) -> Result<()> {
        self.check_register(reg)?;
        let target = reg.target();
        match self.class {
            PromiseClass::ConstantZero => {}
            PromiseClass::ConstantOne => apply_x(reg, target)?,
            PromiseClass::Balanced => {
                if self.function.eval(&reg.input_value()) {
                    apply_x(reg, target)?;
                }
                if reg.phase_bits().get(target) {
                    apply_z(reg, self.n() - 1)?;
                }
            }
        }
        Ok(())
    }
}

/// Rewrite the `b` bits of inputs `0..n` in place.
fn permute_inputs(reg: &mut ToyRegister, perm: &BasisPermutation, n: usize) {
    let mut block: PackedBits = reg.comp_bits().iter().take(n).collect();
    perm.apply_forward(&mut block);
    let b = reg.comp_bits_mut();
    for i in 0..n {
        b.set(i, block.get(i));
    }
}

impl ToyOracle for Oracle {
    fn n_inputs(&self) -> usize {
        self.n()
    }
    fn apply(&self, reg: &mut ToyRegister) -> Result<()> {
        self.apply_oracle(reg)
    }
}

/// Wrapper counting how often the inner oracle is invoked.
#[derive(Debug)]
pub struct CountingOracle<'a, O: ToyOracle> {
    inner: &'a O,
    calls: AtomicUsize,
}

impl<'a, O: ToyOracle> CountingOracle<'a, O> {
    pub fn new(inner: &'a O) -> Self {
        Self { inner, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<O: ToyOracle> ToyOracle for CountingOracle<'_, O> {
    fn n_inputs(&self) -> usize {
        self.inner.n_inputs()
    }
    fn apply(&self, reg: &mut ToyRegister) -> Result<()> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.apply(reg)
    }
}

/// Evaluate `f(x)` through the oracle: inputs prepared in the computational
/// pairs of `x`, target in logical 0; the target's computational readout
/// after one oracle call is the function value.
pub fn classical_query<O: ToyOracle + ?Sized>(oracle: &O, x: &PackedBits, rng: &mut RandomSource) -> Result<bool> {
    let n = oracle.n_inputs();
    if x.len() != n {
        return Err(Error::InvalidArgument(format!("input has {} bits, oracle expects {n}", x.len())));
    }
    let pairs: Vec<EpistemicPair> = x
        .iter()
        .map(|bit| if bit { EpistemicPair::Z1 } else { EpistemicPair::Z0 })
        .chain(std::iter::once(EpistemicPair::Z0))
        .collect();
    let mut reg = prepare(&pairs, rng)?;
    oracle.apply(&mut reg)?;
    measure(&reg, n, MeasurementBasis::Computational)
}

/// [`classical_query`] on an integer input.
pub fn classical_query_index<O: ToyOracle + ?Sized>(oracle: &O, x: u64, rng: &mut RandomSource) -> Result<bool> {
    let n = oracle.n_inputs();
    if n < 64 && x >> n != 0 {
        return Err(Error::InputOutOfRange { x, n });
    }
    classical_query(oracle, &PackedBits::from_u64(x, n), rng)
}
