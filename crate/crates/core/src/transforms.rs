//! Ontic-state permutations.
//!
//! Single-system gates act on the `(b, p)` encoding as bit arithmetic:
//!
//! * X = (1 3)(2 4): flip `b`
//! * Z = (1 2)(3 4): flip `p`
//! * H = (2 3): swap `b` and `p`
//!
//! CNOT flips the target's `b` by the control's `b` and, as back-action,
//! flips the control's `p` by the target's `p`.
//!
//! [`BasisPermutation`] relocates whole computational-basis blocks: it rewrites
//! the `b` bits of a set of systems and leaves every `p` bit alone. Toffoli is
//! the special case swapping `|110>` and `|111>`.

use std::fmt;
use std::sync::{Arc, LazyLock};

use crate::bits::PackedBits;
use crate::error::{Error, Result};
use crate::ontic::{RandomSource, ToyRegister};

/// Tables above this arity are refused; use a programmatic permutation.
pub const MAX_TABLE_ARITY: usize = 24;

pub fn apply_x(reg: &mut ToyRegister, i: usize) -> Result<()> {
    reg.check_index(i)?;
    reg.comp_bits_mut().flip(i);
    Ok(())
}

pub fn apply_z(reg: &mut ToyRegister, i: usize) -> Result<()> {
    reg.check_index(i)?;
    reg.phase_bits_mut().flip(i);
    Ok(())
}

pub fn apply_h(reg: &mut ToyRegister, i: usize) -> Result<()> {
    reg.check_index(i)?;
    let bit = reg.get(i)?;
    reg.comp_bits_mut().set(i, bit.p);
    reg.phase_bits_mut().set(i, bit.b);
    Ok(())
}

pub fn apply_cnot(reg: &mut ToyRegister, control: usize, target: usize) -> Result<()> {
    reg.check_index(control)?;
    reg.check_index(target)?;
    if control == target {
        return Err(Error::SameIndex(control));
    }
    let c = reg.get(control)?;
    let t = reg.get(target)?;
    if c.b {
        reg.comp_bits_mut().flip(target);
    }
    if t.p {
        reg.phase_bits_mut().flip(control);
    }
    Ok(())
}

/// Toffoli as a block permutation: flips `b[t]` iff `b[c1]` and `b[c2]` are set.
pub fn toffoli(reg: &mut ToyRegister, c1: usize, c2: usize, t: usize) -> Result<()> {
    apply_basis_perm(reg, &TOFFOLI, &[c1, c2, t])
}

static TOFFOLI: LazyLock<BasisPermutation> = LazyLock::new(|| {
    // bit 0 = c1, bit 1 = c2, bit 2 = t
    BasisPermutation::from_table((0u64..8).map(|x| if x & 3 == 3 { x ^ 4 } else { x }).collect())
        .expect("toffoli table is a bijection")
});

/// The three-system Toffoli block permutation.
pub fn toffoli_permutation() -> BasisPermutation {
    TOFFOLI.clone()
}

/// Replace the `b` bits at `indices` with `perm` applied to them. Bit `i` of
/// the permuted integer corresponds to `indices[i]`.
pub fn apply_basis_perm(reg: &mut ToyRegister, perm: &BasisPermutation, indices: &[usize]) -> Result<()> {
    check_indices(reg, perm.arity(), indices)?;
    let mut block: PackedBits = indices.iter().map(|&i| reg.comp_bits().get(i)).collect();
    perm.apply_forward(&mut block);
    let b = reg.comp_bits_mut();
    for (k, &i) in indices.iter().enumerate() {
        b.set(i, block.get(k));
    }
    Ok(())
}

fn check_indices(reg: &ToyRegister, arity: usize, indices: &[usize]) -> Result<()> {
    if indices.len() != arity {
        return Err(Error::ArityMismatch { expected: arity, actual: indices.len() });
    }
    let mut seen = PackedBits::zeros(reg.len());
    for &i in indices {
        reg.check_index(i)?;
        if seen.get(i) {
            return Err(Error::DuplicateIndex(i));
        }
        seen.set(i, true);
    }
    Ok(())
}

/// A bijection on `arity`-bit blocks given as code rather than a table.
pub trait BitPermutation: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize;
    fn forward(&self, bits: &mut PackedBits);
    fn inverse(&self, bits: &mut PackedBits);
}

#[derive(Debug)]
struct PermutationTable {
    arity: usize,
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

#[derive(Clone)]
enum Repr {
    Table(Arc<PermutationTable>),
    Programmatic(Arc<dyn BitPermutation>),
}

/// A permutation of computational basis states over `arity` systems.
#[derive(Clone)]
pub struct BasisPermutation {
    repr: Repr,
    inverted: bool,
}

impl fmt::Debug for BasisPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Table(t) => write!(f, "BasisPermutation::Table(arity={}, inverted={})", t.arity, self.inverted),
            Repr::Programmatic(p) => write!(f, "BasisPermutation::{p:?}(inverted={})", self.inverted),
        }
    }
}

impl BasisPermutation {
    /// Build from an explicit table `x -> table[x]`. The table length must be
    /// a power of two and every value must appear exactly once.
    pub fn from_table(table: Vec<u64>) -> Result<Self> {
        let size = table.len();
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::NotBijective(format!("table length {size} is not a power of two >= 2")));
        }
        let arity = size.trailing_zeros() as usize;
        if arity > MAX_TABLE_ARITY {
            return Err(Error::TooLarge { n: arity, max: MAX_TABLE_ARITY, what: "explicit permutation tables" });
        }
        let mut inverse = vec![u32::MAX; size];
        for (x, &y) in table.iter().enumerate() {
            let slot = inverse
                .get_mut(y as usize)
                .ok_or_else(|| Error::NotBijective(format!("value {y} out of range at {x}")))?;
            if *slot != u32::MAX {
                return Err(Error::NotBijective(format!("value {y} appears twice")));
            }
            *slot = x as u32;
        }
        let forward = table.into_iter().map(|y| y as u32).collect();
        Ok(Self {
            repr: Repr::Table(Arc::new(PermutationTable { arity, forward, inverse })),
            inverted: false,
        })
    }

    pub fn programmatic(perm: Arc<dyn BitPermutation>) -> Self {
        Self { repr: Repr::Programmatic(perm), inverted: false }
    }

    /// Wrap a forward/inverse closure pair acting on bit blocks.
    pub fn from_fns<F, G>(arity: usize, forward: F, inverse: G) -> Self
    where
        F: Fn(&mut PackedBits) + Send + Sync + 'static,
        G: Fn(&mut PackedBits) + Send + Sync + 'static,
    {
        Self::programmatic(Arc::new(FnPermutation { arity, forward: Box::new(forward), inverse: Box::new(inverse) }))
    }

    pub fn identity(arity: usize) -> Self {
        Self::programmatic(Arc::new(IdentityPermutation { arity }))
    }

    /// Exchange basis states `a` and `b`, fixing everything else.
    pub fn swap_states(arity: usize, a: u64, b: u64) -> Result<Self> {
        if arity > MAX_TABLE_ARITY || a >> arity != 0 || b >> arity != 0 {
            return Err(Error::InvalidArgument(format!("states {a}, {b} do not fit arity {arity}")));
        }
        let table = (0..1u64 << arity)
            .map(|x| if x == a { b } else if x == b { a } else { x })
            .collect();
        Self::from_table(table)
    }

    pub fn arity(&self) -> usize {
        match &self.repr {
            Repr::Table(t) => t.arity,
            Repr::Programmatic(p) => p.arity(),
        }
    }

    pub fn is_table(&self) -> bool {
        matches!(self.repr, Repr::Table(_))
    }

    /// The inverse permutation; shares storage with `self`.
    pub fn inverse(&self) -> Self {
        Self { repr: self.repr.clone(), inverted: !self.inverted }
    }

    pub fn apply_forward(&self, bits: &mut PackedBits) {
        self.apply(bits, self.inverted);
    }

    pub fn apply_inverse(&self, bits: &mut PackedBits) {
        self.apply(bits, !self.inverted);
    }

    fn apply(&self, bits: &mut PackedBits, inverse: bool) {
        assert_eq!(bits.len(), self.arity(), "block length must equal arity");
        match &self.repr {
            Repr::Table(t) => {
                let map = if inverse { &t.inverse } else { &t.forward };
                *bits = PackedBits::from_u64(u64::from(map[bits.to_u64() as usize]), t.arity);
            }
            Repr::Programmatic(p) => {
                if inverse {
                    p.inverse(bits)
                } else {
                    p.forward(bits)
                }
            }
        }
    }

    /// Forward map on an integer basis index. Requires `arity <= 64`.
    pub fn forward_index(&self, x: u64) -> u64 {
        let mut bits = PackedBits::from_u64(x, self.arity());
        self.apply_forward(&mut bits);
        bits.to_u64()
    }

    pub fn inverse_index(&self, y: u64) -> u64 {
        let mut bits = PackedBits::from_u64(y, self.arity());
        self.apply_inverse(&mut bits);
        bits.to_u64()
    }

    /// Check `inverse(forward(x)) == x` and `forward(inverse(x)) == x`:
    /// exhaustively for tables, on `samples` random blocks otherwise.
    pub fn check_round_trip(&self, rng: &mut RandomSource, samples: usize) -> Result<()> {
        let arity = self.arity();
        let exhaustive = self.is_table() || arity <= 12;
        let count = if exhaustive { 1usize << arity } else { samples };
        for s in 0..count {
            let x = if exhaustive { PackedBits::from_u64(s as u64, arity) } else { rng.bits(arity) };
            let mut y = x.clone();
            self.apply_forward(&mut y);
            self.apply_inverse(&mut y);
            let mut z = x.clone();
            self.apply_inverse(&mut z);
            self.apply_forward(&mut z);
            if y != x || z != x {
                return Err(Error::NotBijective(format!("round trip fails at {x}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
struct IdentityPermutation {
    arity: usize,
}

impl BitPermutation for IdentityPermutation {
    fn arity(&self) -> usize {
        self.arity
    }
    fn forward(&self, _: &mut PackedBits) {}
    fn inverse(&self, _: &mut PackedBits) {}
}

type BlockFn = Box<dyn Fn(&mut PackedBits) + Send + Sync>;

struct FnPermutation {
    arity: usize,
    forward: BlockFn,
    inverse: BlockFn,
}

impl fmt::Debug for FnPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnPermutation(arity={})", self.arity)
    }
}

impl BitPermutation for FnPermutation {
    fn arity(&self) -> usize {
        self.arity
    }
    fn forward(&self, bits: &mut PackedBits) {
        (self.forward)(bits)
    }
    fn inverse(&self, bits: &mut PackedBits) {
        (self.inverse)(bits)
    }
}

/// A gate on a register.
#[derive(Debug, Clone)]
pub enum GateOp {
    X(usize),
    Z(usize),
    H(usize),
    Cnot { control: usize, target: usize },
    BasisPerm { perm: BasisPermutation, indices: Vec<usize> },
}

impl GateOp {
    pub fn apply(&self, reg: &mut ToyRegister) -> Result<()> {
        match self {
            GateOp::X(i) => apply_x(reg, *i),
            GateOp::Z(i) => apply_z(reg, *i),
            GateOp::H(i) => apply_h(reg, *i),
            GateOp::Cnot { control, target } => apply_cnot(reg, *control, *target),
            GateOp::BasisPerm { perm, indices } => apply_basis_perm(reg, perm, indices),
        }
    }

    /// Copying variant of [`GateOp::apply`].
    pub fn applied(&self, reg: &ToyRegister) -> Result<ToyRegister> {
        let mut out = reg.clone();
        self.apply(&mut out)?;
        Ok(out)
    }
}
