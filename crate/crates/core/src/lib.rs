//! Classical simulation of the Deutsch-Jozsa algorithm in an extended
//! Spekkens toy model.
//!
//! Each toy bit carries two classical bits, so an `n`-input instance needs
//! `2(n + 1)` bits of state and one oracle call to decide whether a promise
//! function is constant or balanced, with zero error.
//!
//! ```
//! use toydj::{build_oracle, run_dj, Family, FunctionSpec, RandomSource, Verdict};
//!
//! let f = FunctionSpec::family(1000, Family::Parity).unwrap();
//! let oracle = build_oracle(&f).unwrap();
//! let result = run_dj(&oracle, &mut RandomSource::new(7)).unwrap();
//! assert_eq!(result.verdict, Verdict::Balanced);
//! assert_eq!(result.queries_used, 1);
//! ```
//!
//! Modules:
//! * [`ontic`]: toy bits, epistemic pairs, registers, preparation and readout
//! * [`transforms`]: X, Z, H, CNOT and computational-basis permutations
//! * [`oracle`]: promise functions, `pi_f`, the oracle and single-value queries
//! * [`dj`]: the one-query protocol and its stage trace
//! * [`quantum`]: statevector reference for the quantum circuit
//! * [`baselines`]: deterministic and randomized classical deciders
//! * [`bench`]: scaling measurements and CSV export
//! * [`cli`]: the `toydj` command line

pub mod baselines;
pub mod bench;
pub mod bits;
pub mod cli;
pub mod dj;
pub mod error;
pub mod ontic;
pub mod oracle;
pub mod quantum;
pub mod transforms;

pub use bits::PackedBits;
pub use dj::{run_dj, trace_dj, DjConfig, DjResult};
pub use error::{Error, Result};
pub use ontic::{measure, prepare, EpistemicPair, MeasurementBasis, RandomSource, ToyBit, ToyRegister};
pub use oracle::{build_oracle, build_pi_f, classify, Family, FunctionSpec, Oracle, PromiseClass, Verdict};
pub use transforms::{BasisPermutation, GateOp};
