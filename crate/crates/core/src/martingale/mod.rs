//! Processes, supermartingale verification and betting strategies.

mod approx;
mod lln;
mod multiplier;
mod process;
mod transform;

pub use approx::{capped_mixture_limit, from_multiplier_nets, rationalize, ApproxProcess, Rationalized};
pub use lln::{base_increment, lln_from_increments, lln_strategy, periodic_increments, Direction, LlnParams, LlnStrategy, SelectionProcess};
pub(crate) use lln::lln_strategy_with_increments;
pub use multiplier::{audit_multiplier, from_multiplier, ConstantMultiplier, FnMultiplier, Multiplier, MultiplierProcess, TableMultiplier};
pub use process::{classify_process, classify_process_with, difference, difference_at, Classification, RationalProcess, Witness, WitnessKind};
pub use transform::{cap_process, mix, mixture_weights};
