//! Pauli strings, weighted sums, conjugation through the superexchange gate and
//! grouping into local measurement settings.

mod conjugate;
mod grouping;
mod string;
mod sum;

pub use conjugate::{
    bell_stabilizers, conjugate_by_sqrtswapdag, conjugated_stabilizers, conjugation_table, term_census,
    second_layer_pairs, ConjugationTable, TermCensus,
};
pub use grouping::{estimate_sum, group_into_lms, MeasurementSetting, SettingData, TermRef};
pub use string::{Pauli, PauliString};
pub use sum::PauliSum;
