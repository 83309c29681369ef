//! Bell expressions, correlation tables, the linear, conditional and averaged
//! functionals, and classical/quantum value oracles.

pub(crate) mod bounds;
mod expression;
mod functionals;
mod table;

pub use bounds::{
    bell_operator, classical_bound, quantum_value_fixed_measurements, BoundResult, Witness,
};
pub use expression::BellExpression;
pub use functionals::{
    averaged_j_percopy, averaged_setting_values, conditional_slice, conditional_value,
    conditional_values, correlator, evaluate, generalized_conditional_value, generalized_j_value,
    j_value, j_value_on_support, ConditionalSlice, PrefixNormalization, SupportedJ,
};
pub use table::{CorrelationTable, SchemeKind};
