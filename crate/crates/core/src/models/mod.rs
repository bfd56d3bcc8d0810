//! Solvable two-state classes, their reparameterizations and analytic amplitudes.

mod ansatz;
mod catalog;
mod crossing;
mod field;
mod solution;
mod transform;

pub use ansatz::{
    constraint_residuals, derivative_data, heun_params_from_model, solve_ansatz, AnsatzExponents, Prefactor,
};
pub use catalog::{
    enumerate_classes, ClassId, ClassKind, ClassTemplate, ModelClass, PowerSum, BI_TWICE_K, DOUBLE_TWICE_K,
};
pub use crossing::{crossing_analysis, CrossingReport};
pub use field::{field_configuration, FieldConfiguration};
pub use solution::{analytic_amplitudes, analytic_amplitudes_grid, A2Jet, TwoStateSolution, EVAL_TOL};
pub use transform::{zpow, CustomFn, Transform, ZJet};
