//! Polynomial coefficient calculus on a coordinate chart.

mod chart;
mod forms;
mod polynomial;

pub use chart::{Chart, Fibration};
pub use forms::{
    closedness_defect, evaluate_vector, homotopy_inverse_d, interior, lie_bracket, lie_derivative, pullback,
    DifferentialForm, MultiVectorField, PolyMap,
};
pub use polynomial::{monomials_up_to, Monomial, Polynomial};
