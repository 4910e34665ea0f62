//! Exact computations on nilpotent Lie algebras and Carnot groups: graded
//! Lie algebra cohomology, weight tables, group calculus in exponential
//! coordinates and the contracted complex.

pub mod algebra;
pub mod cohomology;
pub mod contracted;
pub mod corpus;
pub mod forms;
pub mod group;
pub mod linalg;
pub mod poly;
pub mod ranges;
pub mod rational;
pub mod spec_format;

pub use algebra::{carnot_grading, derivation_grading, validate, Grading, LieAlgebra};
pub use cohomology::{cohomology, CohomologyTable};
pub use rational::Rational;
pub use spec_format::{parse_spec, serialize, AlgebraSpec, GradingSpec};
