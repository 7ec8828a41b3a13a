#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod exponents;
pub mod phase_geometry;
pub mod special_functions;
pub mod linear_propagator;
pub mod semilinear_solver;
pub mod strichartz_verifier;
pub mod harness;
