//! Subtree polynomials of trees: exact computation, complex roots, and
//! exhaustive verification of where those roots can lie.

pub mod analysis;
pub mod cli;
pub mod poly_core;
pub mod root_solver;
pub mod subtree_engine;
pub mod tree_enum;
pub mod tree_model;
