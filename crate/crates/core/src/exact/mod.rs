//! Exact arithmetic over the rationals and the cyclotomic fields Q(zeta_k),
//! together with exact dense matrix operations (product, inverse,
//! division-free characteristic polynomial).

mod cyclotomic;
mod matrix;
mod qpoly;
mod rational;

pub use cyclotomic::{parse_scalar, CycScalar, MAX_CONDUCTOR};
pub use matrix::{j_matrix, rat_entry, CycPoly, ExactMatrix};
pub use qpoly::{cyclotomic_polynomial, euler_phi, QPoly};
pub use rational::{format_rat, is_square, parse_rat, rat, rat_height, rat_i64, rat_to_f64, Rat};

use thiserror::Error;

/// Errors from exact arithmetic.
#[derive(Debug, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor {0} exceeds the supported maximum {MAX_CONDUCTOR}")]
    ConductorTooLarge(u32),
    #[error("singular matrix")]
    Singular,
    #[error("matrix dimensions {0}x{0} and {1}x{1} do not match")]
    DimensionMismatch(usize, usize),
    #[error("cannot parse scalar {0:?}: {1}")]
    Parse(String, String),
}

/// Returns the degree [Q(zeta_k) : Q] = phi(k).
pub fn field_degree_over_q(k: u32) -> u32 {
    euler_phi(k)
}
