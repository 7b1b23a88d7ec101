//! Finite fields and the Möbius-plane RDS ingredients.

mod field;
mod moebius;

pub use field::{
    build_field, check_field_axioms, extend_quadratic, is_irreducible, prime_power, Field, FieldTable,
    QuadraticExtension, MAX_ORDER,
};
pub use moebius::{moebius_rds, moebius_rds_with, rds_prime_power, trivial_rds, MoebiusPlane, MAX_Q};
