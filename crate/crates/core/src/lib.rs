//! Construction and certification of Steiner quadruple systems whose derived
//! triple systems admit minimum colourings.

pub mod algebra;
pub mod bitset;
pub mod codes;
pub mod constructions;
pub mod data;
pub mod error;
pub mod exec;
pub mod group;
pub mod model;
pub mod recipes;
pub mod resolver;
pub mod serial;
pub mod verify;

pub use error::{Error, Result};
