//! Regularized trace of the inverse Laplacian on flat and conformally
//! deformed unit-area tori.

pub mod cli;
pub mod config;
pub mod conformal;
pub mod error;
pub mod flat_trace;
pub mod greens;
pub mod hideseek;
pub mod lattice;
pub(crate) mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use lattice::{make_hex_torus, make_rect_torus, make_torus, Point, TorusClass, TorusShape};
