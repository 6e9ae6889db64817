//! Numerical laboratory for sharp Moser–Trudinger–Onofri inequalities on Sⁿ:
//! exact sphere moments, moment designs, bubble test functions and the
//! constants they calibrate.

pub mod bubble;
pub mod design;
pub mod error;
pub mod grid;
pub mod mt;
pub mod poly;
pub mod quadrature;
pub mod special;
pub mod sphere;

pub use error::{Error, Result};
