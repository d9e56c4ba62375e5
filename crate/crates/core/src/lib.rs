//! Thurston pullback, obstruction detection and kneading invariants for
//! critically finite real quadratic rational maps.

pub mod combinatorics;
pub mod kneading;
pub mod plmodel;
pub mod pullback;
pub mod quadmap;
pub mod real;

pub use combinatorics::{Combinatorics, CombinatoricsError};
