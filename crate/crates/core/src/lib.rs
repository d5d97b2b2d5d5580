//! An executable exact-category engine over concrete module categories:
//! finitely presented modules over Z or GF(p), double short exact sequences,
//! 3x3 commutative diagrams, the phi-construction with its derived diagrams,
//! and a determinant-valued class oracle on the unit group of the base ring.

pub mod category;
pub mod diagrams;
pub mod error;
pub mod gen;
pub mod k1;
pub mod linalg;
pub mod resolution;
pub mod selftest;

pub use error::{Error, Result};
