//! Numerical laboratory for the gauged Schwarzian: Taylor jets, sl(2,R)
//! algebra, composite fields, Schwarzian dynamics, and the local gauge sector.

pub mod composite;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod gauge;
pub mod jet;
pub mod sampling;
pub mod sl2;
pub mod suite;

pub use error::{Error, Result};
pub use jet::Jet;
pub use sl2::{GroupElement, Mat2};
