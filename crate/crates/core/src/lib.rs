//! Ext groups between simple and irreducible modules of blocks with abelian
//! defect group and abelian inertial quotient.

pub mod analysis;
pub mod chars;
pub mod error;
pub mod ext;
pub mod group;
pub mod ring;

pub use error::{Error, Result};
