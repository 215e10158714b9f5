//! Finite Heyting algebras and their dual posets: duality, amalgamation,
//! independence, finite stages of the homogeneous limit and their
//! automorphism groups.

pub mod amalgam;
pub mod error;
pub mod format;
pub mod group;
pub mod heyting;
pub mod limit;
pub mod pointset;
pub mod poset;
pub mod report;
pub mod suite;

pub use error::{Error, Result};
pub use heyting::{AlgebraMap, HeytingAlgebra};
pub use pointset::PointSet;
pub use poset::{FinitePoset, MonotoneMap};
