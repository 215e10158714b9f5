//! Stages of a growing chain of finite Heyting algebras, and the
//! constructions that extend partial isomorphisms along it.

mod chain;
mod extend;
mod split;
mod swap;
mod tree;

pub use chain::*;
pub use extend::*;
pub use split::*;
pub use swap::*;
pub use tree::*;
