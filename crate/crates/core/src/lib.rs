//! Graded sets, terms, finite algebras, equational logic and abstract clones.

pub mod algebra;
pub mod clone;
pub mod fixtures;
pub mod graded;
pub mod limits;
pub mod logic;
pub mod term;
pub mod union_find;
pub use limits::Limits;
