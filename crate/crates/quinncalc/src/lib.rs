//! Exact-arithmetic engine for the roottree calculus of sliced 2-complexes.
//!
//! The crate models a multiplicity-free semisimple tensor category over a
//! prime field, rewrites labeled roottrees by associativity and trace-unit
//! moves, solves the ambialgebra trace unit, evaluates slice-move scripts
//! into linear maps between state modules, and checks relations between
//! scripts coefficient by coefficient.
//!
//! Everything is computed exactly over Z_p; there is no floating point
//! anywhere in the crate.

pub mod ambialgebra;
pub mod category;
pub mod cli;
pub mod field;
pub mod presentation;
pub mod roottree;
pub mod script;
