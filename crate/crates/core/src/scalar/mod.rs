//! The commutative scalar ring: exact polynomials over ℚ in coordinates and
//! opaque function symbols with formal derivative tags.

mod chart;
mod expr;
mod symbols;

pub use chart::{Chart, Idx, T};
pub use expr::{int, rat, Atom, Indices, Monomial, Rational, ScalarExpr, SymAtom};
pub use symbols::{SlotSymmetry, SymbolDecl, SymbolTable, Variance};
