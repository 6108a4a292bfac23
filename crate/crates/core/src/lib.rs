pub mod checks;
pub mod connection;
pub mod error;
pub mod exprlang;
pub mod forms;
pub mod linalg;
pub mod sample;
pub mod scalar;
pub mod sde;
pub mod symplectic;
pub mod universal;
pub mod vector;

pub use checks::Check;
pub use connection::{Connection, Gamma};
pub use error::{Error, Result};
pub use exprlang::Printable;
pub use forms::{Calculus, Form};
pub use scalar::{Chart, ScalarExpr, SymbolDecl, SymbolTable, Variance};
