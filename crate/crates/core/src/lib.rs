pub mod certificate;
pub mod chirality;
pub mod coxeter;
pub mod discriminant;
pub mod error;
pub mod expr;
pub mod lattice;
pub mod linalg;
pub mod roots;
pub mod script;
pub mod tables;

pub use error::{Error, Result};
pub use expr::{parse_lattice_expr, LatticeExpr};
pub use lattice::{BlockKind, Lattice};
