//! Good metrics on the bounded derived category of `F_p[x]/(x^n)` and the
//! completion machinery built on them: lengths of morphisms, Cauchy towers,
//! degreewise colimits, compact support, perfection and the singularity
//! category.

pub mod error;
pub mod linalg;
pub mod nilpotent;
pub mod rmodule;
pub mod complex;
pub mod random;
pub mod metric;
pub mod fuzz;
pub mod cauchy;
pub mod completion;

pub use error::{Error, Result};
