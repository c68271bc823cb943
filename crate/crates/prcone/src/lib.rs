//! Numerical library for the pre-order `A ≺ B` and equivalence `A ~ B` on
//! positive real matrices, their invariance under J-contractive linear
//! fractional transformations, and the uniform extensions of both relations
//! to matrix-valued Caratheodory functions on the unit disc.
//!
//! All computation is dense complex linear algebra at small dimension.
//! Every operation is a pure function over immutable values and is safe to
//! call from any number of threads.

pub mod cara;
pub mod error;
pub mod json;
pub mod lft;
pub mod linalg;
pub mod pr;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMatrix, HermEig, SupportBasis};
pub use pr::{EquivWitness, PRMatrix, PrecWitness};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
