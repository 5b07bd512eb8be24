//! Exact linear algebra over Z/m (Howell normal form) and over Z (Hermite and
//! Smith normal forms).

mod howell;
mod zint;
mod zm;

pub use howell::{howell, howell_rows, kernel, kernel_howell, solve, HowellForm, Solver};
pub use zint::{det as zdet, hnf, snf, HnfData, SnfData, ZMatrix};
pub use zm::{addmod, ext_gcd, gcd, inv_mod, mulmod, negmod, submod, unit_normalizer, ZmMatrix};
