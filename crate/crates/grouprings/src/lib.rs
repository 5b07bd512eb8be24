//! Group rings (Z/m)[G] over finite abelian groups, Kolyvagin derivative
//! operators and graded pieces of the augmentation filtration.

mod derivative;
mod graded;
mod group;
mod ring;

pub use derivative::{
    apply_derivative, derivative_coeffs, derivative_product, kolyvagin_derivative, quotient_map, s_element, DerivativeError,
};
pub use graded::{monomials, resolvent, twisted_trace, twisted_trace_naive, GradedError, GradedPiece, SplitLayout};
pub use group::{FinAbGroup, SubgroupSpec};
pub use ring::{det_of, flatten, flatten_vec, translates, translates_flat, unflatten_vec, GroupRing, GroupRingElem, RMatrix, RingMap};
