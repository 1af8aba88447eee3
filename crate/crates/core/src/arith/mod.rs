//! Exact scalars: arbitrary-precision rationals and one real quadratic
//! extension Q(sqrt m), plus the integer helpers the protocols lean on.

mod ints;
mod quad;
mod scalar;

pub use ints::{ceil_log2, ceil_log2_u64, near_half_split};
pub use quad::{is_square_free, QuadScalar};
pub use scalar::{parse_rational, quad_cmp, Scalar};

/// Rationals are always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;
