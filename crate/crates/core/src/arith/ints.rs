use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

/// Smallest `t` with `2^t >= n`.
pub fn ceil_log2(n: &BigInt) -> Result<u64> {
    if !n.is_positive() {
        return Err(Error::domain(format!("ceil_log2 needs n >= 1, got {n}")));
    }
    if n.is_one() {
        return Ok(0);
    }
    Ok((n - 1u32).bits())
}

pub fn ceil_log2_u64(n: u64) -> Result<u64> {
    ceil_log2(&BigInt::from(n))
}

/// Splits `d` into its near-halves `(floor(d/2), ceil(d/2))`.
pub fn near_half_split(d: &BigInt) -> Result<(BigInt, BigInt)> {
    if !d.is_positive() {
        return Err(Error::domain(format!("near-half split needs D >= 1, got {d}")));
    }
    let lo = d.div_floor(&BigInt::from(2));
    let hi = d - &lo;
    Ok((lo, hi))
}
