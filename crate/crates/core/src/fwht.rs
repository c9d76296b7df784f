//! In-place fast Walsh–Hadamard transform.
//!
//! The transform is the unnormalized one: applying it twice multiplies a
//! length-`2^m` vector by `2^m`. Everything downstream (overlap sweeps, the
//! closed-form feasible decomposition, dual violation scans) funnels through
//! this kernel, so it stays allocation-free and branch-light.

use crate::error::{Error, Result};

/// Applies the unnormalized Walsh–Hadamard transform in place.
///
/// Errors if the length is not a power of two (zero included).
pub fn fwht_inplace(v: &mut [f64]) -> Result<()> {
    if v.is_empty() || !v.len().is_power_of_two() {
        return Err(Error::invalid_argument(format!(
            "fwht length must be a power of two, got {}",
            v.len()
        )));
    }
    fwht_pow2(v);
    Ok(())
}

/// Same transform without the length check; callers guarantee a power of two.
pub(crate) fn fwht_pow2(v: &mut [f64]) {
    debug_assert!(v.len().is_power_of_two());
    let mut h = 1;
    while h < v.len() {
        for base in (0..v.len()).step_by(h * 2) {
            for i in base..base + h {
                let x = v[i];
                let y = v[i + h];
                v[i] = x + y;
                v[i + h] = x - y;
            }
        }
        h *= 2;
    }
}
