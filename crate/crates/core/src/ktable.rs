//! Orders of `H^2_M(Z, Z(i))` and `K_{2i-2}(Z)` from Bernoulli numerators.
//!
//! For `i = 2k` the motivic group has order `2 c_k` with
//! `c_k = numerator(|B_{2k}| / 4k)`. For odd `i` the odd part is trivial only
//! under Vandiver's conjecture, so those rows always carry the conditional
//! marking. The K-group differs from the motivic group only when
//! `2i - 2 = 6 (mod 8)`, where a `Z/2` cokernel disappears.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{self, FactoredInteger, DEFAULT_TRIAL_BOUND};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseOrder {
    pub i: u64,
    /// Index of the K-group, `2i - 2`.
    pub k_index: u64,
    pub h2_order: FactoredInteger,
    pub k_order: FactoredInteger,
    /// True when the odd part of the order is only known under Vandiver's
    /// conjecture (every odd `i`).
    pub conditional_on_vandiver: bool,
    /// Whether the caller chose to assume Vandiver's conjecture.
    pub vandiver_assumed: bool,
}

impl BaseOrder {
    /// Whether `p` divides the motivic order, given the assumption flag.
    ///
    /// `None` means the answer depends on Vandiver's conjecture and the caller
    /// did not assume it.
    pub fn h2_divisible_by(&self, p: u64) -> Option<bool> {
        if self.h2_order.divisible_by(p) {
            return Some(true);
        }
        if p != 2 && self.conditional_on_vandiver && !self.vandiver_assumed {
            return None;
        }
        Some(false)
    }
}

/// `c_k = numerator(|B_{2k}| / 4k)`.
pub fn c_k(k: u64) -> Result<BigInt> {
    let b = exactnum::bernoulli(2 * k)?;
    Ok(b.abs().div_integer(4 * k as i64).numerator().clone())
}

#[allow(non_snake_case)]
pub fn h2_order_Z(i: u64, assume_vandiver: bool) -> Result<BaseOrder> {
    if i < 2 {
        return Err(Error::InvalidTwist(i));
    }
    let (h2_order, conditional) = if i % 2 == 0 {
        let c = FactoredInteger::from_bigint(&c_k(i / 2)?, DEFAULT_TRIAL_BOUND)?;
        (c.mul(&FactoredInteger::prime_power(2, 1)), false)
    } else {
        (FactoredInteger::one(), true)
    };
    let k_order = if i % 4 == 0 {
        h2_order.div_prime(2).expect("even twists have even order")
    } else {
        h2_order.clone()
    };
    Ok(BaseOrder {
        i,
        k_index: 2 * i - 2,
        h2_order,
        k_order,
        conditional_on_vandiver: conditional,
        vandiver_assumed: assume_vandiver,
    })
}

/// Whether `p` divides `|H^2_M(Z, Z(i))|`, without factoring the order.
///
/// `None` when the answer depends on Vandiver's conjecture and it is not
/// assumed.
pub fn h2_divisible_by(i: u64, p: u64, assume_vandiver: bool) -> Result<Option<bool>> {
    if i < 2 {
        return Err(Error::InvalidTwist(i));
    }
    if p == 2 {
        return Ok(Some(i % 2 == 0));
    }
    if i % 2 == 1 {
        return Ok(if assume_vandiver { Some(false) } else { None });
    }
    let c = c_k(i / 2)?;
    Ok(Some((c % BigInt::from(p)).is_zero()))
}

#[allow(non_snake_case)]
pub fn k_order_Z(i: u64, assume_vandiver: bool) -> Result<FactoredInteger> {
    Ok(h2_order_Z(i, assume_vandiver)?.k_order)
}

/// Rows `i = 2..=max_i`, in order.
pub fn base_order_table(max_i: u64, assume_vandiver: bool, exec: Execution) -> Result<Vec<BaseOrder>> {
    let twists: Vec<u64> = (2..=max_i).collect();
    exec.map(&twists, |&i| h2_order_Z(i, assume_vandiver))
        .into_iter()
        .collect()
}
