//! Exact integer and rational kernel.
//!
//! Everything here is deterministic. Primality is decided by Miller–Rabin with
//! a base set that is a proof for all `n < 2^64`; larger inputs are rejected
//! instead of being tested probabilistically.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Trial-division bound used when factoring orders.
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Reduces a signed integer into `0..m`.
#[inline]
pub fn reduce_signed(g: i64, m: u64) -> u64 {
    (g as i128).rem_euclid(m as i128) as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality for arbitrary-precision input; refuses anything `>= 2^64`.
pub fn is_prime_big(n: &BigUint) -> Result<bool> {
    n.to_u64()
        .map(is_prime)
        .ok_or_else(|| Error::PrimalityRange(n.to_string()))
}

pub(crate) fn require_prime(n: u64) -> Result<()> {
    if is_prime(n) {
        Ok(())
    } else {
        Err(Error::NotPrime(n))
    }
}

/// Factors `n` completely by trial division. Intended for `n` up to ~10^12.
pub fn factor_small(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    factor_small(d.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Multiplicative order of `a` modulo `m`, or `None` when `gcd(a, m) != 1`.
pub fn multiplicative_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if a.gcd(&m) != 1 {
        return None;
    }
    let phi = factor_small(m)
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1));
    let mut order = phi;
    for (q, _) in factor_small(phi) {
        while order % q == 0 && pow_mod(a, order / q, m) == 1 {
            order /= q;
        }
    }
    Some(order)
}

/// Whether `g` generates `(Z/ell)^*` for the odd prime `ell`.
pub fn is_primitive_root(g: u64, ell: u64) -> bool {
    let g = g % ell;
    g != 0
        && factor_small(ell - 1)
            .iter()
            .all(|&(q, _)| pow_mod(g, (ell - 1) / q, ell) != 1)
}

/// Smallest positive primitive root modulo an odd prime.
pub fn primitive_root(ell: u64) -> Result<u64> {
    if ell % 2 == 0 || !is_prime(ell) {
        return Err(Error::NotOddPrime(ell));
    }
    let factors = factor_small(ell - 1);
    (2..ell)
        .find(|&g| factors.iter().all(|&(q, _)| pow_mod(g, (ell - 1) / q, ell) != 1))
        .ok_or(Error::NotOddPrime(ell))
}

/// The exponent `c` in `F_p` with `g^((ell-1)/p) = zeta^c (mod ell)`, where
/// `zeta = r^((ell-1)/p)` and `r` is the smallest primitive root mod `ell`.
///
/// `c == 0` exactly when `g` is a `p`-th power modulo `ell`.
pub fn power_residue_character(g: i64, ell: u64, p: u64) -> Result<u64> {
    check_character_args(g, ell, p)?;
    let r = primitive_root(ell)?;
    character_against(g, ell, p, r)
}

/// Same as [`power_residue_character`] but against a caller-chosen primitive
/// root `r`. Changing `r` scales every nonzero value by a fixed unit of `F_p`.
pub fn power_residue_character_with_root(g: i64, ell: u64, p: u64, r: u64) -> Result<u64> {
    check_character_args(g, ell, p)?;
    if !is_primitive_root(r, ell) {
        return Err(Error::Unsupported(format!(
            "{r} is not a primitive root modulo {ell}"
        )));
    }
    character_against(g, ell, p, r)
}

fn check_character_args(g: i64, ell: u64, p: u64) -> Result<()> {
    require_prime(ell)?;
    require_prime(p)?;
    if ell % p != 1 {
        return Err(Error::NotOneModP { ell, p });
    }
    if reduce_signed(g, ell) == 0 {
        return Err(Error::NotCoprime { g, ell });
    }
    Ok(())
}

fn character_against(g: i64, ell: u64, p: u64, r: u64) -> Result<u64> {
    let k = (ell - 1) / p;
    let x = pow_mod(reduce_signed(g, ell), k, ell);
    discrete_log_in_mu_p(x, pow_mod(r, k, ell), ell, p)
}

/// Solves `zeta^c = x` for `c in 0..p`, with `zeta` of exact order `p` in `F_ell`.
pub(crate) fn discrete_log_in_mu_p(x: u64, zeta: u64, ell: u64, p: u64) -> Result<u64> {
    let mut acc = 1 % ell;
    for c in 0..p {
        if acc == x {
            return Ok(c);
        }
        acc = mul_mod(acc, zeta, ell);
    }
    Err(Error::Unsupported(format!(
        "{x} is not a {p}-th root of unity modulo {ell}"
    )))
}

/// Trial division of `n` by `start..=bound`; returns the factors found, the
/// remaining cofactor and the first untested divisor.
fn trial_divide_u64(mut n: u64, start: u64, bound: u64) -> (Vec<(u64, u32)>, u64, u64) {
    let mut out = Vec::new();
    let mut d = start;
    while d <= bound && d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    (out, n, d)
}

/// Sign of a [`FactoredInteger`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// A nonzero integer as `sign * prod p^e * cofactor`.
///
/// The listed primes are proven prime and strictly increasing. `cofactor` is
/// whatever trial division could not split; it is `1` when the factorisation
/// is complete, and otherwise exceeds the square of the trial bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    sign: Sign,
    factors: Vec<(u64, u32)>,
    cofactor: BigUint,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            sign: Sign::Plus,
            factors: Vec::new(),
            cofactor: BigUint::one(),
        }
    }

    pub fn from_u64(n: u64) -> Result<Self> {
        Self::from_biguint(&BigUint::from(n), DEFAULT_TRIAL_BOUND)
    }

    /// Factors `n` by trial division up to `bound`.
    pub fn from_biguint(n: &BigUint, bound: u64) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Unsupported("cannot factor zero".into()));
        }
        let mut rest = n.clone();
        let mut factors = Vec::new();
        let mut d = 2u64;
        while d <= bound {
            if let Some(small) = rest.to_u64() {
                let (mut found, r, next) = trial_divide_u64(small, d, bound);
                factors.append(&mut found);
                rest = BigUint::from(r);
                d = next;
                break;
            }
            let dd = BigUint::from(d);
            if &dd * &dd > rest {
                break;
            }
            if (&rest % &dd).is_zero() {
                let mut e = 0;
                while (&rest % &dd).is_zero() {
                    rest /= &dd;
                    e += 1;
                }
                factors.push((d, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        let mut cofactor = BigUint::one();
        if !rest.is_one() {
            let below_square = {
                let dd = BigUint::from(d);
                &dd * &dd > rest
            };
            match rest.to_u64() {
                Some(r) if below_square || is_prime(r) => factors.push((r, 1)),
                _ => cofactor = rest,
            }
        }
        factors.sort_unstable();
        Ok(FactoredInteger {
            sign: Sign::Plus,
            factors,
            cofactor,
        })
    }

    pub fn from_bigint(n: &BigInt, bound: u64) -> Result<Self> {
        let mut f = Self::from_biguint(n.magnitude(), bound)?;
        if n.is_negative() {
            f.sign = Sign::Minus;
        }
        Ok(f)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn value(&self) -> BigInt {
        let mag = self
            .factors
            .iter()
            .fold(self.cofactor.clone(), |acc, &(p, e)| acc * BigUint::from(p).pow(e));
        match self.sign {
            Sign::Plus => BigInt::from(mag),
            Sign::Minus => -BigInt::from(mag),
        }
    }

    /// Exponent of the prime `p` among the listed factors.
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Drops every factor of `p`.
    pub fn without_prime(&self, p: u64) -> Self {
        FactoredInteger {
            sign: self.sign,
            factors: self.factors.iter().copied().filter(|&(q, _)| q != p).collect(),
            cofactor: self.cofactor.clone(),
        }
    }

    /// Whether `p` divides the value. Exact even when a cofactor remains.
    pub fn divisible_by(&self, p: u64) -> bool {
        self.valuation(p) > 0 || (&self.cofactor % BigUint::from(p)).is_zero()
    }

    pub fn mul(&self, other: &FactoredInteger) -> FactoredInteger {
        let mut factors = self.factors.clone();
        for &(p, e) in &other.factors {
            match factors.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 += e,
                None => factors.push((p, e)),
            }
        }
        factors.sort_unstable();
        let sign = if self.sign == other.sign { Sign::Plus } else { Sign::Minus };
        FactoredInteger {
            sign,
            factors,
            cofactor: &self.cofactor * &other.cofactor,
        }
    }

    pub(crate) fn prime_power(p: u64, e: u32) -> FactoredInteger {
        let mut f = FactoredInteger::one();
        if e > 0 {
            f.factors.push((p, e));
        }
        f
    }

    /// Divides out one factor of the listed prime `p`.
    pub(crate) fn div_prime(&self, p: u64) -> Option<FactoredInteger> {
        let mut out = self.clone();
        let idx = out.factors.iter().position(|&(q, _)| q == p)?;
        out.factors[idx].1 -= 1;
        if out.factors[idx].1 == 0 {
            out.factors.remove(idx);
        }
        Some(out)
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        if !self.cofactor.is_one() {
            parts.push(format!("[{}]", self.cofactor));
        }
        if self.sign == Sign::Minus {
            write!(f, "-")?;
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl Serialize for FactoredInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("FactoredInteger", 4)?;
        s.serialize_field("value", &self.value().to_string())?;
        s.serialize_field("sign", &self.sign)?;
        s.serialize_field("factors", &self.factors)?;
        s.serialize_field("cofactor", &self.cofactor.to_string())?;
        s.end()
    }
}

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Unsupported("zero denominator".into()));
        }
        Ok(ExactRational(BigRational::new(numerator, denominator)))
    }

    pub fn from_integer(n: i64) -> Self {
        ExactRational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn div_integer(&self, n: i64) -> Self {
        ExactRational(&self.0 / BigInt::from(n))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Bernoulli number `B_m` for even `m >= 2` (`B_2 = 1/6`, `B_4 = -1/30`).
///
/// Computed with the Akiyama–Tanigawa transform.
pub fn bernoulli(m: u64) -> Result<ExactRational> {
    if m < 2 || m % 2 == 1 {
        return Err(Error::OddBernoulliIndex(m));
    }
    let n = m as usize;
    let mut row: Vec<BigRational> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        row.push(BigRational::new(BigInt::one(), BigInt::from(k + 1)));
        for j in (1..=k).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * BigInt::from(j);
        }
    }
    Ok(ExactRational(row.swap_remove(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sieve(n: usize) -> Vec<bool> {
        let mut is = vec![true; n + 1];
        is[0] = false;
        if n >= 1 {
            is[1] = false;
        }
        let mut i = 2;
        while i * i <= n {
            if is[i] {
                let mut j = i * i;
                while j <= n {
                    is[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        is
    }

    #[test]
    fn primality_spot_values() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(691));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557)); // largest prime below 2^64
        assert!(!is_prime(u64::MAX));
    }

    #[test]
    fn primality_matches_sieve() {
        let s = sieve(100_000);
        for (n, &p) in s.iter().enumerate() {
            assert_eq!(is_prime(n as u64), p, "n = {n}");
        }
    }

    #[test]
    fn big_primality_rejects_out_of_range() {
        let big = BigUint::from(u64::MAX) + 2u32;
        assert!(matches!(is_prime_big(&big), Err(Error::PrimalityRange(_))));
        assert_eq!(is_prime_big(&BigUint::from(691u32)), Ok(true));
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(3), Ok(2));
        assert_eq!(primitive_root(7), Ok(3));
        assert_eq!(primitive_root(41), Ok(6));
        assert_eq!(primitive_root(2), Err(Error::NotOddPrime(2)));
        assert_eq!(primitive_root(15), Err(Error::NotOddPrime(15)));
    }

    #[test]
    fn primitive_root_has_full_order() {
        let s = sieve(10_000);
        for ell in (3..=10_000u64).filter(|&n| s[n as usize]) {
            let r = primitive_root(ell).unwrap();
            assert_eq!(multiplicative_order(r, ell), Some(ell - 1), "ell = {ell}");
        }
    }

    #[test]
    fn character_examples() {
        assert_eq!(power_residue_character(2, 7, 2), Ok(0));
        assert_eq!(power_residue_character(2, 3, 2), Ok(1));
        // cubes mod 7 are {1, 6}; 3 is not among them
        let cubes: Vec<u64> = (1..7).map(|x| pow_mod(x, 3, 7)).collect();
        assert!(!cubes.contains(&3));
        let c = power_residue_character(3, 7, 3).unwrap();
        assert_ne!(c, 0);
        // zeta = 3^2 = 2 mod 7 and 3^2 = 2, so c = 1
        assert_eq!(c, 1);
    }

    #[test]
    fn character_errors() {
        assert_eq!(
            power_residue_character(2, 11, 3),
            Err(Error::NotOneModP { ell: 11, p: 3 })
        );
        assert_eq!(
            power_residue_character(14, 7, 3),
            Err(Error::NotCoprime { g: 14, ell: 7 })
        );
        assert_eq!(power_residue_character(2, 9, 2), Err(Error::NotPrime(9)));
    }

    #[test]
    fn quadratic_supplements() {
        let s = sieve(10_000);
        for ell in (3..=10_000u64).filter(|&n| s[n as usize]) {
            let two = power_residue_character(2, ell, 2).unwrap();
            assert_eq!(two == 0, ell % 8 == 1 || ell % 8 == 7, "ell = {ell}");
            let minus_one = power_residue_character(-1, ell, 2).unwrap();
            assert_eq!(minus_one == 0, ell % 4 == 1, "ell = {ell}");
        }
    }

    proptest! {
        #[test]
        fn character_is_additive(idx in 0usize..200, g in 1i64..100_000, h in 1i64..100_000, pi in 0usize..3) {
            let p = [2u64, 3, 5][pi];
            let primes: Vec<u64> = (3..20_000u64).filter(|&l| is_prime(l) && l % p == 1).collect();
            let ell = primes[idx % primes.len()];
            prop_assume!(g as u64 % ell != 0 && h as u64 % ell != 0);
            let cg = power_residue_character(g, ell, p).unwrap();
            let ch = power_residue_character(h, ell, p).unwrap();
            let gh = (g as u128 * h as u128 % ell as u128) as i64;
            let cgh = power_residue_character(gh, ell, p).unwrap();
            prop_assert_eq!(cgh, (cg + ch) % p);
        }

        #[test]
        fn factoring_reconstructs_value(n in 1u64..10_000_000_000) {
            let f = FactoredInteger::from_u64(n).unwrap();
            prop_assert!(f.is_complete());
            prop_assert_eq!(f.value(), BigInt::from(n));
            prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.factors().iter().all(|&(p, e)| is_prime(p) && e >= 1));
        }
    }

    #[test]
    fn factoring_with_small_bound_reports_cofactor() {
        // 1_000_003 * 1_000_033 with trial bound 100
        let n = BigUint::from(1_000_003u64 * 1_000_033u64) * BigUint::from(12u32);
        let f = FactoredInteger::from_biguint(&n, 100).unwrap();
        assert_eq!(f.factors(), &[(2, 2), (3, 1)]);
        assert_eq!(f.cofactor(), &BigUint::from(1_000_003u64 * 1_000_033u64));
        assert_eq!(f.value(), BigInt::from(n));
        assert!(f.divisible_by(1_000_003));
        assert_eq!(f.to_string(), "2^2*3*[1000036000099]");
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli(2).unwrap().to_string(), "1/6");
        assert_eq!(bernoulli(4).unwrap().to_string(), "-1/30");
        assert_eq!(bernoulli(12).unwrap().to_string(), "-691/2730");
        assert_eq!(bernoulli(3), Err(Error::OddBernoulliIndex(3)));
        assert_eq!(bernoulli(0), Err(Error::OddBernoulliIndex(0)));
    }

    /// Independent route: `sum_{j=0}^{m} C(m+1, j) B_j = 0` with `B_1 = -1/2`.
    fn bernoulli_by_recurrence(max: usize) -> Vec<BigRational> {
        let mut b: Vec<BigRational> = vec![BigRational::one()];
        for m in 1..=max {
            let mut binom = BigInt::one(); // C(m+1, 0)
            let mut acc = BigRational::zero();
            for (j, bj) in b.iter().enumerate() {
                acc += bj * &binom;
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            // binom is now C(m+1, m) = m + 1
            b.push(-acc / binom);
        }
        b
    }

    #[test]
    fn bernoulli_matches_recurrence_oracle() {
        let oracle = bernoulli_by_recurrence(60);
        for m in (2..=60).step_by(2) {
            assert_eq!(bernoulli(m as u64).unwrap().as_ratio(), &oracle[m], "m = {m}");
        }
    }

    #[test]
    fn von_staudt_clausen_denominators() {
        for m in (2..=60u64).step_by(2) {
            let expected: u64 = (2..=m + 1)
                .filter(|&q| is_prime(q) && m % (q - 1) == 0)
                .product();
            assert_eq!(
                bernoulli(m).unwrap().denominator(),
                &BigInt::from(expected),
                "m = {m}"
            );
        }
    }

    #[test]
    fn squarefree_checks() {
        assert!(is_squarefree(-15));
        assert!(is_squarefree(1));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(0));
        assert!(!is_squarefree(-4));
    }
}
