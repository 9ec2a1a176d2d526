//! Genus exponents of motivic tame kernels and even K-groups of cyclic
//! degree-`p` extensions of Q, descent bounds, and the exact descent
//! structure when the base order is prime to `p`.
//!
//! Every exponent has the shape `sigma - t + correction`, where
//! `sigma = sum_v log_p e_v^{(i)}` over finite ramified primes (one per tame
//! prime), `t` is a primitivity rank, and the correction accounts for the
//! real place when `p = 2`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{factor_small, FactoredInteger};
use crate::ktable;
use crate::kummer::{self, KummerRadical};
use crate::localdata::{local_invariants, local_invariants_any_twist, CyclicExtensionOfQ};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    /// Vanishing of the Tate cohomology of `(Z/2)^{delta_i(L)}`.
    #[serde(rename = "H_i")]
    Hi,
    /// The formula used is the one valid for extensions unramified at infinity.
    UnramifiedAtInfinity,
    /// Vandiver's conjecture at `p`.
    Vandiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    /// `|H^2_M(o_L, Z(i))_G| / |H^2_M(Z, Z(i))|`.
    Motivic,
    /// `|K_{2i-2}(o_L)_G| / |K_{2i-2}(Z)|`.
    KTheory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeExponents {
    pub e_i: u64,
    pub e_prime: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenusReport {
    pub ext: CyclicExtensionOfQ,
    pub i: u64,
    pub kind: RatioKind,
    pub per_prime: BTreeMap<u64, PrimeExponents>,
    /// `sum_v log_p e_v^{(i)}`, i.e. `|S \ S_p|` for degree `p`.
    pub sigma: u32,
    /// Primitivity rank of the radical used (`t_i`, or `t_i^+` when
    /// `delta_variant_used`).
    pub t: u32,
    pub r: u32,
    pub s_i: u32,
    pub delta_variant_used: bool,
    pub exponent_low: i64,
    pub exponent_high: i64,
    /// `p^t`.
    pub norm_index: FactoredInteger,
    pub assumptions: BTreeSet<Assumption>,
}

impl GenusReport {
    /// The exponent when it is pinned down, `None` for a proper interval.
    pub fn exponent(&self) -> Option<i64> {
        (self.exponent_low == self.exponent_high).then_some(self.exponent_low)
    }
}

/// `s_i` over Q: the sign of `-1` spans the real signatures for odd `i`, the
/// signature map is trivial for even `i`.
fn s_i_over_q(ext: &CyclicExtensionOfQ, i: u64) -> u32 {
    if i % 2 == 0 {
        ext.r()
    } else {
        0
    }
}

struct Ingredients {
    per_prime: BTreeMap<u64, PrimeExponents>,
    sigma: u32,
}

fn log_p(p: u64, n: u64) -> u32 {
    factor_small(n)
        .into_iter()
        .find(|&(q, _)| q == p)
        .map_or(0, |(_, e)| e)
}

fn ingredients(ext: &CyclicExtensionOfQ, i: u64) -> Result<Ingredients> {
    let mut per_prime = BTreeMap::new();
    let mut sigma = 0;
    for ell in ext.finite_ramified() {
        let ld = local_invariants(ext, ell, i)?;
        sigma += log_p(ext.p(), ld.e_i);
        per_prime.insert(
            ell,
            PrimeExponents {
                e_i: ld.e_i,
                e_prime: ld.e_prime,
            },
        );
    }
    Ok(Ingredients { per_prime, sigma })
}

fn tame_rank(ext: &CyclicExtensionOfQ, rad: &KummerRadical) -> Result<kummer::PrimitivityRank> {
    kummer::primitivity_rank(rad, ext.tame_ramified().iter().copied())
}

struct Exponent {
    t: u32,
    low: i64,
    high: i64,
    plus: bool,
    assumptions: BTreeSet<Assumption>,
}

fn build(
    ext: &CyclicExtensionOfQ,
    i: u64,
    kind: RatioKind,
    ing: Ingredients,
    e: Exponent,
) -> GenusReport {
    GenusReport {
        ext: ext.clone(),
        i,
        kind,
        per_prime: ing.per_prime,
        sigma: ing.sigma,
        t: e.t,
        r: ext.r(),
        s_i: s_i_over_q(ext, i),
        delta_variant_used: e.plus,
        exponent_low: e.low,
        exponent_high: e.high,
        norm_index: FactoredInteger::prime_power(ext.p(), e.t),
        assumptions: e.assumptions,
    }
}

fn rank_with(ext: &CyclicExtensionOfQ, i: u64, plus: bool) -> Result<(u32, bool)> {
    let rad = kummer::radical(ext.p(), i, plus)?;
    Ok((tame_rank(ext, &rad)?.t as u32, rad.conditional_on_vandiver))
}

fn exact(sigma: u32, t: u32, shift: i64, plus: bool, assumptions: &[Assumption]) -> Exponent {
    let v = sigma as i64 - t as i64 + shift;
    Exponent {
        t,
        low: v,
        high: v,
        plus,
        assumptions: assumptions.iter().copied().collect(),
    }
}

/// Shared odd-`p` branch: `sigma - t_i` with the full radical.
fn odd_p_exponent(ext: &CyclicExtensionOfQ, i: u64, sigma: u32) -> Result<Exponent> {
    let (t, conditional) = rank_with(ext, i, false)?;
    let assumptions: &[Assumption] = if conditional { &[Assumption::Vandiver] } else { &[] };
    Ok(exact(sigma, t, 0, false, assumptions))
}

/// `p = 2`, odd `i`, ramified at infinity: `s_i <= nu_i <= r` unless (H_i)
/// is assumed, in which case the positive radical collapses the interval.
fn two_odd_ramified_at_infinity(
    ext: &CyclicExtensionOfQ,
    i: u64,
    sigma: u32,
    assume_hi: bool,
) -> Result<Exponent> {
    let s = s_i_over_q(ext, i) as i64;
    if assume_hi {
        let (t_plus, _) = rank_with(ext, i, true)?;
        return Ok(exact(sigma, t_plus, s, true, &[Assumption::Hi]));
    }
    let (t, _) = rank_with(ext, i, false)?;
    let base = sigma as i64 - t as i64;
    Ok(Exponent {
        t,
        low: base + s,
        high: base + ext.r() as i64,
        plus: false,
        assumptions: BTreeSet::new(),
    })
}

/// Exponent of `p` in `|H^2_M(o_L, Z(i))_G| / |H^2_M(Z, Z(i))|`.
pub fn genus_exponent(ext: &CyclicExtensionOfQ, i: u64, assume_hi: bool) -> Result<GenusReport> {
    let ing = ingredients(ext, i)?;
    let sigma = ing.sigma;
    let e = if ext.p() != 2 {
        odd_p_exponent(ext, i, sigma)?
    } else if i % 2 == 0 {
        let (t, _) = rank_with(ext, i, false)?;
        exact(sigma, t, -(ext.r() as i64), false, &[])
    } else if !ext.infinity_ramified() {
        let (t, _) = rank_with(ext, i, false)?;
        exact(sigma, t, 0, false, &[Assumption::UnramifiedAtInfinity])
    } else {
        two_odd_ramified_at_infinity(ext, i, sigma, assume_hi)?
    };
    Ok(build(ext, i, RatioKind::Motivic, ing, e))
}

/// Exponent of `p` in `|K_{2i-2}(o_L)_G| / |K_{2i-2}(Z)|`.
///
/// For `p = 2` the correction `alpha_i` depends on `2i - 2 mod 8`:
/// `-r` for 2, `0` for 4 and 6, and `s_i <= alpha_i <= r` for 0. When
/// `2i - 2 = 4 (mod 8)` the K-theoretic norm index is the one of the positive
/// radical, so `t_i^+` is used there.
pub fn k_genus_ratio(ext: &CyclicExtensionOfQ, i: u64, assume_hi: bool) -> Result<GenusReport> {
    if ext.p() != 2 {
        let mut report = genus_exponent(ext, i, assume_hi)?;
        report.kind = RatioKind::KTheory;
        return Ok(report);
    }
    let ing = ingredients(ext, i)?;
    let sigma = ing.sigma;
    let r = ext.r() as i64;
    let e = match (2 * i - 2) % 8 {
        2 => {
            let (t, _) = rank_with(ext, i, false)?;
            exact(sigma, t, -r, false, &[])
        }
        6 => {
            let (t, _) = rank_with(ext, i, false)?;
            exact(sigma, t, 0, false, &[])
        }
        4 => {
            let (t_plus, _) = rank_with(ext, i, true)?;
            exact(sigma, t_plus, 0, true, &[Assumption::Hi])
        }
        _ if !ext.infinity_ramified() => {
            let (t, _) = rank_with(ext, i, false)?;
            exact(sigma, t, 0, false, &[Assumption::UnramifiedAtInfinity])
        }
        _ => two_odd_ramified_at_infinity(ext, i, sigma, assume_hi)?,
    };
    Ok(build(ext, i, RatioKind::KTheory, ing, e))
}

/// [`genus_exponent`] over many shapes, in input order.
pub fn genus_batch(
    exts: &[CyclicExtensionOfQ],
    i: u64,
    assume_hi: bool,
    exec: Execution,
) -> Vec<Result<GenusReport>> {
    exec.map(exts, |ext| genus_exponent(ext, i, assume_hi))
}

/// Lower bounds for the cokernel and kernel of the descent map.
///
/// `coker_lower` and `ker_lower` are the products over `T` with any
/// nonnegative power of two folded in; the two-exponent fields always carry
/// the full signed power so a negative one is visible rather than dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescentBounds {
    pub t_used: BTreeSet<u64>,
    pub coker_lower: FactoredInteger,
    pub coker_two_exponent: i64,
    pub ker_lower: FactoredInteger,
    pub ker_two_exponent: i64,
    pub conditional_on_vandiver: bool,
}

fn with_two_power(product: FactoredInteger, two_exponent: i64) -> FactoredInteger {
    if two_exponent > 0 {
        product.mul(&FactoredInteger::prime_power(2, two_exponent as u32))
    } else {
        product
    }
}

pub fn descent_bounds(ext: &CyclicExtensionOfQ, i: u64) -> Result<DescentBounds> {
    if i < 2 {
        return Err(Error::InvalidTwist(i));
    }
    let rad = kummer::radical(ext.p(), i, false)?;
    let rank = tame_rank(ext, &rad)?;
    let mut coker = FactoredInteger::one();
    let mut ker = FactoredInteger::one();
    for &ell in &rank.maximal_subset {
        let shifted = local_invariants_any_twist(ext, ell, i - 1)?;
        coker = coker.mul(&FactoredInteger::from_u64(shifted.e_i)?);
        ker = ker.mul(&FactoredInteger::from_u64(shifted.e_prime)?);
    }
    let r = ext.r() as i64;
    let (coker_two, ker_two) = if i % 2 == 0 {
        (0, r)
    } else {
        (s_i_over_q(ext, i) as i64 - r, -r)
    };
    Ok(DescentBounds {
        t_used: rank.maximal_subset,
        coker_lower: with_two_power(coker, coker_two),
        coker_two_exponent: coker_two,
        ker_lower: with_two_power(ker, ker_two),
        ker_two_exponent: ker_two,
        conditional_on_vandiver: rad.conditional_on_vandiver,
    })
}

/// A finite abelian group as its invariant factors `d_1 | d_2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroupStructure {
    pub cyclic_orders: Vec<u64>,
}

impl AbelianGroupStructure {
    /// Canonical form of `sum_j Z/n_j`; orders `<= 1` are dropped.
    pub fn from_cyclic(orders: impl IntoIterator<Item = u64>) -> Self {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for n in orders.into_iter().filter(|&n| n > 1) {
            for (q, e) in factor_small(n) {
                by_prime.entry(q).or_default().push(e);
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (q, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            // the largest powers go to the last invariant factors
            for (slot, e) in factors.iter_mut().rev().zip(exps) {
                *slot *= q.pow(e);
            }
        }
        AbelianGroupStructure {
            cyclic_orders: factors,
        }
    }

    pub fn order(&self) -> u128 {
        self.cyclic_orders.iter().map(|&n| n as u128).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.cyclic_orders.is_empty()
    }
}

impl std::fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.cyclic_orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.cyclic_orders.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum DescentStructure {
    Structure(AbelianGroupStructure),
    NotApplicable { reason: String },
}

/// `ker f_i = coker f_i = sum_v Z/e_v'` when `p` does not divide the base
/// order and the tame ramified primes form a primitive set.
pub fn exact_descent_structure(
    ext: &CyclicExtensionOfQ,
    i: u64,
    assume_vandiver: bool,
) -> Result<DescentStructure> {
    let na = |reason: String| Ok(DescentStructure::NotApplicable { reason });
    if ext.infinity_ramified() {
        return na("the extension is ramified at infinity".into());
    }
    let p = ext.p();
    let base = ktable::h2_order_Z(i, assume_vandiver)?;
    match base.h2_divisible_by(p) {
        Some(true) => return na(format!("{p} divides |H^2_M(Z, Z({i}))| = {}", base.h2_order)),
        None => {
            return na(format!(
                "the {p}-part of |H^2_M(Z, Z({i}))| is trivial only under Vandiver's conjecture"
            ))
        }
        Some(false) => {}
    }
    let rad = kummer::radical(p, i, false)?;
    let rank = tame_rank(ext, &rad)?;
    if !rank.independent {
        return na(format!(
            "rank deficit: the {} tame primes have primitivity rank {}",
            ext.tame_ramified().len(),
            rank.t
        ));
    }
    let mut orders = Vec::new();
    for ell in ext.finite_ramified() {
        orders.push(local_invariants(ext, ell, i)?.e_prime);
    }
    Ok(DescentStructure::Structure(AbelianGroupStructure::from_cyclic(orders)))
}
