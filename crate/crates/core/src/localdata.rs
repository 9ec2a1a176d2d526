//! Ramification shapes of cyclic degree-`p` extensions of Q and the local
//! invariants entering the genus formulae.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{self, FactoredInteger, DEFAULT_TRIAL_BOUND};

/// Ramification shape of a cyclic degree-`p` extension `L/Q`.
///
/// For odd `p` every tame prime is `1 mod p`, which is exactly the condition
/// for some cyclic degree-`p` field to be tamely ramified there. The value
/// describes a shape; it does not pin down a single field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CyclicExtensionOfQ {
    p: u64,
    tame_ramified: BTreeSet<u64>,
    wild_ramified: bool,
    infinity_ramified: bool,
}

impl CyclicExtensionOfQ {
    pub fn new(
        p: u64,
        tame_ramified: impl IntoIterator<Item = u64>,
        wild_ramified: bool,
        infinity_ramified: bool,
    ) -> Result<Self> {
        exactnum::require_prime(p)?;
        let tame_ramified: BTreeSet<u64> = tame_ramified.into_iter().collect();
        for &ell in &tame_ramified {
            exactnum::require_prime(ell)?;
            if ell == p {
                return Err(Error::InvalidExtension(format!(
                    "{ell} is the degree prime and cannot be tamely ramified"
                )));
            }
            if p != 2 && ell % p != 1 {
                return Err(Error::NotOneModP { ell, p });
            }
        }
        if infinity_ramified && p != 2 {
            return Err(Error::InvalidExtension(
                "only quadratic extensions ramify at infinity".into(),
            ));
        }
        if tame_ramified.is_empty() && !wild_ramified && !infinity_ramified {
            return Err(Error::InvalidExtension(
                "no ramified place: the trivial extension is not cyclic of degree p".into(),
            ));
        }
        Ok(CyclicExtensionOfQ {
            p,
            tame_ramified,
            wild_ramified,
            infinity_ramified,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn tame_ramified(&self) -> &BTreeSet<u64> {
        &self.tame_ramified
    }

    pub fn wild_ramified(&self) -> bool {
        self.wild_ramified
    }

    pub fn infinity_ramified(&self) -> bool {
        self.infinity_ramified
    }

    /// Number of ramified real places of Q, i.e. `r`.
    pub fn r(&self) -> u32 {
        self.infinity_ramified as u32
    }

    /// Ramified finite primes in ascending order.
    pub fn finite_ramified(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.tame_ramified.iter().copied().collect();
        if self.wild_ramified {
            out.push(self.p);
            out.sort_unstable();
        }
        out
    }

    pub fn ramifies_at(&self, ell: u64) -> bool {
        self.tame_ramified.contains(&ell) || (self.wild_ramified && ell == self.p)
    }
}

/// Local invariants of a ramified prime `ell` in a cyclic degree-`p` extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalData {
    pub ell: u64,
    /// Residue field cardinality `q_v`.
    pub q: u64,
    /// Ramification index `e_v`.
    pub e: u64,
    pub f: u64,
    /// Prime-to-`ell` part of inertia, `e_v'`.
    pub e_prime: u64,
    /// `gcd(e_v, q_v^i - 1)`.
    pub e_i: u64,
    pub i: u64,
}

/// `gcd(e, q^i - 1)` without forming `q^i`.
pub(crate) fn gcd_with_power_minus_one(e: u64, q: u64, i: u64) -> u64 {
    if e == 1 {
        return 1;
    }
    let t = (exactnum::pow_mod(q, i, e) + e - 1) % e;
    e.gcd(&t)
}

pub fn local_invariants(ext: &CyclicExtensionOfQ, ell: u64, i: u64) -> Result<LocalData> {
    if i < 2 {
        return Err(Error::InvalidTwist(i));
    }
    local_invariants_any_twist(ext, ell, i)
}

/// Same as [`local_invariants`] but also allows the twist `i = 1`, which the
/// descent bounds need for `e_v^{(i-1)}`.
pub(crate) fn local_invariants_any_twist(
    ext: &CyclicExtensionOfQ,
    ell: u64,
    i: u64,
) -> Result<LocalData> {
    if !ext.ramifies_at(ell) {
        return Err(Error::Unramified(ell));
    }
    let p = ext.p();
    let e = p;
    let e_prime = if ell == p { 1 } else { p };
    Ok(LocalData {
        ell,
        q: ell,
        e,
        f: 1,
        e_prime,
        e_i: gcd_with_power_minus_one(e, ell, i),
        i,
    })
}

/// Order `q^i - 1` of the residual odd K-group, factored by trial division up
/// to `bound`. Any unsplit part is left in the cofactor.
pub fn residual_k_order_with_bound(q: u64, i: u64, bound: u64) -> Result<FactoredInteger> {
    if q < 2 {
        return Err(Error::Unsupported(format!("residue cardinality {q} < 2")));
    }
    if i == 0 {
        return Err(Error::InvalidTwist(i));
    }
    let n = BigUint::from(q).pow(i as u32) - BigUint::one();
    FactoredInteger::from_biguint(&n, bound)
}

pub fn residual_k_order(q: u64, i: u64) -> Result<FactoredInteger> {
    residual_k_order_with_bound(q, i, DEFAULT_TRIAL_BOUND)
}

/// Discriminant of `Q(sqrt d)`.
pub fn quadratic_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// Ramification shape of `Q(sqrt d)/Q` for squarefree `d != 0, 1`.
pub fn quadratic_extension(d: i64) -> Result<CyclicExtensionOfQ> {
    if d == 0 || d == 1 {
        return Err(Error::InvalidQuadratic(d));
    }
    if !exactnum::is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    let tame = exactnum::factor_small(d.unsigned_abs())
        .into_iter()
        .map(|(q, _)| q)
        .filter(|&q| q != 2);
    CyclicExtensionOfQ::new(2, tame, d.rem_euclid(4) != 1, d < 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_examples() {
        let ext = CyclicExtensionOfQ::new(3, [7], false, false).unwrap();
        assert_eq!(local_invariants(&ext, 7, 2).unwrap().e_i, 3);

        let ext = quadratic_extension(-3).unwrap();
        let ld = local_invariants(&ext, 3, 2).unwrap();
        assert_eq!((ld.e, ld.e_i, ld.e_prime), (2, 2, 2));

        let ext = CyclicExtensionOfQ::new(3, [], true, false).unwrap();
        let ld = local_invariants(&ext, 3, 2).unwrap();
        assert_eq!((ld.e, ld.e_prime, ld.e_i), (3, 1, 1));
    }

    #[test]
    fn unramified_prime_is_rejected() {
        let ext = CyclicExtensionOfQ::new(3, [7], false, false).unwrap();
        assert_eq!(local_invariants(&ext, 13, 2), Err(Error::Unramified(13)));
        assert_eq!(local_invariants(&ext, 3, 2), Err(Error::Unramified(3)));
        assert_eq!(local_invariants(&ext, 7, 1), Err(Error::InvalidTwist(1)));
    }

    #[test]
    fn shape_invariants() {
        assert_eq!(
            CyclicExtensionOfQ::new(3, [11], false, false),
            Err(Error::NotOneModP { ell: 11, p: 3 })
        );
        assert!(CyclicExtensionOfQ::new(3, [7], false, true).is_err());
        assert!(CyclicExtensionOfQ::new(5, [], false, false).is_err());
        assert!(CyclicExtensionOfQ::new(3, [3], false, false).is_err());
        assert!(CyclicExtensionOfQ::new(4, [5], false, false).is_err());
        assert!(CyclicExtensionOfQ::new(2, [9], false, false).is_err());
    }

    #[test]
    fn residual_orders() {
        assert_eq!(residual_k_order(3, 2).unwrap().factors(), &[(2, 3)]);
        assert_eq!(residual_k_order(7, 1).unwrap().factors(), &[(2, 1), (3, 1)]);
        assert_eq!(residual_k_order(5, 3).unwrap().factors(), &[(2, 2), (31, 1)]);
        assert_eq!(residual_k_order(5, 3).unwrap().value(), 124.into());
        assert!(residual_k_order(1, 3).is_err());
    }

    #[test]
    fn quadratic_shapes() {
        let e = quadratic_extension(-5).unwrap();
        assert_eq!(e.tame_ramified().iter().copied().collect::<Vec<_>>(), vec![5]);
        assert!(e.wild_ramified() && e.infinity_ramified());

        let e = quadratic_extension(-15).unwrap();
        assert_eq!(e.tame_ramified().iter().copied().collect::<Vec<_>>(), vec![3, 5]);
        assert!(!e.wild_ramified() && e.infinity_ramified());

        let e = quadratic_extension(3).unwrap();
        assert_eq!(e.tame_ramified().iter().copied().collect::<Vec<_>>(), vec![3]);
        assert!(e.wild_ramified() && !e.infinity_ramified());

        assert_eq!(quadratic_extension(12), Err(Error::NotSquarefree(12)));
        assert_eq!(quadratic_extension(1), Err(Error::InvalidQuadratic(1)));
    }

    #[test]
    fn e_i_is_periodic_in_the_twist() {
        for e in 1..=12u64 {
            for q in 2..=50u64 {
                let (a, b) = (BigUint::from(e), BigUint::from(q));
                let direct = |i: u32| -> BigUint { a.gcd(&(b.pow(i) - 1u32)) };
                // for gcd(q, e) = 1 the value depends only on i mod ord_e(q)
                let period = (1..=e).find(|&k| exactnum::pow_mod(q, k, e) == 1 % e);
                for i in 1..=30u64 {
                    let fast = gcd_with_power_minus_one(e, q, i);
                    assert_eq!(BigUint::from(fast), direct(i as u32), "e={e} q={q} i={i}");
                    if let Some(k) = period {
                        assert_eq!(fast, gcd_with_power_minus_one(e, q, i + k));
                    }
                }
            }
        }
    }

    #[test]
    fn tame_primes_one_mod_p_have_full_e_i() {
        for p in [3u64, 5, 7] {
            for ell in (2..2000).filter(|&l| exactnum::is_prime(l) && l % p == 1) {
                let ext = CyclicExtensionOfQ::new(p, [ell], false, false).unwrap();
                for i in 2..12 {
                    assert_eq!(local_invariants(&ext, ell, i).unwrap().e_i, p);
                }
            }
        }
    }
}
