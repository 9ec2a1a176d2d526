//! Kummer radicals over Q, Frobenius vectors and primitivity ranks.
//!
//! A radical is a list of generators of `D/E^{*p}` where `E = Q(mu_p)`. The
//! Frobenius at an unramified prime `ell` acts on `E(a^{1/p})` by a `p`-th root
//! of unity, recorded here as an element of `F_p` per generator. A set of
//! primes is primitive when these vectors are linearly independent.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{self, mul_mod, pow_mod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RadicalGenerator {
    MinusOne,
    Two,
    /// The degree prime `p` itself.
    PrimeP,
    /// A primitive `p`-th root of unity; its Kummer extension is `E(mu_{p^2})`.
    ZetaP,
    /// The cyclotomic element `prod_a (zeta^a - 1)^{a^{-j}}` for even `j`.
    CyclotomicXi(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KummerRadical {
    pub p: u64,
    pub i: u64,
    pub generators: Vec<RadicalGenerator>,
    pub plus_variant: bool,
    pub conditional_on_vandiver: bool,
}

impl KummerRadical {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }
}

/// Generators of `D_Q^{(i)}` (or its totally positive part when `plus`).
pub fn radical(p: u64, i: u64, plus: bool) -> Result<KummerRadical> {
    use RadicalGenerator::*;
    exactnum::require_prime(p)?;
    if i < 2 {
        return Err(Error::InvalidTwist(i));
    }
    let (generators, conditional) = if p == 2 {
        match (i % 2 == 1, plus) {
            (true, false) => (vec![MinusOne, Two], false),
            // -1 is negative at the real place, 2 is not
            (true, true) => (vec![Two], false),
            // the signature map is trivial for even twists
            (false, _) => (vec![Two], false),
        }
    } else if i % (p - 1) == 1 % (p - 1) && i % 2 == 1 {
        (vec![PrimeP], false)
    } else if i % 2 == 1 {
        (vec![CyclotomicXi(1 - i as i64)], true)
    } else if i % (p - 1) == 0 {
        (vec![ZetaP], false)
    } else {
        (vec![], true)
    };
    Ok(KummerRadical {
        p,
        i,
        generators,
        plus_variant: plus,
        conditional_on_vandiver: conditional,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusVector {
    pub ell: u64,
    pub components: Vec<u64>,
}

impl FrobeniusVector {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0)
    }
}

fn check_frobenius_prime(p: u64, ell: u64) -> Result<()> {
    exactnum::require_prime(ell)?;
    if ell == 2 || ell == p {
        return Err(Error::ExcludedPrime { ell, p });
    }
    if p != 2 && ell % p != 1 {
        return Err(Error::NotOneModP { ell, p });
    }
    Ok(())
}

pub fn frobenius_vector(rad: &KummerRadical, ell: u64) -> Result<FrobeniusVector> {
    check_frobenius_prime(rad.p, ell)?;
    let root = if rad.p == 2 { 0 } else { exactnum::primitive_root(ell)? };
    frobenius_components(rad, ell, root)
}

/// Frobenius vector computed against the primitive root `root` instead of the
/// smallest one. Rows change by a nonzero scalar only.
pub fn frobenius_vector_with_root(
    rad: &KummerRadical,
    ell: u64,
    root: u64,
) -> Result<FrobeniusVector> {
    check_frobenius_prime(rad.p, ell)?;
    if rad.p != 2 && !exactnum::is_primitive_root(root, ell) {
        return Err(Error::Unsupported(format!(
            "{root} is not a primitive root modulo {ell}"
        )));
    }
    frobenius_components(rad, ell, root)
}

fn frobenius_components(rad: &KummerRadical, ell: u64, root: u64) -> Result<FrobeniusVector> {
    let p = rad.p;
    let components = rad
        .generators
        .iter()
        .map(|g| match *g {
            RadicalGenerator::MinusOne => Ok((ell % 4 == 3) as u64),
            RadicalGenerator::Two => Ok(matches!(ell % 8, 3 | 5) as u64),
            RadicalGenerator::PrimeP => character(p as i64, ell, p, root),
            // zeta_{p^2}^{ell - 1} = zeta_p^{(ell - 1)/p}
            RadicalGenerator::ZetaP => Ok(((ell - 1) / p) % p),
            RadicalGenerator::CyclotomicXi(j) => {
                let xi = cyclotomic_xi_mod(j, ell, p, root);
                character(xi as i64, ell, p, root)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrobeniusVector { ell, components })
}

fn character(g: i64, ell: u64, p: u64, root: u64) -> Result<u64> {
    if p == 2 {
        return exactnum::power_residue_character(g, ell, 2);
    }
    exactnum::power_residue_character_with_root(g, ell, p, root)
}

/// Image of `xi_j` in `F_ell` for `zeta = root^((ell-1)/p)`.
///
/// The Teichmüller exponent `omega^{-j}(a)` is lifted to `a^{-j} mod p`.
fn cyclotomic_xi_mod(j: i64, ell: u64, p: u64, root: u64) -> u64 {
    let zeta = pow_mod(root, (ell - 1) / p, ell);
    let exp_mod = (-j).rem_euclid(p as i64 - 1) as u64;
    let mut acc = 1u64;
    let mut zeta_a = 1u64;
    for a in 1..p {
        zeta_a = mul_mod(zeta_a, zeta, ell);
        let base = (zeta_a + ell - 1) % ell;
        acc = mul_mod(acc, pow_mod(base, pow_mod(a, exp_mod, p), ell), ell);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimitivityRank {
    pub t: usize,
    pub independent: bool,
    /// Greedy selection in ascending prime order.
    pub maximal_subset: BTreeSet<u64>,
    pub vectors: Vec<FrobeniusVector>,
}

/// Incremental row echelon basis over `F_p`.
struct Echelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn new(p: u64) -> Self {
        Echelon { p, rows: Vec::new() }
    }

    /// Adds `v` to the basis if it is independent of it; reports whether it was.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + p - c * r % p) % p;
                }
            }
        }
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = pow_mod(v[pivot], p - 2, p);
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        // keep existing rows reduced at the new pivot
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = (*x + p - c * r % p) % p;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Rank over `F_p` of the Frobenius vectors at `primes`.
pub fn primitivity_rank(
    rad: &KummerRadical,
    primes: impl IntoIterator<Item = u64>,
) -> Result<PrimitivityRank> {
    let primes: BTreeSet<u64> = primes.into_iter().collect();
    let vectors = primes
        .iter()
        .map(|&ell| frobenius_vector(rad, ell))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_of_vectors(rad.p, vectors))
}

pub(crate) fn rank_of_vectors(p: u64, vectors: Vec<FrobeniusVector>) -> PrimitivityRank {
    let mut basis = Echelon::new(p);
    let mut maximal_subset = BTreeSet::new();
    for v in &vectors {
        if basis.insert(v.components.clone()) {
            maximal_subset.insert(v.ell);
        }
    }
    let t = maximal_subset.len();
    PrimitivityRank {
        t,
        independent: t == vectors.len(),
        maximal_subset,
        vectors,
    }
}
