//! Tate cohomology of a finite cyclic group acting on `Z/m`, by enumeration.
//!
//! A generator of the cyclic group of order `n` acts by multiplication by a
//! unit `u`. Both `H^0 = M^G / N M` and `H^-1 = ker N / (u - 1) M` are
//! obtained by walking every element of `Z/m`; nothing here uses the closed
//! form the oracle is meant to check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{self, mul_mod};
use crate::localdata::gcd_with_power_minus_one;
use crate::par::Execution;

/// Largest module the oracle will enumerate.
pub const MODULE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TateModule {
    m: u64,
    n: u64,
    u: u64,
}

impl TateModule {
    pub fn new(m: u64, n: u64, u: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidModule("m and n must be positive".into()));
        }
        let u = u % m;
        if num_integer::gcd(u, m) != 1 && m != 1 {
            return Err(Error::InvalidModule(format!("{u} is not a unit modulo {m}")));
        }
        if exactnum::pow_mod(u, n, m) != 1 % m {
            return Err(Error::InvalidModule(format!(
                "{u}^{n} is not 1 modulo {m}"
            )));
        }
        Ok(TateModule { m, n, u })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    /// Norm element `sum_{j<n} u^j` reduced mod `m`.
    pub fn norm_multiplier(&self) -> u64 {
        let m = self.m;
        let mut acc = 0u64;
        let mut power = 1 % m;
        for _ in 0..self.n {
            acc = (acc + power) % m;
            power = mul_mod(power, self.u, m);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TateOrders {
    pub h0: u64,
    pub hm1: u64,
}

/// Dense bitset over `Z/m` for image counting.
struct Marks(Vec<u64>);

impl Marks {
    fn new(m: u64) -> Self {
        Marks(vec![0; (m as usize).div_ceil(64)])
    }

    /// Marks `x`; returns true when it was not marked before.
    #[inline]
    fn insert(&mut self, x: u64) -> bool {
        let (w, b) = ((x / 64) as usize, x % 64);
        let was = self.0[w] >> b & 1;
        self.0[w] |= 1 << b;
        was == 0
    }
}

/// Walks `x = 0, 1, ..., m-1` and returns (#kernel, #image) of `x -> a x`.
fn kernel_and_image(a: u64, m: u64) -> (u64, u64) {
    let mut marks = Marks::new(m);
    let (mut kernel, mut image) = (0u64, 0u64);
    let mut ax = 0u64;
    for _ in 0..m {
        if ax == 0 {
            kernel += 1;
        }
        if marks.insert(ax) {
            image += 1;
        }
        ax += a;
        if ax >= m {
            ax -= m;
        }
    }
    (kernel, image)
}

pub fn tate_orders(module: &TateModule) -> Result<TateOrders> {
    let m = module.m;
    if m > MODULE_CAP {
        return Err(Error::ModuleTooLarge { m, cap: MODULE_CAP });
    }
    let sigma_minus_one = (module.u + m - 1) % m;
    let norm = module.norm_multiplier();
    let (fixed, sigma_image) = kernel_and_image(sigma_minus_one, m);
    let (norm_kernel, norm_image) = kernel_and_image(norm, m);
    Ok(TateOrders {
        h0: fixed / norm_image,
        hm1: norm_kernel / sigma_image,
    })
}

/// `gcd(e, q^i - 1)`.
pub fn local_factor_closed_form(e: u64, q: u64, _f: u64, i: u64) -> u64 {
    gcd_with_power_minus_one(e, q, i)
}

/// The module `Z/(q^{if} - 1)` with a cyclic group of order `e f` acting
/// through Frobenius by `q^i`, inertia acting trivially.
pub fn residual_module(e: u64, q: u64, f: u64, i: u64) -> Result<TateModule> {
    let exp = u32::try_from(i * f).map_err(|_| Error::Overflow("q^(if)"))?;
    let m = q.checked_pow(exp).ok_or(Error::Overflow("q^(if)"))? - 1;
    TateModule::new(m, e * f, exactnum::pow_mod(q, i, m))
}

/// One point of the local genus-factor sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepPoint {
    pub q: u64,
    pub e: u64,
    pub f: u64,
    pub i: u64,
    pub m: u64,
    pub closed_form: u64,
    pub h0: u64,
    pub hm1: u64,
}

impl SweepPoint {
    pub fn agrees(&self) -> bool {
        self.h0 == self.closed_form && self.h0 == self.hm1
    }
}

/// Compares `tate_orders` on [`residual_module`] with the closed form over
/// all `q` in `qs`, `e <= max_e`, `f <= max_f`, `1 <= i <= max_i`, skipping
/// modules above [`MODULE_CAP`]. Output is sorted by `(q, i, f, e)`.
pub fn local_factor_sweep(
    qs: &[u64],
    max_e: u64,
    max_f: u64,
    max_i: u64,
    exec: Execution,
) -> Vec<SweepPoint> {
    let mut params = Vec::new();
    for &q in qs {
        for i in 1..=max_i {
            for f in 1..=max_f {
                let fits = (i * f) < 64
                    && q.checked_pow((i * f) as u32)
                        .is_some_and(|v| v - 1 <= MODULE_CAP);
                if !fits {
                    continue;
                }
                for e in 1..=max_e {
                    params.push((q, e, f, i));
                }
            }
        }
    }
    exec.map(&params, |&(q, e, f, i)| {
        let module = residual_module(e, q, f, i).expect("sweep modules are valid");
        let orders = tate_orders(&module).expect("sweep modules are under the cap");
        SweepPoint {
            q,
            e,
            f,
            i,
            m: module.m(),
            closed_form: local_factor_closed_form(e, q, f, i),
            h0: orders.h0,
            hm1: orders.hm1,
        }
    })
}
