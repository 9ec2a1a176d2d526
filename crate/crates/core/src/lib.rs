//! Exact computations around genus formulae for motivic tame kernels and
//! even K-groups of cyclic prime-degree extensions of the rationals.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`]: primality, primitive roots, power-residue characters and
//!   Bernoulli numbers.
//! * [`localdata`]: ramification shapes of cyclic degree-`p` extensions of Q
//!   and their local invariants `e_v^{(i)} = gcd(e_v, q_v^i - 1)`.
//! * [`tatecoh`]: brute-force Tate cohomology of cyclic groups acting on
//!   `Z/m`, used as an oracle for the local genus factor.
//! * [`kummer`]: Kummer radicals over Q, Frobenius vectors and primitivity
//!   ranks.
//! * [`ktable`]: orders of `H^2_M(Z, Z(i))` and `K_{2i-2}(Z)`.
//! * [`genus`]: genus exponents, descent bounds and exact descent structure.
//! * [`classify`]: vanishing deciders for `p`-extensions of Q.
//! * [`quadforms`]: class numbers of quadratic fields, fundamental units,
//!   2-unit signatures and 2-regularity.
//!
//! Batch operations take an [`Execution`] mode. With the `parallel` feature
//! (on by default) [`Execution::Parallel`] fans out over rayon; without it,
//! every mode runs sequentially.

pub mod classify;
pub mod error;
pub mod exactnum;
pub mod genus;
pub mod ktable;
pub mod kummer;
pub mod localdata;
mod par;
pub mod quadforms;
pub mod tatecoh;

pub use error::{Error, Result};
pub use par::Execution;
