//! Numerical verification of Alladi-type density formulas.
//!
//! For a set of primes `S` with natural density `delta(S)` and a summand
//! family `w(n)` built from the Möbius function, the partial sums
//! `-sum_{2 <= n <= x, p(n) in S} w(n)` (with `p(n)` the smallest prime
//! factor of `n`) tend to `delta(S)`. This crate evaluates those sums to
//! `x ~ 10^9` in floating point and to `x = 10^6` in exact rationals, together
//! with the largest-prime-factor counts on the other side of the duality, the
//! remainder sums `R(x, y)`, and the arithmetic identities underneath.

pub mod arith;
pub mod cli;
pub mod engine;
pub mod error;
pub mod factor;
pub mod oracle;
pub mod prime_set;
pub mod rational;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
