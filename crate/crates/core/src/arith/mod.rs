//! Arithmetic functions and summand families.
//!
//! The `*_of` functions work on a factorization (ascending [`PrimePower`]s) and
//! are what the sum engine calls per integer. The `n`-taking wrappers factor by
//! trial division and are meant for one-off evaluation.

mod convolution;
mod weight;

use rug::ops::Pow;

use crate::error::{domain, Result};
use crate::factor::{gcd, trial_factorize, PrimePower};
use crate::rational::{Integer, Rational};

pub use convolution::{b_closed_form, b_transform, dirichlet_convolve, mobius_convolve, ArithFn};
pub use weight::{
    Lattice, MultiplicativeFn, R4Normalized, R8Normalized, SigmaKNormalized, UserMultiplicative,
    WeightFamily, WeightSpec,
};

pub fn mobius_of(f: &[PrimePower]) -> i8 {
    if f.iter().any(|pp| pp.e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn totient_of(f: &[PrimePower]) -> u64 {
    f.iter().map(|pp| pp.p.pow(pp.e - 1) * (pp.p - 1)).product()
}

/// `sigma_k` from the factorization: `prod (p^(k(e+1)) - 1) / (p^k - 1)`.
pub fn sigma_k_of(f: &[PrimePower], k: u32) -> Integer {
    let mut out = Integer::from(1);
    for pp in f {
        if k == 0 {
            out *= pp.e + 1;
        } else {
            let pk = Integer::from(pp.p).pow(k);
            let num = pk.clone().pow(pp.e + 1) - 1u32;
            out *= num / (pk - 1u32);
        }
    }
    out
}

/// `psi(n) = n * prod_{p | n} (1 + 1/p)`.
pub fn psi_of(f: &[PrimePower]) -> u128 {
    f.iter()
        .map(|pp| (pp.p as u128).pow(pp.e - 1) * (pp.p as u128 + 1))
        .product()
}

/// Ramanujan sum `c_n(m)` via Hölder's identity `mu(n/g) phi(n) / phi(n/g)`,
/// `g = gcd(n, m)`, evaluated prime by prime.
pub fn ramanujan_of(n_factors: &[PrimePower], m: u64) -> i64 {
    let mut c: i64 = 1;
    for pp in n_factors {
        let mut v = 0;
        let mut mm = m;
        while v < pp.e && mm.is_multiple_of(pp.p) {
            mm /= pp.p;
            v += 1;
        }
        let p = pp.p as i64;
        match pp.e - v {
            0 => c *= p.pow(pp.e - 1) * (p - 1),
            1 => c *= -p.pow(pp.e - 1),
            _ => return 0,
        }
    }
    c
}

/// All divisors, unsorted.
pub fn divisors_of(f: &[PrimePower]) -> Vec<u64> {
    let mut out = vec![1u64];
    for pp in f {
        let len = out.len();
        let mut q = 1;
        for _ in 0..pp.e {
            q *= pp.p;
            for i in 0..len {
                out.push(out[i] * q);
            }
        }
    }
    out
}

fn nonzero(n: u64, what: &str) -> Result<()> {
    if n == 0 {
        return domain(format!("{what}: n must be >= 1"));
    }
    Ok(())
}

/// `sum_{d | n} d^k`.
pub fn sigma_k(n: u64, k: u32) -> Result<Integer> {
    nonzero(n, "sigma_k")?;
    Ok(sigma_k_of(&trial_factorize(n), k))
}

pub fn dedekind_psi(n: u64) -> Result<u128> {
    nonzero(n, "dedekind_psi")?;
    Ok(psi_of(&trial_factorize(n)))
}

pub fn ramanujan_sum(n: u64, m: u64) -> Result<i64> {
    nonzero(n, "ramanujan_sum")?;
    if m == 0 {
        return domain("ramanujan_sum: m must be >= 1");
    }
    Ok(ramanujan_of(&trial_factorize(n), m))
}

/// Representations of `n` as an ordered sum of four squares,
/// `8 * sum_{d | n, 4 does not divide d} d`.
pub fn r4(n: u64) -> Result<u128> {
    nonzero(n, "r4")?;
    let s: u128 = divisors_of(&trial_factorize(n))
        .into_iter()
        .filter(|d| d % 4 != 0)
        .map(u128::from)
        .sum();
    Ok(8 * s)
}

/// Representations of `n` as an ordered sum of eight squares,
/// `16 * sum_{d | n} (-1)^(n - d) d^3`.
pub fn r8(n: u64) -> Result<Integer> {
    nonzero(n, "r8")?;
    let mut s = Integer::new();
    for d in divisors_of(&trial_factorize(n)) {
        let cube = Integer::from(d).pow(3);
        if (n - d).is_multiple_of(2) {
            s += cube;
        } else {
            s -= cube;
        }
    }
    Ok(s * 16u32)
}

/// Signed Bernoulli numbers; only `B_4` and `B_8` are needed.
pub fn bernoulli(index: u32) -> Option<Rational> {
    match index {
        4 | 8 => Some(Rational::from((-1, 30))),
        _ => None,
    }
}

/// Theta-series coefficient `r_Gamma(n) = -(4k / B_2k) sigma_(2k-1)(n)`.
pub fn theta_coeff(lattice: Lattice, n: u64) -> Result<Integer> {
    nonzero(n, "theta_coeff")?;
    Ok(theta_coeff_of(lattice, &trial_factorize(n)))
}

pub fn theta_coeff_of(lattice: Lattice, f: &[PrimePower]) -> Integer {
    let scale = -lattice.prefactor();
    debug_assert_eq!(*scale.denom(), 1);
    sigma_k_of(f, 2 * lattice.k() - 1) * scale.numer()
}

/// `phi(d e) = phi(d) phi(e) g / phi(g)` with `g = gcd(d, e)`, as an exact
/// check of both sides (cross-multiplied).
pub fn totient_product_identity_holds(d: u64, e: u64, phi: impl Fn(u64) -> u64) -> bool {
    let g = gcd(d, e);
    phi(d * e) as u128 * phi(g) as u128 == phi(d) as u128 * phi(e) as u128 * g as u128
}
