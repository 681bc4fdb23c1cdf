//! Prime factorization sources and per-integer classification.
//!
//! Two ways of getting at the factorization of `n` are provided: a dense
//! [`FactorTable`] of smallest prime factors, and a [`SegmentedSieve`] that
//! factors every integer of a window `[lo, hi)` using only the primes up to
//! `sqrt(hi)`. Everything downstream works from a slice of [`PrimePower`]s in
//! ascending prime order.

mod cache;
mod segment;
mod table;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use segment::{
    stream_segments, BasePrimes, Segment, SegmentStream, SegmentedSieve, DEFAULT_SEGMENT_SIZE,
    MAX_SEGMENT_SIZE,
};
pub use table::{FactorTable, MAX_TABLE_LIMIT};

/// `p^e` with `p` prime and `e >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
}

impl PrimePower {
    pub fn new(p: u64, e: u32) -> Self {
        PrimePower { p, e }
    }

    pub fn value(&self) -> u64 {
        self.p.pow(self.e)
    }
}

/// The smallest prime factor `p(n)`, with `p(1) = Infinity`.
///
/// `Infinity` compares greater than every prime, so `p(n) > y` holds for
/// `n = 1` and every `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SmallestPrime {
    Prime(u64),
    Infinity,
}

impl SmallestPrime {
    pub fn prime(&self) -> Option<u64> {
        match *self {
            SmallestPrime::Prime(p) => Some(p),
            SmallestPrime::Infinity => None,
        }
    }

    /// `p(n) > y`.
    pub fn exceeds(&self, y: u64) -> bool {
        match *self {
            SmallestPrime::Prime(p) => p > y,
            SmallestPrime::Infinity => true,
        }
    }

    pub fn of(factors: &[PrimePower]) -> Self {
        factors
            .first()
            .map_or(SmallestPrime::Infinity, |pp| SmallestPrime::Prime(pp.p))
    }
}

impl From<u64> for SmallestPrime {
    fn from(p: u64) -> Self {
        SmallestPrime::Prime(p)
    }
}

impl PartialEq<u64> for SmallestPrime {
    fn eq(&self, other: &u64) -> bool {
        *self == SmallestPrime::Prime(*other)
    }
}

impl PartialOrd<u64> for SmallestPrime {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(self.cmp(&SmallestPrime::Prime(*other)))
    }
}

impl fmt::Display for SmallestPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmallestPrime::Prime(p) => write!(f, "{p}"),
            SmallestPrime::Infinity => f.write_str("inf"),
        }
    }
}

/// Everything the sums need to know about a single integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NClassification {
    pub n: u64,
    /// Smallest prime factor, `Infinity` for `n = 1`.
    pub p: SmallestPrime,
    /// Largest prime factor, `1` for `n = 1`.
    pub big_p: u64,
    pub mu: i8,
    pub phi: u64,
    pub lambda: i8,
    /// Number of prime factors counted with multiplicity.
    pub omega_big: u32,
}

impl NClassification {
    /// Builds the record from the factorization of `n` (ascending primes).
    pub fn from_factors(n: u64, factors: &[PrimePower]) -> Self {
        let omega_big: u32 = factors.iter().map(|pp| pp.e).sum();
        let squarefree = factors.iter().all(|pp| pp.e == 1);
        let mu = if !squarefree {
            0
        } else if factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        };
        let phi = factors
            .iter()
            .map(|pp| pp.p.pow(pp.e - 1) * (pp.p - 1))
            .product();
        NClassification {
            n,
            p: SmallestPrime::of(factors),
            big_p: factors.last().map_or(1, |pp| pp.p),
            mu,
            phi,
            lambda: if omega_big.is_multiple_of(2) { 1 } else { -1 },
            omega_big,
        }
    }
}

/// A source of factorizations.
pub trait Factorizer {
    /// Prime factorization of `n >= 1` in ascending prime order (empty for 1).
    fn factorize(&self, n: u64) -> Result<Vec<PrimePower>>;
}

/// Classifies `n` using any factorization source.
pub fn classify<F: Factorizer + ?Sized>(n: u64, source: &F) -> Result<NClassification> {
    if n == 0 {
        return domain("classify: n must be >= 1");
    }
    let factors = source.factorize(n)?;
    Ok(NClassification::from_factors(n, &factors))
}

/// Factorization by trial division. Fine for the one-off evaluations of
/// moderately sized `n`; bulk work should go through a table or segment.
pub fn trial_factorize(mut n: u64) -> Vec<PrimePower> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in [2u64, 3] {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push(PrimePower::new(p, e));
        }
    }
    // 6k - 1, 6k + 1 wheel
    let mut d = 5u64;
    let mut step = 2;
    while d <= n / d {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push(PrimePower::new(d, e));
        }
        d += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push(PrimePower::new(n, 1));
    }
    out
}

/// Trial division as a [`Factorizer`].
#[derive(Debug, Clone, Copy, Default)]
pub struct TrialDivision;

impl Factorizer for TrialDivision {
    fn factorize(&self, n: u64) -> Result<Vec<PrimePower>> {
        if n == 0 {
            return domain("factorize: n must be >= 1");
        }
        Ok(trial_factorize(n))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Primes `<= limit` by a plain sieve of Eratosthenes.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}
