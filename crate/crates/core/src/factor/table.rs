use crate::error::{Error, Result};

use super::{Factorizer, PrimePower};

/// Largest limit accepted by [`FactorTable::build`]; entries are 4 bytes wide.
pub const MAX_TABLE_LIMIT: u64 = u32::MAX as u64;

/// Dense smallest-prime-factor table for `2 <= n <= limit`.
///
/// Memory is `4 * (limit + 1)` bytes, so the `u32` ceiling costs 16 GiB;
/// beyond a few times 10^8 use [`super::SegmentedSieve`] instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorTable {
    limit: u64,
    spf: Vec<u32>,
}

impl FactorTable {
    /// Linear sieve over `[2, limit]`.
    pub fn build(limit: u64) -> Result<Self> {
        if !(2..=MAX_TABLE_LIMIT).contains(&limit) {
            return Err(Error::Capacity(format!(
                "factor table limit {limit} outside [2, {MAX_TABLE_LIMIT}]"
            )));
        }
        let len = limit as usize + 1;
        let mut spf: Vec<u32> = Vec::new();
        spf.try_reserve_exact(len)
            .map_err(|e| Error::Capacity(format!("factor table of {len} entries: {e}")))?;
        spf.resize(len, 0);

        let mut primes: Vec<u32> = Vec::new();
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i as u64 * p as u64;
                if p > si || m > limit {
                    break;
                }
                spf[m as usize] = p;
            }
        }
        Ok(FactorTable { limit, spf })
    }

    pub(crate) fn from_raw(limit: u64, spf: Vec<u32>) -> Self {
        FactorTable { limit, spf }
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.spf
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, or `None` outside `[2, limit]`.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            return None;
        }
        Some(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.spf(n) == Some(n)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.spf[n as usize] as u64 == n)
    }
}

impl Factorizer for FactorTable {
    fn factorize(&self, mut n: u64) -> Result<Vec<PrimePower>> {
        if n == 0 || n > self.limit {
            return Err(Error::Domain(format!(
                "n = {n} outside factor table range [1, {}]",
                self.limit
            )));
        }
        let mut out: Vec<PrimePower> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            n /= p;
            match out.last_mut() {
                Some(last) if last.p == p => last.e += 1,
                _ => out.push(PrimePower::new(p, 1)),
            }
        }
        Ok(out)
    }
}
