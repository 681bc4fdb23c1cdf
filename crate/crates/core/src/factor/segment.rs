use crate::error::{domain, Error, Result};

use super::{small_primes, Factorizer, NClassification, PrimePower};

/// 2^20 integers per segment.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 20;

/// Factor offsets are stored as `u32`; at most 15 distinct primes divide a
/// `u64`, so this keeps the offset table from overflowing.
pub const MAX_SEGMENT_SIZE: usize = 1 << 28;

/// Primes up to `sqrt(bound)`, enough to factor any `n < bound`.
#[derive(Debug, Clone)]
pub struct BasePrimes {
    bound: u64,
    primes: Vec<u64>,
}

impl BasePrimes {
    /// Base primes sufficient for every `n < bound`.
    pub fn new(bound: u64) -> Self {
        let root = bound.saturating_sub(1).isqrt();
        BasePrimes {
            bound,
            primes: small_primes(root),
        }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
}

impl Factorizer for BasePrimes {
    fn factorize(&self, mut n: u64) -> Result<Vec<PrimePower>> {
        if n == 0 {
            return domain("factorize: n must be >= 1");
        }
        if n >= self.bound {
            return Err(Error::Domain(format!(
                "n = {n} not below base-prime bound {}",
                self.bound
            )));
        }
        let mut out = Vec::new();
        for &p in &self.primes {
            if p * p > n {
                break;
            }
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push(PrimePower::new(p, e));
            }
        }
        if n > 1 {
            out.push(PrimePower::new(n, 1));
        }
        Ok(out)
    }
}

/// Factorizations of every integer in `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct Segment {
    lo: u64,
    hi: u64,
    offsets: Vec<u32>,
    factors: Vec<PrimePower>,
}

impl Segment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    /// Factorization of `lo + i`, ascending primes.
    #[inline]
    pub fn factors_at(&self, i: usize) -> &[PrimePower] {
        &self.factors[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn factors_of(&self, n: u64) -> Option<&[PrimePower]> {
        (self.lo..self.hi)
            .contains(&n)
            .then(|| self.factors_at((n - self.lo) as usize))
    }

    pub fn record(&self, n: u64) -> Option<NClassification> {
        self.factors_of(n)
            .map(|f| NClassification::from_factors(n, f))
    }

    /// `(n, factors of n)` in ascending `n`.
    pub fn numbers(&self) -> impl Iterator<Item = (u64, &[PrimePower])> + '_ {
        (0..self.len()).map(move |i| (self.lo + i as u64, self.factors_at(i)))
    }

    pub fn records(&self) -> impl Iterator<Item = NClassification> + '_ {
        self.numbers()
            .map(|(n, f)| NClassification::from_factors(n, f))
    }
}

/// Factors windows of `[1, bound)` with `O(window + pi(sqrt(bound)))` memory.
///
/// Each window divides out every base prime, then whatever is left over is
/// the single prime factor above `sqrt(bound)`. Segments are independent and
/// the sieve itself is immutable, so windows can be built on any thread.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    base: BasePrimes,
}

impl SegmentedSieve {
    /// A sieve able to factor every `n < bound`.
    pub fn new(bound: u64) -> Self {
        SegmentedSieve {
            base: BasePrimes::new(bound),
        }
    }

    pub fn bound(&self) -> u64 {
        self.base.bound
    }

    pub fn base_primes(&self) -> &BasePrimes {
        &self.base
    }

    pub fn segment(&self, lo: u64, hi: u64) -> Result<Segment> {
        if lo == 0 || lo > hi {
            return Err(Error::Domain(format!("bad segment bounds [{lo}, {hi})")));
        }
        if hi > self.bound() {
            return Err(Error::Domain(format!(
                "segment end {hi} beyond sieve bound {}",
                self.bound()
            )));
        }
        let len = (hi - lo) as usize;
        if len > MAX_SEGMENT_SIZE {
            return Err(Error::Capacity(format!(
                "segment of {len} integers exceeds {MAX_SEGMENT_SIZE}"
            )));
        }
        let last = hi.saturating_sub(1);
        let primes: Vec<u64> = self
            .base
            .primes
            .iter()
            .copied()
            .take_while(|&p| p * p <= last)
            .collect();

        // Pass 1: upper bound on the factor count of each n (one slot per
        // base prime dividing it, plus one for a possible large prime).
        let mut offsets = vec![0u32; len + 1];
        for &p in &primes {
            let mut m = first_multiple(lo, p);
            while m < hi {
                offsets[(m - lo) as usize + 1] += 1;
                m += p;
            }
        }
        for i in 0..len {
            offsets[i + 1] += offsets[i] + 1;
        }

        // Pass 2: divide out base primes, filling slots in ascending p.
        let mut rem: Vec<u64> = (lo..hi).collect();
        let mut fill: Vec<u32> = offsets[..len].to_vec();
        let mut factors = vec![PrimePower::new(0, 0); offsets[len] as usize];
        for &p in &primes {
            let mut m = first_multiple(lo, p);
            while m < hi {
                let i = (m - lo) as usize;
                let mut r = rem[i] / p;
                let mut e = 1;
                while r.is_multiple_of(p) {
                    r /= p;
                    e += 1;
                }
                rem[i] = r;
                factors[fill[i] as usize] = PrimePower::new(p, e);
                fill[i] += 1;
                m += p;
            }
        }

        // Residual prime, then squeeze out the unused slots.
        let mut write = 0usize;
        for i in 0..len {
            let start = offsets[i] as usize;
            let end = fill[i] as usize;
            offsets[i] = write as u32;
            factors.copy_within(start..end, write);
            write += end - start;
            if rem[i] > 1 {
                factors[write] = PrimePower::new(rem[i], 1);
                write += 1;
            }
        }
        offsets[len] = write as u32;
        factors.truncate(write);
        factors.shrink_to_fit();

        Ok(Segment {
            lo,
            hi,
            offsets,
            factors,
        })
    }

    /// Primes in `[lo, hi)` by marking composites with the base primes.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        if lo > hi || hi > self.bound() {
            return Err(Error::Domain(format!("bad prime window [{lo}, {hi})")));
        }
        let lo = lo.max(2);
        if lo >= hi {
            return Ok(Vec::new());
        }
        let mut is_prime = vec![true; (hi - lo) as usize];
        for &p in &self.base.primes {
            if p * p >= hi {
                break;
            }
            let mut m = first_multiple(lo, p).max(p * p);
            while m < hi {
                is_prime[(m - lo) as usize] = false;
                m += p;
            }
        }
        Ok(is_prime
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| lo + i as u64)
            .collect())
    }
}

fn first_multiple(lo: u64, p: u64) -> u64 {
    lo.div_ceil(p) * p
}

/// Lazy ascending sequence of segments partitioning `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct SegmentStream {
    sieve: SegmentedSieve,
    next: u64,
    hi: u64,
    size: u64,
}

impl SegmentStream {
    pub fn new(lo: u64, hi: u64, segment_size: usize) -> Result<Self> {
        if lo == 0 || lo >= hi {
            return Err(Error::Domain(format!(
                "stream bounds must satisfy 1 <= lo < hi, got [{lo}, {hi})"
            )));
        }
        if segment_size == 0 || segment_size > MAX_SEGMENT_SIZE {
            return Err(Error::Domain(format!(
                "segment size {segment_size} outside [1, {MAX_SEGMENT_SIZE}]"
            )));
        }
        Ok(SegmentStream {
            sieve: SegmentedSieve::new(hi),
            next: lo,
            hi,
            size: segment_size as u64,
        })
    }
}

impl Iterator for SegmentStream {
    type Item = Segment;

    fn next(&mut self) -> Option<Segment> {
        if self.next >= self.hi {
            return None;
        }
        let end = (self.next + self.size).min(self.hi);
        let seg = self
            .sieve
            .segment(self.next, end)
            .expect("stream bounds validated at construction");
        self.next = end;
        Some(seg)
    }
}

/// `stream_segments(lo, hi, segment_size)`.
pub fn stream_segments(lo: u64, hi: u64, segment_size: usize) -> Result<SegmentStream> {
    SegmentStream::new(lo, hi, segment_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{trial_factorize, SmallestPrime};

    #[test]
    fn small_stream_splits_in_two() {
        let segs: Vec<_> = stream_segments(1, 11, 5).unwrap().collect();
        assert_eq!(segs.len(), 2);
        assert_eq!((segs[0].lo(), segs[0].hi()), (1, 6));
        assert_eq!((segs[1].lo(), segs[1].hi()), (6, 11));
        let r9 = segs[1].record(9).unwrap();
        assert_eq!(r9.p, 3);
        assert_eq!((r9.mu, r9.phi), (0, 6));
    }

    #[test]
    fn single_sentinel_record() {
        let segs: Vec<_> = stream_segments(1, 2, 100).unwrap().collect();
        assert_eq!(segs.len(), 1);
        let recs: Vec<_> = segs[0].records().collect();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].n, 1);
        assert_eq!(recs[0].p, SmallestPrime::Infinity);
        assert_eq!(recs[0].big_p, 1);
    }

    #[test]
    fn million_singletons() {
        let segs: Vec<_> = stream_segments(1_000_000, 1_000_003, 1).unwrap().collect();
        assert_eq!(segs.len(), 3);
        assert!(segs.iter().all(|s| s.len() == 1));
        let r = segs[0].record(1_000_000).unwrap();
        assert_eq!(r.p, 2);
        assert_eq!(r.big_p, 5);
    }

    #[test]
    fn segment_factors_match_trial_division() {
        let sieve = SegmentedSieve::new(1 << 40);
        for lo in [1u64, 2, 97, 999_983, (1 << 40) - 5000] {
            let seg = sieve.segment(lo, lo + 3000).unwrap();
            for (n, f) in seg.numbers() {
                assert_eq!(f, &trial_factorize(n)[..], "n = {n}");
            }
        }
    }

    #[test]
    fn primes_in_window() {
        let sieve = SegmentedSieve::new(200);
        assert_eq!(
            sieve.primes_in(1, 30).unwrap(),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
        assert_eq!(
            sieve.primes_in(90, 110).unwrap(),
            vec![97, 101, 103, 107, 109]
        );
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(stream_segments(0, 10, 4).is_err());
        assert!(stream_segments(5, 5, 4).is_err());
        assert!(stream_segments(1, 10, 0).is_err());
        let sieve = SegmentedSieve::new(100);
        assert!(sieve.segment(50, 101).is_err());
    }
}
