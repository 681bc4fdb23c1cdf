//! Sets of primes with known natural density.
//!
//! Every set here is, up to finitely many primes, a union of residue classes
//! modulo some period. That makes exact densities available for unions and
//! complements too: by Dirichlet's theorem each reduced class mod `K` holds a
//! `1/phi(K)` share of the primes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::factor::{gcd, trial_factorize, SegmentedSieve, SmallestPrime, DEFAULT_SEGMENT_SIZE};
use crate::rational::Rational;

/// Largest period for which union densities are computed by enumerating
/// residues.
pub const MAX_PROFILE_PERIOD: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeSet {
    All,
    /// `p = residue (mod modulus)`.
    Ap {
        modulus: u64,
        residue: u64,
    },
    /// Primes `p` not dividing `2d` with Kronecker symbol `(d | p) = 1`.
    KroneckerSplit {
        d: i64,
    },
    /// Primes unramified in `Q(zeta_k)` with Frobenius class `residue`; the
    /// AP class with the divisors of `modulus` removed.
    CyclotomicClass {
        modulus: u64,
        residue: u64,
    },
    Union(Vec<PrimeSet>),
    Complement(Box<PrimeSet>),
    FiniteAdjust {
        base: Box<PrimeSet>,
        added: BTreeSet<u64>,
        removed: BTreeSet<u64>,
    },
}

fn check_class(what: &str, k: u64, l: u64) -> Result<()> {
    if k == 0 || l == 0 || l > k {
        return Err(Error::Domain(format!(
            "{what}:{k},{l}: need k >= 1 and 1 <= l <= k"
        )));
    }
    if gcd(k, l) != 1 {
        return Err(Error::Domain(format!("{what}:{k},{l}: gcd(k,l) != 1")));
    }
    Ok(())
}

fn is_prime(n: u64) -> bool {
    let f = trial_factorize(n);
    f.len() == 1 && f[0].e == 1
}

impl PrimeSet {
    /// `S_{k,l} = { p : p = l (mod k) }`, density `1/phi(k)`.
    pub fn ap(k: u64, l: u64) -> Result<Self> {
        check_class("ap", k, l)?;
        Ok(PrimeSet::Ap {
            modulus: k,
            residue: l,
        })
    }

    pub fn cyclotomic(k: u64, l: u64) -> Result<Self> {
        check_class("cyclo", k, l)?;
        Ok(PrimeSet::CyclotomicClass {
            modulus: k,
            residue: l,
        })
    }

    /// Split primes of `Q(sqrt d)`. Squares (including `d = 0`) are rejected:
    /// their split set has density 1, not 1/2.
    pub fn kronecker(d: i64) -> Result<Self> {
        if d >= 0 && (d as u64).isqrt().pow(2) == d as u64 {
            return Err(Error::Domain(format!(
                "kronecker:{d}: d must not be a perfect square"
            )));
        }
        Ok(PrimeSet::KroneckerSplit { d })
    }

    pub fn union(parts: Vec<PrimeSet>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("union of no sets".into()));
        }
        Ok(PrimeSet::Union(parts))
    }

    pub fn complement(inner: PrimeSet) -> Self {
        PrimeSet::Complement(Box::new(inner))
    }

    pub fn finite_adjust(
        base: PrimeSet,
        added: impl IntoIterator<Item = u64>,
        removed: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        let added: BTreeSet<u64> = added.into_iter().collect();
        let removed: BTreeSet<u64> = removed.into_iter().collect();
        if let Some(p) = added.iter().chain(&removed).find(|&&p| !is_prime(p)) {
            return Err(Error::Domain(format!("adjust: {p} is not prime")));
        }
        if let Some(p) = added.intersection(&removed).next() {
            return Err(Error::Domain(format!("adjust: {p} both added and removed")));
        }
        Ok(PrimeSet::FiniteAdjust {
            base: Box::new(base),
            added,
            removed,
        })
    }

    /// Membership of a prime; the `p(1) = Infinity` sentinel is never a member.
    pub fn contains(&self, p: impl Into<SmallestPrime>) -> bool {
        match p.into() {
            SmallestPrime::Prime(p) => self.contains_prime(p),
            SmallestPrime::Infinity => false,
        }
    }

    /// Membership of `p`, which the caller guarantees is prime.
    pub fn contains_prime(&self, p: u64) -> bool {
        match self {
            PrimeSet::All => true,
            PrimeSet::Ap { modulus, residue } => p % modulus == residue % modulus,
            PrimeSet::CyclotomicClass { modulus, residue } => {
                modulus % p != 0 && p % modulus == residue % modulus
            }
            PrimeSet::KroneckerSplit { d } => {
                p != 2 && d.unsigned_abs() % p != 0 && kronecker(*d, p) == 1
            }
            PrimeSet::Union(parts) => parts.iter().any(|s| s.contains_prime(p)),
            PrimeSet::Complement(inner) => !inner.contains_prime(p),
            PrimeSet::FiniteAdjust {
                base,
                added,
                removed,
            } => {
                if removed.contains(&p) {
                    false
                } else {
                    added.contains(&p) || base.contains_prime(p)
                }
            }
        }
    }

    /// Exact natural density where it is known.
    pub fn analytic_density(&self) -> Option<Rational> {
        match self {
            PrimeSet::All => Some(Rational::from(1)),
            PrimeSet::Ap { modulus, .. } | PrimeSet::CyclotomicClass { modulus, .. } => {
                Some(Rational::from((1, totient(*modulus))))
            }
            PrimeSet::KroneckerSplit { .. } => Some(Rational::from((1, 2))),
            PrimeSet::Complement(inner) => inner.analytic_density().map(|d| 1 - d),
            PrimeSet::FiniteAdjust { base, .. } => base.analytic_density(),
            PrimeSet::Union(_) => self.profile_density(),
        }
    }

    /// A modulus `K` such that membership of all but finitely many primes is
    /// a function of `p mod K`.
    pub fn period(&self) -> Option<u64> {
        match self {
            PrimeSet::All => Some(1),
            PrimeSet::Ap { modulus, .. } | PrimeSet::CyclotomicClass { modulus, .. } => {
                Some(*modulus)
            }
            PrimeSet::KroneckerSplit { d } => d.unsigned_abs().checked_mul(4),
            PrimeSet::Complement(inner) => inner.period(),
            PrimeSet::FiniteAdjust { base, .. } => base.period(),
            PrimeSet::Union(parts) => parts.iter().try_fold(1u64, |acc, s| {
                let p = s.period()?;
                (acc / gcd(acc, p)).checked_mul(p)
            }),
        }
    }

    /// Membership of large primes `p = r (mod period)`, `r` a reduced residue.
    fn member_for_residue(&self, r: u64) -> bool {
        match self {
            PrimeSet::All => true,
            PrimeSet::Ap { modulus, residue } | PrimeSet::CyclotomicClass { modulus, residue } => {
                r % modulus == residue % modulus
            }
            PrimeSet::KroneckerSplit { d } => kronecker(*d, r) == 1,
            PrimeSet::Union(parts) => parts.iter().any(|s| s.member_for_residue(r)),
            PrimeSet::Complement(inner) => !inner.member_for_residue(r),
            PrimeSet::FiniteAdjust { base, .. } => base.member_for_residue(r),
        }
    }

    fn profile_density(&self) -> Option<Rational> {
        let k = self.period()?;
        if k > MAX_PROFILE_PERIOD {
            return None;
        }
        let (mut hit, mut total) = (0u64, 0u64);
        for r in 1..=k {
            if gcd(r, k) == 1 {
                total += 1;
                hit += self.member_for_residue(r) as u64;
            }
        }
        Some(Rational::from((hit, total)))
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

fn totient(n: u64) -> u64 {
    trial_factorize(n)
        .iter()
        .map(|pp| pp.p.pow(pp.e - 1) * (pp.p - 1))
        .product()
}

/// Kronecker symbol `(a | n)` for `n >= 0`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    const TAB: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    let mut a = a as i128;
    let mut b = n as i128;
    if b == 0 {
        return (a.abs() == 1) as i32;
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k = if v.is_multiple_of(2) {
        1
    } else {
        TAB[(a & 7) as usize]
    };
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= TAB[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// `pi_S(x)` and `pi(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityCount {
    pub in_set: u64,
    pub total: u64,
}

impl DensityCount {
    pub fn density(&self) -> f64 {
        self.in_set as f64 / self.total as f64
    }
}

/// Counts the primes up to `x` and those of them in `set`.
pub fn empirical_density(set: &PrimeSet, x: u64, sieve: &SegmentedSieve) -> Result<DensityCount> {
    if x < 2 {
        return Err(Error::Domain(format!(
            "empirical density needs x >= 2, got {x}"
        )));
    }
    if x >= sieve.bound() {
        return Err(Error::Domain(format!(
            "x = {x} beyond sieve bound {}",
            sieve.bound()
        )));
    }
    let mut count = DensityCount {
        in_set: 0,
        total: 0,
    };
    let mut lo = 2;
    while lo <= x {
        let hi = (lo + DEFAULT_SEGMENT_SIZE as u64).min(x + 1);
        for p in sieve.primes_in(lo, hi)? {
            count.total += 1;
            count.in_set += set.contains_prime(p) as u64;
        }
        lo = hi;
    }
    Ok(count)
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSet::All => f.write_str("all"),
            PrimeSet::Ap { modulus, residue } => write!(f, "ap:{modulus},{residue}"),
            PrimeSet::CyclotomicClass { modulus, residue } => {
                write!(f, "cyclo:{modulus},{residue}")
            }
            PrimeSet::KroneckerSplit { d } => write!(f, "kronecker:{d}"),
            PrimeSet::Complement(inner) => write!(f, "complement:({inner})"),
            PrimeSet::Union(parts) => {
                f.write_str("union:")?;
                for (i, s) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "({s})")?;
                }
                Ok(())
            }
            PrimeSet::FiniteAdjust {
                base,
                added,
                removed,
            } => {
                write!(f, "adjust:({base})")?;
                let list =
                    |s: &BTreeSet<u64>| s.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                if !added.is_empty() {
                    write!(f, "+{}", list(added))?;
                }
                if !removed.is_empty() {
                    write!(f, "-{}", list(removed))?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for PrimeSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let set = p.set()?;
        if p.pos != s.len() {
            return Err(p.error());
        }
        Ok(set)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self) -> Error {
        Error::Parse(format!(
            "bad set descriptor {:?} at offset {}",
            self.src, self.pos
        ))
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn int(&mut self) -> Result<i64> {
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && c == '-'))
            .count();
        let v = rest[..len].parse::<i64>().map_err(|_| self.error())?;
        self.pos += len;
        Ok(v)
    }

    fn uint(&mut self) -> Result<u64> {
        let v = self.int()?;
        u64::try_from(v).map_err(|_| self.error())
    }

    fn pair(&mut self) -> Result<(u64, u64)> {
        let k = self.uint()?;
        self.expect(",")?;
        Ok((k, self.uint()?))
    }

    fn nested(&mut self) -> Result<PrimeSet> {
        self.expect("(")?;
        let s = self.set()?;
        self.expect(")")?;
        Ok(s)
    }

    fn list(&mut self) -> Result<Vec<u64>> {
        let mut out = vec![self.uint()?];
        while self.eat(",") {
            out.push(self.uint()?);
        }
        Ok(out)
    }

    fn set(&mut self) -> Result<PrimeSet> {
        if self.eat("all") {
            Ok(PrimeSet::All)
        } else if self.eat("ap:") {
            let (k, l) = self.pair()?;
            PrimeSet::ap(k, l)
        } else if self.eat("cyclo:") {
            let (k, l) = self.pair()?;
            PrimeSet::cyclotomic(k, l)
        } else if self.eat("kronecker:") {
            PrimeSet::kronecker(self.int()?)
        } else if self.eat("complement:") {
            Ok(PrimeSet::complement(self.nested()?))
        } else if self.eat("union:") {
            let mut parts = vec![self.nested()?];
            while self.eat(";") {
                parts.push(self.nested()?);
            }
            PrimeSet::union(parts)
        } else if self.eat("adjust:") {
            let base = self.nested()?;
            let added = if self.eat("+") { self.list()? } else { vec![] };
            let removed = if self.eat("-") { self.list()? } else { vec![] };
            PrimeSet::finite_adjust(base, added, removed)
        } else {
            Err(self.error())
        }
    }
}
