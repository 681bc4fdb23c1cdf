use crate::error::{domain, Error, Result};
use crate::factor::{FactorTable, Factorizer, PrimePower};
use crate::rational::{Integer, Rational};

use super::{mobius_of, totient_of};

/// An arithmetic function tabulated on `1..=len`, exact rational values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithFn {
    values: Vec<Rational>,
}

impl ArithFn {
    pub fn from_fn(len: usize, mut f: impl FnMut(u64) -> Rational) -> Self {
        ArithFn {
            values: (1..=len as u64).map(&mut f).collect(),
        }
    }

    pub fn from_values(values: Vec<Rational>) -> Self {
        ArithFn { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `f(n)`, `1 <= n <= len`.
    pub fn get(&self, n: u64) -> &Rational {
        &self.values[n as usize - 1]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// The convolution identity: 1 at `n = 1`, 0 elsewhere.
    pub fn epsilon(len: usize) -> Self {
        Self::from_fn(len, |n| Rational::from((n == 1) as u32))
    }

    pub fn ones(len: usize) -> Self {
        Self::from_fn(len, |_| Rational::from(1))
    }

    pub fn identity(len: usize) -> Self {
        Self::from_fn(len, Rational::from)
    }

    pub fn mobius(len: usize) -> Self {
        let f = factorizations(len);
        Self::from_fn(len, |n| Rational::from(mobius_of(&f[n as usize - 1])))
    }

    pub fn totient(len: usize) -> Self {
        let f = factorizations(len);
        Self::from_fn(len, |n| Rational::from(totient_of(&f[n as usize - 1])))
    }
}

fn factorizations(len: usize) -> Vec<Vec<PrimePower>> {
    let table = FactorTable::build((len as u64).max(2)).expect("small table");
    (1..=len as u64)
        .map(|n| table.factorize(n).expect("within table"))
        .collect()
}

/// `(a * b)(n) = sum_{d | n} a(d) b(n/d)` for every `n <= len`.
pub fn dirichlet_convolve(a: &ArithFn, b: &ArithFn) -> Result<ArithFn> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "convolution of mismatched lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let len = a.len();
    let mut out = vec![Rational::new(); len];
    for d in 1..=len {
        let ad = &a.values[d - 1];
        if *ad == 0 {
            continue;
        }
        for q in 1..=len / d {
            let bq = &b.values[q - 1];
            if *bq != 0 {
                out[d * q - 1] += Rational::from(ad * bq);
            }
        }
    }
    Ok(ArithFn { values: out })
}

/// `mu * a`.
pub fn mobius_convolve(a: &ArithFn) -> ArithFn {
    dirichlet_convolve(&ArithFn::mobius(a.len()), a).expect("same length")
}

fn require_normalized(a: &ArithFn) -> Result<()> {
    if a.is_empty() || *a.get(1) != 1 {
        return domain("b-transform requires a(1) = 1");
    }
    Ok(())
}

/// `b(n) = sum_{d | n} (mu * a)(d) d / phi(d)`, straight from the definition.
///
/// With this `b`, `(mu * a)(n) / phi(n) = (mu * b)(n) / n`.
pub fn b_transform(a: &ArithFn) -> Result<ArithFn> {
    require_normalized(a)?;
    let len = a.len();
    let c = mobius_convolve(a);
    let phi = ArithFn::totient(len);
    let h = ArithFn::from_fn(len, |d| (c.get(d) * Rational::from(d)) / phi.get(d));
    dirichlet_convolve(&h, &ArithFn::ones(len))
}

/// `b(n)` from its closed form over unitary divisors:
///
/// `b(n) = sum_{e | n, (e, n/e) = 1} (e / phi(e)) a(e) prod_{p | n/e} 1 / (1 - p)`.
pub fn b_closed_form(a: &ArithFn) -> Result<ArithFn> {
    require_normalized(a)?;
    let len = a.len();
    let facts = factorizations(len);
    Ok(ArithFn::from_fn(len, |n| {
        let f = &facts[n as usize - 1];
        let mut total = Rational::new();
        // a unitary divisor takes each prime power of n entirely or not at all
        for mask in 0u32..(1 << f.len()) {
            let mut e: u64 = 1;
            let mut phi_e: u64 = 1;
            let mut rest = Integer::from(1);
            for (i, pp) in f.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    e *= pp.value();
                    phi_e *= pp.p.pow(pp.e - 1) * (pp.p - 1);
                } else {
                    rest *= 1 - pp.p as i64;
                }
            }
            let ae = a.get(e);
            if *ae == 0 {
                continue;
            }
            let weight = Rational::from((Integer::from(e), Integer::from(phi_e) * rest));
            total += weight * ae;
        }
        total
    }))
}
