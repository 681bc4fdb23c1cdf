//! Exact rationals, backed by GMP through `rug`.

pub use rug::{Integer, Rational};
// Declared directly to select the system GMP build.
use gmp_mpfr_sys as _;

use crate::error::{Error, Result};

/// `"num/den"`, always with an explicit denominator.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer; the result is reduced.
pub fn parse_fraction(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num = Integer::from_str_radix(num, 10).map_err(|_| bad())?;
    let den = Integer::from_str_radix(den, 10).map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational::from((num, den)))
}

/// Nearest `f64`, ties to even. `Rational::to_f64` truncates instead.
pub fn to_f64(r: &Rational) -> f64 {
    if *r.numer() == 0 {
        return 0.0;
    }
    let num = Integer::from(r.numer().abs_ref());
    let den = r.denom();
    // scale so the quotient has 64..=65 significant bits
    let shift = 64 + den.significant_bits() as i64 - num.significant_bits() as i64;
    let (n, d) = if shift >= 0 {
        (num << shift as u32, den.clone())
    } else {
        (num, Integer::from(den << (-shift) as u32))
    };
    let (q, rem) = n.div_rem(d);
    // a sticky bit far below the rounding position keeps ties honest
    let q = q.to_u128().expect("65-bit quotient") | (rem != 0) as u128;
    let mut out = q as f64;
    let mut e = -shift;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        out *= 2f64.powi(step as i32);
        e -= step;
    }
    if *r.numer() < 0 {
        -out
    } else {
        out
    }
}

pub fn ratio(num: i64, den: u64) -> Rational {
    Rational::from((Integer::from(num), Integer::from(den)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings() {
        assert_eq!(to_fraction_string(&ratio(71, 105)), "71/105");
        assert_eq!(to_fraction_string(&ratio(-4, 2)), "-2/1");
        assert_eq!(parse_fraction("6/-4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_fraction("7").unwrap(), ratio(7, 1));
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("x/2").is_err());
    }

    #[test]
    fn rounds_to_nearest() {
        assert_eq!(to_f64(&ratio(71, 105)), 71.0 / 105.0);
        assert_eq!(to_f64(&ratio(-1, 3)), -1.0 / 3.0);
        assert_eq!(to_f64(&ratio(0, 3)), 0.0);
        assert_eq!(to_f64(&ratio(1 << 60, 1)), (1u64 << 60) as f64);
        for p in 1..300i64 {
            for q in 1..300u64 {
                assert_eq!(to_f64(&ratio(p, q)), p as f64 / q as f64, "{p}/{q}");
            }
        }
        // 2^-1100 and a huge numerator over a huge denominator
        let tiny = Rational::from((Integer::from(1), Integer::from(1) << 1100u32));
        assert_eq!(to_f64(&tiny), 0.0);
        let big = Rational::from((Integer::from(3) << 5000u32, Integer::from(7) << 5000u32));
        assert_eq!(to_f64(&big), 3.0 / 7.0);
    }
}
