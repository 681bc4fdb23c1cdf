//! Summand families `w(n)` whose restricted sums converge to prime densities.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rug::ops::Pow;

use crate::error::{Error, Result};
use crate::factor::PrimePower;
use crate::rational::{to_f64, Integer, Rational};

use super::{bernoulli, mobius_of, ramanujan_of};

/// Lattices whose theta series is an Eisenstein series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    /// `Gamma_8`, theta series `E_4`.
    E8,
    /// `Gamma_8 + Gamma_8` or `Gamma_16`, theta series `E_8`.
    E8PlusE8OrGamma16,
}

impl Lattice {
    pub fn dimension(self) -> u32 {
        match self {
            Lattice::E8 => 8,
            Lattice::E8PlusE8OrGamma16 => 16,
        }
    }

    /// `k = dim / 4`.
    pub fn k(self) -> u32 {
        self.dimension() / 4
    }

    /// `4k / B_2k`: -240 for E8, -480 for the rank-16 lattices.
    pub fn prefactor(self) -> Rational {
        let k = self.k();
        Rational::from(4 * k) / bernoulli(2 * k).expect("B_4 and B_8 are tabulated")
    }

    fn token(self) -> &'static str {
        match self {
            Lattice::E8 => "e8",
            Lattice::E8PlusE8OrGamma16 => "e8e8",
        }
    }
}

/// A multiplicative `g` given on prime powers, used as the denominator of
/// `mu(n) / g(n)`.
///
/// Only `g(p)` matters for the sums (`mu` kills non-squarefree `n`), but the
/// full prime-power interface lets the same object describe `g` itself.
/// `g(p)` must be nonzero for every prime.
pub trait MultiplicativeFn: Send + Sync + fmt::Debug {
    /// Token after `mu/g:` in a weight descriptor.
    fn descriptor(&self) -> String;

    fn at_prime_power(&self, p: u64, e: u32) -> Rational;

    fn at_prime_power_f64(&self, p: u64, e: u32) -> f64 {
        to_f64(&self.at_prime_power(p, e))
    }
}

/// `sigma_k(n) / n^(k-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigmaKNormalized {
    pub k: u32,
}

impl MultiplicativeFn for SigmaKNormalized {
    fn descriptor(&self) -> String {
        format!("sigma_k={}", self.k)
    }

    fn at_prime_power(&self, p: u64, e: u32) -> Rational {
        let mut s = Integer::new();
        let pk = Integer::from(p).pow(self.k);
        let mut term = Integer::from(1);
        for _ in 0..=e {
            s += &term;
            term *= &pk;
        }
        let den = Integer::from(p).pow(e * self.k.saturating_sub(1));
        let r = Rational::from((s, den));
        if self.k == 0 {
            // n^(k-1) = 1/n
            r * Integer::from(p).pow(e)
        } else {
            r
        }
    }

    fn at_prime_power_f64(&self, p: u64, e: u32) -> f64 {
        if e == 1 && self.k >= 1 {
            // (1 + p^k) / p^(k-1)
            let p = p as f64;
            return p + p.powi(1 - self.k as i32);
        }
        to_f64(&self.at_prime_power(p, e))
    }
}

/// `r_4(n) / 8 = sum_{d | n, 4 does not divide d} d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct R4Normalized;

impl MultiplicativeFn for R4Normalized {
    fn descriptor(&self) -> String {
        "r4".into()
    }

    fn at_prime_power(&self, p: u64, e: u32) -> Rational {
        if p == 2 {
            return Rational::from(3);
        }
        let s: Integer = (0..=e).map(|j| Integer::from(p).pow(j)).sum();
        Rational::from(s)
    }
}

/// `r_8(n) / (16 n^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct R8Normalized;

impl MultiplicativeFn for R8Normalized {
    fn descriptor(&self) -> String {
        "r8".into()
    }

    fn at_prime_power(&self, p: u64, e: u32) -> Rational {
        // r_8(p^e)/16 is sigma_3(p^e) for odd p; at p = 2 the divisor d = 1 is
        // the only one with n - d odd.
        let mut s: Integer = (0..=e).map(|j| Integer::from(p).pow(3 * j)).sum();
        if p == 2 {
            s -= 2u32;
        }
        Rational::from((s, Integer::from(p).pow(2 * e)))
    }
}

/// A closure-backed [`MultiplicativeFn`].
pub struct UserMultiplicative<F> {
    name: String,
    f: F,
}

impl<F> UserMultiplicative<F>
where
    F: Fn(u64, u32) -> Rational + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        UserMultiplicative {
            name: name.into(),
            f,
        }
    }
}

impl<F> fmt::Debug for UserMultiplicative<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserMultiplicative")
            .field("name", &self.name)
            .finish()
    }
}

impl<F> MultiplicativeFn for UserMultiplicative<F>
where
    F: Fn(u64, u32) -> Rational + Send + Sync,
{
    fn descriptor(&self) -> String {
        self.name.clone()
    }

    fn at_prime_power(&self, p: u64, e: u32) -> Rational {
        (self.f)(p, e)
    }
}

#[derive(Debug, Clone)]
pub enum WeightFamily {
    MuOverN,
    MuOverPhi,
    RamanujanOverPhi { m: u64 },
    RamanujanOverN { m: u64 },
    LambdaOverN,
    MuOverPsi,
    MuOverSigma,
    MuOverG(Arc<dyn MultiplicativeFn>),
    Theta(Lattice),
}

/// One summand family together with the constant that turns its partial sums
/// into an estimate of `delta(S)`.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    family: WeightFamily,
    alpha_hint: Option<Rational>,
}

impl WeightSpec {
    pub fn new(family: WeightFamily) -> Result<Self> {
        if let WeightFamily::RamanujanOverPhi { m } | WeightFamily::RamanujanOverN { m } = family {
            if m == 0 {
                return Err(Error::Domain("ramanujan weight needs m >= 1".into()));
            }
        }
        Ok(WeightSpec {
            family,
            alpha_hint: None,
        })
    }

    pub fn mu_over_n() -> Self {
        WeightSpec::new(WeightFamily::MuOverN).unwrap()
    }

    pub fn mu_over_phi() -> Self {
        WeightSpec::new(WeightFamily::MuOverPhi).unwrap()
    }

    pub fn lambda_over_n() -> Self {
        WeightSpec::new(WeightFamily::LambdaOverN).unwrap()
    }

    pub fn ramanujan_over_phi(m: u64) -> Result<Self> {
        WeightSpec::new(WeightFamily::RamanujanOverPhi { m })
    }

    pub fn ramanujan_over_n(m: u64) -> Result<Self> {
        WeightSpec::new(WeightFamily::RamanujanOverN { m })
    }

    pub fn theta(lattice: Lattice) -> Self {
        WeightSpec::new(WeightFamily::Theta(lattice)).unwrap()
    }

    pub fn mu_over_g(g: impl MultiplicativeFn + 'static) -> Self {
        WeightSpec::new(WeightFamily::MuOverG(Arc::new(g))).unwrap()
    }

    /// Records the decay exponent `alpha` of `|a(n)| << n^-alpha` for the
    /// underlying `a`. Documentation only; the sums do not use it.
    pub fn with_alpha_hint(mut self, alpha: Rational) -> Result<Self> {
        if alpha <= 0 {
            return Err(Error::Domain(format!(
                "alpha hint must be positive, got {alpha}"
            )));
        }
        self.alpha_hint = Some(alpha);
        Ok(self)
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn alpha_hint(&self) -> Option<&Rational> {
        self.alpha_hint.as_ref()
    }

    /// `1` for the Alladi-type families and `4k / B_2k` for theta weights.
    pub fn prefactor(&self) -> Rational {
        match &self.family {
            WeightFamily::Theta(l) => l.prefactor(),
            _ => Rational::from(1),
        }
    }

    /// Constant `C` with `C * sum_{n >= 2, p(n) in S} w(n) -> delta(S)`:
    /// `-1` for the Alladi-type families, `4k / B_2k` for theta weights.
    pub fn sum_coefficient(&self) -> Rational {
        match &self.family {
            WeightFamily::Theta(l) => l.prefactor(),
            _ => Rational::from(-1),
        }
    }

    /// Families whose denominator is `n`, as required by the duality theorem.
    pub fn is_over_n(&self) -> bool {
        matches!(
            self.family,
            WeightFamily::MuOverN | WeightFamily::LambdaOverN | WeightFamily::RamanujanOverN { .. }
        )
    }

    /// Cheap test for `w(n) = 0`, done before any set-membership work.
    #[inline]
    pub fn vanishes(&self, f: &[PrimePower]) -> bool {
        match self.family {
            WeightFamily::LambdaOverN => false,
            WeightFamily::RamanujanOverPhi { m } | WeightFamily::RamanujanOverN { m } => {
                ramanujan_vanishes(f, m)
            }
            _ => f.iter().any(|pp| pp.e > 1),
        }
    }

    /// `w(n)` in double precision; `0.0` where the weight vanishes.
    pub fn term_f64(&self, n: u64, f: &[PrimePower]) -> f64 {
        let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        match &self.family {
            WeightFamily::MuOverN => mobius_of(f) as f64 / n as f64,
            WeightFamily::LambdaOverN => {
                let omega: u32 = f.iter().map(|pp| pp.e).sum();
                sign(omega as usize) / n as f64
            }
            WeightFamily::RamanujanOverN { m } => ramanujan_of(f, *m) as f64 / n as f64,
            WeightFamily::RamanujanOverPhi { m } => {
                // c_n(m) / phi(n) = mu(n/g) / phi(n/g)
                let mut den: u64 = 1;
                let mut k = 0;
                for pp in f {
                    match pp.e - pp.e.min(valuation(*m, pp.p, pp.e)) {
                        0 => {}
                        1 => {
                            den *= pp.p - 1;
                            k += 1;
                        }
                        _ => return 0.0,
                    }
                }
                sign(k) / den as f64
            }
            _ if self.vanishes(f) => 0.0,
            WeightFamily::MuOverPhi => {
                sign(f.len()) / f.iter().map(|pp| pp.p - 1).product::<u64>() as f64
            }
            WeightFamily::MuOverPsi | WeightFamily::MuOverSigma => {
                sign(f.len()) / f.iter().map(|pp| pp.p as u128 + 1).product::<u128>() as f64
            }
            WeightFamily::MuOverG(g) => {
                sign(f.len())
                    / f.iter()
                        .map(|pp| g.at_prime_power_f64(pp.p, 1))
                        .product::<f64>()
            }
            WeightFamily::Theta(l) => {
                // mu(n) n^(2k-2) / r(n), r(n) = -(4k/B_2k) sigma_(2k-1)(n)
                let k = l.k() as i32;
                let scale = -to_f64(&l.prefactor());
                let prod: f64 = f
                    .iter()
                    .map(|pp| {
                        let p = pp.p as f64;
                        p.powi(2 * k - 2) / (1.0 + p.powi(2 * k - 1))
                    })
                    .product();
                sign(f.len()) * prod / scale
            }
        }
    }

    /// `w(n)` exactly; `None` where the weight vanishes.
    pub fn term_exact(&self, n: u64, f: &[PrimePower]) -> Option<Rational> {
        if self.vanishes(f) {
            return None;
        }
        let neg = |k: usize| k % 2 == 1;
        let signed = |r: Rational, k: usize| if neg(k) { -r } else { r };
        let out = match &self.family {
            WeightFamily::MuOverN => signed(Rational::from((1, n)), f.len()),
            WeightFamily::LambdaOverN => {
                let omega: u32 = f.iter().map(|pp| pp.e).sum();
                signed(Rational::from((1, n)), omega as usize)
            }
            WeightFamily::RamanujanOverN { m } => Rational::from((ramanujan_of(f, *m), n)),
            WeightFamily::RamanujanOverPhi { m } => {
                let mut den = Integer::from(1);
                let mut k = 0;
                for pp in f {
                    if pp.e > valuation(*m, pp.p, pp.e) {
                        den *= pp.p - 1;
                        k += 1;
                    }
                }
                signed(Rational::from((1, den)), k)
            }
            WeightFamily::MuOverPhi => {
                let den: Integer = f.iter().map(|pp| Integer::from(pp.p - 1)).product();
                signed(Rational::from((1, den)), f.len())
            }
            WeightFamily::MuOverPsi | WeightFamily::MuOverSigma => {
                let den: Integer = f.iter().map(|pp| Integer::from(pp.p) + 1u32).product();
                signed(Rational::from((1, den)), f.len())
            }
            WeightFamily::MuOverG(g) => {
                let den: Rational = f.iter().map(|pp| g.at_prime_power(pp.p, 1)).product();
                signed(den.recip(), f.len())
            }
            WeightFamily::Theta(l) => {
                let num = Integer::from(n).pow(2 * l.k() - 2);
                let den = super::theta_coeff_of(*l, f);
                signed(Rational::from((num, den)), f.len())
            }
        };
        Some(out)
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

/// `v_p(m)` capped at `cap`.
#[inline]
fn valuation(mut m: u64, p: u64, cap: u32) -> u32 {
    let mut v = 0;
    while v < cap && m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    v
}

/// `c_n(m) = 0` iff `n / gcd(n, m)` is not squarefree.
#[inline]
fn ramanujan_vanishes(f: &[PrimePower], m: u64) -> bool {
    f.iter()
        .any(|pp| pp.e >= 2 && pp.e - valuation(m, pp.p, pp.e) >= 2)
}

impl PartialEq for WeightSpec {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor() == other.descriptor() && self.alpha_hint == other.alpha_hint
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            WeightFamily::MuOverN => f.write_str("mu/n"),
            WeightFamily::MuOverPhi => f.write_str("mu/phi"),
            WeightFamily::LambdaOverN => f.write_str("lambda/n"),
            WeightFamily::MuOverPsi => f.write_str("mu/psi"),
            WeightFamily::MuOverSigma => f.write_str("mu/sigma"),
            WeightFamily::RamanujanOverN { m } => write!(f, "ramanujan/n:m={m}"),
            WeightFamily::RamanujanOverPhi { m } => write!(f, "ramanujan/phi:m={m}"),
            WeightFamily::Theta(l) => write!(f, "theta:{}", l.token()),
            WeightFamily::MuOverG(g) => write!(f, "mu/g:{}", g.descriptor()),
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Parse(format!("unknown weight descriptor {s:?}"));
        let param = |rest: &str, key: &str| -> Result<u64> {
            rest.strip_prefix(key)
                .and_then(|v| v.parse::<u64>().ok())
                .ok_or_else(unknown)
        };
        let family = match s.trim() {
            "mu/n" => WeightFamily::MuOverN,
            "mu/phi" => WeightFamily::MuOverPhi,
            "lambda/n" => WeightFamily::LambdaOverN,
            "mu/psi" => WeightFamily::MuOverPsi,
            "mu/sigma" => WeightFamily::MuOverSigma,
            "theta:e8" => WeightFamily::Theta(Lattice::E8),
            "theta:e8e8" => WeightFamily::Theta(Lattice::E8PlusE8OrGamma16),
            "mu/g:r4" => WeightFamily::MuOverG(Arc::new(R4Normalized)),
            "mu/g:r8" => WeightFamily::MuOverG(Arc::new(R8Normalized)),
            other => {
                if let Some(rest) = other.strip_prefix("ramanujan/n:") {
                    WeightFamily::RamanujanOverN {
                        m: param(rest, "m=")?,
                    }
                } else if let Some(rest) = other.strip_prefix("ramanujan/phi:") {
                    WeightFamily::RamanujanOverPhi {
                        m: param(rest, "m=")?,
                    }
                } else if let Some(rest) = other.strip_prefix("mu/g:") {
                    let k = param(rest, "sigma_k=")?;
                    let k = u32::try_from(k).map_err(|_| unknown())?;
                    WeightFamily::MuOverG(Arc::new(SigmaKNormalized { k }))
                } else {
                    return Err(unknown());
                }
            }
        };
        WeightSpec::new(family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{dedekind_psi, r4, r8, sigma_k, totient_of};
    use crate::factor::trial_factorize;

    #[test]
    fn theta_prefactors() {
        assert_eq!(Lattice::E8.prefactor(), -240);
        assert_eq!(Lattice::E8PlusE8OrGamma16.prefactor(), -480);
        assert_eq!(WeightSpec::theta(Lattice::E8).prefactor(), -240);
        assert_eq!(WeightSpec::mu_over_phi().prefactor(), 1);
    }

    #[test]
    fn descriptors_round_trip() {
        for d in [
            "mu/n",
            "mu/phi",
            "lambda/n",
            "mu/psi",
            "mu/sigma",
            "ramanujan/n:m=3",
            "ramanujan/phi:m=12",
            "theta:e8",
            "theta:e8e8",
            "mu/g:sigma_k=2",
            "mu/g:r4",
            "mu/g:r8",
        ] {
            let w: WeightSpec = d.parse().unwrap();
            assert_eq!(w.to_string(), d);
        }
    }

    #[test]
    fn bad_descriptors() {
        for d in [
            "",
            "mu",
            "mu/x",
            "ramanujan/phi:m=",
            "ramanujan/phi:k=3",
            "theta:leech",
            "mu/g:sigma_k=x",
        ] {
            let err = d.parse::<WeightSpec>().unwrap_err();
            assert!(err.to_string().contains(&format!("{d:?}")), "{err}");
        }
        assert!(matches!(
            "ramanujan/n:m=0".parse::<WeightSpec>(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn alpha_hint_must_be_positive() {
        assert!(WeightSpec::mu_over_phi()
            .with_alpha_hint(Rational::from(0))
            .is_err());
        let w = WeightSpec::mu_over_phi()
            .with_alpha_hint(Rational::from((1, 2)))
            .unwrap();
        assert_eq!(w.alpha_hint(), Some(&Rational::from((1, 2))));
    }

    /// Every family's exact term against a direct evaluation from the
    /// n-based function catalog, and the float term against the exact one.
    #[test]
    fn terms_against_direct_evaluation() {
        let weights: Vec<WeightSpec> = [
            "mu/n",
            "mu/phi",
            "lambda/n",
            "mu/psi",
            "mu/sigma",
            "ramanujan/n:m=12",
            "ramanujan/phi:m=12",
            "theta:e8",
            "theta:e8e8",
            "mu/g:sigma_k=3",
            "mu/g:r4",
            "mu/g:r8",
        ]
        .iter()
        .map(|d| d.parse().unwrap())
        .collect();

        for n in 2..3000u64 {
            let f = trial_factorize(n);
            let mu = crate::arith::mobius_of(&f) as i64;
            let omega: u32 = f.iter().map(|pp| pp.e).sum();
            for w in &weights {
                let direct: Rational = match w.family() {
                    WeightFamily::MuOverN => Rational::from((mu, n)),
                    WeightFamily::MuOverPhi => Rational::from((mu, totient_of(&f))),
                    WeightFamily::LambdaOverN => {
                        Rational::from((if omega.is_multiple_of(2) { 1 } else { -1 }, n))
                    }
                    WeightFamily::MuOverPsi => {
                        Rational::from((Integer::from(mu), Integer::from(dedekind_psi(n).unwrap())))
                    }
                    WeightFamily::MuOverSigma => {
                        if mu == 0 {
                            Rational::new()
                        } else {
                            Rational::from((Integer::from(mu), sigma_k(n, 1).unwrap()))
                        }
                    }
                    WeightFamily::RamanujanOverN { m } => {
                        Rational::from((crate::arith::ramanujan_sum(n, *m).unwrap(), n))
                    }
                    WeightFamily::RamanujanOverPhi { m } => Rational::from((
                        crate::arith::ramanujan_sum(n, *m).unwrap(),
                        totient_of(&f),
                    )),
                    WeightFamily::Theta(l) => Rational::from((
                        Integer::from(mu) * Integer::from(n).pow(2 * l.k() - 2),
                        crate::arith::theta_coeff(*l, n).unwrap(),
                    )),
                    WeightFamily::MuOverG(g) => {
                        if mu == 0 {
                            Rational::new()
                        } else {
                            let den: Rational = match g.descriptor().as_str() {
                                "r4" => Rational::from(r4(n).unwrap() / 8),
                                "r8" => Rational::from((
                                    r8(n).unwrap() / 16u32,
                                    Integer::from(n).pow(2),
                                )),
                                _ => Rational::from((
                                    sigma_k(n, 3).unwrap(),
                                    Integer::from(n).pow(2),
                                )),
                            };
                            Rational::from(mu) / den
                        }
                    }
                };
                let exact = w.term_exact(n, &f).unwrap_or_default();
                assert_eq!(exact, direct, "{w} at n = {n}");
                assert_eq!(w.vanishes(&f), direct == 0, "{w} at n = {n}");
                let fl = w.term_f64(n, &f);
                let ex = exact.to_f64();
                assert!(
                    (fl - ex).abs() <= 1e-15 * ex.abs(),
                    "{w} at n = {n}: {fl} vs {ex}"
                );
            }
        }
    }

    #[test]
    fn over_n_families() {
        assert!(WeightSpec::mu_over_n().is_over_n());
        assert!(WeightSpec::lambda_over_n().is_over_n());
        assert!(WeightSpec::ramanujan_over_n(4).unwrap().is_over_n());
        assert!(!WeightSpec::mu_over_phi().is_over_n());
        assert!(!WeightSpec::theta(Lattice::E8).is_over_n());
    }

    #[test]
    fn user_multiplicative_g() {
        let g = UserMultiplicative::new("psi", |p: u64, e: u32| {
            Rational::from(Integer::from(p).pow(e - 1) * (Integer::from(p) + 1u32))
        });
        let w = WeightSpec::mu_over_g(g);
        let sigma = WeightSpec::new(WeightFamily::MuOverSigma).unwrap();
        for n in 2..500 {
            let f = trial_factorize(n);
            assert_eq!(w.term_exact(n, &f), sigma.term_exact(n, &f));
        }
        assert_eq!(w.to_string(), "mu/g:psi");
    }
}
