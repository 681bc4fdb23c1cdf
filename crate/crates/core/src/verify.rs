//! Identity suites run by `alladi verify`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{
    b_closed_form, b_transform, mobius_convolve, mobius_of, r4, r8, ramanujan_of, sigma_k,
    theta_coeff, totient_product_identity_holds, ArithFn, Lattice, WeightSpec,
};
use crate::engine::{cross_validate, CompensatedSum, Mode, SumEngine};
use crate::error::{Error, Result};
use crate::factor::{classify, stream_segments, FactorTable, Factorizer, DEFAULT_SEGMENT_SIZE};
use crate::oracle;
use crate::prime_set::PrimeSet;
use crate::rational::Rational;

pub const SUITES: [&str; 8] = [
    "holder",
    "phi-gcd",
    "ramads",
    "r4r8",
    "theta",
    "btransform",
    "rsum",
    "crossval",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        SuiteOutcome {
            name,
            passed,
            detail,
        }
    }
}

pub fn run_suite(name: &str, engine: &SumEngine) -> Result<SuiteOutcome> {
    match name {
        "holder" => holder(),
        "phi-gcd" => phi_gcd(),
        "ramads" => ramads(),
        "r4r8" => r4r8(),
        "theta" => theta(),
        "btransform" => btransform(),
        "rsum" => rsum(engine),
        "crossval" => crossval(engine),
        _ => Err(Error::Parse(format!(
            "unknown suite \"{name}\" (expected one of {})",
            SUITES.join(", ")
        ))),
    }
}

/// Hölder's identity against the defining exponential sum, and `c_n(1) = mu(n)`.
fn holder() -> Result<SuiteOutcome> {
    let table = FactorTable::build(2000)?;
    let mut bad = Vec::new();
    for n in 1..=2000u64 {
        let f = table.factorize(n)?;
        for m in [1, 2, 3, 4, 12] {
            let (re, im) = oracle::ramanujan_exp_sum(n, m);
            if im.abs() >= 1e-6 || re.round() as i64 != ramanujan_of(&f, m) {
                bad.push((n, m));
            }
        }
    }
    let mut mu_bad = 0u64;
    for seg in stream_segments(1, 1_000_001, DEFAULT_SEGMENT_SIZE)? {
        for (_, f) in seg.numbers() {
            mu_bad += (ramanujan_of(f, 1) != mobius_of(f) as i64) as u64;
        }
    }
    Ok(SuiteOutcome::new(
        "holder",
        bad.is_empty() && mu_bad == 0,
        format!(
            "{} exp-sum mismatches (n <= 2000), {mu_bad} c_n(1) != mu(n) (n <= 10^6)",
            bad.len()
        ),
    ))
}

fn phi_gcd() -> Result<SuiteOutcome> {
    let table = FactorTable::build(250_000)?;
    let phi = |n: u64| classify(n, &table).map(|c| c.phi).unwrap_or(0);
    let bad = (1..=500u64)
        .flat_map(|d| (1..=500u64).map(move |e| (d, e)))
        .filter(|&(d, e)| !totient_product_identity_holds(d, e, phi))
        .count();
    Ok(SuiteOutcome::new(
        "phi-gcd",
        bad == 0,
        format!("{bad} failures of phi(de) = phi(d)phi(e)g/phi(g) for d, e <= 500"),
    ))
}

/// `sum_{n <= x} c_n(m) / n^2` for each `m`, in compensated float arithmetic.
pub fn ramanujan_dirichlet_partial(x: u64, ms: &[u64]) -> Result<Vec<f64>> {
    let mut sums = vec![CompensatedSum::new(); ms.len()];
    for seg in stream_segments(1, x + 1, DEFAULT_SEGMENT_SIZE)? {
        for (n, f) in seg.numbers() {
            let n2 = (n as f64) * (n as f64);
            for (s, &m) in sums.iter_mut().zip(ms) {
                let c = ramanujan_of(f, m);
                if c != 0 {
                    s.add(c as f64 / n2);
                }
            }
        }
    }
    Ok(sums.iter().map(CompensatedSum::value).collect())
}

fn ramads() -> Result<SuiteOutcome> {
    let ms = [1, 2, 6];
    let got = ramanujan_dirichlet_partial(1_000_000, &ms)?;
    let mut worst: f64 = 0.0;
    for (&m, g) in ms.iter().zip(got) {
        let sigma_minus_1 = crate::rational::to_f64(&Rational::from((sigma_k(m, 1)?, m)));
        worst = worst.max((g - sigma_minus_1 * 6.0 / (PI * PI)).abs());
    }
    Ok(SuiteOutcome::new(
        "ramads",
        worst < 1e-4,
        format!("max |sum c_n(m)/n^2 - sigma_-1(m)/zeta(2)| = {worst:.3e} at x = 10^6"),
    ))
}

fn r4r8() -> Result<SuiteOutcome> {
    let b4 = oracle::square_reps(4, 200);
    let b8 = oracle::square_reps(8, 200);
    let mut bad = 0;
    for n in 1..=200u64 {
        bad += (r4(n)? != b4[n as usize]) as u32;
        bad += (r8(n)? != b8[n as usize]) as u32;
    }
    Ok(SuiteOutcome::new(
        "r4r8",
        bad == 0,
        format!("{bad} mismatches against enumeration for n <= 200"),
    ))
}

fn theta() -> Result<SuiteOutcome> {
    let e8 = oracle::e8_counts(3);
    let doubled = oracle::theta_square(&e8);
    let mut bad = 0;
    for n in 1..=3u64 {
        bad += (theta_coeff(Lattice::E8, n)? != e8[n as usize]) as u32;
        bad += (theta_coeff(Lattice::E8PlusE8OrGamma16, n)? != doubled[n as usize]) as u32;
    }
    Ok(SuiteOutcome::new(
        "theta",
        bad == 0,
        format!(
            "E8 shells {:?} by enumeration, {bad} mismatches (E8 and E8+E8, n <= 3)",
            &e8[1..]
        ),
    ))
}

/// `a(1) = 1` and `a(n) = r / n^2` for `n >= 2`, with `r` a random rational in
/// `[-1, 1]` of denominator at most 8.
pub fn random_decaying(len: usize, seed: u64) -> ArithFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ArithFn::from_fn(len, |n| {
        if n == 1 {
            return Rational::from(1);
        }
        let q: u64 = rng.gen_range(1..=8);
        let p: i64 = rng.gen_range(-(q as i64)..=q as i64);
        Rational::from((p, q * n * n))
    })
}

/// Closed form equals definition, and `(mu*a)(n)/phi(n) = (mu*b)(n)/n`.
pub fn check_b_transform(a: &ArithFn) -> Result<(usize, usize)> {
    let b = b_transform(a)?;
    let closed = b_closed_form(a)?;
    let form_bad = b
        .values()
        .iter()
        .zip(closed.values())
        .filter(|(x, y)| x != y)
        .count();
    let lhs = mobius_convolve(a);
    let rhs = mobius_convolve(&b);
    let phi = ArithFn::totient(a.len());
    let inv_bad = (1..=a.len() as u64)
        .filter(|&n| Rational::from(lhs.get(n) / phi.get(n)) != (rhs.get(n) / Rational::from(n)))
        .count();
    Ok((form_bad, inv_bad))
}

fn btransform() -> Result<SuiteOutcome> {
    let n = 5000;
    let (f1, i1) = check_b_transform(&ArithFn::epsilon(n))?;
    let (f2, i2) = check_b_transform(&random_decaying(n, 0x5eed))?;
    let bad = f1 + i1 + f2 + i2;
    Ok(SuiteOutcome::new(
        "btransform",
        bad == 0,
        format!(
            "{bad} mismatches (closed form and inversion, a = eps and random decaying a, n <= {n})"
        ),
    ))
}

pub const R_GRID_X: [u64; 7] = [1, 10, 100, 1000, 10_000, 100_000, 1_000_000];
pub const R_GRID_Y: [u64; 7] = [1, 2, 3, 5, 10, 100, 1000];

fn rsum(engine: &SumEngine) -> Result<SuiteOutcome> {
    let grid = engine.r_grid(&R_GRID_X, &R_GRID_Y, Mode::Exact)?;
    let violations = grid.iter().flatten().filter(|q| !q.within_bound()).count();
    // |R(10^j, 1)| for j = 3..=6
    let r1: Vec<f64> = grid[3..]
        .iter()
        .map(|row| row[0].value.to_f64().abs())
        .collect();
    let decays = r1.windows(2).all(|w| w[1] < w[0]);
    Ok(SuiteOutcome::new(
        "rsum",
        violations == 0 && decays,
        format!(
            "{violations} violations of |R(x,y)| <= 1 on the 7x7 grid; |R(10^j,1)|, j=3..6: {}",
            r1.iter()
                .map(|v| format!("{v:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ))
}

pub const CROSSVAL_PAIRS: [(&str, &str); 5] = [
    ("mu/phi", "ap:3,2"),
    ("ramanujan/phi:m=12", "all"),
    ("mu/n", "ap:4,1"),
    ("lambda/n", "kronecker:-4"),
    ("theta:e8", "ap:3,1"),
];

fn crossval(engine: &SumEngine) -> Result<SuiteOutcome> {
    let xs = [1000, 10_000, 100_000];
    let mut worst: f64 = 0.0;
    for (wd, sd) in CROSSVAL_PAIRS {
        let w: WeightSpec = wd.parse()?;
        let s: PrimeSet = sd.parse()?;
        let f = engine.alladi_series(&w, &s, &xs, Mode::Float)?;
        let e = engine.alladi_series(&w, &s, &xs, Mode::Exact)?;
        worst = worst.max(cross_validate(&f, &e)?);
    }
    let w = WeightSpec::mu_over_phi();
    let s = PrimeSet::ap(4, 1)?;
    let ladder = [1000, 10_000, 100_000, 1_000_000];
    let runs = [1, 4, 8]
        .iter()
        .map(|&t| {
            let e = SumEngine::new(t, 1 << 16)?;
            let series = e.alladi_series(&w, &s, &ladder, Mode::Float)?;
            Ok(series
                .values
                .iter()
                .map(|v| v.to_f64().to_bits())
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let identical = runs.windows(2).all(|r| r[0] == r[1]);
    Ok(SuiteOutcome::new(
        "crossval",
        worst <= 1e-10 && identical,
        format!(
            "max |float - exact| = {worst:.3e} over 5 pairs; threads 1/4/8 {}",
            if identical { "bit-identical" } else { "DIFFER" }
        ),
    ))
}
