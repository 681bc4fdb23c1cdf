//! Checkpointed partial sums over `p(n)` and `P(n)`.
//!
//! Every series is produced by one streaming pass over `[1, x_max]`. Segments
//! are processed in parallel; each yields one partial accumulator per
//! checkpoint bucket `(c_{i-1}, c_i]`, and the partials are folded in
//! ascending segment order. Float results therefore depend on the segment size
//! but never on the thread count.

mod accumulate;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::arith::WeightSpec;
use crate::error::{Error, Result};
use crate::factor::{PrimePower, SegmentedSieve, DEFAULT_SEGMENT_SIZE, MAX_SEGMENT_SIZE};
use crate::prime_set::PrimeSet;
use crate::rational::{to_f64, Rational};

pub use accumulate::{Accumulator, CompensatedSum, ExactSum};

/// Largest checkpoint accepted in exact mode.
pub const MAX_EXACT_X: u64 = 1_000_000;
/// Largest checkpoint accepted in float mode.
pub const MAX_FLOAT_X: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Float,
    Exact,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Exact => "exact",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Mode::Float),
            "exact" => Ok(Mode::Exact),
            _ => Err(Error::Parse(format!("unknown mode \"{s}\""))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Exact(Rational),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Float(v) => *v,
            Value::Exact(r) => to_f64(r),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Value::Float(_) => Mode::Float,
            Value::Exact(_) => Mode::Exact,
        }
    }

    /// `|self - target|`, computed exactly before rounding when possible.
    pub fn abs_error(&self, target: &Rational) -> f64 {
        match self {
            Value::Float(v) => (v - to_f64(target)).abs(),
            Value::Exact(r) => to_f64(&Rational::from(r - target).abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `C * sum_{2 <= n <= x, p(n) in S} w(n)`.
    Alladi,
    /// `#{n <= x : P(n) in S} / x`.
    Duality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSeries {
    pub kind: SeriesKind,
    /// `None` for duality counts.
    pub weight: Option<WeightSpec>,
    pub set: PrimeSet,
    pub checkpoints: Vec<u64>,
    pub values: Vec<Value>,
    pub mode: Mode,
    pub target: Option<Rational>,
}

impl CheckpointSeries {
    pub fn weight_descriptor(&self) -> String {
        match &self.weight {
            Some(w) => w.descriptor(),
            None => "count/P(n)".into(),
        }
    }

    pub fn last_value(&self) -> &Value {
        self.values.last().expect("series is never empty")
    }
}

/// Both sides of the duality at shared checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct DualitySeries {
    pub weighted: CheckpointSeries,
    pub counts: CheckpointSeries,
}

/// `R(x, y) = sum_{n <= x, p(n) > y} mu(n) / n`; `p(1)` is infinite, so `n = 1`
/// always contributes.
#[derive(Debug, Clone, PartialEq)]
pub struct RSumQuery {
    pub x: u64,
    pub y: u64,
    pub value: Value,
}

impl RSumQuery {
    pub fn within_bound(&self) -> bool {
        match &self.value {
            Value::Float(v) => v.abs() <= 1.0,
            Value::Exact(r) => *r >= -1 && *r <= 1,
        }
    }
}

/// Powers of ten from `10^3` up to `x_max`, ending at `x_max`.
pub fn pow10_ladder(x_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c: u64 = 1000;
    while c < x_max {
        out.push(c);
        c = match c.checked_mul(10) {
            Some(c) => c,
            None => break,
        };
    }
    out.push(x_max);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumEngine {
    segment_size: usize,
    threads: usize,
}

impl Default for SumEngine {
    fn default() -> Self {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        SumEngine {
            segment_size: DEFAULT_SEGMENT_SIZE,
            threads,
        }
    }
}

/// Per-term behavior of a series in one mode.
trait Channel: Accumulator {
    fn empty() -> Self;
    fn add_term(&mut self, w: &WeightSpec, n: u64, f: &[PrimePower]);
    fn finish(&self, scale: &Rational) -> Value;
}

impl Channel for CompensatedSum {
    fn empty() -> Self {
        CompensatedSum::new()
    }

    #[inline]
    fn add_term(&mut self, w: &WeightSpec, n: u64, f: &[PrimePower]) {
        let t = w.term_f64(n, f);
        if t != 0.0 {
            self.add(t);
        }
    }

    fn finish(&self, scale: &Rational) -> Value {
        Value::Float(to_f64(scale) * self.value())
    }
}

impl Channel for ExactSum {
    fn empty() -> Self {
        ExactSum::new()
    }

    fn add_term(&mut self, w: &WeightSpec, n: u64, f: &[PrimePower]) {
        if let Some(t) = w.term_exact(n, f) {
            self.add(t);
        }
    }

    fn finish(&self, scale: &Rational) -> Value {
        Value::Exact(scale * self.value())
    }
}

fn count_value(count: u64, x: u64, mode: Mode) -> Value {
    match mode {
        Mode::Float => Value::Float(count as f64 / x as f64),
        Mode::Exact => Value::Exact(Rational::from((count, x))),
    }
}

/// Whether `P(n)`, the last factor, lies in `set`. `P(1) = 1` never does.
#[inline]
fn largest_in(set: &PrimeSet, f: &[PrimePower]) -> bool {
    f.last().is_some_and(|pp| set.contains_prime(pp.p))
}

/// Whether `n >= 2` has a non-vanishing term with `p(n)` in `set`.
#[inline]
fn smallest_in(set: &PrimeSet, w: &WeightSpec, f: &[PrimePower]) -> bool {
    !f.is_empty() && !w.vanishes(f) && set.contains_prime(f[0].p)
}

impl SumEngine {
    pub fn new(threads: usize, segment_size: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::Domain("thread count must be >= 1".into()));
        }
        if !(1..=MAX_SEGMENT_SIZE).contains(&segment_size) {
            return Err(Error::Domain(format!(
                "segment size must be in 1..={MAX_SEGMENT_SIZE}, got {segment_size}"
            )));
        }
        Ok(SumEngine {
            segment_size,
            threads,
        })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn segment_size(&self) -> usize {
        self.segment_size
    }

    fn check_checkpoints(checkpoints: &[u64], mode: Mode) -> Result<()> {
        let Some(&last) = checkpoints.last() else {
            return Err(Error::Domain("no checkpoints".into()));
        };
        if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "checkpoints must be positive and strictly ascending".into(),
            ));
        }
        let cap = match mode {
            Mode::Float => MAX_FLOAT_X,
            Mode::Exact => MAX_EXACT_X,
        };
        if last > cap {
            return Err(Error::Capacity(format!(
                "{mode} mode supports x <= {cap}, got {last}"
            )));
        }
        Ok(())
    }

    /// Streams `[1, max checkpoint]` and returns the cumulative accumulator at
    /// each checkpoint.
    fn run<A, F>(&self, checkpoints: &[u64], init: A, visit: F) -> Result<Vec<A>>
    where
        A: Accumulator + Sync,
        F: Fn(&mut A, u64, &[PrimePower]) + Sync,
    {
        let x_max = *checkpoints.last().expect("checked");
        let sieve = SegmentedSieve::new(x_max + 1);
        let step = self.segment_size as u64;
        let ranges: Vec<(u64, u64)> = (0..)
            .map(|i| 1 + i * step)
            .take_while(|&lo| lo <= x_max)
            .map(|lo| (lo, (lo + step).min(x_max + 1)))
            .collect();

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::Capacity(format!("thread pool: {e}")))?;
        let partials: Vec<Result<Vec<(usize, A)>>> = pool.install(|| {
            ranges
                .par_iter()
                .map(|&(lo, hi)| {
                    let seg = sieve.segment(lo, hi)?;
                    let mut out = Vec::new();
                    let mut bucket = checkpoints.partition_point(|&c| c < lo);
                    let mut acc = init.clone();
                    for (n, f) in seg.numbers() {
                        while n > checkpoints[bucket] {
                            out.push((bucket, accumulate::take(&mut acc, &init)));
                            bucket += 1;
                        }
                        visit(&mut acc, n, f);
                    }
                    out.push((bucket, acc));
                    Ok(out)
                })
                .collect()
        });

        let mut buckets = vec![init.clone(); checkpoints.len()];
        for part in partials {
            for (b, acc) in part? {
                buckets[b].merge(acc);
            }
        }
        let mut running = init;
        Ok(buckets
            .into_iter()
            .map(|b| {
                running.merge(b);
                running.clone()
            })
            .collect())
    }

    fn alladi_values<C: Channel + Sync>(
        &self,
        weight: &WeightSpec,
        set: &PrimeSet,
        checkpoints: &[u64],
    ) -> Result<Vec<Value>> {
        let scale = weight.sum_coefficient();
        let accs = self.run(checkpoints, C::empty(), |acc, n, f| {
            if smallest_in(set, weight, f) {
                acc.add_term(weight, n, f);
            }
        })?;
        Ok(accs.iter().map(|a| a.finish(&scale)).collect())
    }

    /// `C * sum_{2 <= n <= x, p(n) in S} w(n)` at every checkpoint, with `C`
    /// the weight's sum coefficient, so the values tend to `delta(S)`.
    pub fn alladi_series(
        &self,
        weight: &WeightSpec,
        set: &PrimeSet,
        checkpoints: &[u64],
        mode: Mode,
    ) -> Result<CheckpointSeries> {
        Self::check_checkpoints(checkpoints, mode)?;
        let values = match mode {
            Mode::Float => self.alladi_values::<CompensatedSum>(weight, set, checkpoints)?,
            Mode::Exact => self.alladi_values::<ExactSum>(weight, set, checkpoints)?,
        };
        Ok(CheckpointSeries {
            kind: SeriesKind::Alladi,
            weight: Some(weight.clone()),
            set: set.clone(),
            checkpoints: checkpoints.to_vec(),
            values,
            mode,
            target: set.analytic_density(),
        })
    }

    fn counts_series(
        &self,
        set: &PrimeSet,
        checkpoints: &[u64],
        mode: Mode,
        counts: &[u64],
    ) -> CheckpointSeries {
        CheckpointSeries {
            kind: SeriesKind::Duality,
            weight: None,
            set: set.clone(),
            checkpoints: checkpoints.to_vec(),
            values: checkpoints
                .iter()
                .zip(counts)
                .map(|(&x, &c)| count_value(c, x, mode))
                .collect(),
            mode,
            target: set.analytic_density(),
        }
    }

    /// `#{n <= x : P(n) in S} / x` at every checkpoint.
    pub fn duality_series(
        &self,
        set: &PrimeSet,
        checkpoints: &[u64],
        mode: Mode,
    ) -> Result<CheckpointSeries> {
        Self::check_checkpoints(checkpoints, mode)?;
        let counts = self.run(checkpoints, 0u64, |acc, _, f| {
            *acc += largest_in(set, f) as u64;
        })?;
        Ok(self.counts_series(set, checkpoints, mode, &counts))
    }

    fn weighted_duality_values<C: Channel + Sync>(
        &self,
        weight: &WeightSpec,
        set: &PrimeSet,
        checkpoints: &[u64],
    ) -> Result<(Vec<Value>, Vec<u64>)> {
        let scale = weight.sum_coefficient();
        let accs = self.run(checkpoints, (C::empty(), 0u64), |acc, n, f| {
            acc.1 += largest_in(set, f) as u64;
            if smallest_in(set, weight, f) {
                acc.0.add_term(weight, n, f);
            }
        })?;
        Ok(accs.iter().map(|(c, k)| (c.finish(&scale), *k)).unzip())
    }

    /// `-sum_{2 <= n <= x} w(n) 1_S(p(n))` and the `P(n)` counts from one pass.
    /// Only weights over `n` are accepted.
    pub fn weighted_duality_series(
        &self,
        set: &PrimeSet,
        weight: &WeightSpec,
        checkpoints: &[u64],
        mode: Mode,
    ) -> Result<DualitySeries> {
        if !weight.is_over_n() {
            return Err(Error::Domain(format!(
                "duality needs a weight with denominator n, got {weight}"
            )));
        }
        Self::check_checkpoints(checkpoints, mode)?;
        let (values, counts) = match mode {
            Mode::Float => {
                self.weighted_duality_values::<CompensatedSum>(weight, set, checkpoints)?
            }
            Mode::Exact => self.weighted_duality_values::<ExactSum>(weight, set, checkpoints)?,
        };
        Ok(DualitySeries {
            weighted: CheckpointSeries {
                kind: SeriesKind::Alladi,
                weight: Some(weight.clone()),
                set: set.clone(),
                checkpoints: checkpoints.to_vec(),
                values,
                mode,
                target: set.analytic_density(),
            },
            counts: self.counts_series(set, checkpoints, mode, &counts),
        })
    }

    fn r_values<C: Channel + Sync>(&self, xs: &[u64], ys: &[u64]) -> Result<Vec<Vec<Value>>> {
        let w = WeightSpec::mu_over_n();
        let accs = self.run(xs, vec![C::empty(); ys.len()], |acc, n, f| {
            if n == 1 {
                // p(1) is infinite: in every R(x, y), with mu(1)/1 = 1
                for a in acc.iter_mut() {
                    a.add_term(&w, 1, f);
                }
                return;
            }
            if w.vanishes(f) {
                return;
            }
            let p = f[0].p;
            for (a, &y) in acc.iter_mut().zip(ys) {
                if p > y {
                    a.add_term(&w, n, f);
                }
            }
        })?;
        let one = Rational::from(1);
        Ok(accs
            .iter()
            .map(|row| row.iter().map(|a| a.finish(&one)).collect())
            .collect())
    }

    /// `R(x, y)` for every `x` in `xs` (ascending) and `y` in `ys`, from one
    /// pass. Rows follow `xs`, columns follow `ys`.
    pub fn r_grid(&self, xs: &[u64], ys: &[u64], mode: Mode) -> Result<Vec<Vec<RSumQuery>>> {
        Self::check_checkpoints(xs, mode)?;
        if ys.contains(&0) {
            return Err(Error::Domain("R(x, y) needs y >= 1".into()));
        }
        let values = match mode {
            Mode::Float => self.r_values::<CompensatedSum>(xs, ys)?,
            Mode::Exact => self.r_values::<ExactSum>(xs, ys)?,
        };
        Ok(xs
            .iter()
            .zip(values)
            .map(|(&x, row)| {
                ys.iter()
                    .zip(row)
                    .map(|(&y, value)| RSumQuery { x, y, value })
                    .collect()
            })
            .collect())
    }

    pub fn r_sum(&self, x: u64, y: u64, mode: Mode) -> Result<RSumQuery> {
        let q = self.r_grid(&[x], &[y], mode)?.remove(0).remove(0);
        debug_assert!(q.within_bound(), "|R({x}, {y})| > 1");
        Ok(q)
    }
}

/// Largest `|a - b|` over checkpoints of two runs of the same query.
pub fn cross_validate(a: &CheckpointSeries, b: &CheckpointSeries) -> Result<f64> {
    if a.kind != b.kind || a.weight != b.weight || a.set != b.set || a.checkpoints != b.checkpoints
    {
        return Err(Error::Domain(
            "cross-validation needs the same weight, set and checkpoints".into(),
        ));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| match (u, v) {
            (Value::Exact(r), Value::Exact(s)) => to_f64(&Rational::from(r - s).abs()),
            (Value::Exact(r), Value::Float(f)) | (Value::Float(f), Value::Exact(r)) => {
                Value::Float(*f).abs_error(r)
            }
            (Value::Float(f), Value::Float(g)) => (f - g).abs(),
        })
        .fold(0.0, f64::max))
}
