use std::mem;

use crate::rational::Rational;

/// Partial results that can be combined in a fixed order.
pub trait Accumulator: Clone + Send {
    /// Folds `other`, which covers integers after those already in `self`.
    fn merge(&mut self, other: Self);
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Accumulator for CompensatedSum {
    fn merge(&mut self, other: Self) {
        self.add(other.sum);
        self.add(other.comp);
    }
}

/// Exact rational sum by binary splitting: operands of a merge always cover
/// runs of equal length, so denominators grow evenly instead of one huge
/// running total absorbing every term.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    stack: Vec<(u32, Rational)>,
}

/// Level given to already-collapsed totals so new terms never pair with them.
const COLLAPSED: u32 = u32::MAX;

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, r: Rational) {
        let mut level = 0;
        let mut r = r;
        while let Some(&(top, _)) = self.stack.last() {
            if top != level {
                break;
            }
            let (_, prev) = self.stack.pop().expect("non-empty");
            r += prev;
            level += 1;
        }
        self.stack.push((level, r));
    }

    pub fn value(&self) -> Rational {
        let mut out = Rational::new();
        for (_, r) in self.stack.iter().rev() {
            out += r;
        }
        out
    }

    fn collapse(&mut self) {
        if self.stack.len() > 1 || self.stack.first().is_some_and(|e| e.0 != COLLAPSED) {
            let v = self.value();
            self.stack = vec![(COLLAPSED, v)];
        }
    }
}

impl Accumulator for ExactSum {
    fn merge(&mut self, mut other: Self) {
        if other.stack.is_empty() {
            return;
        }
        if self.stack.is_empty() {
            other.collapse();
            *self = other;
            return;
        }
        let v = self.value() + other.value();
        self.stack = vec![(COLLAPSED, v)];
    }
}

impl Accumulator for u64 {
    fn merge(&mut self, other: Self) {
        *self += other;
    }
}

impl<A: Accumulator, B: Accumulator> Accumulator for (A, B) {
    fn merge(&mut self, other: Self) {
        self.0.merge(other.0);
        self.1.merge(other.1);
    }
}

impl<A: Accumulator> Accumulator for Vec<A> {
    fn merge(&mut self, other: Self) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

/// Replaces `acc` with a fresh copy of `init`, returning the old contents.
pub(crate) fn take<A: Clone>(acc: &mut A, init: &A) -> A {
    mem::replace(acc, init.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_beats_naive() {
        let mut c = CompensatedSum::new();
        let mut naive = 0.0;
        for _ in 0..10 {
            for x in [1.0, 1e100, 1.0, -1e100] {
                c.add(x);
                naive += x;
            }
        }
        assert_eq!(c.value(), 20.0);
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn compensated_merge_matches_sequential() {
        let xs: Vec<f64> = (1..2000).map(|i| 1.0 / i as f64).collect();
        let mut all = CompensatedSum::new();
        xs.iter().for_each(|&x| all.add(x));
        let mut a = CompensatedSum::new();
        let mut b = CompensatedSum::new();
        xs[..700].iter().for_each(|&x| a.add(x));
        xs[700..].iter().for_each(|&x| b.add(x));
        a.merge(b);
        assert!((a.value() - all.value()).abs() < 1e-15);
    }

    #[test]
    fn exact_sum_harmonic() {
        let mut s = ExactSum::new();
        for n in 1..=10u32 {
            s.add(Rational::from((1, n)));
        }
        assert_eq!(s.value(), Rational::from((7381, 2520)));
        let mut t = ExactSum::new();
        t.merge(ExactSum::new());
        assert_eq!(t.value(), 0);
        t.merge(s.clone());
        let mut u = ExactSum::new();
        u.add(Rational::from((1, 11)));
        t.merge(u);
        t.add(Rational::from((1, 12)));
        t.add(Rational::from((1, 13)));
        let mut direct = Rational::new();
        for n in 1..=13u32 {
            direct += Rational::from((1, n));
        }
        assert_eq!(t.value(), direct);
    }

    #[test]
    fn tuples_and_vectors_merge_componentwise() {
        let mut a = (3u64, vec![1u64, 2]);
        a.merge((4, vec![10, 20]));
        assert_eq!(a, (7, vec![11, 22]));
    }
}
