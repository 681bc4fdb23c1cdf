//! Slow, independent evaluations used to check the fast paths.

use std::f64::consts::PI;

use crate::factor::gcd;

/// `c_n(m)` from its defining sum of roots of unity, as `(re, im)`.
pub fn ramanujan_exp_sum(n: u64, m: u64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for q in 1..=n {
        if gcd(q, n) == 1 {
            // reduce first so the angle stays small and accurate
            let t = 2.0 * PI * ((q as u128 * m as u128) % n as u128) as f64 / n as f64;
            re += t.cos();
            im += t.sin();
        }
    }
    (re, im)
}

/// Number of ordered `k`-tuples of integers with `sum m_i^2 = n`, for every
/// `n <= limit`, by repeated convolution of the one-square counts.
pub fn square_reps(k: u32, limit: usize) -> Vec<u128> {
    let mut one = vec![0u128; limit + 1];
    let mut m = 0usize;
    while m * m <= limit {
        one[m * m] += if m == 0 { 1 } else { 2 };
        m += 1;
    }
    let mut acc = vec![0u128; limit + 1];
    acc[0] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; limit + 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in one[..=limit - i].iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// Vectors of the E8 lattice with squared norm `2n`, for every `n <= limit`.
///
/// Coordinates are doubled, `y = 2x`: all `y_i` even or all odd, with
/// `sum y_i = 0 (mod 4)` and `sum y_i^2 = 8n`.
pub fn e8_counts(limit: usize) -> Vec<u64> {
    let max_norm = 8 * limit as i64;
    let bound = max_norm.isqrt();
    let mut counts = vec![0u64; limit + 1];
    for parity in [0i64, 1] {
        let coords: Vec<i64> = (-bound..=bound)
            .filter(|y| y.rem_euclid(2) == parity)
            .collect();
        walk(&coords, 8, 0, 0, max_norm, &mut counts);
    }
    counts
}

fn walk(coords: &[i64], left: u32, sum: i64, norm: i64, max_norm: i64, counts: &mut [u64]) {
    if left == 0 {
        if sum.rem_euclid(4) == 0 && norm % 8 == 0 {
            counts[(norm / 8) as usize] += 1;
        }
        return;
    }
    for &y in coords {
        let nn = norm + y * y;
        if nn <= max_norm {
            walk(coords, left - 1, sum + y, nn, max_norm, counts);
        }
    }
}

/// Theta coefficients of `L + L` from those of `L`: the series squares.
pub fn theta_square(counts: &[u64]) -> Vec<u128> {
    let len = counts.len();
    (0..len)
        .map(|n| {
            (0..=n)
                .map(|i| counts[i] as u128 * counts[n - i] as u128)
                .sum()
        })
        .collect()
}
