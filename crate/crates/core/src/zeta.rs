//! Power-law sums `sum_k (k + q)^-s` and their tails.
//!
//! Values come from a direct partial sum followed by an Euler-Maclaurin
//! correction; [`Summation::error`] is the magnitude of the first omitted
//! correction term.

use crate::math::powf;

/// A series value together with an estimate of its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summation {
    pub value: f64,
    pub error: f64,
}

/// Number of terms summed directly before switching to Euler-Maclaurin.
const DIRECT_TERMS: u64 = 32;

/// `B_{2j} / (2j)!` for j = 1..=8.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
];

/// Hurwitz zeta `sum_{k >= 0} (k + q)^-s` for `s > 1`, `q > 0`.
pub fn hurwitz(s: f64, q: f64) -> Summation {
    debug_assert!(s > 1.0 && q > 0.0);
    let mut head = 0.0;
    for k in 0..DIRECT_TERMS {
        head += powf(k as f64 + q, -s);
    }
    let a = DIRECT_TERMS as f64 + q;
    let a_pow = powf(a, -s);
    let mut tail = a * a_pow / (s - 1.0) + 0.5 * a_pow;

    // rising = s (s+1) ... (s + 2j - 2), power = a^{-s-2j+1}
    let mut rising = s;
    let mut power = a_pow / a;
    let n = BERNOULLI_OVER_FACTORIAL.len();
    let mut error = 0.0;
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = coeff * rising * power;
        if j + 1 == n {
            error = if term < 0.0 { -term } else { term };
        } else {
            tail += term;
        }
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power /= a * a;
    }
    Summation { value: head + tail, error }
}

/// Riemann zeta `sum_{k >= 1} k^-s` for `s > 1`.
pub fn riemann(s: f64) -> Summation {
    hurwitz(s, 1.0)
}

/// `sum_{k >= m} k^-alpha` for `m >= 1`.
pub fn power_tail(alpha: f64, m: u64) -> Summation {
    debug_assert!(m >= 1);
    hurwitz(alpha, m as f64)
}

/// Rigorous upper bound `sum_{k > r} k^-alpha <= r^{1-alpha} / (alpha - 1)` for `r >= 1`,
/// and `zeta(alpha)`-style bound `1 + 1/(alpha-1)` for `r = 0`.
pub fn tail_upper_bound(alpha: f64, r: u64) -> f64 {
    if r == 0 {
        1.0 + 1.0 / (alpha - 1.0)
    } else {
        powf(r as f64, 1.0 - alpha) / (alpha - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn partial_sum_oracle(s: f64, q: f64, terms: u64) -> f64 {
        // Direct sum plus the midpoint-integral tail, accurate to O(terms^{-s-1}).
        let mut acc = 0.0;
        for k in (0..terms).rev() {
            acc += powf(k as f64 + q, -s);
        }
        acc + powf(terms as f64 + q - 0.5, 1.0 - s) / (s - 1.0)
    }

    #[test]
    fn basel() {
        let z = riemann(2.0);
        assert!((z.value - PI * PI / 6.0).abs() < 1e-14, "{z:?}");
        assert!(z.error < 1e-15);
    }

    #[test]
    fn odd_reciprocal_squares() {
        // sum_{k>=0} (2k+1)^-2 = pi^2/8 = 2^-2 * zeta(2, 1/2)
        let v = 0.25 * hurwitz(2.0, 0.5).value;
        assert!((v - PI * PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn matches_partial_sums() {
        for &s in &[1.3, 1.5, 2.0, 3.0] {
            for &q in &[0.5, 1.0, 7.0] {
                let oracle = partial_sum_oracle(s, q, 2_000_000);
                let got = hurwitz(s, q).value;
                assert!((got - oracle).abs() < 1e-9, "s={s} q={q}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn zeta_three_halves() {
        // zeta(3/2) = 2.612375348685488...
        assert!((riemann(1.5).value - 2.612_375_348_685_488).abs() < 1e-13);
    }

    #[test]
    fn upper_bound_dominates_tail() {
        for &a in &[1.1, 1.5, 2.0, 4.0] {
            for r in [1u64, 2, 10, 1000] {
                assert!(power_tail(a, r + 1).value <= tail_upper_bound(a, r));
            }
        }
    }
}
