//! Binomials, Jacobi polynomials and Wigner small-d rotation matrices.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::half_int::HalfInt;
use crate::log_mag::{log_sum, LogMagnitude};

const LN_FACT_TABLE: usize = 4096;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        let mut f = 1.0f64;
        t.push(0.0);
        for k in 1..LN_FACT_TABLE {
            if k <= 170 {
                // exact-ish product keeps ln n! within a few ulps for small n
                f *= k as f64;
                t.push(f.ln());
            } else {
                let prev = t[k - 1];
                t.push(prev + (k as f64).ln());
            }
        }
        t
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    let table = ln_fact_table();
    if (n as usize) < table.len() {
        table[n as usize]
    } else {
        let mut acc = table[table.len() - 1];
        for k in table.len() as u64..=n {
            acc += (k as f64).ln();
        }
        acc
    }
}

/// Binomial coefficient `C(n, k)`; exactly zero outside `0 <= k <= n`.
///
/// The out-of-range rule is what enforces the summation bounds of the loss
/// channel sums, so callers never range-check binomial arguments themselves.
pub fn binom(n: i64, k: i64) -> LogMagnitude {
    if n < 0 || k < 0 || k > n {
        return LogMagnitude::ZERO;
    }
    let (n, k) = (n as u64, k as u64);
    LogMagnitude::new(1, ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
}

/// `sqrt(C(n, k))` with half-integer arguments; zero unless both are
/// integers and `0 <= k <= n`.
pub fn sqrt_binom(n: HalfInt, k: HalfInt) -> LogMagnitude {
    match (n.to_int(), k.to_int()) {
        (Some(n), Some(k)) => binom(i64::from(n), i64::from(k)).sqrt(),
        _ => LogMagnitude::ZERO,
    }
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` by the three-term recurrence.
pub fn jacobi_poly(n: u32, a: i32, b: i32, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (af, bf) = (f64::from(a), f64::from(b));
    let p1 = 0.5 * (2.0 * (af + 1.0) + (af + bf + 2.0) * (x - 1.0));
    if n == 1 {
        return p1;
    }
    let (mut prev, mut cur) = (1.0, p1);
    for k in 2..=n {
        let k = f64::from(k);
        let c = 2.0 * k + af + bf;
        let lead = 2.0 * k * (k + af + bf) * (c - 2.0);
        if lead == 0.0 {
            return jacobi_explicit(n, a, b, x);
        }
        let next = ((c - 1.0) * (c * (c - 2.0) * x + af * af - bf * bf) * cur
            - 2.0 * (k + af - 1.0) * (k + bf - 1.0) * c * prev)
            / lead;
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized binomial `C(z, j)` for real `z`.
fn gen_binom(z: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (z - f64::from(i)) / f64::from(i + 1))
}

/// Explicit finite sum, used where the recurrence has a vanishing leading
/// coefficient (only possible for negative parameters).
fn jacobi_explicit(n: u32, a: i32, b: i32, x: f64) -> f64 {
    let nf = f64::from(n);
    (0..=n)
        .map(|k| {
            gen_binom(nf + f64::from(a), n - k)
                * gen_binom(nf + f64::from(b), k)
                * ((x - 1.0) / 2.0).powi(k as i32)
                * ((x + 1.0) / 2.0).powi((n - k) as i32)
        })
        .sum()
}

/// Checks that `(s, m)` labels a state of a spin-`s` multiplet.
pub fn check_label(s: HalfInt, m: HalfInt) -> Result<()> {
    if s < HalfInt::ZERO || m.abs() > s || !(s - m).is_integer() {
        return Err(Error::InvalidSpinLabel { s, m });
    }
    Ok(())
}

/// `<s m1| exp(-i alpha S_y) |s m2>` by the explicit Wigner sum.
pub fn wigner_d(s: HalfInt, m1: HalfInt, m2: HalfInt, alpha: f64) -> Result<f64> {
    check_label(s, m1)?;
    check_label(s, m2)?;
    Ok(wigner_d_unchecked(s, m1, m2, alpha))
}

fn wigner_d_unchecked(s: HalfInt, m1: HalfInt, m2: HalfInt, alpha: f64) -> f64 {
    let (c, sn) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    // all of these are integers for valid labels
    let jp1 = (s + m1).to_int().unwrap() as i64;
    let jm1 = (s - m1).to_int().unwrap() as i64;
    let jp2 = (s + m2).to_int().unwrap() as i64;
    let jm2 = (s - m2).to_int().unwrap() as i64;
    let dm = (m2 - m1).to_int().unwrap() as i64;
    let two_s = s.twice() as i64;

    let prefactor = LogMagnitude::new(
        1,
        0.5 * (ln_factorial(jp1 as u64)
            + ln_factorial(jm1 as u64)
            + ln_factorial(jp2 as u64)
            + ln_factorial(jm2 as u64)),
    );
    let k_lo = 0.max(dm);
    let k_hi = jp2.min(jm1);
    let terms: Vec<LogMagnitude> = (k_lo..=k_hi)
        .map(|k| {
            let denom = ln_factorial((jp2 - k) as u64)
                + ln_factorial(k as u64)
                + ln_factorial((jm1 - k) as u64)
                + ln_factorial((k - dm) as u64);
            let sign = if (k - dm).rem_euclid(2) == 0 { 1 } else { -1 };
            let cos_pow = (two_s + dm - 2 * k) as u32;
            let sin_pow = (2 * k - dm) as u32;
            LogMagnitude::new(sign, -denom)
                * LogMagnitude::powi(c, cos_pow)
                * LogMagnitude::powi(sn, sin_pow)
        })
        .collect();
    (prefactor * log_sum(&terms)).to_f64()
}

/// Jacobi-polynomial form of the rotation element.
///
/// Only defined for `m1 >= m2` and `m1 + m2 >= 0`, where both Jacobi
/// parameters are nonnegative. In that region it equals `wigner_d(s, m2, m1)`
/// (note the transposed indices), i.e. `wigner_d(s, m1, m2, -alpha)`.
pub fn wigner_d_jacobi(s: HalfInt, m1: HalfInt, m2: HalfInt, alpha: f64) -> Option<f64> {
    check_label(s, m1).ok()?;
    check_label(s, m2).ok()?;
    let a = (m1 - m2).to_int()?;
    let b = (m1 + m2).to_int()?;
    if a < 0 || b < 0 {
        return None;
    }
    let n = (s - m1).to_int()? as u32;
    let f = |h: HalfInt| ln_factorial(h.to_int().unwrap() as u64);
    let pre = (0.5 * (f(s + m1) + f(s - m1) - f(s + m2) - f(s - m2))).exp();
    let (c, sn) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    Some(pre * c.powi(b) * sn.powi(a) * jacobi_poly(n, a, b, alpha.cos()))
}

/// Full `(2s+1) x (2s+1)` rotation matrix for one spin and angle.
#[derive(Clone, Debug)]
pub struct DMatrix {
    s: HalfInt,
    dim: usize,
    data: Vec<f64>,
}

impl DMatrix {
    pub fn new(s: HalfInt, alpha: f64) -> Self {
        assert!(s >= HalfInt::ZERO);
        let dim = s.twice() as usize + 1;
        let mut data = Vec::with_capacity(dim * dim);
        for m1 in s.projections() {
            for m2 in s.projections() {
                data.push(wigner_d_unchecked(s, m1, m2, alpha));
            }
        }
        DMatrix { s, dim, data }
    }

    pub fn spin(&self) -> HalfInt {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, m: HalfInt) -> usize {
        ((m + self.s).twice() / 2) as usize
    }

    /// Element by zero-based row/column index (`m = -s + i`).
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Element `d_{m1 m2}`; zero if either index is outside the multiplet.
    pub fn get(&self, m1: HalfInt, m2: HalfInt) -> f64 {
        if m1.abs() > self.s || m2.abs() > self.s {
            return 0.0;
        }
        self.data[self.index(m1) * self.dim + self.index(m2)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn binom_small_values() {
        assert!((binom(2, 1).to_f64() - 2.0).abs() < 1e-15);
        assert!(binom(5, -1).is_zero());
        assert!(binom(5, 6).is_zero());
        assert!((binom(0, 0).to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn binom_40_20_against_pascal() {
        let mut row = vec![1u64];
        for _ in 0..40 {
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
        assert_eq!(row[20], 137_846_528_820);
        let got = binom(40, 20).to_f64();
        assert!((got / row[20] as f64 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_rotation() {
        for s2 in 0..=9 {
            let s = h(s2);
            for m1 in s.projections() {
                for m2 in s.projections() {
                    let d = wigner_d(s, m1, m2, 0.0).unwrap();
                    assert!((d - if m1 == m2 { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn spin_half_elements() {
        for &a in &[0.3, 1.1, -2.0, 3.0] {
            let d = wigner_d(h(1), h(1), h(1), a).unwrap();
            assert!((d - (a / 2.0).cos()).abs() < 1e-15);
            let d = wigner_d(h(1), h(-1), h(1), a).unwrap();
            assert!((d - (a / 2.0).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_labels_rejected() {
        assert!(wigner_d(h(2), h(1), h(0), 0.1).is_err());
        assert!(wigner_d(h(2), h(4), h(0), 0.1).is_err());
        assert!(wigner_d(h(-2), h(0), h(0), 0.1).is_err());
    }

    #[test]
    fn jacobi_low_degree() {
        for &x in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(jacobi_poly(0, 3, -1, x), 1.0);
            assert!((jacobi_poly(1, 0, 0, x) - x).abs() < 1e-15);
            // Legendre P2
            assert!((jacobi_poly(2, 0, 0, x) - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_recurrence_fallback_matches_explicit() {
        // a + b = -2 makes the n = 2 leading coefficient vanish
        for &x in &[-0.5, 0.2, 0.9] {
            let r = jacobi_poly(2, -1, -1, x);
            assert!((r - jacobi_explicit(2, -1, -1, x)).abs() < 1e-14);
        }
        for n in 0..6 {
            for &x in &[-0.8, 0.1, 0.6] {
                let r = jacobi_poly(n, 2, 1, x);
                assert!((r - jacobi_explicit(n, 2, 1, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_form_is_transposed_wigner() {
        for s2 in 0..=9 {
            let s = h(s2);
            for m1 in s.projections() {
                for m2 in s.projections() {
                    for &a in &[0.2, 1.3, 2.9, -0.7] {
                        if let Some(j) = wigner_d_jacobi(s, m1, m2, a) {
                            let d = wigner_d(s, m2, m1, a).unwrap();
                            assert!((j - d).abs() < 1e-12, "s={s} m1={m1} m2={m2}");
                        }
                    }
                }
            }
        }
        assert!(wigner_d_jacobi(h(2), h(-2), h(0), 0.3).is_none());
    }

    #[test]
    fn dmatrix_matches_scalar() {
        let d = DMatrix::new(h(5), 0.77);
        for m1 in h(5).projections() {
            for m2 in h(5).projections() {
                assert_eq!(d.get(m1, m2), wigner_d(h(5), m1, m2, 0.77).unwrap());
            }
        }
        assert_eq!(d.get(h(7), h(1)), 0.0);
    }

    /// `exp(-i alpha S_y)` by Taylor series; `-i S_y = -(S_+ - S_-)/2` is real.
    fn rotation_by_series(s: HalfInt, alpha: f64) -> Vec<Vec<f64>> {
        let ms: Vec<_> = s.projections().collect();
        let n = ms.len();
        let mut g = vec![vec![0.0; n]; n];
        for (j, &m) in ms.iter().enumerate() {
            let (sv, mv) = (s.value(), m.value());
            if j + 1 < n {
                // <m+1|S_+|m>
                g[j + 1][j] -= 0.5 * alpha * (sv * (sv + 1.0) - mv * (mv + 1.0)).sqrt();
            }
            if j > 0 {
                g[j - 1][j] += 0.5 * alpha * (sv * (sv + 1.0) - mv * (mv - 1.0)).sqrt();
            }
        }
        let mut out = vec![vec![0.0; n]; n];
        let mut term: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        for k in 1..80 {
            for i in 0..n {
                for j in 0..n {
                    out[i][j] += term[i][j];
                }
            }
            let mut next = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    next[i][j] = (0..n).map(|l| g[i][l] * term[l][j]).sum::<f64>() / k as f64;
                }
            }
            term = next;
        }
        out
    }

    #[test]
    fn spin_one_against_matrix_exponential() {
        for &a in &[0.0, 0.4, 1.3, 2.9, -2.2] {
            let e = rotation_by_series(h(2), a);
            assert!((e[1][1] - a.cos()).abs() < 1e-12);
            assert!((wigner_d(h(2), h(0), h(0), a).unwrap() - a.cos()).abs() < 1e-12);
        }
        for s2 in 1..=4 {
            let s = h(s2);
            let e = rotation_by_series(s, 0.83);
            for (i, m1) in s.projections().enumerate() {
                for (j, m2) in s.projections().enumerate() {
                    assert!((e[i][j] - wigner_d(s, m1, m2, 0.83).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    fn jacobi_hypergeometric(n: u32, a: i32, b: i32, x: f64) -> f64 {
        // ((a+1)_n / n!) 2F1(-n, n+a+b+1; a+1; (1-x)/2)
        let (nf, af, bf) = (f64::from(n), f64::from(a), f64::from(b));
        let z = 0.5 * (1.0 - x);
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..=n {
            sum += term;
            let kf = f64::from(k);
            term *= (kf - nf) * (nf + af + bf + 1.0 + kf) / ((af + 1.0 + kf) * (kf + 1.0)) * z;
        }
        let pre: f64 = (1..=n).map(|k| (af + f64::from(k)) / f64::from(k)).product();
        pre * sum
    }

    #[test]
    fn jacobi_against_series() {
        let want = jacobi_hypergeometric(3, 1, 2, 0.3);
        assert!((jacobi_poly(3, 1, 2, 0.3) - want).abs() < 1e-12);
        for n in 0..8 {
            for (a, b) in [(0, 0), (2, 1), (3, 5), (1, 4)] {
                for &x in &[-0.9, -0.2, 0.45, 1.0] {
                    let want = jacobi_hypergeometric(n, a, b, x);
                    assert!((jacobi_poly(n, a, b, x) - want).abs() < 1e-10 * want.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn unitarity_grid() {
        for s2 in 0..=9 {
            let s = h(s2);
            for i in 0..24 {
                let a = -PI + 2.0 * PI * f64::from(i) / 24.0;
                let d = DMatrix::new(s, a);
                for m1 in s.projections() {
                    let norm: f64 = s.projections().map(|m2| d.get(m1, m2).powi(2)).sum();
                    assert!((norm - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn pascal_rule(n in 1i64..=30, k in -2i64..=32) {
            let lhs = binom(n, k).to_f64();
            let rhs = binom(n - 1, k - 1).to_f64() + binom(n - 1, k).to_f64();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.max(1.0));
            prop_assert_eq!(lhs.round(), rhs.round());
        }

        #[test]
        fn transpose_symmetry(s2 in 0i32..=9, i in 0usize..10, j in 0usize..10, a in -6.3f64..6.3) {
            let s = h(s2);
            let ms: Vec<_> = s.projections().collect();
            let (m1, m2) = (ms[i % ms.len()], ms[j % ms.len()]);
            let sign = (m1 - m2).parity_sign().unwrap();
            let x = wigner_d(s, m1, m2, a).unwrap();
            let y = wigner_d(s, m2, m1, a).unwrap();
            prop_assert!((x - sign * y).abs() < 1e-10);
        }

        #[test]
        fn composition(s2 in 0i32..=9, i in 0usize..10, j in 0usize..10, a in -3.2f64..3.2, b in -3.2f64..3.2) {
            let s = h(s2);
            let ms: Vec<_> = s.projections().collect();
            let (m1, m2) = (ms[i % ms.len()], ms[j % ms.len()]);
            let (da, db) = (DMatrix::new(s, a), DMatrix::new(s, b));
            let prod: f64 = ms.iter().map(|&k| da.get(m1, k) * db.get(k, m2)).sum();
            prop_assert!((prod - wigner_d(s, m1, m2, a + b).unwrap()).abs() < 1e-9);
        }
    }
}
