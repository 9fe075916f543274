//! Dynamic cutoff of the source-spin sum.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half_int::HalfInt;
use crate::source::SqueezeParam;
use crate::special::ln_factorial;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// First cutoff tried for the source sum.
    pub s_start: HalfInt,
    /// Relative change allowed between successive cutoffs.
    pub rel_tol: f64,
    /// Hard cap on the cutoff.
    pub max_s: HalfInt,
    pub extend_by: HalfInt,
}

impl TruncationPolicy {
    pub fn new(s_start: HalfInt, rel_tol: f64, max_s: HalfInt, extend_by: HalfInt) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("rel_tol={rel_tol} must be > 0")));
        }
        if s_start < HalfInt::ZERO || s_start > max_s {
            return Err(Error::InvalidParameter(format!("s_start={s_start} must lie in [0, max_s={max_s}]")));
        }
        if extend_by <= HalfInt::ZERO {
            return Err(Error::InvalidParameter(format!("extend_by={extend_by} must be positive")));
        }
        Ok(TruncationPolicy { s_start, rel_tol, max_s, extend_by })
    }

    /// Default policy for outcome spin `s_star`: start one above it, stop
    /// at `s_star + 15`, tolerance `1e-6`.
    pub fn for_sector(s_star: HalfInt) -> Self {
        Self::with_tolerance(s_star, 1e-6, HalfInt::from_int(15))
    }

    /// Policy for outcome spin `s_star` with the cap at `s_star + max_offset`.
    pub fn with_tolerance(s_star: HalfInt, rel_tol: f64, max_offset: HalfInt) -> Self {
        let max_s = s_star + max_offset.max(HalfInt::ZERO);
        TruncationPolicy { s_start: (s_star + HalfInt::ONE).min(max_s), rel_tol, max_s, extend_by: HalfInt::HALF }
    }

    /// Sum exactly through `s_max` and stop.
    pub fn fixed(s_max: HalfInt) -> Self {
        TruncationPolicy { s_start: s_max, rel_tol: 1e-6, max_s: s_max, extend_by: HalfInt::HALF }
    }
}

pub(crate) struct Truncated {
    pub entries: Vec<f64>,
    pub cutoff: HalfInt,
    pub converged: bool,
}

fn group_scale(entries: &[f64]) -> f64 {
    entries.iter().map(|x| x.abs()).sum()
}

/// Accumulate `contribute(s, entries)` over source spins from zero up to a
/// cutoff chosen by `policy`.
///
/// A cutoff is accepted when, for every group of entries, the analytic bound
/// `tail(group, cutoff)` on what the remaining sources could add is within
/// `rel_tol` of the group's mass, and no entry above `1e-12` of that mass
/// moved by more than `rel_tol` relative to itself since the previous
/// cutoff. Reaching `max_s` without both stops with `converged = false`.
pub(crate) fn accumulate(
    policy: &TruncationPolicy,
    n_entries: usize,
    groups: &[Range<usize>],
    mut tail: impl FnMut(usize, HalfInt) -> f64,
    mut contribute: impl FnMut(HalfInt, &mut [f64]),
) -> Truncated {
    let mut entries = vec![0.0; n_entries];
    let mut snapshot: Option<Vec<f64>> = None;
    let mut next = HalfInt::ZERO;
    let mut cutoff = policy.s_start;
    loop {
        while next <= cutoff {
            contribute(next, &mut entries);
            next = next + HalfInt::HALF;
        }
        let tails_ok = groups.iter().enumerate().all(|(g, range)| {
            let scale = group_scale(&entries[range.clone()]);
            tail(g, cutoff) <= policy.rel_tol * scale
        });
        let stable = match &snapshot {
            Some(old) => groups.iter().all(|range| {
                let scale = group_scale(&entries[range.clone()]);
                range.clone().all(|i| {
                    let (new, old) = (entries[i], old[i]);
                    new.abs() <= 1e-12 * scale || (new - old).abs() <= policy.rel_tol * new.abs()
                })
            }),
            None => cutoff >= policy.max_s,
        };
        if tails_ok && stable {
            return Truncated { entries, cutoff, converged: true };
        }
        if cutoff >= policy.max_s {
            return Truncated { entries, cutoff, converged: false };
        }
        snapshot = Some(entries.clone());
        cutoff = (cutoff + policy.extend_by).min(policy.max_s);
    }
}

/// `sum_{2s > 2 cutoff} (2s+1) tau(s,r)^4 exp(log_factor(2s))`.
///
/// `log_factor` must be log-concave in `2s` (binomials and geometric factors
/// are), so the terms are unimodal and the series can stop once the
/// geometric remainder past the peak is negligible.
pub(crate) fn source_tail_series(r: SqueezeParam, cutoff: HalfInt, log_factor: impl Fn(u32) -> f64) -> f64 {
    let x = r.photon_ratio();
    if x == 0.0 {
        return 0.0;
    }
    let (ln_x, ln_norm) = (x.ln(), 2.0 * (1.0 - x).ln());
    let first = (cutoff.twice() + 1).max(0) as u32;
    let mut acc = 0.0;
    let mut prev = f64::NEG_INFINITY;
    let mut all_zero = true;
    for n in first..first + 20_000 {
        let lt = f64::from(n + 1).ln() + f64::from(n) * ln_x + ln_norm + log_factor(n);
        let term = lt.exp();
        acc += term;
        if term > 0.0 {
            all_zero = false;
        } else if all_zero && n >= first + 64 {
            break;
        }
        if lt < prev {
            let ratio = (lt - prev).exp();
            if term / (1.0 - ratio) <= 1e-17 * acc || term == 0.0 {
                // remainder of a log-concave tail is below term / (1 - ratio)
                acc += term * ratio / (1.0 - ratio);
                break;
            }
        }
        prev = lt;
    }
    acc
}

fn ln_pow(base: f64, exp: f64) -> f64 {
    if exp == 0.0 {
        0.0
    } else {
        exp * base.ln()
    }
}

/// `ln` of an upper bound on the probability that `n` photons split over a
/// side's two modes leave exactly `k` after loss.
pub(crate) fn ln_survival_bound(n: u32, k: u32, eta_max: f64, eta_min: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n.into()) - ln_factorial(k.into()) - ln_factorial((n - k).into())
        + ln_pow(eta_max, f64::from(k))
        + ln_pow(1.0 - eta_min, f64::from(n - k))
}
