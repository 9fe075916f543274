//! Beamsplitter loss acting on Fock and Schwinger-spin operators.
//!
//! A mode passing a beamsplitter of transmissivity `eta` (vacuum in the other
//! port, which is then traced out) maps `|n><n'|` to
//! `sum_l c_l(n) c_l(n') |n-l><n'-l|` with
//! `c_l(n) = sqrt(C(n, n-l)) eta^((n-l)/2) (1-eta)^(l/2)`.
//! The functions here enumerate the surviving photon number `k = n - l`
//! directly and attach half-integer spin labels afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half_int::HalfInt;
use crate::log_mag::LogMagnitude;
use crate::schwinger::{Side, SpinLabel};
use crate::special::{binom, check_label, sqrt_binom};

/// Per-detector transmissivities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub eta_a1: f64,
    pub eta_a2: f64,
    pub eta_b1: f64,
    pub eta_b2: f64,
}

impl LossConfig {
    pub fn new(eta_a1: f64, eta_a2: f64, eta_b1: f64, eta_b2: f64) -> Result<Self> {
        for (name, eta) in [("eta_a1", eta_a1), ("eta_a2", eta_a2), ("eta_b1", eta_b1), ("eta_b2", eta_b2)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidParameter(format!("{name}={eta} outside [0, 1]")));
            }
        }
        Ok(LossConfig { eta_a1, eta_a2, eta_b1, eta_b2 })
    }

    pub fn equal(eta: f64) -> Result<Self> {
        Self::new(eta, eta, eta, eta)
    }

    pub fn lossless() -> Self {
        LossConfig { eta_a1: 1.0, eta_a2: 1.0, eta_b1: 1.0, eta_b2: 1.0 }
    }

    pub fn is_equal(&self) -> bool {
        self.eta_a1 == self.eta_a2 && self.eta_a1 == self.eta_b1 && self.eta_a1 == self.eta_b2
    }

    /// The common efficiency when all four coincide.
    pub fn common_eta(&self) -> Option<f64> {
        self.is_equal().then_some(self.eta_a1)
    }

    /// Efficiencies of a side's first and second Schwinger mode.
    ///
    /// Bob's first Schwinger mode is `b2`.
    pub fn schwinger_etas(&self, side: Side) -> (f64, f64) {
        match side {
            Side::Alice => (self.eta_a1, self.eta_a2),
            Side::Bob => (self.eta_b2, self.eta_b1),
        }
    }

    pub fn min_eta(&self) -> f64 {
        self.eta_a1.min(self.eta_a2).min(self.eta_b1).min(self.eta_b2)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eta={eta} outside [0, 1]")))
    }
}

/// Photon-number distribution `C(n,k) eta^k (1-eta)^(n-k)` after loss.
pub fn decohere_fock(n: u32, eta: f64) -> Result<Vec<f64>> {
    check_eta(eta)?;
    Ok((0..=n)
        .map(|k| {
            (binom(n.into(), k.into())
                * LogMagnitude::pow_nonneg(eta, k.into())
                * LogMagnitude::pow_nonneg(1.0 - eta, (n - k).into()))
            .to_f64()
        })
        .collect())
}

/// One term `weight |ket><bra|` of a decohered single-mode operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleModeTerm {
    pub ket: u32,
    pub bra: u32,
    pub weight: f64,
}

fn mode_weight(n: u32, n_p: u32, k: u32, k_p: u32, eta: f64) -> LogMagnitude {
    binom(n.into(), k.into()).sqrt()
        * binom(n_p.into(), k_p.into()).sqrt()
        * LogMagnitude::pow_nonneg(eta, 0.5 * f64::from(k + k_p))
        * LogMagnitude::pow_nonneg(1.0 - eta, f64::from(n - k))
}

/// Decohered image of `|n><n'|` on one mode.
pub fn decohere_single(n: u32, n_p: u32, eta: f64) -> Result<Vec<SingleModeTerm>> {
    check_eta(eta)?;
    let k_lo = n.saturating_sub(n_p);
    Ok((k_lo..=n)
        .filter_map(|k| {
            let k_p = k + n_p - n;
            let w = mode_weight(n, n_p, k, k_p, eta);
            (!w.is_zero()).then(|| SingleModeTerm { ket: k, bra: k_p, weight: w.to_f64() })
        })
        .collect())
}

/// One term `weight |ket><bra|` of a decohered two-mode (spin) operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinOperatorTerm {
    pub ket: SpinLabel,
    pub bra: SpinLabel,
    pub weight: LogMagnitude,
}

fn spin_label(k1: u32, k2: u32) -> SpinLabel {
    crate::schwinger::modes_to_spin(crate::schwinger::ModePair::new(k1, k2))
}

pub(crate) fn photon_counts(s: HalfInt, m: HalfInt) -> (u32, u32) {
    ((s + m).to_int().unwrap() as u32, (s - m).to_int().unwrap() as u32)
}

/// Decohered image of `|s m><s' m'|` with first/second mode efficiencies
/// `eta1`, `eta2`.
///
/// Kets are `|sigma, mu>`, bras `<sigma + s' - s, mu + m' - m|`.
pub fn decohere_spin_op(
    s: HalfInt,
    m: HalfInt,
    s_p: HalfInt,
    m_p: HalfInt,
    eta1: f64,
    eta2: f64,
) -> Result<Vec<SpinOperatorTerm>> {
    check_label(s, m)?;
    check_label(s_p, m_p)?;
    check_eta(eta1)?;
    check_eta(eta2)?;
    let (n1, n2) = photon_counts(s, m);
    let (n1p, n2p) = photon_counts(s_p, m_p);
    let mut out = Vec::new();
    for k1 in n1.saturating_sub(n1p)..=n1 {
        let k1p = k1 + n1p - n1;
        let w1 = mode_weight(n1, n1p, k1, k1p, eta1);
        if w1.is_zero() {
            continue;
        }
        for k2 in n2.saturating_sub(n2p)..=n2 {
            let k2p = k2 + n2p - n2;
            let w = w1 * mode_weight(n2, n2p, k2, k2p, eta2);
            if !w.is_zero() {
                out.push(SpinOperatorTerm { ket: spin_label(k1, k2), bra: spin_label(k1p, k2p), weight: w });
            }
        }
    }
    Ok(out)
}

/// Photon-count splits `(k1, k2, k1', k2')` that take `|s m><s' m'|` to a ket
/// of spin `sigma`, in increasing `k1`. Labels are assumed valid.
pub(crate) fn photon_splits(
    s: HalfInt,
    m: HalfInt,
    s_p: HalfInt,
    m_p: HalfInt,
    sigma: HalfInt,
) -> impl Iterator<Item = [u32; 4]> {
    let (n1, n2) = photon_counts(s, m);
    let (n1p, n2p) = photon_counts(s_p, m_p);
    let total = sigma.twice();
    let (lo, hi) = if total < 0 || total as u32 > n1 + n2 {
        (1, 0)
    } else {
        let total = total as u32;
        (n1.saturating_sub(n1p).max(total.saturating_sub(n2)), n1.min(total))
    };
    (lo..=hi).filter_map(move |k1| {
        let k2 = sigma.twice() as u32 - k1;
        (k2 + n2p >= n2).then(|| [k1, k2, k1 + n1p - n1, k2 + n2p - n2])
    })
}

/// Terms of [`decohere_spin_op`] restricted to kets of spin `sigma`, as
/// `(mu, weight)` pairs. Bras are `<sigma + s' - s, mu + m' - m|`.
///
/// Labels and efficiencies are assumed valid; this is the inner loop of the
/// lossy sums.
#[allow(clippy::too_many_arguments)]
pub(crate) fn decohere_spin_op_sector(
    s: HalfInt,
    m: HalfInt,
    s_p: HalfInt,
    m_p: HalfInt,
    eta1: f64,
    eta2: f64,
    sigma: HalfInt,
    out: &mut Vec<(HalfInt, f64)>,
) {
    out.clear();
    let (n1, n2) = photon_counts(s, m);
    let (n1p, n2p) = photon_counts(s_p, m_p);
    for [k1, k2, k1p, k2p] in photon_splits(s, m, s_p, m_p, sigma) {
        let w = mode_weight(n1, n1p, k1, k1p, eta1) * mode_weight(n2, n2p, k2, k2p, eta2);
        if !w.is_zero() {
            out.push((HalfInt::from_twice(k1 as i32 - k2 as i32), w.to_f64()));
        }
    }
}

/// Lower summation bound on `sigma` by the sign of `m` and `m'`.
///
/// Four cases: `s - s'` (both nonnegative), `0` (both nonpositive),
/// `(s - s' + m - m')/2` and `(s - s' - m + m')/2` (mixed signs), clamped at 0.
/// This is a valid but not always tight bound; the binomial support decides
/// which terms are actually nonzero.
pub fn sigma_min(s: HalfInt, s_p: HalfInt, m: HalfInt, m_p: HalfInt) -> HalfInt {
    let z = HalfInt::ZERO;
    let twice = if m >= z && m_p >= z {
        (s - s_p).twice()
    } else if m <= z && m_p <= z {
        0
    } else if m >= z {
        (s - s_p + m - m_p).twice() / 2
    } else {
        (s - s_p - m + m_p).twice() / 2
    };
    HalfInt::from_twice(twice.max(0))
}

/// The same operator built by summing `sigma` from [`sigma_min`] to `s` and
/// `mu` over `-sigma..=sigma`, with out-of-range binomials vanishing.
pub fn decohere_spin_op_by_table(
    s: HalfInt,
    m: HalfInt,
    s_p: HalfInt,
    m_p: HalfInt,
    eta1: f64,
    eta2: f64,
) -> Result<Vec<SpinOperatorTerm>> {
    check_label(s, m)?;
    check_label(s_p, m_p)?;
    check_eta(eta1)?;
    check_eta(eta2)?;
    let (ds, dm) = (s_p - s, m_p - m);
    let mut out = Vec::new();
    for sigma in HalfInt::half_steps(sigma_min(s, s_p, m, m_p), s) {
        for mu in sigma.projections() {
            let e1 = (sigma + mu).value() + 0.5 * (ds + dm).value();
            let e2 = (sigma - mu).value() + 0.5 * (ds - dm).value();
            let w = LogMagnitude::pow_nonneg(eta1, e1)
                * LogMagnitude::pow_nonneg(eta2, e2)
                * LogMagnitude::pow_nonneg(1.0 - eta1, (s + m - sigma - mu).value())
                * LogMagnitude::pow_nonneg(1.0 - eta2, (s - m - sigma + mu).value())
                * sqrt_binom(s + m, sigma + mu)
                * sqrt_binom(s_p + m_p, sigma + mu + ds + dm)
                * sqrt_binom(s - m, sigma - mu)
                * sqrt_binom(s_p - m_p, sigma - mu + ds - dm);
            if w.is_zero() {
                continue;
            }
            let ket = SpinLabel::new(sigma, mu)?;
            let bra = SpinLabel::new(sigma + ds, mu + dm)?;
            out.push(SpinOperatorTerm { ket, bra, weight: w });
        }
    }
    Ok(out)
}
