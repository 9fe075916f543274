//! Spin crosscorrelation `<S_{A,alpha} S_{B,beta}>` under loss.
//!
//! `S_alpha = cos(alpha) S_z + sin(alpha) (S_+ + S_-)/2`. After tracing
//! against the decohered source only three blocks survive: the `S_z S_z`
//! block from diagonal source terms and two ladder blocks from `m' = m +- 1`,
//! which carry the sign `(-1)^(2s - m - m') = -1`.

use serde::{Deserialize, Serialize};

use super::distribution::{sector_tail_bound, side_kernels};
use super::kernel::{side_moments, SideKernel, SideMoments};
use super::truncation::{accumulate, source_tail_series, TruncationPolicy};
use crate::error::{Error, Result};
use crate::half_int::HalfInt;
use crate::loss::LossConfig;
use crate::source::{sector_amplitude, source_tail_mass, SqueezeParam};

/// Measured sectors a correlation is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationSector {
    /// Conditioned on `s_a = s_b = s`, renormalized by that probability.
    Conditioned(HalfInt),
    /// Every sector pair, no renormalization.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub value: f64,
    /// Probability of the conditioning event; the included source mass for
    /// [`CorrelationSector::All`].
    pub sector_probability: f64,
    pub s_cutoff_used: HalfInt,
    pub converged: bool,
}

/// Smallest sector probability that can be conditioned on.
pub const MIN_SECTOR_PROBABILITY: f64 = 1e-300;

struct Angles {
    zz: f64,
    ladder: f64,
}

impl Angles {
    fn new(alpha: f64, beta: f64) -> Self {
        Angles { zz: alpha.cos() * beta.cos(), ladder: alpha.sin() * beta.sin() / 4.0 }
    }
}

fn combine(a: &SideMoments, b: &SideMoments, ang: &Angles) -> (f64, f64) {
    let mut trace = 0.0;
    let mut corr = 0.0;
    for i in 0..a.trace.len() {
        trace += a.trace[i] * b.trace[i];
        corr += ang.zz * a.z[i] * b.z[i] - ang.ladder * (a.up[i] * b.down[i] + a.down[i] * b.up[i]);
    }
    (trace, corr)
}

/// Correlation between Alice's analyzer `alpha` and Bob's `beta`.
pub fn lossy_correlation(
    r: SqueezeParam,
    loss: LossConfig,
    alpha: f64,
    beta: f64,
    sector: CorrelationSector,
    policy: &TruncationPolicy,
) -> Result<CorrelationResult> {
    correlation(r, loss, alpha, beta, sector, policy, true)
}

/// [`lossy_correlation`] with the per-mode weight product even for equal
/// efficiencies.
pub fn lossy_correlation_general(
    r: SqueezeParam,
    loss: LossConfig,
    alpha: f64,
    beta: f64,
    sector: CorrelationSector,
    policy: &TruncationPolicy,
) -> Result<CorrelationResult> {
    correlation(r, loss, alpha, beta, sector, policy, false)
}

fn correlation(
    r: SqueezeParam,
    loss: LossConfig,
    alpha: f64,
    beta: f64,
    sector: CorrelationSector,
    policy: &TruncationPolicy,
    fast: bool,
) -> Result<CorrelationResult> {
    let (ka, kb) = side_kernels(&loss, fast);
    let ang = Angles::new(alpha, beta);
    let mut buf = Vec::new();
    let (mut ma, mut mb) = (SideMoments::default(), SideMoments::default());
    match sector {
        CorrelationSector::Conditioned(s_star) => {
            if s_star < HalfInt::ZERO {
                return Err(Error::InvalidParameter(format!("sector s={s_star} must be >= 0")));
            }
            // |<S S>| <= s*^2 on the sector, so the numerator's tail is bounded
            // by s*^2 times the probability tail
            let spin_sq = s_star.value().powi(2);
            let run = accumulate(
                policy,
                2,
                &[0..2],
                |_, c| (1.0 + spin_sq) * sector_tail_bound(r, &loss, s_star, s_star, c),
                |s, e| {
                    let w = sector_amplitude(s, r);
                    if s < s_star || w == 0.0 {
                        return;
                    }
                    side_moments(&ka, s, s_star, &mut buf, &mut ma);
                    side_moments(&kb, s, s_star, &mut buf, &mut mb);
                    let (t, c) = combine(&ma, &mb, &ang);
                    e[0] += w * w * t;
                    e[1] += w * w * c;
                },
            );
            let prob = run.entries[0];
            if !(prob >= MIN_SECTOR_PROBABILITY) {
                return Err(Error::DegenerateSector { s_star, probability: prob });
            }
            Ok(CorrelationResult {
                value: run.entries[1] / prob,
                sector_probability: prob,
                s_cutoff_used: run.cutoff,
                converged: run.converged,
            })
        }
        CorrelationSector::All => {
            let run = accumulate(
                policy,
                1,
                &[0..1],
                |_, c| source_tail_series(r, c, |n| 2.0 * (0.5 * f64::from(n)).max(1e-300).ln()),
                |s, e| {
                    let w = sector_amplitude(s, r);
                    if w == 0.0 {
                        return;
                    }
                    for sigma in HalfInt::half_steps(HalfInt::HALF, s) {
                        side_moments(&ka, s, sigma, &mut buf, &mut ma);
                        for tau in HalfInt::half_steps(HalfInt::HALF, s) {
                            side_moments(&kb, s, tau, &mut buf, &mut mb);
                            e[0] += w * w * combine(&ma, &mb, &ang).1;
                        }
                    }
                },
            );
            Ok(CorrelationResult {
                value: run.entries[0],
                sector_probability: 1.0 - source_tail_mass(r, run.cutoff),
                s_cutoff_used: run.cutoff,
                converged: run.converged,
            })
        }
    }
}

/// Exponent placement for the equal-efficiency correlation sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExponentForm {
    /// `eta^(2(sa+sb)) (1-eta)^(2(2s-sa-sb))` in every block, as follows from
    /// decohering the source term by term.
    Derived,
    /// `(1-eta)^(2(2s+2m-sa-sb))` in every block and
    /// `eta^(2(sa+sb+-1))` in the ladder blocks.
    Printed,
}

/// Equal-efficiency correlation conditioned on `s_a = s_b = s_star`, summed
/// over sources up to `cutoff`, with the efficiency factors placed per
/// `form`. The sector probability always uses the derived weights.
pub fn correlation_equal_eta(
    r: SqueezeParam,
    eta: f64,
    alpha: f64,
    beta: f64,
    s_star: HalfInt,
    cutoff: HalfInt,
    form: ExponentForm,
) -> Result<f64> {
    LossConfig::equal(eta)?;
    let (ka, kb) = (SideKernel::bare(false), SideKernel::bare(true));
    let ang = Angles::new(alpha, beta);
    let sig = 2.0 * s_star.value();
    let mut buf = Vec::new();
    let (mut ma, mut mb) = (SideMoments::default(), SideMoments::default());
    let (mut prob, mut num) = (0.0, 0.0);
    for s in HalfInt::half_steps(s_star, cutoff) {
        let w = sector_amplitude(s, r);
        if w == 0.0 {
            continue;
        }
        side_moments(&ka, s, s_star, &mut buf, &mut ma);
        side_moments(&kb, s, s_star, &mut buf, &mut mb);
        let lost = 2.0 * (2.0 * s.value() - sig);
        let derived = eta.powf(2.0 * sig) * (1.0 - eta).powf(lost);
        for (i, m) in s.projections().enumerate() {
            prob += w * w * derived * ma.trace[i] * mb.trace[i];
            let zz = ang.zz * ma.z[i] * mb.z[i];
            let (up, down) = (ma.up[i] * mb.down[i], ma.down[i] * mb.up[i]);
            num += w * w
                * match form {
                    ExponentForm::Derived => derived * (zz - ang.ladder * (up + down)),
                    ExponentForm::Printed => {
                        let l = (1.0 - eta).powf(lost + 4.0 * m.value());
                        let (e0, ep, em) =
                            (eta.powf(2.0 * sig), eta.powf(2.0 * (sig + 1.0)), eta.powf(2.0 * (sig - 1.0)));
                        l * (e0 * zz - ang.ladder * (ep * up + em * down))
                    }
                };
        }
    }
    if !(prob >= MIN_SECTOR_PROBABILITY) {
        return Err(Error::DegenerateSector { s_star, probability: prob });
    }
    Ok(num / prob)
}
