//! Mermin's inequality for the lossy double two-mode squeezed source.
//!
//! Losses act independently on the four modes before detection. Events are
//! sorted by the measured spins `s_a`, `s_b`; the inequality is evaluated
//! inside one sector `s_a = s_b = s_star`.

mod correlation;
mod distribution;
mod kernel;
mod truncation;

pub use correlation::{
    correlation_equal_eta, lossy_correlation, lossy_correlation_general, CorrelationResult, CorrelationSector,
    ExponentForm, MIN_SECTOR_PROBABILITY,
};
pub use distribution::{
    lossy_joint_distribution, lossy_joint_distribution_general, JointOutcomeDistribution, OutcomeSectors,
    SectorBlock,
};
pub use truncation::TruncationPolicy;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half_int::HalfInt;
use crate::ideal::AngleTriple;
use crate::loss::LossConfig;
use crate::source::SqueezeParam;

/// How the right-hand side treats events outside the measured sector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Both sides conditioned on `s_a = s_b = s_star`.
    #[default]
    Conditioned,
    /// Right-hand side summed over all sectors without renormalization.
    Unconditioned,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Conditioned => "conditioned",
            Convention::Unconditioned => "unconditioned",
        }
    }
}

/// One evaluated point of the inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub s_star: HalfInt,
    pub r: SqueezeParam,
    pub loss: LossConfig,
    pub angles: AngleTriple,
    pub convention: Convention,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub violation: f64,
    /// `violation / s_star^2`, comparable across spins.
    pub normalized_violation: f64,
    pub sector_probability: f64,
    pub s_cutoff_used: HalfInt,
    pub converged: bool,
}

/// `s_star <|m_a - m_b|>` in the sector, and the sector probability.
pub fn lossy_lhs(
    s_star: HalfInt,
    r: SqueezeParam,
    loss: LossConfig,
    alpha: f64,
    beta: f64,
    policy: &TruncationPolicy,
) -> Result<(f64, f64, HalfInt, bool)> {
    let dist = lossy_joint_distribution(r, loss, alpha, beta, OutcomeSectors::Diagonal(s_star), policy)?;
    let block = &dist.blocks[0];
    let prob = block.total();
    if !(prob >= MIN_SECTOR_PROBABILITY) {
        return Err(Error::DegenerateSector { s_star, probability: prob });
    }
    let mean: f64 = block.iter().map(|(ma, mb, p)| (ma - mb).abs().value() * p).sum::<f64>() / prob;
    Ok((s_star.value() * mean, prob, dist.s_cutoff_used, dist.converged))
}

pub fn lossy_mermin_sides(
    s_star: HalfInt,
    r: SqueezeParam,
    loss: LossConfig,
    angles: AngleTriple,
    policy: &TruncationPolicy,
) -> Result<ViolationRecord> {
    lossy_mermin_sides_with(s_star, r, loss, angles, policy, Convention::Conditioned)
}

pub fn lossy_mermin_sides_with(
    s_star: HalfInt,
    r: SqueezeParam,
    loss: LossConfig,
    angles: AngleTriple,
    policy: &TruncationPolicy,
    convention: Convention,
) -> Result<ViolationRecord> {
    if s_star < HalfInt::HALF {
        return Err(Error::InvalidParameter(format!("sector s={s_star} must be >= 1/2")));
    }
    let (lhs, prob, cut_l, conv_l) = lossy_lhs(s_star, r, loss, angles.alpha, angles.beta, policy)?;
    let sector = match convention {
        Convention::Conditioned => CorrelationSector::Conditioned(s_star),
        Convention::Unconditioned => CorrelationSector::All,
    };
    let c1 = lossy_correlation(r, loss, angles.alpha, angles.gamma, sector, policy)?;
    let c2 = lossy_correlation(r, loss, angles.beta, angles.gamma, sector, policy)?;
    let rhs = c1.value + c2.value;
    let violation = rhs - lhs;
    Ok(ViolationRecord {
        s_star,
        r,
        loss,
        angles,
        convention,
        lhs,
        rhs,
        violation,
        normalized_violation: violation / s_star.value().powi(2),
        sector_probability: prob,
        s_cutoff_used: cut_l.max(c1.s_cutoff_used).max(c2.s_cutoff_used),
        converged: conv_l && c1.converged && c2.converged,
    })
}
