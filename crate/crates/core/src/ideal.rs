//! Lossless singlet quantities: Mermin's inequality for one spin-`s` sector
//! and the spin-`s` CHSH illustration.

use serde::{Deserialize, Serialize};

use crate::half_int::HalfInt;
use crate::special::DMatrix;

/// Analyzer directions about `y`. Alice measures along `alpha` or `beta`,
/// Bob along `beta` or `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AngleTriple {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        AngleTriple { alpha, beta, gamma }
    }

    /// The one-parameter family `gamma = 0`, `alpha = -(pi/2 + theta)`,
    /// `beta = pi/2 + theta` used by the angle sweeps.
    pub fn from_theta(theta: f64) -> Self {
        let half = std::f64::consts::FRAC_PI_2 + theta;
        AngleTriple { alpha: -half, beta: half, gamma: 0.0 }
    }

    pub fn shifted(self, c: f64) -> Self {
        AngleTriple { alpha: self.alpha + c, beta: self.beta + c, gamma: self.gamma + c }
    }
}

/// Both sides of `s <|m_A - m_B|> >= C(alpha, gamma) + C(beta, gamma)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalitySides {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; positive values violate the inequality.
    pub violation: f64,
}

impl InequalitySides {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        InequalitySides { lhs, rhs, violation: rhs - lhs }
    }
}

/// Joint probability that Alice reads `m` and Bob reads `m_p` when their
/// analyzers differ by `delta`, for the spin-`s` singlet.
pub fn ideal_pair_probability(s: HalfInt, m: HalfInt, m_p: HalfInt, delta: f64) -> f64 {
    let d = crate::special::wigner_d(s, m, m_p, std::f64::consts::PI - delta).unwrap_or(0.0);
    d * d / (f64::from(s.twice()) + 1.0)
}

/// `<m_A m_B>` for the singlet: `-(1/3) s(s+1) cos delta`.
pub fn ideal_correlation(s: HalfInt, delta: f64) -> f64 {
    let s = s.value();
    -s * (s + 1.0) * delta.cos() / 3.0
}

/// `s <|m_A - m_B|>` at analyzer difference `delta`.
pub fn ideal_lhs(s: HalfInt, delta: f64) -> f64 {
    let dm = DMatrix::new(s, std::f64::consts::PI - delta);
    let norm = f64::from(s.twice()) + 1.0;
    let mut acc = 0.0;
    for m in s.projections() {
        for mp in s.projections() {
            let d = dm.get(m, mp);
            acc += (m - mp).abs().value() * d * d;
        }
    }
    s.value() * acc / norm
}

pub fn ideal_mermin_sides(s: HalfInt, angles: AngleTriple) -> InequalitySides {
    let lhs = ideal_lhs(s, angles.alpha - angles.beta);
    let rhs = ideal_correlation(s, angles.alpha - angles.gamma) + ideal_correlation(s, angles.beta - angles.gamma);
    InequalitySides::new(lhs, rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshRecord {
    pub lhs_abs: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// CHSH combination of singlet correlations normalized by `s(s+1)/3`,
/// against the local bound `6s/(s+1)`.
pub fn chsh_spin_s(s: HalfInt, alpha: f64, beta: f64, gamma: f64, delta: f64) -> ChshRecord {
    let lhs_abs =
        ((alpha - beta).cos() + (gamma - beta).cos() + (alpha - delta).cos() - (gamma - delta).cos()).abs();
    let sv = s.value();
    let bound = 6.0 * sv / (sv + 1.0);
    ChshRecord { lhs_abs, bound, satisfied: lhs_abs <= bound }
}

/// Spin at which the local bound `6s/(s+1)` reaches the quantum maximum
/// `2 sqrt 2`.
pub fn chsh_threshold_spin() -> f64 {
    let r2 = std::f64::consts::SQRT_2;
    r2 / (3.0 - r2)
}
