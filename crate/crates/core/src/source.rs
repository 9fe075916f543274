//! The double two-mode squeezed source in the spin basis.
//!
//! With equal squeezing `r` on both squeezers the state is
//! `sum_s tau(s,r)^2 sum_m (-1)^(s-m) |s m>_A |s -m>_B`, where the sign comes
//! from the pi phase shift on `a2` and `tau(s,r) = tanh(r)^s / cosh(r)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half_int::HalfInt;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(into = "f64", try_from = "f64")]
pub struct SqueezeParam(f64);

impl SqueezeParam {
    pub fn new(r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParameter(format!("squeezing r={r} must be finite and >= 0")));
        }
        Ok(SqueezeParam(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `tanh^2 r`, the per-photon ratio of the photon-number distribution.
    pub fn photon_ratio(self) -> f64 {
        self.0.tanh().powi(2)
    }
}

impl From<SqueezeParam> for f64 {
    fn from(r: SqueezeParam) -> f64 {
        r.0
    }
}

impl TryFrom<f64> for SqueezeParam {
    type Error = Error;
    fn try_from(r: f64) -> Result<Self> {
        SqueezeParam::new(r)
    }
}

/// `tanh(r)^s / cosh(r)`.
pub fn tau(s: HalfInt, r: SqueezeParam) -> f64 {
    let t = r.0.tanh();
    let pow = if s == HalfInt::ZERO { 1.0 } else { t.powf(s.value()) };
    pow / r.0.cosh()
}

/// Amplitude `tau(s,r)^2` of each `|s m>|s -m>` term of the source.
pub fn sector_amplitude(s: HalfInt, r: SqueezeParam) -> f64 {
    tau(s, r).powi(2)
}

/// Total probability `(2s+1) tau(s,r)^4` of emitting spin `s` on each side.
pub fn sector_mass(s: HalfInt, r: SqueezeParam) -> f64 {
    (f64::from(s.twice()) + 1.0) * sector_amplitude(s, r).powi(2)
}

/// Probability carried by all sectors above `s_max`, summed in closed form.
pub fn source_tail_mass(r: SqueezeParam, s_max: HalfInt) -> f64 {
    let x = r.photon_ratio();
    let k = f64::from(s_max.twice());
    let tail = (k + 2.0) * x.powf(k + 1.0) - (k + 1.0) * x.powf(k + 2.0);
    tail.max(0.0)
}

/// `(-1)^(s-m)`, the phase the pi shift on `a2` gives each term.
pub fn singlet_sign(s: HalfInt, m: HalfInt) -> Result<f64> {
    crate::special::check_label(s, m)?;
    Ok((s - m).parity_sign().expect("validated label"))
}

/// Photon-number distribution of one two-mode squeezed pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockWeights {
    /// `p(n) = tanh(r)^(2n) / cosh(r)^2` for `n = 0..=n_max`.
    pub probabilities: Vec<f64>,
    /// `sum_{n > n_max} p(n) = tanh(r)^(2(n_max+1))`.
    pub tail_mass: f64,
}

pub fn fock_weight_distribution(r: SqueezeParam, n_max: u32) -> FockWeights {
    let x = r.photon_ratio();
    let norm = r.0.cosh().powi(-2);
    let probabilities = (0..=n_max).map(|n| x.powi(n as i32) * norm).collect();
    FockWeights { probabilities, tail_mass: x.powi(n_max as i32 + 1) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    fn r(x: f64) -> SqueezeParam {
        SqueezeParam::new(x).unwrap()
    }

    #[test]
    fn rejects_negative_squeezing() {
        assert!(SqueezeParam::new(-0.1).is_err());
        assert!(SqueezeParam::new(f64::NAN).is_err());
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau(h(0), r(0.0)), 1.0);
        assert_eq!(tau(h(1), r(0.0)), 0.0);
        assert_eq!(tau(h(4), r(0.0)), 0.0);
        for &x in &[0.1, 0.5, 1.3] {
            assert!((tau(h(0), r(x)) - 1.0 / x.cosh()).abs() < 1e-15);
        }
    }

    #[test]
    fn sector_amplitude_matches_double_squeezer_expansion() {
        // coefficient of |n1 n1 n2 n2> is tanh^(n1+n2)/cosh^2, so one extra
        // photon per side (s -> s + 1/2) multiplies it by tanh r
        for &x in &[0.2, 0.5, 0.9] {
            let rr = r(x);
            for s2 in 0..10 {
                let direct = x.tanh().powi(s2) / x.cosh().powi(2);
                assert!((sector_amplitude(h(s2), rr) - direct).abs() < 1e-14);
                let ratio = sector_amplitude(h(s2 + 1), rr) / sector_amplitude(h(s2), rr);
                assert!((ratio - x.tanh()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sector_masses_sum_to_one() {
        for &x in &[0.2, 0.5, 1.0] {
            let rr = r(x);
            let mut prev_gap = f64::INFINITY;
            for s_max2 in [4, 10, 20, 40, 80] {
                let partial: f64 = (0..=s_max2).map(|t| sector_mass(h(t), rr)).sum();
                let tail = source_tail_mass(rr, h(s_max2));
                assert!((partial + tail - 1.0).abs() < 1e-12, "r={x} s_max={s_max2}");
                let gap = 1.0 - partial;
                assert!(gap <= prev_gap);
                prev_gap = gap;
            }
        }
        assert_eq!(source_tail_mass(r(0.0), h(0)), 0.0);
    }

    #[test]
    fn fock_weights() {
        let w = fock_weight_distribution(r(0.0), 5);
        assert_eq!(w.probabilities[0], 1.0);
        assert!(w.probabilities[1..].iter().all(|&p| p == 0.0));
        assert_eq!(w.tail_mass, 0.0);

        let w = fock_weight_distribution(r(0.5), 30);
        for n in 0..30 {
            let ratio = w.probabilities[n + 1] / w.probabilities[n];
            assert!((ratio - 0.5f64.tanh().powi(2)).abs() < 1e-12);
        }
        assert!((w.probabilities[1] / w.probabilities[0] - 0.2135).abs() < 1e-3);
        let total: f64 = w.probabilities.iter().sum::<f64>() + w.tail_mass;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_signs() {
        assert_eq!(singlet_sign(h(1), h(1)).unwrap(), 1.0);
        assert_eq!(singlet_sign(h(2), h(0)).unwrap(), -1.0);
        assert_eq!(singlet_sign(h(3), h(-1)).unwrap(), 1.0);
        assert!(singlet_sign(h(2), h(1)).is_err());
    }
}
