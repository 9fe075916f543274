//! Schwinger two-mode encoding of an effective spin.
//!
//! A Fock state `|n1, n2>` of two modes is the spin state `|s, m>` with
//! `s = (n1 + n2)/2` and `m = (n1 - n2)/2`. Alice's spin uses `(a1, a2)` in
//! that order. Bob's spin operators are written with `b2` playing the role of
//! the first mode, so his projection is `m = (n_b2 - n_b1)/2`; with this
//! labeling the double two-mode squeezed state pairs `|s, m>_A` with
//! `|s, -m>_B`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::half_int::HalfInt;
use crate::special::check_label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModePair {
    pub n1: u32,
    pub n2: u32,
}

impl ModePair {
    pub fn new(n1: u32, n2: u32) -> Self {
        ModePair { n1, n2 }
    }

    pub fn total(self) -> u32 {
        self.n1 + self.n2
    }
}

/// A valid `(s, m)` label: `s >= 0`, `|m| <= s`, `s - m` integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinLabel {
    s: HalfInt,
    m: HalfInt,
}

impl SpinLabel {
    pub fn new(s: HalfInt, m: HalfInt) -> Result<Self> {
        check_label(s, m)?;
        Ok(SpinLabel { s, m })
    }

    pub fn s(self) -> HalfInt {
        self.s
    }

    pub fn m(self) -> HalfInt {
        self.m
    }
}

pub fn modes_to_spin(mp: ModePair) -> SpinLabel {
    let (n1, n2) = (mp.n1 as i32, mp.n2 as i32);
    SpinLabel { s: HalfInt::from_twice(n1 + n2), m: HalfInt::from_twice(n1 - n2) }
}

/// Inverse of [`modes_to_spin`]: `n1 = s + m`, `n2 = s - m`.
pub fn spin_to_modes(sl: SpinLabel) -> ModePair {
    let n1 = (sl.s + sl.m).to_int().expect("validated label");
    let n2 = (sl.s - sl.m).to_int().expect("validated label");
    ModePair { n1: n1 as u32, n2: n2 as u32 }
}

/// Checked variant of [`spin_to_modes`] for raw half-integers.
pub fn spin_to_modes_checked(s: HalfInt, m: HalfInt) -> Result<ModePair> {
    Ok(spin_to_modes(SpinLabel::new(s, m)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// `<sigma, mu±1| S_± |sigma, mu> = sqrt(sigma(sigma+1) - mu(mu±1))`, zero at
/// the edge of the ladder.
pub fn ladder_coeff(dir: Ladder, sigma: HalfInt, mu: HalfInt) -> f64 {
    let (s, m) = (sigma.value(), mu.value());
    let arg = match dir {
        Ladder::Raise => s * (s + 1.0) - m * (m + 1.0),
        Ladder::Lower => s * (s + 1.0) - m * (m - 1.0),
    };
    let at_edge = match dir {
        Ladder::Raise => mu >= sigma,
        Ladder::Lower => mu <= -sigma,
    };
    if at_edge || arg <= 0.0 {
        0.0
    } else {
        arg.sqrt()
    }
}

/// Which observer a pair of modes belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Alice,
    Bob,
}

/// How Bob's photon counts are turned into a spin projection.
///
/// `Operator` follows Bob's spin operators (`m = (n_b2 - n_b1)/2`) and is the
/// convention every closed form in this crate assumes. `Flipped` is the
/// opposite sign, kept only so validation can demonstrate that it breaks the
/// singlet anticorrelation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BobConvention {
    #[default]
    Operator,
    Flipped,
}

impl BobConvention {
    /// Bob's spin label from physical counts in `b1` and `b2`.
    pub fn label(self, n_b1: u32, n_b2: u32) -> SpinLabel {
        match self {
            BobConvention::Operator => modes_to_spin(ModePair::new(n_b2, n_b1)),
            BobConvention::Flipped => modes_to_spin(ModePair::new(n_b1, n_b2)),
        }
    }
}
