//! Per-side factors of the lossy sums for one source sector.
//!
//! Only `s = s'` source terms survive a sector measurement, so every kernel
//! here works on the decohered `|s m><s m'|` of one side. The source index
//! `m` always refers to Alice's label; Bob's operator is `|s -m><s -m'|`.

use crate::half_int::HalfInt;
use crate::loss::{decohere_spin_op_sector, photon_counts, photon_splits};
use crate::log_mag::LogMagnitude;
use crate::schwinger::{ladder_coeff, Ladder};
use crate::special::{ln_factorial, DMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Weights {
    /// Per-mode efficiencies, full log-domain product.
    General { eta1: f64, eta2: f64 },
    /// Equal efficiencies: `eta^(2 sigma) (1-eta)^(2(s-sigma))` times the
    /// half-power binomials.
    Equal { eta: f64 },
    /// Binomial part only, efficiency factors left to the caller.
    Bare,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SideKernel {
    weights: Weights,
    /// Bob's kernel relabels source `m` as `-m`.
    flip: bool,
}

fn ln_binom(n: u32, k: u32) -> f64 {
    ln_factorial(n.into()) - ln_factorial(k.into()) - ln_factorial((n - k).into())
}

impl SideKernel {
    pub fn new(eta1: f64, eta2: f64, flip: bool, fast: bool) -> Self {
        let weights = if fast && eta1 == eta2 { Weights::Equal { eta: eta1 } } else { Weights::General { eta1, eta2 } };
        SideKernel { weights, flip }
    }

    pub fn bare(flip: bool) -> Self {
        SideKernel { weights: Weights::Bare, flip }
    }

    fn label(&self, m: HalfInt) -> HalfInt {
        if self.flip {
            -m
        } else {
            m
        }
    }

    /// `(mu, weight)` for kets `|sigma mu>` of the decohered side operator
    /// built from source labels `m`, `m'`.
    pub fn terms(&self, s: HalfInt, m: HalfInt, m_p: HalfInt, sigma: HalfInt, out: &mut Vec<(HalfInt, f64)>) {
        let (ms, mps) = (self.label(m), self.label(m_p));
        let pref = match self.weights {
            Weights::General { eta1, eta2 } => {
                decohere_spin_op_sector(s, ms, s, mps, eta1, eta2, sigma, out);
                return;
            }
            Weights::Equal { eta } => {
                let lost = (s - sigma).value();
                let p = LogMagnitude::pow_nonneg(eta, 2.0 * sigma.value())
                    * LogMagnitude::pow_nonneg(1.0 - eta, 2.0 * lost);
                p.to_f64()
            }
            Weights::Bare => 1.0,
        };
        out.clear();
        if pref == 0.0 {
            return;
        }
        let (n1, n2) = photon_counts(s, ms);
        let (n1p, n2p) = photon_counts(s, mps);
        for [k1, k2, k1p, k2p] in photon_splits(s, ms, s, mps, sigma) {
            let lb = 0.5 * (ln_binom(n1, k1) + ln_binom(n1p, k1p) + ln_binom(n2, k2) + ln_binom(n2p, k2p));
            out.push((HalfInt::from_twice(k1 as i32 - k2 as i32), pref * lb.exp()));
        }
    }

    /// Difference `m'_side - m_side` between bra and ket labels.
    fn shift(&self, m: HalfInt, m_p: HalfInt) -> HalfInt {
        self.label(m_p) - self.label(m)
    }
}

fn index(m: HalfInt, s: HalfInt) -> usize {
    ((m + s).twice() / 2) as usize
}

/// `(-1)^(2s - m - m')` for every source pair, row-major in `(m, m')`.
pub(crate) fn pair_signs(s: HalfInt) -> Vec<f64> {
    let mut out = Vec::new();
    for m in s.projections() {
        for mp in s.projections() {
            out.push((s - m + s - mp).parity_sign().expect("integer"));
        }
    }
    out
}

/// Rows `(m, m')` of `sum_mu w d_{mu + shift, k}(angle) d_{mu, k}(angle)` over
/// outcomes `k` of spin `sigma`; `out` is `(2s+1)^2 x (2 sigma + 1)`.
pub(crate) fn probability_factors(
    kernel: &SideKernel,
    s: HalfInt,
    sigma: HalfInt,
    d: &DMatrix,
    buf: &mut Vec<(HalfInt, f64)>,
    out: &mut Vec<f64>,
) {
    let dim_s = s.twice() as usize + 1;
    let dim = sigma.twice() as usize + 1;
    out.clear();
    out.resize(dim_s * dim_s * dim, 0.0);
    for (im, m) in s.projections().enumerate() {
        for (imp, mp) in s.projections().enumerate() {
            kernel.terms(s, m, mp, sigma, buf);
            if buf.is_empty() {
                continue;
            }
            let shift = kernel.shift(m, mp);
            let row = &mut out[(im * dim_s + imp) * dim..][..dim];
            for &(mu, w) in buf.iter() {
                let (i, j) = (index(mu, sigma), index(mu + shift, sigma));
                for (k, cell) in row.iter_mut().enumerate() {
                    *cell += w * d.at(j, k) * d.at(i, k);
                }
            }
        }
    }
}

/// One side's sector-resolved moments for a source sector, indexed by
/// Alice's source label `m`.
#[derive(Clone, Debug, Default)]
pub(crate) struct SideMoments {
    /// Trace of the diagonal operator (`m' = m`).
    pub trace: Vec<f64>,
    /// `<S_z>` contribution of the diagonal operator.
    pub z: Vec<f64>,
    /// Contribution of `|m_side><m_side + 1|` through `S_+`.
    pub up: Vec<f64>,
    /// Contribution of `|m_side><m_side - 1|` through `S_-`.
    pub down: Vec<f64>,
}

impl SideMoments {
    fn reset(&mut self, n: usize) {
        for v in [&mut self.trace, &mut self.z, &mut self.up, &mut self.down] {
            v.clear();
            v.resize(n, 0.0);
        }
    }
}

pub(crate) fn side_moments(
    kernel: &SideKernel,
    s: HalfInt,
    sigma: HalfInt,
    buf: &mut Vec<(HalfInt, f64)>,
    out: &mut SideMoments,
) {
    let dim_s = s.twice() as usize + 1;
    out.reset(dim_s);
    for (im, m) in s.projections().enumerate() {
        kernel.terms(s, m, m, sigma, buf);
        for &(mu, w) in buf.iter() {
            out.trace[im] += w;
            out.z[im] += w * mu.value();
        }
        // the side label moves by +1 or -1 with the source label, depending
        // on the side
        for mp in [m + HalfInt::ONE, m - HalfInt::ONE] {
            if mp.abs() > s {
                continue;
            }
            kernel.terms(s, m, mp, sigma, buf);
            let up = kernel.shift(m, mp) == HalfInt::ONE;
            let dir = if up { Ladder::Raise } else { Ladder::Lower };
            let acc: f64 = buf.iter().map(|&(mu, w)| w * ladder_coeff(dir, sigma, mu)).sum();
            if up {
                out.up[im] += acc;
            } else {
                out.down[im] += acc;
            }
        }
    }
}
