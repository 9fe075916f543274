//! Joint outcome distribution `P(s_a, m_a, s_b, m_b; alpha, beta)` under loss.

use serde::{Deserialize, Serialize};

use super::kernel::{pair_signs, probability_factors, SideKernel};
use super::truncation::{accumulate, ln_survival_bound, source_tail_series, TruncationPolicy};
use crate::error::{Error, Result};
use crate::half_int::HalfInt;
use crate::loss::LossConfig;
use crate::schwinger::Side;
use crate::source::{sector_amplitude, source_tail_mass, SqueezeParam};
use crate::special::DMatrix;

/// Which measured sectors `(s_a, s_b)` to resolve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeSectors {
    /// Only `s_a = s_b = s`.
    Diagonal(HalfInt),
    /// Every pair with `s_a, s_b <= bound`.
    UpTo(HalfInt),
}

impl OutcomeSectors {
    fn pairs(self) -> Vec<(HalfInt, HalfInt)> {
        match self {
            OutcomeSectors::Diagonal(s) => vec![(s, s)],
            OutcomeSectors::UpTo(b) => HalfInt::half_steps(HalfInt::ZERO, b)
                .flat_map(|a| HalfInt::half_steps(HalfInt::ZERO, b).map(move |c| (a, c)))
                .collect(),
        }
    }

    fn highest(self) -> HalfInt {
        match self {
            OutcomeSectors::Diagonal(s) | OutcomeSectors::UpTo(s) => s,
        }
    }
}

/// Probabilities of one measured sector pair, `m_a`-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorBlock {
    pub s_a: HalfInt,
    pub s_b: HalfInt,
    pub probabilities: Vec<f64>,
    /// Bound on the probability the sources above the cutoff would add.
    pub tail_bound: f64,
}

impl SectorBlock {
    pub fn get(&self, m_a: HalfInt, m_b: HalfInt) -> f64 {
        if m_a.abs() > self.s_a || m_b.abs() > self.s_b || !(self.s_a - m_a).is_integer() || !(self.s_b - m_b).is_integer() {
            return 0.0;
        }
        let dim_b = self.s_b.twice() as usize + 1;
        let (i, j) = (((m_a + self.s_a).twice() / 2) as usize, ((m_b + self.s_b).twice() / 2) as usize);
        self.probabilities[i * dim_b + j]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// `(m_a, m_b, p)` in `m_a`-major order.
    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, HalfInt, f64)> + '_ {
        let (sa, sb) = (self.s_a, self.s_b);
        sa.projections()
            .flat_map(move |ma| sb.projections().map(move |mb| (ma, mb)))
            .zip(self.probabilities.iter())
            .map(|((ma, mb), &p)| (ma, mb, p))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointOutcomeDistribution {
    pub blocks: Vec<SectorBlock>,
    /// Source probability above the cutoff; an upper bound on everything the
    /// truncation dropped from any sector.
    pub tail_bound: f64,
    pub s_cutoff_used: HalfInt,
    pub converged: bool,
}

impl JointOutcomeDistribution {
    pub fn block(&self, s_a: HalfInt, s_b: HalfInt) -> Option<&SectorBlock> {
        self.blocks.iter().find(|b| b.s_a == s_a && b.s_b == s_b)
    }

    /// Zero for unresolved sectors and invalid labels.
    pub fn get(&self, s_a: HalfInt, m_a: HalfInt, s_b: HalfInt, m_b: HalfInt) -> f64 {
        self.block(s_a, s_b).map_or(0.0, |b| b.get(m_a, m_b))
    }

    /// All `((s_a, m_a, s_b, m_b), p)` entries.
    pub fn entries(&self) -> impl Iterator<Item = ((HalfInt, HalfInt, HalfInt, HalfInt), f64)> + '_ {
        self.blocks.iter().flat_map(|b| b.iter().map(move |(ma, mb, p)| ((b.s_a, ma, b.s_b, mb), p)))
    }
}

/// Entries this negative are treated as bugs rather than roundoff.
const NEGATIVE_LIMIT: f64 = -1e-9;

/// Bound on `P(s_a, s_b)` contributed by sources above `cutoff`.
pub(crate) fn sector_tail_bound(r: SqueezeParam, loss: &LossConfig, s_a: HalfInt, s_b: HalfInt, cutoff: HalfInt) -> f64 {
    let (a1, a2) = loss.schwinger_etas(Side::Alice);
    let (b1, b2) = loss.schwinger_etas(Side::Bob);
    let (ka, kb) = (s_a.twice() as u32, s_b.twice() as u32);
    source_tail_series(r, cutoff, |n| {
        ln_survival_bound(n, ka, a1.max(a2), a1.min(a2)) + ln_survival_bound(n, kb, b1.max(b2), b1.min(b2))
    })
}

pub(crate) fn side_kernels(loss: &LossConfig, fast: bool) -> (SideKernel, SideKernel) {
    let (a1, a2) = loss.schwinger_etas(Side::Alice);
    let (b1, b2) = loss.schwinger_etas(Side::Bob);
    (SideKernel::new(a1, a2, false, fast), SideKernel::new(b1, b2, true, fast))
}

/// Joint distribution over the requested sectors.
///
/// Equal efficiencies use the factored weight `eta^(2 sigma) (1-eta)^(...)`;
/// [`lossy_joint_distribution_general`] forces the per-mode product.
pub fn lossy_joint_distribution(
    r: SqueezeParam,
    loss: LossConfig,
    alpha: f64,
    beta: f64,
    outcomes: OutcomeSectors,
    policy: &TruncationPolicy,
) -> Result<JointOutcomeDistribution> {
    joint_distribution(r, loss, alpha, beta, outcomes, policy, true)
}

pub fn lossy_joint_distribution_general(
    r: SqueezeParam,
    loss: LossConfig,
    alpha: f64,
    beta: f64,
    outcomes: OutcomeSectors,
    policy: &TruncationPolicy,
) -> Result<JointOutcomeDistribution> {
    joint_distribution(r, loss, alpha, beta, outcomes, policy, false)
}

fn joint_distribution(
    r: SqueezeParam,
    loss: LossConfig,
    alpha: f64,
    beta: f64,
    outcomes: OutcomeSectors,
    policy: &TruncationPolicy,
    fast: bool,
) -> Result<JointOutcomeDistribution> {
    if outcomes.highest() < HalfInt::ZERO {
        return Err(Error::InvalidParameter("outcome sector must be >= 0".into()));
    }
    let pairs = outcomes.pairs();
    let mut groups = Vec::with_capacity(pairs.len());
    let mut offset = 0;
    for &(sa, sb) in &pairs {
        let n = (sa.twice() as usize + 1) * (sb.twice() as usize + 1);
        groups.push(offset..offset + n);
        offset += n;
    }
    let top = outcomes.highest();
    let dims_alpha: Vec<DMatrix> = HalfInt::half_steps(HalfInt::ZERO, top).map(|s| DMatrix::new(s, alpha)).collect();
    let dims_beta: Vec<DMatrix> = HalfInt::half_steps(HalfInt::ZERO, top).map(|s| DMatrix::new(s, beta)).collect();
    let (ka, kb) = side_kernels(&loss, fast);

    let mut buf = Vec::new();
    let n_spins = top.twice() as usize + 1;
    let mut fa: Vec<Option<Vec<f64>>> = vec![None; n_spins];
    let mut fb: Vec<Option<Vec<f64>>> = vec![None; n_spins];

    let run = accumulate(
        policy,
        offset,
        &groups,
        |g, cutoff| {
            let (sa, sb) = pairs[g];
            sector_tail_bound(r, &loss, sa, sb, cutoff)
        },
        |s, entries| {
            let w = sector_amplitude(s, r);
            let w2 = w * w;
            if w2 == 0.0 {
                return;
            }
            fa.iter_mut().for_each(|x| *x = None);
            fb.iter_mut().for_each(|x| *x = None);
            let signs = pair_signs(s);
            for (&(sa, sb), range) in pairs.iter().zip(&groups) {
                if sa > s || sb > s {
                    continue;
                }
                let (ia, ib) = (sa.twice() as usize, sb.twice() as usize);
                let a = fa[ia].get_or_insert_with(|| {
                    let mut v = Vec::new();
                    probability_factors(&ka, s, sa, &dims_alpha[ia], &mut buf, &mut v);
                    v
                });
                let (dim_a, dim_b) = (ia + 1, ib + 1);
                let b = fb[ib].get_or_insert_with(|| {
                    let mut v = Vec::new();
                    probability_factors(&kb, s, sb, &dims_beta[ib], &mut buf, &mut v);
                    v
                });
                let block = &mut entries[range.clone()];
                for (p, &sign) in signs.iter().enumerate() {
                    let ra = &a[p * dim_a..][..dim_a];
                    let rb = &b[p * dim_b..][..dim_b];
                    let c = w2 * sign;
                    for (i, &x) in ra.iter().enumerate() {
                        if x == 0.0 {
                            continue;
                        }
                        let cx = c * x;
                        for (j, &y) in rb.iter().enumerate() {
                            block[i * dim_b + j] += cx * y;
                        }
                    }
                }
            }
        },
    );

    let mut blocks = Vec::with_capacity(pairs.len());
    for (&(sa, sb), range) in pairs.iter().zip(&groups) {
        let mut probabilities = run.entries[range.clone()].to_vec();
        for p in probabilities.iter_mut() {
            if *p < NEGATIVE_LIMIT {
                return Err(Error::NegativeProbability {
                    value: *p,
                    context: format!("sector ({sa}, {sb}), r={}, alpha={alpha}, beta={beta}", r.value()),
                });
            }
            *p = p.max(0.0);
        }
        let tail_bound = sector_tail_bound(r, &loss, sa, sb, run.cutoff);
        blocks.push(SectorBlock { s_a: sa, s_b: sb, probabilities, tail_bound });
    }
    Ok(JointOutcomeDistribution {
        blocks,
        tail_bound: source_tail_mass(r, run.cutoff),
        s_cutoff_used: run.cutoff,
        converged: run.converged,
    })
}
