//! Grid evaluation of the inequality, parallel over points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::half_int::HalfInt;
use crate::ideal::AngleTriple;
use crate::loss::LossConfig;
use crate::lossy::{lossy_mermin_sides_with, Convention, TruncationPolicy, ViolationRecord};
use crate::source::SqueezeParam;

/// Axes of a sweep. Points are visited in lexicographic order
/// `(s_star, r, eta, angles, convention)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub s_star: Vec<HalfInt>,
    pub r: Vec<SqueezeParam>,
    /// Common efficiency of all four detectors.
    pub eta: Vec<f64>,
    pub angles: Vec<AngleTriple>,
    pub conventions: Vec<Convention>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub s_star: HalfInt,
    pub r: SqueezeParam,
    pub eta: f64,
    pub angle_index: usize,
    pub angles: AngleTriple,
    pub convention: Convention,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub point: SweepPoint,
    /// The evaluated record, or the error that point produced.
    pub outcome: Result<ViolationRecord, String>,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.s_star.len() * self.r.len() * self.eta.len() * self.angles.len() * self.conventions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &s_star in &self.s_star {
            for &r in &self.r {
                for &eta in &self.eta {
                    for (angle_index, &angles) in self.angles.iter().enumerate() {
                        for &convention in &self.conventions {
                            out.push(SweepPoint { s_star, r, eta, angle_index, angles, convention });
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn evaluate_point(p: &SweepPoint, policy: &TruncationPolicy) -> SweepRecord {
    let outcome = LossConfig::equal(p.eta)
        .and_then(|loss| lossy_mermin_sides_with(p.s_star, p.r, loss, p.angles, policy, p.convention))
        .map_err(|e| e.to_string());
    SweepRecord { point: *p, outcome }
}

/// Evaluate every grid point on the current rayon pool. Output order is the
/// grid order whatever the scheduling.
pub fn sweep(grid: &SweepGrid, policy_for: impl Fn(HalfInt) -> TruncationPolicy + Sync) -> Vec<SweepRecord> {
    grid.points().par_iter().map(|p| evaluate_point(p, &policy_for(p.s_star))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SweepGrid {
        SweepGrid {
            s_star: vec![HalfInt::HALF, HalfInt::ONE],
            r: vec![SqueezeParam::new(0.5).unwrap()],
            eta: vec![1.0, 0.8],
            angles: vec![AngleTriple::from_theta(0.3)],
            conventions: vec![Convention::Conditioned],
        }
    }

    #[test]
    fn order_is_lexicographic() {
        let pts = grid().points();
        assert_eq!(pts.len(), 4);
        assert_eq!((pts[0].s_star, pts[0].eta), (HalfInt::HALF, 1.0));
        assert_eq!((pts[1].s_star, pts[1].eta), (HalfInt::HALF, 0.8));
        assert_eq!(pts[2].s_star, HalfInt::ONE);
    }

    #[test]
    fn grid_equals_singletons() {
        let g = grid();
        let all = sweep(&g, TruncationPolicy::for_sector);
        for (p, rec) in g.points().iter().zip(&all) {
            let single = evaluate_point(p, &TruncationPolicy::for_sector(p.s_star));
            assert_eq!(&single, rec);
        }
    }

    #[test]
    fn failures_are_flagged() {
        let mut g = grid();
        g.s_star = vec![HalfInt::ZERO];
        let out = sweep(&g, TruncationPolicy::for_sector);
        assert!(out.iter().all(|r| r.outcome.is_err()));
    }
}
