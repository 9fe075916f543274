//! Maximizing the violation over analyzer angles.
//!
//! Multi-start coordinate search: golden-section line searches along the
//! three angles and the two combinations `(1,-1,0)`, `(1,1,0)`, with a
//! shrinking bracket. Starts are a fixed list, so results are deterministic.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::half_int::HalfInt;
use crate::ideal::{ideal_mermin_sides, AngleTriple};
use crate::loss::LossConfig;
use crate::lossy::{lossy_mermin_sides, TruncationPolicy, ViolationRecord};
use crate::source::SqueezeParam;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximum of `f` on `[a, b]` by golden-section search, assuming one peak.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Initial half-width of each line search.
    pub initial_step: f64,
    /// Stop once the half-width falls below this.
    pub min_step: f64,
    /// Golden-section tolerance on the line parameter.
    pub line_tol: f64,
    pub max_passes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { initial_step: 0.6, min_step: 1e-7, line_tol: 1e-9, max_passes: 400 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub angles: AngleTriple,
    pub value: f64,
    pub evaluations: usize,
}

const DIRECTIONS: [[f64; 3]; 5] =
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, -1.0, 0.0], [1.0, 1.0, 0.0]];

fn step(a: AngleTriple, d: [f64; 3], t: f64) -> AngleTriple {
    AngleTriple::new(a.alpha + t * d[0], a.beta + t * d[1], a.gamma + t * d[2])
}

/// Coordinate search from one start.
pub fn coordinate_search(mut f: impl FnMut(AngleTriple) -> f64, start: AngleTriple, opts: &SearchOptions) -> SearchResult {
    let mut x = start;
    let mut fx = f(x);
    let mut evals = 1;
    let mut w = opts.initial_step;
    for _ in 0..opts.max_passes {
        let before = fx;
        for d in DIRECTIONS {
            let (t, ft) = golden_section_max(
                |t| {
                    evals += 1;
                    f(step(x, d, t))
                },
                -w,
                w,
                opts.line_tol,
            );
            if ft > fx {
                x = step(x, d, t);
                fx = ft;
            }
        }
        if fx - before <= 1e-14 * fx.abs().max(1.0) {
            w *= 0.3;
            if w < opts.min_step {
                break;
            }
        }
    }
    SearchResult { angles: x, value: fx, evaluations: evals }
}

/// Fixed start list: points of the sweep family plus a few off-family ones.
pub fn default_starts() -> Vec<AngleTriple> {
    let mut out: Vec<AngleTriple> = [0.05, 0.25, 0.6].iter().map(|&t| AngleTriple::from_theta(t)).collect();
    out.push(AngleTriple::new(-1.2, 2.1, 0.3));
    out.push(AngleTriple::new(1.9, -1.6, 0.0));
    out
}

/// Best of [`coordinate_search`] over `starts`; ties keep the earlier start.
pub fn maximize(
    mut f: impl FnMut(AngleTriple) -> f64,
    starts: &[AngleTriple],
    opts: &SearchOptions,
) -> SearchResult {
    let mut best: Option<SearchResult> = None;
    let mut evals = 0;
    for &s in starts {
        let res = coordinate_search(&mut f, s, opts);
        evals += res.evaluations;
        if best.map_or(true, |b| res.value > b.value) {
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = evals;
    best
}

/// Angles maximizing the lossless violation for spin `s`.
pub fn optimize_ideal(s: HalfInt) -> SearchResult {
    maximize(|a| ideal_mermin_sides(s, a).violation, &default_starts(), &SearchOptions::default())
}

/// Angles maximizing the sector-conditioned violation under `loss`.
///
/// Points where the evaluation fails count as `-inf`.
pub fn optimize_angles(
    s_star: HalfInt,
    r: SqueezeParam,
    loss: LossConfig,
    policy: &TruncationPolicy,
) -> Result<(AngleTriple, ViolationRecord)> {
    let res = maximize(
        |a| lossy_mermin_sides(s_star, r, loss, a, policy).map_or(f64::NEG_INFINITY, |rec| rec.violation),
        &default_starts(),
        &SearchOptions::default(),
    );
    let rec = lossy_mermin_sides(s_star, r, loss, res.angles, policy)?;
    Ok((res.angles, rec))
}
