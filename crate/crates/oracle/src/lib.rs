//! Brute-force four-mode Fock-space simulation of the lossy double EPR
//! source, used to cross-check the closed-form sums in `mermin-core`.
//!
//! Modes are ordered `(a1, a2, b1, b2)`. Every stage works on a dense
//! density matrix over occupations `0..=cutoff` per mode. Nothing here
//! reuses the loss or rotation formulas of the core crate; only the spin
//! labelling of photon counts is shared.

use std::collections::BTreeMap;

use mermin_core::half_int::HalfInt;
use mermin_core::schwinger::{modes_to_spin, BobConvention, ModePair, Side};
use mermin_core::LossConfig;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    A1,
    A2,
    B1,
    B2,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::A1, Mode::A2, Mode::B1, Mode::B2];

    fn slot(self) -> usize {
        self as usize
    }
}

pub type Occupation = [u32; 4];

/// Pure state on a truncated four-mode Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFockState {
    pub cutoff: u32,
    pub amplitudes: BTreeMap<Occupation, Complex64>,
}

impl TruncatedFockState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Probability lost to the truncation.
    pub fn deficit(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    pub fn amplitude(&self, occ: Occupation) -> Complex64 {
        self.amplitudes.get(&occ).copied().unwrap_or_default()
    }
}

/// Double EPR state from two squeezers, `a1`/`b1` from the first and
/// `a2`/`b2` from the second.
///
/// Kept terms have `n1 + n2 <= cutoff`, so each side holds complete spin
/// multiplets up to `s = cutoff/2` and no mode exceeds `cutoff`. With
/// `pi_shift_on_a2` each term picks up `(-1)^{n_a2}`.
///
/// # Panics
/// If a squeezing parameter is negative or not finite.
pub fn build_epr2(r1: f64, r2: f64, cutoff: u32, pi_shift_on_a2: bool) -> TruncatedFockState {
    assert!(r1.is_finite() && r1 >= 0.0 && r2.is_finite() && r2 >= 0.0, "squeezing must be finite and >= 0");
    let (t1, t2) = (r1.tanh(), r2.tanh());
    let norm = 1.0 / (r1.cosh() * r2.cosh());
    let mut amplitudes = BTreeMap::new();
    for n1 in 0..=cutoff {
        for n2 in 0..=cutoff - n1 {
            let mut a = norm * t1.powi(n1 as i32) * t2.powi(n2 as i32);
            if pi_shift_on_a2 && n2 % 2 == 1 {
                a = -a;
            }
            if a != 0.0 {
                amplitudes.insert([n1, n2, n1, n2], Complex64::new(a, 0.0));
            }
        }
    }
    TruncatedFockState { cutoff, amplitudes }
}

/// Dense density matrix over the truncated four-mode number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrixLite {
    pub cutoff: u32,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrixLite {
    pub fn zeros(cutoff: u32) -> Self {
        let dim = (cutoff as usize + 1).pow(4);
        DensityMatrixLite { cutoff, dim, entries: vec![Complex64::default(); dim * dim] }
    }

    pub fn from_state(psi: &TruncatedFockState) -> Self {
        let mut dm = Self::zeros(psi.cutoff);
        let terms: Vec<(usize, Complex64)> = psi.amplitudes.iter().map(|(&o, &a)| (dm.index(o), a)).collect();
        for &(i, a) in &terms {
            for &(j, b) in &terms {
                dm.entries[i * dm.dim + j] = a * b.conj();
            }
        }
        dm
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, occ: Occupation) -> usize {
        let c = self.cutoff as usize + 1;
        occ.iter().fold(0, |acc, &n| {
            debug_assert!(n <= self.cutoff);
            acc * c + n as usize
        })
    }

    fn occupation(&self, mut i: usize) -> Occupation {
        let c = self.cutoff as usize + 1;
        let mut occ = [0; 4];
        for slot in (0..4).rev() {
            occ[slot] = (i % c) as u32;
            i /= c;
        }
        occ
    }

    pub fn get(&self, ket: Occupation, bra: Occupation) -> Complex64 {
        if ket.iter().chain(&bra).any(|&n| n > self.cutoff) {
            return Complex64::default();
        }
        self.entries[self.index(ket) * self.dim + self.index(bra)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = self.entries[i * self.dim + j] - self.entries[j * self.dim + i].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.cutoff, other.cutoff);
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Apply `rho -> sum_k T_k rho T_k^dag` where `map(i)` lists the images
    /// `(T_k)_{i' i}` of basis vector `i` for every `k`.
    fn conjugate_by(&self, images: &[Vec<Vec<(usize, f64)>>]) -> Self {
        let mut out = Self::zeros(self.cutoff);
        let n_ops = images.first().map_or(0, |v| v.len());
        for i in 0..self.dim {
            for j in 0..self.dim {
                let rho = self.entries[i * self.dim + j];
                if rho == Complex64::default() {
                    continue;
                }
                for k in 0..n_ops {
                    for &(ip, ci) in &images[i][k] {
                        for &(jp, cj) in &images[j][k] {
                            out.entries[ip * self.dim + jp] += rho * (ci * cj);
                        }
                    }
                }
            }
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Kraus element for losing `l` photons out of `n`.
fn loss_kraus(n: u32, l: u32, eta: f64) -> f64 {
    (binomial(n, l) * eta.powi((n - l) as i32) * (1.0 - eta).powi(l as i32)).sqrt()
}

/// Binomial loss of transmissivity `eta` on one mode.
///
/// # Panics
/// If `eta` is outside `[0, 1]`.
pub fn apply_loss(dm: &DensityMatrixLite, mode: Mode, eta: f64) -> DensityMatrixLite {
    assert!((0.0..=1.0).contains(&eta), "eta must lie in [0, 1]");
    let slot = mode.slot();
    let c = dm.cutoff;
    let images: Vec<Vec<Vec<(usize, f64)>>> = (0..dm.dim)
        .map(|i| {
            let occ = dm.occupation(i);
            let n = occ[slot];
            (0..=c)
                .map(|l| {
                    if l > n {
                        return Vec::new();
                    }
                    let mut o = occ;
                    o[slot] = n - l;
                    vec![(dm.index(o), loss_kraus(n, l, eta))]
                })
                .collect()
        })
        .collect();
    dm.conjugate_by(&images)
}

/// Loss on all four modes with the efficiencies of `loss`.
pub fn apply_loss_config(dm: &DensityMatrixLite, loss: &LossConfig) -> DensityMatrixLite {
    let dm = apply_loss(dm, Mode::A1, loss.eta_a1);
    let dm = apply_loss(&dm, Mode::A2, loss.eta_a2);
    let dm = apply_loss(&dm, Mode::B1, loss.eta_b1);
    apply_loss(&dm, Mode::B2, loss.eta_b2)
}

/// Multiply two polynomials in `(x, y)` stored as `coef[p][q]`.
fn poly_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (na, nb) = (a.len(), b.len());
    let mut out = vec![vec![0.0; na + nb - 1]; na + nb - 1];
    for (p, row) in a.iter().enumerate() {
        for (q, &x) in row.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (u, rb) in b.iter().enumerate() {
                for (v, &y) in rb.iter().enumerate() {
                    out[p + u][q + v] += x * y;
                }
            }
        }
    }
    out
}

/// Components of the detector state `|N1, N2>` on the input modes `(p, q)`,
/// for detector modes `D1 = cos(t/2) m1 + sin(t/2) m2`,
/// `D2 = -sin(t/2) m1 + cos(t/2) m2`.
fn detector_state(n1: u32, n2: u32, angle: f64) -> Vec<(u32, u32, f64)> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let mut poly = vec![vec![1.0]];
    for _ in 0..n1 {
        poly = poly_mul(&poly, &[vec![0.0, s], vec![c, 0.0]]);
    }
    for _ in 0..n2 {
        poly = poly_mul(&poly, &[vec![0.0, c], vec![-s, 0.0]]);
    }
    let norm = (factorial(n1) * factorial(n2)).sqrt();
    let mut out = Vec::new();
    for (p, row) in poly.iter().enumerate() {
        for (q, &x) in row.iter().enumerate() {
            if x != 0.0 && p as u32 + q as u32 == n1 + n2 {
                out.push((p as u32, q as u32, x * (factorial(p as u32) * factorial(q as u32)).sqrt() / norm));
            }
        }
    }
    out
}

/// Rotate one side's mode pair into its detector basis.
///
/// Alice's detectors mix `(a1, a2)`. Bob's mix `(b2, b1)`, matching his
/// spin operators. Afterwards the occupation of `a1` (or `b2`) is the count
/// of detector 1.
pub fn apply_analyzer(dm: &DensityMatrixLite, side: Side, angle: f64) -> DensityMatrixLite {
    let (first, second) = match side {
        Side::Alice => (Mode::A1.slot(), Mode::A2.slot()),
        Side::Bob => (Mode::B2.slot(), Mode::B1.slot()),
    };
    // M[(N1,N2),(p,q)] = <N1 N2|_det |p q>_in, real
    let mut transform: BTreeMap<(u32, u32), Vec<(u32, u32, f64)>> = BTreeMap::new();
    for n1 in 0..=dm.cutoff {
        for n2 in 0..=dm.cutoff {
            for (p, q, x) in detector_state(n1, n2, angle) {
                transform.entry((p, q)).or_default().push((n1, n2, x));
            }
        }
    }
    let images: Vec<Vec<Vec<(usize, f64)>>> = (0..dm.dim)
        .map(|i| {
            let occ = dm.occupation(i);
            let col = transform.get(&(occ[first], occ[second])).map(Vec::as_slice).unwrap_or(&[]);
            let mut img = Vec::new();
            for &(n1, n2, x) in col {
                if n1 <= dm.cutoff && n2 <= dm.cutoff {
                    let mut o = occ;
                    o[first] = n1;
                    o[second] = n2;
                    img.push((dm.index(o), x));
                }
            }
            vec![img]
        })
        .collect();
    dm.conjugate_by(&images)
}

/// Outcome key `(s_a, m_a, s_b, m_b)`.
pub type OutcomeKey = (HalfInt, HalfInt, HalfInt, HalfInt);

/// Photon-count statistics read off the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeTable {
    pub probabilities: BTreeMap<OutcomeKey, f64>,
}

impl OutcomeTable {
    pub fn get(&self, s_a: HalfInt, m_a: HalfInt, s_b: HalfInt, m_b: HalfInt) -> f64 {
        self.probabilities.get(&(s_a, m_a, s_b, m_b)).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn sector_probability(&self, s_a: HalfInt, s_b: HalfInt) -> f64 {
        self.probabilities.iter().filter(|(k, _)| k.0 == s_a && k.2 == s_b).map(|(_, p)| p).sum()
    }

    /// `E[m_a m_b | s_a = s_b = s]`.
    pub fn conditioned_correlation(&self, s: HalfInt) -> f64 {
        let num: f64 = self
            .probabilities
            .iter()
            .filter(|(k, _)| k.0 == s && k.2 == s)
            .map(|(k, p)| k.1.value() * k.3.value() * p)
            .sum();
        num / self.sector_probability(s, s)
    }

    /// `E[m_a m_b]` over every recorded outcome.
    pub fn correlation(&self) -> f64 {
        self.probabilities.iter().map(|(k, p)| k.1.value() * k.3.value() * p).sum()
    }
}

pub fn measure_joint(dm: &DensityMatrixLite, bob: BobConvention) -> OutcomeTable {
    let mut probabilities = BTreeMap::new();
    for i in 0..dm.dim {
        let p = dm.entries[i * dm.dim + i].re;
        if p == 0.0 {
            continue;
        }
        let occ = dm.occupation(i);
        let a = modes_to_spin(ModePair::new(occ[0], occ[1]));
        let b = bob.label(occ[2], occ[3]);
        *probabilities.entry((a.s(), a.m(), b.s(), b.m())).or_insert(0.0) += p;
    }
    OutcomeTable { probabilities }
}

/// Source, loss, analyzers and readout in one call, with equal squeezing
/// on both sources.
pub fn simulate(r: f64, loss: &LossConfig, alpha: f64, beta: f64, cutoff: u32, bob: BobConvention) -> OutcomeTable {
    let dm = DensityMatrixLite::from_state(&build_epr2(r, r, cutoff, true));
    let dm = apply_loss_config(&dm, loss);
    let dm = apply_analyzer(&dm, Side::Alice, alpha);
    let dm = apply_analyzer(&dm, Side::Bob, beta);
    measure_joint(&dm, bob)
}
