use mermin_core::half_int::HalfInt;
use mermin_core::schwinger::{BobConvention, Side};
use mermin_core::LossConfig;
use mermin_oracle::*;

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn source(r: f64, cutoff: u32) -> DensityMatrixLite {
    DensityMatrixLite::from_state(&build_epr2(r, r, cutoff, true))
}

fn single(occ: Occupation, cutoff: u32) -> DensityMatrixLite {
    let mut amplitudes = std::collections::BTreeMap::new();
    amplitudes.insert(occ, num_complex::Complex64::new(1.0, 0.0));
    DensityMatrixLite::from_state(&TruncatedFockState { cutoff, amplitudes })
}

#[test]
fn vacuum_source() {
    let psi = build_epr2(0.0, 0.0, 4, true);
    assert_eq!(psi.amplitudes.len(), 1);
    assert_eq!(psi.amplitude([0, 0, 0, 0]).re, 1.0);
    let t = measure_joint(&DensityMatrixLite::from_state(&psi), BobConvention::Operator);
    assert_eq!(t.get(h(0), h(0), h(0), h(0)), 1.0);
}

#[test]
fn amplitudes_are_number_correlated() {
    let psi = build_epr2(0.4, 0.7, 4, false);
    for (o, a) in &psi.amplitudes {
        assert!(o[0] == o[2] && o[1] == o[3]);
        let want = 0.4f64.tanh().powi(o[0] as i32) * 0.7f64.tanh().powi(o[1] as i32) / (0.4f64.cosh() * 0.7f64.cosh());
        assert!((a.re - want).abs() < 1e-15 && a.im == 0.0);
    }
    assert!(psi.deficit() > 0.0 && psi.deficit() < 0.05);
}

#[test]
fn shifted_sectors_are_singlets() {
    let r = 0.5f64;
    let psi = build_epr2(r, r, 4, true);
    for s2 in 0..=4u32 {
        // |s m>_A = |s+m, s-m>, |s -m>_B = (n_b1, n_b2) = (s+m, s-m)
        let block: Vec<(i32, f64)> = (0..=s2).map(|n1| (n1 as i32 * 2 - s2 as i32, psi.amplitude([n1, s2 - n1, n1, s2 - n1]).re)).collect();
        let norm: f64 = block.iter().map(|(_, a)| a * a).sum::<f64>().sqrt();
        let tau2 = r.tanh().powi(s2 as i32) / r.cosh().powi(2);
        assert!((norm - tau2 * ((s2 + 1) as f64).sqrt()).abs() < 1e-12);
        for (m2, a) in block {
            // (-1)^{s-m} with s-m = n_a2
            let sign = if ((s2 as i32 - m2) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a / norm - sign / ((s2 + 1) as f64).sqrt()).abs() < 1e-10, "2s={s2} 2m={m2}");
        }
    }
}

#[test]
fn loss_identity_and_single_photon() {
    let dm = source(0.6, 4);
    assert!(apply_loss(&dm, Mode::B2, 1.0).max_abs_diff(&dm) < 1e-15);
    let one = single([1, 0, 0, 0], 2);
    let out = apply_loss(&one, Mode::A1, 0.75);
    assert!((out.get([0, 0, 0, 0], [0, 0, 0, 0]).re - 0.25).abs() < 1e-15);
    assert!((out.get([1, 0, 0, 0], [1, 0, 0, 0]).re - 0.75).abs() < 1e-15);
    assert!(out.get([1, 0, 0, 0], [0, 0, 0, 0]).norm() == 0.0);
}

#[test]
fn loss_composes_multiplicatively() {
    let dm = source(0.5, 4);
    for mode in Mode::ALL {
        let two = apply_loss(&apply_loss(&dm, mode, 0.8), mode, 0.65);
        let one = apply_loss(&dm, mode, 0.8 * 0.65);
        assert!(two.max_abs_diff(&one) < 1e-12);
    }
}

#[test]
fn trace_and_hermiticity_at_every_stage() {
    let r = 0.5;
    let psi = build_epr2(r, r, 4, true);
    let tr0 = psi.norm_sqr();
    let mut dm = DensityMatrixLite::from_state(&psi);
    let check = |dm: &DensityMatrixLite| {
        assert!((dm.trace() - tr0).abs() < 1e-12);
        assert!(dm.hermiticity_error() < 1e-12);
    };
    check(&dm);
    for (mode, eta) in [(Mode::A1, 0.9), (Mode::A2, 0.6), (Mode::B1, 0.75), (Mode::B2, 0.5)] {
        dm = apply_loss(&dm, mode, eta);
        check(&dm);
    }
    dm = apply_analyzer(&dm, Side::Alice, 0.7);
    check(&dm);
    dm = apply_analyzer(&dm, Side::Bob, -2.3);
    check(&dm);
    let t = measure_joint(&dm, BobConvention::Operator);
    assert!((t.total() - tr0).abs() < 1e-12);
}

#[test]
fn analyzer_basics() {
    let dm = apply_loss(&source(0.4, 3), Mode::A2, 0.7);
    assert!(apply_analyzer(&dm, Side::Alice, 0.0).max_abs_diff(&dm) < 1e-15);
    assert!(apply_analyzer(&dm, Side::Bob, 0.0).max_abs_diff(&dm) < 1e-15);

    // per-side photon numbers do not depend on the angle
    let base = measure_joint(&dm, BobConvention::Operator);
    let rot = measure_joint(&apply_analyzer(&apply_analyzer(&dm, Side::Alice, 1.3), Side::Bob, -0.4), BobConvention::Operator);
    for sa in 0..=3 {
        for sb in 0..=3 {
            assert!((base.sector_probability(h(sa), h(sb)) - rot.sector_probability(h(sa), h(sb))).abs() < 1e-13);
        }
    }

    let alpha = 0.9f64;
    let out = apply_analyzer(&single([1, 0, 0, 0], 1), Side::Alice, alpha);
    assert!((out.get([1, 0, 0, 0], [1, 0, 0, 0]).re - (alpha / 2.0).cos().powi(2)).abs() < 1e-14);
    assert!((out.get([0, 1, 0, 0], [0, 1, 0, 0]).re - (alpha / 2.0).sin().powi(2)).abs() < 1e-14);
}

#[test]
fn loss_commutes_with_analyzer() {
    let dm = source(0.5, 4);
    let eta = 0.7;
    let before = {
        let d = apply_loss(&apply_loss(&dm, Mode::A1, eta), Mode::A2, eta);
        apply_analyzer(&d, Side::Alice, 1.1)
    };
    let after = {
        let d = apply_analyzer(&dm, Side::Alice, 1.1);
        apply_loss(&apply_loss(&d, Mode::A1, eta), Mode::A2, eta)
    };
    let (p, q) = (measure_joint(&before, BobConvention::Operator), measure_joint(&after, BobConvention::Operator));
    for (k, v) in &p.probabilities {
        assert!((v - q.probabilities[k]).abs() < 1e-10);
    }
}

#[test]
fn lossless_support_is_diagonal() {
    let t = simulate(0.5, &LossConfig::lossless(), 0.4, 2.0, 4, BobConvention::Operator);
    for ((sa, _, sb, _), p) in &t.probabilities {
        assert!(sa == sb || *p < 1e-15);
    }
}

#[test]
fn lossless_aligned_analyzers_anticorrelate() {
    let t = simulate(0.5, &LossConfig::lossless(), 0.8, 0.8, 4, BobConvention::Operator);
    for ((_, ma, _, mb), p) in &t.probabilities {
        assert!(*ma == -*mb || *p < 1e-14);
    }
    // the opposite labelling turns anticorrelation into correlation
    let f = simulate(0.5, &LossConfig::lossless(), 0.8, 0.8, 4, BobConvention::Flipped);
    assert!(f.conditioned_correlation(h(2)) > 0.0);
}
