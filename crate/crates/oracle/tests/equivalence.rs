use mermin_core::half_int::HalfInt;
use mermin_core::lossy::{lossy_correlation, lossy_joint_distribution, CorrelationSector, OutcomeSectors};
use mermin_core::schwinger::BobConvention;
use mermin_core::{LossConfig, SqueezeParam, TruncationPolicy};
use mermin_oracle::simulate;

const CUTOFF: u32 = 4;

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn compare(r: f64, loss: LossConfig, alpha: f64, beta: f64) {
    let top = h(CUTOFF as i32);
    let policy = TruncationPolicy::fixed(top);
    let sq = SqueezeParam::new(r).unwrap();
    let oracle = simulate(r, &loss, alpha, beta, CUTOFF, BobConvention::Operator);
    let closed = lossy_joint_distribution(sq, loss, alpha, beta, OutcomeSectors::UpTo(top), &policy).unwrap();
    for ((sa, ma, sb, mb), p) in closed.entries() {
        let q = oracle.get(sa, ma, sb, mb);
        assert!((p - q).abs() < 1e-8, "r={r} {loss:?} ({sa} {ma} {sb} {mb}): {p} vs {q}");
    }
    for s2 in 1..=CUTOFF as i32 {
        let c = lossy_correlation(sq, loss, alpha, beta, CorrelationSector::Conditioned(h(s2)), &policy).unwrap();
        assert!((c.value - oracle.conditioned_correlation(h(s2))).abs() < 1e-8);
    }
    let c = lossy_correlation(sq, loss, alpha, beta, CorrelationSector::All, &policy).unwrap();
    assert!((c.value - oracle.correlation()).abs() < 1e-8);
}

#[test]
fn equal_losses() {
    for eta in [0.8, 0.5] {
        compare(0.5, LossConfig::equal(eta).unwrap(), 0.3, -1.2);
    }
}

#[test]
fn zero_angles() {
    compare(0.5, LossConfig::equal(0.8).unwrap(), 0.0, 0.0);
}

#[test]
fn unequal_losses() {
    compare(0.2, LossConfig::new(0.9, 0.55, 0.7, 0.35).unwrap(), 1.4, 0.25);
}
