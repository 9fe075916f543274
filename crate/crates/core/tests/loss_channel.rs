use std::collections::BTreeMap;

use mermin_core::half_int::HalfInt;
use mermin_core::loss::{decohere_fock, decohere_single, decohere_spin_op, decohere_spin_op_by_table, sigma_min};
use mermin_core::schwinger::{modes_to_spin, spin_to_modes, ModePair, SpinLabel};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn labels(max_s2: i32) -> Vec<(HalfInt, HalfInt)> {
    (0..=max_s2).flat_map(|s2| h(s2).projections().map(move |m| (h(s2), m))).collect()
}

const ETAS: [f64; 6] = [0.0, 0.1, 0.35, 0.5, 0.8, 1.0];

#[test]
fn trace_preservation() {
    for (s, m) in labels(8) {
        for &e1 in &ETAS {
            for &e2 in &ETAS {
                let terms = decohere_spin_op(s, m, s, m, e1, e2).unwrap();
                let tr: f64 = terms.iter().filter(|t| t.ket == t.bra).map(|t| t.weight.to_f64()).sum();
                assert!((tr - 1.0).abs() < 1e-12, "s={s} m={m} eta=({e1},{e2}) trace={tr}");
            }
        }
    }
}

#[test]
fn single_photon_survives_or_not() {
    let eta = 0.37;
    let terms = decohere_spin_op(h(1), h(1), h(1), h(1), eta, eta).unwrap();
    assert_eq!(terms.len(), 2);
    let mut seen = BTreeMap::new();
    for t in &terms {
        seen.insert((t.ket.s(), t.ket.m()), t.weight.to_f64());
    }
    assert!((seen[&(h(0), h(0))] - (1.0 - eta)).abs() < 1e-15);
    assert!((seen[&(h(1), h(1))] - eta).abs() < 1e-15);
}

#[test]
fn diagonal_output_factorizes_into_fock_marginals() {
    for (s, m) in labels(8) {
        let (e1, e2) = (0.7, 0.25);
        let terms = decohere_spin_op(s, m, s, m, e1, e2).unwrap();
        let mp = spin_to_modes(SpinLabel::new(s, m).unwrap());
        let (p1, p2) = (decohere_fock(mp.n1, e1).unwrap(), decohere_fock(mp.n2, e2).unwrap());
        for t in terms {
            let k = spin_to_modes(t.ket);
            assert!((t.weight.to_f64() - p1[k.n1 as usize] * p2[k.n2 as usize]).abs() < 1e-14);
        }
    }
}

#[test]
fn two_mode_terms_are_products_of_single_mode_terms() {
    let (e1, e2) = (0.6, 0.85);
    for n1 in 0..=4u32 {
        for n2 in 0..=4u32 {
            for n1p in 0..=4u32 {
                for n2p in 0..=4u32 {
                    let a = modes_to_spin(ModePair::new(n1, n2));
                    let b = modes_to_spin(ModePair::new(n1p, n2p));
                    let terms = decohere_spin_op(a.s(), a.m(), b.s(), b.m(), e1, e2).unwrap();
                    let mut want = BTreeMap::new();
                    for t1 in decohere_single(n1, n1p, e1).unwrap() {
                        for t2 in decohere_single(n2, n2p, e2).unwrap() {
                            let ket = modes_to_spin(ModePair::new(t1.ket, t2.ket));
                            let bra = modes_to_spin(ModePair::new(t1.bra, t2.bra));
                            want.insert((ket, bra), t1.weight * t2.weight);
                        }
                    }
                    assert_eq!(terms.len(), want.len());
                    for t in terms {
                        let w = want[&(t.ket, t.bra)];
                        assert!((t.weight.to_f64() - w).abs() < 1e-14);
                    }
                }
            }
        }
    }
}

/// `Tr_b[U (|n><n'| x |0><0|) U^dag]` for the beamsplitter
/// `U = exp(theta (a^dag b - a b^dag))`, `cos^2 theta = eta`, built by
/// Taylor series on the two-mode number basis.
fn beamsplitter_oracle(n: usize, n_p: usize, eta: f64) -> Vec<Vec<f64>> {
    let dim = n.max(n_p) + 1;
    let idx = |i: usize, j: usize| i * dim + j;
    let theta = eta.sqrt().acos();
    let big = dim * dim;
    let mut g = vec![vec![0.0; big]; big];
    for i in 0..dim {
        for j in 0..dim {
            // a^dag b |i, j> = sqrt((i+1) j) |i+1, j-1>
            if i + 1 < dim && j > 0 {
                g[idx(i + 1, j - 1)][idx(i, j)] += theta * (((i + 1) * j) as f64).sqrt();
            }
            if i > 0 && j + 1 < dim {
                g[idx(i - 1, j + 1)][idx(i, j)] -= theta * ((i * (j + 1)) as f64).sqrt();
            }
        }
    }
    let apply = |v: &Vec<f64>| -> Vec<f64> {
        let mut out = v.clone();
        let mut term = v.clone();
        for k in 1..100 {
            let next: Vec<f64> = (0..big).map(|r| (0..big).map(|c| g[r][c] * term[c]).sum::<f64>() / k as f64).collect();
            term = next;
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
        }
        out
    };
    let mut ket = vec![0.0; big];
    ket[idx(n, 0)] = 1.0;
    let mut bra = vec![0.0; big];
    bra[idx(n_p, 0)] = 1.0;
    let (u_ket, u_bra) = (apply(&ket), apply(&bra));
    let mut rho = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for ip in 0..dim {
            rho[i][ip] = (0..dim).map(|j| u_ket[idx(i, j)] * u_bra[idx(ip, j)]).sum();
        }
    }
    rho
}

#[test]
fn single_mode_matches_beamsplitter_oracle() {
    for &eta in &[0.2, 0.5, 0.75, 0.97] {
        for n in 0..=4 {
            for n_p in 0..=4 {
                let oracle = beamsplitter_oracle(n, n_p, eta);
                let mut got = vec![vec![0.0; oracle.len()]; oracle.len()];
                for t in decohere_single(n as u32, n_p as u32, eta).unwrap() {
                    got[t.ket as usize][t.bra as usize] += t.weight;
                }
                for i in 0..oracle.len() {
                    for j in 0..oracle.len() {
                        assert!((got[i][j] - oracle[i][j]).abs() < 1e-12, "n={n} n'={n_p} eta={eta} ({i},{j})");
                    }
                }
            }
        }
    }
}

#[test]
fn table_bound_loop_gives_identical_terms() {
    for (s, m) in labels(6) {
        for (sp, mp) in labels(6) {
            for &(e1, e2) in &[(0.3, 0.8), (0.5, 0.5), (1.0, 0.6), (0.0, 0.4)] {
                let a = decohere_spin_op(s, m, sp, mp, e1, e2).unwrap();
                let b = decohere_spin_op_by_table(s, m, sp, mp, e1, e2).unwrap();
                let key = |t: &mermin_core::loss::SpinOperatorTerm| (t.ket, t.bra);
                let ma: BTreeMap<_, _> = a.iter().map(|t| (key(t), t.weight.to_f64())).collect();
                let mb: BTreeMap<_, _> = b.iter().map(|t| (key(t), t.weight.to_f64())).collect();
                assert_eq!(ma.keys().collect::<Vec<_>>(), mb.keys().collect::<Vec<_>>(), "s={s} m={m} s'={sp} m'={mp}");
                for (k, w) in &ma {
                    assert!((w - mb[k]).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn table_bound_never_exceeds_support() {
    for (s, m) in labels(8) {
        for (sp, mp) in labels(8) {
            let terms = decohere_spin_op(s, m, sp, mp, 0.5, 0.5).unwrap();
            if let Some(lowest) = terms.iter().map(|t| t.ket.s()).min() {
                assert!(sigma_min(s, sp, m, mp) <= lowest, "s={s} m={m} s'={sp} m'={mp}");
            }
        }
    }
}

#[test]
fn decohered_pure_states_stay_positive() {
    let basis: Vec<ModePair> = (0..=4u32).flat_map(|n1| (0..=4 - n1).map(move |n2| ModePair::new(n1, n2))).collect();
    let pos: BTreeMap<ModePair, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    for seed in 0..6u32 {
        let amps: Vec<f64> = (0..basis.len()).map(|i| ((i as f64 + 1.0) * (seed as f64 + 0.7) * 1.37).sin()).collect();
        let norm: f64 = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        let (e1, e2) = (0.3 + 0.1 * seed as f64, 0.9 - 0.12 * seed as f64);
        let mut rho = DMatrix::<f64>::zeros(basis.len(), basis.len());
        for (i, &x) in basis.iter().enumerate() {
            for (j, &y) in basis.iter().enumerate() {
                let (a, b) = (modes_to_spin(x), modes_to_spin(y));
                for t in decohere_spin_op(a.s(), a.m(), b.s(), b.m(), e1, e2).unwrap() {
                    let (k, l) = (pos[&spin_to_modes(t.ket)], pos[&spin_to_modes(t.bra)]);
                    rho[(k, l)] += amps[i] * amps[j] / (norm * norm) * t.weight.to_f64();
                }
            }
        }
        let eig = SymmetricEigen::new(rho.clone());
        assert!(eig.eigenvalues.iter().all(|&v| v >= -1e-10));
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn diagonal_weights_match_fock(n in 0u32..=12, eta in 0.0f64..=1.0) {
        let fock = decohere_fock(n, eta).unwrap();
        prop_assert!((fock.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for t in decohere_single(n, n, eta).unwrap() {
            prop_assert_eq!(t.ket, t.bra);
            prop_assert!((t.weight - fock[t.ket as usize]).abs() < 1e-13);
        }
    }
}
