//! Robinson-structure properties: the violation scan against the cubic
//! definition, stepping error bounds, and quadrature checks of the
//! closed-form block averages.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use robinson_gauge::graphon::random_robinson;
use robinson_gauge::{GraphonSpec, StepKernel};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The O(N^2) row scan equals the O(N^3) triple scan.
    #[test]
    fn violation_scan_matches_triple_scan(seed in any::<u64>()) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let n = 12;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen();
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let k = StepKernel::from_rows(rows).unwrap();
        let fast = k.robinson_violation();
        let slow = common::robinson_violation_triples(&k);
        prop_assert!((fast - slow).abs() < 1e-15);
    }
}

#[test]
fn stepping_error_bound_moderate_size() {
    for seed in 0..5u64 {
        let u = random_robinson(42, seed);
        for np in [2usize, 3, 6, 7, 14, 21] {
            let stepped = u.step_operator(np).unwrap();
            let back = stepped.refine(42 / np).unwrap();
            let d = u.l1_dist(&back).unwrap();
            assert!(d <= 7.0 / np as f64, "seed {seed}, np {np}: {d}");
            // shifted versions of the stepping sandwich the original
            let minus = stepped.shift_toward_diagonal().refine(42 / np).unwrap();
            let plus = stepped.shift_away_from_diagonal().refine(42 / np).unwrap();
            for i in 0..42 {
                for j in 0..42 {
                    assert!(minus.get(i, j) <= u.get(i, j) + 1e-12);
                    assert!(u.get(i, j) <= plus.get(i, j) + 1e-12);
                }
            }
            assert!(plus.l1_dist(&minus).unwrap() <= 7.0 / np as f64 + 1e-12);
        }
    }
}

/// Closed-form single-block averages against brute quadrature with about
/// a million sample points.
#[test]
fn discretize_matches_dense_quadrature() {
    let grid = 1000usize;
    let h = 1.0 / grid as f64;
    let mut steep_sum = 0.0;
    let mut flat_sum = 0.0;
    for i in 0..grid {
        let x = (i as f64 + 0.5) * h;
        for j in 0..grid {
            let y = (j as f64 + 0.5) * h;
            steep_sum += 0.9 - 0.8 * (x - y).abs();
            if (x - y).abs() <= 0.3 {
                flat_sum += 0.5;
            }
        }
    }
    let steep_avg = steep_sum * h * h;
    let flat_avg = flat_sum * h * h;
    let steep = GraphonSpec::steep(0.9, 0.8).unwrap().discretize(1).unwrap();
    assert!((steep.get(0, 0) - steep_avg).abs() < 1e-6);
    assert!((steep.get(0, 0) - (0.9 - 0.8 / 3.0)).abs() < 1e-12);
    let flat = GraphonSpec::flat(0.5, 0.3).unwrap().discretize(1).unwrap();
    // indicator edges cost the midpoint rule about h per boundary cell
    assert!((flat.get(0, 0) - flat_avg).abs() < 3e-3);
    assert!((flat.get(0, 0) - 0.5 * (2.0 * 0.3 - 0.09)).abs() < 1e-12);
}

/// Multi-block closed forms against per-block quadrature.
#[test]
fn discretize_blocks_match_quadrature() {
    let n = 5usize;
    let sub = 400usize;
    for spec in [
        GraphonSpec::flat(0.6, 0.27).unwrap(),
        GraphonSpec::steep(0.85, 0.5).unwrap(),
    ] {
        let w = spec.discretize(n).unwrap();
        for bi in 0..n {
            for bj in 0..n {
                let mut sum = 0.0;
                for i in 0..sub {
                    let x = (bi as f64 + (i as f64 + 0.5) / sub as f64) / n as f64;
                    for j in 0..sub {
                        let y = (bj as f64 + (j as f64 + 0.5) / sub as f64) / n as f64;
                        sum += spec.evaluate(x, y).unwrap();
                    }
                }
                let avg = sum / (sub * sub) as f64;
                // indicator edges / the diagonal kink limit midpoint accuracy
                let tol = match spec {
                    GraphonSpec::Flat { .. } => 5e-3,
                    _ => 1e-6,
                };
                assert!(
                    (w.get(bi, bj) - avg).abs() < tol,
                    "block ({bi},{bj}): {} vs {avg}",
                    w.get(bi, bj)
                );
            }
        }
    }
}
