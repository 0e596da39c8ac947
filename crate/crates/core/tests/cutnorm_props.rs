//! Cut-norm properties: norm axioms, witness dominance, and agreement of
//! the search with enumeration.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use robinson_gauge::bits::BitSet;
use robinson_gauge::cutnorm::{cutnorm_exact, cutnorm_heuristic, rectangle_mass};
use robinson_gauge::StepKernel;

fn random_kernel(n: usize, scale: f64, rng: &mut ChaCha12Rng) -> StepKernel {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.gen_range(-scale..scale);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    StepKernel::from_rows(rows).unwrap()
}

#[test]
fn norm_axioms_on_sampled_kernels() {
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    for _ in 0..30 {
        let n = rng.gen_range(2..=10);
        let a = random_kernel(n, 0.5, &mut rng);
        let b = random_kernel(n, 0.5, &mut rng);
        let na = cutnorm_exact(&a).unwrap().value;
        let nb = cutnorm_exact(&b).unwrap().value;
        let sum_rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| a.get(i, j) + b.get(i, j)).collect())
            .collect();
        let nab = cutnorm_exact(&StepKernel::from_rows(sum_rows).unwrap())
            .unwrap()
            .value;
        assert!(nab <= na + nb + 1e-12, "triangle: {nab} > {na} + {nb}");
        let t = rng.gen_range(0.0..2.0);
        let scaled = a.scale(t).unwrap();
        let ns = cutnorm_exact(&scaled).unwrap().value;
        assert!((ns - t * na).abs() < 1e-12, "homogeneity: {ns} vs {t}*{na}");
        assert!((na == 0.0) == a.values().iter().all(|&v| v == 0.0) || na > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The exact cut norm dominates the rectangle mass of any supplied
    /// witness pair.
    #[test]
    fn witness_dominance(seed in any::<u64>(), s_mask in any::<u16>(), t_mask in any::<u16>()) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let n = 3 + (seed % 8) as usize; // up to 10
        let k = random_kernel(n, 1.0, &mut rng);
        let exact = cutnorm_exact(&k).unwrap().value;
        let s = BitSet::from_mask(n, s_mask as u64 & ((1 << n) - 1));
        let t = BitSet::from_mask(n, t_mask as u64 & ((1 << n) - 1));
        let mass = rectangle_mass(&k, &s, &t).abs();
        prop_assert!(mass <= exact + 1e-12);
    }

    /// The search value never exceeds the exact value, and its witnesses
    /// recompute to the reported value.
    #[test]
    fn heuristic_is_certified(seed in any::<u64>()) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let n = 2 + (seed % 11) as usize; // up to 12
        let k = random_kernel(n, 1.0, &mut rng);
        let h = cutnorm_heuristic(&k, 20, seed);
        let exact = cutnorm_exact(&k).unwrap().value;
        prop_assert!(h.value <= exact + 1e-12);
        let mass = rectangle_mass(&k, h.witness_s.bits(), h.witness_t.bits()).abs();
        prop_assert!((mass - h.value).abs() <= 1e-12);
    }
}

#[test]
fn heuristic_agrees_with_exact_on_most_instances() {
    let mut rng = ChaCha12Rng::seed_from_u64(808);
    let total = 60;
    let mut agreed = 0;
    for case in 0..total {
        let n = 4 + (case % 13); // up to 16
        let k = random_kernel(n, 1.0, &mut rng);
        let exact = cutnorm_exact(&k).unwrap().value;
        let heur = cutnorm_heuristic(&k, 200, case as u64).value;
        assert!(heur <= exact + 1e-12);
        if exact - heur <= 1e-9 {
            agreed += 1;
        }
    }
    assert!(
        agreed * 100 >= total * 95,
        "only {agreed}/{total} agreed with enumeration"
    );
}
