//! The Robinson gauge `Γ(w, A)` on step kernels, its maximization over
//! grid-aligned sets, and rectangle-quadruple lower-bound certificates.
//!
//! `Γ(w, A)` aggregates, over ordered pairs `y < z`, the positive part of
//! the mass on `A ∩ [0,y]` preferring the far point `z` over the near point
//! `y`, plus the mirrored term over `A ∩ [z,1]`. It is zero for every `A`
//! exactly when `w` is (a.e.) Robinson.
//!
//! For a step kernel and a grid-aligned `A` the double integral collapses:
//! pairs `(y, z)` inside one grid interval contribute nothing (the kernel
//! is blockwise constant in its second argument), and on a block pair
//! `I_i × I_j` with `i < j` the inner integral is affine in the position of
//! `y` inside `I_i` (resp. `z` inside `I_j`), so each block pair contributes
//! a clipped-affine integral `(1/N) ∫_0^{1/N} [c + m t]_+ dt` with an exact
//! closed form. That keeps golden rational values exact.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::bits::BitSet;
use crate::graphon::{IntervalSet, StepKernel};
use crate::{Error, Result};

/// Largest resolution [`gamma_exhaustive`] will enumerate (`2^20` sets).
pub const EXHAUSTIVE_MAX_RESOLUTION: usize = 20;

/// How a [`GammaEstimate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaMethod {
    Exhaustive,
    LocalSearch,
    Certificate,
}

impl GammaMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            GammaMethod::Exhaustive => "exhaustive",
            GammaMethod::LocalSearch => "local-search",
            GammaMethod::Certificate => "certificate",
        }
    }
}

/// A certified lower bound on `Γ(w)` with the set that realizes it.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaEstimate {
    /// `Γ(w, witness)`, hence a true lower bound on `Γ(w)`.
    pub lower: f64,
    pub witness: IntervalSet,
    pub method: GammaMethod,
    pub resolution: usize,
}

/// `∫_0^L [c + m t]_+ dt`, exactly.
fn clipped_affine_integral(c: f64, m: f64, l: f64) -> f64 {
    fn g2(u: f64) -> f64 {
        if u > 0.0 {
            0.5 * u * u
        } else {
            0.0
        }
    }
    if m == 0.0 {
        l * c.max(0.0)
    } else {
        (g2(c + m * l) - g2(c)) / m
    }
}

/// Shared evaluation over an arbitrary membership predicate.
fn gamma_of_membership(k: &StepKernel, in_a: impl Fn(usize) -> bool) -> f64 {
    let n = k.resolution();
    let nf = n as f64;
    let l = 1.0 / nf;
    // prefix[j*n + i] = sum over cells q < i with q in A of v[q][j]
    // suffix[j*n + i] = sum over cells q > i with q in A of v[q][j]
    let mut prefix = vec![0.0f64; n * n];
    let mut suffix = vec![0.0f64; n * n];
    for j in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            prefix[j * n + i] = acc;
            if in_a(i) {
                acc += k.get(i, j);
            }
        }
        let mut acc = 0.0;
        for i in (0..n).rev() {
            suffix[j * n + i] = acc;
            if in_a(i) {
                acc += k.get(i, j);
            }
        }
    }
    let mut total = 0.0;
    for i in 0..n {
        let a_i = in_a(i);
        for j in i + 1..n {
            // near-side term: x in A ∩ [0, y], y in I_i, z in I_j
            let c1 = (prefix[j * n + i] - prefix[i * n + i]) / nf;
            let m1 = if a_i { k.get(i, j) - k.get(i, i) } else { 0.0 };
            total += clipped_affine_integral(c1, m1, l);
            // far-side term: x in A ∩ [z, 1]
            let c2 = (suffix[i * n + j] - suffix[j * n + j]) / nf;
            let m2 = if in_a(j) {
                k.get(i, j) - k.get(j, j)
            } else {
                0.0
            };
            total += clipped_affine_integral(c2, m2, l);
        }
    }
    total / nf
}

/// Exact `Γ(w, A)` for a grid-aligned set at the kernel's resolution.
pub fn gamma_of_set(k: &StepKernel, a: &IntervalSet) -> Result<f64> {
    if a.resolution() != k.resolution() {
        return Err(Error::ResolutionMismatch {
            left: k.resolution(),
            right: a.resolution(),
        });
    }
    Ok(gamma_of_membership(k, |i| a.contains(i)))
}

/// Maximum of `Γ(w, A)` over all `2^N` grid-aligned sets, with the argmax.
pub fn gamma_exhaustive(k: &StepKernel) -> Result<GammaEstimate> {
    let n = k.resolution();
    if n > EXHAUSTIVE_MAX_RESOLUTION {
        return Err(Error::Budget {
            what: "gamma_exhaustive",
            limit: EXHAUSTIVE_MAX_RESOLUTION,
            requested: n,
        });
    }
    let mut best = 0.0f64;
    let mut best_mask = 0u64;
    for mask in 0u64..1u64 << n {
        let v = gamma_of_membership(k, |i| mask >> i & 1 == 1);
        if v > best {
            best = v;
            best_mask = mask;
        }
    }
    Ok(GammaEstimate {
        lower: best,
        witness: IntervalSet::from_bitset(BitSet::from_mask(n, best_mask)),
        method: GammaMethod::Exhaustive,
        resolution: n,
    })
}

fn climb(k: &StepKernel, a: &mut BitSet) -> f64 {
    let n = k.resolution();
    let mut cur = gamma_of_membership(k, |i| a.contains(i));
    loop {
        let mut improved = false;
        for cell in 0..n {
            a.toggle(cell);
            let v = gamma_of_membership(k, |i| a.contains(i));
            if v > cur + 1e-15 {
                cur = v;
                improved = true;
            } else {
                a.toggle(cell);
            }
        }
        if !improved {
            return cur;
        }
    }
}

/// Hill climbing over single-cell flips of `A` from seeded random starts
/// (plus the full set); returns the best `Γ(w, A)` found with its witness.
pub fn gamma_localsearch(k: &StepKernel, restarts: usize, seed: u64) -> GammaEstimate {
    gamma_localsearch_seeded(k, restarts, seed, &[])
}

/// Same as [`gamma_localsearch`] but with extra caller-chosen starting sets
/// (used to carry a coarse witness into a refined search).
pub fn gamma_localsearch_seeded(
    k: &StepKernel,
    restarts: usize,
    seed: u64,
    extra_starts: &[IntervalSet],
) -> GammaEstimate {
    let n = k.resolution();
    let mut best_val = f64::NEG_INFINITY;
    let mut best_set = BitSet::empty(n);
    let run = |mut start: BitSet, best_val: &mut f64, best_set: &mut BitSet| {
        let v = climb(k, &mut start);
        if v > *best_val {
            *best_val = v;
            *best_set = start;
        }
    };
    run(BitSet::full(n), &mut best_val, &mut best_set);
    for s in extra_starts {
        debug_assert_eq!(s.resolution(), n);
        run(s.bits().clone(), &mut best_val, &mut best_set);
    }
    for r in 0..restarts {
        let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let mut start = BitSet::empty(n);
        for i in 0..n {
            if rng.gen::<bool>() {
                start.insert(i);
            }
        }
        run(start, &mut best_val, &mut best_set);
    }
    GammaEstimate {
        lower: best_val.max(0.0),
        witness: IntervalSet::from_bitset(best_set),
        method: GammaMethod::LocalSearch,
        resolution: n,
    }
}

/// Four stacked intervals `S_u ≤ S_l ≤ T_l ≤ T_u` of equal cell count whose
/// average gap certifies `Γ(w) ≥ α^3 (w̄(S_u,T_u) − w̄(S_l,T_l))`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrupleCertificate {
    /// Starting cells of `S_u, S_l, T_l, T_u` (each `alpha_cells` wide).
    pub starts: [usize; 4],
    pub alpha_cells: usize,
    pub resolution: usize,
    /// Common measure `alpha_cells / N`.
    pub alpha: f64,
    /// Certified lower bound on `Γ(w)` (clipped at zero).
    pub value: f64,
}

impl QuadrupleCertificate {
    pub fn interval(&self, which: usize) -> IntervalSet {
        let cells: Vec<usize> =
            (self.starts[which]..self.starts[which] + self.alpha_cells).collect();
        IntervalSet::from_cells(self.resolution, &cells)
    }

    /// The set `S_l ∪ T_u` realizing the certificate inside the gauge.
    pub fn witness_set(&self) -> IntervalSet {
        self.interval(1).union(&self.interval(3))
    }
}

/// Best contiguous-interval quadruple of a given width, by exhaustive scan.
///
/// Contiguity restricts the general rectangle bound, so the result is still
/// a valid lower bound on `Γ(w)`. A prefix-max table over the far-pair
/// averages makes the scan `O(N^2)` after `O(N^2)` setup.
pub fn gamma_lower_certificate(k: &StepKernel, alpha_cells: usize) -> Result<QuadrupleCertificate> {
    let n = k.resolution();
    if alpha_cells == 0 || 4 * alpha_cells > n {
        return Err(Error::Domain(alloc::format!(
            "alpha_cells = {alpha_cells} infeasible: need 1 <= 4*alpha_cells <= {n}"
        )));
    }
    let a = alpha_cells;
    let starts = n - a + 1; // number of valid interval starts
    let mut pre = vec![0.0f64; (n + 1) * (n + 1)];
    for i in 0..n {
        for j in 0..n {
            pre[(i + 1) * (n + 1) + (j + 1)] = k.get(i, j) + pre[i * (n + 1) + (j + 1)]
                + pre[(i + 1) * (n + 1) + j]
                - pre[i * (n + 1) + j];
        }
    }
    let area = (a * a) as f64;
    let mean = |s: usize, t: usize| -> f64 {
        (pre[(s + a) * (n + 1) + (t + a)] - pre[s * (n + 1) + (t + a)] - pre[(s + a) * (n + 1) + t]
            + pre[s * (n + 1) + t])
            / area
    };
    // far[su][tu] = best block-pair mean over su' <= su, tu' >= tu
    let mut far = vec![f64::NEG_INFINITY; starts * starts];
    let mut far_arg = vec![(0usize, 0usize); starts * starts];
    for su in 0..starts {
        for tu in (0..starts).rev() {
            let mut best = mean(su, tu);
            let mut arg = (su, tu);
            if su > 0 && far[(su - 1) * starts + tu] > best {
                best = far[(su - 1) * starts + tu];
                arg = far_arg[(su - 1) * starts + tu];
            }
            if tu + 1 < starts && far[su * starts + tu + 1] > best {
                best = far[su * starts + tu + 1];
                arg = far_arg[su * starts + tu + 1];
            }
            far[su * starts + tu] = best;
            far_arg[su * starts + tu] = arg;
        }
    }
    let alpha = a as f64 / n as f64;
    let cube = alpha * alpha * alpha;
    let mut best_value = f64::NEG_INFINITY;
    let mut best_starts = [0usize, a, 2 * a, 3 * a];
    // S_l starts at sl >= a (room for S_u), T_l at tl >= sl + a,
    // T_u at tu >= tl + a with tu <= n - a.
    for sl in a..starts {
        for tl in sl + a..starts {
            if tl + a > n - a {
                break;
            }
            let gap = far[(sl - a) * starts + (tl + a)] - mean(sl, tl);
            let value = gap * cube;
            if value > best_value {
                best_value = value;
                let (su, tu) = far_arg[(sl - a) * starts + (tl + a)];
                best_starts = [su, sl, tl, tu];
            }
        }
    }
    Ok(QuadrupleCertificate {
        starts: best_starts,
        alpha_cells: a,
        resolution: n,
        alpha,
        value: best_value.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::{perturb_symmetric, random_robinson, GraphonSpec, StepGraphon};

    fn tight8() -> StepGraphon {
        StepGraphon::tight_example().refine(2).unwrap()
    }

    #[test]
    fn full_set_on_tight_example_is_1_over_128() {
        let w = tight8();
        let v = gamma_of_set(w.kernel(), &IntervalSet::full(8)).unwrap();
        assert!((v - 1.0 / 128.0).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn known_maximizer_on_tight_example_is_5_over_512() {
        // cells {0,1,2,5,6,7} at the 8-grid
        let w = tight8();
        let a = IntervalSet::from_cells(8, &[0, 1, 2, 5, 6, 7]);
        let v = gamma_of_set(w.kernel(), &a).unwrap();
        assert!((v - 5.0 / 512.0).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn exhaustive_finds_the_tight_maximum() {
        let w = tight8();
        let est = gamma_exhaustive(w.kernel()).unwrap();
        assert!((est.lower - 5.0 / 512.0).abs() < 1e-12);
        let recheck = gamma_of_set(w.kernel(), &est.witness).unwrap();
        assert_eq!(recheck, est.lower);
    }

    #[test]
    fn robinson_inputs_have_zero_gauge() {
        let specs = [
            GraphonSpec::flat(0.5, 0.3).unwrap(),
            GraphonSpec::steep(0.9, 0.8).unwrap(),
        ];
        for spec in &specs {
            let w = spec.discretize(16).unwrap();
            assert!(gamma_exhaustive(w.kernel()).unwrap().lower <= 1e-12);
            assert!(gamma_localsearch(w.kernel(), 10, 3).lower <= 1e-12);
        }
        for seed in 0..5 {
            let w = random_robinson(14, seed);
            assert_eq!(
                gamma_of_set(w.kernel(), &IntervalSet::full(14)).unwrap(),
                0.0
            );
        }
        let c = StepGraphon::constant(9, 0.62).unwrap();
        assert_eq!(gamma_exhaustive(c.kernel()).unwrap().lower, 0.0);
    }

    #[test]
    fn localsearch_reaches_tight_maximum() {
        let w = tight8();
        for seed in 0..5u64 {
            let est = gamma_localsearch(w.kernel(), 50, seed);
            assert!((est.lower - 5.0 / 512.0).abs() < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn certificate_on_tight_example() {
        let w = StepGraphon::tight_example();
        let cert = gamma_lower_certificate(w.kernel(), 1).unwrap();
        assert_eq!(cert.starts, [0, 1, 2, 3]);
        assert!((cert.value - 1.0 / 128.0).abs() < 1e-15);
        assert_eq!(cert.alpha, 0.25);
    }

    #[test]
    fn certificate_clips_on_robinson_inputs() {
        let w = GraphonSpec::steep(0.9, 0.8).unwrap().discretize(12).unwrap();
        let cert = gamma_lower_certificate(w.kernel(), 2).unwrap();
        assert_eq!(cert.value, 0.0);
        let c = StepGraphon::constant(8, 0.5).unwrap();
        assert_eq!(gamma_lower_certificate(c.kernel(), 2).unwrap().value, 0.0);
        assert!(gamma_lower_certificate(c.kernel(), 3).is_err());
    }

    #[test]
    fn certificate_is_dominated_by_exhaustive() {
        for seed in 0..20u64 {
            let w = perturb_symmetric(&random_robinson(12, seed), 0.3, seed ^ 1);
            let cert = gamma_lower_certificate(w.kernel(), 2).unwrap();
            let est = gamma_exhaustive(w.kernel()).unwrap();
            assert!(
                cert.value <= est.lower + 1e-12,
                "seed {seed}: {} > {}",
                cert.value,
                est.lower
            );
            // the certificate's defining set already realizes its value
            let via_set = gamma_of_set(w.kernel(), &cert.witness_set()).unwrap();
            assert!(cert.value <= via_set + 1e-12);
        }
    }

    #[test]
    fn gauge_scales_linearly_per_set() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 7;
            let rows: Vec<Vec<f64>> = {
                let mut m = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in i..n {
                        let v: f64 = rng.gen_range(-0.5..0.5);
                        m[i][j] = v;
                        m[j][i] = v;
                    }
                }
                m
            };
            let k = StepKernel::from_rows(rows).unwrap();
            let a = IntervalSet::from_cells(n, &[0, 2, 5]);
            let base = gamma_of_set(&k, &a).unwrap();
            for t in [0.0, 0.3, 1.7] {
                let scaled = gamma_of_set(&k.scale(t).unwrap(), &a).unwrap();
                assert!((scaled - t * base).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn budget_guard() {
        let w = StepGraphon::constant(21, 0.5).unwrap();
        assert!(matches!(
            gamma_exhaustive(w.kernel()),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn resolution_mismatch_is_rejected() {
        let w = tight8();
        assert!(gamma_of_set(w.kernel(), &IntervalSet::full(4)).is_err());
    }
}
