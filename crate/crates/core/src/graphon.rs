//! Step graphons on a uniform grid and the closed-form graphon families.
//!
//! Everything here works with the partition of `[0,1]` into `N` equal
//! intervals `I_i = ((i-1)/N, i/N]`. A [`StepKernel`] is a symmetric
//! block-constant function with values in `[-1,1]`; a [`StepGraphon`]
//! restricts the range to `[0,1]`. Analytic families ([`GraphonSpec`])
//! discretize by exact block averages so rational golden values survive
//! into tests.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::bits::BitSet;
use crate::{Error, Result};

/// Slack accepted when validating externally supplied values.
const RANGE_EPS: f64 = 1e-9;

/// Index of the grid interval `((i)/n, (i+1)/n]` containing `x` (0-based).
///
/// `x = 0` is assigned to the first interval.
pub(crate) fn block_index(x: f64, n: usize) -> usize {
    if x <= 0.0 {
        return 0;
    }
    let t = libm::ceil(x * n as f64) as usize;
    t.saturating_sub(1).min(n - 1)
}

/// Symmetric block-constant kernel with entries in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    n: usize,
    v: Vec<f64>,
}

impl StepKernel {
    /// Build from full rows, validating shape, symmetry, finiteness and range.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows_in(rows, -1.0, 1.0)
    }

    fn from_rows_in(rows: Vec<Vec<f64>>, lo: f64, hi: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Domain("empty matrix".into()));
        }
        let mut v = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain(format!(
                    "row {i} has length {} in a {n}x{n} matrix",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::Domain(format!("non-finite entry at ({i},{j})")));
                }
                if x < lo - RANGE_EPS || x > hi + RANGE_EPS {
                    return Err(Error::Domain(format!(
                        "entry {x} at ({i},{j}) outside [{lo},{hi}]"
                    )));
                }
                v[i * n + j] = x.clamp(lo, hi);
            }
        }
        for i in 0..n {
            for j in 0..i {
                if v[i * n + j] != v[j * n + i] {
                    return Err(Error::Domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(StepKernel { n, v })
    }

    /// Fill the upper triangle from `f` and mirror; symmetric by construction.
    pub(crate) fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = f(i, j);
                v[i * n + j] = x;
                v[j * n + i] = x;
            }
        }
        StepKernel { n, v }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.v[i * self.n + j]
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn max_abs(&self) -> f64 {
        self.v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `(1/N^2) Σ |u_ij - w_ij|`, the L1 distance of the step functions.
    pub fn l1_dist(&self, other: &StepKernel) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::ResolutionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let sum: f64 = self
            .v
            .iter()
            .zip(&other.v)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(sum / (self.n * self.n) as f64)
    }

    /// Replicate each block `factor x factor`; the same function on `[0,1]^2`.
    pub fn refine(&self, factor: usize) -> Result<StepKernel> {
        if factor == 0 {
            return Err(Error::Domain("refinement factor must be >= 1".into()));
        }
        let m = self.n * factor;
        let mut v = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                v[i * m + j] = self.get(i / factor, j / factor);
            }
        }
        Ok(StepKernel { n: m, v })
    }

    /// Block-average down to a resolution dividing the current one.
    pub fn step_operator(&self, n_prime: usize) -> Result<StepKernel> {
        if n_prime == 0 || self.n % n_prime != 0 {
            return Err(Error::DivisibilityRequired {
                resolution: self.n,
                target: n_prime,
            });
        }
        let f = self.n / n_prime;
        let scale = 1.0 / (f * f) as f64;
        Ok(StepKernel::from_upper(n_prime, |bi, bj| {
            let mut s = 0.0;
            for i in bi * f..(bi + 1) * f {
                for j in bj * f..(bj + 1) * f {
                    s += self.get(i, j);
                }
            }
            s * scale
        }))
    }

    /// Largest positive violation of `v[i][k] <= min(v[i][j], v[j][k])` over
    /// grid triples `i <= j <= k`; zero exactly when the kernel is Robinson.
    ///
    /// Runs in `O(N^2)`: a symmetric matrix is Robinson iff every row is
    /// nondecreasing up to the diagonal and nonincreasing after it, so a
    /// running minimum from the diagonal outward finds the worst triple.
    pub fn robinson_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for r in 0..n {
            let mut run_min = self.get(r, r);
            for j in r..n {
                let x = self.get(r, j);
                worst = worst.max(x - run_min);
                run_min = run_min.min(x);
            }
            let mut run_min = self.get(r, r);
            for j in (0..=r).rev() {
                let x = self.get(r, j);
                worst = worst.max(x - run_min);
                run_min = run_min.min(x);
            }
        }
        worst.max(0.0)
    }

    /// Entrywise scaling; errors if the result leaves `[-1, 1]`.
    pub fn scale(&self, t: f64) -> Result<StepKernel> {
        let v: Vec<f64> = self.v.iter().map(|x| x * t).collect();
        if v.iter().any(|x| !x.is_finite() || x.abs() > 1.0 + RANGE_EPS) {
            return Err(Error::Domain(format!("scaling by {t} leaves [-1,1]")));
        }
        Ok(StepKernel { n: self.n, v })
    }
}

/// Step graphon: a [`StepKernel`] with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    kernel: StepKernel,
}

impl StepGraphon {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(StepGraphon {
            kernel: StepKernel::from_rows_in(rows, 0.0, 1.0)?,
        })
    }

    pub(crate) fn from_upper(n: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        let kernel = StepKernel::from_upper(n, f);
        debug_assert!(kernel.v.iter().all(|&x| (-RANGE_EPS..=1.0 + RANGE_EPS).contains(&x)));
        StepGraphon { kernel }
    }

    pub fn constant(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("resolution must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("constant {p} outside [0,1]")));
        }
        Ok(StepGraphon::from_upper(n, |_, _| p))
    }

    /// The 4-block graphon whose gauge is known exactly (maximum `5/512`).
    pub fn tight_example() -> Self {
        let h = 0.5;
        let q = 0.25;
        StepGraphon {
            kernel: StepKernel {
                n: 4,
                v: vec![
                    1.0, h, q, h, //
                    h, 1.0, 0.0, q, //
                    q, 0.0, 1.0, h, //
                    h, q, h, 1.0,
                ],
            },
        }
    }

    pub fn kernel(&self) -> &StepKernel {
        &self.kernel
    }

    pub fn into_kernel(self) -> StepKernel {
        self.kernel
    }

    pub fn resolution(&self) -> usize {
        self.kernel.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.kernel.get(i, j)
    }

    pub fn values(&self) -> &[f64] {
        &self.kernel.v
    }

    pub fn refine(&self, factor: usize) -> Result<StepGraphon> {
        Ok(StepGraphon {
            kernel: self.kernel.refine(factor)?,
        })
    }

    pub fn step_operator(&self, n_prime: usize) -> Result<StepGraphon> {
        Ok(StepGraphon {
            kernel: self.kernel.step_operator(n_prime)?,
        })
    }

    pub fn l1_dist(&self, other: &StepGraphon) -> Result<f64> {
        self.kernel.l1_dist(&other.kernel)
    }

    pub fn robinson_violation(&self) -> f64 {
        self.kernel.robinson_violation()
    }

    /// Entrywise difference as a kernel.
    pub fn diff(&self, other: &StepGraphon) -> Result<StepKernel> {
        if self.resolution() != other.resolution() {
            return Err(Error::ResolutionMismatch {
                left: self.resolution(),
                right: other.resolution(),
            });
        }
        let v = self
            .kernel
            .v
            .iter()
            .zip(&other.kernel.v)
            .map(|(a, b)| a - b)
            .collect();
        Ok(StepKernel {
            n: self.resolution(),
            v,
        })
    }

    /// Shift every cell one block toward the diagonal and zero the first
    /// row / last column bands; for Robinson `u` this lower-bounds `u`.
    pub fn shift_toward_diagonal(&self) -> StepGraphon {
        let n = self.resolution();
        StepGraphon::from_upper(n, |i, j| {
            if i == 0 || j == n - 1 {
                0.0
            } else {
                self.get(i - 1, j + 1)
            }
        })
    }

    /// Shift every cell one block away from the diagonal and set the band
    /// `|j - i| <= 1` to one; for Robinson `u` this upper-bounds `u`.
    pub fn shift_away_from_diagonal(&self) -> StepGraphon {
        StepGraphon::from_upper(self.resolution(), |i, j| {
            if j - i <= 1 {
                1.0
            } else {
                self.get(i + 1, j - 1)
            }
        })
    }
}

/// `[u]_+^2 / 2`, the antiderivative of the positive part.
fn g2(u: f64) -> f64 {
    if u > 0.0 {
        0.5 * u * u
    } else {
        0.0
    }
}

/// `[u]_+^3 / 6`.
fn g3(u: f64) -> f64 {
    if u > 0.0 {
        u * u * u / 6.0
    } else {
        0.0
    }
}

/// Area of `{ (x,y) in [a1,a2] x [b1,b2] : y - x <= t }`.
fn area_below_shift(a1: f64, a2: f64, b1: f64, b2: f64, t: f64) -> f64 {
    // integral over x of clamp(x + t - b1, 0, b2 - b1)
    let s = t - b1;
    let h = b2 - b1;
    (g2(a2 + s) - g2(a1 + s)) - (g2(a2 + s - h) - g2(a1 + s - h))
}

/// Area of the band `|y - x| <= d` inside `[a1,a2] x [b1,b2]`.
fn band_area(a1: f64, a2: f64, b1: f64, b2: f64, d: f64) -> f64 {
    (area_below_shift(a1, a2, b1, b2, d) - area_below_shift(a1, a2, b1, b2, -d)).max(0.0)
}

/// `∬ max(y - x, 0)` over `[a1,a2] x [b1,b2]`.
fn int_pos_gap(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
    g3(b2 - a1) - g3(b1 - a1) - g3(b2 - a2) + g3(b1 - a2)
}

/// `∬ |y - x|` over `[a1,a2] x [b1,b2]`.
fn int_abs_gap(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
    int_pos_gap(a1, a2, b1, b2) + int_pos_gap(b1, b2, a1, a2)
}

/// Closed-form graphon families plus arbitrary step-graphon data.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphonSpec {
    /// `p` on the band `|y - x| <= d`, zero outside. Robinson with a flat
    /// plateau; `d` must lie in `(0, 0.5)`.
    Flat { p: f64, d: f64 },
    /// `p - c|y - x|`; Robinson with slope bounded away from zero.
    /// Requires `0 < c <= p <= 1` so values stay in `[0, 1]`.
    Steep { p: f64, c: f64 },
    /// The fixed 4-block example with known gauge values.
    TightExample,
    /// An explicit step graphon evaluated as a function on `[0,1]^2`.
    Matrix(StepGraphon),
}

impl GraphonSpec {
    pub fn flat(p: f64, d: f64) -> Result<Self> {
        if !(0.0 < p && p <= 1.0) {
            return Err(Error::Domain(format!("flat: p = {p} outside (0,1]")));
        }
        if !(0.0 < d && d < 0.5) {
            return Err(Error::Domain(format!("flat: d = {d} outside (0,0.5)")));
        }
        Ok(GraphonSpec::Flat { p, d })
    }

    pub fn steep(p: f64, c: f64) -> Result<Self> {
        if !(0.0 < p && p <= 1.0) {
            return Err(Error::Domain(format!("steep: p = {p} outside (0,1]")));
        }
        if !(0.0 < c && c <= p) {
            return Err(Error::Domain(format!("steep: c = {c} outside (0,p]")));
        }
        Ok(GraphonSpec::Steep { p, c })
    }

    /// Pointwise evaluation at `(x, y)`; symmetric in its arguments.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain(format!("point ({x},{y}) outside [0,1]^2")));
        }
        Ok(match self {
            GraphonSpec::Flat { p, d } => {
                if (y - x).abs() <= *d {
                    *p
                } else {
                    0.0
                }
            }
            GraphonSpec::Steep { p, c } => p - c * (y - x).abs(),
            GraphonSpec::TightExample => {
                let w = StepGraphon::tight_example();
                w.get(block_index(x, 4), block_index(y, 4))
            }
            GraphonSpec::Matrix(w) => {
                let n = w.resolution();
                w.get(block_index(x, n), block_index(y, n))
            }
        })
    }

    /// Exact block averages over the `N x N` grid.
    ///
    /// Flat and Steep use the closed-form band-area / gap integrals and are
    /// constant along diagonals, so the averages are computed once per
    /// offset and clamped monotone to keep the discretization exactly
    /// Robinson under floating point.
    pub fn discretize(&self, n: usize) -> Result<StepGraphon> {
        if n == 0 {
            return Err(Error::Domain("resolution must be >= 1".into()));
        }
        match self {
            GraphonSpec::Flat { p, d } => {
                let vals = toeplitz_profile(n, |k| {
                    let h = 1.0 / n as f64;
                    let (b1, b2) = (k as f64 * h, (k + 1) as f64 * h);
                    p * band_area(0.0, h, b1, b2, *d) / (h * h)
                });
                Ok(StepGraphon::from_upper(n, |i, j| vals[j - i]))
            }
            GraphonSpec::Steep { p, c } => {
                let vals = toeplitz_profile(n, |k| {
                    let h = 1.0 / n as f64;
                    let (b1, b2) = (k as f64 * h, (k + 1) as f64 * h);
                    p - c * int_abs_gap(0.0, h, b1, b2) / (h * h)
                });
                Ok(StepGraphon::from_upper(n, |i, j| vals[j - i]))
            }
            GraphonSpec::TightExample => Ok(reaggregate(&StepGraphon::tight_example(), n)),
            GraphonSpec::Matrix(w) => Ok(reaggregate(w, n)),
        }
    }
}

/// Block averages by diagonal offset, clamped nonincreasing to absorb the
/// last-ulp wiggle of the closed-form integrals (the exact values are
/// nonincreasing for Robinson families).
fn toeplitz_profile(n: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut vals: Vec<f64> = (0..n).map(f).collect();
    for k in 1..n {
        vals[k] = vals[k].min(vals[k - 1]).max(0.0);
    }
    vals
}

/// Exact block averages of one step graphon over another uniform grid.
fn reaggregate(w: &StepGraphon, n: usize) -> StepGraphon {
    let m = w.resolution();
    // overlaps[i] = list of (source cell, overlap length) for target cell i
    let overlaps: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            let k_lo = block_index(lo + 1e-15, m);
            let k_hi = block_index(hi, m);
            (k_lo..=k_hi)
                .filter_map(|k| {
                    let s_lo = k as f64 / m as f64;
                    let s_hi = (k + 1) as f64 / m as f64;
                    let ov = (hi.min(s_hi) - lo.max(s_lo)).max(0.0);
                    (ov > 0.0).then_some((k, ov))
                })
                .collect()
        })
        .collect();
    let scale = (n * n) as f64;
    StepGraphon::from_upper(n, |i, j| {
        let mut s = 0.0;
        for &(k, a) in &overlaps[i] {
            for &(l, b) in &overlaps[j] {
                s += a * b * w.get(k, l);
            }
        }
        (s * scale).clamp(0.0, 1.0)
    })
}

/// Grid-aligned measurable subset of `[0,1]`: a union of grid intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    bits: BitSet,
}

impl IntervalSet {
    pub fn empty(n: usize) -> Self {
        IntervalSet {
            bits: BitSet::empty(n),
        }
    }

    pub fn full(n: usize) -> Self {
        IntervalSet {
            bits: BitSet::full(n),
        }
    }

    pub fn from_cells(n: usize, cells: &[usize]) -> Self {
        IntervalSet {
            bits: BitSet::from_indices(n, cells),
        }
    }

    pub fn from_bitset(bits: BitSet) -> Self {
        IntervalSet { bits }
    }

    pub fn resolution(&self) -> usize {
        self.bits.len()
    }

    /// Lebesgue measure: number of cells over the resolution.
    pub fn measure(&self) -> f64 {
        self.bits.count() as f64 / self.bits.len() as f64
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.bits.contains(cell)
    }

    pub fn toggle(&mut self, cell: usize) {
        self.bits.toggle(cell)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet {
            bits: self.bits.union(&other.bits),
        }
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet {
            bits: self.bits.intersection(&other.bits),
        }
    }

    pub fn complement(&self) -> IntervalSet {
        IntervalSet {
            bits: self.bits.complement(),
        }
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn bit_string(&self) -> String {
        self.bits.bit_string()
    }

    /// Re-express on a grid refined by `factor`.
    pub fn refine(&self, factor: usize) -> IntervalSet {
        let n = self.resolution() * factor;
        let mut bits = BitSet::empty(n);
        for c in self.bits.iter_ones() {
            for k in 0..factor {
                bits.insert(c * factor + k);
            }
        }
        IntervalSet { bits }
    }
}

/// Random exactly-Robinson step graphon: values only decay moving away from
/// the diagonal, built outward so each entry is at most its two
/// closer-to-diagonal neighbours.
pub fn random_robinson(n: usize, seed: u64) -> StepGraphon {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 0.6 + 0.4 * rng.gen::<f64>();
    }
    for dist in 1..n {
        for i in 0..n - dist {
            let j = i + dist;
            let bound = v[i * n + (j - 1)].min(v[(i + 1) * n + j]);
            // plateaus half the time so decay profiles vary
            let m = if rng.gen::<f64>() < 0.5 {
                1.0
            } else {
                0.6 + 0.4 * rng.gen::<f64>()
            };
            let x = bound * m;
            v[i * n + j] = x;
            v[j * n + i] = x;
        }
    }
    StepGraphon {
        kernel: StepKernel { n, v },
    }
}

/// Symmetric uniform noise of the given amplitude, clamped back to `[0,1]`.
pub fn perturb_symmetric(w: &StepGraphon, amplitude: f64, seed: u64) -> StepGraphon {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = w.resolution();
    StepGraphon::from_upper(n, |i, j| {
        let noise = amplitude * (2.0 * rng.gen::<f64>() - 1.0);
        (w.get(i, j) + noise).clamp(0.0, 1.0)
    })
}
