//! The Robinson approximation `R_w`, black/white/grey region maps, and
//! approximation-error reports.
//!
//! For a point `(x, y)` above the diagonal, `UL(x,y) = [0,x] × [y,1]` is the
//! upper-left rectangle and `LR(x,y) = [x,y]^2 ∩ Δ` the near-diagonal
//! triangle. `R_w(x,y)` is the largest average of `w` over a mass-`α` cell
//! `S × T ⊆ UL(x,y)` with `α = Γ̂^{2/7}` (empty supremum = 0). Moving a
//! point toward the diagonal only grows `UL`, so `R_w` is Robinson by
//! construction; the discretization below samples one point per block and
//! finishes with a running-max sweep that absorbs search noise.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::cutnorm::{self, EXACT_MAX_RESOLUTION};
use crate::gamma::{self, GammaEstimate, EXHAUSTIVE_MAX_RESOLUTION};
use crate::graphon::{IntervalSet, StepGraphon};
use crate::{derive_seed, Error, Result};

/// Random restarts used by the mass-selection search when callers take the
/// defaults.
pub const DEFAULT_SUP_RESTARTS: usize = 8;

/// A mass-`α` selection: per-cell inclusion fractions with at most one
/// strictly fractional coordinate (an extreme point of the mass polytope).
#[derive(Debug, Clone, PartialEq)]
pub struct MassSelection {
    resolution: usize,
    fractions: Vec<f64>,
}

impl MassSelection {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Fraction of each grid cell included, in `[0,1]`.
    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    /// Total selected mass `Σ fractions / N`.
    pub fn mass(&self) -> f64 {
        self.fractions.iter().sum::<f64>() / self.resolution as f64
    }

    /// Number of strictly fractional coordinates.
    pub fn fractional_count(&self) -> usize {
        self.fractions
            .iter()
            .filter(|&&f| f > 1e-12 && f < 1.0 - 1e-12)
            .count()
    }
}

/// Which region the selection search runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMode {
    /// Supremum over `S × T ⊆ UL(x,y)`.
    UpperLeft,
    /// Infimum over `S × T ⊆ LR(x,y)` (with `S ≤ T`).
    LowerRight,
}

/// The best average found together with its defining selections.
#[derive(Debug, Clone)]
pub struct CellAverage {
    pub value: f64,
    pub s: MassSelection,
    pub t: MassSelection,
}

/// Greedy fill of `alpha` mass into cells by score order (an exact solve of
/// the one-sided linear problem). `sign = +1` prefers large scores.
fn greedy_fill(scores: &[f64], caps: &[f64], alpha: f64, sign: f64) -> Vec<f64> {
    let n = caps.len();
    let mut order: Vec<usize> = (0..n).filter(|&i| caps[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        (sign * scores[b])
            .partial_cmp(&(sign * scores[a]))
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    let mut out = vec![0.0; n];
    let mut remaining = alpha;
    for i in order {
        if remaining <= 0.0 {
            break;
        }
        let take = caps[i].min(remaining);
        out[i] = take;
        remaining -= take;
    }
    out
}

/// Alternating bilinear optimization of the selection average. `shared`
/// couples one boundary cell whose capacity the two sides split (used for
/// the near-diagonal triangle). Mass vectors are in measure units.
struct AlternateSpec<'a> {
    w: &'a StepGraphon,
    caps_s: &'a [f64],
    caps_t: &'a [f64],
    shared: Option<usize>,
    alpha: f64,
    /// +1 maximize, -1 minimize
    sign: f64,
}

fn alternate_from(spec: &AlternateSpec<'_>, t_init: Vec<f64>) -> (f64, Vec<f64>, Vec<f64>) {
    let n = spec.w.resolution();
    let inv_a2 = 1.0 / (spec.alpha * spec.alpha);
    let mut t = t_init;
    let mut s = vec![0.0; n];
    let mut best = f64::NEG_INFINITY * spec.sign;
    for _ in 0..80 {
        // scores for s given t
        let mut scores = vec![0.0; n];
        for (i, sc) in scores.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &tj) in t.iter().enumerate() {
                if tj > 0.0 {
                    acc += tj * spec.w.get(i, j);
                }
            }
            *sc = acc;
        }
        let mut caps = spec.caps_s.to_vec();
        if let Some(q) = spec.shared {
            caps[q] = (caps[q] - t[q]).max(0.0);
        }
        s = greedy_fill(&scores, &caps, spec.alpha, spec.sign);
        // scores for t given s
        let mut scores = vec![0.0; n];
        for (j, sc) in scores.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &si) in s.iter().enumerate() {
                if si > 0.0 {
                    acc += si * spec.w.get(i, j);
                }
            }
            *sc = acc;
        }
        let mut caps = spec.caps_t.to_vec();
        if let Some(q) = spec.shared {
            caps[q] = (caps[q] - s[q]).max(0.0);
        }
        t = greedy_fill(&scores, &caps, spec.alpha, spec.sign);
        let value: f64 = s
            .iter()
            .enumerate()
            .map(|(i, &si)| {
                if si == 0.0 {
                    0.0
                } else {
                    si * t
                        .iter()
                        .enumerate()
                        .map(|(j, &tj)| tj * spec.w.get(i, j))
                        .sum::<f64>()
                }
            })
            .sum::<f64>()
            * inv_a2;
        if spec.sign * (value - best) > 1e-14 {
            best = value;
        } else {
            best = if spec.sign * (value - best) > 0.0 { value } else { best };
            break;
        }
    }
    (best, s, t)
}

fn random_init(caps: &[f64], alpha: f64, rng: &mut ChaCha12Rng) -> Vec<f64> {
    let n = caps.len();
    let scores: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    greedy_fill(&scores, caps, alpha, 1.0)
}

fn proportional_init(caps: &[f64], alpha: f64) -> Vec<f64> {
    let total: f64 = caps.iter().sum();
    caps.iter().map(|&c| c * alpha / total).collect()
}

fn run_alternations(
    spec: &AlternateSpec<'_>,
    restarts: usize,
    seed: u64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let n = spec.w.resolution();
    let mut caps_t_eff = spec.caps_t.to_vec();
    if let Some(q) = spec.shared {
        // leave room for s in the shared cell when seeding t
        caps_t_eff[q] = caps_t_eff[q] * 0.5;
    }
    let mut inits = vec![proportional_init(&caps_t_eff, spec.alpha)];
    // index-order fills from both ends
    let fwd: Vec<f64> = (0..n).map(|i| -(i as f64)).collect();
    inits.push(greedy_fill(&fwd, &caps_t_eff, spec.alpha, 1.0));
    let bwd: Vec<f64> = (0..n).map(|i| i as f64).collect();
    inits.push(greedy_fill(&bwd, &caps_t_eff, spec.alpha, 1.0));
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        inits.push(random_init(&caps_t_eff, spec.alpha, &mut rng));
    }
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for init in inits {
        let cand = alternate_from(spec, init);
        match &best {
            Some((b, _, _)) if spec.sign * (cand.0 - b) <= 0.0 => {}
            _ => best = Some(cand),
        }
    }
    best.expect("at least one init")
}

fn cell_caps(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let a = i as f64 / n as f64;
            let b = (i + 1) as f64 / n as f64;
            (b.min(hi) - a.max(lo)).max(0.0)
        })
        .collect()
}

const MASS_EPS: f64 = 1e-12;

/// Supremum of the selection average over `S × T ⊆ UL(x,y)`, or `None` when
/// the rectangle cannot hold mass `α` on both sides.
pub fn ul_sup(
    w: &StepGraphon,
    x: f64,
    y: f64,
    alpha: f64,
    restarts: usize,
    seed: u64,
) -> Option<CellAverage> {
    let n = w.resolution();
    if x < alpha - MASS_EPS || 1.0 - y < alpha - MASS_EPS {
        return None;
    }
    let caps_s = cell_caps(n, 0.0, x);
    let caps_t = cell_caps(n, y, 1.0);
    let spec = AlternateSpec {
        w,
        caps_s: &caps_s,
        caps_t: &caps_t,
        shared: None,
        alpha,
        sign: 1.0,
    };
    let (value, s, t) = run_alternations(&spec, restarts, seed);
    Some(CellAverage {
        value,
        s: to_selection(n, s),
        t: to_selection(n, t),
    })
}

/// Infimum of the selection average over `S × T ⊆ LR(x,y)` with `S ≤ T`,
/// scanning the shared boundary cell; `None` when `y - x < 2α`.
pub fn lr_inf(
    w: &StepGraphon,
    x: f64,
    y: f64,
    alpha: f64,
    restarts: usize,
    seed: u64,
) -> Option<CellAverage> {
    let n = w.resolution();
    if y - x < 2.0 * alpha - MASS_EPS {
        return None;
    }
    let caps = cell_caps(n, x, y);
    let prefix: Vec<f64> = caps
        .iter()
        .scan(0.0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let total = prefix[n - 1];
    let mut best: Option<CellAverage> = None;
    for q in 0..n {
        if caps[q] == 0.0 && !(q > 0 && prefix[q] > 0.0) {
            continue;
        }
        // s lives on cells <= q, t on cells >= q, splitting cap at q
        if prefix[q] < alpha - MASS_EPS {
            continue;
        }
        let suffix = total - if q == 0 { 0.0 } else { prefix[q - 1] };
        if suffix < alpha - MASS_EPS {
            continue;
        }
        let mut caps_s = caps.clone();
        for c in caps_s.iter_mut().skip(q + 1) {
            *c = 0.0;
        }
        let mut caps_t = caps.clone();
        for c in caps_t.iter_mut().take(q) {
            *c = 0.0;
        }
        let spec = AlternateSpec {
            w,
            caps_s: &caps_s,
            caps_t: &caps_t,
            shared: Some(q),
            alpha,
            sign: -1.0,
        };
        let (value, s, t) = run_alternations(&spec, restarts, derive_seed(seed, q as u64));
        if best.as_ref().map_or(true, |b| value < b.value) {
            best = Some(CellAverage {
                value,
                s: to_selection(n, s),
                t: to_selection(n, t),
            });
        }
    }
    best
}

fn to_selection(n: usize, mass: Vec<f64>) -> MassSelection {
    MassSelection {
        resolution: n,
        fractions: mass.into_iter().map(|m| (m * n as f64).min(1.0)).collect(),
    }
}

/// Best mass-`α` cell average near a corner of `Δ`, with the conventions
/// `sup ∅ = 0` (upper-left mode) and `inf ∅ = 1` (lower-right mode).
pub fn best_cell_average(
    w: &StepGraphon,
    corner: (f64, f64),
    alpha: f64,
    mode: AverageMode,
) -> Result<f64> {
    let (x, y) = corner;
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) || x > y {
        return Err(Error::Domain(alloc::format!(
            "corner ({x},{y}) is not above the diagonal in the unit square"
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(alloc::format!("alpha = {alpha} outside (0,1]")));
    }
    Ok(match mode {
        AverageMode::UpperLeft => ul_sup(w, x, y, alpha, DEFAULT_SUP_RESTARTS, 0x5EED)
            .map(|c| c.value)
            .unwrap_or(0.0),
        AverageMode::LowerRight => lr_inf(w, x, y, alpha, DEFAULT_SUP_RESTARTS, 0x5EED)
            .map(|c| c.value)
            .unwrap_or(1.0),
    })
}

/// Robinson approximation of `w` discretized to `output_resolution`.
///
/// Robinson inputs come back unchanged. Otherwise `α = γ̂^{2/7}` and each
/// upper-triangle block is sampled at its lower-right point inside `Δ`,
/// followed by a running-max sweep toward the diagonal that makes the
/// result Robinson exactly (sampling a Robinson function at those monotone
/// points is already monotone; the sweep only absorbs search noise).
pub fn robinson_approximation(
    w: &StepGraphon,
    gamma_estimate: f64,
    output_resolution: usize,
) -> Result<StepGraphon> {
    if w.robinson_violation() == 0.0 {
        return Ok(w.clone());
    }
    if !(gamma_estimate > 0.0) {
        return Err(Error::Domain(
            "a positive gauge estimate is required for a non-Robinson input".into(),
        ));
    }
    if output_resolution == 0 {
        return Err(Error::Domain("output resolution must be >= 1".into()));
    }
    let alpha = libm::pow(gamma_estimate, 2.0 / 7.0);
    let m = output_resolution;
    let mut raw = vec![0.0f64; m * m];
    for i in 0..m {
        for j in i..m {
            let x = (i + 1) as f64 / m as f64;
            let y = if j == i { x } else { j as f64 / m as f64 };
            let v = ul_sup(w, x, y, alpha, DEFAULT_SUP_RESTARTS, derive_seed(0xA99, (i * m + j) as u64))
                .map(|c| c.value)
                .unwrap_or(0.0);
            raw[i * m + j] = v;
        }
    }
    // running max toward the diagonal: entry >= both farther neighbours
    for i in 0..m {
        for j in (i..m).rev() {
            let mut v = raw[i * m + j];
            if i > 0 {
                v = v.max(raw[(i - 1) * m + j]);
            }
            if j + 1 < m {
                v = v.max(raw[i * m + j + 1]);
            }
            raw[i * m + j] = v.clamp(0.0, 1.0);
        }
    }
    let result = StepGraphon::from_upper(m, |i, j| raw[i * m + j]);
    debug_assert!(result.robinson_violation() <= 1e-9);
    Ok(result)
}

/// Cell classification of one map level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionLabel {
    Black,
    White,
    Grey,
}

/// Level-by-level black/white/grey classification of the upper triangle,
/// with the step boundary functions of each level.
#[derive(Debug, Clone)]
pub struct RegionMap {
    resolution: usize,
    levels: usize,
    alpha: f64,
    /// `labels[k-1][i*n + j]` for `j >= i`.
    labels: Vec<Vec<RegionLabel>>,
    /// Upper boundary of the black region per column, `f[k-1][i]`.
    f: Vec<Vec<f64>>,
    /// Lower boundary of the white region per column (1 when absent).
    g: Vec<Vec<f64>>,
}

impl RegionMap {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Label of the upper-triangle cell `(i, j)` at level `k` (level 0 is
    /// black everywhere by convention).
    pub fn label(&self, k: usize, i: usize, j: usize) -> RegionLabel {
        debug_assert!(j >= i && j < self.resolution);
        if k == 0 {
            return RegionLabel::Black;
        }
        self.labels[k - 1][i * self.resolution + j]
    }

    /// Step values of the black upper boundary at level `k >= 1`.
    pub fn black_boundary(&self, k: usize) -> &[f64] {
        &self.f[k - 1]
    }

    /// Step values of the white lower boundary at level `k >= 1`.
    pub fn white_boundary(&self, k: usize) -> &[f64] {
        &self.g[k - 1]
    }

    /// Fraction of upper-triangle cells that are grey at level `k`.
    pub fn grey_fraction(&self, k: usize) -> f64 {
        let n = self.resolution;
        let mut grey = 0usize;
        let mut total = 0usize;
        for i in 0..n {
            for j in i..n {
                total += 1;
                if self.label(k, i, j) == RegionLabel::Grey {
                    grey += 1;
                }
            }
        }
        grey as f64 / total as f64
    }

    /// Side length (in cells) of the largest all-grey axis-aligned square
    /// fully inside the upper triangle at level `k`.
    pub fn largest_grey_square(&self, k: usize) -> usize {
        let n = self.resolution;
        let grey =
            |i: usize, j: usize| j >= i && self.label(k, i, j) == RegionLabel::Grey;
        let mut best = 0usize;
        let mut dp = vec![0usize; n * n];
        for i in (0..n).rev() {
            for j in (i..n).rev() {
                if !grey(i, j) {
                    continue;
                }
                let right = if j + 1 < n { dp[i * n + j + 1] } else { 0 };
                let down = if i + 1 < n && j >= i + 1 { dp[(i + 1) * n + j] } else { 0 };
                let diag = if i + 1 < n && j + 1 < n {
                    dp[(i + 1) * n + j + 1]
                } else {
                    0
                };
                let side = 1 + right.min(down).min(diag);
                dp[i * n + j] = side;
                best = best.max(side);
            }
        }
        best
    }
}

/// Classify every upper-triangle cell of the grid for levels `1..=m`.
///
/// Per cell the upper-left supremum and lower-right infimum are computed
/// once (at the cell's lower-right corner inside `Δ`) and cleaned by the
/// exact set-inclusion monotonicities, so all level thresholds share them.
pub fn region_map(w: &StepGraphon, m: usize, alpha: f64) -> Result<RegionMap> {
    if m == 0 {
        return Err(Error::Domain("levels must be >= 1".into()));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain(alloc::format!(
            "alpha = {alpha} outside (0, 0.5)"
        )));
    }
    let n = w.resolution();
    let mut diag = vec![false; n * n];
    let mut ul = vec![0.0f64; n * n];
    let mut lr = vec![f64::INFINITY; n * n];
    for i in 0..n {
        for j in i..n {
            let x = (i + 1) as f64 / n as f64;
            let y = j as f64 / n as f64;
            if j <= i + 1 {
                diag[i * n + j] = true; // corner sits on the diagonal
                continue;
            }
            let seed = derive_seed(0x4E9, (i * n + j) as u64);
            if let Some(c) = ul_sup(w, x, y, alpha, DEFAULT_SUP_RESTARTS, seed) {
                ul[i * n + j] = c.value;
            }
            if let Some(c) = lr_inf(w, x, y, alpha, DEFAULT_SUP_RESTARTS, seed) {
                lr[i * n + j] = c.value;
            }
        }
    }
    // UL grows toward the diagonal (larger x, smaller y): running max.
    for i in 0..n {
        for j in (i..n).rev() {
            let mut v = ul[i * n + j];
            if i > 0 {
                v = v.max(ul[(i - 1) * n + j]);
            }
            if j + 1 < n {
                v = v.max(ul[i * n + j + 1]);
            }
            ul[i * n + j] = v;
        }
    }
    // LR grows away from the diagonal (smaller x, larger y): running min.
    for i in (0..n).rev() {
        for j in i..n {
            let mut v = lr[i * n + j];
            if i + 1 < n && j > i {
                v = v.min(lr[(i + 1) * n + j]);
            }
            if j > i {
                v = v.min(lr[i * n + j - 1]);
            }
            lr[i * n + j] = v;
        }
    }
    let mut labels = Vec::with_capacity(m);
    let mut f_bounds = Vec::with_capacity(m);
    let mut g_bounds = Vec::with_capacity(m);
    for k in 1..=m {
        let thr = (k - 1) as f64 / m as f64;
        let mut grid = vec![RegionLabel::Grey; n * n];
        for i in 0..n {
            for j in i..n {
                let idx = i * n + j;
                grid[idx] = if diag[idx] || ul[idx] > thr {
                    RegionLabel::Black
                } else if lr[idx] <= thr {
                    RegionLabel::White
                } else {
                    RegionLabel::Grey
                };
            }
        }
        let mut f_k = vec![0.0f64; n];
        let mut g_k = vec![1.0f64; n];
        for i in 0..n {
            let mut top_black = i; // diagonal cell is always black
            let mut low_white: Option<usize> = None;
            for j in i..n {
                match grid[i * n + j] {
                    RegionLabel::Black => top_black = j,
                    RegionLabel::White => {
                        if low_white.is_none() {
                            low_white = Some(j);
                        }
                    }
                    RegionLabel::Grey => {}
                }
            }
            f_k[i] = (top_black + 1) as f64 / n as f64;
            g_k[i] = low_white.map_or(1.0, |j| j as f64 / n as f64);
        }
        labels.push(grid);
        f_bounds.push(f_k);
        g_bounds.push(g_k);
    }
    Ok(RegionMap {
        resolution: n,
        levels: m,
        alpha,
        labels,
        f: f_bounds,
        g: g_bounds,
    })
}

/// Knobs for [`approx_report`].
#[derive(Debug, Clone)]
pub struct ApproxOptions {
    /// Hill-climb restarts for gauge estimation past the exhaustive budget.
    pub gamma_restarts: usize,
    /// Extra factor-2 refinement levels probed for gauge convergence.
    pub refine_steps: usize,
    /// Refinement increments below this are considered converged.
    pub stable_tol: f64,
    /// Resolution of the emitted approximation (input resolution if unset).
    pub output_resolution: Option<usize>,
    /// Restarts for the heuristic cut norm when exact is out of budget.
    pub cutnorm_restarts: usize,
    pub seed: u64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            gamma_restarts: 50,
            refine_steps: 2,
            stable_tol: 1e-6,
            output_resolution: None,
            cutnorm_restarts: 200,
            seed: 0,
        }
    }
}

/// Everything the approximation-error check produces.
#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub violation: f64,
    /// Best gauge lower estimate across the refinement curve.
    pub gamma_hat: f64,
    /// `(resolution, estimate)` pairs, nondecreasing in the estimate.
    pub gamma_curve: Vec<(usize, f64)>,
    /// Whether the last refinement step moved less than the tolerance.
    pub converged: bool,
    pub alpha: f64,
    pub approximation: StepGraphon,
    /// Cut norm of `w - R_w` (exact when within the enumeration budget).
    pub distance: f64,
    pub distance_exact: bool,
    /// `14 · γ̂^{1/7}`; since `γ̂ ≤ Γ(w)` this check is stricter than the
    /// guarantee it mirrors.
    pub bound: f64,
    pub pass: bool,
}

fn gamma_estimate_at(w: &StepGraphon, restarts: usize, seed: u64, starts: &[IntervalSet]) -> GammaEstimate {
    if w.resolution() <= EXHAUSTIVE_MAX_RESOLUTION {
        let mut est = gamma::gamma_exhaustive(w.kernel()).expect("within budget");
        // an inherited witness can only help past enumeration; for
        // exhaustive search it is already dominated
        if !starts.is_empty() {
            let seeded = gamma::gamma_localsearch_seeded(w.kernel(), 0, seed, starts);
            if seeded.lower > est.lower {
                est = seeded;
            }
        }
        est
    } else {
        gamma::gamma_localsearch_seeded(w.kernel(), restarts, seed, starts)
    }
}

/// Compute the gauge refinement curve, the approximation, the cut-norm
/// distance, and the `14 · γ̂^{1/7}` comparison for one step graphon.
pub fn approx_report(w: &StepGraphon, options: &ApproxOptions) -> Result<ApproxReport> {
    let n = w.resolution();
    let violation = w.robinson_violation();
    if violation == 0.0 {
        return Ok(ApproxReport {
            violation,
            gamma_hat: 0.0,
            gamma_curve: vec![(n, 0.0)],
            converged: true,
            alpha: 0.0,
            approximation: w.clone(),
            distance: 0.0,
            distance_exact: true,
            bound: 0.0,
            pass: true,
        });
    }
    let mut curve = Vec::new();
    let mut est = gamma_estimate_at(w, options.gamma_restarts, options.seed, &[]);
    curve.push((n, est.lower));
    let mut fine = w.clone();
    let mut converged = false;
    for step in 0..options.refine_steps {
        fine = fine.refine(2)?;
        let carried = est.witness.refine(2);
        let next = gamma_estimate_at(
            &fine,
            options.gamma_restarts,
            derive_seed(options.seed, step as u64 + 1),
            &[carried],
        );
        let increment = next.lower - est.lower;
        if next.lower > est.lower {
            est = next;
        }
        curve.push((fine.resolution(), est.lower));
        if increment.abs() <= options.stable_tol {
            converged = true;
            break;
        }
    }
    let gamma_hat = est.lower;
    if !(gamma_hat > 0.0) {
        return Err(Error::Domain(
            "gauge estimate is zero for a non-Robinson input; raise the search budget".into(),
        ));
    }
    let out_res = options.output_resolution.unwrap_or(n);
    let approximation = robinson_approximation(w, gamma_hat, out_res)?;
    // compare on a common grid
    let common = lcm(n, approximation.resolution());
    let w_ref = w.refine(common / n)?;
    let r_ref = approximation.refine(common / approximation.resolution())?;
    let diff = w_ref.diff(&r_ref)?;
    let (distance, distance_exact) = if common <= EXACT_MAX_RESOLUTION {
        (cutnorm::cutnorm_exact(&diff)?.value, true)
    } else {
        (
            cutnorm::cutnorm_heuristic(&diff, options.cutnorm_restarts, options.seed).value,
            false,
        )
    };
    let bound = 14.0 * libm::pow(gamma_hat, 1.0 / 7.0);
    Ok(ApproxReport {
        violation,
        gamma_hat,
        gamma_curve: curve,
        converged,
        alpha: libm::pow(gamma_hat, 2.0 / 7.0),
        approximation,
        distance,
        distance_exact,
        bound,
        pass: distance <= bound + 1e-12,
    })
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(mut a: usize, mut b: usize) -> usize {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::GraphonSpec;

    #[test]
    fn constant_graphon_average_is_constant() {
        let w = StepGraphon::constant(10, 0.6).unwrap();
        for (x, y) in [(0.3, 0.5), (0.2, 0.8), (0.5, 0.5)] {
            let v = best_cell_average(&w, (x, y), 0.15, AverageMode::UpperLeft).unwrap();
            assert!((v - 0.6).abs() < 1e-12, "corner ({x},{y}): {v}");
        }
        let v = best_cell_average(&w, (0.2, 0.8), 0.15, AverageMode::LowerRight).unwrap();
        assert!((v - 0.6).abs() < 1e-12);
    }

    #[test]
    fn infeasible_regions_use_conventions() {
        let w = StepGraphon::constant(10, 0.6).unwrap();
        // x < alpha: the upper-left rectangle cannot hold the mass
        let v = best_cell_average(&w, (0.05, 0.5), 0.2, AverageMode::UpperLeft).unwrap();
        assert_eq!(v, 0.0);
        // y - x < 2 alpha: no near-diagonal cell
        let v = best_cell_average(&w, (0.4, 0.6), 0.2, AverageMode::LowerRight).unwrap();
        assert_eq!(v, 1.0);
        assert!(best_cell_average(&w, (0.7, 0.3), 0.1, AverageMode::UpperLeft).is_err());
    }

    #[test]
    fn tight_example_forced_cell() {
        // at corner (1/4, 3/4) with mass 1/4 the only cell is I1 x I4
        let w = StepGraphon::tight_example().refine(2).unwrap();
        let v = best_cell_average(&w, (0.25, 0.75), 0.25, AverageMode::UpperLeft).unwrap();
        assert!((v - 0.5).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn selections_are_extreme_points() {
        let w = GraphonSpec::TightExample.discretize(8).unwrap();
        let c = ul_sup(&w, 0.4, 0.55, 0.17, 8, 3).unwrap();
        for sel in [&c.s, &c.t] {
            assert!((sel.mass() - 0.17).abs() <= 1e-12);
            assert!(sel.fractional_count() <= 1);
        }
        let c = lr_inf(&w, 0.125, 0.875, 0.2, 8, 3).unwrap();
        for sel in [&c.s, &c.t] {
            assert!((sel.mass() - 0.2).abs() <= 1e-12);
            assert!(sel.fractional_count() <= 2); // shared cell may split
        }
    }

    #[test]
    fn ul_matches_exhaustive_grid_oracle() {
        // grid-aligned corners and integral alpha*N: enumerate all
        // whole-cell selections as the oracle
        let w = crate::graphon::perturb_symmetric(
            &crate::graphon::random_robinson(10, 7),
            0.25,
            8,
        );
        let n = 10usize;
        let alpha = 0.2; // 2 cells
        for (ci, cj) in [(3usize, 6usize), (4, 7), (2, 5)] {
            let x = (ci + 1) as f64 / n as f64;
            let y = cj as f64 / n as f64;
            let got = ul_sup(&w, x, y, alpha, 16, 5).unwrap().value;
            // oracle: choose 2 cells among 0..=ci and 2 among cj..n-1
            let mut best = 0.0f64;
            let s_cells: Vec<usize> = (0..=ci).collect();
            let t_cells: Vec<usize> = (cj..n).collect();
            for a in 0..s_cells.len() {
                for b in a + 1..s_cells.len() {
                    for c in 0..t_cells.len() {
                        for d in c + 1..t_cells.len() {
                            let avg = (w.get(s_cells[a], t_cells[c])
                                + w.get(s_cells[a], t_cells[d])
                                + w.get(s_cells[b], t_cells[c])
                                + w.get(s_cells[b], t_cells[d]))
                                / 4.0;
                            best = best.max(avg);
                        }
                    }
                }
            }
            assert!(
                (got - best).abs() < 1e-6,
                "corner ({ci},{cj}): {got} vs oracle {best}"
            );
        }
    }

    #[test]
    fn robinson_inputs_pass_through() {
        let w = GraphonSpec::flat(0.5, 0.3).unwrap().discretize(12).unwrap();
        let r = robinson_approximation(&w, 0.5, 24).unwrap();
        assert_eq!(r, w);
        let report = approx_report(&w, &ApproxOptions::default()).unwrap();
        assert!(report.pass);
        assert_eq!(report.distance, 0.0);
        assert_eq!(report.bound, 0.0);
    }

    #[test]
    fn gamma_zero_on_non_robinson_is_rejected() {
        let w = StepGraphon::tight_example();
        assert!(robinson_approximation(&w, 0.0, 4).is_err());
        assert!(robinson_approximation(&w, -1.0, 4).is_err());
    }

    #[test]
    fn tight_example_report() {
        let w = StepGraphon::tight_example().refine(2).unwrap();
        let report = approx_report(&w, &ApproxOptions::default()).unwrap();
        assert!((report.gamma_hat - 5.0 / 512.0).abs() < 1e-9, "{}", report.gamma_hat);
        let expected_alpha = libm::pow(5.0 / 512.0, 2.0 / 7.0);
        assert!((report.alpha - expected_alpha).abs() < 1e-9);
        assert!((expected_alpha - 0.2665).abs() < 5e-4);
        let expected_bound = 14.0 * libm::pow(5.0 / 512.0, 1.0 / 7.0);
        assert!((report.bound - expected_bound).abs() < 1e-9);
        assert!((expected_bound - 7.227).abs() < 5e-3);
        assert!(report.distance <= 1.0 + 1e-12);
        assert!(report.pass, "bound is far above any graphon distance");
        assert_eq!(report.approximation.robinson_violation(), 0.0);
    }

    #[test]
    fn approximation_is_robinson_and_monotone() {
        for seed in 0..6u64 {
            let base = crate::graphon::random_robinson(10, seed);
            let w = crate::graphon::perturb_symmetric(&base, 0.2, seed ^ 0xF);
            let report = approx_report(&w, &ApproxOptions::default()).unwrap();
            let r = &report.approximation;
            assert_eq!(r.robinson_violation(), 0.0, "seed {seed}");
            // lower-right order monotonicity on the sampled grid
            let m = r.resolution();
            for i in 0..m {
                for j in i..m {
                    if i > 0 {
                        assert!(r.get(i - 1, j) <= r.get(i, j) + 1e-12);
                    }
                    if j + 1 < m {
                        assert!(r.get(i, j + 1) <= r.get(i, j) + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn region_map_constant_graphon_structure() {
        let w = StepGraphon::constant(10, 0.6).unwrap();
        let map = region_map(&w, 2, 0.1).unwrap();
        let n = 10;
        for i in 0..n {
            for j in i..n {
                let corner_diag = j <= i + 1;
                let feasible = (i + 1) as f64 / n as f64 >= 0.1 - 1e-9
                    && 1.0 - j as f64 / n as f64 >= 0.1 - 1e-9;
                for k in 1..=2 {
                    let lab = map.label(k, i, j);
                    if corner_diag || feasible {
                        // every feasible upper-left cell averages 0.6 > 1/2
                        assert_eq!(lab, RegionLabel::Black, "cell ({i},{j}) level {k}");
                    } else {
                        // all averages are 0.6, never <= 1/2: white is empty
                        assert_eq!(lab, RegionLabel::Grey, "cell ({i},{j}) level {k}");
                    }
                }
                assert_eq!(map.label(0, i, j), RegionLabel::Black);
            }
        }
    }

    #[test]
    fn region_map_invariants_on_mixed_corpus() {
        let mut inputs = vec![
            GraphonSpec::TightExample.discretize(12).unwrap(),
            GraphonSpec::flat(0.7, 0.25).unwrap().discretize(12).unwrap(),
        ];
        for seed in 0..3u64 {
            inputs.push(crate::graphon::perturb_symmetric(
                &crate::graphon::random_robinson(12, seed),
                0.15,
                seed + 50,
            ));
        }
        for (which, w) in inputs.iter().enumerate() {
            let m = 5;
            let alpha = 0.13;
            let map = region_map(w, m, alpha).unwrap();
            let n = w.resolution();
            for k in 1..=m {
                for i in 0..n {
                    for j in i..n {
                        let lab = map.label(k, i, j);
                        // nesting: black shrinks, white grows with k
                        if k < m {
                            let next = map.label(k + 1, i, j);
                            if next == RegionLabel::Black {
                                assert_eq!(lab, RegionLabel::Black, "input {which}");
                            }
                            if lab == RegionLabel::White {
                                assert_eq!(next, RegionLabel::White, "input {which}");
                            }
                        }
                    }
                }
                // boundary monotonicity and ordering
                let f = map.black_boundary(k);
                let g = map.white_boundary(k);
                for i in 0..n {
                    assert!(f[i] <= g[i] + 1e-12, "input {which} level {k} col {i}");
                    if i > 0 {
                        assert!(f[i] + 1e-12 >= f[i - 1], "input {which} level {k}");
                        assert!(g[i] + 1e-12 >= g[i - 1], "input {which} level {k}");
                    }
                }
                // grey holds no square of side > alpha + 2/N
                let side = map.largest_grey_square(k) as f64 / n as f64;
                assert!(
                    side <= alpha + 2.0 / n as f64 + 1e-12,
                    "input {which} level {k}: grey square side {side}"
                );
            }
        }
    }

    #[test]
    fn region_map_rejects_bad_parameters() {
        let w = StepGraphon::constant(6, 0.5).unwrap();
        assert!(region_map(&w, 0, 0.1).is_err());
        assert!(region_map(&w, 3, 0.6).is_err());
        assert!(region_map(&w, 3, 0.0).is_err());
    }
}
