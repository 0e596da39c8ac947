//! Independent oracles shared by the integration tests. Everything here is
//! written straight from the defining formulas, deliberately ignoring the
//! closed forms and prefix tables used by the library.

use robinson_gauge::bits::BitSet;
use robinson_gauge::graph::OrderedGraph;
use robinson_gauge::{IntervalSet, StepKernel};

/// Midpoint-rule quadrature of the gauge definition on a block-aligned grid
/// of roughly `grid x grid` points over `(y, z)`; the inner integral over
/// `x` is a finite sum because the kernel is a step function and the set is
/// grid aligned.
pub fn gamma_quadrature(k: &StepKernel, a: &IntervalSet, grid: usize) -> f64 {
    let n = k.resolution();
    let h = 1.0 / n as f64;
    let sub = grid.div_ceil(n); // midpoints per block side
    let step = h / sub as f64;
    let cell_area = step * step;
    // length of A ∩ [0, y] ∩ I_q
    let len_below = |q: usize, y: f64| -> f64 {
        if !a.contains(q) {
            return 0.0;
        }
        let lo = q as f64 * h;
        (y - lo).clamp(0.0, h)
    };
    let len_above = |q: usize, z: f64| -> f64 {
        if !a.contains(q) {
            return 0.0;
        }
        let hi = (q + 1) as f64 * h;
        (hi - z).clamp(0.0, h)
    };
    let mut total = 0.0;
    for bi in 0..n {
        for bj in bi..n {
            for yi in 0..sub {
                let y = bi as f64 * h + (yi as f64 + 0.5) * step;
                for zi in 0..sub {
                    let z = bj as f64 * h + (zi as f64 + 0.5) * step;
                    if y >= z {
                        continue;
                    }
                    let mut near = 0.0;
                    let mut far = 0.0;
                    for q in 0..n {
                        near += len_below(q, y) * (k.get(q, bj) - k.get(q, bi));
                        far += len_above(q, z) * (k.get(q, bi) - k.get(q, bj));
                    }
                    total += (near.max(0.0) + far.max(0.0)) * cell_area;
                }
            }
        }
    }
    total
}

/// Largest triple violation `v[i][k] - min(v[i][j], v[j][k])` over all
/// ordered grid triples `i <= j <= k` (the cubic definition).
pub fn robinson_violation_triples(k: &StepKernel) -> f64 {
    let n = k.resolution();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            for l in j..n {
                worst = worst.max(k.get(i, l) - k.get(i, j).min(k.get(j, l)));
            }
        }
    }
    worst.max(0.0)
}

/// The discrete gauge evaluated by its triple sum, counting in integers.
pub fn gamma_star_triples(g: &OrderedGraph, a: &BitSet) -> f64 {
    let n = g.n();
    let adj = g.adjacency();
    let mut total: i64 = 0;
    for u in 0..n {
        for v in u + 1..n {
            let mut down = 0i64;
            for z in 0..u {
                if a.contains(z) {
                    down += adj.get(v, z) as i64 - adj.get(u, z) as i64;
                }
            }
            total += down.max(0);
            let mut up = 0i64;
            for z in v + 1..n {
                if a.contains(z) {
                    up += adj.get(u, z) as i64 - adj.get(v, z) as i64;
                }
            }
            total += up.max(0);
        }
    }
    total as f64 / (n as f64 * n as f64 * n as f64)
}
