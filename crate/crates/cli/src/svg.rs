//! Minimal self-contained SVG plotting for log-log rate data.

use std::fmt::Write as _;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    /// `(n, value)` points, positive values only.
    pub points: &'a [(f64, f64)],
    /// Fitted `(slope, intercept)` of `ln v = slope ln n + intercept`.
    pub fit: Option<(f64, f64)>,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// Log-log scatter with fitted lines and an optional reference slope guide.
pub fn loglog_plot(title: &str, series: &[Series<'_>], reference: Option<(f64, &str)>) -> String {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(n, v) in s.points {
            if n > 0.0 && v > 0.0 {
                xs.push(n.ln());
                ys.push(v.ln());
            }
        }
    }
    let (x_lo, x_hi) = bounds(&xs);
    let (y_lo, y_hi) = bounds(&ys);
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>"#,
        W / 2.0
    );
    // axes
    let _ = writeln!(
        out,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>
<line x1="{m}" y1="{t}" x2="{m}" y2="{b}" stroke="black"/>"#,
        m = MARGIN,
        r = W - MARGIN,
        t = MARGIN,
        b = H - MARGIN
    );
    // decade-ish tick labels at the data extremes
    for (x, anchor) in [(x_lo, "start"), (x_hi, "end")] {
        let n = x.exp();
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">n = {n:.0}</text>"#,
            sx(x),
            H - MARGIN + 18.0
        );
    }
    for y in [y_lo, y_hi] {
        let v = y.exp();
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{v:.2e}</text>"#,
            MARGIN - 6.0,
            sy(y) + 4.0
        );
    }
    if let Some((slope, label)) = reference {
        // dashed guide anchored at the first data point of the first series
        if let Some(&(n0, v0)) = series.first().and_then(|s| s.points.first()) {
            let (lx0, ly0) = (n0.ln(), v0.ln());
            let ly1 = ly0 + slope * (x_hi - lx0);
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="6 4"/>
<text x="{}" y="{}" fill="gray" font-family="sans-serif" font-size="11">{label}</text>"#,
                sx(lx0),
                sy(ly0),
                sx(x_hi),
                sy(ly1.clamp(y_lo, y_hi)),
                sx(x_hi) - 150.0,
                sy(ly1.clamp(y_lo, y_hi)) - 6.0
            );
        }
    }
    for (si, s) in series.iter().enumerate() {
        for &(n, v) in s.points {
            if n > 0.0 && v > 0.0 {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="3" fill="{}" fill-opacity="0.8"/>"#,
                    sx(n.ln()),
                    sy(v.ln()),
                    s.color
                );
            }
        }
        if let Some((slope, intercept)) = s.fit {
            let y0 = intercept + slope * x_lo;
            let y1 = intercept + slope * x_hi;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.5"/>"#,
                sx(x_lo),
                sy(y0.clamp(y_lo, y_hi)),
                sx(x_hi),
                sy(y1.clamp(y_lo, y_hi)),
                s.color
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            W - MARGIN - 150.0,
            MARGIN + 16.0 * (si as f64 + 1.0),
            s.color,
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}
