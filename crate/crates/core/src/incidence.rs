//! Smoothed and hard incidence counting and the numerical high-low scan.
//!
//! The smoothed count is I(w; P, L) = Σ_{(p,ℓ)} η(d(p,ℓ)/w), where d is the
//! vertical distance at the point's abscissa divided by (1+slope²)^{1/2} —
//! i.e. the Euclidean point-line distance for non-vertical lines, and equal
//! by construction to the phase-space distance d_{□×1×□} times the same
//! factor.  B(w) = I(w)/(w·|P|·|L|) is the normalized count.
//!
//! The high-low scan compares consecutive normalized counts
//! lhs = |B(w) − B(w/2)| against the concentration-driven right-hand side
//! rhs_core = (M_{w×w}(P)/|P| · M_{1×w}(L)/|L| · w⁻³)^{1/2}.

use crate::kernel::SmoothingKernel;
use crate::phase::{cell_counts, Configuration, ScaleTriple};
use crate::util::pairwise_sum;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A non-vertical line y = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn new(slope: f64, intercept: f64) -> Self {
        Line { slope, intercept }
    }

    /// The line ℓ_ω of a phase point: slope c through (a, b).
    pub fn from_phase(omega: &crate::phase::PhasePoint) -> Self {
        Line {
            slope: omega.c,
            intercept: omega.b - omega.c * omega.a,
        }
    }

    #[inline]
    pub fn height_at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Euclidean distance from a point to the line.
    #[inline]
    pub fn dist(&self, p: (f64, f64)) -> f64 {
        (p.1 - self.height_at(p.0)).abs() / (1.0 + self.slope * self.slope).sqrt()
    }
}

/// The derived point/line pair (P[X], L[X]) of a configuration.
pub fn points_and_lines(x: &Configuration) -> (Vec<(f64, f64)>, Vec<Line>) {
    let pts = x.p_points();
    let lines = x.points.iter().map(Line::from_phase).collect();
    (pts, lines)
}

/// Smoothed count together with the two hard counts used by the sandwich.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceCounts {
    /// I(w; P, L).
    pub smoothed: f64,
    /// #{(p,ℓ) : d(p,ℓ) ≤ 0.4·w} — every such pair contributes exactly 1.
    pub hard_lo: usize,
    /// #{(p,ℓ) : d(p,ℓ) ≤ 0.6·w} — the only pairs that can contribute.
    pub hard_hi: usize,
}

/// Exact hard incidence count by the naive double loop.
pub fn hard_incidences(points: &[(f64, f64)], lines: &[Line], threshold: f64) -> usize {
    points
        .iter()
        .map(|&p| lines.iter().filter(|l| l.dist(p) <= threshold).count())
        .sum()
}

/// Reference implementation: the full double loop.
pub fn incidence_counts_naive(
    points: &[(f64, f64)],
    lines: &[Line],
    w: f64,
    kernel: &SmoothingKernel,
) -> IncidenceCounts {
    let mut per_point = Vec::with_capacity(points.len());
    let mut lo = 0usize;
    let mut hi = 0usize;
    for &p in points {
        let mut s = 0.0;
        for l in lines {
            let d = l.dist(p);
            s += kernel.eval(d / w);
            if d <= 0.4 * w {
                lo += 1;
            }
            if d <= 0.6 * w {
                hi += 1;
            }
        }
        per_point.push(s);
    }
    IncidenceCounts {
        smoothed: pairwise_sum(&per_point),
        hard_lo: lo,
        hard_hi: hi,
    }
}

/// Accelerated count: x-strips with lines sorted by their height at the strip
/// center, so each point only visits the lines that can land within 0.6·w.
///
/// The candidate window is exact: for a point in a strip of width h and a
/// line of slope ≤ cmax, |height(a_p) − height(center)| ≤ cmax·h/2, and a
/// pair at Euclidean distance ≤ 0.6w has vertical distance
/// ≤ 0.6w·(1+cmax²)^{1/2}.  Every candidate is then tested exactly, so the
/// result agrees with the naive double loop up to summation order.
pub fn incidence_counts(
    points: &[(f64, f64)],
    lines: &[Line],
    w: f64,
    kernel: &SmoothingKernel,
) -> IncidenceCounts {
    if points.is_empty() || lines.is_empty() {
        return IncidenceCounts {
            smoothed: 0.0,
            hard_lo: 0,
            hard_hi: 0,
        };
    }
    let cmax = lines.iter().fold(0.0f64, |m, l| m.max(l.slope.abs()));
    // Strip width: no narrower than w (window would be slope-dominated), no
    // narrower than ~2/√n (per-strip sort would dominate).
    let n = points.len().max(lines.len());
    let h = w.max(2.0 / (n as f64).sqrt()).min(2.0);
    let xmin = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let xmax = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let nstrips = (((xmax - xmin) / h).floor() as usize + 1).max(1);
    let strip_of = |x: f64| (((x - xmin) / h) as usize).min(nstrips - 1);

    // Points grouped by strip (stable order within each strip).
    let mut by_strip: Vec<Vec<(f64, f64)>> = vec![Vec::new(); nstrips];
    for &p in points {
        by_strip[strip_of(p.0)].push(p);
    }

    let vmargin = 0.6 * w * (1.0 + cmax * cmax).sqrt() + cmax * h * 0.5 + 1e-12;
    let t_lo = 0.4 * w;
    let t_hi = 0.6 * w;

    let mut per_point = Vec::with_capacity(points.len());
    let mut lo = 0usize;
    let mut hi = 0usize;
    let mut heights: Vec<(f64, usize)> = Vec::with_capacity(lines.len());
    for (si, strip_pts) in by_strip.iter().enumerate() {
        if strip_pts.is_empty() {
            continue;
        }
        let xc = xmin + (si as f64 + 0.5) * h;
        heights.clear();
        heights.extend(lines.iter().enumerate().map(|(i, l)| (l.height_at(xc), i)));
        heights.sort_unstable_by(|p, q| p.0.total_cmp(&q.0));
        for &p in strip_pts {
            let a = heights.partition_point(|&(y, _)| y < p.1 - vmargin);
            let b = heights.partition_point(|&(y, _)| y <= p.1 + vmargin);
            let mut s = 0.0;
            for &(_, li) in &heights[a..b] {
                let d = lines[li].dist(p);
                s += kernel.eval(d / w);
                if d <= t_lo {
                    lo += 1;
                }
                if d <= t_hi {
                    hi += 1;
                }
            }
            per_point.push(s);
        }
    }
    IncidenceCounts {
        smoothed: pairwise_sum(&per_point),
        hard_lo: lo,
        hard_hi: hi,
    }
}

/// I(w; P, L) alone.
pub fn smoothed_incidences(
    points: &[(f64, f64)],
    lines: &[Line],
    w: f64,
    kernel: &SmoothingKernel,
) -> f64 {
    incidence_counts(points, lines, w, kernel).smoothed
}

/// One row of the high-low report (one dyadic scale).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HighLowRow {
    pub w: f64,
    /// I(w; P, L).
    pub i: f64,
    /// B(w) = I(w)/(w|P||L|).
    pub b: f64,
    pub hard_lo: usize,
    pub hard_hi: usize,
    /// M_{w×w}(P) via M_{w×w×1}(X).
    pub m_pt: usize,
    /// M_{1×w}(L) via M_{1×w×w}(X).
    pub m_line: usize,
    /// |B(w) − B(w/2)|.
    pub lhs: f64,
    /// (M_pt/|P| · M_line/|L| · w⁻³)^{1/2}.
    pub rhs_core: f64,
    /// lhs / rhs_core.
    pub ratio: f64,
}

/// Concentration over the canonical dyadic cells (max cell count).  Cheap
/// exact maximum over the canonical family; the full rectangle maximum is at
/// most a bounded-overlap factor larger, which the high-low envelope absorbs.
pub fn cell_concentration(x: &Configuration, s: &ScaleTriple) -> usize {
    cell_counts(x, s).values().copied().max().unwrap_or(0)
}

/// Numerical high-low scan over dyadic scales w ∈ [w_min, w_max].
///
/// B is evaluated down to w_min/2 so every row has its half-scale partner.
pub fn high_low_scan(
    x: &Configuration,
    w_min: f64,
    w_max: f64,
    kernel: &SmoothingKernel,
) -> Result<Vec<HighLowRow>> {
    if x.is_empty() {
        return Err(Error::BadInput("empty configuration".into()));
    }
    if !(crate::util::is_pow2(w_min) && crate::util::is_pow2(w_max) && w_min <= w_max && w_max <= 1.0)
    {
        return Err(Error::BadInput(format!(
            "scale range [{w_min}, {w_max}] must be dyadic within (0, 1]"
        )));
    }
    let (pts, lines) = points_and_lines(x);
    let np = pts.len() as f64;
    let nl = lines.len() as f64;

    let mut scales = Vec::new();
    let mut w = w_max;
    while w >= w_min / 2.0 {
        scales.push(w);
        w /= 2.0;
    }
    let b_of: Vec<f64> = scales
        .iter()
        .map(|&w| {
            let c = incidence_counts(&pts, &lines, w, kernel);
            c.smoothed / (w * np * nl)
        })
        .collect();

    let mut rows = Vec::new();
    for (k, &w) in scales.iter().enumerate() {
        if w < w_min {
            break;
        }
        let c = incidence_counts(&pts, &lines, w, kernel);
        let m_pt = cell_concentration(x, &ScaleTriple::raw(w, w, 1.0));
        let m_line = cell_concentration(x, &ScaleTriple::raw(1.0, w, w));
        let lhs = (b_of[k] - b_of[k + 1]).abs();
        let rhs_core =
            (m_pt as f64 / np * (m_line as f64 / nl) * w.powi(-3)).sqrt();
        rows.push(HighLowRow {
            w,
            i: c.smoothed,
            b: b_of[k],
            hard_lo: c.hard_lo,
            hard_hi: c.hard_hi,
            m_pt,
            m_line,
            lhs,
            rhs_core,
            ratio: lhs / rhs_core,
        });
    }
    Ok(rows)
}
