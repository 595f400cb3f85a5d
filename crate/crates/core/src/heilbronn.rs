//! The constructive small-triangle pipeline and Heilbronn measurement tools:
//! greedy pigeonhole pairing, nearest cross-incidence, the assembled triangle,
//! brute-force minima (triangles and small k-gons), and log-log exponent
//! sweeps.
//!
//! Points live in [0, 1]².  The pipeline pairs up ⌊n/4⌋ close point pairs
//! (each at distance ≤ 10/√n), draws the line through each pair, finds the
//! closest point-to-foreign-line approach, and returns the triangle formed by
//! that line's pair and the approaching point; its area is exactly
//! ½·(pair length)·(approach distance).

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type Pt = (f64, f64);

fn dist(p: Pt, q: Pt) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

/// A line through `base` with unit direction `dir`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PairLine {
    pub base: Pt,
    pub dir: Pt,
}

impl PairLine {
    /// Through two points; a degenerate (duplicate) pair gets a horizontal
    /// line.
    pub fn through(p: Pt, q: Pt) -> PairLine {
        let (dx, dy) = (q.0 - p.0, q.1 - p.1);
        let n = (dx * dx + dy * dy).sqrt();
        let dir = if n == 0.0 { (1.0, 0.0) } else { (dx / n, dy / n) };
        PairLine { base: p, dir }
    }

    /// Euclidean distance from a point (cross product with the unit
    /// direction).
    #[inline]
    pub fn dist(&self, p: Pt) -> f64 {
        let (rx, ry) = (p.0 - self.base.0, p.1 - self.base.1);
        (rx * self.dir.1 - ry * self.dir.0).abs()
    }
}

/// Output of the greedy pairing stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingResult {
    /// (index of p_j, index of p_j′) into the input slice; disjoint.
    pub pairs: Vec<(usize, usize)>,
    /// The line through each pair, same order.
    pub lines: Vec<PairLine>,
    /// Indices never paired.
    pub leftovers: Vec<usize>,
    /// The uniform distance bound 10/√n that every pair satisfies.
    pub bound: f64,
}

/// Repeatedly drop the remaining points into a ⌈√(n_rem/25)⌉² grid over
/// [0,1]² and extract a cohabiting pair, until ⌊n/4⌋ pairs are found.  While
/// at least n/2 points remain the cell diagonal is ≤ 10/√n, so every pair
/// obeys the uniform bound.
pub fn greedy_pairing(points: &[Pt]) -> Result<PairingResult> {
    let n = points.len();
    if n < 4 {
        return Err(Error::BadInput(format!("pairing needs n ≥ 4, got {n}")));
    }
    for &(x, y) in points {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::BadInput(format!("point ({x}, {y}) outside [0,1]²")));
        }
    }
    let target = n / 4;
    let bound = 10.0 / (n as f64).sqrt();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::with_capacity(target);
    let mut lines = Vec::with_capacity(target);
    while pairs.len() < target {
        let n_rem = alive.len();
        let g = ((n_rem as f64 / 25.0).sqrt().ceil() as usize).max(1);
        // Bucket the alive points; the first doubly-occupied cell (in cell
        // order, then input order) yields the pair.  Pigeonhole guarantees
        // one exists because g² < n_rem for n_rem ≥ 4.
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); g * g];
        let mut found: Option<(usize, usize)> = None;
        for &i in &alive {
            let (x, y) = points[i];
            let cx = ((x * g as f64) as usize).min(g - 1);
            let cy = ((y * g as f64) as usize).min(g - 1);
            let cell = &mut cells[cy * g + cx];
            cell.push(i);
            if cell.len() == 2 {
                let cand = (cell[0], cell[1]);
                found = match found {
                    Some(best) if best.0 <= cand.0 => Some(best),
                    _ => Some(cand),
                };
            }
        }
        let (i, j) = found.ok_or_else(|| {
            Error::BadInput(format!("pigeonhole failed at n_rem = {n_rem}"))
        })?;
        let d = dist(points[i], points[j]);
        if d > bound {
            return Err(Error::BadInput(format!(
                "pair distance {d} exceeds bound {bound}"
            )));
        }
        pairs.push((i, j));
        lines.push(PairLine::through(points[i], points[j]));
        alive.retain(|&k| k != i && k != j);
    }
    Ok(PairingResult {
        pairs,
        lines,
        leftovers: alive,
        bound,
    })
}

/// Exhaustive nearest cross-incidence: min over j ≠ k (and both endpoints of
/// pair j) of d(p_j, ℓ_k).  Returns (j, k, point index into P, distance).
/// Quadratic; kept as the oracle for the bucketed version.
#[cfg(test)]
fn nearest_cross_naive(points: &[Pt], pr: &PairingResult) -> (usize, usize, usize, f64) {
    let mut best = (0usize, 0usize, 0usize, f64::INFINITY);
    for (j, &(a, b)) in pr.pairs.iter().enumerate() {
        for (k, line) in pr.lines.iter().enumerate() {
            if j == k {
                continue;
            }
            for &pi in &[a, b] {
                let d = line.dist(points[pi]);
                if d < best.3 {
                    best = (j, k, pi, d);
                }
            }
        }
    }
    best
}

/// Nearest cross-incidence with strip bucketing: points of the pairs are
/// sorted into vertical strips; for each line, strips whose bounding box is
/// farther than the current best are skipped.  Exact — every surviving
/// candidate is checked with the full distance.
pub fn nearest_cross_incidence(
    points: &[Pt],
    pr: &PairingResult,
) -> Result<(usize, usize, usize, f64)> {
    let m = pr.pairs.len();
    if m < 2 {
        return Err(Error::BadInput(format!(
            "cross-incidence needs ≥ 2 pairs, got {m}"
        )));
    }
    // Candidate points: both endpoints of every pair, tagged with pair index.
    let mut cands: Vec<(f64, f64, usize, usize)> = Vec::with_capacity(2 * m); // x, y, point idx, pair idx
    for (j, &(a, b)) in pr.pairs.iter().enumerate() {
        cands.push((points[a].0, points[a].1, a, j));
        cands.push((points[b].0, points[b].1, b, j));
    }
    let g = ((2 * m) as f64).sqrt().ceil() as usize;
    let mut strips: Vec<Vec<(f64, f64, usize, usize)>> = vec![Vec::new(); g];
    for &c in &cands {
        let s = ((c.0 * g as f64) as usize).min(g - 1);
        strips[s].push(c);
    }
    // Per-strip y-extent for box pruning.
    let boxes: Vec<(f64, f64)> = strips
        .iter()
        .map(|s| {
            s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, c| {
                (acc.0.min(c.1), acc.1.max(c.1))
            })
        })
        .collect();
    let mut best = (0usize, 0usize, 0usize, f64::INFINITY);
    for (k, line) in pr.lines.iter().enumerate() {
        // Normal form n·p = c with unit normal.
        let nx = line.dir.1;
        let ny = -line.dir.0;
        let c = nx * line.base.0 + ny * line.base.1;
        for (s, strip) in strips.iter().enumerate() {
            if strip.is_empty() {
                continue;
            }
            let x0 = s as f64 / g as f64;
            let x1 = (s + 1) as f64 / g as f64;
            let (ylo, yhi) = boxes[s];
            let cx = 0.5 * (x0 + x1);
            let cy = 0.5 * (ylo + yhi);
            let half = nx.abs() * 0.5 * (x1 - x0) + ny.abs() * 0.5 * (yhi - ylo);
            let box_dist = (nx * cx + ny * cy - c).abs() - half;
            // Small safety margin so 1-ulp disagreement between the normal
            // form and the cross-product formula can never skip the argmin.
            if box_dist - 1e-12 > best.3 {
                continue;
            }
            for &(x, y, pi, j) in strip {
                if j == k {
                    continue;
                }
                // Same formula as the exhaustive oracle, bit-for-bit.
                let d = line.dist((x, y));
                if d < best.3 {
                    best = (j, k, pi, d);
                }
            }
        }
    }
    Ok(best)
}

/// How a triangle (or k-gon) minimum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleMethod {
    Pipeline,
    BruteForce,
    Kgon,
}

/// A triangle (or convex k-gon) from the input set with its area.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangleResult {
    /// Distinct indices into the input point set (3 for triangles, k for
    /// k-gons).
    pub indices: Vec<usize>,
    /// ½|det| for triangles; convex-hull area for k-gons.
    pub area: f64,
    pub method: TriangleMethod,
}

/// Exact triangle area from point coordinates.
pub fn triangle_area(p1: Pt, p2: Pt, p3: Pt) -> f64 {
    0.5 * ((p2.0 - p1.0) * (p3.1 - p1.1) - (p3.0 - p1.0) * (p2.1 - p1.1)).abs()
}

/// Pairing → lines → nearest cross-incidence → triangle (p_k, p_k′, p_j).
/// The area equals ½·|p_k p_k′|·d(p_j, ℓ_k) by construction and is
/// re-derived from the determinant formula.
pub fn small_triangle_pipeline(points: &[Pt]) -> Result<TriangleResult> {
    if points.len() < 8 {
        return Err(Error::BadInput(format!(
            "pipeline needs n ≥ 8, got {}",
            points.len()
        )));
    }
    let pr = greedy_pairing(points)?;
    let (_, k, pi, _) = nearest_cross_incidence(points, &pr)?;
    let (ka, kb) = pr.pairs[k];
    let area = triangle_area(points[ka], points[kb], points[pi]);
    Ok(TriangleResult {
        indices: vec![ka, kb, pi],
        area,
        method: TriangleMethod::Pipeline,
    })
}

/// Convex-hull area of a small point set (monotone chain + shoelace).
fn hull_area(pts: &mut Vec<Pt>) -> f64 {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let cross = |o: Pt, a: Pt, b: Pt| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<Pt> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Pt>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut a = 0.0;
    for i in 0..hull.len() {
        let p = hull[i];
        let q = hull[(i + 1) % hull.len()];
        a += p.0 * q.1 - q.0 * p.1;
    }
    0.5 * a.abs()
}

/// Exact minimum over all k-subsets of convex-hull area (triangle area for
/// k = 3).  Desk-scale caps: n ≤ 400 for k = 3, n ≤ 60 for k = 4, n ≤ 30
/// for k = 5.
pub fn brute_force_min_triangle(points: &[Pt], k: usize) -> Result<TriangleResult> {
    let n = points.len();
    let cap = match k {
        3 => 400,
        4 => 60,
        5 => 30,
        _ => return Err(Error::BadInput(format!("k = {k} unsupported (3..=5)"))),
    };
    if n < k {
        return Err(Error::BadInput(format!("need n ≥ k = {k}, got {n}")));
    }
    if n > cap {
        return Err(Error::BadInput(format!("n = {n} exceeds cap {cap} for k = {k}")));
    }
    if k == 3 {
        // Parallel over the leading index.
        let best = (0..n - 2)
            .into_par_iter()
            .map(|i| {
                let mut loc = (f64::INFINITY, [0usize; 3]);
                for j in i + 1..n - 1 {
                    for l in j + 1..n {
                        let a = triangle_area(points[i], points[j], points[l]);
                        if a < loc.0 {
                            loc = (a, [i, j, l]);
                        }
                    }
                }
                loc
            })
            .min_by(|a, b| a.partial_cmp(b).unwrap())
            .unwrap();
        return Ok(TriangleResult {
            indices: best.1.to_vec(),
            area: best.0,
            method: TriangleMethod::BruteForce,
        });
    }
    // k-subsets by odometer.
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = (f64::INFINITY, idx.clone());
    loop {
        let mut sub: Vec<Pt> = idx.iter().map(|&i| points[i]).collect();
        let a = hull_area(&mut sub);
        if a < best.0 {
            best = (a, idx.clone());
        }
        // Advance.
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if idx[pos] != n - k + pos {
                idx[pos] += 1;
                for q in pos + 1..k {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return Ok(TriangleResult {
                    indices: best.1,
                    area: best.0,
                    method: TriangleMethod::Kgon,
                });
            }
        }
    }
}

/// Uniform random points in [0, 1]² (deterministic per seed).
pub fn unit_square_random(n: usize, seed: u64) -> Vec<Pt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
        .collect()
}

/// One sweep measurement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub trial: usize,
    pub area: f64,
}

/// Exponent sweep output: per-trial areas, per-n medians, and the
/// least-squares slope of log(median area) vs log n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub medians: Vec<(usize, f64)>,
    pub slope: f64,
    /// Set when some median is 0 (collinear-rich inputs); the slope is then
    /// meaningless and reported as NaN.
    pub degenerate: bool,
}

/// Run the pipeline over a grid of n values and seeded trials, take per-n
/// medians, and fit the log-log slope.
pub fn exponent_sweep(
    gen: impl Fn(usize, u64) -> Vec<Pt> + Sync,
    n_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    if n_list.len() < 3 {
        return Err(Error::BadInput("sweep needs ≥ 3 n-values".into()));
    }
    let mut rows: Vec<SweepRow> = n_list
        .par_iter()
        .flat_map_iter(|&n| (0..trials).map(move |t| (n, t)))
        .map(|(n, t)| {
            let pts = gen(n, seed ^ ((n as u64) << 20) ^ t as u64);
            let tri = small_triangle_pipeline(&pts)?;
            Ok(SweepRow {
                n,
                trial: t,
                area: tri.area,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.trial));
    let mut medians = Vec::new();
    for &n in n_list {
        let mut areas: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.area).collect();
        areas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = if areas.len() % 2 == 1 {
            areas[areas.len() / 2]
        } else {
            0.5 * (areas[areas.len() / 2 - 1] + areas[areas.len() / 2])
        };
        medians.push((n, med));
    }
    let degenerate = medians.iter().any(|&(_, m)| m <= 0.0);
    let slope = if degenerate {
        f64::NAN
    } else {
        // Least squares of ln(median) on ln(n).
        let xs: Vec<f64> = medians.iter().map(|&(n, _)| (n as f64).ln()).collect();
        let ys: Vec<f64> = medians.iter().map(|&(_, m)| m.ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    };
    Ok(SweepResult {
        rows,
        medians,
        slope,
        degenerate,
    })
}
