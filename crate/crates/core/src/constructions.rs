//! Generators for the example configurations used in tests and experiments.
//!
//! Every generator is a pure function of its parameters (and seed): identical
//! inputs produce bit-identical configurations.  Generators that advertise a
//! regularity property verify it on their own output before returning.

use crate::phase::{Configuration, PhasePoint};
use crate::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Minimum pairwise max-norm distance in ℝ³ via a spatial hash (exact).
pub fn min_separation(points: &[PhasePoint]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 1.0;
    }
    // Any pair at distance < cell must lie in adjacent cells, so if a pass
    // finds a pair below the cell size it has found the global minimum.
    let mut cell = 2.0 * (n as f64).powf(-1.0 / 3.0);
    loop {
        use std::collections::HashMap;
        let key = |p: &PhasePoint| {
            (
                (p.a / cell).floor() as i64,
                (p.b / cell).floor() as i64,
                (p.c / cell).floor() as i64,
            )
        };
        let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            grid.entry(key(p)).or_default().push(i);
        }
        let mut best = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            let (ki, kj, kk) = key(p);
            for di in -1..=1 {
                for dj in -1..=1 {
                    for dk in -1..=1 {
                        if let Some(bucket) = grid.get(&(ki + di, kj + dj, kk + dk)) {
                            for &j in bucket {
                                if j > i {
                                    let q = &points[j];
                                    let d = (p.a - q.a)
                                        .abs()
                                        .max((p.b - q.b).abs())
                                        .max((p.c - q.c).abs());
                                    best = best.min(d);
                                }
                            }
                        }
                    }
                }
            }
        }
        if best < cell {
            return best;
        }
        if cell > 4.0 {
            return best; // all points coincide-free but spread out
        }
        cell *= 2.0;
    }
}

/// Largest power of two ≤ x, clamped to [2⁻⁴⁰, 1].
pub fn dyadic_floor(x: f64) -> f64 {
    if !(x > 0.0) {
        return 2.0f64.powi(-40);
    }
    let k = x.log2().floor();
    (k.clamp(-40.0, 0.0)).exp2()
}

/// n i.i.d. uniform points in Ω; δ = dyadic floor of the realized
/// min-separation.
pub fn gen_uniform_random(n: usize, seed: u64) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::BadInput("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<PhasePoint> = (0..n)
        .map(|_| {
            PhasePoint::new(
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            )
        })
        .collect();
    let delta = dyadic_floor(min_separation(&pts));
    Ok(Configuration::new(
        pts,
        delta,
        format!("uniform_random(n={n},seed={seed})"),
    ))
}

/// n random planar points all carrying the same slope.
pub fn gen_single_slope(n: usize, slope: f64, seed: u64) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::BadInput("n must be positive".into()));
    }
    if slope.abs() > 1.0 {
        return Err(Error::BadInput(format!("slope {slope} outside [-1,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<PhasePoint> = (0..n)
        .map(|_| PhasePoint::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), slope))
        .collect();
    let delta = dyadic_floor(min_separation(&pts));
    Ok(Configuration::new(
        pts,
        delta,
        format!("single_slope(n={n},slope={slope},seed={seed})"),
    ))
}

/// n points split over k clusters of the given half-width, random slopes.
pub fn gen_cluster_mix(n: usize, clusters: usize, spread: f64, seed: u64) -> Result<Configuration> {
    if n == 0 || clusters == 0 {
        return Err(Error::BadInput("n and clusters must be positive".into()));
    }
    if !(spread > 0.0 && spread <= 1.0) {
        return Err(Error::BadInput(format!("spread {spread} outside (0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<(f64, f64, f64)> = (0..clusters)
        .map(|_| {
            (
                rng.gen_range(-0.8..=0.8),
                rng.gen_range(-0.8..=0.8),
                rng.gen_range(-0.8..=0.8),
            )
        })
        .collect();
    let pts: Vec<PhasePoint> = (0..n)
        .map(|i| {
            let (ca, cb, cc) = centers[i % clusters];
            PhasePoint::new(
                (ca + rng.gen_range(-spread..=spread)).clamp(-1.0, 1.0),
                (cb + rng.gen_range(-spread..=spread)).clamp(-1.0, 1.0),
                (cc + rng.gen_range(-spread..=spread)).clamp(-1.0, 1.0),
            )
        })
        .collect();
    let delta = dyadic_floor(min_separation(&pts));
    Ok(Configuration::new(
        pts,
        delta,
        format!("cluster_mix(n={n},clusters={clusters},spread={spread},seed={seed})"),
    ))
}

/// Validate a slope field: |(1, φ)·∇φ| = |φ_x + φ·φ_y| ∈ [1/4, 4] and
/// |φ| ≤ 1, finite-difference sampled over [−1,1]².
fn check_slope_field(phi: &dyn Fn(f64, f64) -> f64) -> Result<()> {
    let g = 32usize;
    let h = 1e-4;
    for i in 0..=g {
        for j in 0..=g {
            let x = -1.0 + 2.0 * i as f64 / g as f64;
            let y = -1.0 + 2.0 * j as f64 / g as f64;
            let v = phi(x, y);
            if v.abs() > 1.0 {
                return Err(Error::BadInput(format!("slope field value {v} at ({x},{y})")));
            }
            let px = (phi((x + h).min(1.0), y) - phi((x - h).max(-1.0), y))
                / ((x + h).min(1.0) - (x - h).max(-1.0));
            let py = (phi(x, (y + h).min(1.0)) - phi(x, (y - h).max(-1.0)))
                / ((y + h).min(1.0) - (y - h).max(-1.0));
            let nd = (px + v * py).abs();
            if !(0.25..=4.0).contains(&nd) {
                return Err(Error::BadInput(format!(
                    "slope field degenerate: |(1,φ)·∇φ| = {nd} at ({x},{y})"
                )));
            }
        }
    }
    Ok(())
}

/// The grid–slope-field configuration
/// X = {(x, y, φ(x, y)) : (x, y) ∈ δℤ² ∩ [−1,1]²}, default φ(x,y) = x.
///
/// Points are emitted column-major (x outer, y inner), so each column is one
/// arithmetic run for the compressed covering path.
pub fn gen_grid_slope_field(
    delta: f64,
    phi: Option<&dyn Fn(f64, f64) -> f64>,
) -> Result<Configuration> {
    if !crate::util::is_pow2(delta) || delta < 2.0f64.powi(-16) || delta > 1.0 {
        return Err(Error::NotDyadic(format!("delta {delta} not dyadic in [2^-16, 1]")));
    }
    if let Some(f) = phi {
        check_slope_field(f)?;
    }
    let n = (2.0 / delta) as i64;
    let mut pts = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
    for i in 0..=n {
        let x = -1.0 + i as f64 * delta;
        for j in 0..=n {
            let y = -1.0 + j as f64 * delta;
            let c = match phi {
                Some(f) => f(x, y),
                None => x,
            };
            pts.push(PhasePoint::new(x, y, c));
        }
    }
    Ok(Configuration::new(
        pts,
        delta,
        format!("grid_slope_field(delta={},phi={})", crate::util::format_dyadic(delta),
            if phi.is_some() { "custom" } else { "identity" }),
    ))
}

/// Realizable point-set exponents for the product construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TExponent {
    /// t = 1: horizontal line of points (digits {(0,0),(1,0)}).
    One,
    /// t = log₂3: corner Cantor set (drop the (1,1) digit).
    Log2Three,
    /// t = 2: the full grid.
    Two,
}

impl TExponent {
    pub fn value(self) -> f64 {
        match self {
            TExponent::One => 1.0,
            TExponent::Log2Three => 3.0f64.log2(),
            TExponent::Two => 2.0,
        }
    }
    fn digits(self) -> &'static [(u8, u8)] {
        match self {
            TExponent::One => &[(0, 0), (1, 0)],
            TExponent::Log2Three => &[(0, 0), (0, 1), (1, 0)],
            TExponent::Two => &[(0, 0), (0, 1), (1, 0), (1, 1)],
        }
    }
}

/// Realizable slope-set exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SExponent {
    /// s = 0: a single slope.
    Zero,
    /// s = 1/2: base-4 digits {0, 3}.
    Half,
    /// s = log₃2: middle-thirds Cantor set.
    Log3Two,
    /// s = 1: the full δ-grid of slopes in [0, 1].
    One,
}

impl SExponent {
    pub fn value(self) -> f64 {
        match self {
            SExponent::Zero => 0.0,
            SExponent::Half => 0.5,
            SExponent::Log3Two => 2.0f64.log(3.0),
            SExponent::One => 1.0,
        }
    }

    /// The slope set at resolution δ, inside [0, 1].
    pub fn slope_set(self, delta: f64) -> Vec<f64> {
        match self {
            SExponent::Zero => vec![0.0],
            SExponent::One => {
                let n = (1.0 / delta) as i64;
                (0..=n).map(|i| i as f64 * delta).collect()
            }
            SExponent::Half => {
                // base-4 digit restriction to {0, 3}
                let depth = ((1.0 / delta).log(4.0).ceil() as usize).max(1);
                digit_set(&[0, 3], 4, depth)
            }
            SExponent::Log3Two => {
                let depth = ((1.0 / delta).log(3.0).ceil() as usize).max(1);
                digit_set(&[0, 2], 3, depth)
            }
        }
    }
}

/// All Σ d_l · base^{−l} with digits from `digits`, depth levels.
fn digit_set(digits: &[u8], base: u32, depth: usize) -> Vec<f64> {
    let mut vals = vec![0.0f64];
    let mut scale = 1.0;
    for _ in 0..depth {
        scale /= base as f64;
        let mut next = Vec::with_capacity(vals.len() * digits.len());
        for &v in &vals {
            for &d in digits {
                next.push(v + d as f64 * scale);
            }
        }
        vals = next;
    }
    vals.sort_unstable_by(f64::total_cmp);
    vals
}

/// Two-sided Ahlfors-David constant of a planar set at exponent t: the max
/// over sampled centers p ∈ P and dyadic radii w ∈ [δ, 1] of
/// max(r, 1/r) with r = |P ∩ B_w(p)| / (w^t |P|), max-norm balls.
pub fn ad_constant_planar(points: &[(f64, f64)], t: f64, delta: f64) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    let n = points.len();
    let stride = (n / 128).max(1);
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_unstable_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let mut worst = 1.0f64;
    let mut w = 1.0;
    while w >= delta {
        for p in points.iter().step_by(stride) {
            let lo = sorted.partition_point(|q| q.0 < p.0 - w);
            let hi = sorted.partition_point(|q| q.0 <= p.0 + w);
            let count = sorted[lo..hi]
                .iter()
                .filter(|q| (q.1 - p.1).abs() <= w)
                .count();
            let r = count as f64 / (w.powf(t) * n as f64);
            worst = worst.max(r).max(1.0 / r);
        }
        w /= 2.0;
    }
    worst
}

/// Product construction: a digit-restricted planar Cantor set of exponent t,
/// each point carrying the same digit-restricted slope set of exponent s.
/// The advertised two-sided AD bound (constant ≤ 16) is re-verified on the
/// generated planar set.
pub fn gen_ad_regular_product(
    t: TExponent,
    s: SExponent,
    delta: f64,
    seed: u64,
) -> Result<Configuration> {
    if !crate::util::is_pow2(delta) || delta >= 1.0 {
        return Err(Error::NotDyadic(format!("delta {delta}")));
    }
    let depth = (1.0 / delta).log2().round() as usize;
    let digits = t.digits();
    let n_pts = (digits.len() as f64).powi(depth as i32);
    let slopes = s.slope_set(delta);
    if n_pts * slopes.len() as f64 > (1u64 << 24) as f64 {
        return Err(Error::BadInput(format!(
            "construction too large: {n_pts} points x {} slopes",
            slopes.len()
        )));
    }
    // Planar digit set in [0,1)².
    let mut plan: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut scale = 1.0;
    for _ in 0..depth {
        scale /= 2.0;
        let mut next = Vec::with_capacity(plan.len() * digits.len());
        for &(x, y) in &plan {
            for &(dx, dy) in digits {
                next.push((x + dx as f64 * scale, y + dy as f64 * scale));
            }
        }
        plan = next;
    }
    plan.sort_unstable_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));

    let ad = ad_constant_planar(&plan, t.value(), delta);
    if ad > 16.0 {
        return Err(Error::BadInput(format!(
            "generated set misses its AD bound: constant {ad}"
        )));
    }

    let mut pts = Vec::with_capacity(plan.len() * slopes.len());
    for &(x, y) in &plan {
        for &c in &slopes {
            pts.push(PhasePoint::new(x, y, c));
        }
    }
    Ok(Configuration::new(
        pts,
        delta,
        format!(
            "ad_regular_product(t={:?},s={:?},delta={},seed={seed})",
            t,
            s,
            crate::util::format_dyadic(delta)
        ),
    ))
}

/// Cartesian assembly: every point paired with each of its slopes.
pub fn gen_lines_through_points(
    points: &[(f64, f64)],
    slope_sets: &[Vec<f64>],
    delta: f64,
) -> Result<Configuration> {
    if points.len() != slope_sets.len() {
        return Err(Error::BadInput(format!(
            "{} points vs {} slope sets",
            points.len(),
            slope_sets.len()
        )));
    }
    let mut pts = Vec::new();
    for (p, slopes) in points.iter().zip(slope_sets) {
        for &c in slopes {
            if c.abs() > 1.0 {
                return Err(Error::BadInput(format!("slope {c} outside [-1,1]")));
            }
            pts.push(PhasePoint::new(p.0, p.1, c));
        }
    }
    Ok(Configuration::new(
        pts,
        delta,
        "lines_through_points".to_string(),
    ))
}

/// Serializable generator request (the CLI-facing surface).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    UniformRandom {
        n: usize,
        seed: u64,
    },
    SingleSlope {
        n: usize,
        slope: f64,
        seed: u64,
    },
    ClusterMix {
        n: usize,
        clusters: usize,
        spread: f64,
        seed: u64,
    },
    GridSlopeField {
        delta: f64,
    },
    AdRegularProduct {
        t: TExponent,
        s: SExponent,
        delta: f64,
        seed: u64,
    },
    LinesThroughPoints {
        points: Vec<(f64, f64)>,
        slope_sets: Vec<Vec<f64>>,
        delta: f64,
    },
}

/// Run a generator request.
pub fn generate(spec: &GeneratorSpec) -> Result<Configuration> {
    match spec {
        GeneratorSpec::UniformRandom { n, seed } => gen_uniform_random(*n, *seed),
        GeneratorSpec::SingleSlope { n, slope, seed } => gen_single_slope(*n, *slope, *seed),
        GeneratorSpec::ClusterMix {
            n,
            clusters,
            spread,
            seed,
        } => gen_cluster_mix(*n, *clusters, *spread, *seed),
        GeneratorSpec::GridSlopeField { delta } => gen_grid_slope_field(*delta, None),
        GeneratorSpec::AdRegularProduct { t, s, delta, seed } => {
            gen_ad_regular_product(*t, *s, *delta, *seed)
        }
        GeneratorSpec::LinesThroughPoints {
            points,
            slope_sets,
            delta,
        } => gen_lines_through_points(points, slope_sets, *delta),
    }
}
