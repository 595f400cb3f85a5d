//! Branching functions on the grid D_m, direction numbers, the structural
//! inequality checks (Lipschitz/monotone, submodularity, direction
//! superadditivity), the b/e functionals, and the effective-triple and
//! directional-stability searches.
//!
//! For a configuration X with δ = 2^{−mT}, the branching function is
//!
//! ```text
//! f(x, y, z) = log_{1/δ} |X|_{δ^x × δ^z × δ^y}
//! ```
//!
//! on D_m = {(x,y,z) ∈ (1/m)ℤ³ : x,y ∈ [0,1], z ∈ [0, min(1, x+y)]} (the
//! admissibility constraint z ≤ x+y in exponent form).  The shorthand
//! f(x, y) means f(x, y, x+y), and relative values f(dx, dy, dz; x, y) are
//! measured against the base point (x, y, x+y).

use crate::phase::{Configuration, ScaleTriple};
use crate::regularity::UniformityCertificate;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Branching function values over D_m.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchingFunction {
    /// Grid density: coordinates are multiples of 1/m.
    pub m: u32,
    /// Dyadic depth per grid step: sides are 2^{−T·index}.
    pub t_exp: u32,
    /// δ = 2^{−mT}.
    pub delta: f64,
    /// values[(ix, iy, iz)] = f(ix/m, iy/m, iz/m); iz ≤ min(m, ix+iy).
    #[serde(with = "crate::util::tuple_key_map")]
    pub values: HashMap<(u32, u32, u32), f64>,
    /// The o(1) slack used by property checks: 6·log₂K/(mT) + 3/m.
    pub tolerance: f64,
    /// False when no uniformity certificate was supplied (K = 1 assumed;
    /// property checks may fail beyond the nominal tolerance).
    pub certified: bool,
}

impl BranchingFunction {
    /// Grid step 1/m.
    pub fn step(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// f at grid indices, if inside D_m.
    pub fn get(&self, ix: i64, iy: i64, iz: i64) -> Option<f64> {
        let m = self.m as i64;
        if ix < 0 || iy < 0 || iz < 0 || ix > m || iy > m || iz > (ix + iy).min(m) {
            return None;
        }
        self.values.get(&(ix as u32, iy as u32, iz as u32)).copied()
    }

    /// The shorthand f(x, y) = f(x, y, min(1, x+y)).
    pub fn f2(&self, ix: i64, iy: i64) -> Option<f64> {
        self.get(ix, iy, (ix + iy).min(self.m as i64))
    }

    /// Relative value f(dx, dy, dz; x, y) = f(x+dx, y+dy, x+y+dz) − f(x, y,
    /// x+y) in grid units; `None` when either endpoint leaves D_m (offsets
    /// are skipped, never clamped).
    pub fn rel(&self, ix: i64, iy: i64, dx: i64, dy: i64, dz: i64) -> Option<f64> {
        let m = self.m as i64;
        if ix + iy > m {
            return None; // base z = x+y must itself be on the grid
        }
        let base = self.get(ix, iy, ix + iy)?;
        let target = self.get(ix + dx, iy + dy, ix + iy + dz)?;
        Some(target - base)
    }

    /// All grid points of D_m in lexicographic order.
    pub fn domain(&self) -> Vec<(u32, u32, u32)> {
        let m = self.m;
        let mut out = Vec::new();
        for ix in 0..=m {
            for iy in 0..=m {
                for iz in 0..=(ix + iy).min(m) {
                    out.push((ix, iy, iz));
                }
            }
        }
        out
    }

    /// Build from a closed-form function g(x, y, z) (synthetic grids for
    /// tests and the effective-triple barrier comparisons).
    pub fn from_fn(
        m: u32,
        t_exp: u32,
        tolerance: f64,
        g: impl Fn(f64, f64, f64) -> f64,
    ) -> Self {
        let mut values = HashMap::new();
        for ix in 0..=m {
            for iy in 0..=m {
                for iz in 0..=(ix + iy).min(m) {
                    let s = 1.0 / m as f64;
                    values.insert(
                        (ix, iy, iz),
                        g(ix as f64 * s, iy as f64 * s, iz as f64 * s),
                    );
                }
            }
        }
        BranchingFunction {
            m,
            t_exp,
            delta: (-((m * t_exp) as f64)).exp2(),
            values,
            tolerance,
            certified: true,
        }
    }
}

/// Fill f over D_m from covering numbers of X.  The run decomposition is
/// computed once and reused across all grid triples, so large grid
/// configurations cost one linear pass plus cheap per-triple sweeps.
///
/// With a certificate, tolerance = 6·log₂(K)/(mT) + 3/m; without one, K = 1
/// is assumed and the function is flagged uncertified.
pub fn compute_branching(
    x: &Configuration,
    m: u32,
    t_exp: u32,
    cert: Option<&UniformityCertificate>,
) -> Result<BranchingFunction> {
    if x.is_empty() {
        return Err(Error::BadInput("empty configuration".into()));
    }
    if m == 0 || t_exp == 0 {
        return Err(Error::BadInput("m and T must be positive".into()));
    }
    let mt = (m * t_exp) as f64;
    let runs = x.runs();
    let mut values = HashMap::new();
    for ix in 0..=m {
        for iy in 0..=m {
            for iz in 0..=(ix + iy).min(m) {
                let s = ScaleTriple {
                    u: (-((t_exp * ix) as f64)).exp2(),
                    v: (-((t_exp * iz) as f64)).exp2(),
                    w: (-((t_exp * iy) as f64)).exp2(),
                };
                let cov = crate::phase::covering_number_runs(&runs, &s)?;
                values.insert((ix, iy, iz), (cov as f64).log2() / mt);
            }
        }
    }
    let k = cert.map(|c| c.k.max(1.0)).unwrap_or(1.0);
    let tolerance = 6.0 * k.log2() / mt + 3.0 / m as f64;
    Ok(BranchingFunction {
        m,
        t_exp,
        delta: (-mt).exp2(),
        values,
        tolerance,
        certified: cert.is_some(),
    })
}

/// Worst violations of Lemma 3.7 over all grid edges: f must be
/// nondecreasing along each coordinate and gain at most step (+tolerance)
/// per edge.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// max over edges of −Δf (clamped at 0): monotonicity defect.
    pub max_decrease: f64,
    /// max over edges of Δf − 1/m (clamped at 0): Lipschitz excess.
    pub max_excess: f64,
}

pub fn check_lipschitz_monotone(f: &BranchingFunction) -> LipschitzReport {
    let mut dec = 0.0f64;
    let mut exc = 0.0f64;
    let step = f.step();
    for &(ix, iy, iz) in &f.domain() {
        let v = f.get(ix as i64, iy as i64, iz as i64).unwrap();
        for (dx, dy, dz) in [(1i64, 0i64, 0i64), (0, 1, 0), (0, 0, 1)] {
            if let Some(v2) = f.get(ix as i64 + dx, iy as i64 + dy, iz as i64 + dz) {
                let d = v2 - v;
                dec = dec.max(-d);
                exc = exc.max(d - step);
            }
        }
    }
    LipschitzReport {
        max_decrease: dec,
        max_excess: exc,
    }
}

/// Max violation of Lemma 3.8 submodularity
/// f(a∨b) + f(a∧b) − f(a) − f(b) over pairs a, b ∈ D_m (exhaustive when the
/// grid has at most `pair_budget` pairs, else a deterministic stride).
pub fn check_submodular(f: &BranchingFunction) -> f64 {
    let dom = f.domain();
    let n = dom.len();
    let pair_budget = 2_000_000usize;
    let stride = ((n * n) / pair_budget).max(1);
    let mut worst = f64::NEG_INFINITY;
    let mut idx = 0usize;
    for i in 0..n {
        for j in i..n {
            idx += 1;
            if idx % stride != 0 && stride > 1 {
                continue;
            }
            let a = dom[i];
            let b = dom[j];
            let hi = (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2));
            let lo = (a.0.min(b.0), a.1.min(b.1), a.2.min(b.2));
            let (fa, fb) = (
                f.values[&a],
                f.values[&b],
            );
            let (fhi, flo) = match (
                f.get(hi.0 as i64, hi.1 as i64, hi.2 as i64),
                f.get(lo.0 as i64, lo.1 as i64, lo.2 as i64),
            ) {
                (Some(x), Some(y)) => (x, y),
                _ => continue, // lattice op left D_m: skipped, never clamped
            };
            worst = worst.max(fhi + flo - fa - fb);
        }
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

/// Direction numbers d(t; x, y) = f(0,t,0; x,y) and the dual
/// d∨(t; x, y) = f(t,0,0; x,y), on the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionNumbers {
    pub m: u32,
    /// d[(it, ix, iy)].
    #[serde(with = "crate::util::tuple_key_map")]
    pub d: HashMap<(u32, u32, u32), f64>,
    /// d∨[(it, ix, iy)].
    #[serde(with = "crate::util::tuple_key_map")]
    pub dv: HashMap<(u32, u32, u32), f64>,
    pub tolerance: f64,
}

pub fn direction_numbers(f: &BranchingFunction) -> DirectionNumbers {
    let m = f.m;
    let mut d = HashMap::new();
    let mut dv = HashMap::new();
    for it in 0..=m {
        for ix in 0..=m {
            for iy in 0..=m {
                if let Some(v) = f.rel(ix as i64, iy as i64, 0, it as i64, 0) {
                    d.insert((it, ix, iy), v);
                }
                if let Some(v) = f.rel(ix as i64, iy as i64, it as i64, 0, 0) {
                    dv.insert((it, ix, iy), v);
                }
            }
        }
    }
    DirectionNumbers {
        m,
        d,
        dv,
        tolerance: f.tolerance,
    }
}

/// Worst violations of Lemma 3.9 on the grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DirectionReport {
    /// (i) superadditivity: d(t;x,y) + d(s;x,y+t) − d(t+s;x,y).
    pub max_superadditivity: f64,
    /// (ii) lower bound: f(0,t;x,y) − t − d(t;x,y).
    pub max_lower_bound: f64,
    /// (iii) box: −(d(t+s)−d(t)) and (d(t+s)−d(t)) − s, whichever is worse.
    pub max_box: f64,
    /// range: violations of 0 ≤ d ≤ t (and the dual).
    pub max_range: f64,
}

pub fn check_direction_inequalities(dn: &DirectionNumbers, f: &BranchingFunction) -> DirectionReport {
    let m = dn.m;
    let step = 1.0 / m as f64;
    let mut sup = 0.0f64;
    let mut low = 0.0f64;
    let mut boxv = 0.0f64;
    let mut range = 0.0f64;
    for (&(it, ix, iy), &d_t) in &dn.d {
        let t = it as f64 * step;
        range = range.max(-d_t).max(d_t - t);
        // (i): d(t+s; x,y) ≥ d(t; x,y) + d(s; x, y+t).
        for is in 0..=(m - it.min(m)) {
            if let (Some(&d_ts), Some(&d_s_shift)) = (
                dn.d.get(&(it + is, ix, iy)),
                dn.d.get(&(is, ix, iy + it)),
            ) {
                sup = sup.max(d_t + d_s_shift - d_ts);
                // (iii): 0 ≤ d(t+s) − d(t) ≤ s.
                let diff = d_ts - d_t;
                let s = is as f64 * step;
                boxv = boxv.max(-diff).max(diff - s);
            }
        }
        // (ii): d(t; x, y) ≥ f(0, t; x, y) − t.
        if let Some(f0t) = f.rel(ix as i64, iy as i64, 0, it as i64, it as i64) {
            low = low.max(f0t - t - d_t);
        }
    }
    for (&(it, _, _), &v) in &dn.dv {
        let t = it as f64 * step;
        range = range.max(-v).max(v - t);
    }
    DirectionReport {
        max_superadditivity: sup,
        max_lower_bound: low,
        max_box: boxv,
        max_range: range,
    }
}

/// The b/e functionals of the effective-triple search:
///
/// ```text
/// b(t; x, y) = f(t,t,t; x,y) − (f(t,0,t; x,y) + f(0,t,t; x,y) − t)
/// e(s; x, y) = ½ (f(s,0,s; x,y) + f(0,s,s; x,y) − 3s)
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeGrids {
    pub m: u32,
    /// b[(it, ix, iy)]; out-of-domain combinations absent.
    #[serde(with = "crate::util::tuple_key_map")]
    pub b: HashMap<(u32, u32, u32), f64>,
    /// e[(is, ix, iy)].
    #[serde(with = "crate::util::tuple_key_map")]
    pub e: HashMap<(u32, u32, u32), f64>,
}

pub fn be_functionals(f: &BranchingFunction) -> BeGrids {
    let m = f.m;
    let step = 1.0 / m as f64;
    let mut b = HashMap::new();
    let mut e = HashMap::new();
    for ix in 0..=m {
        for iy in 0..=m {
            for it in 0..=m {
                let t = it as f64 * step;
                let (i, j, k) = (ix as i64, iy as i64, it as i64);
                if let (Some(fttt), Some(ft0), Some(f0t)) = (
                    f.rel(i, j, k, k, k),
                    f.rel(i, j, k, 0, k),
                    f.rel(i, j, 0, k, k),
                ) {
                    b.insert((it, ix, iy), fttt - (ft0 + f0t - t));
                    e.insert((it, ix, iy), 0.5 * (ft0 + f0t - 3.0 * t));
                }
            }
        }
    }
    BeGrids { m, b, e }
}

/// A certified effective triple.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EffectiveTriple {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub c1: f64,
    pub c2: f64,
    pub b_value: f64,
    pub min_e_value: f64,
}

/// Exhaustive grid search for (t; x, y) with max{t, x, y} ≤ c2, t ≥ 1/m, and
/// b(t; x, y) + e(s; x, y) ≥ c1 for every grid s with t ≤ s ≤ 1 − (x+y).
/// Every candidate is certified over its full s-range before being returned;
/// candidates whose s-range has any out-of-domain value are rejected.
pub fn find_effective_triple(f: &BranchingFunction, c1: f64, c2: f64) -> Option<EffectiveTriple> {
    let grids = be_functionals(f);
    let m = f.m;
    let step = 1.0 / m as f64;
    for it in 1..=m {
        for ix in 0..=m {
            for iy in 0..=m {
                let (t, x, y) = (it as f64 * step, ix as f64 * step, iy as f64 * step);
                if t.max(x).max(y) > c2 + 1e-12 {
                    continue;
                }
                let Some(&bv) = grids.b.get(&(it, ix, iy)) else {
                    continue;
                };
                // s ranges over the grid from t to 1 − (x+y).
                let is_hi = m as i64 - ix as i64 - iy as i64;
                if is_hi < it as i64 {
                    continue;
                }
                let mut min_e = f64::INFINITY;
                let mut complete = true;
                for is in it..=(is_hi as u32) {
                    match grids.e.get(&(is, ix, iy)) {
                        Some(&ev) => min_e = min_e.min(ev),
                        None => {
                            complete = false;
                            break;
                        }
                    }
                }
                if !complete || !min_e.is_finite() {
                    continue;
                }
                if bv + min_e >= c1 {
                    return Some(EffectiveTriple {
                        t,
                        x,
                        y,
                        c1,
                        c2,
                        b_value: bv,
                        min_e_value: min_e,
                    });
                }
            }
        }
    }
    None
}

/// Grid points (ix, iy) where the direction number is ρ-stable at step t:
/// d(t; x, y) − d(t; x+t, y) ≤ ρ·t.
pub fn directional_stability_scan(dn: &DirectionNumbers, it: u32, rho: f64) -> Vec<(u32, u32)> {
    let m = dn.m;
    let t = it as f64 / m as f64;
    let mut out = Vec::new();
    for ix in 0..=m {
        for iy in 0..=m {
            if let (Some(&here), Some(&shifted)) =
                (dn.d.get(&(it, ix, iy)), dn.d.get(&(it, ix + it, iy)))
            {
                if here - shifted <= rho * t + 1e-12 {
                    out.push((ix, iy));
                }
            }
        }
    }
    out
}
