//! The smoothing profile η used by the smoothed incidence count.
//!
//! η = 1_{[−1/2,1/2]} ∗ κ ∗ κ_{1/2}, where κ is a smooth even bump of mass 1
//! supported in [−1/50, 1/50] (κ(x) ∝ exp(−1/(1−(50x)²))) and κ_{1/2}(x) =
//! 2κ(2x).  Consequently
//!
//! * η(x) = 1 exactly for |x| ≤ 1/2 − 3/100 (plateau),
//! * η(x) = 0 exactly for |x| ≥ 1/2 + 3/100 (support),
//! * 0 ≤ η ≤ 1, η even, ∫η = 1.
//!
//! The profile is tabulated once on a uniform grid over [−1, 1] and evaluated
//! by linear interpolation; the plateau and the exterior are snapped to exact
//! 1.0 / 0.0 (mathematically correct for |x| ≤ 0.45 resp. |x| ≥ 0.55, and it
//! keeps the hard/smoothed sandwich exact rather than within quadrature
//! noise).

use crate::{Error, Result};
use std::sync::OnceLock;

/// Tabulated smoothing profile on [−1, 1].
#[derive(Debug, Clone)]
pub struct SmoothingKernel {
    /// Samples η(−1), η(−1+resolution), …, η(1).
    pub table: Vec<f64>,
    /// Grid step of the table.
    pub resolution: f64,
}

/// Unnormalized bump profile exp(−1/(1−u²)) on (−1, 1).
fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// Composite Simpson over [a, b] with n subintervals (midpoint form).
fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        s += f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1);
    }
    s * h / 6.0
}

impl SmoothingKernel {
    /// Build the profile at the given table step (must be ≤ 10⁻³).
    pub fn build(resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution <= 1e-3) {
            return Err(Error::BadInput(format!(
                "kernel resolution {resolution} must be in (0, 1e-3]"
            )));
        }
        // κ(x) = (50/Z)·bump(50x), mass 1 on [−1/50, 1/50].
        let z = simpson(-1.0, 1.0, 4000, bump);
        let kappa = move |x: f64| 50.0 / z * bump(50.0 * x);

        // CDF of κ on a fine grid over its support, by cumulative Simpson.
        let lo = -0.02;
        let hi = 0.02;
        let n_cdf = 4000usize;
        let h = (hi - lo) / n_cdf as f64;
        let mut cdf = Vec::with_capacity(n_cdf + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 0..n_cdf {
            let x0 = lo + i as f64 * h;
            let x1 = x0 + h;
            acc += (kappa(x0) + 4.0 * kappa(0.5 * (x0 + x1)) + kappa(x1)) * h / 6.0;
            cdf.push(acc);
        }
        let k_of = move |t: f64| -> f64 {
            if t <= lo {
                return 0.0;
            }
            if t >= hi {
                return 1.0;
            }
            let r = (t - lo) / h;
            let i = (r as usize).min(n_cdf - 1);
            let frac = r - i as f64;
            cdf[i] + (cdf[i + 1] - cdf[i]) * frac
        };
        // h1 = 1_{[−1/2,1/2]} ∗ κ, evaluated through the CDF.
        let h1 = move |t: f64| k_of(t + 0.5) - k_of(t - 0.5);

        // η(t) = ∫ κ_{1/2}(b) · h1(t − b) db, Simpson over b ∈ [−0.01, 0.01].
        // Simpson weights for κ_{1/2}(b) precomputed once.
        let m = 400usize;
        let hb = 0.02 / m as f64;
        let mut wts: Vec<(f64, f64)> = Vec::with_capacity(2 * m + 1);
        for j in 0..=(2 * m) {
            let b = -0.01 + 0.5 * hb * j as f64;
            let simpson_w = if j == 0 || j == 2 * m {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            wts.push((b, simpson_w * hb / 6.0 * 2.0 * kappa(2.0 * b)));
        }

        let n_tab = (2.0 / resolution).round() as usize;
        let mut table = vec![0.0f64; n_tab + 1];
        for (i, slot) in table.iter_mut().enumerate() {
            let t = -1.0 + resolution * i as f64;
            *slot = if t.abs() <= 0.45 {
                1.0
            } else if t.abs() >= 0.55 {
                0.0
            } else {
                let mut v = 0.0;
                for &(b, w) in &wts {
                    v += w * h1(t - b);
                }
                v.clamp(0.0, 1.0)
            };
        }
        Ok(SmoothingKernel { table, resolution })
    }

    /// The shared default-resolution (10⁻⁴) profile.
    pub fn standard() -> &'static SmoothingKernel {
        static K: OnceLock<SmoothingKernel> = OnceLock::new();
        K.get_or_init(|| SmoothingKernel::build(1e-4).expect("valid fixed resolution"))
    }

    /// Evaluate η(x) by linear interpolation (0 outside [−1, 1]).
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        // Fast paths keep the plateau/support exact.
        if ax <= 0.45 {
            return 1.0;
        }
        if ax >= 0.55 {
            return 0.0;
        }
        let r = (x + 1.0) / self.resolution;
        let i = r as usize;
        let i = i.min(self.table.len() - 2);
        let frac = r - i as f64;
        self.table[i] + (self.table[i + 1] - self.table[i]) * frac
    }

    /// ∫η over [−1, 1] by the trapezoid rule on the table.
    pub fn integral(&self) -> f64 {
        let inner: f64 = self.table[1..self.table.len() - 1].iter().sum();
        (inner + 0.5 * (self.table[0] + self.table[self.table.len() - 1])) * self.resolution
    }
}
