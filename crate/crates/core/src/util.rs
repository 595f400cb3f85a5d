//! Small numeric helpers shared across modules.

/// Nearest integer to `r`, ties broken toward zero.
///
/// Used for cell assignment so that both endpoints of [−1, 1] land in the
/// cell centered at 0 when the cell radius is 1.
pub fn round_tz(r: f64) -> i64 {
    let m = (r.abs() - 0.5).ceil();
    let m = if m < 0.0 { 0.0 } else { m };
    if r < 0.0 {
        -m as i64
    } else {
        m as i64
    }
}

/// True iff `x` is an exact power of two (any sign of exponent).
pub fn is_pow2(x: f64) -> bool {
    if !(x > 0.0) || !x.is_finite() {
        return false;
    }
    // Normal powers of two have an all-zero mantissa field.
    x.to_bits() & ((1u64 << 52) - 1) == 0 && x >= f64::MIN_POSITIVE
}

/// Parse a dyadic scale literal: `2^-k`, `2^k`, or a plain decimal.
pub fn parse_dyadic(s: &str) -> Option<f64> {
    if let Some(rest) = s.strip_prefix("2^") {
        let k: i32 = rest.parse().ok()?;
        Some((k as f64).exp2())
    } else {
        s.parse().ok()
    }
}

/// Format a dyadic scale as a `2^-k` literal when possible.
pub fn format_dyadic(x: f64) -> String {
    if is_pow2(x) {
        format!("2^{}", x.log2() as i64)
    } else {
        format!("{x}")
    }
}

/// Deterministic pairwise (tree) summation; order-stable regardless of any
/// upstream chunking, so CSV output is bit-reproducible.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Segment tree over `n` slots supporting range add and global max with the
/// index of a slot achieving it.  Used for "max points stabbed by a window"
/// sweeps.
pub struct IntervalMaxTree {
    n: usize,
    max: Vec<i64>,
    arg: Vec<u32>,
    lazy: Vec<i64>,
}

impl IntervalMaxTree {
    pub fn new(n: usize) -> Self {
        let n = n.max(1);
        let mut arg = vec![0u32; 4 * n];
        // Initialize argmax leaves bottom-up so queries return valid slots.
        fn build(node: usize, lo: usize, hi: usize, arg: &mut [u32]) {
            if lo == hi {
                arg[node] = lo as u32;
                return;
            }
            let mid = (lo + hi) / 2;
            build(2 * node, lo, mid, arg);
            build(2 * node + 1, mid + 1, hi, arg);
            arg[node] = arg[2 * node];
        }
        build(1, 0, n - 1, &mut arg);
        IntervalMaxTree {
            n,
            max: vec![0; 4 * n],
            arg,
            lazy: vec![0; 4 * n],
        }
    }

    pub fn add(&mut self, l: usize, r: usize, delta: i64) {
        if l > r || l >= self.n {
            return;
        }
        let r = r.min(self.n - 1);
        self.add_rec(1, 0, self.n - 1, l, r, delta);
    }

    fn add_rec(&mut self, node: usize, lo: usize, hi: usize, l: usize, r: usize, delta: i64) {
        if r < lo || hi < l {
            return;
        }
        if l <= lo && hi <= r {
            self.max[node] += delta;
            self.lazy[node] += delta;
            return;
        }
        let mid = (lo + hi) / 2;
        self.add_rec(2 * node, lo, mid, l, r, delta);
        self.add_rec(2 * node + 1, mid + 1, hi, l, r, delta);
        let (a, b) = (self.max[2 * node], self.max[2 * node + 1]);
        if a >= b {
            self.max[node] = a + self.lazy[node];
            self.arg[node] = self.arg[2 * node];
        } else {
            self.max[node] = b + self.lazy[node];
            self.arg[node] = self.arg[2 * node + 1];
        }
    }

    /// Global maximum and a slot index attaining it.
    pub fn max(&self) -> (i64, usize) {
        (self.max[1], self.arg[1] as usize)
    }
}

/// Serde adapter for `HashMap<(u32, u32, u32), f64>`: JSON maps need string
/// keys, so the map is written as a sorted entry list (which also makes the
/// output deterministic).
pub mod tuple_key_map {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::HashMap;

    pub fn serialize<S: Serializer>(
        m: &HashMap<(u32, u32, u32), f64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let mut rows: Vec<((u32, u32, u32), f64)> = m.iter().map(|(k, v)| (*k, *v)).collect();
        rows.sort_by_key(|&(k, _)| k);
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<HashMap<(u32, u32, u32), f64>, D::Error> {
        let rows: Vec<((u32, u32, u32), f64)> = Vec::deserialize(d)?;
        Ok(rows.into_iter().collect())
    }
}
