//! Exact arithmetic in F_{p²}, the affine Hermitian unital
//! P = {(a, b) : N(a) + N(b) = 1}, its tangent lines, and the Vinh
//! incidence inequality |I(P, L) − |P||L|/q| ≤ √(q·|P|·|L|) with q = p².
//!
//! F_{p²} is represented as F_p[x]/(x² − n) with n the least quadratic
//! non-residue mod p; elements are coefficient pairs (a₀, a₁) = a₀ + a₁x.
//! The Galois conjugate is ā = a^p (= a₀ − a₁x), and N(a) = a·ā = a^{p+1}
//! lands in F_p.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// An element of F_{p²}: coefficients (a₀, a₁) of a₀ + a₁x.
pub type El = (u64, u64);

/// The field context F_{p²} = F_p[x]/(x² − nonres).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Field {
    pub p: u64,
    /// Least quadratic non-residue mod p; x² = nonres in the quotient.
    pub nonres: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Build F_{p²} for an odd prime 3 ≤ p ≤ 97.
    pub fn build(p: u64) -> Result<Field> {
        if !is_prime(p) || !(3..=97).contains(&p) {
            return Err(Error::BadInput(format!(
                "p = {p} must be an odd prime in [3, 97]"
            )));
        }
        // Least non-residue by Euler's criterion.
        let nonres = (2..p)
            .find(|&n| pow_mod(n, (p - 1) / 2, p) == p - 1)
            .ok_or_else(|| Error::BadInput(format!("no non-residue mod {p}?")))?;
        Ok(Field { p, nonres })
    }

    pub fn q(&self) -> u64 {
        self.p * self.p
    }

    #[inline]
    pub fn add(&self, a: El, b: El) -> El {
        ((a.0 + b.0) % self.p, (a.1 + b.1) % self.p)
    }

    #[inline]
    pub fn sub(&self, a: El, b: El) -> El {
        ((a.0 + self.p - b.0) % self.p, (a.1 + self.p - b.1) % self.p)
    }

    #[inline]
    pub fn neg(&self, a: El) -> El {
        ((self.p - a.0) % self.p, (self.p - a.1) % self.p)
    }

    /// (a₀ + a₁x)(b₀ + b₁x) with x² = nonres.
    #[inline]
    pub fn mul(&self, a: El, b: El) -> El {
        let p = self.p;
        (
            (a.0 * b.0 + a.1 * b.1 % p * self.nonres) % p,
            (a.0 * b.1 + a.1 * b.0) % p,
        )
    }

    pub fn scalar(&self, c: u64) -> El {
        (c % self.p, 0)
    }

    pub fn zero(&self) -> El {
        (0, 0)
    }

    pub fn one(&self) -> El {
        (1, 0)
    }

    /// Frobenius a ↦ a^p: fixes F_p and sends x ↦ −x (x^p = n^{(p−1)/2}·x =
    /// −x for a non-residue n).
    #[inline]
    pub fn frobenius(&self, a: El) -> El {
        (a.0, (self.p - a.1) % self.p)
    }

    /// N(a) = a·ā = a₀² − n·a₁² ∈ F_p, returned as a residue.
    #[inline]
    pub fn norm(&self, a: El) -> u64 {
        let p = self.p;
        (a.0 * a.0 % p + p - a.1 * a.1 % p * self.nonres % p) % p
    }

    pub fn pow(&self, mut a: El, mut e: u64) -> El {
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// a⁻¹ = ā / N(a).
    pub fn inv(&self, a: El) -> Result<El> {
        let n = self.norm(a);
        if n == 0 {
            return Err(Error::BadInput("inverse of zero".into()));
        }
        let ninv = pow_mod(n, self.p - 2, self.p);
        let conj = self.frobenius(a);
        Ok((conj.0 * ninv % self.p, conj.1 * ninv % self.p))
    }

    /// All q elements in lexicographic coefficient order.
    pub fn elements(&self) -> Vec<El> {
        let p = self.p;
        (0..p).flat_map(|a0| (0..p).map(move |a1| (a0, a1))).collect()
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// A line in F_q² in duplicate-free normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Line {
    /// y = s·x + c.
    Slant { s: El, c: El },
    /// x = c.
    Vertical { c: El },
}

impl Line {
    /// Does (a, b) lie on the line?
    pub fn contains(&self, f: &Field, pt: (El, El)) -> bool {
        match *self {
            Line::Slant { s, c } => f.add(f.mul(s, pt.0), c) == pt.1,
            Line::Vertical { c } => pt.0 == c,
        }
    }

    /// The q points of the line.
    pub fn points(&self, f: &Field) -> Vec<(El, El)> {
        match *self {
            Line::Slant { s, c } => f
                .elements()
                .into_iter()
                .map(|x| (x, f.add(f.mul(s, x), c)))
                .collect(),
            Line::Vertical { c } => f.elements().into_iter().map(|y| (c, y)).collect(),
        }
    }
}

/// All q² + q lines of F_q², duplicate-free.
pub fn all_lines(f: &Field) -> Vec<Line> {
    let els = f.elements();
    let mut out = Vec::with_capacity((f.q() * f.q() + f.q()) as usize);
    for &s in &els {
        for &c in &els {
            out.push(Line::Slant { s, c });
        }
    }
    for &c in &els {
        out.push(Line::Vertical { c });
    }
    out
}

/// The affine Hermitian unital with its tangent lines.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitalConfig {
    pub p: u64,
    /// All (a, b) with N(a) + N(b) = 1; |points| = p³ − p.
    pub points: Vec<(El, El)>,
    /// ℓ_x = {(a + t·b̄, b − t·ā) : t ∈ F_q} in normal form, same order as
    /// `points`.
    pub tangents: Vec<Line>,
}

/// Enumerate the unital exhaustively and attach the tangent parametrization.
pub fn build_unital(f: &Field) -> UnitalConfig {
    let els = f.elements();
    let mut points = Vec::new();
    let mut tangents = Vec::new();
    for &a in &els {
        for &b in &els {
            if (f.norm(a) + f.norm(b)) % f.p != 1 {
                continue;
            }
            points.push((a, b));
            // Direction (b̄, −ā); vertical iff b̄ = 0.
            let bbar = f.frobenius(b);
            let abar = f.frobenius(a);
            let line = if bbar == f.zero() {
                Line::Vertical { c: a }
            } else {
                // slope s = (−ā)/b̄, intercept c = b − s·a.
                let s = f.mul(f.neg(abar), f.inv(bbar).expect("b̄ ≠ 0"));
                let c = f.sub(b, f.mul(s, a));
                Line::Slant { s, c }
            };
            tangents.push(line);
        }
    }
    UnitalConfig {
        p: f.p,
        points,
        tangents,
    }
}

/// Exhaustively check ℓ_x ∩ P = {x} for every x; returns the first
/// counterexample (point index, offending point) if any.
pub fn verify_tangency(f: &Field, cfg: &UnitalConfig) -> Option<(usize, (El, El))> {
    let set: HashSet<(El, El)> = cfg.points.iter().copied().collect();
    for (i, (x, line)) in cfg.points.iter().zip(&cfg.tangents).enumerate() {
        for pt in line.points(f) {
            if set.contains(&pt) && pt != *x {
                return Some((i, pt));
            }
        }
        if !line.contains(f, *x) {
            return Some((i, *x));
        }
    }
    None
}

/// Vinh inequality report for a point/line family.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VinhReport {
    pub incidences: u64,
    /// |P||L|/q.
    pub expected: f64,
    /// |I − |P||L|/q|.
    pub slack: f64,
    /// √(q·|P|·|L|).
    pub bound: f64,
    pub pass: bool,
}

/// Exact incidence count and the Vinh bound check.
pub fn vinh_check(f: &Field, points: &[(El, El)], lines: &[Line]) -> VinhReport {
    let set: HashSet<(El, El)> = points.iter().copied().collect();
    let mut incidences = 0u64;
    for line in lines {
        incidences += line.points(f).iter().filter(|pt| set.contains(pt)).count() as u64;
    }
    let q = f.q() as f64;
    let expected = points.len() as f64 * lines.len() as f64 / q;
    let slack = (incidences as f64 - expected).abs();
    let bound = (q * points.len() as f64 * lines.len() as f64).sqrt();
    VinhReport {
        incidences,
        expected,
        slack,
        bound,
        pass: slack <= bound + 1e-9,
    }
}

/// Deterministic random subsets of points and lines for Vinh sampling.
pub fn random_subsets(
    f: &Field,
    seed: u64,
    n_points: usize,
    n_lines: usize,
) -> (Vec<(El, El)>, Vec<Line>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let els = f.elements();
    let mut pts = HashSet::new();
    while pts.len() < n_points.min((f.q() * f.q()) as usize) {
        let a = els[rng.gen_range(0..els.len())];
        let b = els[rng.gen_range(0..els.len())];
        pts.insert((a, b));
    }
    let universe = all_lines(f);
    let mut lines = HashSet::new();
    while lines.len() < n_lines.min(universe.len()) {
        lines.insert(universe[rng.gen_range(0..universe.len())]);
    }
    let mut pts: Vec<_> = pts.into_iter().collect();
    pts.sort();
    let mut lines: Vec<_> = lines.into_iter().collect();
    lines.sort_by_key(|l| match *l {
        Line::Slant { s, c } => (0u8, s, c),
        Line::Vertical { c } => (1u8, c, (0, 0)),
    });
    (pts, lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_construction_and_axioms() {
        // p = 3: least non-residue is 2 ≡ −1, so x² + 1 is the modulus.
        let f = Field::build(3).unwrap();
        assert_eq!(f.nonres, 2);
        assert!(Field::build(4).is_err());
        assert!(Field::build(2).is_err());
        assert!(Field::build(101).is_err());

        // Frobenius is an involution fixing exactly F_p (all 9 elements).
        for a in f.elements() {
            assert_eq!(f.frobenius(f.frobenius(a)), a);
            assert_eq!(f.frobenius(a) == a, a.1 == 0);
            // ā = a^p.
            assert_eq!(f.frobenius(a), f.pow(a, 3));
            // N(a) = a^{p+1}.
            assert_eq!((f.norm(a), 0), f.pow(a, 4));
        }

        // Inverses exact for all nonzero elements at p ≤ 7.
        for p in [3u64, 5, 7] {
            let f = Field::build(p).unwrap();
            for a in f.elements() {
                if a == f.zero() {
                    assert!(f.inv(a).is_err());
                } else {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
            }
        }

        // Associativity/distributivity sampled over 10³ triples, p = 7.
        let f = Field::build(7).unwrap();
        let els = f.elements();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let a = els[rng.gen_range(0..els.len())];
            let b = els[rng.gen_range(0..els.len())];
            let c = els[rng.gen_range(0..els.len())];
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        }

        // Norm multiplicativity, 200 random pairs.
        for _ in 0..200 {
            let a = els[rng.gen_range(0..els.len())];
            let b = els[rng.gen_range(0..els.len())];
            assert_eq!(f.norm(f.mul(a, b)), f.norm(a) * f.norm(b) % f.p);
        }

        // N maps onto F_p (p = 3: norms of the 9 elements cover {0, 1, 2}).
        let f3 = Field::build(3).unwrap();
        let norms: HashSet<u64> = f3.elements().iter().map(|&a| f3.norm(a)).collect();
        assert_eq!(norms, HashSet::from([0, 1, 2]));
    }

    #[test]
    fn unital_sizes_and_tangency() {
        for p in [3u64, 5, 7] {
            let f = Field::build(p).unwrap();
            let cfg = build_unital(&f);
            assert_eq!(cfg.points.len() as u64, p * p * p - p, "p = {p}");
            // Every tangent passes through its own point (t = 0).
            for (x, line) in cfg.points.iter().zip(&cfg.tangents) {
                assert!(line.contains(&f, *x));
            }
            assert!(verify_tangency(&f, &cfg).is_none(), "p = {p}");
        }

        // Perturbed config: swap one point for a non-unital point → witness.
        let f = Field::build(3).unwrap();
        let mut cfg = build_unital(&f);
        let off = f
            .elements()
            .iter()
            .flat_map(|&a| f.elements().into_iter().map(move |b| (a, b)))
            .find(|&(a, b)| (f.norm(a) + f.norm(b)) % f.p != 1 && cfg.tangents[0].contains(&f, (a, b)))
            .unwrap();
        cfg.points[1] = off; // now ℓ_{x₀} may meet a foreign "point"
        assert!(verify_tangency(&f, &cfg).is_some());
    }

    #[test]
    fn vinh_inequality() {
        // Unital + tangents, p = 3: the exact frozen numbers.
        let f = Field::build(3).unwrap();
        let cfg = build_unital(&f);
        let rep = vinh_check(&f, &cfg.points, &cfg.tangents);
        assert_eq!(rep.incidences, 24);
        assert_eq!(rep.expected, 64.0);
        assert_eq!(rep.slack, 40.0);
        assert_eq!(rep.bound, 72.0);
        assert!(rep.pass);

        // All points vs all lines: every line holds exactly q points, so
        // I = q·|L| = |P||L|/q exactly → slack 0.
        let allp: Vec<(El, El)> = f
            .elements()
            .into_iter()
            .flat_map(|a| f.elements().into_iter().map(move |b| (a, b)))
            .collect();
        let alll = all_lines(&f);
        assert_eq!(alll.len() as u64, f.q() * f.q() + f.q());
        let rep = vinh_check(&f, &allp, &alll);
        assert_eq!(rep.incidences, f.q() * (f.q() * f.q() + f.q()));
        assert_eq!(rep.slack, 0.0);
        assert!(rep.pass);

        // Empty line set.
        let rep = vinh_check(&f, &cfg.points, &[]);
        assert_eq!((rep.incidences, rep.bound), (0, 0.0));
        assert!(rep.pass);

        // Random subsets.
        for p in [3u64, 5] {
            let f = Field::build(p).unwrap();
            for seed in 0..10 {
                let (pts, lines) = random_subsets(&f, seed, 20, 20);
                assert!(vinh_check(&f, &pts, &lines).pass, "p = {p}, seed {seed}");
            }
        }
    }

    #[test]
    fn unital_has_no_cross_incidences() {
        // Sharpness probe: tangents meet P only at their own point, so the
        // total incidence count is exactly |P| = p³ − p ≈ q^{3/2}.
        let f = Field::build(5).unwrap();
        let cfg = build_unital(&f);
        let rep = vinh_check(&f, &cfg.points, &cfg.tangents);
        assert_eq!(rep.incidences as usize, cfg.points.len());
    }
}
