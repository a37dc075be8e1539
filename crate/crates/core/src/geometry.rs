//! Droplet exteriors as conformal maps of the unit-disk exterior.
//!
//! A droplet boundary is the image of `|w| = 1` under either a Laurent map
//! `z(w) = r w + sum_k u_k w^{-k}` or the rational map
//! `z(w) = w [r + u / (a (w - a))]` with the pole `a` inside the unit disk.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::poly;

/// Boundary resolution used by moments and univalence checks unless overridden.
pub const DEFAULT_NODES: usize = 2048;
/// Sample count for the numerical univalence check.
pub const UNIVALENCE_SAMPLES: usize = 4096;

const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ConformalMap {
    /// `r w + sum_{k>=0} u[k] w^{-k}`.
    Laurent { r: f64, u: Vec<Complex64> },
    /// `w [r + u / (a (w - a))]`.
    Rational { r: f64, u: Complex64, a: Complex64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    /// Normalized area (area / pi).
    pub t0: f64,
    /// Exterior harmonic moments `t_1 ..= t_kmax`.
    pub t: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cusp {
    pub w: Complex64,
    pub z: Complex64,
}

impl MomentVector {
    /// `t_k` for `k >= 1`; zero beyond the stored range.
    pub fn get(&self, k: usize) -> Complex64 {
        if k == 0 {
            return Complex64::new(self.t0, 0.0);
        }
        self.t.get(k - 1).copied().unwrap_or_default()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "t0": self.t0,
            "t": self.t.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        })
    }
}

impl ConformalMap {
    pub fn laurent(r: f64, u: Vec<Complex64>) -> Result<Self> {
        let map = ConformalMap::Laurent { r, u };
        map.validate()?;
        Ok(map)
    }

    pub fn rational(r: f64, u: Complex64, a: Complex64) -> Result<Self> {
        let map = ConformalMap::Rational { r, u, a };
        map.validate()?;
        Ok(map)
    }

    /// The unit circle mapped to a circle of radius `r`.
    pub fn circle(r: f64) -> Result<Self> {
        Self::laurent(r, Vec::new())
    }

    /// Laurent map with a single nonzero coefficient `u_k`.
    pub fn single_mode(r: f64, k: usize, uk: Complex64) -> Result<Self> {
        let mut u = vec![Complex64::default(); k + 1];
        u[k] = uk;
        Self::laurent(r, u)
    }

    /// The degenerate map of an empty droplet (`r = 0`, no coefficients).
    pub fn empty() -> Self {
        ConformalMap::Laurent { r: 0.0, u: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            ConformalMap::Laurent { r, u } => *r == 0.0 && u.iter().all(|c| c.norm() == 0.0),
            ConformalMap::Rational { .. } => false,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ConformalMap::Laurent { r, u } => {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(Error::Domain(format!("leading coefficient r = {r} must be positive")));
                }
                if u.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Domain("non-finite Laurent coefficient".into()));
                }
            }
            ConformalMap::Rational { r, u, a } => {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(Error::Domain(format!("leading coefficient r = {r} must be positive")));
                }
                let m = a.norm();
                if !(m > 0.0 && m < 1.0) {
                    return Err(Error::Domain(format!("pole |a| = {m} must lie in (0, 1)")));
                }
                if !u.is_finite() {
                    return Err(Error::Domain("non-finite rational coefficient".into()));
                }
            }
        }
        Ok(())
    }

    pub fn r(&self) -> f64 {
        match self {
            ConformalMap::Laurent { r, .. } | ConformalMap::Rational { r, .. } => *r,
        }
    }

    /// `z(w)` for `|w| >= 1`.
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        if w.norm() < 1.0 - DOMAIN_SLACK {
            return Err(Error::Domain(format!("|w| = {} lies inside the unit disk", w.norm())));
        }
        Ok(self.eval_unchecked(w))
    }

    /// `z(w)` without the exterior-domain check.
    pub fn eval_unchecked(&self, w: Complex64) -> Complex64 {
        match self {
            ConformalMap::Laurent { r, u } => {
                let inv = w.inv();
                // Horner in 1/w for the tail.
                let mut tail = Complex64::default();
                for &c in u.iter().rev() {
                    tail = tail * inv + c;
                }
                *r * w + tail
            }
            ConformalMap::Rational { r, u, a } => w * (*r + u / (a * (w - a))),
        }
    }

    /// `dz/dw`.
    pub fn derivative(&self, w: Complex64) -> Complex64 {
        match self {
            ConformalMap::Laurent { r, u } => {
                let inv = w.inv();
                let mut acc = Complex64::new(*r, 0.0);
                let mut p = inv * inv;
                for (k, &c) in u.iter().enumerate().skip(1) {
                    acc -= k as f64 * c * p;
                    p *= inv;
                }
                acc
            }
            ConformalMap::Rational { r, u, a } => {
                let d = w - a;
                *r - u / (d * d)
            }
        }
    }

    /// The reflected conjugate `zbar(1/w) = conj(z(1/conj(w)))`, equal to
    /// `conj(z(w))` on the unit circle.
    pub fn reflected(&self, w: Complex64) -> Complex64 {
        self.eval_unchecked(w.conj().inv()).conj()
    }

    /// `d/dw zbar(1/w)`.
    pub fn reflected_derivative(&self, w: Complex64) -> Complex64 {
        -self.derivative(w.conj().inv()).conj() / (w * w)
    }

    /// Multiplies every coefficient that scales lengths by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            ConformalMap::Laurent { r, u } => ConformalMap::Laurent {
                r: r * s,
                u: u.iter().map(|c| c * s).collect(),
            },
            ConformalMap::Rational { r, u, a } => ConformalMap::Rational { r: r * s, u: u * s, a: *a },
        }
    }

    /// Boundary polyline `z(e^{2 pi i j / m})`, `j = 0..m`.
    pub fn trace_boundary(&self, m: usize) -> Result<Vec<Complex64>> {
        if m < 3 {
            return Err(Error::Domain(format!("boundary needs at least 3 points, got {m}")));
        }
        (0..m).map(|j| self.eval(unit_node(j, m))).collect()
    }

    /// Normalized area: closed form for Laurent maps, contour quadrature otherwise.
    pub fn area(&self) -> f64 {
        match self {
            ConformalMap::Laurent { r, u } => {
                r * r - u.iter().enumerate().map(|(k, c)| k as f64 * c.norm_sqr()).sum::<f64>()
            }
            ConformalMap::Rational { .. } => self.area_by_quadrature(DEFAULT_NODES),
        }
    }

    /// `t0 = (1 / 2 pi i) \oint zbar dz` with the trapezoid rule on `m` nodes.
    pub fn area_by_quadrature(&self, m: usize) -> f64 {
        let mut acc = Complex64::default();
        for j in 0..m {
            let w = unit_node(j, m);
            acc += self.reflected(w) * self.derivative(w) * w;
        }
        acc.re / m as f64
    }

    /// Exterior harmonic moments `t_1..t_kmax` and the normalized area.
    pub fn moments(&self, kmax: usize) -> Result<MomentVector> {
        self.moments_with_nodes(kmax, DEFAULT_NODES)
    }

    /// Same as [`moments`](Self::moments) with an explicit node count.
    ///
    /// `t_k = (1 / 2 pi i k) \oint zbar z^{-k} dz` over `|w| = 1`.
    pub fn moments_with_nodes(&self, kmax: usize, m: usize) -> Result<MomentVector> {
        let t0 = match self {
            ConformalMap::Laurent { .. } => self.area(),
            ConformalMap::Rational { .. } => self.area_by_quadrature(m),
        };
        if kmax == 0 {
            return Ok(MomentVector { t0, t: Vec::new() });
        }
        if self.is_empty() {
            return Ok(MomentVector { t0, t: vec![Complex64::default(); kmax] });
        }
        let scale = self.r().max(1e-300);
        let mut sums = vec![Complex64::default(); kmax];
        for j in 0..m {
            let w = unit_node(j, m);
            let z = self.eval_unchecked(w);
            if z.norm() <= 1e-12 * scale {
                return Err(Error::QuadratureDivergence { k: 1 });
            }
            let zinv = z.inv();
            let base = self.reflected(w) * self.derivative(w) * w;
            let mut p = zinv;
            for s in sums.iter_mut() {
                *s += base * p;
                p *= zinv;
            }
        }
        let t = sums
            .into_iter()
            .enumerate()
            .map(|(i, s)| s / ((i + 1) as f64 * m as f64))
            .collect();
        Ok(MomentVector { t0, t })
    }

    /// Boundary cusps: roots of `z'(w) = 0` within `tol` of the unit circle.
    pub fn find_cusps(&self, tol: f64) -> Vec<Cusp> {
        let numerator: Vec<Complex64> = match self {
            ConformalMap::Laurent { r, u } => {
                // w^{K+1} z'(w) = r w^{K+1} - sum_k k u_k w^{K-k}
                let kk = u.len().saturating_sub(1);
                let mut c = vec![Complex64::default(); kk + 2];
                c[kk + 1] = Complex64::new(*r, 0.0);
                for (k, &uk) in u.iter().enumerate().skip(1) {
                    c[kk - k] -= k as f64 * uk;
                }
                c
            }
            ConformalMap::Rational { r, u, a } => {
                // (w - a)^2 z'(w) = r w^2 - 2 r a w + r a^2 - u
                vec![*r * a * a - u, -2.0 * *r * a, Complex64::new(*r, 0.0)]
            }
        };
        let mut cusps: Vec<Cusp> = poly::roots(&numerator)
            .into_iter()
            .filter(|w| (w.norm() - 1.0).abs() <= tol)
            .map(|w| Cusp { w, z: self.eval_unchecked(w) })
            .collect();
        cusps.sort_by(|a, b| a.w.arg().partial_cmp(&b.w.arg()).unwrap_or(std::cmp::Ordering::Equal));
        cusps
    }

    /// Numerical univalence check on `m` boundary samples: no two samples
    /// closer than `1e-9 r` and no crossing between non-adjacent segments.
    pub fn is_univalent(&self, m: usize) -> bool {
        if self.is_empty() {
            return true;
        }
        let pts: Vec<Complex64> = (0..m).map(|j| self.eval_unchecked(unit_node(j, m))).collect();
        if pts.iter().any(|p| !p.is_finite()) {
            return false;
        }
        simple_closed_polyline(&pts, 1e-9 * self.r())
    }
}

/// `e^{2 pi i j / m}`.
pub fn unit_node(j: usize, m: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)
}

/// Poisson bracket `w [z_w zbar_t - z_t zbar_w]` of a one-parameter family
/// of maps, with central differences of step `delta` in `t0`.
pub fn poisson_bracket_check<F>(map_fn: F, t0: f64, w: Complex64, delta: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<ConformalMap>,
{
    let plus = map_fn(t0 + delta)?;
    let minus = map_fn(t0 - delta)?;
    let mid = map_fn(t0)?;
    mid.eval(w)?;
    let z_t = (plus.eval(w)? - minus.eval(w)?) / (2.0 * delta);
    let zbar_t = (plus.reflected(w) - minus.reflected(w)) / (2.0 * delta);
    let z_w = mid.derivative(w);
    let zbar_w = mid.reflected_derivative(w);
    Ok(w * (z_w * zbar_t - z_t * zbar_w))
}

/// Checks that a closed polyline has well-separated vertices and no
/// self-intersections. Uses a uniform bucket grid over segment bounding boxes.
fn simple_closed_polyline(pts: &[Complex64], min_sep: f64) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts {
        xmin = xmin.min(p.re);
        xmax = xmax.max(p.re);
        ymin = ymin.min(p.im);
        ymax = ymax.max(p.im);
    }
    let side = ((n as f64).sqrt().ceil() as usize).max(1);
    let cw = ((xmax - xmin) / side as f64).max(1e-300);
    let ch = ((ymax - ymin) / side as f64).max(1e-300);
    let cell = |x: f64, y: f64| {
        let i = (((x - xmin) / cw) as usize).min(side - 1);
        let j = (((y - ymin) / ch) as usize).min(side - 1);
        (i, j)
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); side * side];
    for s in 0..n {
        let (a, b) = (pts[s], pts[(s + 1) % n]);
        let (i0, j0) = cell(a.re.min(b.re), a.im.min(b.im));
        let (i1, j1) = cell(a.re.max(b.re), a.im.max(b.im));
        for i in i0..=i1 {
            for j in j0..=j1 {
                buckets[i * side + j].push(s);
            }
        }
    }
    for bucket in &buckets {
        for (ia, &s) in bucket.iter().enumerate() {
            for &t in &bucket[ia + 1..] {
                let adjacent = s.abs_diff(t) == 1 || s.abs_diff(t) == n - 1;
                if (pts[s] - pts[t]).norm() < min_sep {
                    return false;
                }
                if adjacent {
                    continue;
                }
                if segments_cross(pts[s], pts[(s + 1) % n], pts[t], pts[(t + 1) % n]) {
                    return false;
                }
            }
        }
    }
    true
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cubic_critical() -> ConformalMap {
        ConformalMap::single_mode(1.0, 2, c(0.5, 0.0)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = ConformalMap::circle(1.0).unwrap();
        assert_eq!(id.eval(c(0.0, 1.0)).unwrap(), c(0.0, 1.0));
        let m = cubic_critical();
        assert!((m.eval(c(1.0, 0.0)).unwrap() - c(1.5, 0.0)).norm() < 1e-15);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((m.eval(w).unwrap() - 1.5 * w).norm() < 1e-14);
    }

    #[test]
    fn eval_rejects_interior_points() {
        let m = ConformalMap::circle(1.0).unwrap();
        assert!(matches!(m.eval(c(0.5, 0.0)), Err(Error::Domain(_))));
        assert!(m.eval(c(1.0 - 1e-13, 0.0)).is_ok());
    }

    #[test]
    fn constructors_enforce_invariants() {
        assert!(ConformalMap::laurent(0.0, vec![]).is_err());
        assert!(ConformalMap::laurent(-1.0, vec![]).is_err());
        assert!(ConformalMap::rational(1.0, c(0.1, 0.0), c(1.0, 0.0)).is_err());
        assert!(ConformalMap::rational(1.0, c(0.1, 0.0), c(0.0, 0.0)).is_err());
        assert!(ConformalMap::rational(1.0, c(0.1, 0.0), c(0.5, 0.0)).is_ok());
    }

    #[test]
    fn trace_examples() {
        let circle = ConformalMap::circle(1.0).unwrap().trace_boundary(4).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (g, w) in circle.iter().zip(want) {
            assert!((g - w).norm() < 1e-15);
        }
        let ellipse = ConformalMap::single_mode(1.0, 1, c(0.3, 0.0)).unwrap().trace_boundary(4).unwrap();
        let want = [c(1.3, 0.0), c(0.0, 0.7), c(-1.3, 0.0), c(0.0, -0.7)];
        for (g, w) in ellipse.iter().zip(want) {
            assert!((g - w).norm() < 1e-15);
        }
    }

    #[test]
    fn cubic_critical_trace_hits_cusps() {
        let pts = cubic_critical().trace_boundary(3 * 64).unwrap();
        for k in 0..3 {
            let cusp = 1.5 * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
            assert!(pts.iter().any(|p| (p - cusp).norm() < 1e-14));
        }
    }

    #[test]
    fn circle_moments() {
        let mv = ConformalMap::circle(2.0).unwrap().moments(6).unwrap();
        assert_eq!(mv.t0, 4.0);
        assert!(mv.t.iter().all(|t| t.norm() < 1e-14));
    }

    #[test]
    fn cubic_critical_moments() {
        let mv = cubic_critical().moments(6).unwrap();
        assert!((mv.t0 - 0.5).abs() < 1e-15);
        for k in 1..=6 {
            let want = if k == 3 { 1.0 / 6.0 } else { 0.0 };
            assert!((mv.get(k) - c(want, 0.0)).norm() < 1e-10, "t_{k} = {}", mv.get(k));
        }
    }

    #[test]
    fn origin_on_boundary_diverges() {
        // z = w + 1/w passes through the origin at w = i.
        let m = ConformalMap::single_mode(1.0, 1, c(1.0, 0.0)).unwrap();
        assert!(matches!(m.moments(2), Err(Error::QuadratureDivergence { .. })));
        assert!(m.moments(0).is_ok());
    }

    #[test]
    fn rational_area_matches_formula() {
        // Residues at w = 0 and w = a give t0 = r^2 - |u|^2 / (1 - |a|^2)^2.
        let (r, u, a) = (0.7, c(-0.02, 0.01), c(0.35, -0.1));
        let m = ConformalMap::rational(r, u, a).unwrap();
        let want = r * r - u.norm_sqr() / (1.0 - a.norm_sqr()).powi(2);
        assert!((m.area() - want).abs() < 1e-13);
    }

    #[test]
    fn ellipse_has_no_cusps() {
        let m = ConformalMap::single_mode(1.0, 1, c(0.3, 0.0)).unwrap();
        assert!(m.find_cusps(1e-6).is_empty());
    }

    #[test]
    fn cubic_critical_cusps() {
        let cusps = cubic_critical().find_cusps(1e-8);
        assert_eq!(cusps.len(), 3);
        for cp in cusps {
            assert!((cp.w.powu(3) - 1.0).norm() < 1e-12);
            assert!((cp.z - 1.5 * cp.w).norm() < 1e-12);
        }
    }

    #[test]
    fn rational_cusp_roots() {
        // z' = r - u/(w-a)^2 vanishes at w = a +- sqrt(u/r).
        let (r, u, a) = (1.0, c(0.36, 0.0), c(0.4, 0.0));
        let m = ConformalMap::rational(r, u, a).unwrap();
        let cusps = m.find_cusps(1e-9);
        assert_eq!(cusps.len(), 1);
        assert!((cusps[0].w - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn circle_bracket_is_one() {
        let fam = |t: f64| ConformalMap::circle(t.sqrt());
        // 2 sqrt(t0) times the central difference of sqrt(t0): 1 + delta^2/8 + ...
        for delta in [1e-2, 1e-3, 1e-4] {
            let b = poisson_bracket_check(fam, 1.0, c(1.0, 0.0), delta).unwrap();
            assert!(b.im.abs() < 1e-15);
            assert!((b.re - 1.0).abs() <= delta * delta / 4.0);
        }
    }

    #[test]
    fn frozen_family_bracket_vanishes() {
        let frozen = |_t: f64| ConformalMap::single_mode(1.0, 1, c(0.2, 0.0));
        let b = poisson_bracket_check(frozen, 1.0, c(0.0, 1.0), 1e-3).unwrap();
        assert_eq!(b, c(0.0, 0.0));
    }

    #[test]
    fn univalence() {
        assert!(ConformalMap::single_mode(1.0, 1, c(0.3, 0.0)).unwrap().is_univalent(UNIVALENCE_SAMPLES));
        assert!(cubic_critical().is_univalent(UNIVALENCE_SAMPLES));
        // Past criticality the boundary folds over itself.
        assert!(!ConformalMap::single_mode(1.0, 2, c(0.8, 0.0)).unwrap().is_univalent(UNIVALENCE_SAMPLES));
    }

    #[test]
    fn moments_json_shape() {
        let v = cubic_critical().moments(3).unwrap().to_json();
        assert_eq!(v["t"].as_array().unwrap().len(), 3);
        assert!(v["t0"].is_number());
    }
}
