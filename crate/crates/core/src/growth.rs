//! Laplacian growth of droplets for Gaussian, monomial and logarithmic potentials.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ConformalMap;

const NEWTON_DAMPING: f64 = 0.5;
const NEWTON_MAX_ITER: usize = 200;
const NEWTON_TOL: f64 = 1e-12;
/// Log-potential growth stops once a zero of `z'` is this close to `|w| = 1`.
pub const CUSP_TOL: f64 = 1e-3;

/// Relative overshoot of `n hbar` past `t_c` that is clamped to `t_c` instead of rejected.
pub const CRITICAL_SLACK: f64 = 1e-6;

/// Shape of the external potential `V(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    /// `V = t2 z^2`.
    Gaussian { t2: Complex64 },
    /// `V = tn z^n`.
    Monomial { n: usize, tn: Complex64 },
    /// `V = alpha log(beta / (beta - z))`.
    Log { alpha: f64, beta: Complex64 },
}

/// A potential together with the area quantum `hbar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    pub kind: PotentialKind,
    pub hbar: f64,
}

impl Potential {
    pub fn gaussian(t2: Complex64, hbar: f64) -> Result<Self> {
        if 2.0 * t2.norm() > 1.0 {
            return Err(Error::Domain(format!("Gaussian potential needs 2|t2| <= 1, got {}", 2.0 * t2.norm())));
        }
        Self::new(PotentialKind::Gaussian { t2 }, hbar)
    }

    pub fn monomial(n: usize, tn: Complex64, hbar: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("monomial degree must be at least 3, got {n}")));
        }
        Self::new(PotentialKind::Monomial { n, tn }, hbar)
    }

    pub fn log(alpha: f64, beta: Complex64, hbar: f64) -> Result<Self> {
        if !(alpha < 0.0) {
            return Err(Error::Domain(format!("log potential needs alpha < 0, got {alpha}")));
        }
        if beta.norm() == 0.0 {
            return Err(Error::Domain("log potential needs beta != 0".into()));
        }
        Self::new(PotentialKind::Log { alpha, beta }, hbar)
    }

    fn new(kind: PotentialKind, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Potential { kind, hbar })
    }

    /// Harmonic moments `t_1 ..= t_kmax` imposed by the potential.
    pub fn moments(&self, kmax: usize) -> Vec<Complex64> {
        (1..=kmax)
            .map(|k| match self.kind {
                PotentialKind::Gaussian { t2 } if k == 2 => t2,
                PotentialKind::Monomial { n, tn } if k == n => tn,
                PotentialKind::Log { alpha, beta } => alpha / (k as f64 * beta.powu(k as u32)),
                _ => Complex64::default(),
            })
            .collect()
    }

    /// Critical area when it is known in closed form.
    pub fn critical_area(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::Monomial { n, tn } if tn.norm() > 0.0 => Some(critical_area(n, tn).0),
            _ => None,
        }
    }
}

/// Maps at increasing areas.
#[derive(Debug, Clone)]
pub struct GrowthTrajectory {
    pub steps: Vec<(f64, ConformalMap)>,
    pub critical: bool,
    pub t_c: Option<f64>,
}

impl GrowthTrajectory {
    /// Largest deviation of `t_1 ..= t_kmax` from the first step.
    pub fn moment_drift(&self, kmax: usize) -> Result<f64> {
        let Some((_, first)) = self.steps.first() else {
            return Ok(0.0);
        };
        let reference = first.moments(kmax)?;
        let mut worst = 0.0f64;
        for (_, map) in &self.steps[1..] {
            let m = map.moments(kmax)?;
            for k in 1..=kmax {
                worst = worst.max((m.get(k) - reference.get(k)).norm());
            }
        }
        Ok(worst)
    }
}

/// The elliptic droplet of area `t0` for the Gaussian potential.
pub fn gaussian_ellipse_at(t2: Complex64, t0: f64) -> Result<ConformalMap> {
    let q = 4.0 * t2.norm_sqr();
    if q >= 1.0 {
        return Err(Error::Criticality(format!("2|t2| = {} >= 1", 2.0 * t2.norm())));
    }
    if !(t0 > 0.0) {
        return Err(Error::Domain(format!("area must be positive, got {t0}")));
    }
    let r = (t0 / (1.0 - q)).sqrt();
    ConformalMap::laurent(r, vec![Complex64::default(), 2.0 * t2.conj() * r])
}

/// `(t_c, r_c)` for `V = tn z^n`.
pub fn critical_area(n: usize, tn: Complex64) -> (f64, f64) {
    let nf = n as f64;
    let a = tn.norm();
    let r_c = ((nf - 1.0) * nf * a).powf(-1.0 / (nf - 2.0));
    let k = (nf - 1.0) * nf * nf * a * a;
    let t_c = r_c * r_c - k * r_c.powi(2 * n as i32 - 2);
    (t_c, r_c)
}

/// The droplet of area `t0` for `V = tn z^n` on the physical branch.
pub fn monomial_growth(n: usize, tn: Complex64, t0: f64) -> Result<ConformalMap> {
    if n < 3 {
        return Err(Error::Domain(format!("monomial degree must be at least 3, got {n}")));
    }
    if !(t0 >= 0.0) {
        return Err(Error::Domain(format!("area must be non-negative, got {t0}")));
    }
    if t0 == 0.0 {
        return Ok(ConformalMap::empty());
    }
    let s = monomial_r_sq(n, tn, t0)?;
    let r = s.sqrt();
    let mut u = vec![Complex64::default(); n];
    u[n - 1] = n as f64 * tn.conj() * r.powi(n as i32 - 1);
    ConformalMap::laurent(r, u)
}

/// Smallest positive root `s = r^2` of `s - (n-1) n^2 |tn|^2 s^(n-1) = t0`.
pub fn monomial_r_sq(n: usize, tn: Complex64, t0: f64) -> Result<f64> {
    let nf = n as f64;
    let k = (nf - 1.0) * nf * nf * tn.norm_sqr();
    if k == 0.0 {
        return Ok(t0);
    }
    let (t_c, r_c) = critical_area(n, tn);
    if t0 > t_c * (1.0 + 1e-14) {
        return Err(Error::Supercritical { t0, t_c });
    }
    let f = |s: f64| s - k * s.powi(n as i32 - 1) - t0;
    let (mut lo, mut hi) = (0.0, r_c * r_c);
    if f(hi) <= 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = 1.0 - k * (nf - 1.0) * s.powi(n as i32 - 2);
        if d <= 0.0 {
            break;
        }
        let next = s - f(s) / d;
        if next > lo && next < hi {
            s = next;
        }
    }
    Ok(s)
}

fn joukowski_map(x: [f64; 3]) -> Result<ConformalMap> {
    ConformalMap::rational(x[0], Complex64::new(x[1], 0.0), Complex64::new(x[2], 0.0))
}

fn joukowski_residual(x: [f64; 3], alpha: f64, beta: f64, t0: f64) -> Result<[f64; 3]> {
    let [r, u, a] = x;
    let map = joukowski_map(x)?;
    let nodes = quadrature_nodes(a);
    let t1 = map.moments_with_nodes(1, nodes)?.get(1);
    Ok([
        r / a + u / (a * (1.0 - a * a)) - beta,
        alpha + r * r - u * r / (a * a) - t0,
        t1.re - alpha / beta,
    ])
}

/// Enough nodes for the trapezoid rule to resolve the pole at `1/a`.
fn quadrature_nodes(a: f64) -> usize {
    let decay = -a.abs().ln();
    let need = if decay > 0.0 { (40.0 / decay).ceil() as usize } else { usize::MAX };
    need.clamp(crate::geometry::DEFAULT_NODES, 1 << 18).next_power_of_two()
}

fn max_abs(v: &[f64; 3]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn solve_3x3(j: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let m = nalgebra::Matrix3::from_fn(|r, c| j[r][c]);
    let rhs = nalgebra::Vector3::from_column_slice(&b);
    m.lu().solve(&rhs).map(|v| [v[0], v[1], v[2]])
}

fn joukowski_newton(alpha: f64, beta: f64, t0: f64, seed: [f64; 3]) -> Result<[f64; 3]> {
    let mut x = seed;
    let mut f = joukowski_residual(x, alpha, beta, t0)?;
    let mut norm = max_abs(&f);
    for _ in 0..NEWTON_MAX_ITER {
        if norm <= NEWTON_TOL {
            return Ok(x);
        }
        let mut jac = [[0.0; 3]; 3];
        for c in 0..3 {
            let h = 1e-7 * x[c].abs().max(1e-3);
            let mut xp = x;
            let mut xm = x;
            xp[c] += h;
            xm[c] -= h;
            let fp = joukowski_residual(xp, alpha, beta, t0)?;
            let fm = joukowski_residual(xm, alpha, beta, t0)?;
            for r in 0..3 {
                jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        let Some(dx) = solve_3x3(jac, f) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let trial = [x[0] - lambda * dx[0], x[1] - lambda * dx[1], x[2] - lambda * dx[2]];
            if let Ok(ft) = joukowski_residual(trial, alpha, beta, t0) {
                let nt = max_abs(&ft);
                if nt < norm {
                    x = trial;
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= NEWTON_DAMPING;
        }
        if !accepted {
            break;
        }
    }
    if norm <= NEWTON_TOL {
        return Ok(x);
    }
    Err(Error::NoConvergence { iterations: NEWTON_MAX_ITER, residual: norm, worst_site: 0, last_iterate: x.to_vec() })
}

/// Area at which continuation starts: the near-circular droplet centred at
/// `alpha / beta` must contain the origin for the contour moments to apply.
fn continuation_start(alpha: f64, beta: f64, t0: f64) -> f64 {
    let c = alpha / beta;
    t0.min((4.0 * c * c).max(1e-3))
}

fn small_droplet_seed(alpha: f64, beta: f64, t0: f64) -> [f64; 3] {
    let r = t0.sqrt();
    let a = r / beta;
    [r, alpha / beta * a, a]
}

/// Largest `|w|` among the zeros of `z'(w)` for a real rational map.
fn critical_radius(x: [f64; 3]) -> f64 {
    let [r, u, a] = x;
    // z'(w) = r - u / (w - a)^2
    let s = Complex64::new(u / r, 0.0).sqrt();
    let ca = Complex64::new(a, 0.0);
    (ca + s).norm().max((ca - s).norm())
}

/// Continues the log-potential droplet from `from` (with solution `x`) to `t0`.
fn joukowski_continue(alpha: f64, beta: f64, from: f64, x: [f64; 3], t0: f64) -> Result<[f64; 3]> {
    let steps = ((t0 - from).abs() / 0.05).ceil().max(1.0) as usize;
    let mut prev_t = from;
    let mut prev_x = x;
    for i in 1..=steps {
        let t = from + (t0 - from) * i as f64 / steps as f64;
        let next = joukowski_newton(alpha, beta, t, prev_x);
        let next = match next {
            Ok(x) if critical_radius(x) < 1.0 - CUSP_TOL => x,
            _ => {
                let t_c = joukowski_bisect_critical(alpha, beta, prev_t, prev_x, t)?;
                return Err(Error::Supercritical { t0, t_c });
            }
        };
        prev_t = t;
        prev_x = next;
    }
    Ok(prev_x)
}

fn joukowski_bisect_critical(alpha: f64, beta: f64, lo: f64, x_lo: [f64; 3], hi: f64) -> Result<f64> {
    let (mut lo, mut hi, mut x_lo) = (lo, hi, x_lo);
    for _ in 0..60 {
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match joukowski_newton(alpha, beta, mid, x_lo) {
            Ok(x) if critical_radius(x) < 1.0 - CUSP_TOL => {
                lo = mid;
                x_lo = x;
            }
            _ => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The rational droplet of area `t0` for `V = alpha log(beta / (beta - z))`,
/// real-symmetric case.
pub fn joukowski_growth(alpha: f64, beta: f64, t0: f64) -> Result<ConformalMap> {
    if !(alpha < 0.0) {
        return Err(Error::Domain(format!("alpha must be negative, got {alpha}")));
    }
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be finite and nonzero, got {beta}")));
    }
    if !(t0 > 0.0) {
        return Err(Error::Domain(format!("area must be positive, got {t0}")));
    }
    let start = continuation_start(alpha, beta, t0);
    let x = joukowski_newton(alpha, beta, start, small_droplet_seed(alpha, beta, start))?;
    let x = joukowski_continue(alpha, beta, start, x, t0)?;
    joukowski_map(x)
}

/// Grows the droplet in area increments of `hbar` up to `n_max hbar`.
pub fn grow_sequence(potential: &Potential, n_max: usize) -> Result<GrowthTrajectory> {
    let hbar = potential.hbar;
    let t_c = potential.critical_area();
    if let Some(t_c) = t_c {
        let top = n_max as f64 * hbar;
        if top > t_c * (1.0 + CRITICAL_SLACK) {
            return Err(Error::Supercritical { t0: top, t_c });
        }
    }
    let mut steps = Vec::with_capacity(n_max);
    let mut log_state: Option<(f64, [f64; 3])> = None;
    for j in 1..=n_max {
        let t0 = t_c.map_or(j as f64 * hbar, |t_c| (j as f64 * hbar).min(t_c));
        let map = match potential.kind {
            PotentialKind::Gaussian { t2 } => gaussian_ellipse_at(t2, t0)?,
            PotentialKind::Monomial { n, tn } => monomial_growth(n, tn, t0)?,
            PotentialKind::Log { alpha, beta } => {
                if beta.im != 0.0 {
                    return Err(Error::Domain("log growth is restricted to real beta".into()));
                }
                let beta = beta.re;
                let x = match log_state {
                    None => {
                        let start = continuation_start(alpha, beta, t0);
                        let x = joukowski_newton(alpha, beta, start, small_droplet_seed(alpha, beta, start))?;
                        joukowski_continue(alpha, beta, start, x, t0)?
                    }
                    Some((prev_t, prev_x)) => joukowski_continue(alpha, beta, prev_t, prev_x, t0)?,
                };
                log_state = Some((t0, x));
                joukowski_map(x)?
            }
        };
        steps.push((t0, map));
    }
    let critical = match t_c {
        Some(t_c) => n_max as f64 * hbar >= t_c * (1.0 - CRITICAL_SLACK),
        None => false,
    };
    Ok(GrowthTrajectory { steps, critical, t_c })
}
