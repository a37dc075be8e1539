//! Discrete string equations at finite `hbar`: the Gaussian two-term recurrence
//! and the cubic discrete Painlevé boundary-value problem.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::growth;
use crate::painleve::{self, Equation};

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-10;
/// Below this `nu` the asymptotic series is used for the boundary value.
const SERIES_NU: f64 = -15.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatticePotential {
    Gaussian { t2: Complex64 },
    Cubic { t3: Complex64 },
}

#[derive(Debug, Clone)]
pub struct LatticeState {
    pub hbar: f64,
    pub potential: LatticePotential,
    /// `r_n^2` for `n = 0..=N`.
    pub r_sq: Vec<f64>,
    /// `u_n` for `n = 0..=N`.
    pub u: Vec<Complex64>,
    /// String-equation residual per site (zero at the boundary sites).
    pub residual: Vec<f64>,
}

impl LatticeState {
    pub fn n_max(&self) -> usize {
        self.r_sq.len() - 1
    }

    pub fn max_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,t0,r_sq,residual\n");
        for (n, (&r, &res)) in self.r_sq.iter().zip(&self.residual).enumerate() {
            s.push_str(&format!("{},{},{},{}\n", n, n as f64 * self.hbar, r, res));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSample {
    pub nu: f64,
    pub u_of_nu: f64,
    pub n: usize,
}

/// Coefficients of `c_zzbar z zbar + c_z2 z^2 + c_zbar2 zbar^2 + c_const = 0`,
/// normalized so `c_zzbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveCoefficients {
    pub z_zbar: Complex64,
    pub z2: Complex64,
    pub zbar2: Complex64,
    pub constant: Complex64,
}

impl CurveCoefficients {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.z_zbar * z * zb + self.z2 * z * z + self.zbar2 * zb * zb + self.constant
    }
}

/// Closed-form solution of the Gaussian recurrence for `n = 0..=N`.
pub fn gaussian_recurrence(t2: Complex64, hbar: f64, n_max: usize) -> Result<LatticeState> {
    let q = 4.0 * t2.norm_sqr();
    if q >= 1.0 {
        return Err(Error::Criticality(format!("2|t2| = {} >= 1", 2.0 * t2.norm())));
    }
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    let r_sq: Vec<f64> = (0..=n_max).map(|n| n as f64 * hbar / (1.0 - q)).collect();
    let mut u = vec![Complex64::default(); n_max + 1];
    for n in 0..n_max {
        u[n + 1] = 2.0 * t2.conj() * r_sq[n].sqrt();
    }
    let residual = (0..=n_max)
        .map(|n| {
            let un1 = if n < n_max { u[n + 1] } else { 2.0 * t2.conj() * r_sq[n].sqrt() };
            r_sq[n] - un1.norm_sqr() - n as f64 * hbar
        })
        .collect();
    Ok(LatticeState { hbar, potential: LatticePotential::Gaussian { t2 }, r_sq, u, residual })
}

/// The ellipse `det[L_n(z) - zbar] = 0` from the reduced 2x2 Lax matrix.
pub fn gaussian_lax_curve(t2: Complex64, hbar: f64, n: usize) -> Result<CurveCoefficients> {
    if n == 0 {
        return Err(Error::Domain("the reduced Lax matrix needs n >= 1".into()));
    }
    let state = gaussian_recurrence(t2, hbar, n + 2)?;
    if t2.norm() == 0.0 {
        let one = Complex64::new(1.0, 0.0);
        return Ok(CurveCoefficients {
            z_zbar: one,
            z2: Complex64::default(),
            zbar2: Complex64::default(),
            constant: Complex64::new(-(n as f64) * hbar, 0.0),
        });
    }
    let r = |k: usize| state.r_sq[k].sqrt();
    let u = |k: usize| state.u[k];
    // r_{n-1} / u_n, with the n = 1 limit 1 / (2 conj(t2)) from u_n = 2 conj(t2) r_{n-1}.
    let ratio = if u(n).norm() > 0.0 { r(n - 1) / u(n) } else { 1.0 / (2.0 * t2.conj()) };
    // L_n(z) = [[a z, b], [c, d z]]
    let a = ratio;
    let b = u(n + 1).conj() - r(n) * ratio;
    let c = r(n) - u(n + 2).conj() * u(n + 1) / r(n + 1);
    let d = u(n + 2).conj() / r(n + 1);
    // det = a d z^2 - (a + d) z zbar + zbar^2 - b c
    let norm = -(a + d);
    Ok(CurveCoefficients {
        z_zbar: Complex64::new(1.0, 0.0),
        z2: a * d / norm,
        zbar2: Complex64::new(1.0, 0.0) / norm,
        constant: -b * c / norm,
    })
}

/// The closed-form ellipse coefficients for comparison.
pub fn ellipse_coefficients(t2: Complex64, t0: f64) -> CurveCoefficients {
    let q = 4.0 * t2.norm_sqr();
    CurveCoefficients {
        z_zbar: Complex64::new(1.0, 0.0),
        z2: -2.0 * t2 / (1.0 + q),
        zbar2: -2.0 * t2.conj() / (1.0 + q),
        constant: Complex64::new(-t0 * (1.0 - q) / (1.0 + q), 0.0),
    }
}

/// `r_c^2 = 1 / (36 |t3|^2)`; the cubic lattice is solved in units of `r_c^2`.
fn cubic_scale(t3: Complex64) -> f64 {
    1.0 / (36.0 * t3.norm_sqr())
}

/// `nu = (n hbar - 1/2) / hbar^(4/5)` in normalized units.
fn scaling_nu(n: usize, hbar: f64) -> f64 {
    (n as f64 * hbar - 0.5) / hbar.powf(0.8)
}

/// Largest site `n` with `nu(n) <= nu_target` for the cubic lattice.
pub fn cubic_site_at(t3: Complex64, hbar: f64, nu_target: f64) -> usize {
    let h = hbar / cubic_scale(t3);
    ((0.5 + nu_target * h.powf(0.8)) / h).floor().max(2.0) as usize
}

/// `u(nu)` of the pole-free Painlevé I solution.
pub fn pole_free_u(nu: f64) -> Result<f64> {
    if nu <= SERIES_NU {
        return Ok(Equation::PAPER.series(nu, None).0);
    }
    let sol = painleve::solve_pole_free(-20.0, nu.max(-1.0), 1e-12)
        .map_err(|e| Error::InvalidBoundary(format!("no pole-free Painlevé data at nu = {nu}: {e}")))?;
    sol.eval(nu)
        .map(|(u, _)| u)
        .ok_or_else(|| Error::InvalidBoundary(format!("no pole-free Painlevé data at nu = {nu}")))
}

/// Solves `r_n^2 [1 - 9|t3|^2 (r_{n-1}^2 + r_{n+1}^2)] = n hbar` for `n = 0..=N` with
/// `r_0^2 = 0` and `r_N^2` from the Painlevé scaling ansatz.
pub fn cubic_string_solve(t3: Complex64, hbar: f64, n_max: usize) -> Result<LatticeState> {
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    if n_max < 2 {
        return Err(Error::Domain(format!("need N >= 2, got {n_max}")));
    }
    if t3.norm() == 0.0 {
        let r_sq: Vec<f64> = (0..=n_max).map(|n| n as f64 * hbar).collect();
        return Ok(LatticeState {
            hbar,
            potential: LatticePotential::Cubic { t3 },
            r_sq,
            u: vec![Complex64::default(); n_max + 1],
            residual: vec![0.0; n_max + 1],
        });
    }
    let scale = cubic_scale(t3);
    let h = hbar / scale;
    let nu_n = scaling_nu(n_max, h);
    let limit = 5.0;
    if nu_n > limit {
        return Err(Error::Domain(format!("N hbar is past t_c + 5 hbar^(4/5) (nu(N) = {nu_n})")));
    }
    let boundary = 1.0 - h.powf(0.4) * pole_free_u(nu_n)?;

    let norm_t3 = Complex64::new(1.0 / 6.0, 0.0);
    let mut s: Vec<f64> = (0..=n_max)
        .map(|n| {
            let t0 = n as f64 * h;
            if t0 >= 0.5 {
                1.0
            } else {
                growth::monomial_r_sq(3, norm_t3, t0).unwrap_or(1.0)
            }
        })
        .collect();
    s[0] = 0.0;
    s[n_max] = boundary;

    let residuals = |s: &[f64]| -> Vec<f64> {
        (1..n_max).map(|n| s[n] * (1.0 - 0.25 * (s[n - 1] + s[n + 1])) - n as f64 * h).collect()
    };
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut f = residuals(&s);
    let mut norm = max_abs(&f);
    let mut iterations = 0;
    while norm * scale > NEWTON_TOL && iterations < NEWTON_MAX_ITER {
        iterations += 1;
        let m = n_max - 1;
        let mut diag = vec![0.0; m];
        let mut lower = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for i in 0..m {
            let n = i + 1;
            diag[i] = 1.0 - 0.25 * (s[n - 1] + s[n + 1]);
            lower[i] = -0.25 * s[n];
            upper[i] = -0.25 * s[n];
        }
        let Some(dx) = solve_tridiagonal(&lower, &diag, &upper, &f) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-4 {
            let mut trial = s.clone();
            for i in 0..m {
                trial[i + 1] -= lambda * dx[i];
            }
            let ft = residuals(&trial);
            let nt = max_abs(&ft);
            if nt < norm {
                s = trial;
                f = ft;
                norm = nt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm * scale > NEWTON_TOL {
        let worst = f
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map_or(0, |(i, _)| i + 1);
        return Err(Error::NoConvergence {
            iterations,
            residual: norm * scale,
            worst_site: worst,
            last_iterate: s.iter().map(|x| x * scale).collect(),
        });
    }

    let r_sq: Vec<f64> = s.iter().map(|x| x * scale).collect();
    let mut residual = vec![0.0; n_max + 1];
    for n in 1..n_max {
        residual[n] = f[n - 1] * scale;
    }
    let mut u = vec![Complex64::default(); n_max + 1];
    for n in 2..=n_max {
        u[n] = 3.0 * t3.conj() * (r_sq[n - 2] * r_sq[n - 1]).sqrt();
    }
    Ok(LatticeState { hbar, potential: LatticePotential::Cubic { t3 }, r_sq, u, residual })
}

/// Thomas algorithm; `lower[0]` and `upper[m-1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut denom = diag[0];
    if denom == 0.0 {
        return None;
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..m {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        c[i] = if i + 1 < m { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Scaling samples `(nu, (1 - r_n^2) / hbar^(2/5))` with `|nu| <= nu_window`, in
/// units where `t_c = 1/2`.
pub fn scaling_extract(state: &LatticeState, nu_window: f64) -> Result<Vec<ScalingSample>> {
    let LatticePotential::Cubic { t3 } = state.potential else {
        return Err(Error::Domain("scaling data needs a cubic lattice".into()));
    };
    if t3.norm() == 0.0 {
        return Err(Error::Domain("scaling data needs t3 != 0".into()));
    }
    let scale = cubic_scale(t3);
    let h = state.hbar / scale;
    Ok(state
        .r_sq
        .iter()
        .enumerate()
        .filter_map(|(n, &r)| {
            let nu = scaling_nu(n, h);
            (nu.abs() <= nu_window).then(|| ScalingSample { nu, u_of_nu: (1.0 - r / scale) / h.powf(0.4), n })
        })
        .collect())
}

pub fn scaling_csv(samples: &[ScalingSample]) -> String {
    let mut s = String::from("nu,u\n");
    for x in samples {
        s.push_str(&format!("{},{}\n", x.nu, x.u_of_nu));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gaussian_closed_form() {
        let s = gaussian_recurrence(c(0.0, 0.0), 0.1, 10).unwrap();
        for n in 0..=10 {
            assert!((s.r_sq[n] - 0.1 * n as f64).abs() < 1e-15);
            assert_eq!(s.u[n], c(0.0, 0.0));
        }
        let s = gaussian_recurrence(c(0.25, 0.0), 0.075, 10).unwrap();
        assert!((s.r_sq[10] - 1.0).abs() < 1e-14);
        assert!((s.u[11.min(10)] - 2.0 * 0.25 * s.r_sq[9].sqrt()).norm() < 1e-15);
        assert!(s.max_residual() < 1e-14);
        assert!(matches!(gaussian_recurrence(c(0.5, 0.0), 0.1, 5), Err(Error::Criticality(_))));
    }

    #[test]
    fn gaussian_exact_for_large_n() {
        let t2 = Complex64::from_polar(0.3, 0.7);
        let s = gaussian_recurrence(t2, 1e-6, 1_000_000).unwrap();
        let q = 4.0 * t2.norm_sqr();
        let n = 1_000_000;
        assert!((s.r_sq[n] * (1.0 - q) - n as f64 * 1e-6).abs() < 1e-12);
    }

    #[test]
    fn lax_curve_example() {
        let k = gaussian_lax_curve(c(0.2, 0.0), 0.1, 10).unwrap();
        assert!((k.z2 - c(-0.4 / 1.16, 0.0)).norm() < 1e-12);
        assert!((k.constant - c(-0.84 / 1.16, 0.0)).norm() < 1e-12);
        let circle = gaussian_lax_curve(c(0.0, 0.0), 0.1, 10).unwrap();
        assert!((circle.constant + 1.0).norm() < 1e-15);
    }

    #[test]
    fn lax_curve_matches_ellipse_grid() {
        for i in 0..20 {
            let mag = 0.45 * i as f64 / 19.0;
            let t2 = Complex64::from_polar(mag.max(1e-3), 0.37 * i as f64);
            let n = 1 + 3 * i;
            let hbar = 0.05 + 0.01 * i as f64;
            let k = gaussian_lax_curve(t2, hbar, n).unwrap();
            let e = ellipse_coefficients(t2, n as f64 * hbar);
            assert!((k.z2 - e.z2).norm() < 1e-12);
            assert!((k.zbar2 - e.zbar2).norm() < 1e-12);
            assert!((k.constant - e.constant).norm() < 1e-12);
        }
    }

    #[test]
    fn lax_curve_agrees_with_growth_boundary() {
        let t2 = Complex64::from_polar(0.3, 0.4);
        let k = gaussian_lax_curve(t2, 0.05, 20).unwrap();
        let map = crate::growth::gaussian_ellipse_at(t2, 1.0).unwrap();
        for z in map.trace_boundary(40).unwrap() {
            assert!(k.eval(z).norm() < 1e-9);
        }
    }

    #[test]
    fn cubic_decoupled() {
        let s = cubic_string_solve(c(0.0, 0.0), 0.01, 50).unwrap();
        for n in 0..=50 {
            assert_eq!(s.r_sq[n], n as f64 * 0.01);
        }
    }

    #[test]
    fn cubic_interior_matches_continuum() {
        let hbar = 1e-3;
        let s = cubic_string_solve(c(1.0 / 6.0, 0.0), hbar, 500).unwrap();
        assert!(s.max_residual() <= 1e-10);
        let cont = crate::growth::monomial_r_sq(3, c(1.0 / 6.0, 0.0), 0.25).unwrap();
        assert!((s.r_sq[250] - cont).abs() < 5.0 * hbar);
        let want = 1.0 - hbar.powf(0.4) * pole_free_u(0.0).unwrap();
        assert!((s.r_sq[500] - want).abs() < 1e-14);
    }

    #[test]
    fn cubic_general_t3_rescales() {
        let t3 = Complex64::from_polar(1.0 / 12.0, 0.9);
        // r_c = 2, t_c = 2: N hbar = t_c with hbar = 4e-3
        let s = cubic_string_solve(t3, 4e-3, 500).unwrap();
        assert!(s.max_residual() <= 1e-10);
        let t3n = t3.norm();
        for n in 1..500 {
            let lhs = s.r_sq[n] * (1.0 - 9.0 * t3n * t3n * (s.r_sq[n - 1] + s.r_sq[n + 1]));
            assert!((lhs - n as f64 * 4e-3).abs() < 1e-10);
        }
        // u_n = 3 conj(t3) r_{n-2} r_{n-1}
        let un = s.u[100];
        assert!((un - 3.0 * t3.conj() * (s.r_sq[98] * s.r_sq[99]).sqrt()).norm() < 1e-15);
        let samples = scaling_extract(&s, 10.0).unwrap();
        assert!(samples.iter().any(|x| x.nu.abs() < 1e-9 && x.n == 500));
    }

    #[test]
    fn scaling_definitions() {
        let hbar = 1e-3;
        let mut s = cubic_string_solve(c(1.0 / 6.0, 0.0), hbar, 500).unwrap();
        s.r_sq[500] = 1.0;
        let samples = scaling_extract(&s, 10.0).unwrap();
        let last = samples.last().unwrap();
        assert_eq!(last.n, 500);
        assert!(last.nu.abs() < 1e-12 && last.u_of_nu.abs() < 1e-15);
        assert!((scaling_nu(500, hbar) - 0.0).abs() < 1e-12);
        let n = (0.5 - hbar.powf(0.8)) / hbar;
        assert!((scaling_nu(0, hbar) + 0.5 / hbar.powf(0.8)).abs() < 1e-9);
        assert!(((n * hbar - 0.5) / hbar.powf(0.8) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_solver() {
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0, 0.0], &[5.0, 6.0, 5.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }
}
