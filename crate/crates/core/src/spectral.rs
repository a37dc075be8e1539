//! Scaled spectral curve, Lax pair and scaling wave function.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{dopri5, Tolerance};
use crate::painleve::PainleveSolution;
use crate::poly;

/// Threshold below which the Cardano quantity counts as zero and the closed-form
/// degenerate roots replace the companion-matrix ones.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Derivatives of `u` at one value of `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UJet {
    pub nu: f64,
    pub u: f64,
    pub u_dot: f64,
    pub u_ddot: f64,
    pub u_dddot: f64,
}

impl UJet {
    /// Jet closed by `u'' = 2u^2 + 4nu` and `u''' = 4 u u' + 4`.
    pub fn closed(nu: f64, u: f64, u_dot: f64) -> Self {
        UJet {
            nu,
            u,
            u_dot,
            u_ddot: 2.0 * u * u + 4.0 * nu,
            u_dddot: 4.0 * u * u_dot + 4.0,
        }
    }

    /// Jet of a solution of the paper-form equation. `u''` follows from the equation;
    /// `u'''` is the derivative of the integrator's local polynomial, so the closure
    /// defect measures the numerical solution.
    pub fn from_solution(sol: &PainleveSolution, nu: f64) -> Result<Self> {
        let [u, u_dot, _, u_dddot] = sol
            .derivatives(nu)
            .ok_or_else(|| Error::Domain(format!("nu = {nu} outside the solution range")))?;
        Ok(UJet { u_dddot, ..UJet::closed(nu, u, u_dot) })
    }

    /// Derivative-free jet on the classical branch `u = sqrt(-2 nu)`.
    pub fn degenerate(nu: f64) -> Self {
        UJet {
            nu,
            u: (-2.0 * nu).max(0.0).sqrt(),
            u_dot: 0.0,
            u_ddot: 0.0,
            u_dddot: 0.0,
        }
    }

    /// The critical point itself: every entry zero, `lambda^2 = (2 zeta/3)^3`.
    pub fn singular() -> Self {
        UJet { nu: 0.0, u: 0.0, u_dot: 0.0, u_ddot: 0.0, u_dddot: 0.0 }
    }

    /// Residual of the third-derivative closure, `u''' - 4 u u' - 4`.
    pub fn closure_defect(&self) -> f64 {
        self.u_dddot - 4.0 * self.u * self.u_dot - 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    OneReal,
    ThreeReal,
    Degenerate,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::OneReal => "ONE_REAL",
            Classification::ThreeReal => "THREE_REAL",
            Classification::Degenerate => "DEGENERATE",
        }
    }
}

/// Branch points of the curve at one `nu`.
#[derive(Debug, Clone, Serialize)]
pub struct CurveSample {
    pub nu: f64,
    pub p: f64,
    pub q: f64,
    /// Roots in `mu = 2 zeta / 3`, sorted by real part.
    pub roots: [Complex64; 3],
    pub zeta_roots: [Complex64; 3],
    pub cardano: f64,
    pub classification: Classification,
}

impl CurveSample {
    /// Largest deviation of the elementary symmetric functions of the roots from `(0, p, -q)`.
    pub fn bookkeeping_error(&self) -> f64 {
        let [a, b, c] = self.roots;
        let e1 = (a + b + c).norm();
        let e2 = (a * b + a * c + b * c - self.p).norm();
        let e3 = (a * b * c + self.q).norm();
        e1.max(e2).max(e3)
    }
}

/// `lambda^2` on the curve at complex `zeta`.
pub fn lambda_squared(zeta: Complex64, jet: &UJet) -> Complex64 {
    let mu = zeta * (2.0 / 3.0);
    let a = mu - jet.u / 3.0;
    let b = mu + 2.0 * jet.u / 3.0;
    a * a * b + mu * (jet.u_ddot / 6.0) + (jet.u_dot * jet.u_dot - 2.0 * jet.u * jet.u_ddot) / 36.0
}

/// `(q/2)^2 + (p/3)^3`.
pub fn cardano(p: f64, q: f64) -> f64 {
    (q / 2.0).powi(2) + (p / 3.0).powi(3)
}

pub fn classify_cardano(p: f64, q: f64) -> Classification {
    let d = cardano(p, q);
    if d.abs() <= DEGENERATE_TOL {
        Classification::Degenerate
    } else if d > 0.0 {
        Classification::OneReal
    } else {
        Classification::ThreeReal
    }
}

/// `(9 alpha^4 + (8 nu0)^3) / 6^6`, the Cardano quantity of the jet `u = 0, u' = alpha` at `nu0`.
pub fn zero_crossing_discriminant(nu0: f64, alpha: f64) -> f64 {
    (9.0 * alpha.powi(4) + (8.0 * nu0).powi(3)) / 6f64.powi(6)
}

/// Coefficients `(p, q)` of the depressed cubic in `mu`.
pub fn curve_pq(jet: &UJet) -> (f64, f64) {
    let p = 2.0 * jet.nu / 3.0;
    let q = (jet.u_dot / 6.0).powi(2) - (jet.u * jet.u + 6.0 * jet.nu) * jet.u / 27.0;
    (p, q)
}

pub fn branch_points(jet: &UJet) -> CurveSample {
    let (p, q) = curve_pq(jet);
    let classification = classify_cardano(p, q);
    let mut r = if classification == Classification::Degenerate {
        degenerate_roots(p, q)
    } else {
        let coeffs = [Complex64::new(q, 0.0), Complex64::new(p, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        poly::roots(&coeffs)
    };
    while r.len() < 3 {
        r.push(Complex64::new(0.0, 0.0));
    }
    r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let roots = [r[0], r[1], r[2]];
    let zeta_roots = roots.map(|m| m * 1.5);
    CurveSample {
        nu: jet.nu,
        p,
        q,
        roots,
        zeta_roots,
        cardano: cardano(p, q),
        classification,
    }
}

/// Closed-form roots when the Cardano quantity vanishes: simple `3q/p`, double `-3q/(2p)`.
fn degenerate_roots(p: f64, q: f64) -> Vec<Complex64> {
    if p.abs() < 1e-300 {
        return vec![Complex64::new(0.0, 0.0); 3];
    }
    let simple = Complex64::new(3.0 * q / p, 0.0);
    let double = Complex64::new(-1.5 * q / p, 0.0);
    vec![simple, double, double]
}

/// The Lax pair `(Lambda, Q)` at real `zeta`.
pub fn lax_matrices(zeta: f64, jet: &UJet) -> (Matrix2<f64>, Matrix2<f64>) {
    let u = jet.u;
    let lambda = Matrix2::new(
        jet.u_dot / 6.0,
        (2.0 * zeta - u) / 3.0,
        jet.u_ddot / 6.0 + 2.0 * (zeta + u) * (2.0 * zeta - u) / 9.0,
        -jet.u_dot / 6.0,
    );
    let q = Matrix2::new(0.0, 1.0, 2.0 * (zeta + u) / 3.0, 0.0);
    (lambda, q)
}

/// `nu`-derivative of `Lambda` at fixed `zeta`.
fn lambda_dot(zeta: f64, jet: &UJet) -> Matrix2<f64> {
    let (u, ud) = (jet.u, jet.u_dot);
    Matrix2::new(
        jet.u_ddot / 6.0,
        -ud / 3.0,
        jet.u_dddot / 6.0 + (2.0 * zeta * ud - 4.0 * u * ud) / 9.0,
        -jet.u_ddot / 6.0,
    )
}

/// Max-abs entry of `Lambda_nu - Q_zeta - [Q, Lambda]`.
pub fn compatibility_residual(jet: &UJet, zeta: f64) -> f64 {
    let (lambda, q) = lax_matrices(zeta, jet);
    let q_prime = Matrix2::new(0.0, 0.0, 2.0 / 3.0, 0.0);
    let m = lambda_dot(zeta, jet) - q_prime - (q * lambda - lambda * q);
    m.amax()
}

/// Integrates `Psi' = Lambda Psi` in `zeta` at fixed `nu`.
pub fn integrate_wavefunction<J>(jet_source: J, nu: f64, zeta_span: [f64; 2], psi0: [f64; 2]) -> Result<Vec<(f64, [f64; 2])>>
where
    J: Fn(f64) -> Result<UJet>,
{
    if !(zeta_span[0].is_finite() && zeta_span[1].is_finite()) {
        return Err(Error::Domain("zeta span must be finite".into()));
    }
    let jet = jet_source(nu)?;
    dopri5(
        |z, y| {
            let (l, _) = lax_matrices(z, &jet);
            mat_vec(&l, y)
        },
        zeta_span[0],
        psi0,
        zeta_span[1],
        Tolerance::default(),
    )
}

/// Integrates `Psi_nu = Q Psi` in `nu` at fixed `zeta`.
pub fn integrate_nu_flow<J>(jet_source: J, zeta: f64, nu_span: [f64; 2], psi0: [f64; 2]) -> Result<Vec<(f64, [f64; 2])>>
where
    J: Fn(f64) -> Result<UJet>,
{
    let mut failure = None;
    let path = dopri5(
        |nu, y| match jet_source(nu) {
            Ok(jet) => mat_vec(&lax_matrices(zeta, &jet).1, y),
            Err(e) => {
                failure.get_or_insert(e);
                [f64::NAN; 2]
            }
        },
        nu_span[0],
        psi0,
        nu_span[1],
        Tolerance::default(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    path
}

/// Transports `psi0` around the rectangle with corner `(zeta, nu)` and the given side,
/// alternating the `zeta`- and `nu`-flows. Returns `|Psi_end - psi0| / |psi0|`.
pub fn rectangle_transport<J>(jet_source: J, zeta: f64, nu: f64, side: f64, psi0: [f64; 2]) -> Result<f64>
where
    J: Fn(f64) -> Result<UJet>,
{
    let last = |p: Vec<(f64, [f64; 2])>| p.last().map(|x| x.1).unwrap_or([f64::NAN; 2]);
    let psi = last(integrate_wavefunction(&jet_source, nu, [zeta, zeta + side], psi0)?);
    let psi = last(integrate_nu_flow(&jet_source, zeta + side, [nu, nu + side], psi)?);
    let psi = last(integrate_wavefunction(&jet_source, nu + side, [zeta + side, zeta], psi)?);
    let psi = last(integrate_nu_flow(&jet_source, zeta, [nu + side, nu], psi)?);
    let d = ((psi[0] - psi0[0]).powi(2) + (psi[1] - psi0[1]).powi(2)).sqrt();
    Ok(d / (psi0[0].powi(2) + psi0[1].powi(2)).sqrt())
}

fn mat_vec(m: &Matrix2<f64>, y: &[f64; 2]) -> [f64; 2] {
    [m[(0, 0)] * y[0] + m[(0, 1)] * y[1], m[(1, 0)] * y[0] + m[(1, 1)] * y[1]]
}

/// Branch points of the full, derivative-free and singular curves on a grid.
/// The singular curve does not depend on `nu`; its rows only carry the grid label.
pub fn three_curves(sol: &PainleveSolution, grid: &[f64]) -> Result<[Vec<CurveSample>; 3]> {
    let full = grid
        .iter()
        .map(|&nu| UJet::from_solution(sol, nu).map(|j| branch_points(&j)))
        .collect::<Result<Vec<_>>>()?;
    let degenerate = grid.iter().map(|&nu| branch_points(&UJet::degenerate(nu))).collect();
    let cusp = branch_points(&UJet::singular());
    let singular = grid.iter().map(|&nu| CurveSample { nu, ..cusp.clone() }).collect();
    Ok([full, degenerate, singular])
}

pub fn curve_csv(samples: &[CurveSample]) -> String {
    let mut s = String::from("nu,re_zeta1,im_zeta1,re_zeta2,im_zeta2,re_zeta3,im_zeta3,cardano,class\n");
    for c in samples {
        let z = &c.zeta_roots;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.nu,
            z[0].re,
            z[0].im,
            z[1].re,
            z[1].im,
            z[2].re,
            z[2].im,
            c.cardano,
            c.classification.as_str()
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::painleve::solve_pole_free;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn degenerate_jet_lambda_vanishes_at_roots() {
        let jet = UJet { nu: -2.0, u: 2.0, u_dot: 0.0, u_ddot: 0.0, u_dddot: 0.0 };
        assert!(lambda_squared(c(-2.0), &jet).norm() < 1e-14);
        assert!(lambda_squared(c(1.0), &jet).norm() < 1e-14);
    }

    #[test]
    fn zero_u_jet() {
        let jet = UJet { nu: -1.0, u: 0.0, u_dot: 1.7, u_ddot: -4.0, u_dddot: 4.0 };
        assert!((lambda_squared(c(0.0), &jet).re - 1.7f64.powi(2) / 36.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_branch_points() {
        let s = branch_points(&UJet::degenerate(-2.0));
        let want = [-2.0, 1.0, 1.0];
        for (z, w) in s.zeta_roots.iter().zip(want) {
            assert!((z - c(w)).norm() < 1e-10, "{:?}", s.zeta_roots);
        }
        assert_eq!(s.classification, Classification::Degenerate);
    }

    #[test]
    fn degenerate_limit_at_several_nu() {
        for nu in [-0.5, -1.0, -3.0, -7.5, -20.0] {
            let jet = UJet::degenerate(nu);
            let s = branch_points(&jet);
            let u = jet.u;
            let want = [-u, u / 2.0, u / 2.0];
            for (z, w) in s.zeta_roots.iter().zip(want) {
                assert!((z - c(w)).norm() < 1e-10, "nu={nu}: {:?}", s.zeta_roots);
            }
        }
    }

    #[test]
    fn cardano_examples() {
        assert_eq!(classify_cardano(-3.0, 2.0), Classification::Degenerate);
        assert_eq!(classify_cardano(0.0, 2.0), Classification::OneReal);
        assert_eq!(classify_cardano(-3.0, 0.0), Classification::ThreeReal);
    }

    #[test]
    fn zero_crossing_identity() {
        for (nu0, alpha) in [(-2.6, -3.96), (-1.0, 0.4), (-0.3, 2.0)] {
            let jet = UJet::closed(nu0, 0.0, alpha);
            let (p, q) = curve_pq(&jet);
            assert!((p - 2.0 * nu0 / 3.0).abs() < 1e-15);
            assert!((q - alpha * alpha / 36.0).abs() < 1e-15);
            assert!((cardano(p, q) - zero_crossing_discriminant(nu0, alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn lax_traces_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let jet = UJet {
                nu: rng.random_range(-5.0..1.0),
                u: rng.random_range(-3.0..3.0),
                u_dot: rng.random_range(-3.0..3.0),
                u_ddot: rng.random_range(-3.0..3.0),
                u_dddot: rng.random_range(-3.0..3.0),
            };
            let zeta = rng.random_range(-3.0..3.0);
            let (l, q) = lax_matrices(zeta, &jet);
            assert_eq!(l.trace(), 0.0);
            assert_eq!(q.trace(), 0.0);
            let det = l[(0, 1)] * l[(1, 0)] + l[(0, 0)].powi(2);
            let ls = lambda_squared(c(zeta), &jet);
            assert!((det - ls.re).abs() < 1e-12 * (1.0 + det.abs()), "{det} vs {ls}");
        }
        let jet = UJet::closed(-1.0, 0.7, 0.2);
        assert_eq!(lax_matrices(-0.7, &jet).1[(1, 0)], 0.0);
    }

    #[test]
    fn compatibility_matches_ode_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let jet = UJet::closed(rng.random_range(-10.0..1.0), rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            assert!(compatibility_residual(&jet, rng.random_range(-3.0..3.0)) < 1e-12);
        }
        let nu = -3.3;
        let jet = UJet { nu, u: 1.0, u_dot: 1.0, u_ddot: 6.0 + 4.0 * nu, u_dddot: 4.0 };
        assert!((compatibility_residual(&jet, 0.4) - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn pole_free_jets() {
        let sol = solve_pole_free(-20.0, 0.5, 1e-10).unwrap();
        let mut nu = -15.0;
        while nu <= -1.0 {
            let jet = UJet::from_solution(&sol, nu).unwrap();
            assert!(compatibility_residual(&jet, 0.3) <= 1e-8);
            nu += 0.25;
        }
        let source = |nu: f64| UJet::from_solution(&sol, nu);
        let dev = rectangle_transport(source, 0.0, -5.0, 0.1, [1.0, 0.5]).unwrap();
        assert!(dev <= 1e-6, "{dev}");

        let s = branch_points(&UJet::from_solution(&sol, -20.0 + 1e-9).unwrap());
        assert_eq!(s.classification, Classification::OneReal);
        assert!(s.bookkeeping_error() < 1e-9);
    }

    #[test]
    fn nu_flow_second_component_is_derivative() {
        let jet = |nu: f64| Ok(UJet::degenerate(nu));
        let path = integrate_nu_flow(jet, 0.3, [-3.0, -2.0], [1.0, 0.0]).unwrap();
        let h = 1e-4;
        let at = |nu: f64| integrate_nu_flow(jet, 0.3, [-3.0, nu], [1.0, 0.0]).unwrap().last().unwrap().1;
        let mid = -2.5;
        let d = (at(mid + h)[0] - at(mid - h)[0]) / (2.0 * h);
        assert!((d - at(mid)[1]).abs() < 1e-7, "{d} vs {:?}", at(mid));
        assert_eq!(path.last().unwrap().0, -2.0);
    }

    #[test]
    fn dominant_growth() {
        let jet = |nu: f64| Ok(UJet::closed(nu, 1.0, 0.0));
        let path = integrate_wavefunction(jet, -1.0, [10.0, 14.0], [1.0, 1.0]).unwrap();
        let norm = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
        assert!(norm(path.last().unwrap().1) > norm(path[0].1));
    }

    #[test]
    fn csv_header() {
        let s = curve_csv(&[branch_points(&UJet::degenerate(-1.0))]);
        assert!(s.starts_with("nu,re_zeta1,im_zeta1,re_zeta2,im_zeta2,re_zeta3,im_zeta3,cardano,class\n"));
        assert!(s.trim_end().ends_with("DEGENERATE"));
    }
}
