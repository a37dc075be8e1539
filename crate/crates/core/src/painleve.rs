//! Painlevé I, `u'' = 2u^2 + 4 nu`, and its pole-free solution on the negative axis.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `(3/8)^(1/5)`.
pub fn c1() -> f64 {
    (3.0f64 / 8.0).powf(0.2)
}

/// `4 c1^3`.
pub fn c2() -> f64 {
    4.0 * c1().powi(3)
}

/// Paper's printed first zero `-2^(7/5)`.
pub fn paper_nu0() -> f64 {
    -(2.0f64.powf(1.4))
}

/// Paper's printed slope `-3 2^(2/5)`.
pub fn paper_alpha() -> f64 {
    -3.0 * 2.0f64.powf(0.4)
}

/// `u'' - 2u^2 - 4 nu`.
pub fn pi_residual(u: f64, u_ddot: f64, nu: f64) -> f64 {
    u_ddot - 2.0 * u * u - 4.0 * nu
}

/// Maps `(u, nu)` to the standard form `U'' = 3U^2 + X`.
pub fn to_standard(u: f64, nu: f64) -> (f64, f64) {
    (u / c2(), nu / c1())
}

/// Inverse of [`to_standard`].
pub fn from_standard(u: f64, x: f64) -> (f64, f64) {
    (u * c2(), x * c1())
}

const SERIES_TERMS: usize = 160;
const TAYLOR_ORDER: usize = 30;
const STEP_TOL: f64 = 1e-15;
const MAX_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-12;
const POLE_THRESHOLD: f64 = 1e6;
const DEPARTURE: f64 = 1e-9;
const AGREEMENT: f64 = 1e-13;
const PAPER_NU_MATCH: f64 = -7.0;
const GRID_SPACING: f64 = 1e-3;

/// `u'' = a u^2 + b nu` with `a, b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equation {
    pub a: f64,
    pub b: f64,
}

impl Equation {
    pub const PAPER: Equation = Equation { a: 2.0, b: 4.0 };
    pub const STANDARD: Equation = Equation { a: 3.0, b: 1.0 };

    pub fn rhs(&self, nu: f64, u: f64) -> f64 {
        self.a * u * u + self.b * nu
    }

    /// Length scale relative to the paper normalization.
    fn scale(&self) -> f64 {
        (8.0 / (self.a * self.b)).powf(0.2)
    }

    fn nu_match(&self) -> f64 {
        PAPER_NU_MATCH * self.scale()
    }

    /// Coefficients `a_j` of `u = s x^(1/2) sum a_j x^(-5j/2)`, `x = -nu`, `s = sqrt(b/a)`.
    fn series_coefficients(&self) -> Vec<f64> {
        let s = (self.b / self.a).sqrt();
        let mut c = vec![1.0];
        for m in 1..SERIES_TERMS {
            let j = (m - 1) as f64;
            let p = 0.5 - 2.5 * j;
            let mut t = s / self.b * c[m - 1] * p * (p - 1.0);
            for i in 1..m {
                t -= c[i] * c[m - i];
            }
            c.push(0.5 * t);
        }
        c
    }

    /// Asymptotic series at `nu < 0`: `(u, u_dot, last_term)`.
    ///
    /// `order` corrections beyond the leading term; `None` truncates at the
    /// smallest term.
    pub fn series(&self, nu: f64, order: Option<usize>) -> (f64, f64, f64) {
        let coeffs = self.series_coefficients();
        let x = -nu;
        let s = (self.b / self.a).sqrt();
        let q = x.powf(-2.5);
        let mut sum = 0.0;
        let mut dsum = 0.0;
        let mut power = 1.0;
        let mut last = f64::INFINITY;
        let n = order.map_or(coeffs.len(), |o| (o + 1).min(coeffs.len()));
        for (j, &cj) in coeffs.iter().enumerate().take(n) {
            let term = cj * power;
            if order.is_none() && j > 0 && term.abs() >= last {
                break;
            }
            sum += term;
            dsum += -2.5 * j as f64 * term / x;
            last = term.abs();
            power *= q;
        }
        let sx = x.sqrt();
        let u = s * sx * sum;
        let dudx = s * (sum / (2.0 * sx) + sx * dsum);
        (u, -dudx, last * s * sx)
    }
}

/// Leading asymptotics `sqrt(-2 nu) - 1/(16 nu^2) + ...` of the paper's equation.
pub fn asymptotic_u(nu: f64, order: usize) -> Result<(f64, f64)> {
    if !(nu <= -5.0) {
        return Err(Error::Domain(format!("asymptotic series needs nu <= -5, got {nu}")));
    }
    let (u, ud, _) = Equation::PAPER.series(nu, Some(order));
    Ok((u, ud))
}

/// One Taylor step: the polynomial `sum c[k] (nu - nu0)^k` valid on `[nu0, nu0 + h]`.
#[derive(Debug, Clone)]
pub struct TaylorStep {
    pub nu0: f64,
    pub h: f64,
    pub coeffs: Vec<f64>,
}

impl TaylorStep {
    fn new(eq: &Equation, nu0: f64, u: f64, ud: f64) -> Self {
        let mut c = Vec::with_capacity(TAYLOR_ORDER + 1);
        c.push(u);
        c.push(ud);
        for k in 0..TAYLOR_ORDER - 1 {
            let conv: f64 = (0..=k).map(|i| c[i] * c[k - i]).sum();
            let forcing = match k {
                0 => eq.b * nu0,
                1 => eq.b,
                _ => 0.0,
            };
            c.push((eq.a * conv + forcing) / ((k + 2) * (k + 1)) as f64);
        }
        TaylorStep { nu0, h: 0.0, coeffs: c }
    }

    /// Step length keeping the two highest terms below the tolerance.
    fn safe_step(&self) -> f64 {
        let scale = self.coeffs[0].abs().max(1.0) * STEP_TOL;
        let n = self.coeffs.len() - 1;
        let mut h = MAX_STEP;
        for k in [n - 1, n] {
            let ck = self.coeffs[k].abs();
            if ck > 0.0 {
                h = h.min(0.9 * (scale / ck).powf(1.0 / k as f64));
            }
        }
        h
    }

    pub fn eval(&self, nu: f64) -> (f64, f64) {
        let d = nu - self.nu0;
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * d + p;
            p = p * d + c;
        }
        (p, dp)
    }

    /// `[u, u', u'', u''']` of the step polynomial.
    pub fn derivatives(&self, nu: f64) -> [f64; 4] {
        let d = nu - self.nu0;
        let mut out = [0.0; 4];
        for (order, slot) in out.iter_mut().enumerate() {
            let mut p = 0.0;
            for k in (order..self.coeffs.len()).rev() {
                let falling: f64 = (0..order).map(|i| (k - i) as f64).product();
                p = p * d + self.coeffs[k] * falling;
            }
            *slot = p;
        }
        out
    }

    fn end(&self) -> f64 {
        self.nu0 + self.h
    }

    fn contains(&self, nu: f64) -> bool {
        let (lo, hi) = if self.h >= 0.0 { (self.nu0, self.end()) } else { (self.end(), self.nu0) };
        let slack = 1e-12 * nu.abs().max(1.0);
        nu >= lo - slack && nu <= hi + slack
    }
}

/// A piecewise Taylor trajectory.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub steps: Vec<TaylorStep>,
}

impl Trajectory {
    pub fn start(&self) -> f64 {
        self.steps.first().map_or(f64::NAN, |s| s.nu0)
    }

    pub fn end(&self) -> f64 {
        self.steps.last().map_or(f64::NAN, |s| s.end())
    }

    fn step_at(&self, nu: f64) -> Option<&TaylorStep> {
        let i = self.steps.partition_point(|s| s.nu0.min(s.end()) <= nu);
        let lo = i.saturating_sub(2);
        let hi = (i + 1).min(self.steps.len());
        self.steps[lo..hi].iter().find(|s| s.contains(nu))
    }

    /// Dense output `(u, u_dot)`.
    pub fn eval(&self, nu: f64) -> Option<(f64, f64)> {
        self.step_at(nu).map(|s| s.eval(nu))
    }

    /// `[u, u', u'', u''']` from the local Taylor polynomial.
    pub fn derivatives(&self, nu: f64) -> Option<[f64; 4]> {
        self.step_at(nu).map(|s| s.derivatives(nu))
    }
}

enum Stop {
    Reached,
    Pole(f64),
    Event(i32),
}

/// Integrates from `(nu, u, ud)` to `target`; `event` is polled at each step end.
fn integrate<F>(eq: &Equation, nu: f64, u: f64, ud: f64, target: f64, mut event: F) -> Result<(Trajectory, Stop)>
where
    F: FnMut(f64, f64) -> Option<i32>,
{
    let dir = if target >= nu { 1.0 } else { -1.0 };
    let mut traj = Trajectory::default();
    let (mut nu, mut u, mut ud) = (nu, u, ud);
    while dir * (target - nu) > 0.0 {
        let mut step = TaylorStep::new(eq, nu, u, ud);
        let mut h = step.safe_step();
        if h < MIN_STEP {
            return Err(Error::IntegrationFailure { at: nu, reason: format!("step underflow (h = {h:e})") });
        }
        let remaining = dir * (target - nu);
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        step.h = dir * h;
        let next = if last { target } else { nu + dir * h };
        let (nu_, ud_) = step.eval(next);
        traj.steps.push(step);
        nu = next;
        u = nu_;
        ud = ud_;
        if !u.is_finite() || u.abs() > POLE_THRESHOLD {
            return Ok((traj, Stop::Pole(nu)));
        }
        if let Some(side) = event(nu, u) {
            return Ok((traj, Stop::Event(side)));
        }
    }
    Ok((traj, Stop::Reached))
}

/// The computed solution on a uniform grid.
#[derive(Debug, Clone)]
pub struct PainleveSolution {
    pub equation: Equation,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub u_dot: Vec<f64>,
    pub nu0: Option<f64>,
    pub alpha: Option<f64>,
    pub residual_max: f64,
    pub shooting_gap: f64,
    /// Growing-mode amplitude selected at the first anchor.
    pub eps: f64,
    pub trajectory: Trajectory,
}

impl PainleveSolution {
    fn from_trajectory(eq: Equation, trajectory: Trajectory, lo: f64, hi: f64) -> Self {
        let n = ((hi - lo) / GRID_SPACING).ceil().max(4.0) as usize;
        let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let (u, u_dot): (Vec<f64>, Vec<f64>) = grid
            .iter()
            .map(|&nu| trajectory.eval(nu).unwrap_or((f64::NAN, f64::NAN)))
            .unzip();
        let mut sol = PainleveSolution {
            equation: eq,
            grid,
            u,
            u_dot,
            nu0: None,
            alpha: None,
            residual_max: 0.0,
            shooting_gap: 0.0,
            eps: 0.0,
            trajectory,
        };
        sol.residual_max = sol.fd_residual_max();
        if let Ok((nu0, alpha)) = find_zero_and_slope(&sol) {
            sol.nu0 = Some(nu0);
            sol.alpha = Some(alpha);
        }
        sol
    }

    /// Max of `|u'' - a u^2 - b nu|` with `u''` from 5-point differences on the grid.
    pub fn fd_residual_max(&self) -> f64 {
        let n = self.grid.len();
        if n < 5 {
            return 0.0;
        }
        let h = self.grid[1] - self.grid[0];
        (2..n - 2)
            .map(|i| {
                let u = &self.u;
                let udd = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) / (12.0 * h * h);
                (udd - self.equation.rhs(self.grid[i], u[i])).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Dense output `(u, u_dot)`.
    pub fn eval(&self, nu: f64) -> Option<(f64, f64)> {
        self.trajectory.eval(nu)
    }

    /// `[u, u', u'', u''']` from the integrator's local polynomial.
    pub fn derivatives(&self, nu: f64) -> Option<[f64; 4]> {
        self.trajectory.derivatives(nu)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("nu,u,u_dot\n");
        for i in 0..self.grid.len() {
            s.push_str(&format!("{},{},{}\n", self.grid[i], self.u[i], self.u_dot[i]));
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nu0": self.nu0,
            "alpha": self.alpha,
            "paper_nu0": paper_nu0(),
            "paper_alpha": paper_alpha(),
            "residual_max": self.residual_max,
            "shooting_gap": self.shooting_gap,
            "eps": self.eps,
        })
    }
}

/// Classifies a trajectory started from an anchor: `+1` departs above the
/// series, `-1` below.
fn classify(eq: &Equation, anchor: (f64, f64, f64), eps: f64, k: f64, nu_match: f64) -> Result<(Trajectory, i32)> {
    let (nu, u, ud) = anchor;
    let (traj, stop) = integrate(eq, nu, u + eps, ud + eps * k, nu_match, |nu, u| {
        let (r, _, _) = eq.series(nu, None);
        let d = u - r;
        if d > DEPARTURE {
            Some(1)
        } else if d < -DEPARTURE {
            Some(-1)
        } else {
            None
        }
    })?;
    let side = match stop {
        Stop::Pole(_) => 1,
        Stop::Event(side) => side,
        Stop::Reached => {
            let (u, _) = traj.eval(nu_match).unwrap_or((f64::NAN, 0.0));
            if u >= eq.series(nu_match, None).0 {
                1
            } else {
                -1
            }
        }
    };
    Ok((traj, side))
}

/// Last point at which two trajectories agree to [`AGREEMENT`], sampled at `ds`.
fn agreement_end(a: &Trajectory, b: &Trajectory, from: f64, ds: f64) -> f64 {
    let end = a.end().min(b.end());
    let mut last = from;
    let mut i = 0usize;
    loop {
        let nu = (from + ds * i as f64).min(end);
        match (a.eval(nu), b.eval(nu)) {
            (Some((ua, da)), Some((ub, db))) if (ua - ub).abs() <= AGREEMENT && (da - db).abs() <= AGREEMENT * 10.0 => {
                last = nu;
            }
            _ => break,
        }
        if nu >= end {
            break;
        }
        i += 1;
    }
    last
}

/// Pole-free solution of `eq` on `[nu_start, nu_end]`.
pub fn solve_pole_free_eq(eq: Equation, nu_start: f64, nu_end: f64, tol: f64) -> Result<PainleveSolution> {
    let scale = eq.scale();
    if !(nu_start <= -15.0 * scale) {
        return Err(Error::Domain(format!("nu_start must be <= {}, got {nu_start}", -15.0 * scale)));
    }
    if !(nu_end >= -1.0 * scale) {
        return Err(Error::Domain(format!("nu_end must be >= {}, got {nu_end}", -scale)));
    }
    if !(tol >= 1e-12) {
        return Err(Error::Domain(format!("tol must be >= 1e-12, got {tol}")));
    }
    let nu_match = eq.nu_match();
    let (u0, ud0, _) = eq.series(nu_start, None);
    let mut anchor = (nu_start, u0, ud0);
    let mut pieces = Trajectory::default();
    let mut eps_scale = 1.0;
    let mut first_eps = None;
    let mut gap;

    loop {
        let k = (2.0 * eq.a * anchor.1).sqrt();
        let (mut lo, mut hi) = (-eps_scale, eps_scale);
        let (mut t_lo, s_lo) = classify(&eq, anchor, lo, k, nu_match)?;
        let (mut t_hi, s_hi) = classify(&eq, anchor, hi, k, nu_match)?;
        if s_lo == s_hi {
            return Err(Error::BracketFailure(format!(
                "growing-mode amplitudes +-{eps_scale:e} at nu = {} depart on the same side",
                anchor.0
            )));
        }
        let lo_side = s_lo;
        for _ in 0..400 {
            if hi - lo <= (tol * eps_scale).min(1e-16 * anchor.1.abs().max(1.0)) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (t, s) = classify(&eq, anchor, mid, k, nu_match)?;
            if s == lo_side {
                lo = mid;
                t_lo = t;
            } else {
                hi = mid;
                t_hi = t;
            }
        }
        gap = hi - lo;
        let eps = 0.5 * (lo + hi);
        first_eps.get_or_insert(eps);

        let reached = t_lo.end() >= nu_match && t_hi.end() >= nu_match;
        let agree = agreement_end(&t_lo, &t_hi, anchor.0, 1e-3 * scale);
        if reached && agree >= nu_match - 1e-9 {
            let (mid, _) = classify(&eq, anchor, eps, k, nu_match)?;
            pieces.steps.extend(mid.steps);
            break;
        }
        if agree <= anchor.0 + 1e-6 {
            return Err(Error::BracketFailure(format!("edge tracking stalled at nu = {}", anchor.0)));
        }
        let (mid, _) = classify(&eq, anchor, eps, k, nu_match)?;
        let (ua, da) = t_lo.eval(agree).unwrap();
        let (ub, db) = t_hi.eval(agree).unwrap();
        for s in mid.steps {
            if s.nu0 >= agree {
                break;
            }
            let mut s = s;
            if s.end() > agree {
                s.h = agree - s.nu0;
            }
            pieces.steps.push(s);
        }
        anchor = (agree, 0.5 * (ua + ub), 0.5 * (da + db));
        eps_scale = 1e-8;
    }

    let nu_m = pieces.end();
    let (um, dm) = pieces.eval(nu_m).unwrap();
    if nu_end > nu_m {
        let (tail, stop) = integrate(&eq, nu_m, um, dm, nu_end, |_, _| None)?;
        if let Stop::Pole(at) = stop {
            return Err(Error::IntegrationFailure { at, reason: "pole before nu_end".into() });
        }
        pieces.steps.extend(tail.steps);
    }
    let mut sol = PainleveSolution::from_trajectory(eq, pieces, nu_start, nu_end);
    sol.shooting_gap = gap;
    sol.eps = first_eps.unwrap_or(0.0);
    Ok(sol)
}

/// Pole-free solution of the paper's equation.
pub fn solve_pole_free(nu_start: f64, nu_end: f64, tol: f64) -> Result<PainleveSolution> {
    solve_pole_free_eq(Equation::PAPER, nu_start, nu_end, tol)
}

/// Solution of the initial-value problem through `(nu0, u0, ud0)` on `[lo, hi]`.
pub fn solve_ivp(eq: Equation, nu0: f64, u0: f64, ud0: f64, lo: f64, hi: f64) -> Result<PainleveSolution> {
    let mut steps = Vec::new();
    if lo < nu0 {
        let (back, stop) = integrate(&eq, nu0, u0, ud0, lo, |_, _| None)?;
        if let Stop::Pole(at) = stop {
            return Err(Error::IntegrationFailure { at, reason: "pole".into() });
        }
        for s in back.steps.into_iter().rev() {
            let end = s.end();
            let (u, ud) = s.eval(end);
            let mut fwd = TaylorStep::new(&eq, end, u, ud);
            fwd.h = -s.h;
            // Re-expand about the left end so the steps are ordered forward.
            steps.push(fwd);
        }
    }
    if hi > nu0 {
        let (fwd, stop) = integrate(&eq, nu0, u0, ud0, hi, |_, _| None)?;
        if let Stop::Pole(at) = stop {
            return Err(Error::IntegrationFailure { at, reason: "pole".into() });
        }
        steps.extend(fwd.steps);
    }
    Ok(PainleveSolution::from_trajectory(eq, Trajectory { steps }, lo, hi))
}

/// First zero of `u` on the grid, refined on the dense output, and `u'` there.
pub fn find_zero_and_slope(sol: &PainleveSolution) -> Result<(f64, f64)> {
    let i = (1..sol.grid.len())
        .filter(|&i| sol.u[i - 1].is_finite() && sol.u[i].is_finite())
        .find(|&i| sol.u[i - 1] == 0.0 || sol.u[i - 1].signum() != sol.u[i].signum())
        .ok_or(Error::NoZero)?;
    let (mut a, mut b) = (sol.grid[i - 1], sol.grid[i]);
    if sol.u[i - 1] == 0.0 {
        return Ok((a, sol.u_dot[i - 1]));
    }
    let fa = sol.u[i - 1];
    for _ in 0..200 {
        if b - a <= 1e-14 * a.abs().max(1.0) {
            break;
        }
        let m = 0.5 * (a + b);
        let (fm, _) = sol.eval(m).ok_or(Error::NoZero)?;
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let nu0 = 0.5 * (a + b);
    let (_, alpha) = sol.eval(nu0).ok_or(Error::NoZero)?;
    Ok((nu0, alpha))
}

/// Coefficients `c1..c4` of `u = sum c_k (nu - nu0)^k` fitted on `[nu0 - 0.05, nu0 + 0.05]`.
pub fn taylor_check(sol: &PainleveSolution) -> Result<[f64; 4]> {
    let nu0 = sol.nu0.ok_or(Error::NoZero)?;
    let h = 0.05;
    let deg = 8;
    let samples = 201;
    let mut m = DMatrix::<f64>::zeros(samples, deg + 1);
    let mut y = DVector::<f64>::zeros(samples);
    for i in 0..samples {
        let s = -1.0 + 2.0 * i as f64 / (samples - 1) as f64;
        let (u, _) = sol.eval(nu0 + h * s).ok_or(Error::NoZero)?;
        let mut p = 1.0;
        for j in 0..=deg {
            m[(i, j)] = p;
            p *= s;
        }
        y[i] = u;
    }
    let c = m
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::Domain(format!("least squares failed: {e}")))?;
    Ok([c[1] / h, c[2] / (h * h), c[3] / h.powi(3), c[4] / h.powi(4)])
}
