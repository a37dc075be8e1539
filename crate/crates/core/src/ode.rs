//! Adaptive Dormand-Prince 5(4) integration for small real systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 1_000_000;

/// Tolerances for [`dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rtol: 1e-10, atol: 1e-12 }
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// Returns every accepted step, starting with `(t0, y0)` and ending exactly at `t1`.
pub fn dopri5<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t1: f64, tol: Tolerance) -> Result<Vec<(f64, [f64; N])>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut path = vec![(t0, y0)];
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(path);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * (span.abs() * 1e-3).min(1e-2);
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);

    for _ in 0..MAX_STEPS {
        if (t1 - t) * dir <= 0.0 {
            return Ok(path);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                for j in 0..s {
                    *yi += h * A[s][j] * k[j][i];
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4) / sc).abs());
        }
        if !err.is_finite() {
            return Err(Error::IntegrationFailure { at: t, reason: "non-finite state".into() });
        }
        if err <= 1.0 {
            t = if (t + h - t1) * dir >= 0.0 { t1 } else { t + h };
            y = y5;
            k[0] = k[6];
            path.push((t, y));
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::IntegrationFailure { at: t, reason: "step size underflow".into() });
        }
    }
    Err(Error::IntegrationFailure { at: t, reason: "step budget exhausted".into() })
}

/// Final state of [`dopri5`].
pub fn dopri5_end<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, tol: Tolerance) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    Ok(dopri5(f, t0, y0, t1, tol)?.last().map(|p| p.1).unwrap_or(y0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let tau = 2.0 * std::f64::consts::PI;
        let end = dopri5_end(|_, y| [y[1], -y[0]], 0.0, [1.0, 0.0], tau, Tolerance::default()).unwrap();
        assert!((end[0] - 1.0).abs() < 1e-9 && end[1].abs() < 1e-9, "{end:?}");
    }

    #[test]
    fn backward_exponential() {
        let end = dopri5_end(|_, y| [y[0]], 1.0, [1.0], 0.0, Tolerance::default()).unwrap();
        assert!((end[0] - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn path_ends_at_target() {
        let p = dopri5(|t, _| [t], 0.0, [0.0], 2.0, Tolerance::default()).unwrap();
        assert_eq!(p.last().unwrap().0, 2.0);
        assert!((p.last().unwrap().1[0] - 2.0).abs() < 1e-12);
    }
}
