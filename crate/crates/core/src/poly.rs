//! Polynomial roots through the eigenvalues of the companion matrix.

use nalgebra::{linalg::Schur, DMatrix};
use num_complex::Complex64;

/// Evaluates `sum c[k] x^k` (ascending coefficients) together with its derivative.
pub fn eval_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// All complex roots of the polynomial with ascending coefficients `coeffs`.
///
/// Leading coefficients below `1e-300` are stripped first. Each eigenvalue of
/// the companion matrix gets one Newton polish step, kept only when it lowers
/// the residual.
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1].norm() < 1e-300 {
        deg -= 1;
    }
    if deg <= 1 {
        return Vec::new();
    }
    let c = &coeffs[..deg];
    let n = deg - 1;
    let lead = c[n];
    if n == 1 {
        return vec![-c[0] / lead];
    }
    if n == 2 {
        return quadratic(c[2], c[1], c[0]).into_iter().map(|r| polish(c, r)).collect();
    }

    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }

    let eig = match Schur::try_new(comp.clone(), f64::EPSILON, 10_000) {
        Some(schur) => block_eigenvalues(&schur.unpack().1),
        // Extremely rare; fall back to Durand-Kerner from the unit circle.
        None => durand_kerner(c),
    };
    eig.into_iter().map(|r| polish(c, r)).collect()
}

fn polish(c: &[Complex64], r: Complex64) -> Complex64 {
    let (p, dp) = eval_with_derivative(c, r);
    if dp.norm() == 0.0 || !p.is_finite() {
        return r;
    }
    let cand = r - p / dp;
    let (pc, _) = eval_with_derivative(c, cand);
    if pc.norm() < p.norm() {
        cand
    } else {
        r
    }
}

fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // Avoid cancellation: pick the sign that adds magnitudes.
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

/// Reads eigenvalues off a (quasi-)triangular Schur factor, solving any
/// remaining 2x2 diagonal blocks directly.
fn block_eigenvalues(t: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let has_block = i + 1 < n && {
            let sub = t[(i + 1, i)].norm();
            sub > f64::EPSILON * (t[(i, i)].norm() + t[(i + 1, i + 1)].norm())
        };
        if has_block {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
            out.push(half_tr + disc);
            out.push(half_tr - disc);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    out
}

fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|&x| x / lead).collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let (p, _) = eval_with_derivative(&monic, z[i]);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            let step = p / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn cube_roots_of_unity() {
        // w^3 - 1
        let r = roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(r.len(), 3);
        for z in r {
            assert!((z.powu(3) - 1.0).norm() < 1e-14);
            assert!((z.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn real_cubic_with_double_root() {
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        let r = sorted(roots(&[c(2.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        assert!((r[0] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-7);
        assert!((r[2] - c(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn complex_coefficients() {
        // (x - i)(x - 2)(x + 1 + i)
        let want = [c(0.0, 1.0), c(2.0, 0.0), c(-1.0, -1.0)];
        let mut p = vec![c(1.0, 0.0)];
        for &z in &want {
            let mut q = vec![c(0.0, 0.0); p.len() + 1];
            for (k, &a) in p.iter().enumerate() {
                q[k + 1] += a;
                q[k] -= a * z;
            }
            p = q;
        }
        let got = roots(&p);
        for z in want {
            assert!(got.iter().any(|g| (g - z).norm() < 1e-12), "missing {z}");
        }
    }

    #[test]
    fn leading_zeros_are_stripped() {
        let r = roots(&[c(-4.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(r.len(), 2);
    }
}
