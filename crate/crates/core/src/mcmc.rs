//! Metropolis sampling of the finite-N eigenvalue density.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::{critical_area, Potential, PotentialKind};

/// Default cutoff radius for monomial potentials, in units of `r_c`.
pub const CUTOFF_FACTOR: f64 = 3.0;
/// Fraction of sweeps used for burn-in and step tuning.
pub const BURN_IN_FRACTION: f64 = 0.2;
/// Minimum number of configurations accepted by [`density_support`].
pub const MIN_CONFIGS: usize = 100;

const TUNE_EVERY: usize = 10;
const MAX_SNAPSHOTS: usize = 1000;

/// `W(z, zbar) = -|z|^2 + V(z) + conj V(z)`.
pub fn w_potential(z: Complex64, potential: &Potential) -> f64 {
    let v = match potential.kind {
        PotentialKind::Gaussian { t2 } => t2 * z * z,
        PotentialKind::Monomial { n, tn } => tn * z.powu(n as u32),
        PotentialKind::Log { alpha, beta } => (beta / (beta - z)).ln() * alpha,
    };
    -z.norm_sqr() + 2.0 * v.re
}

/// Cutoff radius in force for `potential`, if any.
pub fn default_cutoff(potential: &Potential) -> Option<f64> {
    match potential.kind {
        PotentialKind::Monomial { n, tn } => Some(CUTOFF_FACTOR * critical_area(n, tn).1),
        _ => None,
    }
}

/// Unnormalized log of the joint eigenvalue density.
///
/// Returns `-inf` for coincident eigenvalues or points beyond the cutoff.
pub fn log_weight(eigenvalues: &[Complex64], potential: &Potential) -> f64 {
    let cutoff = default_cutoff(potential);
    let mut s = 0.0;
    for (i, &z) in eigenvalues.iter().enumerate() {
        if cutoff.is_some_and(|r| z.norm() > r) {
            return f64::NEG_INFINITY;
        }
        for &y in &eigenvalues[i + 1..] {
            let d = (z - y).norm_sqr();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            s += d.ln();
        }
        s += w_potential(z, potential) / potential.hbar;
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSample {
    pub eigenvalues: Vec<Complex64>,
    #[serde(skip)]
    pub potential: Potential,
    pub sweep_count: usize,
    /// Over the measurement phase only.
    pub acceptance_rate: f64,
    pub seed: u64,
    /// Proposal width after tuning.
    pub step: f64,
    pub cutoff: Option<f64>,
    /// Configurations recorded at regular intervals during measurement.
    #[serde(skip)]
    pub snapshots: Vec<Vec<Complex64>>,
    /// Measurement-phase average of `sum |z_j|^2`.
    pub mean_abs2: f64,
    /// Measurement-phase average of `sum z_j^2`.
    pub mean_z2: Complex64,
}

impl EnsembleSample {
    /// `config_id,eig_index,re_z,im_z` for every snapshot.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("config_id,eig_index,re_z,im_z\n");
        for (c, conf) in self.snapshots.iter().enumerate() {
            for (j, z) in conf.iter().enumerate() {
                s.push_str(&format!("{c},{j},{},{}\n", z.re, z.im));
            }
        }
        s
    }

    /// Mean of `|z|^2` per eigenvalue over the measurement phase.
    pub fn mean_radius_sq(&self) -> f64 {
        self.mean_abs2 / self.eigenvalues.len() as f64
    }

    /// Estimate of `|u/r|` for an elliptic droplet from the second moments.
    ///
    /// For a uniform ellipse `z = r w + u/w`, `sum z^2 / sum |z|^2 = 2ru/(r^2+|u|^2)`.
    pub fn quadrupole(&self) -> f64 {
        let rho = (self.mean_z2.norm() / self.mean_abs2).min(1.0);
        if rho == 0.0 {
            return 0.0;
        }
        (1.0 - (1.0 - rho * rho).sqrt()) / rho
    }
}

/// Single-eigenvalue Metropolis chain with `t0 = n hbar`.
pub fn metropolis_run(potential: &Potential, n: usize, sweeps: usize, seed: u64) -> Result<EnsembleSample> {
    if n == 0 {
        return Err(Error::Domain("need at least one eigenvalue".into()));
    }
    if let PotentialKind::Gaussian { t2 } = potential.kind {
        if 2.0 * t2.norm() >= 1.0 {
            return Err(Error::Criticality(format!("2|t2| = {} >= 1", 2.0 * t2.norm())));
        }
    }
    let hbar = potential.hbar;
    let t0 = n as f64 * hbar;
    let cutoff = default_cutoff(potential);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar((t0 * (j as f64 + 0.5) / n as f64).sqrt(), golden * j as f64))
        .collect();
    let mut w: Vec<f64> = z.iter().map(|&x| w_potential(x, potential)).collect();

    let burn = (BURN_IN_FRACTION * sweeps as f64).round() as usize;
    let measure = sweeps - burn;
    let thin = (measure / MAX_SNAPSHOTS).max(1);
    let mut step = 0.5 * hbar.sqrt();
    let (mut acc, mut tried) = (0usize, 0usize);
    let mut sum_abs2 = 0.0;
    let mut sum_z2 = Complex64::default();
    let mut snapshots = Vec::new();

    for sweep in 0..sweeps {
        for i in 0..n {
            let dz = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * step;
            let zn = z[i] + dz;
            tried += 1;
            if cutoff.is_some_and(|r| zn.norm() > r) {
                continue;
            }
            let wn = w_potential(zn, potential);
            let mut dlog = (wn - w[i]) / hbar;
            let mut ratio = 1.0;
            for (j, &y) in z.iter().enumerate() {
                if j == i {
                    continue;
                }
                ratio *= (zn - y).norm_sqr() / (z[i] - y).norm_sqr();
                if !(1e-100..=1e100).contains(&ratio) {
                    dlog += ratio.ln();
                    ratio = 1.0;
                }
            }
            dlog += ratio.ln();
            if dlog.is_nan() {
                continue;
            }
            if dlog >= 0.0 || rng.random::<f64>() < dlog.exp() {
                z[i] = zn;
                w[i] = wn;
                acc += 1;
            }
        }
        if sweep < burn {
            if (sweep + 1) % TUNE_EVERY == 0 {
                let rate = acc as f64 / tried as f64;
                if rate > 0.5 {
                    step *= 1.15;
                } else if rate < 0.3 {
                    step /= 1.15;
                }
                acc = 0;
                tried = 0;
            }
            if sweep + 1 == burn {
                acc = 0;
                tried = 0;
            }
            continue;
        }
        sum_abs2 += z.iter().map(|x| x.norm_sqr()).sum::<f64>();
        sum_z2 += z.iter().map(|x| x * x).sum::<Complex64>();
        if (sweep - burn) % thin == 0 {
            snapshots.push(z.clone());
        }
    }
    let m = measure.max(1) as f64;
    Ok(EnsembleSample {
        eigenvalues: z,
        potential: *potential,
        sweep_count: sweeps,
        acceptance_rate: if tried > 0 { acc as f64 / tried as f64 } else { 0.0 },
        seed,
        step,
        cutoff,
        snapshots,
        mean_abs2: sum_abs2 / m,
        mean_z2: sum_z2 / m,
    })
}

/// Uniform 2-D grid over a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, cells: usize) -> Self {
        GridSpec { x_min: -half_width, x_max: half_width, y_min: -half_width, y_max: half_width, nx: cells, ny: cells }
    }

    fn cell_area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min) / (self.nx * self.ny) as f64
    }

    fn center(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.x_min + (ix as f64 + 0.5) * (self.x_max - self.x_min) / self.nx as f64,
            self.y_min + (iy as f64 + 0.5) * (self.y_max - self.y_min) / self.ny as f64,
        )
    }
}

/// Histogram of eigenvalue positions and the support estimated from it.
#[derive(Debug, Clone, Serialize)]
pub struct DensitySupport {
    pub grid: GridSpec,
    /// Row-major counts, `counts[iy * nx + ix]`.
    pub counts: Vec<u64>,
    pub configurations: usize,
    /// Points that fell outside the grid.
    pub outside: u64,
    /// Density threshold (eigenvalues per unit area per configuration).
    pub threshold: f64,
    /// Area of the cells above threshold.
    pub support_area: f64,
    /// Largest supported radius in each of the angular bins, starting at angle 0.
    pub boundary_radius: Vec<f64>,
}

impl DensitySupport {
    /// Fraction of the histogram mass for which `inside` holds at the cell centre.
    pub fn mass_fraction<F: Fn(Complex64) -> bool>(&self, inside: F) -> f64 {
        let total: u64 = self.counts.iter().sum::<u64>() + self.outside;
        let mut hit = 0u64;
        for iy in 0..self.grid.ny {
            for ix in 0..self.grid.nx {
                if inside(self.grid.center(ix, iy)) {
                    hit += self.counts[iy * self.grid.nx + ix];
                }
            }
        }
        hit as f64 / total.max(1) as f64
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// Number of angular bins used for the boundary estimate.
pub const BOUNDARY_BINS: usize = 64;

/// Histogram of `configs` on `grid`; support is where the density exceeds 10% of the
/// median over occupied cells.
pub fn density_support(configs: &[Vec<Complex64>], grid: GridSpec) -> Result<DensitySupport> {
    if configs.len() < MIN_CONFIGS {
        return Err(Error::InsufficientSamples { got: configs.len(), need: MIN_CONFIGS });
    }
    if grid.nx == 0 || grid.ny == 0 || !(grid.x_max > grid.x_min && grid.y_max > grid.y_min) {
        return Err(Error::Domain("empty histogram grid".into()));
    }
    let mut counts = vec![0u64; grid.nx * grid.ny];
    let mut outside = 0;
    for conf in configs {
        for z in conf {
            let fx = (z.re - grid.x_min) / (grid.x_max - grid.x_min) * grid.nx as f64;
            let fy = (z.im - grid.y_min) / (grid.y_max - grid.y_min) * grid.ny as f64;
            if fx >= 0.0 && fy >= 0.0 && (fx as usize) < grid.nx && (fy as usize) < grid.ny {
                counts[fy as usize * grid.nx + fx as usize] += 1;
            } else {
                outside += 1;
            }
        }
    }
    let norm = 1.0 / (configs.len() as f64 * grid.cell_area());
    let mut occupied: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    occupied.sort_unstable();
    let median = occupied.get(occupied.len() / 2).copied().unwrap_or(0) as f64 * norm;
    let threshold = 0.1 * median;

    let mut support_area = 0.0;
    let mut boundary_radius = vec![0.0; BOUNDARY_BINS];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if counts[iy * grid.nx + ix] as f64 * norm < threshold || counts[iy * grid.nx + ix] == 0 {
                continue;
            }
            support_area += grid.cell_area();
            let c = grid.center(ix, iy);
            let theta = c.arg().rem_euclid(2.0 * std::f64::consts::PI);
            let bin = ((theta / (2.0 * std::f64::consts::PI)) * BOUNDARY_BINS as f64) as usize % BOUNDARY_BINS;
            boundary_radius[bin] = f64::max(boundary_radius[bin], c.norm());
        }
    }
    Ok(DensitySupport { grid, counts, configurations: configs.len(), outside, threshold, support_area, boundary_radius })
}

/// Whether `z` lies in the ellipse `z = r w + u/w`, `|w| <= 1`, scaled about the origin by `scale`.
pub fn inside_ellipse(z: Complex64, r: f64, u: Complex64, scale: f64) -> bool {
    let rot = Complex64::from_polar(1.0, -0.5 * u.arg());
    let zr = z * rot;
    let a = scale * (r + u.norm());
    let b = scale * (r - u.norm()).abs();
    (zr.re / a).powi(2) + (zr.im / b).powi(2) <= 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::gaussian_ellipse_at;
    use crate::geometry::ConformalMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_weight_examples() {
        let p = Potential::gaussian(c(0.0, 0.0), 0.25).unwrap();
        let z = c(0.3, -0.7);
        assert!((log_weight(&[z], &p) + z.norm_sqr() / 0.25).abs() < 1e-14);
        let two = log_weight(&[c(1.0, 0.0), c(-1.0, 0.0)], &p);
        assert!((two - (2.0 * 2f64.ln() - 2.0 / 0.25)).abs() < 1e-12);
        assert_eq!(log_weight(&[c(0.1, 0.1), c(0.1, 0.1)], &p), f64::NEG_INFINITY);
    }

    #[test]
    fn conjugation_invariance() {
        let p = Potential::gaussian(c(0.2, 0.0), 0.1).unwrap();
        let zs = vec![c(0.1, 0.4), c(-0.5, 0.2), c(0.7, -0.3)];
        let conj: Vec<_> = zs.iter().map(|z| z.conj()).collect();
        assert!((log_weight(&zs, &p) - log_weight(&conj, &p)).abs() < 1e-12);
    }

    #[test]
    fn cutoff_rejects() {
        let p = Potential::monomial(3, c(1.0 / 6.0, 0.0), 0.01).unwrap();
        assert_eq!(default_cutoff(&p), Some(3.0));
        assert_eq!(log_weight(&[c(3.5, 0.0)], &p), f64::NEG_INFINITY);
    }

    #[test]
    fn seed_determinism() {
        let p = Potential::gaussian(c(0.1, 0.0), 1.0 / 16.0).unwrap();
        let a = metropolis_run(&p, 16, 200, 42).unwrap();
        let b = metropolis_run(&p, 16, 200, 42).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        let c2 = metropolis_run(&p, 16, 200, 43).unwrap();
        assert_ne!(a.eigenvalues, c2.eigenvalues);
    }

    #[test]
    fn circular_law_radial_moment() {
        let p = Potential::gaussian(c(0.0, 0.0), 1.0 / 16.0).unwrap();
        let s = metropolis_run(&p, 16, 20_000, 1).unwrap();
        assert!((s.mean_radius_sq() - 0.5).abs() < 0.05, "{}", s.mean_radius_sq());
        assert!((0.3..=0.5).contains(&s.acceptance_rate) || (s.acceptance_rate - 0.4).abs() < 0.15, "{}", s.acceptance_rate);
    }

    #[test]
    fn circle_support() {
        let n = 32;
        let p = Potential::gaussian(c(0.0, 0.0), 1.0 / n as f64).unwrap();
        let s = metropolis_run(&p, n, 20_000, 5).unwrap();
        let d = density_support(&s.snapshots, GridSpec::square(1.6, 32)).unwrap();
        let worst = d.boundary_radius.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst / 2.0 < 0.1, "{:?}", d.boundary_radius);
        assert!(d.support_area > 0.9 * std::f64::consts::PI);
        assert!(d.mass_fraction(|z| z.norm() <= 1.1) > 0.95);
    }

    #[test]
    fn ellipse_membership() {
        let map = gaussian_ellipse_at(c(0.0, 0.2), 1.0).unwrap();
        let ConformalMap::Laurent { r, u } = &map else { panic!() };
        let pts = map.trace_boundary(64).unwrap();
        for z in pts {
            assert!(inside_ellipse(z * 0.999, *r, u[1], 1.0));
            assert!(!inside_ellipse(z * 1.001, *r, u[1], 1.0));
        }
    }

    #[test]
    fn too_few_configurations() {
        let e = density_support(&vec![vec![c(0.0, 0.0)]; 5], GridSpec::square(1.0, 4)).unwrap_err();
        assert!(matches!(e, Error::InsufficientSamples { got: 5, need: 100 }));
    }
}
