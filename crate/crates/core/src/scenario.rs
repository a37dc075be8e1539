//! Scenario configuration and the pipelines behind each CLI subcommand.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::ConformalMap;
use crate::growth::{self, Potential, PotentialKind};
use crate::lattice;
use crate::mcmc::{self, GridSpec};
use crate::output::{ArtifactWriter, Manifest, Polyline, SvgStyle, PALETTE};
use crate::painleve;
use crate::spectral::{self, UJet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Grow,
    Lattice,
    Painleve,
    Curve,
    Sample,
    ReportAll,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Grow => "grow",
            ScenarioKind::Lattice => "lattice",
            ScenarioKind::Painleve => "painleve",
            ScenarioKind::Curve => "curve",
            ScenarioKind::Sample => "sample",
            ScenarioKind::ReportAll => "report-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialType {
    Gaussian,
    Monomial,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(rename = "type", default = "default_type")]
    pub kind: PotentialType,
    /// Degree of the monomial potential.
    #[serde(default = "default_degree")]
    pub n: usize,
    /// Real part of the coefficient (t2 or tn). Unset picks a per-potential default.
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub t_im: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub hbar: Option<f64>,
}

fn default_type() -> PotentialType {
    PotentialType::Gaussian
}
fn default_degree() -> usize {
    3
}
fn default_alpha() -> f64 {
    -0.1
}
fn default_beta() -> f64 {
    2.0
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig {
            kind: default_type(),
            n: default_degree(),
            t: None,
            t_im: 0.0,
            alpha: default_alpha(),
            beta: default_beta(),
            hbar: None,
        }
    }
}

impl PotentialConfig {
    /// Coefficient with the default `t2 = 0.2` or `t_n = 1/((n-1)n)` (so that `r_c = 1`).
    pub fn coefficient(&self) -> Complex64 {
        let re = self.t.unwrap_or(match self.kind {
            PotentialType::Gaussian => 0.2,
            PotentialType::Monomial => 1.0 / ((self.n as f64 - 1.0) * self.n as f64),
            PotentialType::Log => 0.0,
        });
        Complex64::new(re, self.t_im)
    }

    pub fn build(&self, hbar: f64) -> Result<Potential> {
        match self.kind {
            PotentialType::Gaussian => Potential::gaussian(self.coefficient(), hbar),
            PotentialType::Monomial => Potential::monomial(self.n, self.coefficient(), hbar),
            PotentialType::Log => Potential::log(self.alpha, Complex64::new(self.beta, 0.0), hbar),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Grid or boundary resolution; unset picks a per-scenario default.
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    #[serde(default = "default_n_eig")]
    pub n_eig: usize,
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_nu_start")]
    pub nu_start: f64,
    #[serde(default = "default_nu_end")]
    pub nu_end: f64,
    /// Lattice size; unset picks the critical site (cubic) or `t0/hbar` (Gaussian).
    #[serde(default)]
    pub n_max: Option<usize>,
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_STEPS: usize = 50;
pub const DEFAULT_SWEEPS: usize = 50_000;
pub const DEFAULT_N_EIG: usize = 64;
pub const DEFAULT_NU_START: f64 = -20.0;
pub const DEFAULT_NU_END: f64 = 0.0;

fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_steps() -> usize {
    DEFAULT_STEPS
}
fn default_sweeps() -> usize {
    DEFAULT_SWEEPS
}
fn default_n_eig() -> usize {
    DEFAULT_N_EIG
}
fn default_t0() -> f64 {
    1.0
}
fn default_nu_start() -> f64 {
    DEFAULT_NU_START
}
fn default_nu_end() -> f64 {
    DEFAULT_NU_END
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            tol: DEFAULT_TOL,
            points: None,
            seed: 0,
            steps: DEFAULT_STEPS,
            sweeps: DEFAULT_SWEEPS,
            n_eig: DEFAULT_N_EIG,
            t0: 1.0,
            nu_start: DEFAULT_NU_START,
            nu_end: DEFAULT_NU_END,
            n_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        ScenarioConfig { scenario, potential: PotentialConfig::default(), numeric: NumericConfig::default(), out: default_out() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let n = &self.numeric;
        if !(n.tol > 0.0 && n.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", n.tol)));
        }
        if let Some(h) = self.potential.hbar {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("hbar must be positive, got {h}")));
            }
        }
        if !(n.t0 > 0.0 && n.t0.is_finite()) {
            return Err(Error::Config(format!("t0 must be positive, got {}", n.t0)));
        }
        if n.points == Some(0) || n.steps == 0 || n.n_eig == 0 {
            return Err(Error::Config("points, steps and n_eig must be positive".into()));
        }
        if !(n.nu_start < n.nu_end) {
            return Err(Error::Config(format!("need nu_start < nu_end, got {} and {}", n.nu_start, n.nu_end)));
        }
        Ok(())
    }
}

/// Runs the configured scenario and writes its artifacts plus `manifest.json` to `config.out`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Manifest> {
    config.validate()?;
    let seed = matches!(config.scenario, ScenarioKind::Sample | ScenarioKind::ReportAll).then_some(config.numeric.seed);
    let mut w = ArtifactWriter::new(&config.out, config.scenario.as_str(), seed)?;
    match config.scenario {
        ScenarioKind::Grow => grow(&mut w, "", config)?,
        ScenarioKind::Lattice => lattice_run(&mut w, "", config)?,
        ScenarioKind::Painleve => painleve_run(&mut w, "", config)?,
        ScenarioKind::Curve => curve_run(&mut w, "", config)?,
        ScenarioKind::Sample => sample_run(&mut w, "", config)?,
        ScenarioKind::ReportAll => report_all(&mut w, config)?,
    }
    w.finish()
}

fn style(title: &str) -> SvgStyle {
    SvgStyle { title: Some(title.to_string()), ..SvgStyle::default() }
}

fn kind_name(p: &Potential) -> serde_json::Value {
    match p.kind {
        PotentialKind::Gaussian { t2 } => json!({"type": "gaussian", "t2": [t2.re, t2.im]}),
        PotentialKind::Monomial { n, tn } => json!({"type": "monomial", "n": n, "tn": [tn.re, tn.im]}),
        PotentialKind::Log { alpha, beta } => json!({"type": "log", "alpha": alpha, "beta": [beta.re, beta.im]}),
    }
}

fn grow(w: &mut ArtifactWriter, dir: &str, cfg: &ScenarioConfig) -> Result<()> {
    let hbar = cfg.potential.hbar.unwrap_or(0.01);
    let potential = cfg.potential.build(hbar)?;
    let steps = cfg.numeric.steps;
    let m = cfg.numeric.points.unwrap_or(256).max(3);
    let traj = growth::grow_sequence(&potential, steps)?;

    let mut table = String::from("step,t0,r,area,cusps\n");
    let mut bounds = String::from("step,t0,re_z,im_z\n");
    let mut lines = Vec::new();
    let every = (steps / 10).max(1);
    for (j, (t0, map)) in traj.steps.iter().enumerate() {
        let step = j + 1;
        let cusps = map.find_cusps(1e-6).len();
        table.push_str(&format!("{step},{t0},{},{},{cusps}\n", map.r(), map.area()));
        let b = map.trace_boundary(m)?;
        for z in &b {
            bounds.push_str(&format!("{step},{t0},{},{}\n", z.re, z.im));
        }
        if step % every == 0 || step == steps {
            lines.push(Polyline::from_complex(&b, true, PALETTE[lines.len() % PALETTE.len()]));
        }
    }
    let (final_t0, final_map) = traj.steps.last().cloned().unwrap_or((0.0, ConformalMap::empty()));
    let cusps: Vec<_> = final_map.find_cusps(1e-6).iter().map(|c| json!({"re": c.z.re, "im": c.z.im, "abs_w": c.w.norm()})).collect();
    let summary = json!({
        "potential": kind_name(&potential),
        "hbar": hbar,
        "steps": steps,
        "t_c": traj.t_c,
        "critical": traj.critical,
        "final_t0": final_t0,
        "final_r": final_map.r(),
        "moment_drift": traj.moment_drift(6)?,
        "cusps": cusps,
    });
    w.write(&format!("{dir}grow.csv"), table.as_bytes())?;
    w.write(&format!("{dir}grow_boundaries.csv"), bounds.as_bytes())?;
    w.write_json(&format!("{dir}grow_summary.json"), &summary)?;
    w.write_svg(&format!("{dir}grow.svg"), &lines, &style("droplet growth"))
}

fn lattice_run(w: &mut ArtifactWriter, dir: &str, cfg: &ScenarioConfig) -> Result<()> {
    let hbar = cfg.potential.hbar.unwrap_or(1e-3);
    let t = cfg.potential.coefficient();
    match cfg.potential.kind {
        PotentialType::Gaussian => {
            let n_max = cfg.numeric.n_max.unwrap_or((cfg.numeric.t0 / hbar).round() as usize);
            let state = lattice::gaussian_recurrence(t, hbar, n_max)?;
            let curve = lattice::gaussian_lax_curve(t, hbar, n_max.max(1))?;
            let exact = lattice::ellipse_coefficients(t, n_max.max(1) as f64 * hbar);
            let dev = [
                (curve.z_zbar - exact.z_zbar).norm(),
                (curve.z2 - exact.z2).norm(),
                (curve.zbar2 - exact.zbar2).norm(),
                (curve.constant - exact.constant).norm(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            w.write(&format!("{dir}lattice.csv"), state.to_csv().as_bytes())?;
            w.write_json(
                &format!("{dir}lattice_summary.json"),
                &json!({"potential": "gaussian", "t2": [t.re, t.im], "hbar": hbar, "n_max": n_max,
                        "max_residual": state.max_residual(), "curve_deviation": dev}),
            )
        }
        PotentialType::Monomial if cfg.potential.n == 3 => {
            let n_max = cfg.numeric.n_max.unwrap_or_else(|| lattice::cubic_site_at(t, hbar, 0.0));
            let state = lattice::cubic_string_solve(t, hbar, n_max)?;
            let samples = lattice::scaling_extract(&state, 10.0)?;
            let nu_hi = samples.iter().map(|s| s.nu).fold(-1.0, f64::max);
            let sol = painleve::solve_pole_free(-20.0, nu_hi.max(-1.0), 1e-12)?;
            let mut collapse = 0.0f64;
            let mut pts = Vec::new();
            for s in &samples {
                if let Some((u, _)) = sol.eval(s.nu) {
                    collapse = collapse.max((s.u_of_nu - u).abs());
                }
                pts.push((s.nu, s.u_of_nu));
            }
            let pi: Vec<(f64, f64)> = sol.grid.iter().zip(&sol.u).filter(|(nu, _)| nu.abs() <= 10.0).map(|(&a, &b)| (a, b)).collect();
            w.write(&format!("{dir}lattice.csv"), state.to_csv().as_bytes())?;
            w.write(&format!("{dir}scaling.csv"), lattice::scaling_csv(&samples).as_bytes())?;
            w.write_json(
                &format!("{dir}lattice_summary.json"),
                &json!({"potential": "cubic", "t3": [t.re, t.im], "hbar": hbar, "n_max": n_max,
                        "max_residual": state.max_residual(), "scaling_samples": samples.len(),
                        "collapse_deviation": collapse}),
            )?;
            let svg_style = SvgStyle { equal_aspect: false, ..style("scaling collapse") };
            w.write_svg(&format!("{dir}scaling.svg"), &[Polyline::new(pi, false, PALETTE[5]), Polyline::new(pts, false, PALETTE[1])], &svg_style)
        }
        _ => Err(Error::Config("lattice scenarios support the gaussian and the cubic (n = 3) potentials".into())),
    }
}

fn pole_free(cfg: &ScenarioConfig) -> Result<painleve::PainleveSolution> {
    painleve::solve_pole_free(cfg.numeric.nu_start, cfg.numeric.nu_end, cfg.numeric.tol)
}

fn painleve_run(w: &mut ArtifactWriter, dir: &str, cfg: &ScenarioConfig) -> Result<()> {
    let sol = pole_free(cfg)?;
    let mut summary = sol.summary_json();
    summary["fd_residual_max"] = json!(sol.fd_residual_max());
    summary["nu_start"] = json!(cfg.numeric.nu_start);
    summary["nu_end"] = json!(cfg.numeric.nu_end);
    summary["series_correction"] = json!(-1.0 / 16.0);
    summary["paper_correction"] = json!(-16.0);
    let member = painleve::solve_ivp(
        painleve::Equation::PAPER,
        painleve::paper_nu0(),
        0.0,
        painleve::paper_alpha(),
        cfg.numeric.nu_start.max(painleve::paper_nu0() - 1.0),
        painleve::paper_nu0() + 0.25,
    );
    summary["paper_zero_member_taylor"] = match member.and_then(|m| painleve::taylor_check(&m)) {
        Ok(c) => json!({"c1": c[0], "c2": c[1], "c3": c[2], "c4": c[3]}),
        Err(e) => json!({"error": e.to_string()}),
    };
    w.write(&format!("{dir}painleve.csv"), sol.to_csv().as_bytes())?;
    w.write_json(&format!("{dir}painleve_summary.json"), &summary)?;
    let u: Vec<(f64, f64)> = sol.grid.iter().zip(&sol.u).map(|(&a, &b)| (a, b)).collect();
    let classical: Vec<(f64, f64)> = sol.grid.iter().filter(|&&nu| nu <= 0.0).map(|&nu| (nu, (-2.0 * nu).sqrt())).collect();
    let svg_style = SvgStyle { equal_aspect: false, ..style("pole-free Painleve I solution") };
    w.write_svg(&format!("{dir}painleve.svg"), &[Polyline::new(classical, false, PALETTE[5]), Polyline::new(u, false, PALETTE[0])], &svg_style)
}

/// Real sections `lambda = +-sqrt(lambda^2(zeta))` of a curve, as two polylines.
fn real_sections(jet: &UJet, zeta_lo: f64, zeta_hi: f64, m: usize, stroke: &str) -> [Polyline; 2] {
    let mut up = Vec::with_capacity(m);
    let mut down = Vec::with_capacity(m);
    for i in 0..m {
        let z = zeta_lo + (zeta_hi - zeta_lo) * i as f64 / (m - 1) as f64;
        let l2 = spectral::lambda_squared(Complex64::new(z, 0.0), jet).re;
        let y = if l2 >= 0.0 { l2.sqrt() } else { f64::NAN };
        up.push((z, y));
        down.push((z, -y));
    }
    [Polyline::new(up, false, stroke), Polyline::new(down, false, stroke)]
}

fn curve_run(w: &mut ArtifactWriter, dir: &str, cfg: &ScenarioConfig) -> Result<()> {
    let sol = pole_free(cfg)?;
    let m = cfg.numeric.points.unwrap_or(400).max(2);
    let (a, b) = (cfg.numeric.nu_start, cfg.numeric.nu_end);
    let grid: Vec<f64> = (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect();
    let [full, degenerate, singular] = spectral::three_curves(&sol, &grid)?;
    w.write(&format!("{dir}curve_full.csv"), spectral::curve_csv(&full).as_bytes())?;
    w.write(&format!("{dir}curve_degenerate.csv"), spectral::curve_csv(&degenerate).as_bytes())?;
    w.write(&format!("{dir}curve_singular.csv"), spectral::curve_csv(&singular).as_bytes())?;

    let (nu0, alpha) = (painleve::paper_nu0(), painleve::paper_alpha());
    let at_zero = spectral::branch_points(&UJet::closed(nu0, 0.0, alpha));
    let compat = grid
        .iter()
        .filter(|&&nu| nu <= -1.0)
        .filter_map(|&nu| UJet::from_solution(&sol, nu).ok())
        .map(|j| spectral::compatibility_residual(&j, 0.0))
        .fold(0.0, f64::max);
    let classes = |s: &[spectral::CurveSample]| {
        let count = |c| s.iter().filter(|x| x.classification == c).count();
        json!({"one_real": count(spectral::Classification::OneReal),
               "three_real": count(spectral::Classification::ThreeReal),
               "degenerate": count(spectral::Classification::Degenerate)})
    };
    w.write_json(
        &format!("{dir}curve_summary.json"),
        &json!({
            "nu_start": a, "nu_end": b, "points": m,
            "full": classes(&full), "degenerate": classes(&degenerate), "singular": classes(&singular),
            "compatibility_residual_max": compat,
            "paper_zero_crossing": {
                "nu0": nu0, "alpha": alpha,
                "cardano": at_zero.cardano,
                "discriminant_formula": spectral::zero_crossing_discriminant(nu0, alpha),
                "classification": at_zero.classification.as_str(),
            },
        }),
    )?;

    let mut lines = Vec::new();
    let picks = [a, 0.5 * (a + b), b.min(-0.5).max(a)];
    let width = (-2.0 * a).sqrt().max(1.0) * 1.2;
    for (k, &nu) in picks.iter().enumerate() {
        let shift = 2.5 * width * k as f64;
        for (c, jet) in [UJet::from_solution(&sol, nu)?, UJet::degenerate(nu), UJet::singular()].iter().enumerate() {
            for mut p in real_sections(jet, -width, width, 401, PALETTE[c]) {
                for pt in &mut p.points {
                    pt.0 += shift;
                }
                lines.push(p);
            }
        }
    }
    w.write_svg(&format!("{dir}curve.svg"), &lines, &SvgStyle { equal_aspect: false, ..style("real sections of the spectral curves") })
}

fn sample_run(w: &mut ArtifactWriter, dir: &str, cfg: &ScenarioConfig) -> Result<()> {
    let n = cfg.numeric.n_eig;
    let t0 = cfg.numeric.t0;
    let hbar = t0 / n as f64;
    let potential = cfg.potential.build(hbar)?;
    let s = mcmc::metropolis_run(&potential, n, cfg.numeric.sweeps, cfg.numeric.seed)?;
    let half = match potential.kind {
        PotentialKind::Gaussian { t2 } => 1.3 * (t0 / (1.0 - 4.0 * t2.norm_sqr())).sqrt() * (1.0 + 2.0 * t2.norm()),
        _ => 2.0 * t0.sqrt() + s.cutoff.unwrap_or(0.0).min(3.0 * t0.sqrt()),
    };
    let cells = cfg.numeric.points.unwrap_or(48);
    let hist = if s.snapshots.len() >= mcmc::MIN_CONFIGS { Some(mcmc::density_support(&s.snapshots, GridSpec::square(half, cells))?) } else { None };

    let mut summary = json!({
        "potential": kind_name(&potential),
        "n": n, "t0": t0, "hbar": hbar, "sweeps": s.sweep_count, "seed": s.seed,
        "acceptance_rate": s.acceptance_rate, "step": s.step, "cutoff": s.cutoff,
        "configurations": s.snapshots.len(),
        "mean_radius_sq": s.mean_radius_sq(),
        "quadrupole": s.quadrupole(),
    });
    let mut lines = Vec::new();
    if let PotentialKind::Gaussian { t2 } = potential.kind {
        let map = growth::gaussian_ellipse_at(t2, t0)?;
        if let ConformalMap::Laurent { r, u } = &map {
            let (r, u1) = (*r, u[1]);
            let inside = s.snapshots.iter().flatten().filter(|&&z| mcmc::inside_ellipse(z, r, u1, 1.05)).count();
            let total = s.snapshots.iter().map(|c| c.len()).sum::<usize>().max(1);
            summary["predicted_quadrupole"] = json!(2.0 * t2.norm());
            summary["fraction_inside_inflated_ellipse"] = json!(inside as f64 / total as f64);
            if let Some(h) = &hist {
                summary["histogram_mass_inside"] = json!(h.mass_fraction(|z| mcmc::inside_ellipse(z, r, u1, 1.05)));
            }
        }
        lines.push(Polyline::from_complex(&map.trace_boundary(256)?, true, PALETTE[1]));
    }
    let d = 0.01 * half;
    for z in &s.eigenvalues {
        lines.push(Polyline::new(vec![(z.re - d, z.im), (z.re + d, z.im)], false, PALETTE[0]));
        lines.push(Polyline::new(vec![(z.re, z.im - d), (z.re, z.im + d)], false, PALETTE[0]));
    }
    w.write(&format!("{dir}samples.csv"), s.to_csv().as_bytes())?;
    if let Some(h) = &hist {
        w.write_json(&format!("{dir}histogram.json"), &h.to_json())?;
    }
    w.write_json(&format!("{dir}sample_summary.json"), &summary)?;
    w.write_svg(&format!("{dir}sample.svg"), &lines, &style("eigenvalue sample"))
}

fn report_all(w: &mut ArtifactWriter, cfg: &ScenarioConfig) -> Result<()> {
    let base = |kind: ScenarioKind| ScenarioConfig { scenario: kind, out: cfg.out.clone(), ..ScenarioConfig::new(kind) };

    let mut ellipse = base(ScenarioKind::Sample);
    ellipse.numeric.seed = cfg.numeric.seed;
    ellipse.numeric.sweeps = cfg.numeric.sweeps;
    sample_run(w, "ellipse/", &ellipse)?;

    let mut ell = base(ScenarioKind::Grow);
    ell.potential.hbar = Some(0.05);
    ell.numeric.steps = 40;
    grow(w, "ell/", &ell)?;

    let mut jouk = base(ScenarioKind::Grow);
    jouk.potential.kind = PotentialType::Log;
    jouk.potential.hbar = Some(0.25);
    jouk.numeric.steps = 20;
    grow(w, "jouk/", &jouk)?;

    let mut hyp = base(ScenarioKind::Grow);
    hyp.potential.kind = PotentialType::Monomial;
    hyp.potential.hbar = Some(0.01);
    grow(w, "hyp/", &hyp)?;

    let mut six = base(ScenarioKind::Grow);
    six.potential.kind = PotentialType::Monomial;
    six.potential.n = 6;
    let (t_c, _) = growth::critical_area(6, six.potential.coefficient());
    six.potential.hbar = Some(t_c / 40.0);
    six.numeric.steps = 40;
    grow(w, "six/", &six)?;

    let mut pain = base(ScenarioKind::Painleve);
    pain.numeric.tol = cfg.numeric.tol;
    painleve_run(w, "pain/", &pain)?;

    let mut last = base(ScenarioKind::Curve);
    last.numeric.nu_end = -0.5;
    curve_run(w, "last/", &last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_parsing() {
        let ok = ScenarioConfig::from_toml("scenario = \"painleve\"\n[numeric]\ntol = 1e-9\n").unwrap();
        assert_eq!(ok.scenario, ScenarioKind::Painleve);
        assert_eq!(ok.numeric.tol, 1e-9);
        assert!(matches!(ScenarioConfig::from_toml("scenario = \"grow\"\nbogus = 1\n"), Err(Error::Config(_))));
        assert!(matches!(ScenarioConfig::from_toml("scenario = \"grow\"\n[potential]\ncolour = 1\n"), Err(Error::Config(_))));
        assert!(matches!(ScenarioConfig::from_toml("scenario = \"grow\"\n[numeric]\ntol = -1\n"), Err(Error::Config(_))));
        assert!(ScenarioConfig::from_toml("scenario = \"dance\"\n").is_err());
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Lattice);
        cfg.potential.kind = PotentialType::Monomial;
        cfg.potential.t = Some(0.2);
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(ScenarioConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn default_coefficients() {
        let mut p = PotentialConfig::default();
        assert_eq!(p.coefficient(), Complex64::new(0.2, 0.0));
        p.kind = PotentialType::Monomial;
        p.n = 6;
        assert!((p.coefficient().re - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn grow_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ScenarioConfig::new(ScenarioKind::Grow);
        cfg.out = dir.path().to_path_buf();
        cfg.numeric.steps = 5;
        let m = run_scenario(&cfg).unwrap();
        let names: Vec<_> = m.files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(names, ["grow.csv", "grow.svg", "grow_boundaries.csv", "grow_summary.json"]);
        assert!(m.verify(dir.path()).unwrap().is_empty());
    }
}
