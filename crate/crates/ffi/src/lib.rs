//! C ABI for growthlab.
//!
//! Every fallible call returns a [`GlStatus`]; on failure the message is available
//! from [`gl_last_error_message`] on the same thread. Objects are opaque handles
//! released with their `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use growthlab::growth::{self, Potential};
use growthlab::lattice::{self, LatticeState};
use growthlab::mcmc::{self, EnsembleSample};
use growthlab::painleve::{self, PainleveSolution};
use growthlab::spectral::{self, Classification, UJet};
use growthlab::{ConformalMap, Error};
use num_complex::Complex64;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    QuadratureDivergence = 3,
    Criticality = 4,
    Supercritical = 5,
    NoConvergence = 6,
    InvalidBoundary = 7,
    BracketFailure = 8,
    IntegrationFailure = 9,
    NoZero = 10,
    InsufficientSamples = 11,
    Config = 12,
    Io = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

impl From<&Error> for GlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => GlStatus::Domain,
            Error::QuadratureDivergence { .. } => GlStatus::QuadratureDivergence,
            Error::Criticality(_) => GlStatus::Criticality,
            Error::Supercritical { .. } => GlStatus::Supercritical,
            Error::NoConvergence { .. } => GlStatus::NoConvergence,
            Error::InvalidBoundary(_) => GlStatus::InvalidBoundary,
            Error::BracketFailure(_) => GlStatus::BracketFailure,
            Error::IntegrationFailure { .. } => GlStatus::IntegrationFailure,
            Error::NoZero => GlStatus::NoZero,
            Error::InsufficientSamples { .. } => GlStatus::InsufficientSamples,
            Error::Config(_) => GlStatus::Config,
            Error::Io(_) | Error::Json(_) => GlStatus::Io,
        }
    }
}

/// Branch-point classification codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlClassification {
    OneReal = 0,
    ThreeReal = 1,
    Degenerate = 2,
}

/// Opaque conformal map.
pub struct GlMap(ConformalMap);
/// Opaque Painleve I solution.
pub struct GlPainleve(PainleveSolution);
/// Opaque string-equation lattice state.
pub struct GlLattice(LatticeState);
/// Opaque Metropolis sample.
pub struct GlSample(EnsembleSample);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), GlStatus>>(f: F) -> GlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            GlStatus::Panic
        }
    }
}

fn fail(e: Error) -> GlStatus {
    let s = GlStatus::from(&e);
    set_error(e.to_string());
    s
}

fn null(name: &str) -> GlStatus {
    set_error(format!("null pointer argument: {name}"));
    GlStatus::NullPointer
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return Err(null(stringify!($p))),
        }
    };
}

macro_rules! out {
    ($p:expr, $v:expr) => {
        match unsafe { $p.as_mut() } {
            Some(slot) => *slot = $v,
            None => return Err(null(stringify!($p))),
        }
    };
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn gl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Critical area and radius for `V = tn z^n`.
#[no_mangle]
pub extern "C" fn gl_critical_area(n: usize, tn_re: f64, tn_im: f64, t_c: *mut f64, r_c: *mut f64) -> GlStatus {
    guard(|| {
        if n < 3 || (tn_re == 0.0 && tn_im == 0.0) {
            return Err(fail(Error::Domain("need n >= 3 and tn != 0".into())));
        }
        let (t, r) = growth::critical_area(n, Complex64::new(tn_re, tn_im));
        out!(t_c, t);
        out!(r_c, r);
        Ok(())
    })
}

/// Elliptic droplet of area `t0` for the Gaussian potential.
#[no_mangle]
pub extern "C" fn gl_map_gaussian(t2_re: f64, t2_im: f64, t0: f64, out: *mut *mut GlMap) -> GlStatus {
    guard(|| {
        let m = growth::gaussian_ellipse_at(Complex64::new(t2_re, t2_im), t0).map_err(fail)?;
        out!(out, boxed(GlMap(m)));
        Ok(())
    })
}

/// Droplet of area `t0` for `V = tn z^n`.
#[no_mangle]
pub extern "C" fn gl_map_monomial(n: usize, tn_re: f64, tn_im: f64, t0: f64, out: *mut *mut GlMap) -> GlStatus {
    guard(|| {
        let m = growth::monomial_growth(n, Complex64::new(tn_re, tn_im), t0).map_err(fail)?;
        out!(out, boxed(GlMap(m)));
        Ok(())
    })
}

/// Droplet of area `t0` for the logarithmic potential with real `beta`.
#[no_mangle]
pub extern "C" fn gl_map_joukowski(alpha: f64, beta: f64, t0: f64, out: *mut *mut GlMap) -> GlStatus {
    guard(|| {
        let m = growth::joukowski_growth(alpha, beta, t0).map_err(fail)?;
        out!(out, boxed(GlMap(m)));
        Ok(())
    })
}

/// # Safety
/// `map` must come from a `gl_map_*` constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gl_map_free(map: *mut GlMap) {
    free(map)
}

/// `z(w)` for `|w| >= 1`.
#[no_mangle]
pub extern "C" fn gl_map_eval(map: *const GlMap, w_re: f64, w_im: f64, z_re: *mut f64, z_im: *mut f64) -> GlStatus {
    guard(|| {
        let m = deref!(map);
        let z = m.0.eval(Complex64::new(w_re, w_im)).map_err(fail)?;
        out!(z_re, z.re);
        out!(z_im, z.im);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn gl_map_area(map: *const GlMap, area: *mut f64) -> GlStatus {
    guard(|| {
        let m = deref!(map);
        out!(area, m.0.area());
        Ok(())
    })
}

/// Writes `t0` and `t_1..t_kmax` into `re[0..=kmax]`, `im[0..=kmax]` (`re[0] = t0`).
///
/// # Safety
/// `re` and `im` must each point to `kmax + 1` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gl_map_moments(map: *const GlMap, kmax: usize, re: *mut f64, im: *mut f64) -> GlStatus {
    guard(|| {
        let m = deref!(map);
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let mv = m.0.moments(kmax).map_err(fail)?;
        let re = std::slice::from_raw_parts_mut(re, kmax + 1);
        let im = std::slice::from_raw_parts_mut(im, kmax + 1);
        re[0] = mv.t0;
        im[0] = 0.0;
        for k in 1..=kmax {
            let t = mv.get(k);
            re[k] = t.re;
            im[k] = t.im;
        }
        Ok(())
    })
}

/// Number of cusps with `||w| - 1| <= tol`.
#[no_mangle]
pub extern "C" fn gl_map_cusp_count(map: *const GlMap, tol: f64, count: *mut usize) -> GlStatus {
    guard(|| {
        let m = deref!(map);
        out!(count, m.0.find_cusps(tol).len());
        Ok(())
    })
}

/// Pole-free Painleve I solution on `[nu_start, nu_end]`.
#[no_mangle]
pub extern "C" fn gl_painleve_solve(nu_start: f64, nu_end: f64, tol: f64, out: *mut *mut GlPainleve) -> GlStatus {
    guard(|| {
        let s = painleve::solve_pole_free(nu_start, nu_end, tol).map_err(fail)?;
        out!(out, boxed(GlPainleve(s)));
        Ok(())
    })
}

/// # Safety
/// `sol` must come from `gl_painleve_solve` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gl_painleve_free(sol: *mut GlPainleve) {
    free(sol)
}

#[no_mangle]
pub extern "C" fn gl_painleve_eval(sol: *const GlPainleve, nu: f64, u: *mut f64, u_dot: *mut f64) -> GlStatus {
    guard(|| {
        let s = deref!(sol);
        let Some((a, b)) = s.0.eval(nu) else {
            return Err(fail(Error::Domain(format!("nu = {nu} outside the solution range"))));
        };
        out!(u, a);
        out!(u_dot, b);
        Ok(())
    })
}

/// Max finite-difference residual of the solution on its grid.
#[no_mangle]
pub extern "C" fn gl_painleve_residual(sol: *const GlPainleve, residual: *mut f64) -> GlStatus {
    guard(|| {
        let s = deref!(sol);
        out!(residual, s.0.fd_residual_max());
        Ok(())
    })
}

/// Zero-crossing `(nu0, u'(nu0))` of the solution.
#[no_mangle]
pub extern "C" fn gl_painleve_zero(sol: *const GlPainleve, nu0: *mut f64, alpha: *mut f64) -> GlStatus {
    guard(|| {
        let s = deref!(sol);
        let (a, b) = painleve::find_zero_and_slope(&s.0).map_err(fail)?;
        out!(nu0, a);
        out!(alpha, b);
        Ok(())
    })
}

/// Branch points `zeta_1..3` of the spectral curve for the closed jet `(nu, u, u_dot)`.
///
/// # Safety
/// `re` and `im` must each point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gl_branch_points(
    nu: f64,
    u: f64,
    u_dot: f64,
    re: *mut f64,
    im: *mut f64,
    class: *mut GlClassification,
) -> GlStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let s = spectral::branch_points(&UJet::closed(nu, u, u_dot));
        let re = std::slice::from_raw_parts_mut(re, 3);
        let im = std::slice::from_raw_parts_mut(im, 3);
        for (k, z) in s.zeta_roots.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        let c = match s.classification {
            Classification::OneReal => GlClassification::OneReal,
            Classification::ThreeReal => GlClassification::ThreeReal,
            Classification::Degenerate => GlClassification::Degenerate,
        };
        out!(class, c);
        Ok(())
    })
}

/// Lax-pair compatibility residual for an arbitrary jet.
#[no_mangle]
pub extern "C" fn gl_compatibility_residual(
    nu: f64,
    u: f64,
    u_dot: f64,
    u_ddot: f64,
    u_dddot: f64,
    zeta: f64,
    residual: *mut f64,
) -> GlStatus {
    guard(|| {
        let jet = UJet { nu, u, u_dot, u_ddot, u_dddot };
        out!(residual, spectral::compatibility_residual(&jet, zeta));
        Ok(())
    })
}

/// Cubic string equation on `n = 0..=n_max`.
#[no_mangle]
pub extern "C" fn gl_lattice_cubic(t3_re: f64, t3_im: f64, hbar: f64, n_max: usize, out: *mut *mut GlLattice) -> GlStatus {
    guard(|| {
        let s = lattice::cubic_string_solve(Complex64::new(t3_re, t3_im), hbar, n_max).map_err(fail)?;
        out!(out, boxed(GlLattice(s)));
        Ok(())
    })
}

/// Gaussian recurrence on `n = 0..=n_max`.
#[no_mangle]
pub extern "C" fn gl_lattice_gaussian(t2_re: f64, t2_im: f64, hbar: f64, n_max: usize, out: *mut *mut GlLattice) -> GlStatus {
    guard(|| {
        let s = lattice::gaussian_recurrence(Complex64::new(t2_re, t2_im), hbar, n_max).map_err(fail)?;
        out!(out, boxed(GlLattice(s)));
        Ok(())
    })
}

/// # Safety
/// `state` must come from a `gl_lattice_*` constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_free(state: *mut GlLattice) {
    free(state)
}

/// Number of sites, `n_max + 1`.
#[no_mangle]
pub extern "C" fn gl_lattice_len(state: *const GlLattice, len: *mut usize) -> GlStatus {
    guard(|| {
        let s = deref!(state);
        out!(len, s.0.r_sq.len());
        Ok(())
    })
}

/// Copies `r_n^2` into `buf`; fails with `BufferTooSmall` if `cap` is short.
///
/// # Safety
/// `buf` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gl_lattice_r_sq(state: *const GlLattice, buf: *mut f64, cap: usize) -> GlStatus {
    guard(|| {
        let s = deref!(state);
        copy_out(&s.0.r_sq, buf, cap)
    })
}

#[no_mangle]
pub extern "C" fn gl_lattice_max_residual(state: *const GlLattice, residual: *mut f64) -> GlStatus {
    guard(|| {
        let s = deref!(state);
        out!(residual, s.0.max_residual());
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize) -> Result<(), GlStatus> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    if cap < src.len() {
        set_error(format!("buffer holds {cap} values, need {}", src.len()));
        return Err(GlStatus::BufferTooSmall);
    }
    std::slice::from_raw_parts_mut(buf, src.len()).copy_from_slice(src);
    Ok(())
}

/// Metropolis sample of `n` eigenvalues for the Gaussian potential with `t0 = n hbar`.
#[no_mangle]
pub extern "C" fn gl_sample_gaussian(
    t2_re: f64,
    t2_im: f64,
    n: usize,
    t0: f64,
    sweeps: usize,
    seed: u64,
    out: *mut *mut GlSample,
) -> GlStatus {
    guard(|| {
        if n == 0 {
            return Err(fail(Error::Domain("need at least one eigenvalue".into())));
        }
        let p = Potential::gaussian(Complex64::new(t2_re, t2_im), t0 / n as f64).map_err(fail)?;
        let s = mcmc::metropolis_run(&p, n, sweeps, seed).map_err(fail)?;
        out!(out, boxed(GlSample(s)));
        Ok(())
    })
}

/// # Safety
/// `sample` must come from `gl_sample_gaussian` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gl_sample_free(sample: *mut GlSample) {
    free(sample)
}

/// Final configuration; `re` and `im` need room for `n` values.
///
/// # Safety
/// `re` and `im` must each point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gl_sample_eigenvalues(sample: *const GlSample, re: *mut f64, im: *mut f64, cap: usize) -> GlStatus {
    guard(|| {
        let s = deref!(sample);
        let xs: Vec<f64> = s.0.eigenvalues.iter().map(|z| z.re).collect();
        let ys: Vec<f64> = s.0.eigenvalues.iter().map(|z| z.im).collect();
        copy_out(&xs, re, cap)?;
        copy_out(&ys, im, cap)
    })
}

#[no_mangle]
pub extern "C" fn gl_sample_stats(sample: *const GlSample, acceptance: *mut f64, quadrupole: *mut f64) -> GlStatus {
    guard(|| {
        let s = deref!(sample);
        out!(acceptance, s.0.acceptance_rate);
        out!(quadrupole, s.0.quadrupole());
        Ok(())
    })
}
