use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use growthlab_ffi::*;

fn last_error() -> String {
    let p = gl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn critical_cubic_map() {
    let (mut t_c, mut r_c) = (0.0, 0.0);
    assert_eq!(gl_critical_area(3, 1.0 / 6.0, 0.0, &mut t_c, &mut r_c), GlStatus::Ok);
    assert!((t_c - 0.5).abs() < 1e-12 && (r_c - 1.0).abs() < 1e-12);

    let mut map: *mut GlMap = ptr::null_mut();
    assert_eq!(gl_map_monomial(3, 1.0 / 6.0, 0.0, t_c, &mut map), GlStatus::Ok);
    let mut cusps = 0usize;
    assert_eq!(gl_map_cusp_count(map, 1e-8, &mut cusps), GlStatus::Ok);
    assert_eq!(cusps, 3);
    let (mut x, mut y) = (0.0, 0.0);
    assert_eq!(gl_map_eval(map, 1.0, 0.0, &mut x, &mut y), GlStatus::Ok);
    assert!((x - 1.5).abs() < 1e-10 && y.abs() < 1e-12);
    unsafe { gl_map_free(map) };
}

#[test]
fn gaussian_moments() {
    let mut map: *mut GlMap = ptr::null_mut();
    assert_eq!(gl_map_gaussian(0.2, 0.0, 1.0, &mut map), GlStatus::Ok);
    let mut area = 0.0;
    assert_eq!(gl_map_area(map, &mut area), GlStatus::Ok);
    assert!((area - 1.0).abs() < 1e-12);
    let mut re = [0.0; 4];
    let mut im = [0.0; 4];
    assert_eq!(unsafe { gl_map_moments(map, 3, re.as_mut_ptr(), im.as_mut_ptr()) }, GlStatus::Ok);
    assert!((re[0] - 1.0).abs() < 1e-10);
    assert!((re[2] - 0.2).abs() < 1e-10 && re[1].abs() < 1e-12 && re[3].abs() < 1e-12);
    unsafe { gl_map_free(map) };
}

#[test]
fn errors_are_reported() {
    let mut map: *mut GlMap = ptr::null_mut();
    assert_eq!(gl_map_gaussian(0.6, 0.0, 1.0, &mut map), GlStatus::Criticality);
    assert!(map.is_null());
    assert!(last_error().contains("2|t2|"));

    assert_eq!(gl_map_area(ptr::null(), ptr::null_mut()), GlStatus::NullPointer);
    assert!(last_error().contains("null pointer"));

    let mut sol: *mut GlPainleve = ptr::null_mut();
    assert_eq!(gl_painleve_solve(-3.0, 0.0, 1e-10, &mut sol), GlStatus::Domain);
    unsafe { gl_map_free(ptr::null_mut()) };
}

#[test]
fn painleve_handle() {
    let mut sol: *mut GlPainleve = ptr::null_mut();
    assert_eq!(gl_painleve_solve(-20.0, -1.0, 1e-10, &mut sol), GlStatus::Ok);
    let (mut u, mut ud) = (0.0, 0.0);
    assert_eq!(gl_painleve_eval(sol, -10.0, &mut u, &mut ud), GlStatus::Ok);
    assert!((u - 4.471508784106565).abs() < 1e-9);
    assert_eq!(gl_painleve_eval(sol, 3.0, &mut u, &mut ud), GlStatus::Domain);
    let mut res = 1.0;
    assert_eq!(gl_painleve_residual(sol, &mut res), GlStatus::Ok);
    assert!(res < 1e-6);
    let (mut nu0, mut alpha) = (0.0, 0.0);
    assert_eq!(gl_painleve_zero(sol, &mut nu0, &mut alpha), GlStatus::NoZero);
    unsafe { gl_painleve_free(sol) };
}

#[test]
fn spectral_calls() {
    let mut re = [0.0; 3];
    let mut im = [0.0; 3];
    let mut class = GlClassification::OneReal;
    let st = unsafe { gl_branch_points(-2.0, 2.0, 0.0, re.as_mut_ptr(), im.as_mut_ptr(), &mut class) };
    assert_eq!(st, GlStatus::Ok);
    // closed jet: u'' = 2u^2 + 4nu = 0 here, so the curve is the degenerate one
    assert_eq!(class, GlClassification::Degenerate);
    assert!((re[0] + 2.0).abs() < 1e-10 && (re[1] - 1.0).abs() < 1e-10 && (re[2] - 1.0).abs() < 1e-10);

    let mut r = 0.0;
    assert_eq!(gl_compatibility_residual(-3.0, 1.0, 1.0, -6.0, 4.0, 0.2, &mut r), GlStatus::Ok);
    assert!((r - 2.0 / 3.0).abs() < 1e-14);
}

#[test]
fn lattice_buffers() {
    let mut st: *mut GlLattice = ptr::null_mut();
    assert_eq!(gl_lattice_gaussian(0.1, 0.0, 0.01, 50, &mut st), GlStatus::Ok);
    let mut len = 0usize;
    assert_eq!(gl_lattice_len(st, &mut len), GlStatus::Ok);
    assert_eq!(len, 51);
    let mut short = vec![0.0; 10];
    assert_eq!(unsafe { gl_lattice_r_sq(st, short.as_mut_ptr(), short.len()) }, GlStatus::BufferTooSmall);
    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { gl_lattice_r_sq(st, buf.as_mut_ptr(), len) }, GlStatus::Ok);
    assert_eq!(buf[0], 0.0);
    assert!(buf[50] > 0.0);
    let mut res = 1.0;
    assert_eq!(gl_lattice_max_residual(st, &mut res), GlStatus::Ok);
    assert!(res < 1e-12);
    unsafe { gl_lattice_free(st) };
}

#[test]
fn sample_is_deterministic() {
    let run = || {
        let mut s: *mut GlSample = ptr::null_mut();
        assert_eq!(gl_sample_gaussian(0.1, 0.0, 8, 1.0, 200, 9, &mut s), GlStatus::Ok);
        let mut re = vec![0.0; 8];
        let mut im = vec![0.0; 8];
        assert_eq!(unsafe { gl_sample_eigenvalues(s, re.as_mut_ptr(), im.as_mut_ptr(), 8) }, GlStatus::Ok);
        let (mut acc, mut q) = (0.0, 0.0);
        assert_eq!(gl_sample_stats(s, &mut acc, &mut q), GlStatus::Ok);
        assert!((0.0..=1.0).contains(&acc));
        unsafe { gl_sample_free(s) };
        (re, im)
    };
    assert_eq!(run(), run());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(gl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/growthlab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["gl_map_gaussian", "gl_painleve_solve", "gl_last_error_message", "GL_STATUS_OK"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("check.c");
    std::fs::write(
        &src,
        "#include \"growthlab.h\"\nint main(void) { GlMap *m = 0; GlStatus s = gl_map_gaussian(0.1, 0.0, 1.0, &m); gl_map_free(m); return s == GL_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(dir.join("include")).arg(&src).output()
    else {
        eprintln!("no C compiler available; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
