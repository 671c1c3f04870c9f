use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use kerr_shadow::observer::named_observer;
use kerr_shadow::observer::ObserverKind;
use kerr_shadow::shadow::shadow_curve;
use kerr_shadow::KerrParams;
use kerr_shadow_ffi::*;

fn params(a: f64) -> *mut KsParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ks_params_new(a, &mut p) }, KsStatus::Ok);
    p
}

fn last_error() -> String {
    let m = ks_last_error_message();
    assert!(!m.is_null());
    unsafe { CStr::from_ptr(m) }.to_str().unwrap().to_string()
}

#[test]
fn invalid_spin_sets_status_and_message() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ks_params_new(1.5, &mut p) }, KsStatus::InvalidSpin);
    assert!(p.is_null());
    assert!(last_error().contains("1.5"));
    let name = unsafe { CStr::from_ptr(ks_status_name(KsStatus::InvalidSpin)) };
    assert_eq!(name.to_str().unwrap(), "invalid spin");
}

#[test]
fn null_handles_are_rejected_not_dereferenced() {
    let mut x = 0.0;
    assert_eq!(unsafe { ks_params_horizon(ptr::null(), &mut x) }, KsStatus::NullPointer);
    let p = params(0.5);
    assert_eq!(unsafe { ks_params_horizon(p, ptr::null_mut()) }, KsStatus::NullPointer);
    assert_eq!(unsafe { ks_shadow_curve_len(ptr::null()) }, 0);
    unsafe {
        ks_params_free(ptr::null_mut());
        ks_observer_free(ptr::null_mut());
        ks_shadow_curve_free(ptr::null_mut());
        ks_image_free(ptr::null_mut());
        ks_params_free(p);
    }
}

#[test]
fn scalar_queries_match_the_library() {
    let p = params(0.97);
    let (mut r1, mut r2, mut rp) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(ks_photon_ring_radii(p, &mut r1, &mut r2), KsStatus::Ok);
        assert_eq!(ks_params_horizon(p, &mut rp), KsStatus::Ok);
    }
    let lib = KerrParams::new(0.97).unwrap();
    assert_eq!((r1, r2), kerr_shadow::bifurcation::photon_ring_radii(&lib));
    assert_eq!(rp, lib.horizon());

    let (mut lam, mut eta) = (0.0, 0.0);
    assert_eq!(unsafe { ks_critical_point(p, 3.0, &mut lam, &mut eta) }, KsStatus::Ok);
    let c = kerr_shadow::bifurcation::sigma_r(3.0, &lib).unwrap();
    assert_eq!((lam, eta), (c.lambda, c.eta));
    assert_eq!(unsafe { ks_critical_point(p, 10.0, &mut lam, &mut eta) }, KsStatus::Domain);

    let mut kind = KsTrajectoryKind::Forbidden;
    let mut vortical = true;
    assert_eq!(unsafe { ks_classify(p, 0.0, 5.0, 1000.0, &mut kind, &mut vortical) }, KsStatus::Ok);
    assert_eq!(kind, KsTrajectoryKind::HorizonInfinity);
    assert!(!vortical);
    unsafe { ks_params_free(p) };
}

#[test]
fn observer_preconditions_map_to_distinct_codes() {
    let p = params(0.98);
    let mut o = ptr::null_mut();
    let (mut lo, mut hi) = (0.0, 0.0);
    unsafe {
        assert_eq!(ks_omega_bounds(p, 5.0, 1.2, &mut lo, &mut hi), KsStatus::Ok);
        assert_eq!(ks_observer_new(p, 5.0, 1.2, hi + 0.1, 0.0, &mut o), KsStatus::TimelikeViolation);
        assert_eq!(ks_observer_new(p, 1.0, 1.2, 0.0, 0.0, &mut o), KsStatus::Domain);
        assert_eq!(
            ks_observer_named(p, KsObserverKind::Static, 1.9, std::f64::consts::FRAC_PI_2, &mut o),
            KsStatus::ErgosphereViolation
        );
        assert!(o.is_null());
        assert_eq!(ks_observer_named(p, KsObserverKind::Carter, 5.0, 1.2, &mut o), KsStatus::Ok);
        let mut w = 0.0;
        assert_eq!(ks_observer_omega(o, &mut w), KsStatus::Ok);
        assert_eq!(w, 0.98 / (25.0 + 0.98 * 0.98));
        let mut u0 = 0.0;
        assert_eq!(ks_observer_u0(o, &mut u0), KsStatus::Ok);
        assert!(u0 > 1.0);
        ks_observer_free(o);
        ks_params_free(p);
    }
}

#[test]
fn shadow_curve_samples_match_the_library() {
    let p = params(0.98);
    let mut o = ptr::null_mut();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(ks_observer_named(p, KsObserverKind::Zamo, 6.0, 1.0, &mut o), KsStatus::Ok);
        assert_eq!(ks_shadow_curve_new(o, 64, &mut c), KsStatus::Ok);
    }
    let lib_params = KerrParams::new(0.98).unwrap();
    let obs = named_observer(ObserverKind::Zamo, 6.0, 1.0, &lib_params).unwrap();
    let lib = shadow_curve(&obs, &lib_params, 64).unwrap();
    let n = unsafe { ks_shadow_curve_len(c) };
    assert_eq!(n, lib.samples.len());
    for (i, s) in lib.samples.iter().enumerate() {
        let mut got = KsShadowSample::default();
        assert_eq!(unsafe { ks_shadow_curve_sample(c, i, &mut got) }, KsStatus::Ok);
        assert_eq!((got.r_c, got.alpha, got.beta, got.x, got.y), (s.r_c, s.alpha, s.beta, s.x, s.y));
        assert_eq!(got.case_tag, s.case.tag());
    }
    let mut got = KsShadowSample::default();
    assert_eq!(unsafe { ks_shadow_curve_sample(c, n, &mut got) }, KsStatus::OutOfRange);
    unsafe {
        ks_shadow_curve_free(c);
        ks_observer_free(o);
        ks_params_free(p);
    }
}

#[test]
fn small_spin_shadow_is_refused() {
    let p = params(0.0);
    let mut o = ptr::null_mut();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(ks_observer_new(p, 5.0, 1.5, 0.0, 0.0, &mut o), KsStatus::Ok);
        assert_eq!(ks_shadow_curve_new(o, 16, &mut c), KsStatus::SpinTooSmall);
        assert!(c.is_null());
        ks_observer_free(o);
        ks_params_free(p);
    }
}

#[test]
fn render_exposes_pixels_and_writes_ppm() {
    let p = params(0.98);
    let mut o = ptr::null_mut();
    let mut img = ptr::null_mut();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.ppm");
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(ks_observer_new(p, 5.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0, &mut o), KsStatus::Ok);
        assert_eq!(ks_render(o, 12, 10, 2.0, 1, false, &mut img), KsStatus::Ok);
        let (mut w, mut h, mut data) = (0, 0, ptr::null());
        assert_eq!(ks_image_pixels(img, &mut w, &mut h, &mut data), KsStatus::Ok);
        assert_eq!((w, h), (12, 10));
        let bytes = std::slice::from_raw_parts(data, 3 * w * h);
        let mut stats = KsRenderStats::default();
        assert_eq!(ks_image_stats(img, &mut stats), KsStatus::Ok);
        assert_eq!(stats.pixels, 120);
        assert!(stats.horizon > 0 && stats.escaped > 0);
        assert_eq!(stats.failed, 0);

        assert_eq!(ks_image_write_ppm(img, cpath.as_ptr()), KsStatus::Ok);
        let file = std::fs::read(&path).unwrap();
        let header = b"P6\n12 10\n255\n";
        assert_eq!(&file[..header.len()], header);
        assert_eq!(&file[header.len()..], bytes);
        ks_image_free(img);
        ks_observer_free(o);
        ks_params_free(p);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn exported_functions() -> Vec<String> {
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    src.lines()
        .filter_map(|l| {
            let rest = l.strip_prefix("pub unsafe extern \"C\" fn ").or_else(|| l.strip_prefix("pub extern \"C\" fn "))?;
            Some(rest.split('(').next().unwrap().to_string())
        })
        .collect()
}

#[test]
fn header_declares_every_exported_function() {
    let header = std::fs::read_to_string(crate_dir().join("include/kerr_shadow.h")).unwrap();
    let fns = exported_functions();
    assert!(fns.len() >= 20, "{fns:?}");
    for f in fns {
        assert!(header.contains(&format!(" {f}(")) || header.contains(&format!("*{f}(")), "{f} missing from header");
    }
    for t in ["typedef struct KsParams KsParams;", "typedef struct KsImage KsImage;", "KS_STATUS_OK = 0"] {
        assert!(header.contains(t), "{t}");
    }
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn header_compiles_as_c() {
    if !have_cc() {
        eprintln!("cc not found; skipping");
        return;
    }
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(crate_dir().join("include/kerr_shadow.h"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

/// The static library sits next to the test binary's parent directory.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libkerr_shadow_ffi.a");
    lib.exists().then_some(lib)
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "kerr_shadow.h"

int main(void) {
    KsParams *p = NULL;
    if (ks_params_new(2.0, &p) != KS_STATUS_INVALID_SPIN) return 10;
    if (ks_last_error_message() == NULL) return 11;
    if (ks_params_new(0.98, &p) != KS_STATUS_OK) return 12;
    KsObserver *o = NULL;
    if (ks_observer_named(p, KS_OBSERVER_KIND_ZAMO, 5.0, 1.5707963267948966, &o) != KS_STATUS_OK) return 13;
    KsShadowCurve *c = NULL;
    if (ks_shadow_curve_new(o, 32, &c) != KS_STATUS_OK) return 14;
    KsShadowSample s;
    if (ks_shadow_curve_sample(c, 0, &s) != KS_STATUS_OK) return 15;
    printf("%zu %.17g\n", ks_shadow_curve_len(c), s.x);
    ks_shadow_curve_free(c);
    ks_observer_free(o);
    ks_params_free(p);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = (have_cc()).then(static_lib).flatten() else {
        eprintln!("cc or static library not available; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include: &Path = &crate_dir().join("include");
    let out = Command::new("cc")
        .arg("-std=c99")
        .arg("-I")
        .arg(include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    let mut it = stdout.split_whitespace();
    assert_eq!(it.next(), Some("64"));

    let params = KerrParams::new(0.98).unwrap();
    let obs = named_observer(ObserverKind::Zamo, 5.0, std::f64::consts::FRAC_PI_2, &params).unwrap();
    let x0 = shadow_curve(&obs, &params, 32).unwrap().samples[0].x;
    let printed: f64 = it.next().unwrap().parse().unwrap();
    assert_eq!(printed, x0);
}
