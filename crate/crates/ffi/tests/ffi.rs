use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use kkgreen_ffi::*;

const HOST: KkgOscillator = KkgOscillator { omega_t: 1.0, omega_p: 0.3, gamma: 0.1, sign: 1 };
const ORIGIN: [f64; 3] = [0.0, 0.0, 0.0];

fn last_error() -> String {
    let p = kkg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn homogeneous() -> *mut KkgModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kkg_model_homogeneous(&HOST, 1, &mut m) }, KkgStatus::Ok);
    m
}

#[test]
fn eval_matches_lorentz_form() {
    let m = homogeneous();
    let mut eps = KkgComplex::default();
    let w = KkgComplex { re: 0.7, im: 0.2 };
    assert_eq!(unsafe { kkg_model_eval(m, ORIGIN.as_ptr(), w, &mut eps) }, KkgStatus::Ok);
    let w = kkgreen::Complex64::new(0.7, 0.2);
    let want = 1.0 + 0.09 / (1.0 - w * w - kkgreen::Complex64::i() * 0.1 * w);
    assert!((eps.re - want.re).abs() < 1e-14 && (eps.im - want.im).abs() < 1e-14);
    assert!(kkg_last_error().is_null());
    unsafe { kkg_model_free(m) };
}

#[test]
fn errors_carry_status_and_message() {
    let m = homogeneous();
    let mut eps = KkgComplex::default();
    let st = unsafe { kkg_model_eval(m, ORIGIN.as_ptr(), KkgComplex { re: 1.0, im: -0.5 }, &mut eps) };
    assert_eq!(st, KkgStatus::LowerHalfPlane);
    assert!(last_error().contains("lower half-plane"));

    let st = unsafe { kkg_model_eval(m, ptr::null(), KkgComplex { re: 1.0, im: 0.0 }, &mut eps) };
    assert_eq!(st, KkgStatus::NullPointer);

    let bad = KkgOscillator { gamma: -0.1, ..HOST };
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kkg_model_homogeneous(&bad, 1, &mut out) }, KkgStatus::InvalidModel);
    assert!(out.is_null());
    unsafe { kkg_model_free(m) };
}

#[test]
fn checks_through_the_c_interface() {
    let m = homogeneous();
    let mut kk = f64::NAN;
    assert_eq!(unsafe { kkg_kk_residual(m, ORIGIN.as_ptr(), 1e-3, 1e3, 2000, &mut kk) }, KkgStatus::Ok);
    assert!(kk < 1e-2, "kk residual {kk}");
    let mut a = f64::NAN;
    assert_eq!(unsafe { kkg_analyticity(m, ORIGIN.as_ptr(), 0.1, 3.0, 0.2, 2.0, 400, &mut a) }, KkgStatus::Ok);
    assert!(a < 1e-10, "contour integral {a}");
    let mut noise = KkgNoise::default();
    assert_eq!(unsafe { kkg_noise_spectrum(m, ORIGIN.as_ptr(), 1.0, kkg_units_natural(), &mut noise) }, KkgStatus::Ok);
    assert_eq!(noise.gain, 0);
    assert_eq!(noise.sign_coherent, 1);
    assert!(noise.commutator_density > 0.0);
    unsafe { kkg_model_free(m) };
}

#[test]
fn vacuum_solve_reproduces_free_field() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kkg_model_vacuum(&mut m) }, KkgStatus::Ok);
    let mut f = ptr::null_mut();
    let src = [0.9, 0.9, 0.9];
    let st = unsafe { kkg_solve_g(m, ORIGIN.as_ptr(), 1.0, 4, KkgComplex { re: 1.0, im: 0.0 }, src.as_ptr(), KkgMethod::Auto, kkg_units_natural(), &mut f) };
    assert_eq!(st, KkgStatus::Ok);
    assert_eq!(unsafe { kkg_green_field_len(f) }, 64);
    let mut s = [0.0; 3];
    let mut p = [0.0; 3];
    let mut t = KkgTensor::default();
    assert_eq!(unsafe { kkg_green_field_source(f, s.as_mut_ptr()) }, KkgStatus::Ok);
    assert_eq!(unsafe { kkg_green_field_node(f, 5, p.as_mut_ptr(), &mut t) }, KkgStatus::Ok);
    let model = kkgreen::permittivity::PermittivityModel::vacuum();
    let wn = kkgreen::green_free::WaveNumbers::new(kkgreen::Complex64::new(1.0, 0.0), kkgreen::Complex64::new(1.0, 0.0), kkgreen::Units::NATURAL);
    let want = kkgreen::green_free::free_dyadic_g0(&model, p, s, &wn).unwrap().value;
    for i in 0..3 {
        for j in 0..3 {
            assert!((t.re[i][j] - want.0[i][j].re).abs() < 1e-12 && (t.im[i][j] - want.0[i][j].im).abs() < 1e-12);
        }
    }
    assert_eq!(unsafe { kkg_green_field_node(f, 64, p.as_mut_ptr(), &mut t) }, KkgStatus::InvalidArgument);
    unsafe {
        kkg_green_field_free(f);
        kkg_model_free(m);
    }
}

#[test]
fn resolution_cap_is_reported() {
    let m = homogeneous();
    let mut f = ptr::null_mut();
    let src = [0.3, 0.2, 0.1];
    let st = unsafe { kkg_solve_g(m, ORIGIN.as_ptr(), 1.0, 64, KkgComplex { re: 1.0, im: 0.0 }, src.as_ptr(), KkgMethod::Direct, kkg_units_natural(), &mut f) };
    assert_eq!(st, KkgStatus::ResolutionCap);
    assert!(f.is_null());
    unsafe { kkg_model_free(m) };
}

#[test]
fn model_from_scenario_text() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios/dielectric-ball.json");
    let json = CString::new(std::fs::read_to_string(path).unwrap()).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kkg_model_from_scenario(json.as_ptr(), &mut m) }, KkgStatus::Ok);
    let mut eps = KkgComplex::default();
    assert_eq!(unsafe { kkg_model_eval(m, ORIGIN.as_ptr(), KkgComplex { re: 1.0, im: 0.0 }, &mut eps) }, KkgStatus::Ok);
    assert!(eps.im > 0.0);
    unsafe { kkg_model_free(m) };

    let broken = CString::new("{\"schema\": ").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kkg_model_from_scenario(broken.as_ptr(), &mut m) }, KkgStatus::Parse);
    assert!(last_error().contains("line"));
}

#[test]
fn header_declares_every_export() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(dir.join("include/kkgreen.h")).unwrap();
    let names: Vec<&str> = src.lines().filter_map(|l| l.split("extern \"C\" fn ").nth(1)).map(|r| r.split('(').next().unwrap()).collect();
    assert!(names.len() >= 15);
    for name in names {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libkkgreen_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
