//! C interface to `kkgreen`.
//!
//! Every function returns a [`KkgStatus`]. On failure a message describing
//! the error is kept per thread and can be read with [`kkg_last_error`].
//! Objects are passed as opaque handles that the caller frees with the
//! matching `*_free` function. Points are `const double[3]`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use kkgreen::integral_solver::{DomainGrid, GreenField, GreenSolver, SolverConfig, SolverMethod};
use kkgreen::permittivity::{analyticity_check, kk_residual, log_grid, DispersionModel, OscillatorSign, PermittivityModel, Rectangle, Region, Shape, SpatialProfile};
use kkgreen::scenario::{emit_reports, load_scenario, parse_scenario, run, OutputFormat};
use kkgreen::sumrule::noise_spectrum;
use kkgreen::{Complex64, Error, Units, Vec3};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KkgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidModel = 3,
    LowerHalfPlane = 4,
    Singular = 5,
    NotConverged = 6,
    ResolutionCap = 7,
    Parse = 8,
    Validation = 9,
    Io = 10,
    ChecksFailed = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KkgComplex {
    pub re: f64,
    pub im: f64,
}

/// One Lorentz oscillator. `sign` is +1 for an absorbing and -1 for an
/// amplifying medium.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct KkgOscillator {
    pub omega_t: f64,
    pub omega_p: f64,
    pub gamma: f64,
    pub sign: i32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KkgUnits {
    pub c: f64,
    pub hbar: f64,
    pub eps0: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KkgMethod {
    Auto = 0,
    Born = 1,
    Direct = 2,
}

/// A 3x3 complex tensor, row-major.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KkgTensor {
    pub re: [[f64; 3]; 3],
    pub im: [[f64; 3]; 3],
}

/// Noise-current spectrum at one point and frequency.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KkgNoise {
    pub eps_imag: f64,
    pub commutator_density: f64,
    pub symmetrized_density: f64,
    pub gain: i32,
    pub sign_coherent: i32,
}

/// Opaque permittivity model.
pub struct KkgModel(PermittivityModel);

/// Opaque Green tensor sampled on the collocation grid.
pub struct KkgGreenField(GreenField);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> KkgStatus {
    match err {
        Error::LowerHalfPlane { .. } => KkgStatus::LowerHalfPlane,
        Error::InvalidModel(_) | Error::UnderResolvedInterface { .. } => KkgStatus::InvalidModel,
        Error::Singular => KkgStatus::Singular,
        Error::BornDivergent { .. } | Error::BornStalled { .. } | Error::GridTooCoarse { .. } => KkgStatus::NotConverged,
        Error::ResolutionCap { .. } => KkgStatus::ResolutionCap,
        Error::Parse { .. } | Error::Json(_) => KkgStatus::Parse,
        Error::Validation(_) => KkgStatus::Validation,
        Error::Io(_) => KkgStatus::Io,
        Error::ZeroFrequency | Error::CoincidentPoints | Error::InvalidGrid(_) | Error::InvalidArgument(_) => KkgStatus::InvalidArgument,
    }
}

struct Fail(KkgStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(KkgStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KkgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KkgStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            KkgStatus::Panic
        }
    }
}

unsafe fn point(p: *const f64, what: &str) -> Result<Vec3, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok([s[0], s[1], s[2]])
}

unsafe fn model_ref<'a>(m: *const KkgModel) -> Result<&'a PermittivityModel, Fail> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("model"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(KkgStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn oscillators(osc: *const KkgOscillator, n: usize) -> Result<Vec<DispersionModel>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if osc.is_null() {
        return Err(null("oscillators"));
    }
    std::slice::from_raw_parts(osc, n)
        .iter()
        .map(|o| Ok(DispersionModel::new(o.omega_t, o.omega_p, o.gamma, OscillatorSign::from_int(o.sign)?)?))
        .collect()
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

impl From<KkgUnits> for Units {
    fn from(u: KkgUnits) -> Self {
        Units { c: u.c, hbar: u.hbar, eps0: u.eps0 }
    }
}

impl From<Units> for KkgUnits {
    fn from(u: Units) -> Self {
        KkgUnits { c: u.c, hbar: u.hbar, eps0: u.eps0 }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kkg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn kkg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn kkg_units_si() -> KkgUnits {
    Units::SI.into()
}

#[no_mangle]
pub extern "C" fn kkg_units_natural() -> KkgUnits {
    Units::NATURAL.into()
}

/// Empty space.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kkg_model_vacuum(out: *mut *mut KkgModel) -> KkgStatus {
    guard(|| write(out, boxed(KkgModel(PermittivityModel::vacuum())), "out"))
}

/// All of space filled with the sum of `n` oscillators.
///
/// # Safety
/// `osc` must point to `n` oscillators and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kkg_model_homogeneous(osc: *const KkgOscillator, n: usize, out: *mut *mut KkgModel) -> KkgStatus {
    guard(|| {
        let models = oscillators(osc, n)?;
        let m = PermittivityModel::homogeneous(models)?;
        write(out, boxed(KkgModel(m)), "out")
    })
}

/// A ball of the given oscillators in vacuum, with the interface smoothed
/// over `mollify`.
///
/// # Safety
/// `osc` must point to `n` oscillators, `center` to three doubles and `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn kkg_model_ball(osc: *const KkgOscillator, n: usize, center: *const f64, radius: f64, mollify: f64, out: *mut *mut KkgModel) -> KkgStatus {
    guard(|| {
        let models = oscillators(osc, n)?;
        let center = point(center, "center")?;
        let region = Region::new(Shape::Ball { center, radius }, (0..models.len()).collect());
        let m = PermittivityModel::new(models, SpatialProfile::new(Vec::new(), vec![region], mollify))?;
        write(out, boxed(KkgModel(m)), "out")
    })
}

/// The model described by a scenario document (JSON text).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kkg_model_from_scenario(json: *const c_char, out: *mut *mut KkgModel) -> KkgStatus {
    guard(|| {
        let loaded = parse_scenario(text(json, "json")?)?;
        let m = loaded.scenario.build_model()?;
        write(out, boxed(KkgModel(m)), "out")
    })
}

/// # Safety
/// `model` must come from a `kkg_model_*` constructor or be NULL.
#[no_mangle]
pub unsafe extern "C" fn kkg_model_free(model: *mut KkgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `ε(r, ω)` for `Im ω ≥ 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kkg_model_eval(model: *const KkgModel, r: *const f64, omega: KkgComplex, out: *mut KkgComplex) -> KkgStatus {
    guard(|| {
        let eps = model_ref(model)?.eval(point(r, "r")?, Complex64::new(omega.re, omega.im))?;
        write(out, KkgComplex { re: eps.re, im: eps.im }, "out")
    })
}

/// Relative Kramers-Kronig residual at `r` on a log grid of `nodes`
/// frequencies spanning `[omega_min, omega_max]`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kkg_kk_residual(model: *const KkgModel, r: *const f64, omega_min: f64, omega_max: f64, nodes: usize, out: *mut f64) -> KkgStatus {
    guard(|| {
        let model = model_ref(model)?;
        let r = point(r, "r")?;
        if !(omega_min > 0.0 && omega_max > omega_min) {
            return Err(Fail(KkgStatus::InvalidArgument, "need 0 < omega_min < omega_max".into()));
        }
        let grid = log_grid(omega_min, omega_max, nodes);
        write(out, kk_residual(model, r, &grid)?, "out")
    })
}

/// Normalized contour integral of `ε − 1` around the rectangle
/// `[re_lo, re_hi] × [im_lo, im_hi]` in the upper half-plane.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kkg_analyticity(model: *const KkgModel, r: *const f64, re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64, nodes: usize, out: *mut f64) -> KkgStatus {
    guard(|| {
        let model = model_ref(model)?;
        let rect = Rectangle::new((re_lo, re_hi), (im_lo, im_hi))?;
        write(out, analyticity_check(model, point(r, "r")?, &rect, nodes)?, "out")
    })
}

/// Solve for `G(·, s, ω)` on an `n³` grid of cube edge `edge` centred at
/// `center`. The source is nudged off the nearest node when it sits on one.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kkg_solve_g(
    model: *const KkgModel,
    center: *const f64,
    edge: f64,
    n: usize,
    omega: KkgComplex,
    source: *const f64,
    method: KkgMethod,
    units: KkgUnits,
    out: *mut *mut KkgGreenField,
) -> KkgStatus {
    guard(|| {
        let model = model_ref(model)?;
        let grid = DomainGrid::new(point(center, "center")?, edge, n)?;
        let method = match method {
            KkgMethod::Auto => SolverMethod::Auto,
            KkgMethod::Born => SolverMethod::Born,
            KkgMethod::Direct => SolverMethod::Direct,
        };
        let s = grid.place_source(point(source, "source")?);
        let config = SolverConfig::default().with_method(method).with_units(units.into());
        let solver = GreenSolver::new(model, &grid, Complex64::new(omega.re, omega.im), config, s)?;
        let (field, _) = solver.solve_g(s)?;
        write(out, boxed(KkgGreenField(field)), "out")
    })
}

/// Number of grid nodes, 0 for NULL.
///
/// # Safety
/// `field` must come from [`kkg_solve_g`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn kkg_green_field_len(field: *const KkgGreenField) -> usize {
    field.as_ref().map_or(0, |f| f.0.values.len())
}

/// Source position actually used by the solve.
///
/// # Safety
/// Pointers must be valid; `source_out` holds three doubles.
#[no_mangle]
pub unsafe extern "C" fn kkg_green_field_source(field: *const KkgGreenField, source_out: *mut f64) -> KkgStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        if source_out.is_null() {
            return Err(null("source_out"));
        }
        std::slice::from_raw_parts_mut(source_out, 3).copy_from_slice(&f.0.source);
        Ok(())
    })
}

/// Position and tensor value at node `index`. Either output may be NULL.
///
/// # Safety
/// Pointers must be valid; `point_out` holds three doubles.
#[no_mangle]
pub unsafe extern "C" fn kkg_green_field_node(field: *const KkgGreenField, index: usize, point_out: *mut f64, tensor_out: *mut KkgTensor) -> KkgStatus {
    guard(|| {
        let f = &field.as_ref().ok_or_else(|| null("field"))?.0;
        let t = f.values.get(index).ok_or_else(|| Fail(KkgStatus::InvalidArgument, format!("node {index} out of range ({} nodes)", f.values.len())))?;
        if !point_out.is_null() {
            std::slice::from_raw_parts_mut(point_out, 3).copy_from_slice(&f.grid.point(index));
        }
        if !tensor_out.is_null() {
            let mut out = KkgTensor::default();
            for i in 0..3 {
                for j in 0..3 {
                    out.re[i][j] = t.0[i][j].re;
                    out.im[i][j] = t.0[i][j].im;
                }
            }
            tensor_out.write(out);
        }
        Ok(())
    })
}

/// # Safety
/// `field` must come from [`kkg_solve_g`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn kkg_green_field_free(field: *mut KkgGreenField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Noise-current spectrum at `r` for real `omega > 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kkg_noise_spectrum(model: *const KkgModel, r: *const f64, omega: f64, units: KkgUnits, out: *mut KkgNoise) -> KkgStatus {
    guard(|| {
        let s = noise_spectrum(model_ref(model)?, point(r, "r")?, omega, &units.into())?;
        let value = KkgNoise {
            eps_imag: s.eps_imag,
            commutator_density: s.commutator_density,
            symmetrized_density: s.symmetrized_density,
            gain: s.gain as i32,
            sign_coherent: s.is_sign_coherent() as i32,
        };
        write(out, value, "out")
    })
}

/// Run a scenario file and write JSON and CSV reports into
/// `out_dir/<scenario name>`. Returns `ChecksFailed` when the run completes
/// but some check fails; `passed` (optional) receives 1 or 0.
///
/// # Safety
/// Strings must be NUL-terminated; `passed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn kkg_run_scenario(path: *const c_char, out_dir: *const c_char, passed: *mut i32) -> KkgStatus {
    guard(|| {
        let loaded = load_scenario(Path::new(text(path, "path")?))?;
        let outcome = run(&loaded);
        let dir = Path::new(text(out_dir, "out_dir")?).join(&loaded.scenario.name);
        emit_reports(&outcome, &dir, OutputFormat::Both)?;
        let ok = outcome.passed();
        if !passed.is_null() {
            passed.write(ok as i32);
        }
        if ok {
            Ok(())
        } else {
            let failed: Vec<_> = outcome.reports.iter().filter(|r| !r.passed).map(|r| r.check.clone()).collect();
            Err(Fail(KkgStatus::ChecksFailed, format!("failed checks: {}", failed.join(", "))))
        }
    })
}
