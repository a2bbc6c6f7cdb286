//! C ABI for building soliton surfaces.
//!
//! Every function returns a [`SolitonStatus`]; on failure the message is
//! available from [`soliton_last_error`] on the same thread. Objects are
//! opaque and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use soliton_core::cli::{build_geometry, build_surface};
use soliton_core::config::RunConfig;
use soliton_core::frame::SurfaceGrid;
use soliton_core::geometry::CurvatureField;
use soliton_core::verify::{self, Suite};
use soliton_core::{decompose, killing, mesh, Error, Mat2};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolitonStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Pole = 3,
    NotClosed = 4,
    Numeric = 5,
    Io = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolitonSuite {
    Algebra = 0,
    Zcc = 1,
    Symmetry = 2,
    Frame = 3,
    Geometry = 4,
    All = 5,
}

pub struct Config(RunConfig);

pub struct Surface {
    grid: SurfaceGrid,
    kept: Vec<usize>,
}

pub struct Geometry {
    field: CurvatureField,
    kept: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> SolitonStatus {
    match err {
        Error::PoleEncountered(_) | Error::FrameOverflow { .. } | Error::StepSizeUnderflow { .. } => SolitonStatus::Pole,
        Error::NonClosedForm { .. } | Error::AsymmetricMixedDerivatives(_) => SolitonStatus::NotClosed,
        Error::Io(_) => SolitonStatus::Io,
        Error::NotTraceless(_)
        | Error::NonRealComponents(_)
        | Error::SingularMatrix(_)
        | Error::IsotropicNormal
        | Error::DegenerateTangents
        | Error::DegenerateMetric(_) => SolitonStatus::Numeric,
        _ => SolitonStatus::InvalidInput,
    }
}

/// Runs `f`, recording any error or panic.
fn guard<F: FnOnce() -> Result<(), (SolitonStatus, String)>>(f: F) -> SolitonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SolitonStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            SolitonStatus::Panic
        }
    }
}

fn lift(e: Error) -> (SolitonStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SolitonStatus, String) {
    (SolitonStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_mat(p: *const f64) -> Result<Mat2, (SolitonStatus, String)> {
    if p.is_null() {
        return Err(null("matrix"));
    }
    let v = std::slice::from_raw_parts(p, 4);
    Ok(Mat2::real(v[0], v[1], v[2], v[3]))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SolitonStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (SolitonStatus::InvalidInput, format!("{what} is not UTF-8")))
}

/// Message for the last failed call on this thread ("" after a success).
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn soliton_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Killing form ½ tr(XY) of two real 2×2 matrices given row-major.
///
/// # Safety
/// `x` and `y` point to 4 doubles, `out` to one.
#[no_mangle]
pub unsafe extern "C" fn soliton_killing(x: *const f64, y: *const f64, out: *mut f64) -> SolitonStatus {
    guard(|| {
        let (x, y) = (read_mat(x)?, read_mat(y)?);
        if out.is_null() {
            return Err(null("out"));
        }
        *out = killing(&x, &y).map_err(lift)?;
        Ok(())
    })
}

/// Components (c1, c2, c3) of a traceless real matrix in the e1, e2, e3 basis.
///
/// # Safety
/// `x` points to 4 doubles, `out` to 3.
#[no_mangle]
pub unsafe extern "C" fn soliton_decompose(x: *const f64, out: *mut f64) -> SolitonStatus {
    guard(|| {
        let x = read_mat(x)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = decompose(&x).map_err(lift)?.as_array();
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&v);
        Ok(())
    })
}

/// Parses a TOML run configuration.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn soliton_config_parse(text: *const c_char, out: *mut *mut Config) -> SolitonStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = RunConfig::parse(text).map_err(lift)?;
        *out = Box::into_raw(Box::new(Config(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` is null or came from [`soliton_config_parse`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn soliton_config_free(cfg: *mut Config) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Builds the configured surface.
///
/// # Safety
/// `cfg` is a live config; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn soliton_surface_build(cfg: *const Config, out: *mut *mut Surface) -> SolitonStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = build_surface(&cfg.0).map_err(lift)?;
        let kept = (0..grid.nodes.len()).filter(|k| grid.nodes[*k].is_some()).collect();
        *out = Box::into_raw(Box::new(Surface { grid, kept }));
        Ok(())
    })
}

/// Number of surface nodes (grid nodes outside the exclusion bands).
///
/// # Safety
/// `s` is null or a live surface.
#[no_mangle]
pub unsafe extern "C" fn soliton_surface_len(s: *const Surface) -> usize {
    s.as_ref().map_or(0, |s| s.kept.len())
}

/// Node `k` as (t, lambda, F1, F2, F3), row-major over the grid.
///
/// # Safety
/// `s` is a live surface; `out` points to 5 doubles.
#[no_mangle]
pub unsafe extern "C" fn soliton_surface_node(s: *const Surface, k: usize, out: *mut f64) -> SolitonStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("surface"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let idx = *s.kept.get(k).ok_or((SolitonStatus::OutOfRange, format!("node {k} of {}", s.kept.len())))?;
        let n = s.grid.nodes[idx].as_ref().unwrap();
        let nl = s.grid.spec.n_lambda;
        let row = [s.grid.t[idx / nl], s.grid.lambda[idx % nl], n.f.c1, n.f.c2, n.f.c3];
        std::slice::from_raw_parts_mut(out, 5).copy_from_slice(&row);
        Ok(())
    })
}

/// Writes the surface as an OBJ mesh.
///
/// # Safety
/// `s` is a live surface; `path` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn soliton_surface_write_obj(s: *const Surface, path: *const c_char) -> SolitonStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("surface"))?;
        let path = read_str(path, "path")?;
        let file = std::fs::File::create(Path::new(path)).map_err(|e| lift(e.into()))?;
        mesh::write_obj(&s.grid, std::io::BufWriter::new(file)).map_err(lift)
    })
}

/// # Safety
/// `s` is null or came from [`soliton_surface_build`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn soliton_surface_free(s: *mut Surface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Fundamental forms and curvatures on the configured grid.
///
/// # Safety
/// `cfg` is a live config; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn soliton_geometry_build(cfg: *const Config, out: *mut *mut Geometry) -> SolitonStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let field = build_geometry(&cfg.0).map_err(lift)?;
        let kept = (0..field.nodes.len()).filter(|k| field.nodes[*k].is_some()).collect();
        *out = Box::into_raw(Box::new(Geometry { field, kept }));
        Ok(())
    })
}

/// # Safety
/// `g` is null or a live geometry.
#[no_mangle]
pub unsafe extern "C" fn soliton_geometry_len(g: *const Geometry) -> usize {
    g.as_ref().map_or(0, |g| g.kept.len())
}

/// Node `k` as (t, lambda, g11, g12, g22, det_g, K, H); K and H are NaN
/// where undefined.
///
/// # Safety
/// `g` is a live geometry; `out` points to 8 doubles.
#[no_mangle]
pub unsafe extern "C" fn soliton_geometry_node(g: *const Geometry, k: usize, out: *mut f64) -> SolitonStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("geometry"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let idx = *g.kept.get(k).ok_or((SolitonStatus::OutOfRange, format!("node {k} of {}", g.kept.len())))?;
        let n = g.field.nodes[idx].as_ref().unwrap();
        let nl = g.field.spec.n_lambda;
        let f = &n.forms;
        let row = [
            g.field.t[idx / nl],
            g.field.lambda[idx % nl],
            f.g11,
            f.g12,
            f.g22,
            f.det_g,
            n.k.unwrap_or(f64::NAN),
            n.h.unwrap_or(f64::NAN),
        ];
        std::slice::from_raw_parts_mut(out, 8).copy_from_slice(&row);
        Ok(())
    })
}

/// # Safety
/// `g` is null or came from [`soliton_geometry_build`] and is not used again.
#[no_mangle]
pub unsafe extern "C" fn soliton_geometry_free(g: *mut Geometry) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Runs a check suite; `failures` receives the number of failed checks.
///
/// # Safety
/// `failures` points to a writable size_t.
#[no_mangle]
pub unsafe extern "C" fn soliton_verify(suite: SolitonSuite, failures: *mut usize) -> SolitonStatus {
    guard(|| {
        if failures.is_null() {
            return Err(null("failures"));
        }
        let suite = match suite {
            SolitonSuite::Algebra => Suite::Algebra,
            SolitonSuite::Zcc => Suite::Zcc,
            SolitonSuite::Symmetry => Suite::Symmetry,
            SolitonSuite::Frame => Suite::Frame,
            SolitonSuite::Geometry => Suite::Geometry,
            SolitonSuite::All => Suite::All,
        };
        *failures = verify::run(suite).iter().filter(|c| !c.passed()).count();
        Ok(())
    })
}
