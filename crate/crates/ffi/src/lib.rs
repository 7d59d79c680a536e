//! C ABI over the kerrmodes solvers.
//!
//! Objects cross the boundary as opaque handles made by the constructor
//! functions and released with the matching `km_*_free`. Every fallible
//! call returns a `KmStatus`; on failure `km_last_error` gives a message
//! that stays valid until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kerrmodes::asymptotics::ExpansionSetup;
use kerrmodes::fd::{continuation, geometric_schedule, BifurcationBranch, ContinuationOptions, Grid1D};
use kerrmodes::materials::{LayeredGeometry, MaterialLayer, Susceptibility};
use kerrmodes::roots::Region;
use kerrmodes::spectrum2::{find_eigenvalues2, EigsOptions};
use kerrmodes::spectrum3::find_eigenvalues3;
use kerrmodes::{Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    NoConvergence = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for KmComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<KmComplex> for C64 {
    fn from(z: KmComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmModel {
    /// chi1 = -scale * plasma_frequency^2 / (omega^2 + i damping omega)
    Drude = 0,
    /// chi1 = eta
    Constant = 1,
}

/// One layer. For Drude, `scale` <= 0 selects the default 2 pi; `eta` is
/// ignored. For Constant only `eta` and `chi3` are read.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KmLayer {
    pub model: KmModel,
    pub plasma_frequency: f64,
    pub damping: f64,
    pub scale: f64,
    pub eta: KmComplex,
    pub chi3: KmComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmBranchPoint {
    pub epsilon: f64,
    pub omega: KmComplex,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub pt_defect: f64,
    pub divergence_jump: f64,
}

/// Opaque layered medium.
pub struct KmGeometry(LayeredGeometry);

/// Opaque computed branch.
pub struct KmBranch(BifurcationBranch);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KmStatus {
    match e {
        Error::InvalidParameter(_) | Error::Geometry(_) | Error::Config(_) => KmStatus::InvalidArgument,
        Error::NoConvergence { .. } => KmStatus::NoConvergence,
        _ => KmStatus::Numerical,
    }
}

fn guard<F: FnOnce() -> Result<(), KmStatus>>(f: F) -> KmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            KmStatus::Panic
        }
    }
}

fn fail(e: Error) -> KmStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> KmStatus {
    set_error(&format!("{what} is null"));
    KmStatus::NullPointer
}

fn layer(l: &KmLayer) -> MaterialLayer {
    let chi1 = match l.model {
        KmModel::Drude => Susceptibility::Drude {
            plasma_frequency: l.plasma_frequency,
            damping: l.damping,
            scale: if l.scale > 0.0 { l.scale } else { std::f64::consts::TAU },
        },
        KmModel::Constant => Susceptibility::Constant { eta: l.eta.into() },
    };
    MaterialLayer { chi1, chi3: l.chi3.into() }
}

/// Message of the last failure on this thread; empty if none.
#[no_mangle]
pub extern "C" fn km_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn km_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn new_geometry(g: LayeredGeometry, out: *mut *mut KmGeometry) -> Result<(), KmStatus> {
    g.validate().map_err(fail)?;
    unsafe { *out = Box::into_raw(Box::new(KmGeometry(g))) };
    Ok(())
}

/// Two half-spaces meeting at x = 0.
///
/// # Safety
/// `left`, `right` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn km_geometry_two_layer(
    left: *const KmLayer,
    right: *const KmLayer,
    out: *mut *mut KmGeometry,
) -> KmStatus {
    guard(|| {
        if left.is_null() || right.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        new_geometry(LayeredGeometry::two_layer(layer(&*left), layer(&*right)), out)
    })
}

/// Core layer on (0, d) between two half-spaces.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn km_geometry_sandwich(
    left: *const KmLayer,
    core: *const KmLayer,
    right: *const KmLayer,
    d: f64,
    out: *mut *mut KmGeometry,
) -> KmStatus {
    guard(|| {
        if left.is_null() || core.is_null() || right.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        if !(d > 0.0 && d.is_finite()) {
            set_error(&format!("width d must be positive, got {d}"));
            return Err(KmStatus::InvalidArgument);
        }
        new_geometry(LayeredGeometry::sandwich(layer(&*left), layer(&*core), layer(&*right), d), out)
    })
}

/// # Safety
/// `g` must come from a km_geometry_* constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn km_geometry_free(g: *mut KmGeometry) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

fn region(r: &KmRegion) -> Result<Region, KmStatus> {
    Region::new(r.re_min, r.re_max, r.im_min, r.im_max).map_err(fail)
}

unsafe fn write_roots(roots: &[C64], out: *mut KmComplex, cap: usize, count: *mut usize) -> Result<(), KmStatus> {
    *count = roots.len();
    if roots.len() > cap {
        set_error(&format!("{} eigenvalues found, buffer holds {cap}", roots.len()));
        return Err(KmStatus::BufferTooSmall);
    }
    for (i, w) in roots.iter().enumerate() {
        *out.add(i) = (*w).into();
    }
    Ok(())
}

/// Certified eigenvalues of a two-layer geometry in `region`. Writes up to
/// `cap` values to `out` and the number found to `count`; returns
/// BUFFER_TOO_SMALL (with `count` set) when `cap` is not enough.
///
/// # Safety
/// `g`, `region` and `count` must be valid; `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn km_eigs2(
    k: f64,
    g: *const KmGeometry,
    region_: *const KmRegion,
    out: *mut KmComplex,
    cap: usize,
    count: *mut usize,
) -> KmStatus {
    guard(|| {
        if g.is_null() || region_.is_null() || count.is_null() || (out.is_null() && cap > 0) {
            return Err(null("argument"));
        }
        let r = region(&*region_)?;
        let eigs = find_eigenvalues2(k, &(*g).0, &r, &EigsOptions::default()).map_err(fail)?;
        let roots: Vec<C64> = eigs.iter().map(|c| c.omega0).collect();
        write_roots(&roots, out, cap, count)
    })
}

/// Certified eigenvalues of a sandwich geometry; same buffer protocol as
/// km_eigs2.
///
/// # Safety
/// As km_eigs2.
#[no_mangle]
pub unsafe extern "C" fn km_eigs3(
    k: f64,
    g: *const KmGeometry,
    region_: *const KmRegion,
    out: *mut KmComplex,
    cap: usize,
    count: *mut usize,
) -> KmStatus {
    guard(|| {
        if g.is_null() || region_.is_null() || count.is_null() || (out.is_null() && cap > 0) {
            return Err(null("argument"));
        }
        let r = region(&*region_)?;
        let (s, d) = (*g).0.as_sandwich().map_err(fail)?;
        let eigs = find_eigenvalues3(k, &s, d, &r, &EigsOptions::default()).map_err(fail)?;
        let roots: Vec<C64> = eigs.iter().map(|p| p.omega).collect();
        write_roots(&roots, out, cap, count)
    })
}

fn expansion(k: f64, g: &LayeredGeometry, omega0: KmComplex, l: f64, n: usize) -> Result<ExpansionSetup, KmStatus> {
    let grid = Grid1D::new(l, n).map_err(fail)?;
    ExpansionSetup::new(k, g, omega0.into(), grid).map_err(fail)
}

/// First-order frequency shift nu at the two-layer eigenvalue omega0, by
/// exact integration (`nu_exact`) and by the trapezoid rule on the grid
/// (L, N) (`nu_grid`). Either output may be null.
///
/// # Safety
/// `g` must be valid; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn km_nu(
    k: f64,
    g: *const KmGeometry,
    omega0: KmComplex,
    l: f64,
    n: usize,
    nu_exact: *mut KmComplex,
    nu_grid: *mut KmComplex,
) -> KmStatus {
    guard(|| {
        if g.is_null() {
            return Err(null("geometry"));
        }
        let su = expansion(k, &(*g).0, omega0, l, n)?;
        if !nu_exact.is_null() {
            *nu_exact = su.nu_exact.nu.into();
        }
        if !nu_grid.is_null() {
            *nu_grid = su.nu_grid.nu.into();
        }
        Ok(())
    })
}

/// Continues the nonlinear branch from omega0 over `steps` geometrically
/// spaced eps in [eps_min, eps_max] on the grid (L, N). A branch that stops
/// early is still returned; check km_branch_truncated.
///
/// # Safety
/// `g` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn km_bifurcate(
    k: f64,
    g: *const KmGeometry,
    omega0: KmComplex,
    l: f64,
    n: usize,
    eps_min: f64,
    eps_max: f64,
    steps: usize,
    out: *mut *mut KmBranch,
) -> KmStatus {
    guard(|| {
        if g.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let su = expansion(k, &(*g).0, omega0, l, n)?;
        let schedule = geometric_schedule(eps_min, eps_max, steps).map_err(fail)?;
        let b = continuation(&schedule, &su.ctx, &su.data, &su.phi0_grid, &ContinuationOptions::default())
            .map_err(fail)?;
        *out = Box::into_raw(Box::new(KmBranch(b)));
        Ok(())
    })
}

/// Number of accepted points; 0 for a null handle.
///
/// # Safety
/// `b` must be a branch handle or null.
#[no_mangle]
pub unsafe extern "C" fn km_branch_len(b: *const KmBranch) -> usize {
    if b.is_null() {
        0
    } else {
        (*b).0.points.len()
    }
}

/// 1 if continuation stopped before the end of the schedule.
///
/// # Safety
/// `b` must be a branch handle or null.
#[no_mangle]
pub unsafe extern "C" fn km_branch_truncated(b: *const KmBranch) -> i32 {
    if b.is_null() {
        0
    } else {
        (*b).0.truncated() as i32
    }
}

/// # Safety
/// `b` must be a branch handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn km_branch_point(b: *const KmBranch, i: usize, out: *mut KmBranchPoint) -> KmStatus {
    guard(|| {
        if b.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let br = &(*b).0;
        let Some(p) = br.points.get(i) else {
            set_error(&format!("point {i} out of range ({} points)", br.points.len()));
            return Err(KmStatus::InvalidArgument);
        };
        *out = KmBranchPoint {
            epsilon: p.epsilon,
            omega: p.omega.into(),
            residual_norm: p.residual_norm,
            newton_iters: p.newton_iters,
            pt_defect: p.pt_defect,
            divergence_jump: p.divergence_jump,
        };
        Ok(())
    })
}

/// # Safety
/// `b` must come from km_bifurcate or be null.
#[no_mangle]
pub unsafe extern "C" fn km_branch_free(b: *mut KmBranch) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}
