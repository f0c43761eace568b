//! C ABI for `epitaxy-bvp`.
//!
//! Results come back through out-parameters; every function returns an
//! [`EbvpStatus`]. On failure a message is available from
//! [`ebvp_last_error`] on the same thread. Trajectories and root sets are
//! opaque handles released with their `_free` functions. Strings returned
//! by the library are released with [`ebvp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use epitaxy_bvp::certificates::{self, CertificateKind};
use epitaxy_bvp::continuation::locate_fold_with;
use epitaxy_bvp::integrator::{self, ValidationReport};
use epitaxy_bvp::model::{BoundaryKind, ProblemSpec, Trajectory};
use epitaxy_bvp::shooting::{self, RootSet};
use epitaxy_bvp::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbvpStatus {
    Ok = 0,
    NullPointer = 1,
    /// Caller input outside the documented domain.
    Precondition = 2,
    /// The numerics failed (non-convergence, rejected solution, ...).
    Numerical = 3,
    IndexOutOfRange = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EbvpKind {
    Dirichlet = 0,
    Navier = 1,
}

impl From<EbvpKind> for BoundaryKind {
    fn from(k: EbvpKind) -> Self {
        match k {
            EbvpKind::Dirichlet => BoundaryKind::Dirichlet,
            EbvpKind::Navier => BoundaryKind::Navier,
        }
    }
}

/// Numerical settings for one solve. Obtain defaults from
/// [`ebvp_problem_default`] and override fields as needed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EbvpProblem {
    pub lambda: f64,
    pub kind: EbvpKind,
    pub eps: f64,
    pub step_tol: f64,
    pub slope_min: f64,
    pub slope_max: f64,
    pub grid_n: usize,
    pub scan_n: usize,
}

impl EbvpProblem {
    fn to_spec(self) -> ProblemSpec {
        let mut spec = ProblemSpec::new(self.lambda, self.kind.into());
        spec.eps = self.eps;
        spec.step_tol = self.step_tol;
        spec.slope_min = self.slope_min;
        spec.slope_max = self.slope_max;
        spec.grid_n = self.grid_n;
        spec.scan_n = self.scan_n;
        spec
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EbvpValidation {
    pub first_integral_resid: f64,
    pub representation_resid: f64,
    pub sign_violation: f64,
    pub boundary_resid: f64,
}

impl From<ValidationReport> for EbvpValidation {
    fn from(r: ValidationReport) -> Self {
        Self {
            first_integral_resid: r.first_integral_resid,
            representation_resid: r.representation_resid,
            sign_violation: r.sign_violation,
            boundary_resid: r.boundary_resid,
        }
    }
}

/// Opaque sampled solution.
pub struct EbvpTrajectory {
    inner: Trajectory,
}

/// Opaque list of shooting roots.
pub struct EbvpRootSet {
    inner: RootSet,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn fail(status: EbvpStatus, msg: &str) -> EbvpStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> EbvpStatus {
    let status = if e.is_precondition() {
        EbvpStatus::Precondition
    } else {
        EbvpStatus::Numerical
    };
    fail(status, &e.to_string())
}

fn guard(body: impl FnOnce() -> EbvpStatus) -> EbvpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == EbvpStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(EbvpStatus::Panic, "internal panic"),
    }
}

/// Message describing the most recent failure on this thread, or an empty
/// string. The pointer stays valid until the next library call on the
/// same thread.
#[no_mangle]
pub extern "C" fn ebvp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn ebvp_problem_default(lambda: f64, kind: EbvpKind) -> EbvpProblem {
    let spec = ProblemSpec::new(lambda, kind.into());
    EbvpProblem {
        lambda,
        kind,
        eps: spec.eps,
        step_tol: spec.step_tol,
        slope_min: spec.slope_min,
        slope_max: spec.slope_max,
        grid_n: spec.grid_n,
        scan_n: spec.scan_n,
    }
}

/// Integrate the shot with slope `a`. A diverged shot is still returned;
/// check [`ebvp_trajectory_diverged`].
///
/// # Safety
/// `problem` must point to a valid `EbvpProblem` and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ebvp_integrate(
    problem: *const EbvpProblem,
    a: f64,
    out: *mut *mut EbvpTrajectory,
) -> EbvpStatus {
    guard(|| {
        if problem.is_null() || out.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        let spec = (*problem).to_spec();
        match integrator::integrate(&spec, a) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(EbvpTrajectory { inner }));
                EbvpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Strip-constrained relaxation solve using the lower function that
/// matches `problem->kind`.
///
/// # Safety
/// As for [`ebvp_integrate`].
#[no_mangle]
pub unsafe extern "C" fn ebvp_monotone_solve(
    problem: *const EbvpProblem,
    out: *mut *mut EbvpTrajectory,
) -> EbvpStatus {
    guard(|| {
        if problem.is_null() || out.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        let spec = (*problem).to_spec();
        let alpha = match spec.kind {
            BoundaryKind::Dirichlet => CertificateKind::LowerDirichlet,
            BoundaryKind::Navier => CertificateKind::LowerNavier,
        };
        match certificates::truncated_monotone_solve(&spec, alpha) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(EbvpTrajectory { inner }));
                EbvpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `traj` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ebvp_trajectory_len(traj: *const EbvpTrajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        (*traj).inner.samples.len()
    }
}

/// # Safety
/// `traj` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ebvp_trajectory_diverged(traj: *const EbvpTrajectory) -> bool {
    !traj.is_null() && (*traj).inner.diverged
}

/// Copy sample `index` into `t`, `u`, `du`.
///
/// # Safety
/// `traj` must be a handle from this library; the out-pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ebvp_trajectory_get(
    traj: *const EbvpTrajectory,
    index: usize,
    t: *mut f64,
    u: *mut f64,
    du: *mut f64,
) -> EbvpStatus {
    guard(|| {
        if traj.is_null() || t.is_null() || u.is_null() || du.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        let samples = &(*traj).inner.samples;
        match samples.get(index) {
            Some(s) => {
                *t = s.t;
                *u = s.u;
                *du = s.du;
                EbvpStatus::Ok
            }
            None => fail(EbvpStatus::IndexOutOfRange, "sample index out of range"),
        }
    })
}

/// # Safety
/// `traj` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ebvp_trajectory_free(traj: *mut EbvpTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// `traj` must be a handle from this library and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ebvp_validate(traj: *const EbvpTrajectory, out: *mut EbvpValidation) -> EbvpStatus {
    guard(|| {
        if traj.is_null() || out.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        *out = integrator::validate(&(*traj).inner).into();
        EbvpStatus::Ok
    })
}

/// # Safety
/// As for [`ebvp_integrate`].
#[no_mangle]
pub unsafe extern "C" fn ebvp_find_roots(problem: *const EbvpProblem, out: *mut *mut EbvpRootSet) -> EbvpStatus {
    guard(|| {
        if problem.is_null() || out.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        match shooting::find_shooting_roots(&(*problem).to_spec()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(EbvpRootSet { inner }));
                EbvpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `roots` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ebvp_root_set_len(roots: *const EbvpRootSet) -> usize {
    if roots.is_null() {
        0
    } else {
        (*roots).inner.roots.len()
    }
}

/// Slope and residual-slope sign (`-1`, `0`, `+1`) of root `index`.
///
/// # Safety
/// `roots` must be a handle from this library; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn ebvp_root_set_get(
    roots: *const EbvpRootSet,
    index: usize,
    a: *mut f64,
    sign: *mut i8,
) -> EbvpStatus {
    guard(|| {
        if roots.is_null() || a.is_null() || sign.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        let found = &(*roots).inner.roots;
        match found.get(index) {
            Some(r) => {
                *a = r.a;
                *sign = r.sign;
                EbvpStatus::Ok
            }
            None => fail(EbvpStatus::IndexOutOfRange, "root index out of range"),
        }
    })
}

/// # Safety
/// `roots` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ebvp_root_set_free(roots: *mut EbvpRootSet) {
    if !roots.is_null() {
        drop(Box::from_raw(roots));
    }
}

/// Bisect `[lo, hi]` on root count down to width `tol`; `problem` supplies
/// the kind and numerical settings.
///
/// # Safety
/// `problem` must be valid; `out_lo` and `out_hi` writable.
#[no_mangle]
pub unsafe extern "C" fn ebvp_locate_fold(
    problem: *const EbvpProblem,
    lo: f64,
    hi: f64,
    tol: f64,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> EbvpStatus {
    guard(|| {
        if problem.is_null() || out_lo.is_null() || out_hi.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        match locate_fold_with(&(*problem).to_spec(), (lo, hi), tol) {
            Ok(f) => {
                *out_lo = f.lo;
                *out_hi = f.hi;
                EbvpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// All certificates for `kind` at `lambda`, as a JSON array string to be
/// released with [`ebvp_string_free`].
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ebvp_certify(lambda: f64, kind: EbvpKind, out_json: *mut *mut c_char) -> EbvpStatus {
    guard(|| {
        if out_json.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        let certs = match certificates::certify_all(lambda, kind.into()) {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        match serde_json::to_string(&certs).map(CString::new) {
            Ok(Ok(s)) => {
                *out_json = s.into_raw();
                EbvpStatus::Ok
            }
            _ => fail(EbvpStatus::Numerical, "certificate serialization failed"),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ebvp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `c0` and `iterations` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ebvp_fixed_point_c0(lambda: f64, c0: *mut f64, iterations: *mut usize) -> EbvpStatus {
    guard(|| {
        if c0.is_null() || iterations.is_null() {
            return fail(EbvpStatus::NullPointer, "null argument");
        }
        match certificates::fixed_point_c0(lambda) {
            Ok(fp) => {
                *c0 = fp.c0;
                *iterations = fp.iterations;
                EbvpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub extern "C" fn ebvp_universal_bound() -> f64 {
    certificates::universal_bound()
}

/// Copy of the last error message, for Rust callers and tests.
pub fn last_error_message() -> String {
    // SAFETY: the pointer comes from the thread-local CString.
    unsafe { CStr::from_ptr(ebvp_last_error()) }
        .to_string_lossy()
        .into_owned()
}
