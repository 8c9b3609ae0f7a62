//! C ABI over `fermion-shadows`.
//!
//! Every fallible call returns an [`FsStatus`] and writes its result through
//! an out-pointer. On failure the message is kept per thread and can be read
//! with [`fs_last_error_message`]. Handles are opaque and must be released
//! with their matching `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fermion_shadows::nc::{nc_shadow_norm_sq, EigenMethod};
use fermion_shadows::pipeline::run_plan;
use fermion_shadows::sim::{reference_state, StateSpec};
use fermion_shadows::{fgu, io, planner};
use fermion_shadows::{
    CoveragePlan, DenseState, Ensemble, Error, MajoranaIndex, Mapping, MappingKind, RDMTensor, Strategy,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeLimit = 3,
    Overflow = 4,
    Parse = 5,
    Io = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FsMapping {
    JordanWigner = 0,
    BravyiKitaev = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FsEnsemble {
    Fgu = 0,
    Nc = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FsStrategy {
    Swap1 = 0,
    Eqot = 1,
    Mt2 = 2,
    Mt3 = 3,
    Mt4 = 4,
    SwapK = 5,
    Naive = 6,
}

/// Opaque measurement plan.
pub struct FsPlan(CoveragePlan);

/// Opaque dense reference state together with the mapping used to build it.
pub struct FsState {
    state: DenseState,
    mapping: MappingKind,
}

/// Opaque k-RDM, row-major over colex-ranked mode tuples.
pub struct FsRdm(RDMTensor);

impl From<FsMapping> for MappingKind {
    fn from(m: FsMapping) -> Self {
        match m {
            FsMapping::JordanWigner => MappingKind::JordanWigner,
            FsMapping::BravyiKitaev => MappingKind::BravyiKitaev,
        }
    }
}

impl From<FsStrategy> for Strategy {
    fn from(s: FsStrategy) -> Self {
        match s {
            FsStrategy::Swap1 => Strategy::Swap1,
            FsStrategy::Eqot => Strategy::Eqot,
            FsStrategy::Mt2 => Strategy::Mt2,
            FsStrategy::Mt3 => Strategy::Mt3,
            FsStrategy::Mt4 => Strategy::Mt4,
            FsStrategy::SwapK => Strategy::SwapK,
            FsStrategy::Naive => Strategy::Naive,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::SizeLimit { .. } => FsStatus::SizeLimit,
            Error::Parse { .. } | Error::Format(_) => FsStatus::Parse,
            Error::Io(_) => FsStatus::Io,
            _ => FsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FsStatus::NullPointer, format!("{what} is null"))
}

fn set_error(msg: Option<String>) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    });
}

/// Runs `f`, maps errors and panics to a status and records the message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            FsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("internal panic".into()));
            FsStatus::Internal
        }
    }
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

fn to_u64(v: u128) -> Result<u64, Failure> {
    u64::try_from(v).map_err(|_| Failure(FsStatus::Overflow, format!("{v} does not fit in 64 bits")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null("array pointer"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// FGU channel eigenvalue `C(n,k)/C(2n,2k)`.
#[no_mangle]
pub unsafe extern "C" fn fs_channel_eigenvalue(n: usize, k: usize, out: *mut f64) -> FsStatus {
    guard(|| write(out, fgu::channel_eigenvalue_f64(n, k)?))
}

#[no_mangle]
pub unsafe extern "C" fn fs_shadow_norm_sq(n: usize, k: usize, out: *mut f64) -> FsStatus {
    guard(|| write(out, fgu::shadow_norm_sq_f64(n, k)?))
}

/// Bernstein sample budget for `l` observables at accuracy `epsilon` and
/// failure probability `delta`.
#[no_mangle]
pub unsafe extern "C" fn fs_bernstein_samples(
    epsilon: f64,
    delta: f64,
    l: u64,
    max_norm_sq: f64,
    out: *mut u64,
) -> FsStatus {
    guard(|| write(out, fgu::bernstein_samples(epsilon, delta, l, max_norm_sq)?))
}

#[no_mangle]
pub unsafe extern "C" fn fs_eqot(k: usize, n: usize, out: *mut u64) -> FsStatus {
    guard(|| write(out, to_u64(planner::eqot(k, n)?)?))
}

#[no_mangle]
pub unsafe extern "C" fn fs_strategy_count(strategy: FsStrategy, k: usize, n: usize, out: *mut u64) -> FsStatus {
    guard(|| write(out, to_u64(planner::strategy_count(strategy.into(), k, n)?)?))
}

/// Qubit support size of the Majorana monomial with sorted wire `indices`.
#[no_mangle]
pub unsafe extern "C" fn fs_majorana_locality(
    mapping: FsMapping,
    n: usize,
    indices: *const usize,
    len: usize,
    out: *mut usize,
) -> FsStatus {
    guard(|| {
        let mu = MajoranaIndex::new(n, slice(indices, len)?)?;
        let m = Mapping::new(mapping.into(), n)?;
        write(out, m.locality(&mu)?)
    })
}

/// Exact NC shadow norm `1/λ_μ`.
#[no_mangle]
pub unsafe extern "C" fn fs_nc_shadow_norm_sq(
    mapping: FsMapping,
    n: usize,
    indices: *const usize,
    len: usize,
    out: *mut f64,
) -> FsStatus {
    guard(|| {
        let mu = MajoranaIndex::new(n, slice(indices, len)?)?;
        let m = Mapping::new(mapping.into(), n)?;
        write(out, nc_shadow_norm_sq(&mu, &m, EigenMethod::Exact)?)
    })
}

/// Draws settings until every degree-≤2k target is covered `r` times.
#[no_mangle]
pub unsafe extern "C" fn fs_plan_new_coverage(
    n: usize,
    k: usize,
    ensemble: FsEnsemble,
    mapping: FsMapping,
    r: u64,
    seed: u64,
    out: *mut *mut FsPlan,
) -> FsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let ens = match ensemble {
            FsEnsemble::Fgu => Ensemble::Fgu,
            FsEnsemble::Nc => Ensemble::Nc,
        };
        let m = Mapping::new(mapping.into(), n)?;
        let plan = planner::coverage_plan(n, k, ens, r, seed, &m)?;
        write(out, boxed(FsPlan(plan)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn fs_plan_len(plan: *const FsPlan, out: *mut usize) -> FsStatus {
    guard(|| {
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        write(out, p.0.settings.len())
    })
}

/// Serialises a plan; release the string with [`fs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fs_plan_to_json(plan: *const FsPlan, out: *mut *mut c_char) -> FsStatus {
    guard(|| {
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        let s = io::plan_to_json(&p.0)?;
        let c = CString::new(s).map_err(|e| Failure(FsStatus::Internal, e.to_string()))?;
        write(out, c.into_raw())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fs_plan_free(plan: *mut FsPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Fock state from `n` occupation numbers (0 or 1), mode 0 first.
#[no_mangle]
pub unsafe extern "C" fn fs_state_fock(
    mapping: FsMapping,
    occupations: *const u8,
    n: usize,
    out: *mut *mut FsState,
) -> FsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let occ = slice(occupations, n)?.to_vec();
        make_state(mapping, n, &StateSpec::Fock(occ), out)
    })
}

/// Seeded full-rank random mixed state.
#[no_mangle]
pub unsafe extern "C" fn fs_state_random(mapping: FsMapping, n: usize, seed: u64, out: *mut *mut FsState) -> FsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        make_state(mapping, n, &StateSpec::RandomMixed(seed), out)
    })
}

unsafe fn make_state(mapping: FsMapping, n: usize, spec: &StateSpec, out: *mut *mut FsState) -> Result<(), Failure> {
    let kind: MappingKind = mapping.into();
    let state = reference_state(n, spec, &Mapping::new(kind, n)?)?;
    write(out, boxed(FsState { state, mapping: kind }))
}

#[no_mangle]
pub unsafe extern "C" fn fs_state_free(state: *mut FsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Simulates `shots` shots per plan setting and assembles the k-RDM.
#[no_mangle]
pub unsafe extern "C" fn fs_estimate_rdm(
    state: *const FsState,
    plan: *const FsPlan,
    k: usize,
    shots: usize,
    seed: u64,
    out: *mut *mut FsRdm,
) -> FsStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        if s.mapping != p.0.mapping.kind() {
            return Err(Failure(FsStatus::InvalidArgument, "state and plan use different mappings".into()));
        }
        if s.state.n != p.0.n {
            return Err(Error::ModeMismatch { expected: p.0.n, found: s.state.n }.into());
        }
        let res = run_plan(&s.state, &p.0.settings, &p.0.mapping, k, shots, seed, EigenMethod::Exact)?;
        write(out, boxed(FsRdm(res.rdm)))
    })
}

/// Side length `C(n,k)` of the RDM matrix.
#[no_mangle]
pub unsafe extern "C" fn fs_rdm_dim(rdm: *const FsRdm, out: *mut usize) -> FsStatus {
    guard(|| {
        let r = rdm.as_ref().ok_or_else(|| null("rdm"))?;
        write(out, r.0.dim)
    })
}

#[no_mangle]
pub unsafe extern "C" fn fs_rdm_get(rdm: *const FsRdm, p: usize, q: usize, re: *mut f64, im: *mut f64) -> FsStatus {
    guard(|| {
        let r = rdm.as_ref().ok_or_else(|| null("rdm"))?;
        if p >= r.0.dim || q >= r.0.dim {
            return Err(Failure(FsStatus::InvalidArgument, format!("index ({p},{q}) outside {0}x{0}", r.0.dim)));
        }
        if re.is_null() || im.is_null() {
            return Err(null("output pointer"));
        }
        let v = r.0.get(p, q);
        write(re, v.re)?;
        write(im, v.im)
    })
}

#[no_mangle]
pub unsafe extern "C" fn fs_rdm_free(rdm: *mut FsRdm) {
    if !rdm.is_null() {
        drop(Box::from_raw(rdm));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fs_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(c) => c,
        Err(_) => c"",
    };
    V.as_ptr()
}
