//! C ABI over the counting library. Handles are opaque; counts come back as
//! decimal strings because they do not fit machine integers. Every call
//! returns a status code and leaves a message for `pl_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use permlattice::admissibility::{check_pattern, GlobalVerdict};
use permlattice::correspond::a_l_window;
use permlattice::entropy::{mahler_measure, LaurentPolynomial2};
use permlattice::lattice::text::{parse_pattern, parse_set};
use permlattice::lattice::{count_box_permutations, BoxShape, Pattern, RestrictingSet};
use permlattice::oracle::{brute_toral_permutations, Budget};
use permlattice::planarcount::{count_perfect_covers, PlanarEmbedding};
use permlattice::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    NotAdmissible = 5,
    Capacity = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlVerdict {
    Admissible = 0,
    FailsNecessary = 1,
    Obstructed = 2,
    Unknown = 3,
}

/// Opaque restricting set.
pub struct PlSet(RestrictingSet);

/// Opaque finite pattern.
pub struct PlPattern(Pattern);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PlStatus {
    match e {
        Error::Parse(_) => PlStatus::Parse,
        Error::NotAdmissible(_) => PlStatus::NotAdmissible,
        Error::Capacity(_) => PlStatus::Capacity,
        Error::Internal(_) => PlStatus::Internal,
        _ => PlStatus::Domain,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (PlStatus, String)>) -> PlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PlStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("panic inside permlattice");
            PlStatus::Panic
        }
    }
}

fn lib(e: Error) -> (PlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (PlStatus, String) {
    (PlStatus::NullArgument, "null argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (PlStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (PlStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn read_shape(dims: *const usize, ndims: usize) -> Result<BoxShape, (PlStatus, String)> {
    if dims.is_null() {
        return Err(null());
    }
    BoxShape::new(std::slice::from_raw_parts(dims, ndims).to_vec()).map_err(lib)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (PlStatus, String)> {
    let c = CString::new(s).map_err(|_| (PlStatus::Internal, "interior NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a preset token (`AL`, `A+`, `Aoplus`) or a list `[(0,0),(1,0)]`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_set_parse(text: *const c_char, out: *mut *mut PlSet) -> PlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let set = parse_set(read_str(text)?).map_err(lib)?;
        *out = Box::into_raw(Box::new(PlSet(set)));
        Ok(())
    })
}

/// # Safety
/// `set` must come from `pl_set_parse` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn pl_set_free(set: *mut PlSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of vectors in the set.
///
/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_set_len(set: *const PlSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Toral permutations of the given shape, by exhaustive search within
/// `budget` nodes (0 selects the default). The decimal count is written to
/// `out` and must be released with `pl_string_free`.
///
/// # Safety
/// `dims` must point to `ndims` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_count_toral(
    set: *const PlSet,
    dims: *const usize,
    ndims: usize,
    budget: u64,
    out: *mut *mut c_char,
) -> PlStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let shape = read_shape(dims, ndims)?;
        let mut b = Budget::default();
        if budget > 0 {
            b.nodes = budget;
        }
        let r = brute_toral_permutations(&set.0, &shape, &b, false).map_err(lib)?;
        write_string(out, r.count.to_string())
    })
}

/// Permutations of a box that keep every cell inside it.
///
/// # Safety
/// As for `pl_count_toral`.
#[no_mangle]
pub unsafe extern "C" fn pl_count_box_permutations(
    set: *const PlSet,
    dims: *const usize,
    ndims: usize,
    out: *mut *mut c_char,
) -> PlStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let shape = read_shape(dims, ndims)?;
        if set.0.dim() != shape.dim() {
            return Err((PlStatus::Domain, "set and shape dimensions differ".into()));
        }
        let c = count_box_permutations(&set.0, &shape).map_err(lib)?;
        write_string(out, c.to_string())
    })
}

/// Globally admissible A_L patterns on an n x m rectangle (polynomial time).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_count_a_l_patterns(n: usize, m: usize, out: *mut *mut c_char) -> PlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let w = a_l_window(n, m).map_err(lib)?;
        let emb = PlanarEmbedding::from_positions(&w.graph, &w.positions).map_err(lib)?;
        let c = count_perfect_covers(&emb, &w.target).map_err(lib)?;
        write_string(out, c.to_string())
    })
}

/// Mahler measure of a Laurent polynomial in z, w on a `grid` x `grid`
/// roots-of-unity grid, with the grid-halving difference as error.
///
/// # Safety
/// `poly` must be NUL-terminated; `value` and `error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_mahler_measure(poly: *const c_char, grid: usize, value: *mut f64, error: *mut f64) -> PlStatus {
    guard(|| {
        if value.is_null() || error.is_null() {
            return Err(null());
        }
        let p = LaurentPolynomial2::parse(read_str(poly)?).map_err(lib)?;
        let m = mahler_measure(&p, grid).map_err(lib)?;
        *value = m.value;
        *error = m.error;
        Ok(())
    })
}

/// Parses the pattern text format (header line then one row per y).
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pattern_parse(text: *const c_char, out: *mut *mut PlPattern) -> PlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let p = parse_pattern(read_str(text)?).map_err(lib)?;
        *out = Box::into_raw(Box::new(PlPattern(p)));
        Ok(())
    })
}

/// # Safety
/// `pat` must come from `pl_pattern_parse` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn pl_pattern_free(pat: *mut PlPattern) {
    if !pat.is_null() {
        drop(Box::from_raw(pat));
    }
}

/// Global admissibility verdict, searching obstructions up to `radius`.
///
/// # Safety
/// `pat` must be a live handle; `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pl_pattern_check(pat: *const PlPattern, radius: usize, verdict: *mut PlVerdict) -> PlStatus {
    guard(|| {
        let pat = pat.as_ref().ok_or_else(null)?;
        if verdict.is_null() {
            return Err(null());
        }
        *verdict = match check_pattern(&pat.0, radius, None).global {
            GlobalVerdict::Yes(_) => PlVerdict::Admissible,
            GlobalVerdict::Violates(_) => PlVerdict::FailsNecessary,
            GlobalVerdict::No(_) => PlVerdict::Obstructed,
            GlobalVerdict::Unknown => PlVerdict::Unknown,
        };
        Ok(())
    })
}
