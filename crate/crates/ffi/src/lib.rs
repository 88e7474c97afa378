//! C interface to `wordperc`.
//!
//! Every fallible call returns a [`WpStatus`] and writes results through out
//! pointers. On failure, [`wp_last_error_message`] describes the last error
//! raised on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wordperc::lattice::{canonical_edge, ProbSequence, Truncation, Vertex, Window};
use wordperc::sampler::FieldOracle;
use wordperc::slab;
use wordperc::stats;
use wordperc::word::{sees_word_exact, SeenQuery, Word, WordError, DEFAULT_EXACT_CAP};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    Internal = 4,
}

/// Shape of the horizontal edge probabilities.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpSeqKind {
    /// `p_i = value` for every `i`.
    Constant = 0,
    /// `p_i = 1 / (i ln i)` beyond a short prefix.
    LogInverse = 1,
}

/// Opaque handle to a seeded configuration.
pub struct WpOracle {
    inner: FieldOracle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn fail(status: WpStatus, msg: impl Into<String>) -> WpStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> WpStatus) -> WpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(WpStatus::Internal, "panic inside wordperc"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(WpStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Message for the last failing call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates an oracle. `k` is the truncation length.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_new(
    seed: u64,
    kind: WpSeqKind,
    value: f64,
    epsilon: f64,
    k: u64,
    letter_p: f64,
    out: *mut *mut WpOracle,
) -> WpStatus {
    guard(|| {
        non_null!(out);
        if !(0.0..=1.0).contains(&letter_p) {
            return fail(WpStatus::InvalidArgument, format!("letter probability {letter_p} outside [0,1]"));
        }
        let seq = match kind {
            WpSeqKind::Constant => ProbSequence::constant(value, epsilon),
            WpSeqKind::LogInverse => ProbSequence::log_inverse(epsilon),
        };
        let seq = match seq {
            Ok(s) => s,
            Err(e) => return fail(WpStatus::InvalidArgument, e.to_string()),
        };
        let trunc = match Truncation::new(k) {
            Ok(t) => t,
            Err(e) => return fail(WpStatus::InvalidArgument, e.to_string()),
        };
        let oracle = Box::new(WpOracle {
            inner: FieldOracle::new(seed, seq, trunc, letter_p),
        });
        *out = Box::into_raw(oracle);
        WpStatus::Ok
    })
}

/// # Safety
/// `oracle` must come from [`wp_oracle_new`] and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_free(oracle: *mut WpOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Uniform attached to the edge between two sites.
///
/// # Safety
/// `oracle` must be live and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_edge_uniform(
    oracle: *const WpOracle,
    ax: i64,
    ay: i64,
    bx: i64,
    by: i64,
    out: *mut f64,
) -> WpStatus {
    guard(|| {
        non_null!(oracle, out);
        match canonical_edge(Vertex::new(ax, ay), Vertex::new(bx, by)) {
            Ok(e) => {
                *out = (*oracle).inner.edge_uniform(&e);
                WpStatus::Ok
            }
            Err(e) => fail(WpStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `oracle` must be live and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_vertex_letter(oracle: *const WpOracle, x: i64, y: i64, out: *mut u8) -> WpStatus {
    guard(|| {
        non_null!(oracle, out);
        *out = (*oracle).inner.vertex_letter(Vertex::new(x, y));
        WpStatus::Ok
    })
}

/// Whether the word `letters[0..len]` is seen from `(x, y)` by a
/// self-avoiding path inside the window.
///
/// # Safety
/// `letters` must point to `len` bytes (or be null with `len == 0`), and
/// `oracle` and `out` must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wp_sees_word(
    oracle: *const WpOracle,
    x: i64,
    y: i64,
    letters: *const u8,
    len: usize,
    x_min: i64,
    x_max: i64,
    y_min: i64,
    y_max: i64,
    out: *mut bool,
) -> WpStatus {
    guard(|| {
        non_null!(oracle, out);
        if len > 0 && letters.is_null() {
            return fail(WpStatus::NullPointer, "letters is null");
        }
        if x_min > x_max || y_min > y_max {
            return fail(WpStatus::InvalidArgument, "empty window");
        }
        let bytes = if len == 0 { &[][..] } else { std::slice::from_raw_parts(letters, len) };
        if let Some(b) = bytes.iter().find(|&&b| b > 1) {
            return fail(WpStatus::InvalidArgument, format!("letter {b} is not 0 or 1"));
        }
        let q = SeenQuery {
            origin: Vertex::new(x, y),
            word: Word::new(bytes.to_vec()),
            window: Window::new(x_min, x_max, y_min, y_max),
        };
        match sees_word_exact(&(*oracle).inner, &q, DEFAULT_EXACT_CAP) {
            Ok(seen) => {
                *out = seen;
                WpStatus::Ok
            }
            Err(e @ WordError::CapExceeded { .. }) => fail(WpStatus::CapExceeded, e.to_string()),
            Err(e) => fail(WpStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// `u -> (floor(u/k), u mod k)`.
///
/// # Safety
/// `block` and `layer` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wp_phi(u: i64, k: u64, block: *mut i64, layer: *mut i64) -> WpStatus {
    guard(|| {
        non_null!(block, layer);
        if k < 2 {
            return fail(WpStatus::InvalidArgument, "k must be at least 2");
        }
        let (b, l) = slab::phi(u, k);
        *block = b;
        *layer = l;
        WpStatus::Ok
    })
}

/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn wp_phi_inverse(block: i64, layer: i64, k: u64, out: *mut i64) -> WpStatus {
    guard(|| {
        non_null!(out);
        if k < 2 || !(0..k as i64).contains(&layer) {
            return fail(WpStatus::InvalidArgument, "need k >= 2 and 0 <= layer < k");
        }
        *out = slab::phi_inverse(block, layer, k);
        WpStatus::Ok
    })
}

/// Exhaustive fold check on a window.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn wp_verify_isomorphism(
    k: u64,
    x_min: i64,
    x_max: i64,
    y_min: i64,
    y_max: i64,
    out: *mut bool,
) -> WpStatus {
    guard(|| {
        non_null!(out);
        if k < 2 || x_min > x_max || y_min > y_max {
            return fail(WpStatus::InvalidArgument, "need k >= 2 and a non-empty window");
        }
        *out = slab::verify_isomorphism(k, &Window::new(x_min, x_max, y_min, y_max)).ok;
        WpStatus::Ok
    })
}

/// Black probability over offsets `first..=last` for a constant sequence
/// `p_i = value`.
///
/// # Safety
/// `exact` and `lower_bound` must be valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wp_black_probability(
    first: u64,
    last: u64,
    link: f64,
    letter_p: f64,
    value: f64,
    first_letter: u8,
    second_letter: u8,
    exact: *mut f64,
    lower_bound: *mut f64,
) -> WpStatus {
    guard(|| {
        non_null!(exact, lower_bound);
        if first == 0 || first > last || first_letter > 1 || second_letter > 1 {
            return fail(WpStatus::InvalidArgument, "need 1 <= first <= last and binary letters");
        }
        if !(0.0..=1.0).contains(&link) || !(0.0..=1.0).contains(&letter_p) {
            return fail(WpStatus::InvalidArgument, "probabilities must lie in [0,1]");
        }
        let seq = match ProbSequence::constant(value, 1.0) {
            Ok(s) => s,
            Err(e) => return fail(WpStatus::InvalidArgument, e.to_string()),
        };
        let b = slab::black_probability(first..=last, link, letter_p, &seq, (first_letter, second_letter));
        *exact = b.exact;
        *lower_bound = b.lower_bound;
        WpStatus::Ok
    })
}

/// Wilson 95% interval.
///
/// # Safety
/// All out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wp_wilson(
    successes: u64,
    trials: u64,
    estimate: *mut f64,
    ci_lo: *mut f64,
    ci_hi: *mut f64,
) -> WpStatus {
    guard(|| {
        non_null!(estimate, ci_lo, ci_hi);
        if successes > trials {
            return fail(WpStatus::InvalidArgument, "successes exceed trials");
        }
        match stats::wilson(successes, trials) {
            Ok(p) => {
                *estimate = p.estimate;
                *ci_lo = p.ci_lo;
                *ci_hi = p.ci_hi;
                WpStatus::Ok
            }
            Err(e) => fail(WpStatus::InvalidArgument, e.to_string()),
        }
    })
}
