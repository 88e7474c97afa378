use std::ffi::CStr;
use std::ptr;

use wordperc_ffi::*;

fn oracle(kind: WpSeqKind, value: f64) -> *mut WpOracle {
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { wp_oracle_new(7, kind, value, 1.0, 16, 0.5, &mut o) }, WpStatus::Ok);
    assert!(!o.is_null());
    o
}

fn last_error() -> String {
    let p = wp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn oracle_lifecycle_and_queries() {
    let o = oracle(WpSeqKind::Constant, 0.3);
    let (mut u1, mut u2) = (0.0, 0.0);
    unsafe {
        assert_eq!(wp_oracle_edge_uniform(o, 0, 0, 3, 0, &mut u1), WpStatus::Ok);
        assert_eq!(wp_oracle_edge_uniform(o, 3, 0, 0, 0, &mut u2), WpStatus::Ok);
    }
    assert_eq!(u1, u2);
    assert!((0.0..1.0).contains(&u1));
    let mut letter = 9u8;
    assert_eq!(unsafe { wp_oracle_vertex_letter(o, 2, -4, &mut letter) }, WpStatus::Ok);
    assert!(letter <= 1);
    unsafe { wp_oracle_free(o) };
    unsafe { wp_oracle_free(ptr::null_mut()) };
}

#[test]
fn diagonal_edge_is_rejected() {
    let o = oracle(WpSeqKind::Constant, 0.3);
    let mut u = 0.0;
    assert_eq!(unsafe { wp_oracle_edge_uniform(o, 0, 0, 1, 1, &mut u) }, WpStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    unsafe { wp_oracle_free(o) };
}

#[test]
fn null_out_pointer() {
    assert_eq!(
        unsafe { wp_oracle_new(1, WpSeqKind::Constant, 0.5, 1.0, 4, 0.5, ptr::null_mut()) },
        WpStatus::NullPointer
    );
    assert!(last_error().contains("null"));
}

#[test]
fn bad_sequence_is_invalid() {
    let mut o = ptr::null_mut();
    assert_eq!(
        unsafe { wp_oracle_new(1, WpSeqKind::Constant, 1.5, 1.0, 4, 0.5, &mut o) },
        WpStatus::InvalidArgument
    );
    assert!(o.is_null());
    assert_eq!(
        unsafe { wp_oracle_new(1, WpSeqKind::LogInverse, 0.0, 0.5, 0, 0.5, &mut o) },
        WpStatus::InvalidArgument
    );
}

#[test]
fn words_through_the_abi() {
    let o = oracle(WpSeqKind::Constant, 1.0);
    let mut first = 0u8;
    unsafe { wp_oracle_vertex_letter(o, 1, 0, &mut first) };
    let word = [first];
    let mut seen = false;
    let s = unsafe { wp_sees_word(o, 0, 0, word.as_ptr(), 1, -3, 3, -3, 3, &mut seen) };
    assert_eq!(s, WpStatus::Ok);
    assert!(seen);
    let mut empty_seen = false;
    assert_eq!(unsafe { wp_sees_word(o, 0, 0, ptr::null(), 0, 0, 0, 0, 0, &mut empty_seen) }, WpStatus::Ok);
    assert!(empty_seen);
    let bad = [2u8];
    assert_eq!(
        unsafe { wp_sees_word(o, 0, 0, bad.as_ptr(), 1, -3, 3, -3, 3, &mut seen) },
        WpStatus::InvalidArgument
    );
    let long = [0u8; 40];
    assert_eq!(
        unsafe { wp_sees_word(o, 0, 0, long.as_ptr(), 40, -3, 3, -3, 3, &mut seen) },
        WpStatus::CapExceeded
    );
    unsafe { wp_oracle_free(o) };
}

#[test]
fn fold_functions() {
    let (mut b, mut l) = (0, 0);
    assert_eq!(unsafe { wp_phi(5, 3, &mut b, &mut l) }, WpStatus::Ok);
    assert_eq!((b, l), (1, 2));
    assert_eq!(unsafe { wp_phi(12, 3, &mut b, &mut l) }, WpStatus::Ok);
    assert_eq!((b, l), (4, 0));
    let mut u = 0;
    assert_eq!(unsafe { wp_phi_inverse(-1, 2, 3, &mut u) }, WpStatus::Ok);
    assert_eq!(u, -1);
    assert_eq!(unsafe { wp_phi_inverse(0, 3, 3, &mut u) }, WpStatus::InvalidArgument);
    assert_eq!(unsafe { wp_phi(1, 1, &mut b, &mut l) }, WpStatus::InvalidArgument);
    let mut ok = false;
    assert_eq!(unsafe { wp_verify_isomorphism(3, 0, 29, 0, 4, &mut ok) }, WpStatus::Ok);
    assert!(ok);
}

#[test]
fn black_and_wilson() {
    let (mut exact, mut lower) = (0.0, 0.0);
    assert_eq!(
        unsafe { wp_black_probability(1, 1, 1.0, 0.7, 1.0, 1, 1, &mut exact, &mut lower) },
        WpStatus::Ok
    );
    assert!((exact - 0.49).abs() < 1e-12);
    assert!(exact >= lower);
    assert_eq!(
        unsafe { wp_black_probability(2, 1, 1.0, 0.7, 1.0, 1, 1, &mut exact, &mut lower) },
        WpStatus::InvalidArgument
    );
    let (mut e, mut lo, mut hi) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { wp_wilson(0, 100, &mut e, &mut lo, &mut hi) }, WpStatus::Ok);
    assert_eq!((e, lo), (0.0, 0.0));
    assert!((hi - 0.0370).abs() < 1e-3);
    assert_eq!(unsafe { wp_wilson(5, 4, &mut e, &mut lo, &mut hi) }, WpStatus::InvalidArgument);
    assert_eq!(unsafe { wp_wilson(0, 0, &mut e, &mut lo, &mut hi) }, WpStatus::InvalidArgument);
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/wordperc.h");
    for name in [
        "wp_last_error_message",
        "wp_oracle_new",
        "wp_oracle_free",
        "wp_oracle_edge_uniform",
        "wp_oracle_vertex_letter",
        "wp_sees_word",
        "wp_phi",
        "wp_phi_inverse",
        "wp_verify_isomorphism",
        "wp_black_probability",
        "wp_wilson",
        "typedef struct WpOracle WpOracle",
        "WP_STATUS_CAP_EXCEEDED",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
