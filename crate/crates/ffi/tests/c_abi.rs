use std::ffi::{CStr, CString};
use std::ptr;

use hardylab_ffi::*;

fn last_error() -> String {
    let p = hardy_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Handles {
    w: *mut HardyWeights,
    l: *mut HardyLambda,
}

impl Handles {
    fn explicit(b: &[f64], lambda: &[f64]) -> Self {
        let mut w = ptr::null_mut();
        let mut l = ptr::null_mut();
        unsafe {
            assert_eq!(
                hardy_weights_explicit(b.as_ptr(), b.len(), &mut w),
                HardyStatus::Ok
            );
            assert_eq!(
                hardy_lambda_new(lambda.as_ptr(), lambda.len(), &mut l),
                HardyStatus::Ok
            );
        }
        Handles { w, l }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            hardy_weights_free(self.w);
            hardy_lambda_free(self.l);
        }
    }
}

#[test]
fn version_is_cargo_version() {
    let v = unsafe { CStr::from_ptr(hardy_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn lambda_validation_reports_index() {
    let mut l = ptr::null_mut();
    let bad = [1.0, 2.0];
    let st = unsafe { hardy_lambda_new(bad.as_ptr(), bad.len(), &mut l) };
    assert_eq!(st, HardyStatus::RejectedInput);
    assert!(l.is_null());
    assert!(last_error().contains('2'), "{}", last_error());
}

#[test]
fn null_out_pointer_is_reported() {
    let v = [1.0];
    let st = unsafe { hardy_lambda_new(v.as_ptr(), 1, ptr::null_mut()) };
    assert_eq!(st, HardyStatus::NullPointer);
    assert!(last_error().contains("out"));
    let st = unsafe { hardy_c_refined(ptr::null(), 2.0, 1, ptr::null_mut()) };
    assert_eq!(st, HardyStatus::NullPointer);
}

#[test]
fn successful_call_clears_last_error() {
    let mut l = ptr::null_mut();
    unsafe {
        assert_eq!(
            hardy_weights_power(f64::NAN, &mut ptr::null_mut()),
            HardyStatus::RejectedInput
        );
        assert_eq!(hardy_lambda_unit(&mut l), HardyStatus::Ok);
        assert!(hardy_last_error_message().is_null());
        assert_eq!(hardy_lambda_len(l), 1);
        hardy_lambda_free(l);
    }
}

#[test]
fn refined_constant_through_handles() {
    let h = Handles::explicit(&[1.0], &[1.0, 1.0]);
    let mut c = 0.0;
    unsafe {
        assert_eq!(hardy_c_refined(h.l, 2.0, 2, &mut c), HardyStatus::Ok);
        assert!((c - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(hardy_c_effective(h.l, 3.0, 2, &mut c), HardyStatus::Ok);
        assert_eq!(c, 3.0);
        assert_eq!(
            hardy_c_refined(h.l, 0.5, 2, &mut c),
            HardyStatus::RejectedInput
        );
    }
}

#[test]
fn condition_and_bounds() {
    let h = Handles::explicit(&[1.0, 0.0, 0.0], &[1.0]);
    let mut cond = HardyCondition::default();
    let mut bounds = HardyBounds::default();
    unsafe {
        assert_eq!(
            hardy_best_u_prime(h.w, h.l, 2.0, 10, &mut cond),
            HardyStatus::Ok
        );
        assert_eq!(
            hardy_u_bounds(cond.u_prime, 2.0, &mut bounds),
            HardyStatus::Ok
        );
        assert_eq!(
            hardy_u_bounds(-1.0, 2.0, &mut bounds),
            HardyStatus::RejectedInput
        );
    }
    assert_eq!(cond.argmax_n, 1);
    assert!(cond.exact);
    assert!((cond.u_prime - 1.0).abs() < 1e-12);
    assert!((bounds.upper_new - 9.0).abs() < 1e-12);
    assert!((bounds.upper_bge - 16.0).abs() < 1e-12);
}

#[test]
fn divergent_family_maps_to_status() {
    let mut w = ptr::null_mut();
    let mut l = ptr::null_mut();
    let (mut v, mut e) = (0.0, 0.0);
    unsafe {
        assert_eq!(hardy_weights_power(0.0, &mut w), HardyStatus::Ok);
        assert_eq!(hardy_lambda_unit(&mut l), HardyStatus::Ok);
        assert_eq!(
            hardy_tail_sum(w, l, 1.0, 1, &mut v, &mut e),
            HardyStatus::DivergentSeries
        );
        assert_eq!(
            hardy_tail_sum(w, l, 2.0, 1, &mut v, &mut e),
            HardyStatus::Ok
        );
        hardy_weights_free(w);
        hardy_lambda_free(l);
    }
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    assert!(v <= zeta2 && zeta2 <= v + e);
}

#[test]
fn ratio_and_f_n() {
    let h = Handles::explicit(&[1.0, 1.0], &[1.0]);
    let x = [1.0, 0.9];
    let (mut r, mut f) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            hardy_ratio(h.w, h.l, 2.0, x.as_ptr(), 2, &mut r),
            HardyStatus::Ok
        );
        assert_eq!(hardy_f_n(h.l, 3.0, x.as_ptr(), 2, &mut f), HardyStatus::Ok);
        let up = [0.5, 1.0];
        assert_eq!(
            hardy_ratio(h.w, h.l, 2.0, up.as_ptr(), 2, &mut r),
            HardyStatus::RejectedInput
        );
    }
    // f_2(1, 0.9) with C = 8/5 at p = 3
    assert!((f - 0.0606).abs() < 1e-6, "{f}");
}

#[test]
fn isotonic_projection_in_place() {
    let mut v = [1.0, 3.0, -2.0];
    let p = v.as_mut_ptr();
    unsafe {
        assert_eq!(hardy_isotonic_project(p, v.len(), p), HardyStatus::Ok);
    }
    assert_eq!(v, [2.0, 2.0, 0.0]);
}

#[test]
fn estimate_copies_witness() {
    let h = Handles::explicit(&[1.0, 0.5, 0.25], &[1.0, 0.8]);
    let mut est = HardyEstimate::default();
    let mut witness = [f64::NAN; 16];
    unsafe {
        let st = hardy_estimate_best_constant(
            h.w,
            h.l,
            2.0,
            4,
            2,
            7,
            &mut est,
            witness.as_mut_ptr(),
            witness.len(),
        );
        assert_eq!(st, HardyStatus::Ok);
    }
    assert!(est.witness_len >= 1 && est.witness_len <= witness.len());
    assert_eq!(witness[0], 1.0);
    let mut r = 0.0;
    unsafe {
        hardy_ratio(h.w, h.l, 2.0, witness.as_ptr(), est.witness_len, &mut r);
    }
    assert!((r - est.estimate).abs() <= 1e-9 * est.estimate);
}

#[test]
fn parse_and_analyze_json() {
    let doc = CString::new(r#"{"b":{"explicit":[1,0.5]},"lambda":{"explicit":[1,1]}}"#).unwrap();
    let mut w = ptr::null_mut();
    let mut l = ptr::null_mut();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            hardy_parse_weights_json(doc.as_ptr(), &mut w, &mut l),
            HardyStatus::Ok
        );
        assert_eq!(hardy_lambda_len(l), 2);
        hardy_weights_free(w);
        hardy_lambda_free(l);

        let st = hardy_analyze_json(doc.as_ptr(), 2.0, 20, 8, 2, 0, 50, &mut out);
        assert_eq!(st, HardyStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        hardy_string_free(out);
        let report = hardylab::AnalysisReport::from_json(&text).unwrap();
        assert!(report.succeeded());

        let bad = CString::new(r#"{"b":{"explicit":[1,"x"]}}"#).unwrap();
        let st = hardy_parse_weights_json(bad.as_ptr(), &mut w, &mut l);
        assert_eq!(st, HardyStatus::ParseError);
        assert!(last_error().contains("b.explicit[1]"), "{}", last_error());
    }
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hardylab.h"))
            .expect("header generated by the build script");
    for decl in [
        "typedef struct HardyLambda HardyLambda;",
        "typedef struct HardyWeights HardyWeights;",
        "HARDY_STATUS_DIVERGENT_SERIES = 2",
        "HardyStatus hardy_best_u_prime(",
        "HardyStatus hardy_estimate_best_constant(",
        "void hardy_string_free(char *s);",
        "const char *hardy_last_error_message(void);",
    ] {
        assert!(header.contains(decl), "missing {decl}");
    }
}

/// Compiles a small C program against the generated header and the static
/// library, when a C compiler is around.
#[test]
fn c_program_links_and_runs() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<this test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libhardylab_ffi.a");
    if !lib.exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let out_dir = tempfile_dir();
    let bin = out_dir.join("smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = std::process::Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
    let _ = std::fs::remove_dir_all(out_dir);
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("hardylab-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
