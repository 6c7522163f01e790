use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use cyclic_ef_ffi::*;

fn last_error() -> String {
    let p = cef_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    cef_string_free(s);
    out
}

#[test]
fn factorize_verify_and_round_trip() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(cef_factorize(17, 4, &mut f), CefStatus::Ok);
        assert!(cef_factorization_rank(f) <= 100);
        assert_eq!(cef_factorization_rows(f), 17);
        assert_eq!(cef_factorization_cols(f), 119);
        assert_eq!(cef_factorization_verify(f), CefStatus::Ok);

        let mut json = ptr::null_mut();
        assert_eq!(cef_factorization_to_json(f, &mut json), CefStatus::Ok);
        let text = take(json);
        let c = CString::new(text.clone()).unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(
            cef_factorization_from_json(c.as_ptr(), &mut g),
            CefStatus::Ok
        );
        assert_eq!(cef_factorization_rank(g), cef_factorization_rank(f));
        assert_eq!(cef_factorization_verify(g), CefStatus::Ok);
        cef_factorization_free(f);
        cef_factorization_free(g);
    }
}

#[test]
fn tampered_factorization_fails_verification() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(cef_factorize(9, 2, &mut f), CefStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(cef_factorization_to_json(f, &mut json), CefStatus::Ok);
        let mut doc: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        doc["alpha"][3][0] = serde_json::json!("7/2");
        let c = CString::new(doc.to_string()).unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(
            cef_factorization_from_json(c.as_ptr(), &mut g),
            CefStatus::Ok
        );
        assert_eq!(cef_factorization_verify(g), CefStatus::VerifyFailed);
        assert!(last_error().starts_with("entry (4, "), "{}", last_error());
        cef_factorization_free(f);
        cef_factorization_free(g);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(cef_factorize(3, 4, &mut f), CefStatus::Domain);
        assert!(f.is_null());
        assert!(last_error().contains("n > d"));

        assert_eq!(cef_factorize(9, 2, ptr::null_mut()), CefStatus::NullPointer);
        assert_eq!(
            cef_factorization_verify(ptr::null()),
            CefStatus::NullPointer
        );

        let bad = CString::new("{\"target\": 1}").unwrap();
        assert_eq!(
            cef_factorization_from_json(bad.as_ptr(), &mut f),
            CefStatus::Parse
        );
        assert_eq!(cef_factorization_rank(ptr::null()), 0);
        cef_factorization_free(ptr::null_mut());
        cef_string_free(ptr::null_mut());
    }
}

#[test]
fn facets_and_formulations() {
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(cef_facets_json(6, 3, &mut json), CefStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(doc["count"], 8);

        let mut ef = ptr::null_mut();
        assert_eq!(cef_ef_build(1025, 2, &mut ef), CefStatus::Ok);
        assert_eq!(cef_ef_size(ef), 21);
        let mut text = ptr::null_mut();
        assert_eq!(cef_ef_text(ef, &mut text), CefStatus::Ok);
        assert!(take(text).starts_with("\\ extension of P^2_[1, 1025] with 21 inequalities"));
        cef_ef_free(ef);

        assert_eq!(cef_ef_build(2, 2, &mut ef), CefStatus::Domain);
    }
}

#[test]
fn polynomial_minimum() {
    unsafe {
        // (t-2)^2 (t-7)^2
        let c = [196i64, -252, 109, -18, 1];
        let mut t = 0i64;
        let mut report = ptr::null_mut();
        assert_eq!(
            cef_minimize_poly(c.as_ptr(), c.len(), 8, &mut t, &mut report),
            CefStatus::Ok
        );
        assert_eq!(t, 2);
        let doc: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(doc["lp_value"], "0");

        assert_eq!(
            cef_minimize_poly(c.as_ptr(), 2, 8, &mut t, ptr::null_mut()),
            CefStatus::Domain
        );
        assert_eq!(
            cef_minimize_poly(ptr::null(), 3, 8, &mut t, ptr::null_mut()),
            CefStatus::NullPointer
        );
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = include.join("cyclic_ef.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "cef_factorize",
        "cef_factorization_verify",
        "cef_ef_build",
        "cef_minimize_poly",
        "cef_last_error",
    ] {
        assert!(text.contains(name), "{name} missing from the header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"cyclic_ef.h\"\n\
         int main(void) {\n\
           CefFactorization *f = NULL;\n\
           CefStatus s = cef_factorize(9, 2, &f);\n\
           if (s != CEF_STATUS_OK) return (int)s;\n\
           size_t r = cef_factorization_rank(f);\n\
           cef_factorization_free(f);\n\
           return r > 8;\n\
         }\n",
    )
    .unwrap();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(&include)
            .arg(&src)
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{compiler} rejected the header"),
            Err(e) => panic!("could not run {compiler}: {e}"),
        }
    }

    // the static library sits in the profile directory, one level above
    // this test binary
    let profile = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile.join("libcyclic_ef_ffi.a");
    assert!(lib.exists(), "{} was not built", lib.display());
    let exe = dir.path().join("use");
    let status = Command::new("cc")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "linking against {} failed", lib.display());
    assert_eq!(Command::new(&exe).status().unwrap().code(), Some(0));
}
