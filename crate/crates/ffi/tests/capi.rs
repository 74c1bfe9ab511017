use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use spiralgram_ffi::*;

fn last_error() -> String {
    let p = sg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn sample(square: &CStr, n: usize, seed: u64) -> *mut SgInvariants {
    let mut inv = ptr::null_mut();
    assert_eq!(unsafe { sg_invariants_sample(square.as_ptr(), n, seed, &mut inv) }, SgStatus::Ok);
    inv
}

fn values(inv: *const SgInvariants) -> Vec<f64> {
    let mut v = vec![0.0; unsafe { sg_invariants_len(inv) }];
    assert_eq!(unsafe { sg_invariants_values(inv, v.as_mut_ptr(), v.len()) }, SgStatus::Ok);
    v
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(sg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn invariants_roundtrip_and_classify() {
    let x = [2.0, 0.5, 3.0, 0.25, 1.5, 0.75];
    let mut inv = ptr::null_mut();
    unsafe {
        assert_eq!(sg_invariants_new(x.as_ptr(), x.len(), &mut inv), SgStatus::Ok);
        assert_eq!(values(inv), x);
        let (mut even, mut odd) = (SgInterval::Mixed, SgInterval::Mixed);
        assert_eq!(sg_invariants_grid(inv, &mut even, &mut odd), SgStatus::Ok);
        assert_eq!((even, odd), (SgInterval::K, SgInterval::J));
        let mut f = [0.0; 4];
        assert_eq!(sg_invariants_conserved(inv, f.as_mut_ptr()), SgStatus::Ok);
        // F3 = product of even/odd ratios.
        assert!((f[2] - (2.0 / 0.5) * (3.0 / 0.25) * (1.5 / 0.75)).abs() < 1e-12);
        let mut t = SgSpiralType::None;
        assert_eq!(sg_invariants_spiral(inv, 3, 0, 9, &mut t), SgStatus::Ok);
        assert_eq!(t, SgSpiralType::Beta);
        sg_invariants_free(inv);
    }
}

#[test]
fn coordinate_step_conserves_quantities_and_inverts() {
    let inv = sample(c"JK", 5, 3);
    unsafe {
        let (mut fwd, mut back) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(sg_t3_step(inv, false, &mut fwd), SgStatus::Ok);
        assert_eq!(sg_t3_step(fwd, true, &mut back), SgStatus::Ok);
        for (a, b) in values(inv).iter().zip(values(back)) {
            assert!((a - b).abs() < 1e-12);
        }
        let (mut f0, mut f1) = ([0.0; 4], [0.0; 4]);
        sg_invariants_conserved(inv, f0.as_mut_ptr());
        sg_invariants_conserved(fwd, f1.as_mut_ptr());
        for i in 0..4 {
            assert!((f0[i] - f1[i]).abs() <= 1e-10 * f0[i].abs());
        }
        for h in [inv, fwd, back] {
            sg_invariants_free(h);
        }
    }
}

#[test]
fn singular_points_report_a_status_and_message() {
    let x = [0.5; 8];
    let mut inv = ptr::null_mut();
    let mut out = ptr::null_mut();
    unsafe {
        sg_invariants_new(x.as_ptr(), x.len(), &mut inv);
        assert_eq!(sg_t3_step(inv, false, &mut out), SgStatus::Singular);
        assert!(out.is_null());
        assert!(last_error().contains("singular"));
        sg_invariants_free(inv);
    }
}

#[test]
fn bad_arguments_are_rejected() {
    let mut inv = ptr::null_mut();
    unsafe {
        assert_eq!(sg_invariants_new(ptr::null(), 4, &mut inv), SgStatus::NullPointer);
        assert_eq!(sg_invariants_new([1.0, 2.0, 3.0].as_ptr(), 3, &mut inv), SgStatus::InvalidInput);
        assert_eq!(sg_invariants_new([f64::NAN; 4].as_ptr(), 4, &mut inv), SgStatus::InvalidInput);
        assert_eq!(sg_invariants_sample(c"QQ".as_ptr(), 4, 1, &mut inv), SgStatus::InvalidInput);
        assert!(inv.is_null());
        let ok = sample(c"KJ", 3, 1);
        let mut small = [0.0; 2];
        assert_eq!(sg_invariants_values(ok, small.as_mut_ptr(), small.len()), SgStatus::BufferTooSmall);
        assert!(sg_last_error().is_null() || !last_error().is_empty());
        assert_eq!(sg_invariants_conserved(ptr::null(), small.as_mut_ptr()), SgStatus::NullPointer);
        assert_eq!(sg_invariants_len(ptr::null()), 0);
        sg_invariants_free(ok);
        sg_invariants_free(ptr::null_mut());
    }
    // A successful call clears the message.
    let ok = sample(c"IJ", 3, 1);
    assert!(sg_last_error().is_null());
    unsafe { sg_invariants_free(ok) };
}

#[test]
fn polygons_reconstruct_and_map() {
    let inv = sample(c"KJ", 6, 9);
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(sg_polygon_reconstruct(inv, true, &mut p), SgStatus::Ok);
        assert_eq!(sg_polygon_n(p), 6);
        let mut back = ptr::null_mut();
        assert_eq!(sg_polygon_invariants(p, &mut back), SgStatus::Ok);
        for (a, b) in values(inv).iter().zip(values(back)) {
            assert!((a - b).abs() < 1e-8);
        }
        let mut t = SgSpiralType::None;
        assert_eq!(sg_polygon_spiral(p, 3, 0, 18, &mut t), SgStatus::Ok);

        let (mut img, mut pre) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(sg_polygon_tk(p, 3, false, &mut img), SgStatus::Ok);
        assert_eq!(sg_polygon_tk(img, 3, true, &mut pre), SgStatus::Ok);
        let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
        for i in 0..6 {
            sg_polygon_vertex(p, i, a.as_mut_ptr());
            sg_polygon_vertex(pre, i, b.as_mut_ptr());
            let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            assert!(cross.iter().all(|c| c.abs() < 1e-7), "vertex {i}");
        }
        let mut m = [0.0; 9];
        assert_eq!(sg_polygon_monodromy(p, m.as_mut_ptr()), SgStatus::Ok);
        for h in [p, img, pre] {
            sg_polygon_free(h);
        }
        for h in [inv, back] {
            sg_invariants_free(h);
        }
    }
}

#[test]
fn closed_polygons_and_k_niceness() {
    // Convex pentagon: 2-nice. Three collinear consecutive vertices are refused.
    let convex = [0.0, 0.0, 2.0, 0.0, 3.0, 1.5, 1.0, 3.0, -1.0, 1.5];
    let mut p = ptr::null_mut();
    let mut q = ptr::null_mut();
    unsafe {
        assert_eq!(sg_polygon_new(convex.as_ptr(), 5, ptr::null(), &mut p), SgStatus::Ok);
        assert_eq!(sg_polygon_tk(p, 2, false, &mut q), SgStatus::Ok);
        sg_polygon_free(q);
        sg_polygon_free(p);
        let bad = [0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 0.0, 1.0];
        p = ptr::null_mut();
        assert_eq!(sg_polygon_new(bad.as_ptr(), 4, ptr::null(), &mut p), SgStatus::Degenerate);
        assert!(p.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn orbits_expose_steps_and_drift() {
    let inv = sample(c"KJ", 4, 42);
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(sg_orbit(inv, 200, false, &mut t), SgStatus::Ok);
        assert!(sg_trajectory_completed(t));
        assert_eq!(sg_trajectory_len(t), 201);
        let mut d = [1.0; 4];
        assert_eq!(sg_trajectory_drift(t, d.as_mut_ptr()), SgStatus::Ok);
        assert!(d.iter().all(|v| *v <= 1e-6));
        let mut first = ptr::null_mut();
        assert_eq!(sg_trajectory_step(t, 0, &mut first), SgStatus::Ok);
        assert_eq!(values(first), values(inv));
        let mut none = ptr::null_mut();
        assert_eq!(sg_trajectory_step(t, 201, &mut none), SgStatus::OutOfRange);
        sg_invariants_free(first);
        sg_trajectory_free(t);
        sg_invariants_free(inv);
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let lib_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let lib = lib_dir.join("libspiralgram_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let src = tmp.join("capi_smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "spiralgram.h"
int main(void) {
    SgInvariants *x = NULL, *y = NULL;
    double f0[4], f1[4];
    if (sg_invariants_sample("KJ", 5, 7, &x) != SG_STATUS_OK) return 1;
    if (sg_t3_step(x, false, &y) != SG_STATUS_OK) return 2;
    sg_invariants_conserved(x, f0);
    sg_invariants_conserved(y, f1);
    SgStatus s = sg_invariants_new(NULL, 4, &y);
    if (s != SG_STATUS_NULL_POINTER || sg_last_error() == NULL) return 3;
    printf("%s %.6e %.6e\n", sg_version(), f0[0], f1[0]);
    sg_invariants_free(x);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.join("capi_smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler named cc");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    let parts: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(parts[0], env!("CARGO_PKG_VERSION"));
    assert_eq!(parts[1], parts[2]);
}
