use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use epitaxy_bvp_ffi::*;

#[test]
fn integrate_zero_shot_and_read_samples() {
    let problem = ebvp_problem_default(0.0, EbvpKind::Dirichlet);
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(ebvp_integrate(&problem, 0.0, &mut traj), EbvpStatus::Ok);
        assert_eq!(ebvp_trajectory_len(traj), problem.grid_n + 1);
        assert!(!ebvp_trajectory_diverged(traj));
        let (mut t, mut u, mut du) = (0.0, 1.0, 1.0);
        assert_eq!(ebvp_trajectory_get(traj, problem.grid_n, &mut t, &mut u, &mut du), EbvpStatus::Ok);
        assert_eq!((t, u, du), (0.5, 0.0, 0.0));
        assert_eq!(
            ebvp_trajectory_get(traj, problem.grid_n + 1, &mut t, &mut u, &mut du),
            EbvpStatus::IndexOutOfRange
        );
        let mut report = EbvpValidation::default();
        assert_eq!(ebvp_validate(traj, &mut report), EbvpStatus::Ok);
        assert_eq!(report.first_integral_resid, 0.0);
        ebvp_trajectory_free(traj);
    }
}

#[test]
fn roots_match_library() {
    let problem = ebvp_problem_default(100.0, EbvpKind::Dirichlet);
    let mut roots = ptr::null_mut();
    unsafe {
        assert_eq!(ebvp_find_roots(&problem, &mut roots), EbvpStatus::Ok);
        assert_eq!(ebvp_root_set_len(roots), 2);
        let (mut a, mut sign) = (0.0, 0i8);
        assert_eq!(ebvp_root_set_get(roots, 0, &mut a, &mut sign), EbvpStatus::Ok);
        assert!((a - -108.52567290).abs() < 1e-6);
        assert_eq!(sign, -1);
        ebvp_root_set_free(roots);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let mut problem = ebvp_problem_default(1.0, EbvpKind::Navier);
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(ebvp_integrate(&problem, 2.0, &mut traj), EbvpStatus::Precondition);
        assert!(traj.is_null());
        assert!(last_error_message().contains("slope"));
        problem.eps = 0.7;
        assert_eq!(ebvp_integrate(&problem, -1.0, &mut traj), EbvpStatus::Precondition);
        assert_eq!(ebvp_integrate(ptr::null(), -1.0, &mut traj), EbvpStatus::NullPointer);
        let (mut c0, mut n) = (0.0, 0usize);
        assert_eq!(ebvp_fixed_point_c0(500.0, &mut c0, &mut n), EbvpStatus::Precondition);
        assert_eq!(ebvp_fixed_point_c0(384.0, &mut c0, &mut n), EbvpStatus::Ok);
        assert!((c0 - 192.0).abs() < 1e-9);
        assert_eq!(last_error_message(), "");
        ebvp_trajectory_free(ptr::null_mut());
        ebvp_string_free(ptr::null_mut());
    }
}

#[test]
fn certify_returns_json() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(ebvp_certify(12.0, EbvpKind::Navier, &mut out), EbvpStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        ebvp_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 3);
        assert_eq!(arr[1]["kind"], "NonexistNavier");
        assert_eq!(arr[1]["verdict"], "Nonexistence");
    }
    assert!((ebvp_universal_bound() - 631.654_681_669_718_9).abs() < 1e-9);
}

#[test]
fn fold_and_monotone_solver() {
    let problem = ebvp_problem_default(9.0, EbvpKind::Navier);
    let (mut lo, mut hi) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            ebvp_locate_fold(&problem, 9.0, 128.0 / 11.0, 0.05, &mut lo, &mut hi),
            EbvpStatus::Ok
        );
        assert!(hi - lo <= 0.05 && lo >= 9.0 && hi <= 128.0 / 11.0);
        let mut traj = ptr::null_mut();
        assert_eq!(ebvp_monotone_solve(&problem, &mut traj), EbvpStatus::Ok);
        assert!(ebvp_trajectory_len(traj) > 1000);
        ebvp_trajectory_free(traj);
        let bad = ebvp_problem_default(10.0, EbvpKind::Navier);
        assert_eq!(ebvp_monotone_solve(&bad, &mut traj), EbvpStatus::Precondition);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/epitaxy_bvp.h"))
        .unwrap();
    for name in [
        "ebvp_integrate",
        "ebvp_find_roots",
        "ebvp_locate_fold",
        "ebvp_certify",
        "ebvp_fixed_point_c0",
        "ebvp_universal_bound",
        "ebvp_monotone_solve",
        "ebvp_last_error",
        "typedef struct EbvpTrajectory EbvpTrajectory",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compile and run a small C program against the generated header and the
/// static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    // test binaries live next to the freshly built library in `deps/`
    let lib = exe.parent().unwrap().join("libepitaxy_bvp_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ebvp_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg(format!("-I{}", manifest.join("include").display()))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "smoke program failed: {stdout}");
    assert!(stdout.contains("roots 2"), "{stdout}");
}
