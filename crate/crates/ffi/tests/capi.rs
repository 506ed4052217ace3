use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use hermite_cd_ffi::*;

fn last_error() -> String {
    let p = hcd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn mesh_handle_lifecycle() {
    let mut mesh = ptr::null_mut();
    assert_eq!(unsafe { hcd_mesh_new(1, 8, &mut mesh) }, HcdStatus::Ok);
    let (mut v, mut e, mut t) = (0, 0, 0);
    assert_eq!(unsafe { hcd_mesh_counts(mesh, &mut v, &mut e, &mut t) }, HcdStatus::Ok);
    assert_eq!((v, e, t), (81, 208, 128));
    let mut coords = vec![0.0; 2 * v as usize];
    assert_eq!(unsafe { hcd_mesh_copy_vertices(mesh, coords.as_mut_ptr(), 3) }, HcdStatus::InvalidArgument);
    assert_eq!(unsafe { hcd_mesh_copy_vertices(mesh, coords.as_mut_ptr(), coords.len()) }, HcdStatus::Ok);
    assert_eq!(&coords[..4], &[0.0, 0.0, 0.125, 0.0]);
    unsafe { hcd_mesh_free(mesh) };
    unsafe { hcd_mesh_free(ptr::null_mut()) };
}

#[test]
fn run_case_matches_library() {
    let mut r = HcdErrorReport::default();
    assert_eq!(unsafe { hcd_run_case(1, HcdMethod::HA, 1.0, 8, HcdSourceMode::FixedF, &mut r) }, HcdStatus::Ok);
    let p = hermite_cd::builtin_problem(1, 1.0, hermite_cd::SourceMode::FixedF).unwrap();
    let lib = hermite_cd::run_case(&p, hermite_cd::Method::HA, 8, 6, 10).unwrap();
    assert_eq!(r.e_u, lib.e_u);
    assert_eq!(r.dofs, lib.dofs as u64);
}

#[test]
fn solution_handle_exposes_dofs_and_errors() {
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { hcd_solve(2, HcdMethod::A, 1.0, 4, HcdSourceMode::FixedF, &mut sol) }, HcdStatus::Ok);
    let n = unsafe { hcd_solution_dof_count(sol) } as usize;
    assert!(n > 0);
    let mut dofs = vec![f64::NAN; n];
    assert_eq!(unsafe { hcd_solution_copy_dofs(sol, dofs.as_mut_ptr(), n) }, HcdStatus::Ok);
    assert!(dofs.iter().all(|d| d.is_finite()));
    let mut r = HcdErrorReport::default();
    assert_eq!(unsafe { hcd_solution_errors(sol, &mut r) }, HcdStatus::Ok);
    assert!(r.e_u > 0.0 && r.dofs as usize <= n);
    unsafe { hcd_solution_free(sol) };
    assert_eq!(unsafe { hcd_solution_dof_count(ptr::null()) }, 0);
}

#[test]
fn errors_carry_status_and_message() {
    let mut r = HcdErrorReport::default();
    assert_eq!(unsafe { hcd_run_case(7, HcdMethod::A, 1.0, 4, HcdSourceMode::FixedF, &mut r) }, HcdStatus::InvalidArgument);
    assert!(last_error().contains("unknown test problem 7"));
    assert_eq!(unsafe { hcd_run_case(1, HcdMethod::A, 1.0, 0, HcdSourceMode::FixedF, &mut r) }, HcdStatus::InvalidArgument);
    assert_eq!(unsafe { hcd_run_case(1, HcdMethod::A, 1.0, 4, HcdSourceMode::FixedF, ptr::null_mut()) }, HcdStatus::NullPointer);
    // the disk systems are near singular at moderate Peclet numbers
    assert_eq!(unsafe { hcd_run_case(2, HcdMethod::HA, 100.0, 16, HcdSourceMode::FixedF, &mut r) }, HcdStatus::SolverFailure);
    assert!(last_error().contains("residual"));
    let mut alpha = 0.0;
    assert_eq!(unsafe { hcd_infsup(1, 1.0, 32, false, &mut alpha) }, HcdStatus::Numerical);
}

#[test]
fn infsup_through_c_abi() {
    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(unsafe { hcd_infsup(1, 0.0, 2, false, &mut a) }, HcdStatus::Ok);
    assert_eq!(unsafe { hcd_infsup(1, 0.0, 2, true, &mut b) }, HcdStatus::Ok);
    assert!(a > 0.0);
    assert_eq!(a, b);
}

#[test]
fn header_declares_exports_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("hermite_cd.h");
    let text = std::fs::read_to_string(&header).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src").join("lib.rs")).unwrap();
    for name in src.lines().filter_map(|l| l.split("extern \"C\" fn ").nth(1)).map(|r| r.split('(').next().unwrap()) {
        assert!(text.contains(&format!("{name}(")), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("use.c");
    std::fs::write(
        &c,
        "#include \"hermite_cd.h\"\nint main(void) { HcdErrorReport r; HcdStatus s = hcd_run_case(1, HCD_METHOD_HA, 1.0, 8, HCD_SOURCE_MODE_FIXED_F, &r); return s == HCD_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&c)
        .status()
        .expect("a C compiler is required for the header check");
    assert!(status.success());
}
