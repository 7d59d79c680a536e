use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use kerrmodes_ffi::*;

fn drude(wp: f64, gamma: f64) -> KmLayer {
    KmLayer {
        model: KmModel::Drude,
        plasma_frequency: wp,
        damping: gamma,
        scale: 0.0,
        eta: KmComplex { re: 0.0, im: 0.0 },
        chi3: KmComplex { re: 1.0, im: 0.0 },
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(km_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn eigenvalues_and_nu_through_the_c_abi() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(km_geometry_two_layer(&drude(0.5, 0.7), &drude(0.5, -0.7), &mut g), KmStatus::Ok);
        let r = KmRegion { re_min: 0.1, re_max: 3.0, im_min: -1.0, im_max: 1.0 };
        let mut buf = [KmComplex { re: 0.0, im: 0.0 }; 4];
        let mut n = 0usize;
        assert_eq!(km_eigs2(1.0, g, &r, buf.as_mut_ptr(), buf.len(), &mut n), KmStatus::Ok);
        let w = buf[..n].iter().find(|w| (w.re - 1.7914).abs() < 1e-3).copied().unwrap();
        let (mut nu, mut nug) = (KmComplex { re: 0.0, im: 0.0 }, KmComplex { re: 0.0, im: 0.0 });
        assert_eq!(km_nu(1.0, g, w, 40.0, 999, &mut nu, &mut nug), KmStatus::Ok);
        assert!((nu.re + 0.257_207_711).abs() < 1e-8 && nu.im.abs() < 1e-10);
        assert!((nug.re - nu.re).abs() < 1e-2);
        km_geometry_free(g);
    }
}

#[test]
fn sandwich_eigenvalues() {
    unsafe {
        let outer = KmLayer { chi3: KmComplex { re: 0.0, im: 0.0 }, ..drude(1.0, -0.5) };
        let core = KmLayer {
            model: KmModel::Constant,
            eta: KmComplex { re: 0.2, im: 0.0 },
            ..outer
        };
        let right = KmLayer { damping: 0.5, ..outer };
        let mut g = ptr::null_mut();
        assert_eq!(km_geometry_sandwich(&outer, &core, &right, 0.7, &mut g), KmStatus::Ok);
        let r = KmRegion { re_min: 0.5, re_max: 5.0, im_min: -0.5, im_max: 0.5 };
        let mut buf = [KmComplex { re: 0.0, im: 0.0 }; 8];
        let mut n = 0;
        assert_eq!(km_eigs3(2.0, g, &r, buf.as_mut_ptr(), buf.len(), &mut n), KmStatus::Ok);
        assert_eq!(n, 5);
        km_geometry_free(g);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(km_geometry_two_layer(ptr::null(), &drude(0.5, 0.7), &mut g), KmStatus::NullPointer);
        assert!(g.is_null());
        assert_eq!(km_geometry_two_layer(&drude(0.5, 0.7), &drude(0.5, -0.7), &mut g), KmStatus::Ok);
        let mut b = ptr::null_mut();
        let w = KmComplex { re: 1.7914, im: 0.0 };
        assert_eq!(km_bifurcate(1.0, g, w, 40.0, 1000, 1e-3, 1e-2, 4, &mut b), KmStatus::InvalidArgument);
        assert!(last_error().contains("N = 1000"), "{}", last_error());
        assert!(b.is_null());
        assert_eq!(km_branch_len(ptr::null()), 0);
        km_branch_free(ptr::null_mut());
        km_geometry_free(g);
    }
}

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/<test binary>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_compiles_and_runs_against_the_static_library() {
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir();
    assert!(lib.join("libkerrmodes_ffi.a").exists(), "static library missing in {}", lib.display());
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("c_api");
    let st = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(here.join("tests/c_api.c"))
        .arg("-I")
        .arg(here.join("include"))
        .arg(lib.join("libkerrmodes_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler (cc) is needed for this test");
    assert!(st.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("c api ok"));
}
