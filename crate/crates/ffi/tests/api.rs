use icsim_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn params() -> IcsimParams {
    IcsimParams {
        h: 1.0,
        b: 1.0,
        sigma: 1.0,
        m: 4,
        k: 8,
        r: 4,
    }
}

fn last_error() -> String {
    let p = icsim_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_problem(kind: IcsimInstanceKind) -> *mut IcsimProblem {
    let mut out = ptr::null_mut();
    let s = unsafe { icsim_problem_new(kind as i32, &params(), &mut out) };
    assert_eq!(s, IcsimStatus::Ok);
    out
}

#[test]
fn eval_matches_library() {
    let p = new_problem(IcsimInstanceKind::Chain);
    let mut n = 0;
    assert_eq!(unsafe { icsim_problem_dim(p, &mut n) }, IcsimStatus::Ok);
    let direct = icsim::instances::choose_chain_parameters(
        &icsim::ProblemParams::new(1.0, 1.0, 1.0, 4, 8, 4).unwrap(),
    )
    .unwrap();
    assert_eq!(n, direct.n);

    let x: Vec<f64> = (0..n).map(|i| 0.01 * i as f64).collect();
    let mut g = vec![0.0; n];
    let mut f = 0.0;
    assert_eq!(
        unsafe { icsim_problem_eval(p, x.as_ptr(), n, &mut f, g.as_mut_ptr()) },
        IcsimStatus::Ok
    );
    let (f2, g2) = direct.eval(&x).unwrap();
    assert_eq!(f, f2);
    assert_eq!(g, g2.into_vec());

    let mut fs = 0.0;
    assert_eq!(unsafe { icsim_problem_f_star(p, &mut fs) }, IcsimStatus::Ok);
    assert_eq!(fs, direct.f_star());
    unsafe { icsim_problem_free(p) };
}

#[test]
fn draws_are_reproducible() {
    let p = new_problem(IcsimInstanceKind::ChainTwoPoint);
    let mut n = 0;
    unsafe { icsim_problem_dim(p, &mut n) };
    let x = vec![0.0; n];
    let draw = || {
        let mut g = vec![0.0; n];
        let mut v = 0.0;
        let mut z = IcsimOutcome::Noise;
        let s = unsafe {
            icsim_problem_draw(p, x.as_ptr(), n, 9, 1, 2, 3, g.as_mut_ptr(), &mut v, &mut z)
        };
        assert_eq!(s, IcsimStatus::Ok);
        (g, v.is_nan(), z)
    };
    let a = draw();
    assert_eq!(a, draw());
    assert!(a.1, "two-point oracle is first-order only");
    assert!(matches!(a.2, IcsimOutcome::Z0 | IcsimOutcome::Z1));
    unsafe { icsim_problem_free(p) };
}

#[test]
fn run_round_trip() {
    let p = new_problem(IcsimInstanceKind::NoisyQuadratic);
    let mut res = ptr::null_mut();
    assert_eq!(
        unsafe { icsim_run(p, IcsimAlgorithm::LocalSgd as i32, &params(), 4, &mut res) },
        IcsimStatus::Ok
    );
    let mut rounds = 0;
    assert_eq!(
        unsafe { icsim_run_result_rounds(res, &mut rounds) },
        IcsimStatus::Ok
    );
    assert_eq!(rounds, 4);
    let mut buf = vec![0.0; rounds];
    assert_eq!(
        unsafe { icsim_run_result_suboptimality(res, buf.as_mut_ptr(), rounds) },
        IcsimStatus::Ok
    );
    assert!(buf.iter().all(|v| v.is_finite() && *v >= 0.0));
    let mut short = vec![0.0; 2];
    assert_eq!(
        unsafe { icsim_run_result_suboptimality(res, short.as_mut_ptr(), 2) },
        IcsimStatus::DimensionMismatch
    );
    let mut prog = 99;
    assert_eq!(
        unsafe { icsim_run_result_max_prog(res, &mut prog) },
        IcsimStatus::Ok
    );
    unsafe {
        icsim_run_result_free(res);
        icsim_problem_free(p);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { icsim_problem_new(17, &params(), &mut out) },
        IcsimStatus::InvalidArgument
    );
    assert!(last_error().contains("17"));
    assert_eq!(
        unsafe { icsim_problem_new(0, ptr::null(), &mut out) },
        IcsimStatus::NullPointer
    );
    let bad = IcsimParams {
        h: -1.0,
        ..params()
    };
    assert_eq!(
        unsafe { icsim_problem_new(0, &bad, &mut out) },
        IcsimStatus::InvalidArgument
    );
    assert!(out.is_null());

    let p = new_problem(IcsimInstanceKind::Chain);
    let x = [0.0; 3];
    let mut f = 0.0;
    assert_eq!(
        unsafe { icsim_problem_eval(p, x.as_ptr(), 3, &mut f, ptr::null_mut()) },
        IcsimStatus::DimensionMismatch
    );
    unsafe {
        icsim_problem_free(p);
        icsim_problem_free(ptr::null_mut());
        icsim_run_result_free(ptr::null_mut());
        icsim_string_free(ptr::null_mut());
    }
}

#[test]
fn problem_from_json_descriptor() {
    let json = CString::new(r#"{"kind": "chain", "N": 12}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { icsim_problem_from_json(json.as_ptr(), &params(), &mut out) },
        IcsimStatus::Ok
    );
    let mut n = 0;
    unsafe { icsim_problem_dim(out, &mut n) };
    assert_eq!(n, 12);
    unsafe { icsim_problem_free(out) };

    let bad = CString::new(r#"{"kind": "chain", "bogus": 1}"#).unwrap();
    assert_eq!(
        unsafe { icsim_problem_from_json(bad.as_ptr(), &params(), &mut out) },
        IcsimStatus::Config
    );
}

#[test]
fn verify_through_c_abi() {
    let cfg = CString::new(
        r#"{"instance": {"kind": "quadratic_plus"}, "params": {"H": 1, "B": 1, "sigma": 1, "M": 2, "K": 4, "R": 2},
            "checks": {"fd_points": 5, "pairs": 100, "moment_points": 2, "moment_draws": 2000}}"#,
    )
    .unwrap();
    let mut text = ptr::null_mut();
    let mut passed = -1;
    assert_eq!(
        unsafe { icsim_verify(cfg.as_ptr(), &mut text, &mut passed) },
        IcsimStatus::Ok
    );
    assert_eq!(passed, 1);
    let s = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    assert!(s.lines().count() >= 3);
    unsafe { icsim_string_free(text) };

    let broken = CString::new("{").unwrap();
    assert_eq!(
        unsafe { icsim_verify(broken.as_ptr(), &mut text, &mut passed) },
        IcsimStatus::Config
    );
}

#[test]
fn budget_helpers() {
    let mut d = 0u64;
    assert_eq!(
        unsafe { icsim_required_dimension(&params(), &mut d) },
        IcsimStatus::Ok
    );
    assert!(d > 0);
    let mut b = 0usize;
    assert_eq!(
        unsafe { icsim_progress_budget(&params(), 0.1, &mut b) },
        IcsimStatus::Ok
    );
    assert!(b >= 1);
    assert_eq!(
        unsafe { icsim_progress_budget(&params(), 1.5, &mut b) },
        IcsimStatus::InvalidArgument
    );
}
