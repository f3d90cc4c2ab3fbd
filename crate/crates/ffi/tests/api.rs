use std::ffi::CStr;
use std::ptr;

use hurstlab_ffi::*;

fn last_error() -> String {
    let p = hl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn params(alpha: f64) -> HlStableParams {
    HlStableParams { alpha, beta: 0.0, gamma: std::f64::consts::FRAC_1_SQRT_2, delta: 0.0 }
}

#[test]
fn sampling_matches_the_library() {
    let mut out = vec![0.0; 64];
    let st = unsafe { hl_sample_stable(&params(1.5), 64, 42, out.as_mut_ptr()) };
    assert_eq!(st, HlStatus::Ok);
    assert!(hl_last_error_message().is_null());
    let direct = hurstlab::sample_stable(
        hurstlab::StableParams::symmetric_unit_variance(1.5).unwrap(),
        64,
        hurstlab::Seed(42),
    )
    .unwrap();
    assert_eq!(out, direct);
}

#[test]
fn invalid_parameters_set_the_message() {
    let mut out = [0.0; 4];
    let st = unsafe { hl_sample_stable(&params(2.5), 4, 1, out.as_mut_ptr()) };
    assert_eq!(st, HlStatus::InvalidParameter);
    assert!(last_error().contains("2.5"));
    let st = unsafe { hl_sample_stable(ptr::null(), 4, 1, out.as_mut_ptr()) };
    assert_eq!(st, HlStatus::NullPointer);
    assert!(last_error().contains("params"));
}

#[test]
fn gaussian_cf() {
    let mut v = HlComplex { re: 0.0, im: 0.0 };
    assert_eq!(unsafe { hl_stable_cf(&params(2.0), 1.0, &mut v) }, HlStatus::Ok);
    assert!((v.re - (-0.5f64).exp()).abs() < 1e-12);
    assert!(v.im.abs() < 1e-12);
    assert_eq!(unsafe { hl_stable_cf(&params(2.0), f64::NAN, &mut v) }, HlStatus::Domain);
}

#[test]
fn estimate_with_default_and_custom_config() {
    let ramp = vec![1.0; 100];
    let ghe = HlMethodSpec { method: HlMethod::Ghe, q: 2.0 };
    let mut est = HlEstimate { hurst: 0.0, slope: 0.0, intercept: 0.0, r_squared: 0.0, n_points: 0 };
    let st = unsafe { hl_estimate(ramp.as_ptr(), ramp.len(), &ghe, ptr::null(), &mut est) };
    assert_eq!(st, HlStatus::Ok);
    assert!((est.hurst - 1.0).abs() < 1e-12);
    assert_eq!(est.n_points, 19);

    let mut settings = hl_estimator_settings_default();
    assert_eq!(settings.ghe_tau_max, 19);
    settings.ghe_tau_max = 10;
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { hl_config_new(&settings, &mut cfg) }, HlStatus::Ok);
    let st = unsafe { hl_estimate(ramp.as_ptr(), ramp.len(), &ghe, cfg, &mut est) };
    assert_eq!(st, HlStatus::Ok);
    assert_eq!(est.n_points, 10);
    let mut back = hl_estimator_settings_default();
    assert_eq!(unsafe { hl_config_settings(cfg, &mut back) }, HlStatus::Ok);
    assert_eq!(back, settings);
    unsafe { hl_config_free(cfg) };

    settings.ghe_tau_min = 20;
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { hl_config_new(&settings, &mut bad) }, HlStatus::InvalidParameter);
    assert!(bad.is_null());
}

#[test]
fn estimate_errors_map_to_codes() {
    let zeros = vec![0.0; 256];
    let rs = HlMethodSpec { method: HlMethod::Rs, q: 1.0 };
    let mut est = HlEstimate { hurst: 0.0, slope: 0.0, intercept: 0.0, r_squared: 0.0, n_points: 0 };
    let st = unsafe { hl_estimate(zeros.as_ptr(), zeros.len(), &rs, ptr::null(), &mut est) };
    assert_eq!(st, HlStatus::DegenerateSeries);
    assert!(last_error().contains("degenerate"));
    let st = unsafe { hl_estimate(ptr::null(), 0, &rs, ptr::null(), &mut est) };
    assert_eq!(st, HlStatus::EmptyInput);
    let bad_q = HlMethodSpec { method: HlMethod::Ghe, q: -1.0 };
    let st = unsafe { hl_estimate(zeros.as_ptr(), zeros.len(), &bad_q, ptr::null(), &mut est) };
    assert_eq!(st, HlStatus::InvalidParameter);
}

#[test]
fn mc_table_round_trip() {
    let alphas = [1.5, 2.0];
    let lengths = [9u32];
    let methods = [
        HlMethodSpec { method: HlMethod::Rs, q: 1.0 },
        HlMethodSpec { method: HlMethod::Ghe, q: 2.0 },
    ];
    let mut table = ptr::null_mut();
    let st = unsafe {
        hl_mc_run(
            alphas.as_ptr(), 2, lengths.as_ptr(), 1, methods.as_ptr(), 2, 20, 7, ptr::null(), &mut table,
        )
    };
    assert_eq!(st, HlStatus::Ok);
    assert_eq!(unsafe { hl_mc_table_len(table) }, 4);
    let mut cell = std::mem::MaybeUninit::<HlMcCell>::uninit();
    assert_eq!(unsafe { hl_mc_table_cell(table, 0, cell.as_mut_ptr()) }, HlStatus::Ok);
    let cell = unsafe { cell.assume_init() };
    assert_eq!(cell.method.method, HlMethod::Rs);
    assert_eq!(cell.alpha, 1.5);
    assert_eq!(cell.n_effective, 20);
    assert!(cell.q025 <= cell.mean && cell.mean <= cell.q975);
    let mut dummy = cell;
    assert_eq!(unsafe { hl_mc_table_cell(table, 4, &mut dummy) }, HlStatus::OutOfRange);

    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { hl_mc_table_csv(table, &mut csv) }, HlStatus::Ok);
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    unsafe { hl_string_free(csv) };
    assert!(text.starts_with("alpha,log2_length,method,q,mean"));
    assert_eq!(text.lines().count(), 5);
    unsafe { hl_mc_table_free(table) };

    let bad_alpha = [0.9];
    let mut t2 = ptr::null_mut();
    let st = unsafe {
        hl_mc_run(bad_alpha.as_ptr(), 1, lengths.as_ptr(), 1, methods.as_ptr(), 2, 5, 1, ptr::null(), &mut t2)
    };
    assert_eq!(st, HlStatus::InvalidParameter);
    assert!(t2.is_null());
    unsafe { hl_mc_table_free(ptr::null_mut()) };
    unsafe { hl_string_free(ptr::null_mut()) };
}
