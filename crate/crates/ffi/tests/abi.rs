use std::ffi::{CStr, CString};
use std::ptr;

use algocool_ffi::*;

fn last_error() -> String {
    let p = ac_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { ac_string_free(p) };
    s
}

/// Two levels from 0.01 by iterating (3e - e^3)/2.
const PAC2_TWO_LEVELS: f64 = 0.022497562668744375;

#[test]
fn pac2_run_through_handles() {
    unsafe {
        let mut prog = ptr::null_mut();
        assert_eq!(ac_program_compile_pac2(2, false, &mut prog), AcStatus::Ok);
        assert_eq!(ac_program_n_bits(prog), 5);
        let mut cost = AcCost::default();
        assert_eq!(ac_program_cost(prog, &mut cost), AcStatus::Ok);
        assert!(cost.total_time_steps > 0 && cost.reset_steps > 0);
        let mut target = 0usize;
        assert_eq!(ac_program_target(prog, &mut target), AcStatus::Ok);

        let cfg = ac_thermal_config_ideal(0.01);
        let mut report = ptr::null_mut();
        assert_eq!(ac_run(prog, &cfg, AcMode::Ideal, &mut report), AcStatus::Ok);
        let mut bias = 0.0;
        assert_eq!(
            ac_report_final_bias(report, target, &mut bias),
            AcStatus::Ok
        );
        assert!((bias - PAC2_TWO_LEVELS).abs() < 1e-12, "{bias}");
        assert_eq!(ac_report_n_violations(report), 0);
        assert_eq!(
            ac_report_n_records(report) as u64,
            cost.total_time_steps + 1
        );

        let mut s = ptr::null_mut();
        assert_eq!(ac_report_summary_json(report, &mut s), AcStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
        assert_eq!(json["shannon"]["closed"], false);

        assert_eq!(
            ac_report_final_bias(report, 99, &mut bias),
            AcStatus::BitOutOfRange
        );
        assert!(last_error().contains("99"));

        ac_report_free(report);
        ac_program_free(prog);
    }
}

#[test]
fn jsonl_round_trip() {
    unsafe {
        let mut prog = ptr::null_mut();
        assert_eq!(ac_program_compile_pac1(2, 1, true, &mut prog), AcStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(ac_program_to_jsonl(prog, &mut text), AcStatus::Ok);
        let text = take_string(text);
        let c = CString::new(text.clone()).unwrap();
        let mut again = ptr::null_mut();
        assert_eq!(ac_program_from_jsonl(c.as_ptr(), &mut again), AcStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(ac_program_to_jsonl(again, &mut back), AcStatus::Ok);
        assert_eq!(take_string(back), text);

        let bad = CString::new("{not json").unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(
            ac_program_from_jsonl(bad.as_ptr(), &mut none),
            AcStatus::Parse
        );
        assert!(none.is_null());
        ac_program_free(prog);
        ac_program_free(again);
    }
}

#[test]
fn state_comp3_matches_closed_form() {
    unsafe {
        let eps = 0.2;
        let mut st = ptr::null_mut();
        assert_eq!(
            ac_state_new_thermal([eps; 3].as_ptr(), ptr::null(), 3, &mut st),
            AcStatus::Ok
        );
        let ops = [2usize, 1, 0];
        assert_eq!(
            ac_state_apply_gate(st, AcGateKind::Comp3Perm, ops.as_ptr(), 3),
            AcStatus::Ok
        );
        let mut b = 0.0;
        assert_eq!(ac_state_bias(st, 2, &mut b), AcStatus::Ok);
        // (3(0.2) - 0.008) / 2
        assert!((b - 0.296).abs() < 1e-12);
        assert!((ac_predicted_comp3_bias(eps) - 0.296).abs() < 1e-15);

        let mut probs = [0.0; 8];
        assert_eq!(
            ac_state_probabilities(st, probs.as_mut_ptr(), 8),
            AcStatus::Ok
        );
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(
            ac_state_probabilities(st, probs.as_mut_ptr(), 4),
            AcStatus::InvalidArgument
        );

        // computation bits refuse a reset unless asked
        assert_eq!(ac_state_reset(st, 0, 0.1, false), AcStatus::Policy);
        assert_eq!(ac_state_reset(st, 0, 0.1, true), AcStatus::Ok);
        assert_eq!(ac_state_bias(st, 0, &mut b), AcStatus::Ok);
        assert!((b - 0.1).abs() < 1e-12);
        ac_state_free(st);
    }
}

#[test]
fn relaxation_and_roles() {
    unsafe {
        let roles = [AcRole::Computation, AcRole::Reset];
        let mut st = ptr::null_mut();
        assert_eq!(
            ac_state_new_thermal([0.5, 0.5].as_ptr(), roles.as_ptr(), 2, &mut st),
            AcStatus::Ok
        );
        let cfg = AcThermalConfig {
            eps0: 0.1,
            t1_comp: 2.0,
            t1_reset: 0.5,
            compute_duration: 1.0,
            reset_duration: 1.0,
        };
        assert_eq!(ac_state_relax(st, 1.0, &cfg), AcStatus::Ok);
        let (mut b0, mut b1) = (0.0, 0.0);
        ac_state_bias(st, 0, &mut b0);
        ac_state_bias(st, 1, &mut b1);
        assert!((b0 - (0.1 + 0.4 * (-0.5f64).exp())).abs() < 1e-12);
        assert!((b1 - (0.1 + 0.4 * (-2.0f64).exp())).abs() < 1e-12);
        let bad = AcThermalConfig {
            t1_comp: -1.0,
            ..cfg
        };
        assert_eq!(ac_state_relax(st, 1.0, &bad), AcStatus::InvalidArgument);
        ac_state_free(st);
    }
}

#[test]
fn thermo_and_nulls() {
    unsafe {
        let mut b = 0.0;
        assert_eq!(ac_bias_from_temperature(2.0, 1.0, &mut b), AcStatus::Ok);
        assert!((b - 1f64.tanh()).abs() < 1e-15);
        let mut t = 0.0;
        assert_eq!(ac_temperature_from_bias(2.0, b, &mut t), AcStatus::Ok);
        assert!((t - 1.0).abs() < 1e-12);
        assert_eq!(
            ac_temperature_from_bias(2.0, 0.0, &mut t),
            AcStatus::InvalidArgument
        );
        let mut h = 0.0;
        assert_eq!(ac_entropy_of_bias(0.0, &mut h), AcStatus::Ok);
        assert_eq!(h, 1.0);
        assert!((ac_shannon_bound_bias(7, 0.01) - 7f64.sqrt() * 0.01).abs() < 1e-15);
        assert_eq!(ac_shannon_bound_bias(10_000, 0.1), 1.0);

        assert_eq!(
            ac_program_cost(ptr::null(), ptr::null_mut()),
            AcStatus::NullPointer
        );
        assert_eq!(ac_program_n_bits(ptr::null()), 0);
        assert_eq!(
            ac_bias_from_temperature(1.0, 1.0, ptr::null_mut()),
            AcStatus::NullPointer
        );
        ac_program_free(ptr::null_mut());
        ac_string_free(ptr::null_mut());
    }
}

#[test]
fn cap_is_reported() {
    unsafe {
        let mut prog = ptr::null_mut();
        assert_eq!(
            ac_program_compile_pac1(8, 1, false, &mut prog),
            AcStatus::Ok
        );
        let cfg = ac_thermal_config_ideal(0.01);
        let mut report = ptr::null_mut();
        assert_eq!(
            ac_run(prog, &cfg, AcMode::Ideal, &mut report),
            AcStatus::CapExceeded
        );
        assert!(report.is_null());
        ac_program_free(prog);
    }
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/algocool.h"))
            .unwrap();
    for name in [
        "ac_program_compile_pac2",
        "ac_run",
        "ac_report_final_bias",
        "ac_state_apply_gate",
        "ac_last_error_message",
        "AC_STATUS_CAP_EXCEEDED",
        "typedef struct AcProgram AcProgram",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
