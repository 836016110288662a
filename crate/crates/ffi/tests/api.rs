use std::ffi::{CStr, CString};
use std::ptr;

use singlecopy_ffi::*;

fn last_error() -> String {
    let p = sc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn bounds_roundtrip() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(sc_chernoff_bound(1.0 / 3.0, 8, 2.0 / 3.0, &mut out), ScStatus::Ok);
        assert!((out - (2.0f64 / 3.0).powi(8)).abs() < 1e-12);
        assert_eq!(sc_mcdiarmid_constants(3, 2, 1.0, &mut out), ScStatus::Ok);
        assert!((out - 1.0 / 648.0).abs() < 1e-15);
        assert_eq!(sc_ground_state_bound(100, 0.5, 0.25, 4.0, &mut out), ScStatus::Ok);
        assert!((out - 0.36).abs() < 1e-12);
        assert_eq!(sc_kl_divergence(0.5, 0.0, &mut out), ScStatus::InvalidArgument);
    }
    assert!(last_error().contains("outside (0, 1)"));
}

#[test]
fn null_out_pointer_is_reported() {
    let status = unsafe { sc_chernoff_bound(0.1, 8, 2.0 / 3.0, ptr::null_mut()) };
    assert_eq!(status, ScStatus::NullPointer);
    assert!(last_error().contains("null"));
}

#[test]
fn partition_counts() {
    let mut count = 0u64;
    for (n, l, expect) in [(8, 2, 12), (24, 8, 3), (25, 8, 25), (26, 8, 117)] {
        assert_eq!(unsafe { sc_count_regular(n, l, &mut count) }, ScStatus::Ok);
        assert_eq!(count, expect);
    }
}

#[test]
fn singlet_campaign_handle() {
    let state = CString::new("target").unwrap();
    let mut campaign: *mut ScCampaign = ptr::null_mut();
    let status = unsafe { sc_campaign_run(ScScheme::Singlet, 8, 0, 1, 42, state.as_ptr(), f64::NAN, 1, &mut campaign) };
    assert_eq!(status, ScStatus::Ok);
    let mut summary = ScSummary::default();
    let mut success = false;
    unsafe {
        assert_eq!(sc_campaign_summary(campaign, &mut summary), ScStatus::Ok);
        assert_eq!(sc_campaign_record_success(campaign, 0, &mut success), ScStatus::Ok);
        assert_eq!(sc_campaign_record_success(campaign, 1, &mut success), ScStatus::InvalidArgument);
    }
    assert!(success);
    assert_eq!((summary.trials, summary.successes), (1, 1));
    assert!((summary.bound - (2.0f64 / 3.0).powi(8)).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("r.jsonl").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { sc_campaign_export(campaign, path.as_ptr(), ScFormat::JsonLines) }, ScStatus::Ok);
    let text = std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 1);
    unsafe { sc_campaign_free(campaign) };
}

#[test]
fn campaign_config_errors() {
    let bad = CString::new("mixed").unwrap();
    let mut campaign: *mut ScCampaign = ptr::null_mut();
    let status = unsafe { sc_campaign_run(ScScheme::Lcs, 24, 8, 1, 0, bad.as_ptr(), f64::NAN, 0, &mut campaign) };
    assert_eq!(status, ScStatus::Config);
    assert!(campaign.is_null());

    let target = CString::new("target").unwrap();
    let status = unsafe { sc_campaign_run(ScScheme::Lcs, 3, 1, 1, 0, target.as_ptr(), f64::NAN, 0, &mut campaign) };
    assert_eq!(status, ScStatus::Config);
    let status = unsafe { sc_campaign_run(ScScheme::Lcs, 24, 8, 1, 0, ptr::null(), f64::NAN, 0, &mut campaign) };
    assert_eq!(status, ScStatus::NullPointer);
}

#[test]
fn hamiltonian_campaign_handle() {
    let json = CString::new(r#"{"n":4,"L":1,"terms":[{"sites":[0],"paulis":{"Z":1}},{"sites":[1],"paulis":{"Z":1}},{"sites":[2],"paulis":{"Z":1}},{"sites":[3],"paulis":{"Z":1}}]}"#).unwrap();
    let state = CString::new("target").unwrap();
    let mut campaign: *mut ScCampaign = ptr::null_mut();
    let status =
        unsafe { sc_campaign_run_hamiltonian(json.as_ptr(), 8, 50, 1, state.as_ptr(), f64::NAN, 0, &mut campaign) };
    assert_eq!(status, ScStatus::Ok, "{}", last_error());
    let mut summary = ScSummary::default();
    unsafe {
        assert_eq!(sc_campaign_summary(campaign, &mut summary), ScStatus::Ok);
        sc_campaign_free(campaign);
    }
    assert_eq!(summary.trials, 50);
}

#[test]
fn tableau_handle() {
    let mut t: *mut ScTableau = ptr::null_mut();
    unsafe {
        assert_eq!(sc_tableau_new_lcs(6, 5, &mut t), ScStatus::Ok);
        assert_eq!(sc_tableau_num_qubits(t), 6);
        let mut det = 0i32;
        assert_eq!(sc_tableau_deterministic(t, 2, b'Z' as _, &mut det), ScStatus::Ok);
        assert_eq!(det, -1);
        let mut bit = 9u8;
        assert_eq!(sc_tableau_measure(t, 2, b'Z' as _, &mut bit), ScStatus::Ok);
        assert!(bit <= 1);
        assert_eq!(sc_tableau_deterministic(t, 2, b'Z' as _, &mut det), ScStatus::Ok);
        assert_eq!(det, i32::from(bit));
        assert_eq!(sc_tableau_measure(t, 2, b'Q' as _, &mut bit), ScStatus::InvalidArgument);
        assert_eq!(sc_tableau_measure(t, 9, b'X' as _, &mut bit), ScStatus::Simulation);
        sc_tableau_free(t);
        sc_tableau_free(ptr::null_mut());
    }
}
