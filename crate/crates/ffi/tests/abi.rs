use std::ffi::CStr;
use std::ptr;

use fermion_shadows_ffi::*;

fn last_error() -> String {
    let p = fs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(fs_channel_eigenvalue(3, 1, &mut x), FsStatus::Ok);
        assert!((x - 0.2).abs() < 1e-15);
        assert!(fs_last_error_message().is_null());

        assert_eq!(fs_shadow_norm_sq(50, 2, &mut x), FsStatus::Ok);
        assert_eq!(x, 3201.0);

        let mut m = 0u64;
        assert_eq!(fs_bernstein_samples(0.1, 0.01, 100, 10.0, &mut m), FsStatus::Ok);
        assert_eq!(m, 20468);

        assert_eq!(fs_eqot(4, 8, &mut m), FsStatus::Ok);
        assert_eq!(m, 1215);
        assert_eq!(fs_strategy_count(FsStrategy::Swap1, 1, 12, &mut m), FsStatus::Ok);
        assert_eq!(m, 25);
        assert_eq!(fs_strategy_count(FsStrategy::Mt2, 2, 8, &mut m), FsStatus::Ok);
        assert_eq!(m, 6833);
        assert_eq!(fs_strategy_count(FsStrategy::Naive, 1, 4, &mut m), FsStatus::Ok);
        assert_eq!(m, 90);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(fs_channel_eigenvalue(3, 4, &mut x), FsStatus::InvalidArgument);
        assert!(last_error().contains("k = 4"));
        assert_eq!(fs_channel_eigenvalue(3, 1, ptr::null_mut()), FsStatus::NullPointer);
        let mut m = 0u64;
        assert_eq!(fs_bernstein_samples(0.0, 0.1, 1, 1.0, &mut m), FsStatus::InvalidArgument);
        assert_eq!(fs_strategy_count(FsStrategy::Naive, 10, 60, &mut m), FsStatus::Overflow);
        // a later success clears the message
        assert_eq!(fs_eqot(2, 4, &mut m), FsStatus::Ok);
        assert!(fs_last_error_message().is_null());
    }
}

#[test]
fn locality_and_nc_norm() {
    unsafe {
        let mut l = 0usize;
        let idx = [0usize, 7];
        assert_eq!(fs_majorana_locality(FsMapping::JordanWigner, 4, idx.as_ptr(), 2, &mut l), FsStatus::Ok);
        assert_eq!(l, 4);
        let bad = [3usize, 1];
        assert_eq!(
            fs_majorana_locality(FsMapping::JordanWigner, 4, bad.as_ptr(), 2, &mut l),
            FsStatus::InvalidArgument
        );
        assert_eq!(fs_majorana_locality(FsMapping::JordanWigner, 4, ptr::null(), 2, &mut l), FsStatus::NullPointer);

        let mut v = 0.0;
        let mu = [0usize, 2];
        assert_eq!(fs_nc_shadow_norm_sq(FsMapping::JordanWigner, 3, mu.as_ptr(), 2, &mut v), FsStatus::Ok);
        assert!((v - 81.0 / 7.0).abs() < 1e-12);
    }
}

#[test]
fn plan_state_rdm_round_trip() {
    unsafe {
        let mut plan: *mut FsPlan = ptr::null_mut();
        assert_eq!(
            fs_plan_new_coverage(4, 1, FsEnsemble::Fgu, FsMapping::JordanWigner, 400, 3, &mut plan),
            FsStatus::Ok
        );
        let mut len = 0usize;
        assert_eq!(fs_plan_len(plan, &mut len), FsStatus::Ok);
        assert!(len >= 400);

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(fs_plan_to_json(plan, &mut json), FsStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        fs_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["settings"].as_array().unwrap().len(), len);

        // FGU settings send Fock states to Fock states, so the spread comes
        // from the finite plan rather than from shots
        let occ = [1u8, 1, 0, 0];
        let mut state: *mut FsState = ptr::null_mut();
        assert_eq!(fs_state_fock(FsMapping::JordanWigner, occ.as_ptr(), 4, &mut state), FsStatus::Ok);

        let mut rdm: *mut FsRdm = ptr::null_mut();
        assert_eq!(fs_estimate_rdm(state, plan, 1, 1, 11, &mut rdm), FsStatus::Ok);
        let mut dim = 0usize;
        assert_eq!(fs_rdm_dim(rdm, &mut dim), FsStatus::Ok);
        assert_eq!(dim, 4);
        let (mut re, mut im) = (0.0, 0.0);
        for (p, &want) in occ.iter().enumerate() {
            assert_eq!(fs_rdm_get(rdm, p, p, &mut re, &mut im), FsStatus::Ok);
            assert!((re - want as f64).abs() < 0.1, "D[{p}][{p}] = {re}");
            assert!(im.abs() < 1e-12);
        }
        assert_eq!(fs_rdm_get(rdm, 4, 0, &mut re, &mut im), FsStatus::InvalidArgument);
        fs_rdm_free(rdm);

        assert_eq!(fs_estimate_rdm(state, plan, 1, 0, 11, &mut rdm), FsStatus::InvalidArgument);

        let mut bk: *mut FsState = ptr::null_mut();
        assert_eq!(fs_state_random(FsMapping::BravyiKitaev, 4, 5, &mut bk), FsStatus::Ok);
        assert_eq!(fs_estimate_rdm(bk, plan, 1, 1, 0, &mut rdm), FsStatus::InvalidArgument);
        assert!(last_error().contains("mappings"));

        fs_state_free(bk);
        fs_state_free(state);
        fs_plan_free(plan);
        fs_plan_free(ptr::null_mut());
    }
}

#[test]
fn same_seed_same_rdm() {
    let run = || unsafe {
        let mut plan = ptr::null_mut();
        assert_eq!(fs_plan_new_coverage(3, 1, FsEnsemble::Nc, FsMapping::BravyiKitaev, 5, 9, &mut plan), FsStatus::Ok);
        let mut state = ptr::null_mut();
        assert_eq!(fs_state_random(FsMapping::BravyiKitaev, 3, 2, &mut state), FsStatus::Ok);
        let mut rdm = ptr::null_mut();
        assert_eq!(fs_estimate_rdm(state, plan, 1, 10, 4, &mut rdm), FsStatus::Ok);
        let mut out = Vec::new();
        for p in 0..3 {
            for q in 0..3 {
                let (mut re, mut im) = (0.0, 0.0);
                fs_rdm_get(rdm, p, q, &mut re, &mut im);
                out.push((re, im));
            }
        }
        fs_rdm_free(rdm);
        fs_state_free(state);
        fs_plan_free(plan);
        out
    };
    assert_eq!(run(), run());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(fs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
