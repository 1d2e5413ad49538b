//! End-to-end verification sweeps over the group catalog. Each test
//! prints one summary line; run with `--nocapture` to see them.

use std::time::Instant;

use fusion_core::battery::{
    commutation_battery, idempotent_battery, nilpotency_battery, ring_battery, section_battery,
    tate_battery, transfer_battery, verlagerung_battery, yoshida_battery, BatteryOutcome,
};

fn report(idx: usize, out: &BatteryOutcome, started: Instant, limit_secs: f64) {
    let secs = started.elapsed().as_secs_f64();
    let status = if out.passed() { "pass" } else { "FAIL" };
    println!("criterion {idx} ({}): {status} - {} cases in {secs:.1}s", out.name, out.cases);
    assert!(out.passed(), "criterion {idx} failures: {:#?}", out.failures);
    assert!(secs < limit_secs, "criterion {idx} took {secs:.1}s, budget {limit_secs}s");
}

#[test]
fn criterion_1_residuals_agree_along_intermediate_realizations() {
    let t = Instant::now();
    let out = tate_battery(100);
    assert!(out.cases >= 60, "sweep too small: {}", out.cases);
    report(1, &out, t, 120.0);
}

#[test]
fn criterion_2_control_failures_have_wreath_witnesses() {
    let t = Instant::now();
    let out = yoshida_battery(100);
    report(2, &out, t, 60.0);
}

#[test]
fn criterion_3_transfer_kernels_projectors_and_scalars() {
    let t = Instant::now();
    let out = transfer_battery(400);
    report(3, &out, t, 60.0);
}

#[test]
fn criterion_4_biset_action_recovers_the_verlagerung() {
    let t = Instant::now();
    let out = verlagerung_battery(400);
    report(4, &out, t, 30.0);
}

#[test]
fn criterion_5_idempotents_at_default_precision() {
    let t = Instant::now();
    let out = idempotent_battery(400);
    report(5, &out, t, 300.0);
}

#[test]
fn criterion_6_idempotents_commute_with_index_restriction() {
    let t = Instant::now();
    let out = commutation_battery(400);
    report(6, &out, t, 120.0);
}

#[test]
fn criterion_7_section_identities_and_hyperfocal_closure() {
    let t = Instant::now();
    let out = section_battery(400);
    report(7, &out, t, 120.0);
}

#[test]
fn criterion_8_nilpotency_readings_coincide() {
    let t = Instant::now();
    let out = nilpotency_battery(400);
    report(8, &out, t, 30.0);
}

#[test]
fn criterion_9_randomized_ring_laws() {
    let t = Instant::now();
    let out = ring_battery(1000, 0x5eed);
    assert!(out.cases >= 1000, "need at least 1000 checks, got {}", out.cases);
    report(9, &out, t, 60.0);
}
