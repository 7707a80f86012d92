//! Acceptance gate: one test per verification check, each printing a single
//! pass/fail line with the measured numbers.

use ckbrownian::verify::{self, CheckReport};

fn gate(report: CheckReport) {
    println!(
        "{} {}: {}",
        if report.passed { "PASS" } else { "FAIL" },
        report.name,
        report.detail
    );
    assert!(report.passed, "{}: {}", report.name, report.detail);
}

#[test]
fn criterion_1_width_saturation() {
    gate(verify::width_saturation());
}

#[test]
fn criterion_2_free_spreading() {
    gate(verify::free_spreading());
}

#[test]
fn criterion_3_constant_force_center() {
    gate(verify::constant_force_center());
}

#[test]
fn criterion_4_diffusion_law() {
    gate(verify::diffusion_law());
}

#[test]
fn criterion_5_uncertainty_decomposition() {
    gate(verify::uncertainty_decomposition());
}

#[test]
fn criterion_6_ehrenfest_order() {
    gate(verify::ehrenfest_order());
}

#[test]
fn criterion_7_unitarity_and_convergence() {
    gate(verify::unitarity_and_convergence());
}

#[test]
fn criterion_8_propagator_composition() {
    gate(verify::propagator_composition());
}

#[test]
fn criterion_9_mode_orthonormality() {
    gate(verify::mode_orthonormality());
}
