//! Acceptance gate: one test per criterion, each printing its pass/fail line
//! (visible under --nocapture, or in the failure report). Tolerances and
//! grids are the full ones; runtime budgets are enforced inside the runner.

use zeta_sampler_cli::acceptance::{render_line, run_criterion};

fn check(index: usize) {
    let outcome = run_criterion(index, false, 42);
    println!("{}", render_line(&outcome));
    assert!(
        outcome.pass,
        "criterion {} ({}) failed: {}",
        outcome.index, outcome.name, outcome.detail
    );
}

#[test]
fn criterion_01_characteristic_function_law() {
    check(1);
}

#[test]
fn criterion_02_sampler_moments() {
    check(2);
}

#[test]
fn criterion_03_zeta_cross_validation() {
    check(3);
}

#[test]
fn criterion_04_first_moment_near_one() {
    check(4);
}

#[test]
fn criterion_05_second_moment_growth() {
    check(5);
}

#[test]
fn criterion_06_decomposition_identity() {
    check(6);
}

#[test]
fn criterion_07_diagonal_sums() {
    check(7);
}

#[test]
fn criterion_08_van_der_corput_corpus() {
    check(8);
}

#[test]
fn criterion_09_band_sums() {
    check(9);
}

#[test]
fn criterion_10_reproducibility() {
    check(10);
}
