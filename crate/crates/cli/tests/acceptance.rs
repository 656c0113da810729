//! The acceptance gate: one test per criterion, each printing its
//! `ACCEPT cNN PASS/FAIL` line (run with `--nocapture` to see them all,
//! or use `greenfn verify`, which runs the same checks).

use greenfn_cli::accept::run_criterion;
use std::path::Path;

fn run(id: usize) {
    let outcome = run_criterion(id, Path::new(env!("CARGO_BIN_EXE_greenfn")));
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn c01_leading_constant_d3_axis() {
    run(1);
}

#[test]
fn c02_leading_constant_d5_axis() {
    run(2);
}

#[test]
fn c03_pipeline_matches_series_and_walk_oracles() {
    run(3);
}

#[test]
fn c04_decomposition_matches_dense_grid_route() {
    run(4);
}

#[test]
fn c05_subtraction_i1_matches_convolution_i1() {
    run(5);
}

#[test]
fn c06_i1_routes_agree_within_stated_errors() {
    run(6);
}

#[test]
fn c07_decay_exponent_fits_d3_and_d5() {
    run(7);
}

#[test]
fn c08_u_field_decay_and_family_bound() {
    run(8);
}

#[test]
fn c09_weighted_outer_integral_shrinks() {
    run(9);
}

#[test]
fn c10_bound_ratio_stability() {
    run(10);
}

#[test]
fn c11_mass_identity_of_smoothed_field() {
    run(11);
}

#[test]
fn c12_byte_identical_reruns() {
    run(12);
}
