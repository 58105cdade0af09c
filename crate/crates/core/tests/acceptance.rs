//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line with its worst measurement. Tolerances are pinned here.

use std::io::Write;

use tdsusy::verify::{
    factorization_checks, family_checks, intertwining_checks, inverse_checks, known_value_checks,
    pde_checks, regularity_checks, seed_checks, superalgebra_checks, Check, Limit,
};

const RATIO_WINDOW: (f64, f64) = (3.5, 4.5);

/// Prints the criterion line (bypassing the harness's capture) and the
/// failing checks, then fails the test if any check failed.
fn gate(criterion: u32, title: &str, checks: Vec<Check>) {
    assert!(!checks.is_empty(), "criterion {criterion} produced no checks");
    let failures: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    let worst = checks
        .iter()
        .filter(|c| matches!(c.limit, Limit::AtMost { .. }))
        .max_by(|a, b| margin(a).total_cmp(&margin(b)));
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!(
        "[acceptance] {status} criterion {criterion}: {title} ({} checks, {} failed)",
        checks.len(),
        failures.len()
    );
    if let Some(w) = worst {
        line.push_str(&format!("; closest to its bound: {} = {}", w.name, shown(w)));
    }
    line.push('\n');
    for f in &failures {
        line.push_str(&format!("    {f}\n"));
    }
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(failures.is_empty(), "criterion {criterion} failed: {} of {} checks", failures.len(), checks.len());
}

fn margin(c: &Check) -> f64 {
    match (c.measured, c.limit) {
        (Some(v), Limit::AtMost { value }) if value > 0.0 => v / value,
        (Some(v), Limit::AtMost { .. }) => v,
        _ => f64::INFINITY,
    }
}

fn shown(c: &Check) -> String {
    match c.measured {
        Some(v) => format!("{v:.3e} ({})", c.limit),
        None => c.error.clone().unwrap_or_default(),
    }
}

#[test]
fn cataloged_seeds_solve_their_equations() {
    gate(1, "seed validity, FD residual <= 1e-5 at tau = 1e-3 with O(tau^2) ratio", seed_checks(1e-5, RATIO_WINDOW));
}

#[test]
fn transformed_states_solve_the_transformed_equation() {
    gate(2, "intertwining for N = 1, 2 over both seed potentials, residual <= 1e-4", intertwining_checks(1e-4, RATIO_WINDOW));
}

#[test]
fn closed_form_families_match_the_engine() {
    gate(3, "closed-form families agree with the engine to 1e-8; printed variants rejected", family_checks(1e-8, 1e-3));
}

#[test]
fn documented_values_are_reproduced() {
    gate(4, "known values: free-even k=0, free gauge factor, J golden values", known_value_checks(1e-12, 1e-9));
}

#[test]
fn stationary_chains_factorize() {
    gate(5, "factorization for the omega = 1 oscillator, residual <= 1e-8", factorization_checks(1e-8));
}

#[test]
fn inverse_operator_inverts_the_chain() {
    gate(6, "inverse operator: LM and ML are the identity to 1e-6", inverse_checks(1e-6));
}

#[test]
fn superalgebra_relations_hold() {
    gate(7, "superalgebra: Q^2 = 0, {Q,Q+} to 1e-9, {P0,Q_g} to 1e-6", superalgebra_checks(1e-9, 1e-6));
}

#[test]
fn krein_admissibility_and_degeneracy() {
    gate(8, "regularity and degeneracy: sign scans, annihilation to 1e-10, norms within 1%", regularity_checks(1e-10, 1e-2));
}

#[test]
fn crank_nicolson_matches_references() {
    gate(9, "independent PDE check: L2 errors <= 1e-3 and 5e-3, norm drift <= 1e-8", pde_checks(1e-3, 5e-3, 1e-8));
}
