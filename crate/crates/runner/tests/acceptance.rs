//! Acceptance suite: one test per verified claim, each printing a pass/fail
//! line with its check count and runtime. Run with `--nocapture` to see the
//! lines for passing criteria too.

use std::time::Instant;

use pacing_runner::criteria::{self, Verdict};

fn report(name: &str, verdicts: &[Verdict], started: Instant, limit_secs: Option<f64>) {
    let elapsed = started.elapsed().as_secs_f64();
    let pass = criteria::all_pass(verdicts);
    println!(
        "criterion {name}: {} ({} checks, {elapsed:.2} s)",
        if pass { "PASS" } else { "FAIL" },
        verdicts.len(),
    );
    for v in verdicts.iter().filter(|v| !v.pass) {
        println!("    {}", v.summary_line());
    }
    assert!(pass, "criterion {name} has failing checks");
    if let Some(limit) = limit_secs {
        assert!(
            elapsed < limit,
            "criterion {name} took {elapsed:.2} s, over the {limit} s budget"
        );
    }
}

#[test]
fn criterion_01_budget_identity_and_feasibility() {
    let started = Instant::now();
    let verdicts = criteria::criterion_1_budget_identity();
    report(
        "1 (budget identity & feasibility)",
        &verdicts,
        started,
        Some(5.0),
    );
}

#[test]
fn criterion_02_adversary_win_cap() {
    let started = Instant::now();
    let verdicts = criteria::criterion_2_adversary_cap();
    report("2 (adversary win cap)", &verdicts, started, Some(120.0));
}

#[test]
fn criterion_03_lagrangian_certificate() {
    let started = Instant::now();
    let verdicts = criteria::criterion_3_lagrangian_certificate();
    report(
        "3 (windowed Lagrangian certificate)",
        &verdicts,
        started,
        Some(300.0),
    );
}

#[test]
fn criterion_04_bid_matching_reduction() {
    let started = Instant::now();
    let verdicts = criteria::criterion_4_reduction();
    report("4 (bid-matching reduction)", &verdicts, started, None);
}

#[test]
fn criterion_05_subgradient_step_equivalence() {
    let started = Instant::now();
    let verdicts = criteria::criterion_5_subgradient_equivalence();
    report("5 (subgradient-step equivalence)", &verdicts, started, None);
}

#[test]
fn criterion_06_per_round_descent_inequalities() {
    let started = Instant::now();
    let verdicts = criteria::criterion_6_descent_inequalities();
    report(
        "6 (per-round descent inequalities)",
        &verdicts,
        started,
        None,
    );
}

#[test]
fn criterion_07_bid_band() {
    let started = Instant::now();
    let verdicts = criteria::criterion_7_bid_band();
    report("7 (bid band after warm-up)", &verdicts, started, Some(30.0));
}

#[test]
fn criterion_08_window_discrepancy() {
    let started = Instant::now();
    let verdicts = criteria::criterion_8_window_discrepancy();
    report("8 (window discrepancy floors)", &verdicts, started, None);
}

#[test]
fn criterion_09_round_robin() {
    let started = Instant::now();
    let verdicts = criteria::criterion_9_round_robin();
    report(
        "9 (round-robin onset & discrepancy)",
        &verdicts,
        started,
        Some(5.0),
    );
}

#[test]
fn criterion_10_dp_bracket() {
    let started = Instant::now();
    let verdicts = criteria::criterion_10_dp_bracket();
    report("10 (certified DP bracket)", &verdicts, started, None);
}
