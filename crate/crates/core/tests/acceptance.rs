//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed; the
//! process exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use khavinson::ball::{c_infinity_closed, sharp_constant_ball};
use khavinson::geometry::QNorm;
use khavinson::halfspace::{ch_infinity, ch_q2_radial_closed, sharp_constant_halfspace};
use khavinson::verification::{self, CheckOutcome, VerifyOptions};

/// Headline values asserted directly, on top of the grid checks.
fn headline(id: u32) -> Vec<String> {
    let mut out = Vec::new();
    let mut expect = |label: &str, got: f64, want: f64, tol: f64| {
        if !(((got - want) / want).abs() <= tol) {
            out.push(format!("{label}: got {got:.17e}, want {want:.17e}"));
        }
    };
    match id {
        1 => {
            expect("closed n=3 rho=0.5", c_infinity_closed(3, 0.5).unwrap(), 48.0, 0.0);
            let v = sharp_constant_ball(3, QNorm::Infinity, 0.5).unwrap().value;
            expect("sup n=3 rho=0.5", v, 48.0, 1e-10);
        }
        2 => {
            expect("n=3 x_n=1", ch_infinity(3, 1.0).unwrap().value, 2.0 / PI, 1e-12);
            let v = sharp_constant_halfspace(3, QNorm::Infinity, 1.0, 64).unwrap().value;
            expect("sharp n=3 x_n=1", v, 2.0 / PI, 1e-12);
        }
        9 => {
            for (n, want) in verification::Q2_RADIAL_REFERENCE {
                expect(&format!("q=2 n={n}"), ch_q2_radial_closed(n, 1.0).unwrap(), want, 1e-14);
                let v = sharp_constant_halfspace(n, QNorm::Finite(2.0), 1.0, 64).unwrap().value;
                expect(&format!("sharp q=2 n={n}"), v, want, 1e-9);
            }
        }
        _ => {}
    }
    out
}

fn report(outcome: &mut CheckOutcome) -> bool {
    outcome.failures.extend(headline(outcome.id));
    outcome.passed = outcome.failures.is_empty();
    println!("{}", outcome.summary_line());
    for note in &outcome.notes {
        println!("       {note}");
    }
    for failure in outcome.failures.iter().take(20) {
        println!("       failure: {failure}");
    }
    if outcome.failures.len() > 20 {
        println!("       ... {} more failures", outcome.failures.len() - 20);
    }
    outcome.passed
}

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let start = Instant::now();
    let mut outcomes = vec![
        verification::check_ball_infinity(),
        verification::check_halfspace_infinity(),
        verification::check_ball_routes(&opts),
        verification::check_halfspace_routes(&opts),
        verification::check_closed_forms(&opts),
        verification::check_direction_independence(&opts),
        verification::check_regime_orderings(&opts),
        verification::check_sharpness(&opts),
        verification::check_q2_halfspace(&opts),
        verification::check_adjudication(&opts),
    ];
    outcomes.push(verification::check_properties(&opts, start.elapsed().as_secs_f64()));
    let mut all = true;
    for outcome in &mut outcomes {
        all &= report(outcome);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria passed in {:.1} s", outcomes.len(), start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
