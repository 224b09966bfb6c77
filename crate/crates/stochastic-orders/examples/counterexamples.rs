//! Reproduce the two bundled counterexamples in exact arithmetic.
//!
//! Run with `cargo run --example counterexamples`.

use stochastic_orders::{run_incomparable_pair, run_polynomial_pair};

fn main() {
    // ex2.4: the convex-order mixture bound holds for a pair that is
    // incomparable in the usual stochastic order, so usual-order
    // comparability is sufficient but not necessary.
    let rep = run_incomparable_pair().unwrap();
    println!("incomparable pair (ex2.4):");
    println!("  a <=st b: {}", rep.st_forward.holds);
    println!("  b <=st a: {}", rep.st_backward.holds);
    println!(
        "  a*b <=cx (a*a + b*b)/2: {} with exact margin {}",
        rep.mixture_bound.holds, rep.mixture_bound.margin
    );
    println!("  all assertions passed: {}", rep.passed);

    // ex3.9: pointwise polynomial dominance does not give the convex order
    // after measure substitution.
    let rep = run_polynomial_pair().unwrap();
    println!("polynomial pair (ex3.9):");
    let atoms: Vec<String> = rep
        .v_measure
        .atoms()
        .map(|(x, w)| format!("{w} at {x}"))
        .collect();
    println!("  V(mu, nu) = {}", atoms.join(", "));
    let atoms: Vec<String> = rep
        .w_measure
        .atoms()
        .map(|(x, w)| format!("{w} at {x}"))
        .collect();
    println!("  W(mu, nu) = {}", atoms.join(", "));
    println!("  means agree: {}", rep.means_agree);
    println!(
        "  W - V >= 0 pointwise on reals: {}",
        rep.pointwise_dominance
    );
    println!(
        "  stop-loss at 2: V gives {}, W gives {} (so V is NOT below W)",
        rep.v_stop_loss_at_2, rep.w_stop_loss_at_2
    );
    println!(
        "  convex order verdict: holds = {}, witness t = {:?}",
        rep.cx_verdict.holds,
        rep.cx_verdict.witness.as_ref().map(|w| w.to_string())
    );
    println!("  all assertions passed: {}", rep.passed);
}
