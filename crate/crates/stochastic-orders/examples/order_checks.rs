//! Decide the usual stochastic order and the convex stochastic order,
//! and inspect margins and witnesses.
//!
//! Run with `cargo run --example order_checks`.

use stochastic_orders::families::{binomial, poisson};
use stochastic_orders::orders::{check_cx, check_st, convex_battery, stop_loss};
use stochastic_orders::{FiniteMeasure, Scalar};

fn main() {
    // Binomial laws are st-ordered exactly when their parameters are.
    let lo = binomial(5, &Scalar::from_ratio(1, 4)).unwrap();
    let hi = binomial(5, &Scalar::from_ratio(3, 4)).unwrap();
    let v = check_st(&lo, &hi, 0.0).unwrap();
    println!("B(5,1/4) <=st B(5,3/4): {} (margin {})", v.holds, v.margin);
    let v = check_st(&hi, &lo, 0.0).unwrap();
    println!(
        "B(5,3/4) <=st B(5,1/4): {} (witness {:?})",
        v.holds,
        v.witness.map(|w| w.to_string())
    );

    // Truncated families carry a defect, so the check takes a tolerance.
    let v = check_st(
        &poisson(1.0, 1e-12).unwrap(),
        &poisson(2.0, 1e-12).unwrap(),
        1e-9,
    )
    .unwrap();
    println!(
        "Poiss(1) <=st Poiss(2): {} (margin {:.3e})",
        v.holds,
        v.margin.to_f64()
    );

    // Convex order: a mean-preserving spread dominates.
    let point = FiniteMeasure::dirac(Scalar::from_int(0));
    let spread = FiniteMeasure::from_atoms(
        vec![
            (Scalar::from_int(-2), Scalar::from_ratio(1, 2)),
            (Scalar::from_int(2), Scalar::from_ratio(1, 2)),
        ],
        Scalar::from_int(0),
    )
    .unwrap();
    let v = check_cx(&point, &spread, 0.0).unwrap();
    println!("point <=cx spread: {} (margin {})", v.holds, v.margin);
    let v = check_cx(&spread, &point, 0.0).unwrap();
    println!(
        "spread <=cx point: {} ({:?} constraint at witness {:?})",
        v.holds,
        v.constraint,
        v.witness.map(|w| w.to_string())
    );

    // The stop-loss transform behind the convex-order decision.
    for t in [-3i64, -1, 0, 1, 3] {
        let t = Scalar::from_int(t);
        println!(
            "stop_loss(spread, {t}) = {}, stop_loss(point, {t}) = {}",
            stop_loss(&spread, &t),
            stop_loss(&point, &t)
        );
    }

    // A probe battery of convex test functions on [0, 1].
    let battery = convex_battery(&Scalar::from_int(0), &Scalar::from_int(1), 3).unwrap();
    for phi in &battery {
        println!(
            "battery member {} {} evaluates to {} at 3/4",
            phi.kind_name(),
            phi.param().map(|p| p.to_string()).unwrap_or_default(),
            phi.eval(&Scalar::from_ratio(3, 4))
        );
    }
}
