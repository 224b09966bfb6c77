//! Evaluate the positive linear operators whose basis weights are the
//! implemented families: Bernstein, Szász-Mirakyan, Baskakov, and the
//! beta averaging operator.
//!
//! Run with `cargo run --example operator_evaluation`.

use stochastic_orders::muirhead::{eval_operator, OperatorKind};
use stochastic_orders::Scalar;

fn main() {
    let square = |x: &Scalar| x * x;

    // Bernstein evaluation at a rational point is exact.
    let v = eval_operator(
        &OperatorKind::Bernstein { n: 2 },
        square,
        &[],
        &Scalar::from_ratio(1, 2),
        1e-12,
    )
    .unwrap();
    println!("Bernstein B_2(x^2)(1/2) = {v}");

    // All four operators reproduce affine functions.
    let affine = |x: &Scalar| &(&Scalar::from_int(3) * x) + &Scalar::from_int(1);
    for (kind, x) in [
        (OperatorKind::Bernstein { n: 6 }, Scalar::from_ratio(2, 5)),
        (OperatorKind::Szasz { n: 5 }, Scalar::Float(0.8)),
        (OperatorKind::Baskakov { n: 5 }, Scalar::Float(0.8)),
        (OperatorKind::Beta { t: 4.0 }, Scalar::Float(0.4)),
    ] {
        let lhs = eval_operator(&kind, affine, &[], &x, 1e-13).unwrap();
        let rhs = affine(&x);
        println!(
            "{kind:?} applied to 3x+1 at {x}: {:.12} (exact value {:.12})",
            lhs.to_f64(),
            rhs.to_f64()
        );
    }

    // Convex probes with kinks: the beta operator's quadrature splits at
    // the kink to keep full accuracy.
    let kink = 0.5;
    let stop_loss = move |x: &Scalar| Scalar::Float((x.to_f64() - kink).max(0.0));
    let v = eval_operator(
        &OperatorKind::Beta { t: 2.0 },
        stop_loss,
        &[kink],
        &Scalar::Float(0.5),
        1e-12,
    )
    .unwrap();
    println!("beta operator on a stop-loss probe: {:.10}", v.to_f64());

    // Smoothing in action: the square gains the familiar x(1-x)/n term.
    for n in [1u32, 2, 4, 8, 16] {
        let v = eval_operator(
            &OperatorKind::Bernstein { n },
            square,
            &[],
            &Scalar::from_ratio(1, 2),
            1e-12,
        )
        .unwrap();
        println!("B_{n}(x^2)(1/2) = {v}");
    }
}
