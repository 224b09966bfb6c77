//! Verify convex-order relations between symmetrized convolution
//! polynomials, with full transfer-chain diagnostics.
//!
//! Run with `cargo run --example muirhead_verification`.

use stochastic_orders::families::{binomial, poisson};
use stochastic_orders::majorization::ExponentTuple;
use stochastic_orders::muirhead::{symmetrize, verify_muirhead};
use stochastic_orders::Scalar;

fn main() {
    // Exact case: a chain of st-comparable binomial laws.
    let measures = vec![
        binomial(3, &Scalar::from_ratio(1, 4)).unwrap(),
        binomial(3, &Scalar::from_ratio(2, 4)).unwrap(),
        binomial(3, &Scalar::from_ratio(3, 4)).unwrap(),
    ];
    let p = ExponentTuple::new(vec![1, 1, 1]).unwrap();
    let q = ExponentTuple::new(vec![3, 0, 0]).unwrap();
    let report = verify_muirhead(&measures, &p, &q, 0.0, false).unwrap();
    println!("binomial triple, ({p}) vs ({q}):");
    println!("  pairwise st-comparable: {}", report.comparable);
    let chain: Vec<String> = report.chain.iter().map(|t| format!("({t})")).collect();
    println!("  chain: {}", chain.join(" -> "));
    for (i, step) in report.step_verdicts.iter().enumerate() {
        println!(
            "  step {i}: holds = {}, margin = {}",
            step.holds, step.margin
        );
    }
    println!(
        "  endpoint: holds = {} with exact margin {}",
        report.endpoint.holds, report.endpoint.margin
    );
    println!("  chain and endpoint agree: {}", report.consistent);

    // The symmetrizations themselves are plain measures.
    let sym_p = symmetrize(&measures, &p).unwrap();
    let sym_q = symmetrize(&measures, &q).unwrap();
    println!(
        "  sym(p): {} atoms, mean {};  sym(q): {} atoms, mean {}",
        sym_p.len(),
        sym_p.mean(),
        sym_q.len(),
        sym_q.mean()
    );

    // Float case: truncated Poisson laws with rates 1, 2, 3.
    let measures: Vec<_> = [1.0, 2.0, 3.0]
        .iter()
        .map(|&l| poisson(l, 1e-12).unwrap())
        .collect();
    let p = ExponentTuple::new(vec![1, 1, 1]).unwrap();
    let q = ExponentTuple::new(vec![2, 1, 0]).unwrap();
    let report = verify_muirhead(&measures, &p, &q, 1e-9, false).unwrap();
    println!("poisson triple, ({p}) vs ({q}):");
    println!(
        "  endpoint holds = {} with margin {:.3e}",
        report.endpoint.holds,
        report.endpoint.margin.to_f64()
    );
}
