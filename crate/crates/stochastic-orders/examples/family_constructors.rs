//! The named distribution families: binomial (exact when the parameter is
//! rational), truncated Poisson / negative binomial / geometric with
//! audited tail defects, and the continuous gamma / beta / normal
//! descriptors with closed-form stop-loss transforms and a midpoint
//! discretizer.
//!
//! Run with `cargo run --example family_constructors`.

use stochastic_orders::families::{
    binomial, geometric, negative_binomial, poisson, ContinuousFamily,
};
use stochastic_orders::Scalar;

fn main() {
    // Exact binomial: weights are exact rationals summing to one.
    let b = binomial(3, &Scalar::from_ratio(1, 3)).unwrap();
    for (x, w) in b.atoms() {
        println!("B(3, 1/3) weight at {x} = {w}");
    }
    println!("total = {}", b.total_weight());

    // Truncated Poisson: the omitted tail is recorded, never hidden.
    let p = poisson(2.0, 1e-12).unwrap();
    println!(
        "Poiss(2) truncated to {} atoms, defect {:.3e}, mean {:.10}",
        p.len(),
        p.mass_defect().to_f64(),
        p.mean().to_f64()
    );

    let nb = negative_binomial(2.5, 0.4, 1e-12).unwrap();
    println!(
        "NB(2.5, 0.4): {} atoms, mean {:.6} (analytic {:.6})",
        nb.len(),
        nb.mean().to_f64(),
        2.5 * 0.4 / 0.6
    );
    let g = geometric(0.5, 1e-12).unwrap();
    println!("Geom(1/2) weight at 3 = {:.6}", g.weights()[3].to_f64());

    // Continuous descriptors expose density, cdf, mean, and stop-loss.
    let gamma = ContinuousFamily::gamma(2.0, 1.0).unwrap();
    println!(
        "Gamma(2,1): mean {}, cdf(2) = {:.6}, stop_loss(2) = {:.6}",
        gamma.mean(),
        gamma.cdf(2.0),
        gamma.stop_loss(2.0)
    );
    let norm = ContinuousFamily::normal(0.0, 1.0).unwrap();
    println!("N(0,1): stop_loss(0) = {:.10}", norm.stop_loss(0.0));

    // Midpoint discretization with an explicit excluded-tail budget.
    let beta = ContinuousFamily::beta(2.0, 3.0).unwrap();
    let discrete = beta.discretize(1000, 0.0, 1.0, 1e-9).unwrap();
    println!(
        "Beta(2,3) on 1000 cells: mean {:.8} (analytic {:.8}), defect {:.1e}",
        discrete.mean().to_f64(),
        beta.mean(),
        discrete.mass_defect().to_f64()
    );

    // Degenerate parameters follow the point-mass conventions.
    let degenerate = ContinuousFamily::gamma(0.0, 5.0).unwrap();
    println!("Gamma(0, 5) is a point mass: {:?}", degenerate.point_mass());
}
