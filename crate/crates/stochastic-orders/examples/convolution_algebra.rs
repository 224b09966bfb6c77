//! Build finite measures and push them through the core algebra:
//! mixtures, convolution, convolution powers, and affine pushforwards,
//! all in exact rational arithmetic.
//!
//! Run with `cargo run --example convolution_algebra`.

use stochastic_orders::{FiniteMeasure, Scalar};

fn main() {
    // Two-point laws assembled from point masses.
    let a = FiniteMeasure::mixture(
        &[Scalar::from_ratio(1, 2), Scalar::from_ratio(1, 2)],
        &[
            FiniteMeasure::dirac(Scalar::from_int(-3)),
            FiniteMeasure::dirac(Scalar::from_int(1)),
        ],
    )
    .unwrap();
    let b = FiniteMeasure::mixture(
        &[Scalar::from_ratio(3, 4), Scalar::from_ratio(1, 4)],
        &[
            FiniteMeasure::dirac(Scalar::from_int(0)),
            FiniteMeasure::dirac(Scalar::from_int(4)),
        ],
    )
    .unwrap();
    println!("a = {}", pretty(&a));
    println!("b = {}", pretty(&b));
    println!("mean a = {}, mean b = {}", a.mean(), b.mean());

    // Convolution is the law of the sum of independent draws.
    let sum = a.convolve(&b);
    println!("a * b = {}", pretty(&sum));
    println!(
        "mean(a * b) = {} = mean a + mean b = {}",
        sum.mean(),
        &a.mean() + &b.mean()
    );

    // Convolution powers, with the empty power the point mass at zero.
    for m in 0..=3 {
        println!("a^*{m} has {} atoms", a.convolve_power(m).len());
    }

    // Affine pushforward rescales the support and keeps the weights.
    let scaled = sum
        .pushforward_affine(&Scalar::from_ratio(1, 2), &Scalar::from_int(0))
        .unwrap();
    println!("(a * b) scaled by 1/2 = {}", pretty(&scaled));

    // Expectations of arbitrary functions; everything stays rational.
    let second_moment = sum.expectation(|x| x * x).unwrap();
    println!("E[(a * b)^2] = {second_moment}");
    println!("var(a * b) = {}", sum.variance());

    // The JSON wire format round-trips exactly.
    let json = sum.to_json();
    let back = FiniteMeasure::from_json(&json).unwrap();
    assert_eq!(back, sum);
    println!("wire format: {json}");
}

fn pretty(m: &FiniteMeasure) -> String {
    let atoms: Vec<String> = m.atoms().map(|(x, w)| format!("{x}: {w}")).collect();
    format!("{{{}}}", atoms.join(", "))
}
