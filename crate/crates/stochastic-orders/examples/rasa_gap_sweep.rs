//! Sweep the convolution-inequality gap functional over a Bernstein-basis
//! parameter grid in exact arithmetic and report the minimum gap.
//!
//! The gap at `(x, y)` and convex probe `phi` is
//! `E_{S(a*a)} phi + E_{S(b*b)} phi - 2 E_{S(a*b)} phi` with
//! `a = B(n, x)`, `b = B(n, y)` and `S` the scaling by `1/(2n)`; its
//! non-negativity over all convex probes is the inequality under test.
//!
//! Run with `cargo run --example rasa_gap_sweep`.

use stochastic_orders::families::binomial;
use stochastic_orders::muirhead::rasa_gap_battery;
use stochastic_orders::orders::convex_battery;
use stochastic_orders::Scalar;

fn main() {
    let n = 4u32;
    let scale = Scalar::from_ratio(1, 2 * n as i64);
    let battery: Vec<_> = convex_battery(&Scalar::from_int(0), &Scalar::from_int(1), 9)
        .unwrap()
        .into_iter()
        // Keep the probes that evaluate exactly on rationals.
        .filter(|phi| phi.preserves_exactness())
        .collect();

    let grid: Vec<Scalar> = (0..=10).map(|k| Scalar::from_ratio(k, 10)).collect();
    let laws: Vec<_> = grid.iter().map(|x| binomial(n, x).unwrap()).collect();

    let mut min_gap: Option<(Scalar, String)> = None;
    let mut rows = 0usize;
    for (x, a) in grid.iter().zip(&laws) {
        for (y, b) in grid.iter().zip(&laws) {
            let gaps = rasa_gap_battery(a, b, &battery, &scale).unwrap();
            for (phi, gap) in battery.iter().zip(gaps) {
                rows += 1;
                assert!(!gap.is_negative(), "inequality violated?!");
                let location = format!("x={x}, y={y}, phi={}", phi.kind_name());
                if min_gap.as_ref().is_none_or(|(g, _)| gap < *g) {
                    min_gap = Some((gap, location));
                }
            }
        }
    }
    let (gap, at) = min_gap.unwrap();
    println!("swept n = {n} over an 11 x 11 rational grid, {rows} gaps");
    println!("minimum gap {gap} at {at}");
    println!("every gap certified non-negative in exact arithmetic");
}
