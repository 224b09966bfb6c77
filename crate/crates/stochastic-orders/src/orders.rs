//! Decision procedures for the usual stochastic order and the convex
//! stochastic order on finite measures, together with the convex
//! test-function battery and the four-point convexity check.
//!
//! Both orders reduce to finitely many constraints:
//!
//! * usual order `a <=st b`: the CDFs are right-continuous step functions,
//!   constant between union-support points, so `F_a >= F_b` everywhere iff
//!   it holds at every union-support point;
//! * convex order `a <=cx b`: means must agree and the stop-loss transform
//!   of `a` must sit below that of `b`. The stop-loss difference is
//!   piecewise linear with kinks only at union-support points and vanishes
//!   at both infinities when the means agree, so non-negativity at the
//!   kinks is equivalent to non-negativity everywhere. That turns the
//!   "for all convex functions" quantifier into finitely many linear
//!   constraints and makes the procedure complete, not a sampling heuristic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::FiniteMeasure;
use crate::scalar::{Regime, Scalar};

#[derive(Debug, Error)]
pub enum OrderError {
    #[error("combined mass defect {defect} exceeds the check budget {budget}")]
    DefectBudget { defect: f64, budget: f64 },
    #[error("four-point hypothesis violated: {0}")]
    FourPointHypothesis(String),
    #[error("invalid battery: {0}")]
    InvalidBattery(String),
}

/// Which constraint family produced the margin of a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    #[serde(rename = "cdf")]
    Cdf,
    #[serde(rename = "stoploss")]
    StopLoss,
    #[serde(rename = "mean")]
    Mean,
}

/// Result of an order check: whether it holds, the minimum slack over all
/// checked constraints (negative iff violated), and where the worst
/// violation or slack occurs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub holds: bool,
    pub margin: Scalar,
    pub witness: Option<Scalar>,
    pub constraint: ConstraintKind,
}

/// True when `slack >= -tol`, using exact rational comparison whenever the
/// slack is exact so that zero-tolerance verdicts are certificates.
fn slack_holds(slack: &Scalar, tol: f64) -> bool {
    match slack {
        Scalar::Exact(r) => {
            if tol == 0.0 {
                !num::Signed::is_negative(r)
            } else {
                let bound = num::BigRational::from_float(-tol).expect("tolerance is finite");
                *r >= bound
            }
        }
        Scalar::Float(f) => *f >= -tol,
    }
}

/// Merged, deduplicated support of two measures. Float points within the
/// snap tolerance collapse onto one evaluation point.
fn union_support(a: &FiniteMeasure, b: &FiniteMeasure) -> Vec<Scalar> {
    let snap = crate::measure::DEFAULT_SNAP;
    let exact = a.regime() == Regime::Exact && b.regime() == Regime::Exact;
    let mut points: Vec<Scalar> = a
        .support()
        .iter()
        .chain(b.support().iter())
        .cloned()
        .collect();
    points.sort_by(|x, y| x.total_cmp(y));
    points.dedup_by(|next, kept| {
        if exact {
            next == kept
        } else {
            (next.to_f64() - kept.to_f64()).abs() <= snap
        }
    });
    points
}

fn defect_sum(a: &FiniteMeasure, b: &FiniteMeasure) -> f64 {
    a.mass_defect().to_f64() + b.mass_defect().to_f64()
}

/// Decide `a <=st b`: `F_a(x) >= F_b(x)` at every union-support point.
///
/// Measures with truncation defect are accepted only while the combined
/// defect stays within `tol`, since the defect can move each CDF value by
/// up to that amount. Exact-regime inputs with `tol = 0` give an exact
/// verdict.
pub fn check_st(
    a: &FiniteMeasure,
    b: &FiniteMeasure,
    tol: f64,
) -> Result<OrderVerdict, OrderError> {
    let defect = defect_sum(a, b);
    if defect > tol && defect > 0.0 {
        return Err(OrderError::DefectBudget {
            defect,
            budget: tol,
        });
    }
    let points = union_support(a, b);
    let mut best: Option<(Scalar, Scalar)> = None;
    for t in points {
        let slack = &a.cdf(&t) - &b.cdf(&t);
        if best.as_ref().is_none_or(|(m, _)| slack < *m) {
            best = Some((slack, t));
        }
    }
    let (margin, witness) = best.expect("measures are never empty");
    Ok(OrderVerdict {
        holds: slack_holds(&margin, tol),
        margin,
        witness: Some(witness),
        constraint: ConstraintKind::Cdf,
    })
}

/// Stop-loss transform `t -> E max(0, X - t)` of the retained atoms.
pub fn stop_loss(a: &FiniteMeasure, t: &Scalar) -> Scalar {
    let mut acc = Scalar::zero(a.regime().join(t.regime()));
    for (x, w) in a.atoms() {
        if x > *t {
            acc = acc + &(&x - t) * &w;
        }
    }
    acc
}

/// Suffix-sum evaluator for many stop-loss queries against one measure.
struct StopLossEval {
    xs: Vec<Scalar>,
    suffix_mass: Vec<Scalar>,
    suffix_xw: Vec<Scalar>,
    regime: Regime,
}

impl StopLossEval {
    fn new(m: &FiniteMeasure) -> Self {
        let n = m.len();
        let regime = m.regime();
        let mut suffix_mass = vec![Scalar::zero(regime); n + 1];
        let mut suffix_xw = vec![Scalar::zero(regime); n + 1];
        for i in (0..n).rev() {
            let w = &m.weights()[i];
            let x = &m.support()[i];
            suffix_mass[i] = &suffix_mass[i + 1] + w;
            suffix_xw[i] = &suffix_xw[i + 1] + &(x * w);
        }
        StopLossEval {
            xs: m.support().to_vec(),
            suffix_mass,
            suffix_xw,
            regime,
        }
    }

    fn eval(&self, t: &Scalar) -> Scalar {
        // First index with x > t.
        let i = self.xs.partition_point(|x| x <= t);
        if i == self.xs.len() {
            return Scalar::zero(self.regime);
        }
        &self.suffix_xw[i] - &(t * &self.suffix_mass[i])
    }
}

/// Decide `a <=cx b` via (i) mean equality and (ii) stop-loss dominance at
/// every union-support kink (see the module docs for why the kinks
/// suffice).
///
/// The mean constraint's slack is `-|mean a - mean b| / (1 + |mean a|)`;
/// the scaling keeps convolution powers of large-support measures from
/// tripping the tolerance on rounding alone. Truncated measures are
/// accepted only while `defect * support diameter <= tol`, which bounds how
/// far the defect can move any stop-loss value.
pub fn check_cx(
    a: &FiniteMeasure,
    b: &FiniteMeasure,
    tol: f64,
) -> Result<OrderVerdict, OrderError> {
    let defect = defect_sum(a, b);
    if defect > 0.0 {
        let lo = a.min_support().clone().min(b.min_support().clone());
        let hi = a.max_support().clone().max(b.max_support().clone());
        let diam = (&hi - &lo).to_f64();
        let shift = defect * diam.max(1.0);
        if shift > tol {
            return Err(OrderError::DefectBudget {
                defect: shift,
                budget: tol,
            });
        }
    }

    let mean_a = a.mean();
    let mean_b = b.mean();
    let regime = a.regime().join(b.regime());
    let norm = &Scalar::one(regime) + &mean_a.abs();
    let mean_slack = &(-&(&mean_a - &mean_b).abs()) / &norm;
    let mut margin = mean_slack;
    let mut witness = a.min_support().clone().min(b.min_support().clone());
    let mut constraint = ConstraintKind::Mean;

    let eval_a = StopLossEval::new(a);
    let eval_b = StopLossEval::new(b);
    for t in union_support(a, b) {
        let slack = &eval_b.eval(&t) - &eval_a.eval(&t);
        if slack < margin {
            margin = slack;
            witness = t;
            constraint = ConstraintKind::StopLoss;
        }
    }
    Ok(OrderVerdict {
        holds: slack_holds(&margin, tol),
        margin,
        witness: Some(witness),
        constraint,
    })
}

/// Convex probe functions: stop-loss kinks, absolute deviation, the square,
/// and a scaled exponential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexTestFunction {
    StopLoss { kink: Scalar },
    AbsDev { center: Scalar },
    Square,
    ExpScaled { rate: Scalar },
}

impl ConvexTestFunction {
    pub fn eval(&self, x: &Scalar) -> Scalar {
        match self {
            ConvexTestFunction::StopLoss { kink } => {
                if x > kink {
                    x - kink
                } else {
                    Scalar::zero(x.regime().join(kink.regime()))
                }
            }
            ConvexTestFunction::AbsDev { center } => (x - center).abs(),
            ConvexTestFunction::Square => x * x,
            ConvexTestFunction::ExpScaled { rate } => {
                Scalar::Float((rate.to_f64() * x.to_f64()).exp())
            }
        }
    }

    /// Whether evaluation at exact inputs stays exact (the exponential
    /// always goes through floats).
    pub fn preserves_exactness(&self) -> bool {
        !matches!(self, ConvexTestFunction::ExpScaled { .. })
    }

    /// Kink locations, for quadratures that split at non-smooth points.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            ConvexTestFunction::StopLoss { kink } => vec![kink.to_f64()],
            ConvexTestFunction::AbsDev { center } => vec![center.to_f64()],
            _ => Vec::new(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConvexTestFunction::StopLoss { .. } => "stop_loss",
            ConvexTestFunction::AbsDev { .. } => "abs_dev",
            ConvexTestFunction::Square => "square",
            ConvexTestFunction::ExpScaled { .. } => "exp_scaled",
        }
    }

    pub fn param(&self) -> Option<&Scalar> {
        match self {
            ConvexTestFunction::StopLoss { kink } => Some(kink),
            ConvexTestFunction::AbsDev { center } => Some(center),
            ConvexTestFunction::Square => None,
            ConvexTestFunction::ExpScaled { rate } => Some(rate),
        }
    }
}

/// Probe battery on `[lo, hi]`: `count` stop-loss functions at equispaced
/// interior kinks, plus absolute deviation at the midpoint, the square, and
/// `exp(x)`. Kinks of exact bounds are exact rationals.
pub fn convex_battery(
    lo: &Scalar,
    hi: &Scalar,
    count: usize,
) -> Result<Vec<ConvexTestFunction>, OrderError> {
    if lo >= hi {
        return Err(OrderError::InvalidBattery(format!(
            "domain [{lo}, {hi}] is empty"
        )));
    }
    if count < 1 {
        return Err(OrderError::InvalidBattery("count must be >= 1".into()));
    }
    let span = hi - lo;
    let denom = Scalar::from_int(count as i64 + 1);
    let mut battery = Vec::with_capacity(count + 3);
    for i in 1..=count {
        let kink = lo + &(&(&span * &Scalar::from_int(i as i64)) / &denom);
        battery.push(ConvexTestFunction::StopLoss { kink });
    }
    let two = Scalar::from_int(2);
    battery.push(ConvexTestFunction::AbsDev {
        center: &(lo + hi) / &two,
    });
    battery.push(ConvexTestFunction::Square);
    battery.push(ConvexTestFunction::ExpScaled {
        rate: Scalar::from_int(1),
    });
    Ok(battery)
}

/// Four-point convexity test: given `a <= b`, `c <= d`, `a + d = b + c`,
/// report whether `phi(b) + phi(c) <= phi(a) + phi(d)`.
///
/// Hypothesis violations are errors, distinct from the inequality simply
/// failing.
pub fn four_point_check<F>(
    phi: F,
    a: &Scalar,
    b: &Scalar,
    c: &Scalar,
    d: &Scalar,
    tol: f64,
) -> Result<bool, OrderError>
where
    F: Fn(&Scalar) -> Scalar,
{
    if !slack_holds(&(b - a), tol) {
        return Err(OrderError::FourPointHypothesis(format!(
            "a = {a} > b = {b}"
        )));
    }
    if !slack_holds(&(d - c), tol) {
        return Err(OrderError::FourPointHypothesis(format!(
            "c = {c} > d = {d}"
        )));
    }
    let imbalance = &(a + d) - &(b + c);
    if !slack_holds(&imbalance, tol) || !slack_holds(&-&imbalance, tol) {
        return Err(OrderError::FourPointHypothesis(format!(
            "a + d = {} differs from b + c = {}",
            a + d,
            b + c
        )));
    }
    let slack = &(&phi(a) + &phi(d)) - &(&phi(b) + &phi(c));
    Ok(slack_holds(&slack, tol))
}
