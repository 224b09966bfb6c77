//! Two bundled counterexamples, reproduced end to end in exact arithmetic.
//!
//! `ex2.4` — a pair of two-point measures that are incomparable in the
//! usual stochastic order, yet their cross convolution still sits below the
//! half-half mixture of the self convolutions in the convex order. It shows
//! the usual-order hypothesis is sufficient but not necessary for that
//! bound.
//!
//! `ex3.9` — two quartic polynomials `V(x,y) = x^3 y / 2 + x y^3 / 2` and
//! `W(x,y) = x^4/8 + 3 x^2 y^2 / 4 + y^4/8` with `W - V = (x - y)^4 / 8 >=
//! 0` pointwise, equal coefficient sums, and equal means after measure
//! substitution. Despite all that regularity, substituting the ordered
//! pair `(point mass at 0, fair coin on {0,1})` breaks the convex order:
//! the stop-loss values at 2 compare as 1/16 > 6/128. Pointwise polynomial
//! dominance does not survive the passage to measures.

use serde::Serialize;

use crate::measure::FiniteMeasure;
use crate::muirhead::{DistributionPolynomial, MuirheadError, PolyTerm};
use crate::orders::{check_cx, check_st, stop_loss, OrderVerdict};
use crate::scalar::Scalar;

/// The st-incomparable two-point pair: `(1/2) d_-3 + (1/2) d_1` and
/// `(3/4) d_0 + (1/4) d_4`.
pub fn incomparable_pair() -> (FiniteMeasure, FiniteMeasure) {
    let a = FiniteMeasure::from_atoms(
        vec![
            (Scalar::from_int(-3), Scalar::from_ratio(1, 2)),
            (Scalar::from_int(1), Scalar::from_ratio(1, 2)),
        ],
        Scalar::from_int(0),
    )
    .expect("static atoms are valid");
    let b = FiniteMeasure::from_atoms(
        vec![
            (Scalar::from_int(0), Scalar::from_ratio(3, 4)),
            (Scalar::from_int(4), Scalar::from_ratio(1, 4)),
        ],
        Scalar::from_int(0),
    )
    .expect("static atoms are valid");
    (a, b)
}

/// The quartic polynomial pair `(V, W)`.
pub fn polynomial_pair() -> (DistributionPolynomial, DistributionPolynomial) {
    let v = DistributionPolynomial::new(
        2,
        vec![
            PolyTerm {
                coeff: Scalar::from_ratio(1, 2),
                exponents: vec![3, 1],
            },
            PolyTerm {
                coeff: Scalar::from_ratio(1, 2),
                exponents: vec![1, 3],
            },
        ],
    )
    .expect("static polynomial is valid");
    let w = DistributionPolynomial::new(
        2,
        vec![
            PolyTerm {
                coeff: Scalar::from_ratio(1, 8),
                exponents: vec![4, 0],
            },
            PolyTerm {
                coeff: Scalar::from_ratio(3, 4),
                exponents: vec![2, 2],
            },
            PolyTerm {
                coeff: Scalar::from_ratio(1, 8),
                exponents: vec![0, 4],
            },
        ],
    )
    .expect("static polynomial is valid");
    (v, w)
}

#[derive(Clone, Debug, Serialize)]
pub struct IncomparablePairReport {
    pub st_forward: OrderVerdict,
    pub st_backward: OrderVerdict,
    pub mixture_bound: OrderVerdict,
    /// True iff the usual order fails both ways while the convex-order
    /// bound holds with exact non-negative margin.
    pub passed: bool,
}

/// Reproduce `ex2.4` and assert every claimed relation, in the exact
/// regime with zero tolerance.
pub fn run_incomparable_pair() -> Result<IncomparablePairReport, MuirheadError> {
    let (a, b) = incomparable_pair();
    let st_forward = check_st(&a, &b, 0.0)?;
    let st_backward = check_st(&b, &a, 0.0)?;
    let cross = a.convolve(&b);
    let mix = FiniteMeasure::mixture(
        &[Scalar::from_ratio(1, 2), Scalar::from_ratio(1, 2)],
        &[a.convolve(&a), b.convolve(&b)],
    )?;
    let mixture_bound = check_cx(&cross, &mix, 0.0)?;
    let passed = !st_forward.holds
        && !st_backward.holds
        && mixture_bound.holds
        && !mixture_bound.margin.is_negative();
    Ok(IncomparablePairReport {
        st_forward,
        st_backward,
        mixture_bound,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PolynomialPairReport {
    pub v_measure: FiniteMeasure,
    pub w_measure: FiniteMeasure,
    pub v_stop_loss_at_2: Scalar,
    pub w_stop_loss_at_2: Scalar,
    pub means_agree: bool,
    pub pointwise_dominance: bool,
    pub cx_verdict: OrderVerdict,
    /// True iff every exact weight, both stop-loss values, the mean
    /// identity, pointwise dominance of W over V, and the convex-order
    /// failure all came out as claimed.
    pub passed: bool,
}

/// Reproduce `ex3.9` in the exact regime and assert every claimed value.
pub fn run_polynomial_pair() -> Result<PolynomialPairReport, MuirheadError> {
    let (v, w) = polynomial_pair();
    let mu = FiniteMeasure::dirac(Scalar::from_int(0));
    let nu = FiniteMeasure::from_atoms(
        vec![
            (Scalar::from_int(0), Scalar::from_ratio(1, 2)),
            (Scalar::from_int(1), Scalar::from_ratio(1, 2)),
        ],
        Scalar::from_int(0),
    )?;
    let inputs = [mu, nu];
    let v_measure = v.eval(&inputs)?;
    let w_measure = w.eval(&inputs)?;

    let expected_v: Vec<(i64, (i64, i64))> =
        vec![(0, (5, 16)), (1, (7, 16)), (2, (3, 16)), (3, (1, 16))];
    let expected_w: Vec<(i64, (i64, i64))> = vec![
        (0, (41, 128)),
        (1, (52, 128)),
        (2, (30, 128)),
        (3, (4, 128)),
        (4, (1, 128)),
    ];
    let matches = |m: &FiniteMeasure, expected: &[(i64, (i64, i64))]| {
        m.len() == expected.len()
            && m.atoms().zip(expected).all(|((x, wt), &(ex, (n, d)))| {
                x == Scalar::from_int(ex) && wt == Scalar::from_ratio(n, d)
            })
    };
    let weights_ok = matches(&v_measure, &expected_v) && matches(&w_measure, &expected_w);

    let t = Scalar::from_int(2);
    let v_stop_loss_at_2 = stop_loss(&v_measure, &t);
    let w_stop_loss_at_2 = stop_loss(&w_measure, &t);
    let stop_loss_ok = v_stop_loss_at_2 == Scalar::from_ratio(1, 16)
        && w_stop_loss_at_2 == Scalar::from_ratio(6, 128)
        && v_stop_loss_at_2 > w_stop_loss_at_2;

    let means_agree = v_measure.mean() == w_measure.mean();

    // W - V = (x - y)^4 / 8 >= 0 on real arguments: the measure-level
    // failure below is not a sign defect of the polynomials themselves.
    let mut pointwise_dominance = true;
    for i in -4..=4i64 {
        for j in -4..=4i64 {
            let xs = [Scalar::from_ratio(i, 2), Scalar::from_ratio(j, 2)];
            let diff = &w.eval_at(&xs)? - &v.eval_at(&xs)?;
            if diff.is_negative() {
                pointwise_dominance = false;
            }
        }
    }

    let cx_verdict = check_cx(&v_measure, &w_measure, 0.0)?;
    let witness_at_2 = cx_verdict.witness.as_ref() == Some(&t);
    let passed = weights_ok
        && stop_loss_ok
        && means_agree
        && pointwise_dominance
        && !cx_verdict.holds
        && witness_at_2;

    Ok(PolynomialPairReport {
        v_measure,
        w_measure,
        v_stop_loss_at_2,
        w_stop_loss_at_2,
        means_agree,
        pointwise_dominance,
        cx_verdict,
        passed,
    })
}
