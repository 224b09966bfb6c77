//! Convolution arrangements and their symmetrizations, the majorization
//! verifier for convex orders between them, convolution-inequality gap
//! functionals, positive-operator evaluation, and polynomial substitution
//! of measures.
//!
//! For measures `m_1, ..., m_k` and a non-increasing exponent tuple `p`,
//! an arrangement convolves `m_{perm(l)}` to the power `p_l`; the
//! symmetrization is the uniform mixture over all arrangements. When the
//! measures are pairwise comparable in the usual stochastic order,
//! dominance of exponent tuples transfers to the convex order of their
//! symmetrizations, and [`verify_muirhead`] checks that claim both directly
//! and step by step along a transfer chain.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{self, ContinuousFamily, FamilyError};
use crate::majorization::{transfer_chain, ExponentTuple, TupleError};
use crate::measure::{FiniteMeasure, MeasureError};
use crate::orders::{check_cx, check_st, ConvexTestFunction, OrderError, OrderVerdict};
use crate::scalar::{Regime, Scalar};

#[derive(Debug, Error)]
pub enum MuirheadError {
    #[error("{measures} measures but exponent tuple of length {tuple}")]
    LengthMismatch { measures: usize, tuple: usize },
    #[error("{0:?} is not a permutation of 0..{1}")]
    InvalidPermutation(Vec<usize>, usize),
    #[error("measures {0} and {1} are not comparable in the usual stochastic order")]
    Incomparable(usize, usize),
    #[error("need at least two measures, got {0}")]
    TooFewMeasures(usize),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("operator argument out of domain: {0}")]
    OperatorDomain(String),
    #[error(transparent)]
    Tuple(#[from] TupleError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Convolution powers of a fixed list of base measures, grown on demand.
/// Arrangements of one symmetrization share these factors.
struct PowerCache<'a> {
    base: &'a [FiniteMeasure],
    powers: Vec<Vec<FiniteMeasure>>,
}

impl<'a> PowerCache<'a> {
    fn new(base: &'a [FiniteMeasure], regime: Regime) -> Self {
        let powers = base
            .iter()
            .map(|_| vec![FiniteMeasure::dirac(Scalar::zero(regime))])
            .collect();
        PowerCache { base, powers }
    }

    fn get(&mut self, j: usize, e: u32) -> &FiniteMeasure {
        while self.powers[j].len() <= e as usize {
            let next = self.powers[j].last().unwrap().convolve(&self.base[j]);
            self.powers[j].push(next);
        }
        &self.powers[j][e as usize]
    }
}

fn joint_regime(measures: &[FiniteMeasure]) -> Regime {
    measures
        .iter()
        .fold(Regime::Exact, |r, m| r.join(m.regime()))
}

/// One arrangement: the convolution of `measures[perm[l]]` to the power
/// `p[l]`, in order. Zero total degree yields the point mass at zero.
pub fn arrangement(
    measures: &[FiniteMeasure],
    p: &ExponentTuple,
    perm: &[usize],
) -> Result<FiniteMeasure, MuirheadError> {
    let k = measures.len();
    if p.len() != k {
        return Err(MuirheadError::LengthMismatch {
            measures: k,
            tuple: p.len(),
        });
    }
    let mut seen = vec![false; k];
    for &j in perm {
        if j >= k || seen[j] {
            return Err(MuirheadError::InvalidPermutation(perm.to_vec(), k));
        }
        seen[j] = true;
    }
    if perm.len() != k {
        return Err(MuirheadError::InvalidPermutation(perm.to_vec(), k));
    }
    let mut acc = FiniteMeasure::dirac(Scalar::zero(joint_regime(measures)));
    for (l, &j) in perm.iter().enumerate() {
        for _ in 0..p.entries()[l] {
            acc = acc.convolve(&measures[j]);
        }
    }
    Ok(acc)
}

/// Distinct ways to hand the multiset of exponents to the measures, i.e.
/// the distinct permutations of `p`'s entries.
fn distinct_assignments(p: &ExponentTuple) -> Vec<Vec<u32>> {
    let mut values: Vec<(u32, usize)> = Vec::new();
    for &e in p.entries() {
        match values.iter_mut().find(|(v, _)| *v == e) {
            Some((_, count)) => *count += 1,
            None => values.push((e, 1)),
        }
    }
    let k = p.len();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(
        values: &mut Vec<(u32, usize)>,
        current: &mut Vec<u32>,
        k: usize,
        out: &mut Vec<Vec<u32>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in 0..values.len() {
            if values[i].1 == 0 {
                continue;
            }
            values[i].1 -= 1;
            current.push(values[i].0);
            rec(values, current, k, out);
            current.pop();
            values[i].1 += 1;
        }
    }
    rec(&mut values, &mut current, k, &mut out);
    out
}

/// The symmetrization: the uniform mixture of all arrangements of
/// `measures` under `p`.
///
/// Permutations that hand equal exponents to the same measures produce the
/// same arrangement, so the sum runs over distinct exponent assignments
/// (multinomially many, not k! many), each with weight 1/N where N is the
/// number of distinct assignments.
pub fn symmetrize(
    measures: &[FiniteMeasure],
    p: &ExponentTuple,
) -> Result<FiniteMeasure, MuirheadError> {
    let k = measures.len();
    if p.len() != k {
        return Err(MuirheadError::LengthMismatch {
            measures: k,
            tuple: p.len(),
        });
    }
    let regime = joint_regime(measures);
    let assignments = distinct_assignments(p);
    let n = assignments.len();
    let mut cache = PowerCache::new(measures, regime);
    let mut parts = Vec::with_capacity(n);
    for assignment in &assignments {
        let mut acc = FiniteMeasure::dirac(Scalar::zero(regime));
        for (j, &e) in assignment.iter().enumerate() {
            if e > 0 {
                acc = acc.convolve(cache.get(j, e));
            }
        }
        parts.push(acc);
    }
    let coeffs = vec![Scalar::from_ratio(1, n as i64); n];
    Ok(FiniteMeasure::mixture(&coeffs, &parts)?)
}

/// Full diagnostics of one majorization-to-convex-order verification.
#[derive(Clone, Debug)]
pub struct MuirheadReport {
    /// Whether every pair of measures was comparable under the usual order.
    pub comparable: bool,
    /// First incomparable pair found, if any (only populated in
    /// unconditional mode; otherwise incomparability is an error).
    pub incomparable_pair: Option<(usize, usize)>,
    /// Transfer chain from `p` to `q`.
    pub chain: Vec<ExponentTuple>,
    /// Convex-order verdict for each consecutive chain step.
    pub step_verdicts: Vec<OrderVerdict>,
    /// Direct endpoint verdict `sym(p) <=cx sym(q)`.
    pub endpoint: OrderVerdict,
    /// Steps and endpoint must agree; disagreement signals numerical
    /// trouble, not a mathematical counterexample.
    pub consistent: bool,
}

impl MuirheadReport {
    pub fn holds(&self) -> bool {
        self.endpoint.holds
    }
}

/// Verify `sym(p) <=cx sym(q)` for `p` below `q`, both directly and along
/// a transfer chain.
///
/// Pairwise comparability of the measures under the usual order is the
/// hypothesis under which the conclusion is guaranteed; it is checked, not
/// assumed. With `unconditional = true` an incomparable pair is recorded
/// in the report instead of failing, for exploring cases where the
/// conclusion may hold anyway.
pub fn verify_muirhead(
    measures: &[FiniteMeasure],
    p: &ExponentTuple,
    q: &ExponentTuple,
    tol: f64,
    unconditional: bool,
) -> Result<MuirheadReport, MuirheadError> {
    let k = measures.len();
    if p.len() != k || q.len() != k {
        return Err(MuirheadError::LengthMismatch {
            measures: k,
            tuple: if p.len() != k { p.len() } else { q.len() },
        });
    }
    if !p.is_dominated_by(q)? {
        return Err(MuirheadError::Tuple(TupleError::NotDominated(format!(
            "({p}) is not below ({q})"
        ))));
    }

    let mut incomparable_pair = None;
    'pairs: for i in 0..k {
        for j in (i + 1)..k {
            let fwd = check_st(&measures[i], &measures[j], tol)?;
            if fwd.holds {
                continue;
            }
            let bwd = check_st(&measures[j], &measures[i], tol)?;
            if !bwd.holds {
                if !unconditional {
                    return Err(MuirheadError::Incomparable(i, j));
                }
                incomparable_pair = Some((i, j));
                break 'pairs;
            }
        }
    }

    let chain = transfer_chain(p, q)?;
    let sym: Vec<FiniteMeasure> = chain
        .iter()
        .map(|t| symmetrize(measures, t))
        .collect::<Result<_, _>>()?;
    let mut step_verdicts = Vec::with_capacity(chain.len().saturating_sub(1));
    for w in sym.windows(2) {
        step_verdicts.push(check_cx(&w[0], &w[1], tol)?);
    }
    let endpoint = check_cx(sym.first().unwrap(), sym.last().unwrap(), tol)?;
    let steps_hold = step_verdicts.iter().all(|v| v.holds);
    Ok(MuirheadReport {
        comparable: incomparable_pair.is_none(),
        incomparable_pair,
        chain,
        step_verdicts,
        consistent: endpoint.holds == steps_hold,
        endpoint,
    })
}

/// Gap functional of the two-measure convolution inequality: with `S` the
/// pushforward by `scale`,
/// `gap = E_{S(a*a)} phi + E_{S(b*b)} phi - 2 E_{S(a*b)} phi`.
///
/// For binomial measures with `scale = 1/(2n)` this is the Bernstein-basis
/// double sum whose non-negativity over convex `phi` this crate certifies;
/// Poisson and negative binomial inputs give the analogues for the other
/// operator bases.
pub fn rasa_gap(
    a: &FiniteMeasure,
    b: &FiniteMeasure,
    phi: &ConvexTestFunction,
    scale: &Scalar,
) -> Result<Scalar, MuirheadError> {
    let mut gaps = rasa_gap_battery(a, b, std::slice::from_ref(phi), scale)?;
    Ok(gaps.pop().expect("one probe in, one gap out"))
}

/// [`rasa_gap`] for a whole probe battery at once: the three convolutions
/// and the signed weight combination `a*a + b*b - 2 a*b` are computed once
/// and each probe costs a single pass over the union support.
pub fn rasa_gap_battery(
    a: &FiniteMeasure,
    b: &FiniteMeasure,
    battery: &[ConvexTestFunction],
    scale: &Scalar,
) -> Result<Vec<Scalar>, MuirheadError> {
    let zero = Scalar::zero(scale.regime());
    let aa = a.convolve(a).pushforward_affine(scale, &zero)?;
    let bb = b.convolve(b).pushforward_affine(scale, &zero)?;
    let ab = a.convolve(b).pushforward_affine(scale, &zero)?;
    let regime = aa.regime().join(bb.regime()).join(ab.regime());

    let minus_two = Scalar::from_int(-2);
    let mut signed: Vec<(Scalar, Scalar)> = Vec::with_capacity(aa.len() + bb.len() + ab.len());
    for (x, w) in aa.atoms().chain(bb.atoms()) {
        signed.push((x.coerce(regime), w.coerce(regime)));
    }
    for (x, w) in ab.atoms() {
        signed.push((x.coerce(regime), &minus_two * &w.coerce(regime)));
    }
    signed.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut merged: Vec<(Scalar, Scalar)> = Vec::with_capacity(signed.len());
    for (x, w) in signed {
        let same = match merged.last() {
            None => false,
            Some((last, _)) => match regime {
                Regime::Exact => *last == x,
                Regime::Float => (last.to_f64() - x.to_f64()).abs() <= crate::measure::DEFAULT_SNAP,
            },
        };
        if same {
            let (_, acc) = merged.last_mut().unwrap();
            *acc = &*acc + &w;
        } else {
            merged.push((x, w));
        }
    }

    Ok(battery
        .iter()
        .map(|phi| {
            merged
                .iter()
                .fold(Scalar::zero(regime), |acc, (x, w)| acc + &phi.eval(x) * w)
        })
        .collect())
}

/// m-measure generalization:
/// `sum_l E_{S(m_l^{*m})} phi - m * E_{S(m_1 * ... * m_m)} phi`,
/// non-negative when the measures are pairwise st-comparable.
pub fn rasa_gap_m(
    measures: &[FiniteMeasure],
    phi: &ConvexTestFunction,
    scale: &Scalar,
) -> Result<Scalar, MuirheadError> {
    let m = measures.len();
    if m < 2 {
        return Err(MuirheadError::TooFewMeasures(m));
    }
    let zero = Scalar::zero(scale.regime());
    let expect = |meas: FiniteMeasure| -> Result<Scalar, MuirheadError> {
        let scaled = meas.pushforward_affine(scale, &zero)?;
        Ok(scaled.expectation(|x| phi.eval(x))?)
    };
    let regime = joint_regime(measures);
    let mut sum = Scalar::zero(regime);
    for mu in measures {
        sum = sum + expect(mu.convolve_power(m as u32))?;
    }
    let mut cross = FiniteMeasure::dirac(Scalar::zero(regime));
    for mu in measures {
        cross = cross.convolve(mu);
    }
    let m_scalar = Scalar::from_int(m as i64);
    Ok(&sum - &(&m_scalar * &expect(cross)?))
}

/// The positive linear operators whose basis functions are the pmfs or
/// densities of the implemented families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorKind {
    /// `B_n(phi)(x) = sum_i b_{n,i}(x) phi(i/n)` on `[0, 1]`.
    Bernstein { n: u32 },
    /// `S_n(phi)(x) = sum_i s_i(nx) phi(i/n)` on `[0, inf)`.
    Szasz { n: u32 },
    /// `V_n(phi)(x) = sum_i v_{n,i}(x) phi(i/n)` on `[0, inf)`, with the
    /// Baskakov weights realized as the `NB(n, x/(1+x))` pmf.
    Baskakov { n: u32 },
    /// `B_t(phi)(x) = int phi(u) beta-density_{xt,(1-x)t}(u) du` on `[0, 1]`.
    Beta { t: f64 },
}

/// Evaluate an operator at `phi` and the point `x`. `phi_kinks` lists the
/// non-smooth points of `phi` so the beta operator's quadrature can split
/// there; discrete operators ignore it.
///
/// Bernstein evaluation at exact rational `x` stays exact.
pub fn eval_operator<F>(
    kind: &OperatorKind,
    phi: F,
    phi_kinks: &[f64],
    x: &Scalar,
    tail_eps: f64,
) -> Result<Scalar, MuirheadError>
where
    F: Fn(&Scalar) -> Scalar,
{
    match *kind {
        OperatorKind::Bernstein { n } => {
            if n == 0 {
                return Err(MuirheadError::OperatorDomain("n must be >= 1".into()));
            }
            let m = families::binomial(n, x)?;
            let scaled =
                m.pushforward_affine(&Scalar::from_ratio(1, n as i64), &Scalar::from_int(0))?;
            Ok(scaled.expectation(phi)?)
        }
        OperatorKind::Szasz { n } => {
            if n == 0 {
                return Err(MuirheadError::OperatorDomain("n must be >= 1".into()));
            }
            let xf = x.to_f64();
            if xf < 0.0 {
                return Err(MuirheadError::OperatorDomain(format!("x = {xf} < 0")));
            }
            let m = families::poisson(n as f64 * xf, tail_eps)?;
            let scaled =
                m.pushforward_affine(&Scalar::Float(1.0 / n as f64), &Scalar::Float(0.0))?;
            Ok(scaled.expectation(phi)?)
        }
        OperatorKind::Baskakov { n } => {
            if n == 0 {
                return Err(MuirheadError::OperatorDomain("n must be >= 1".into()));
            }
            let xf = x.to_f64();
            if xf < 0.0 {
                return Err(MuirheadError::OperatorDomain(format!("x = {xf} < 0")));
            }
            let m = families::negative_binomial(n as f64, xf / (1.0 + xf), tail_eps)?;
            let scaled =
                m.pushforward_affine(&Scalar::Float(1.0 / n as f64), &Scalar::Float(0.0))?;
            Ok(scaled.expectation(phi)?)
        }
        OperatorKind::Beta { t } => {
            if t.is_nan() || t <= 0.0 {
                return Err(MuirheadError::OperatorDomain(format!(
                    "t = {t} must be > 0"
                )));
            }
            let xf = x.to_f64();
            if !(0.0..=1.0).contains(&xf) {
                return Err(MuirheadError::OperatorDomain(format!(
                    "x = {xf} not in [0, 1]"
                )));
            }
            let family = ContinuousFamily::beta(xf * t, (1.0 - xf) * t)?;
            let value = family.expect_phi(|u| phi(&Scalar::Float(u)).to_f64(), phi_kinks);
            Ok(Scalar::Float(value))
        }
    }
}

/// A polynomial with non-negative coefficients summing to one, in as many
/// variables as there are measures to substitute. Substituting probability
/// measures (product -> convolution, sum -> mixture) therefore yields a
/// probability measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct DistributionPolynomial {
    arity: usize,
    terms: Vec<PolyTerm>,
}

#[derive(Clone, Debug)]
pub struct PolyTerm {
    pub coeff: Scalar,
    pub exponents: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    arity: usize,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    c: Scalar,
    e: Vec<u32>,
}

impl DistributionPolynomial {
    pub fn new(arity: usize, terms: Vec<PolyTerm>) -> Result<Self, MuirheadError> {
        if terms.is_empty() {
            return Err(MuirheadError::InvalidPolynomial("no terms".into()));
        }
        let mut regime = Regime::Exact;
        for term in &terms {
            if term.exponents.len() != arity {
                return Err(MuirheadError::InvalidPolynomial(format!(
                    "term has {} exponents, arity is {arity}",
                    term.exponents.len()
                )));
            }
            if term.coeff.is_negative() {
                return Err(MuirheadError::InvalidPolynomial(format!(
                    "negative coefficient {}",
                    term.coeff
                )));
            }
            regime = regime.join(term.coeff.regime());
        }
        // At the all-ones point the polynomial evaluates to the coefficient
        // sum, which must be 1 for measure substitution to stay stochastic.
        let total = terms
            .iter()
            .fold(Scalar::zero(regime), |acc, t| &acc + &t.coeff);
        let ok = match regime {
            Regime::Exact => total == Scalar::one(regime),
            Regime::Float => (total.to_f64() - 1.0).abs() <= 1e-9,
        };
        if !ok {
            return Err(MuirheadError::InvalidPolynomial(format!(
                "coefficients sum to {total}, expected 1"
            )));
        }
        Ok(DistributionPolynomial { arity, terms })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[PolyTerm] {
        &self.terms
    }

    /// Plain numeric evaluation at one scalar per variable.
    pub fn eval_at(&self, xs: &[Scalar]) -> Result<Scalar, MuirheadError> {
        if xs.len() != self.arity {
            return Err(MuirheadError::LengthMismatch {
                measures: xs.len(),
                tuple: self.arity,
            });
        }
        let regime = xs.iter().fold(Regime::Exact, |r, x| r.join(x.regime()));
        let mut total = Scalar::zero(regime);
        for term in &self.terms {
            let mut prod = term.coeff.clone();
            for (x, &e) in xs.iter().zip(&term.exponents) {
                prod = &prod * &x.pow(e);
            }
            total = total + prod;
        }
        Ok(total)
    }

    /// Substitute one measure per variable: each term becomes the
    /// convolution of powers, and terms combine as a mixture under the
    /// coefficients.
    pub fn eval(&self, measures: &[FiniteMeasure]) -> Result<FiniteMeasure, MuirheadError> {
        if measures.len() != self.arity {
            return Err(MuirheadError::LengthMismatch {
                measures: measures.len(),
                tuple: self.arity,
            });
        }
        let regime = joint_regime(measures);
        let mut cache = PowerCache::new(measures, regime);
        let mut parts = Vec::with_capacity(self.terms.len());
        let mut coeffs = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let mut acc = FiniteMeasure::dirac(Scalar::zero(regime));
            for (j, &e) in term.exponents.iter().enumerate() {
                if e > 0 {
                    acc = acc.convolve(cache.get(j, e));
                }
            }
            parts.push(acc);
            coeffs.push(term.coeff.clone());
        }
        Ok(FiniteMeasure::mixture(&coeffs, &parts)?)
    }
}

impl TryFrom<PolyRepr> for DistributionPolynomial {
    type Error = MuirheadError;
    fn try_from(repr: PolyRepr) -> Result<Self, MuirheadError> {
        let terms = repr
            .terms
            .into_iter()
            .map(|t| PolyTerm {
                coeff: t.c,
                exponents: t.e,
            })
            .collect();
        DistributionPolynomial::new(repr.arity, terms)
    }
}

impl From<DistributionPolynomial> for PolyRepr {
    fn from(p: DistributionPolynomial) -> PolyRepr {
        PolyRepr {
            arity: p.arity,
            terms: p
                .terms
                .into_iter()
                .map(|t| TermRepr {
                    c: t.coeff,
                    e: t.exponents,
                })
                .collect(),
        }
    }
}

/// All distinct exponent assignments actually used by `symmetrize`,
/// exposed for exhaustive testing.
#[cfg(test)]
fn assignment_count(p: &ExponentTuple) -> usize {
    let mut all = distinct_assignments(p);
    all.sort();
    all.dedup();
    all.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::binomial;

    fn tup(e: &[u32]) -> ExponentTuple {
        ExponentTuple::new(e.to_vec()).unwrap()
    }

    fn half_mix(x1: i64, x2: i64) -> FiniteMeasure {
        FiniteMeasure::from_atoms(
            vec![
                (Scalar::from_int(x1), Scalar::from_ratio(1, 2)),
                (Scalar::from_int(x2), Scalar::from_ratio(1, 2)),
            ],
            Scalar::from_int(0),
        )
        .unwrap()
    }

    #[test]
    fn arrangement_unit_and_zero_exponents() {
        let a = half_mix(-3, 1);
        let b = half_mix(0, 4);
        let both = [a.clone(), b.clone()];
        let conv = arrangement(&both, &tup(&[1, 1]), &[0, 1]).unwrap();
        assert_eq!(conv, a.convolve(&b));
        let square = arrangement(&both, &tup(&[2, 0]), &[0, 1]).unwrap();
        assert_eq!(square, a.convolve(&a));
    }

    #[test]
    fn arrangement_swap_permutation() {
        let d1 = FiniteMeasure::dirac(Scalar::from_int(1));
        let d2 = FiniteMeasure::dirac(Scalar::from_int(2));
        let m = arrangement(&[d1, d2], &tup(&[2, 1]), &[1, 0]).unwrap();
        assert_eq!(m, FiniteMeasure::dirac(Scalar::from_int(5)));
    }

    #[test]
    fn arrangement_rejects_bad_permutations() {
        let d = FiniteMeasure::dirac(Scalar::from_int(0));
        let pair = [d.clone(), d];
        assert!(matches!(
            arrangement(&pair, &tup(&[1, 1]), &[0, 0]),
            Err(MuirheadError::InvalidPermutation(..))
        ));
        assert!(matches!(
            arrangement(&pair, &tup(&[1, 1, 0]), &[0, 1]),
            Err(MuirheadError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn symmetrize_unit_exponents_is_plain_convolution() {
        let a = half_mix(-3, 1);
        let b = half_mix(0, 4);
        let sym = symmetrize(&[a.clone(), b.clone()], &tup(&[1, 1])).unwrap();
        assert_eq!(sym, a.convolve(&b));
    }

    #[test]
    fn symmetrize_two_zero_is_square_mixture() {
        let a = half_mix(-3, 1);
        let b = half_mix(0, 4);
        let sym = symmetrize(&[a.clone(), b.clone()], &tup(&[2, 0])).unwrap();
        let expected = FiniteMeasure::mixture(
            &[Scalar::from_ratio(1, 2), Scalar::from_ratio(1, 2)],
            &[a.convolve(&a), b.convolve(&b)],
        )
        .unwrap();
        assert_eq!(sym, expected);
    }

    #[test]
    fn symmetrize_log_points_exponential_moment() {
        // Measures at 0 and ln 2; exponent tuple (2, 0): the exp moment of
        // the symmetrization is (1 + 4) / 2.
        let measures = [
            FiniteMeasure::dirac(Scalar::Float(0.0)),
            FiniteMeasure::dirac(Scalar::Float(2.0f64.ln())),
        ];
        let sym = symmetrize(&measures, &tup(&[2, 0])).unwrap();
        let exp_moment = sym
            .expectation(|x| Scalar::Float(x.to_f64().exp()))
            .unwrap();
        assert!((exp_moment.to_f64() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn symmetrize_is_permutation_invariant() {
        let ms = [
            binomial(3, &Scalar::from_ratio(1, 4)).unwrap(),
            binomial(3, &Scalar::from_ratio(2, 4)).unwrap(),
            binomial(3, &Scalar::from_ratio(3, 4)).unwrap(),
        ];
        let p = tup(&[2, 1, 0]);
        let reference = symmetrize(&ms, &p).unwrap();
        let perms: [[usize; 3]; 5] = [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for perm in perms {
            let shuffled: Vec<FiniteMeasure> = perm.iter().map(|&i| ms[i].clone()).collect();
            assert_eq!(symmetrize(&shuffled, &p).unwrap(), reference);
        }
    }

    #[test]
    fn symmetrize_means_agree_across_equal_totals() {
        let ms = [
            binomial(2, &Scalar::from_ratio(1, 3)).unwrap(),
            binomial(2, &Scalar::from_ratio(2, 3)).unwrap(),
        ];
        let m1 = symmetrize(&ms, &tup(&[2, 1])).unwrap().mean();
        let m2 = symmetrize(&ms, &tup(&[3, 0])).unwrap().mean();
        assert_eq!(m1, m2);
    }

    #[test]
    fn assignment_counts_are_multinomial() {
        assert_eq!(assignment_count(&tup(&[1, 1])), 1);
        assert_eq!(assignment_count(&tup(&[2, 0])), 2);
        assert_eq!(assignment_count(&tup(&[2, 1, 0])), 6);
        assert_eq!(assignment_count(&tup(&[2, 2, 0])), 3);
        assert_eq!(assignment_count(&tup(&[1, 1, 1])), 1);
    }

    #[test]
    fn verify_on_binomial_pair() {
        let ms = [
            binomial(3, &Scalar::from_ratio(1, 4)).unwrap(),
            binomial(3, &Scalar::from_ratio(3, 4)).unwrap(),
        ];
        let report = verify_muirhead(&ms, &tup(&[1, 1]), &tup(&[2, 0]), 0.0, false).unwrap();
        assert!(report.holds());
        assert!(report.comparable);
        assert!(report.consistent);
        assert_eq!(report.chain.len(), 2);
        assert!(!report.endpoint.margin.is_negative());
    }

    #[test]
    fn verify_degenerate_point_masses() {
        let d = FiniteMeasure::dirac(Scalar::from_int(0));
        let ms = [d.clone(), d.clone(), d];
        let report = verify_muirhead(&ms, &tup(&[1, 1, 1]), &tup(&[3, 0, 0]), 0.0, false).unwrap();
        assert!(report.holds());
        assert!(report.endpoint.margin.is_zero());
    }

    #[test]
    fn verify_poisson_triple() {
        let ms = [
            crate::families::poisson(1.0, 1e-12).unwrap(),
            crate::families::poisson(2.0, 1e-12).unwrap(),
            crate::families::poisson(3.0, 1e-12).unwrap(),
        ];
        let report = verify_muirhead(&ms, &tup(&[1, 1, 1]), &tup(&[2, 1, 0]), 1e-9, false).unwrap();
        assert!(report.holds());
        assert!(report.comparable);
        assert!(report.consistent);
    }

    #[test]
    fn verify_rejects_incomparable_measures_unless_unconditional() {
        let ms = [half_mix(-3, 1), {
            FiniteMeasure::from_atoms(
                vec![
                    (Scalar::from_int(0), Scalar::from_ratio(3, 4)),
                    (Scalar::from_int(4), Scalar::from_ratio(1, 4)),
                ],
                Scalar::from_int(0),
            )
            .unwrap()
        }];
        let err = verify_muirhead(&ms, &tup(&[1, 1]), &tup(&[2, 0]), 0.0, false);
        assert!(matches!(err, Err(MuirheadError::Incomparable(0, 1))));
        // Unconditionally, the conclusion still holds for this pair.
        let report = verify_muirhead(&ms, &tup(&[1, 1]), &tup(&[2, 0]), 0.0, true).unwrap();
        assert!(!report.comparable);
        assert_eq!(report.incomparable_pair, Some((0, 1)));
        assert!(report.holds());
    }

    #[test]
    fn verify_rejects_unordered_tuples() {
        let ms = [half_mix(0, 1), half_mix(0, 2)];
        assert!(matches!(
            verify_muirhead(&ms, &tup(&[2, 0]), &tup(&[1, 1]), 0.0, false),
            Err(MuirheadError::Tuple(_))
        ));
    }

    #[test]
    fn gap_vanishes_on_equal_measures() {
        let a = binomial(4, &Scalar::from_ratio(1, 3)).unwrap();
        let phi = ConvexTestFunction::Square;
        let gap = rasa_gap(&a, &a, &phi, &Scalar::from_ratio(1, 8)).unwrap();
        assert!(gap.is_zero());
    }

    #[test]
    fn gap_two_extreme_bernoulli() {
        // a = point at 0, b = point at 1, phi = |x - 1/2|, scale = 1/2:
        // phi(0) + phi(1) - 2 phi(1/2) = 1.
        let a = binomial(1, &Scalar::from_int(0)).unwrap();
        let b = binomial(1, &Scalar::from_int(1)).unwrap();
        let phi = ConvexTestFunction::AbsDev {
            center: Scalar::from_ratio(1, 2),
        };
        let gap = rasa_gap(&a, &b, &phi, &Scalar::from_ratio(1, 2)).unwrap();
        assert_eq!(gap, Scalar::from_int(1));
    }

    #[test]
    fn gap_matches_brute_force_double_sum() {
        let n = 3u32;
        let x = Scalar::from_ratio(1, 3);
        let y = Scalar::from_ratio(2, 3);
        let a = binomial(n, &x).unwrap();
        let b = binomial(n, &y).unwrap();
        let phi = ConvexTestFunction::StopLoss {
            kink: Scalar::from_ratio(1, 2),
        };
        let scale = Scalar::from_ratio(1, 2 * n as i64);
        let gap = rasa_gap(&a, &b, &phi, &scale).unwrap();
        assert!(!gap.is_negative());

        // Independent route: direct double sum over the basis weights.
        let mut brute = Scalar::from_int(0);
        for (xi, wi_a) in a.atoms() {
            for (xj, wj) in a.atoms() {
                let arg = &(&xi + &xj) * &scale;
                brute = brute + &(&wi_a * &wj) * &phi.eval(&arg);
            }
        }
        for (xi, wi_b) in b.atoms() {
            for (xj, wj) in b.atoms() {
                let arg = &(&xi + &xj) * &scale;
                brute = brute + &(&wi_b * &wj) * &phi.eval(&arg);
            }
        }
        for (xi, wi_a) in a.atoms() {
            for (xj, wj) in b.atoms() {
                let arg = &(&xi + &xj) * &scale;
                let minus_two = Scalar::from_int(-2);
                brute = brute + &(&minus_two * &(&wi_a * &wj)) * &phi.eval(&arg);
            }
        }
        assert_eq!(gap, brute);
    }

    #[test]
    fn gap_m_reduces_to_pair_gap() {
        let a = binomial(2, &Scalar::from_ratio(1, 4)).unwrap();
        let b = binomial(2, &Scalar::from_ratio(3, 4)).unwrap();
        let phi = ConvexTestFunction::Square;
        let scale = Scalar::from_ratio(1, 4);
        let pair = rasa_gap(&a, &b, &phi, &scale).unwrap();
        let multi = rasa_gap_m(&[a, b], &phi, &scale).unwrap();
        assert_eq!(pair, multi);
    }

    #[test]
    fn gap_m_triple_matches_brute_force() {
        let ms = [
            binomial(2, &Scalar::from_int(0)).unwrap(),
            binomial(2, &Scalar::from_ratio(1, 2)).unwrap(),
            binomial(2, &Scalar::from_int(1)).unwrap(),
        ];
        let phi = ConvexTestFunction::Square;
        let scale = Scalar::from_ratio(1, 6);
        let gap = rasa_gap_m(&ms, &phi, &scale).unwrap();
        assert!(!gap.is_negative());

        // Triple sum over all basis indices.
        let mut brute = Scalar::from_int(0);
        for mu in &ms {
            for (x1, w1) in mu.atoms() {
                for (x2, w2) in mu.atoms() {
                    for (x3, w3) in mu.atoms() {
                        let arg = &(&(&x1 + &x2) + &x3) * &scale;
                        brute = brute + &(&(&w1 * &w2) * &w3) * &phi.eval(&arg);
                    }
                }
            }
        }
        let minus_three = Scalar::from_int(-3);
        for (x1, w1) in ms[0].atoms() {
            for (x2, w2) in ms[1].atoms() {
                for (x3, w3) in ms[2].atoms() {
                    let arg = &(&(&x1 + &x2) + &x3) * &scale;
                    brute = brute + &(&minus_three * &(&(&w1 * &w2) * &w3)) * &phi.eval(&arg);
                }
            }
        }
        assert_eq!(gap, brute);
        assert!(rasa_gap_m(&ms[..1], &phi, &scale).is_err());
    }

    #[test]
    fn operators_reproduce_affine_functions() {
        let affine = |x: &Scalar| &(&Scalar::from_int(3) * x) + &Scalar::from_int(2);
        let x = Scalar::from_ratio(1, 4);
        let b = eval_operator(&OperatorKind::Bernstein { n: 5 }, affine, &[], &x, 1e-12).unwrap();
        assert_eq!(b, affine(&x));

        for kind in [
            OperatorKind::Szasz { n: 4 },
            OperatorKind::Baskakov { n: 4 },
        ] {
            let v = eval_operator(&kind, affine, &[], &Scalar::Float(0.6), 1e-13).unwrap();
            assert!(
                (v.to_f64() - affine(&Scalar::Float(0.6)).to_f64()).abs() < 1e-9,
                "{kind:?} gave {v}"
            );
        }

        let v = eval_operator(
            &OperatorKind::Beta { t: 3.0 },
            affine,
            &[],
            &Scalar::Float(0.3),
            1e-12,
        )
        .unwrap();
        assert!((v.to_f64() - affine(&Scalar::Float(0.3)).to_f64()).abs() < 1e-9);
    }

    #[test]
    fn bernstein_square_value() {
        let v = eval_operator(
            &OperatorKind::Bernstein { n: 2 },
            |x| x * x,
            &[],
            &Scalar::from_ratio(1, 2),
            1e-12,
        )
        .unwrap();
        assert_eq!(v, Scalar::from_ratio(3, 8));
    }

    #[test]
    fn szasz_preserves_constants_within_truncation() {
        let one = |_: &Scalar| Scalar::Float(1.0);
        let v = eval_operator(
            &OperatorKind::Szasz { n: 3 },
            one,
            &[],
            &Scalar::Float(1.7),
            1e-12,
        )
        .unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn operator_domain_errors() {
        assert!(eval_operator(
            &OperatorKind::Bernstein { n: 2 },
            |x| x.clone(),
            &[],
            &Scalar::from_int(2),
            1e-12
        )
        .is_err());
        assert!(eval_operator(
            &OperatorKind::Szasz { n: 2 },
            |x| x.clone(),
            &[],
            &Scalar::Float(-0.5),
            1e-12
        )
        .is_err());
        assert!(eval_operator(
            &OperatorKind::Beta { t: 0.0 },
            |x| x.clone(),
            &[],
            &Scalar::Float(0.5),
            1e-12
        )
        .is_err());
    }

    #[test]
    fn poly_single_monomial_is_convolution() {
        let poly = DistributionPolynomial::new(
            2,
            vec![PolyTerm {
                coeff: Scalar::from_int(1),
                exponents: vec![1, 1],
            }],
        )
        .unwrap();
        let a = half_mix(0, 1);
        let b = half_mix(0, 2);
        assert_eq!(poly.eval(&[a.clone(), b.clone()]).unwrap(), a.convolve(&b));
    }

    #[test]
    fn poly_validation() {
        assert!(DistributionPolynomial::new(
            2,
            vec![PolyTerm {
                coeff: Scalar::from_ratio(1, 2),
                exponents: vec![1, 1],
            }]
        )
        .is_err());
        assert!(DistributionPolynomial::new(
            2,
            vec![PolyTerm {
                coeff: Scalar::from_int(1),
                exponents: vec![1],
            }]
        )
        .is_err());
        assert!(DistributionPolynomial::new(1, vec![]).is_err());
    }

    #[test]
    fn poly_json_round_trip() {
        let json =
            r#"{"arity": 2, "terms": [{"c": "1/2", "e": [3, 1]}, {"c": "1/2", "e": [1, 3]}]}"#;
        let poly: DistributionPolynomial = serde_json::from_str(json).unwrap();
        assert_eq!(poly.arity(), 2);
        assert_eq!(poly.terms().len(), 2);
        let back = serde_json::to_value(&poly).unwrap();
        assert_eq!(back["terms"][0]["c"], "1/2");
        assert_eq!(back["terms"][0]["e"][0], 3);
    }
}
