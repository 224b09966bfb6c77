//! Finitely supported probability measures and their algebra: point masses,
//! mixtures, convolutions, affine pushforwards, and expectations.
//!
//! A measure keeps a strictly increasing support, positive weights, a regime
//! tag, and an explicit `mass_defect` — the probability omitted when an
//! infinite-support law is truncated. The defect is tracked through every
//! operation and never silently renormalized away.

use num::{BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Regime, Scalar};

/// Absolute tolerance used to snap nearby float support points onto one atom.
/// Pairwise sums of lattice points must collapse to single atoms even when
/// floating-point rounding perturbs them.
pub const DEFAULT_SNAP: f64 = 1e-12;

/// Absolute tolerance on `sum(weights) + mass_defect = 1` in the float regime.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Maximum dense-array length the lattice convolution kernel will allocate
/// before falling back to the general sorted-merge path.
const MAX_LATTICE_BINS: usize = 1 << 22;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("weight {0} at support point {1} is negative")]
    NegativeWeight(String, String),
    #[error("weights plus mass defect sum to {got}, expected 1")]
    WeightSum { got: String },
    #[error("mass defect {0} is invalid (must be 0 in the exact regime, in [0,1) in float)")]
    InvalidDefect(String),
    #[error("mixture coefficient {0} is negative")]
    NegativeCoefficient(String),
    #[error("mixture coefficients sum to {got}, expected 1")]
    CoefficientSum { got: String },
    #[error("mixture has {coeffs} coefficients but {parts} parts")]
    MixtureLength { coeffs: usize, parts: usize },
    #[error("affine pushforward requires a nonzero scale")]
    ZeroScale,
    #[error("measure must have at least one atom")]
    Empty,
    #[error("function undefined (NaN) at support point {0}")]
    FunctionUndefined(String),
}

/// A finitely supported probability measure.
#[derive(Clone, Debug)]
pub struct FiniteMeasure {
    support: Vec<Scalar>,
    weights: Vec<Scalar>,
    regime: Regime,
    mass_defect: Scalar,
}

impl FiniteMeasure {
    /// Point mass at `x`.
    pub fn dirac(x: Scalar) -> FiniteMeasure {
        let regime = x.regime();
        FiniteMeasure {
            support: vec![x],
            weights: vec![Scalar::one(regime)],
            regime,
            mass_defect: Scalar::zero(regime),
        }
    }

    /// Build a measure from unsorted `(point, weight)` atoms.
    ///
    /// Atoms at the same location are merged (exactly in the exact regime,
    /// within [`DEFAULT_SNAP`] in float), zero weights are dropped, and the
    /// weight sum is validated against `1 - mass_defect`.
    pub fn from_atoms(
        atoms: Vec<(Scalar, Scalar)>,
        mass_defect: Scalar,
    ) -> Result<FiniteMeasure, MeasureError> {
        Self::from_atoms_with_snap(atoms, mass_defect, DEFAULT_SNAP)
    }

    /// Same as [`from_atoms`](Self::from_atoms) with a caller-chosen snap
    /// tolerance for float support merging.
    pub fn from_atoms_with_snap(
        mut atoms: Vec<(Scalar, Scalar)>,
        mass_defect: Scalar,
        snap: f64,
    ) -> Result<FiniteMeasure, MeasureError> {
        let mut regime = mass_defect.regime();
        for (x, w) in &atoms {
            regime = regime.join(x.regime()).join(w.regime());
        }
        if regime == Regime::Float {
            for (x, w) in &mut atoms {
                *x = x.coerce(Regime::Float);
                *w = w.coerce(Regime::Float);
            }
        }
        let mass_defect = mass_defect.coerce(regime);
        if mass_defect.is_negative()
            || (regime == Regime::Exact && !mass_defect.is_zero())
            || mass_defect >= Scalar::one(regime)
        {
            return Err(MeasureError::InvalidDefect(mass_defect.to_string()));
        }

        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut support: Vec<Scalar> = Vec::with_capacity(atoms.len());
        let mut weights: Vec<Scalar> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            if w.is_negative() {
                // Tiny float negatives are rounding residue from cdf
                // differences; anything larger is a real error.
                if regime == Regime::Float && w.to_f64() > -1e-12 {
                    continue;
                }
                return Err(MeasureError::NegativeWeight(w.to_string(), x.to_string()));
            }
            if w.is_zero() {
                continue;
            }
            let same_atom = match support.last() {
                None => false,
                Some(last) => match regime {
                    Regime::Exact => *last == x,
                    Regime::Float => (x.to_f64() - last.to_f64()).abs() <= snap,
                },
            };
            if same_atom {
                let last_w = weights.last_mut().unwrap();
                *last_w = &*last_w + &w;
            } else {
                support.push(x);
                weights.push(w);
            }
        }
        if support.is_empty() {
            return Err(MeasureError::Empty);
        }

        let total =
            weights.iter().fold(Scalar::zero(regime), |acc, w| &acc + w) + mass_defect.clone();
        let ok = match regime {
            Regime::Exact => total == Scalar::one(regime),
            Regime::Float => (total.to_f64() - 1.0).abs() <= WEIGHT_SUM_TOL,
        };
        if !ok {
            return Err(MeasureError::WeightSum {
                got: total.to_string(),
            });
        }

        Ok(FiniteMeasure {
            support,
            weights,
            regime,
            mass_defect,
        })
    }

    /// Coefficient-weighted mixture of measures; atoms at the same location
    /// merge and the defects combine coefficient-weighted.
    pub fn mixture(
        coeffs: &[Scalar],
        parts: &[FiniteMeasure],
    ) -> Result<FiniteMeasure, MeasureError> {
        if coeffs.len() != parts.len() {
            return Err(MeasureError::MixtureLength {
                coeffs: coeffs.len(),
                parts: parts.len(),
            });
        }
        if coeffs.is_empty() {
            return Err(MeasureError::Empty);
        }
        let mut regime = Regime::Exact;
        for c in coeffs {
            regime = regime.join(c.regime());
        }
        for p in parts {
            regime = regime.join(p.regime);
        }
        for c in coeffs {
            if c.is_negative() {
                return Err(MeasureError::NegativeCoefficient(c.to_string()));
            }
        }
        let total = coeffs
            .iter()
            .fold(Scalar::zero(regime), |acc, c| &acc + &c.coerce(regime));
        let ok = match regime {
            Regime::Exact => total == Scalar::one(regime),
            Regime::Float => (total.to_f64() - 1.0).abs() <= WEIGHT_SUM_TOL,
        };
        if !ok {
            return Err(MeasureError::CoefficientSum {
                got: total.to_string(),
            });
        }

        let mut atoms = Vec::new();
        let mut defect = Scalar::zero(regime);
        for (c, part) in coeffs.iter().zip(parts) {
            let c = c.coerce(regime);
            if c.is_zero() {
                continue;
            }
            defect = &defect + &(&c * &part.mass_defect.coerce(regime));
            for (x, w) in part.atoms() {
                atoms.push((x.coerce(regime), &c * &w.coerce(regime)));
            }
        }
        FiniteMeasure::from_atoms(atoms, defect)
    }

    /// Law of the sum of independent draws from `self` and `other`.
    ///
    /// Lattice-supported operands go through a dense kernel indexed by
    /// offset; general supports take a sorted merge of pairwise sums.
    /// Defects combine as `1 - (1 - d_a)(1 - d_b)`.
    pub fn convolve(&self, other: &FiniteMeasure) -> FiniteMeasure {
        let regime = self.regime.join(other.regime);
        let one = Scalar::one(regime);
        let defect = &one
            - &(&(&one - &self.mass_defect.coerce(regime))
                * &(&one - &other.mass_defect.coerce(regime)));

        if let Some(m) = self.convolve_lattice(other, regime, &defect) {
            return m;
        }

        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for (x, wx) in self.atoms() {
            let x = x.coerce(regime);
            let wx = wx.coerce(regime);
            for (y, wy) in other.atoms() {
                atoms.push((&x + &y.coerce(regime), &wx * &wy.coerce(regime)));
            }
        }
        FiniteMeasure::from_atoms(atoms, defect).expect("convolution of valid measures is valid")
    }

    /// Dense convolution when both supports live on a common affine lattice
    /// `x0 + k*h`. Returns `None` when no such lattice is detected.
    fn convolve_lattice(
        &self,
        other: &FiniteMeasure,
        regime: Regime,
        defect: &Scalar,
    ) -> Option<FiniteMeasure> {
        match regime {
            Regime::Float => {
                let (a0, ha, ai) = float_lattice(&self.support)?;
                let (b0, hb, bi) = float_lattice(&other.support)?;
                let h = match (ha, hb) {
                    (Some(ha), Some(hb)) => {
                        if (ha - hb).abs() > DEFAULT_SNAP * ha.abs().max(1.0) {
                            return None;
                        }
                        ha
                    }
                    (Some(h), None) | (None, Some(h)) => h,
                    // Two point masses: translation.
                    (None, None) => 1.0,
                };
                let n_bins = ai.last().unwrap() + bi.last().unwrap() + 1;
                if n_bins > MAX_LATTICE_BINS {
                    return None;
                }
                let wa: Vec<f64> = self.weights.iter().map(Scalar::to_f64).collect();
                let wb: Vec<f64> = other.weights.iter().map(Scalar::to_f64).collect();
                let mut bins = vec![0.0f64; n_bins];
                for (i, &wi) in ai.iter().zip(&wa) {
                    for (j, &wj) in bi.iter().zip(&wb) {
                        bins[i + j] += wi * wj;
                    }
                }
                let x0 = a0 + b0;
                let atoms = bins
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(k, w)| (Scalar::Float(x0 + k as f64 * h), Scalar::Float(w)))
                    .collect();
                Some(
                    FiniteMeasure::from_atoms(atoms, defect.clone())
                        .expect("lattice convolution of valid measures is valid"),
                )
            }
            Regime::Exact => {
                let (a0, ha, ai) = exact_lattice(&self.support)?;
                let (b0, hb, bi) = exact_lattice(&other.support)?;
                let h = match (ha, hb) {
                    (Some(ha), Some(hb)) => {
                        if ha != hb {
                            return None;
                        }
                        ha
                    }
                    (Some(h), None) | (None, Some(h)) => h,
                    (None, None) => BigRational::from_integer(1.into()),
                };
                let n_bins = ai.last().unwrap() + bi.last().unwrap() + 1;
                if n_bins > MAX_LATTICE_BINS {
                    return None;
                }
                let zero = BigRational::from_integer(0.into());
                let mut bins = vec![zero; n_bins];
                for (i, wi) in ai.iter().zip(&self.weights) {
                    let wi = wi.as_exact().unwrap();
                    for (j, wj) in bi.iter().zip(&other.weights) {
                        bins[i + j] += wi * wj.as_exact().unwrap();
                    }
                }
                let x0 = &a0 + &b0;
                let atoms = bins
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| !num::Zero::is_zero(w))
                    .map(|(k, w)| {
                        let x = &x0 + &h * BigRational::from_integer(k.into());
                        (Scalar::Exact(x), Scalar::Exact(w))
                    })
                    .collect();
                Some(
                    FiniteMeasure::from_atoms(atoms, defect.clone())
                        .expect("lattice convolution of valid measures is valid"),
                )
            }
        }
    }

    /// `m`-fold self-convolution; `m = 0` is the neutral element, a point
    /// mass at zero.
    pub fn convolve_power(&self, m: u32) -> FiniteMeasure {
        let mut acc = FiniteMeasure::dirac(Scalar::zero(self.regime));
        for _ in 0..m {
            acc = acc.convolve(self);
        }
        acc
    }

    /// Pushforward under `x -> scale*x + shift`. Weights are unchanged; the
    /// support re-sorts when `scale < 0`.
    pub fn pushforward_affine(
        &self,
        scale: &Scalar,
        shift: &Scalar,
    ) -> Result<FiniteMeasure, MeasureError> {
        if scale.is_zero() {
            return Err(MeasureError::ZeroScale);
        }
        let atoms = self
            .atoms()
            .map(|(x, w)| (&(scale * &x) + shift, w))
            .collect();
        FiniteMeasure::from_atoms(atoms, self.mass_defect.clone())
    }

    /// First moment over the retained support (the truncated tail, if any,
    /// is excluded; callers account for it through `mass_defect`).
    pub fn mean(&self) -> Scalar {
        self.atoms()
            .fold(Scalar::zero(self.regime), |acc, (x, w)| acc + &x * &w)
    }

    /// Integral of `phi` against the retained atoms.
    pub fn expectation<F>(&self, phi: F) -> Result<Scalar, MeasureError>
    where
        F: Fn(&Scalar) -> Scalar,
    {
        let mut acc = Scalar::zero(self.regime);
        for (x, w) in self.atoms() {
            let v = phi(&x);
            if let Scalar::Float(f) = v {
                if f.is_nan() {
                    return Err(MeasureError::FunctionUndefined(x.to_string()));
                }
            }
            acc = acc + &v * &w;
        }
        Ok(acc)
    }

    pub fn variance(&self) -> Scalar {
        let mean = self.mean();
        let second = self.atoms().fold(Scalar::zero(self.regime), |acc, (x, w)| {
            acc + &(&x * &x) * &w
        });
        second - &mean * &mean
    }

    /// Cumulative distribution function of the retained atoms at `x`.
    pub fn cdf(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(self.regime);
        for (p, w) in self.atoms() {
            if p.total_cmp(x) == std::cmp::Ordering::Greater {
                break;
            }
            acc = acc + w;
        }
        acc
    }

    pub fn atoms(&self) -> impl Iterator<Item = (Scalar, Scalar)> + '_ {
        self.support
            .iter()
            .cloned()
            .zip(self.weights.iter().cloned())
    }

    pub fn support(&self) -> &[Scalar] {
        &self.support
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn mass_defect(&self) -> &Scalar {
        &self.mass_defect
    }

    pub fn min_support(&self) -> &Scalar {
        self.support.first().expect("measure is never empty")
    }

    pub fn max_support(&self) -> &Scalar {
        self.support.last().expect("measure is never empty")
    }

    pub fn support_diameter(&self) -> Scalar {
        self.max_support() - self.min_support()
    }

    pub fn total_weight(&self) -> Scalar {
        self.weights
            .iter()
            .fold(Scalar::zero(self.regime), |acc, w| &acc + w)
    }

    /// Element-wise comparison within an absolute tolerance; structural
    /// equality of the atom lists, not of the distributions as functions.
    pub fn approx_eq(&self, other: &FiniteMeasure, atol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let close = |a: &Scalar, b: &Scalar| (a.to_f64() - b.to_f64()).abs() <= atol;
        self.support
            .iter()
            .zip(&other.support)
            .all(|(a, b)| close(a, b))
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| close(a, b))
            && close(&self.mass_defect, &other.mass_defect)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MeasureRepr::from(self)).expect("measure serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<FiniteMeasure, MeasureError> {
        let repr: MeasureRepr = serde_json::from_value(value.clone())
            .map_err(|e| MeasureError::WeightSum { got: e.to_string() })?;
        repr.try_into()
    }
}

impl PartialEq for FiniteMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.regime == other.regime
            && self.support == other.support
            && self.weights == other.weights
            && self.mass_defect == other.mass_defect
    }
}

impl Serialize for FiniteMeasure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MeasureRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(deserializer)?;
        repr.try_into().map_err(serde::de::Error::custom)
    }
}

/// Detect `x0 + k*h` structure of a sorted float support. Returns the base
/// point, the spacing (`None` for singletons), and the integer indices.
fn float_lattice(support: &[Scalar]) -> Option<(f64, Option<f64>, Vec<usize>)> {
    let xs: Vec<f64> = support.iter().map(Scalar::to_f64).collect();
    let x0 = xs[0];
    if xs.len() == 1 {
        return Some((x0, None, vec![0]));
    }
    let mut h = f64::INFINITY;
    for w in xs.windows(2) {
        h = h.min(w[1] - w[0]);
    }
    if !(h.is_finite() && h > 0.0) {
        return None;
    }
    let span = xs[xs.len() - 1] - x0;
    if span / h > (MAX_LATTICE_BINS - 1) as f64 {
        return None;
    }
    // Refit the spacing to the full span: the minimal gap alone drifts by
    // thousands of ulps over long uniform grids.
    let steps = (span / h).round();
    if steps >= 1.0 {
        h = span / steps;
    }
    let tol = DEFAULT_SNAP * (1.0 + span.abs());
    let mut idx = Vec::with_capacity(xs.len());
    for &x in &xs {
        let k = ((x - x0) / h).round();
        if (x - (x0 + k * h)).abs() > tol {
            return None;
        }
        idx.push(k as usize);
    }
    Some((x0, Some(h), idx))
}

/// Exact-regime lattice detection: points must differ by integer multiples
/// of the minimal gap.
fn exact_lattice(support: &[Scalar]) -> Option<(BigRational, Option<BigRational>, Vec<usize>)> {
    let xs: Vec<&BigRational> = support.iter().map(|s| s.as_exact().unwrap()).collect();
    let x0 = xs[0].clone();
    if xs.len() == 1 {
        return Some((x0, None, vec![0]));
    }
    let mut h: Option<BigRational> = None;
    for w in xs.windows(2) {
        let d = w[1] - w[0];
        if h.as_ref().is_none_or(|cur| d < *cur) {
            h = Some(d);
        }
    }
    let h = h?;
    let mut idx = Vec::with_capacity(xs.len());
    for &x in &xs {
        let q = (x - &x0) / &h;
        if !q.is_integer() {
            return None;
        }
        let k = q.to_integer().to_usize()?;
        if k >= MAX_LATTICE_BINS {
            return None;
        }
        idx.push(k);
    }
    Some((x0, Some(h), idx))
}

/// Wire format: `{"regime": ..., "atoms": [{"x": ..., "w": ...}], "mass_defect": ...}`.
#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    regime: String,
    atoms: Vec<AtomRepr>,
    mass_defect: Scalar,
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    x: Scalar,
    w: Scalar,
}

impl From<&FiniteMeasure> for MeasureRepr {
    fn from(m: &FiniteMeasure) -> Self {
        MeasureRepr {
            regime: m.regime.as_str().to_string(),
            atoms: m.atoms().map(|(x, w)| AtomRepr { x, w }).collect(),
            mass_defect: m.mass_defect.clone(),
        }
    }
}

impl TryFrom<MeasureRepr> for FiniteMeasure {
    type Error = MeasureError;

    fn try_from(repr: MeasureRepr) -> Result<Self, MeasureError> {
        let atoms = repr.atoms.into_iter().map(|a| (a.x, a.w)).collect();
        let m = FiniteMeasure::from_atoms(atoms, repr.mass_defect)?;
        // The regime tag is redundant with the scalars but must agree.
        if m.regime.as_str() != repr.regime {
            return Err(MeasureError::WeightSum {
                got: format!("regime tag {} does not match atoms", repr.regime),
            });
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Scalar {
        Scalar::from_ratio(1, 2)
    }

    /// The two-point/two-point pair used across the crate's tests:
    /// a = (1/2)d_{-3} + (1/2)d_1, b = (3/4)d_0 + (1/4)d_4.
    pub(crate) fn test_pair() -> (FiniteMeasure, FiniteMeasure) {
        let a = FiniteMeasure::mixture(
            &[half(), half()],
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
        (a, b)
    }

    #[test]
    fn dirac_basics() {
        let d = FiniteMeasure::dirac(Scalar::from_int(0));
        assert_eq!(d.len(), 1);
        assert_eq!(d.mean(), Scalar::from_int(0));
        let d = FiniteMeasure::dirac(Scalar::from_int(-3));
        assert_eq!(*d.min_support(), Scalar::from_int(-3));
        assert_eq!(
            FiniteMeasure::dirac(Scalar::from_ratio(7, 2)).mean(),
            Scalar::from_ratio(7, 2)
        );
    }

    #[test]
    fn mixture_merges_identical_points() {
        let d = FiniteMeasure::dirac(Scalar::from_int(0));
        let m = FiniteMeasure::mixture(&[half(), half()], &[d.clone(), d]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.weights()[0], Scalar::from_int(1));
    }

    #[test]
    fn mixture_two_point() {
        let (a, b) = test_pair();
        assert_eq!(a.mean(), Scalar::from_int(-1));
        assert_eq!(b.mean(), Scalar::from_int(1));
        assert_eq!(a.weights()[0], half());
        assert_eq!(b.weights()[0], Scalar::from_ratio(3, 4));
    }

    #[test]
    fn mixture_rejects_bad_coefficients() {
        let d = FiniteMeasure::dirac(Scalar::from_int(0));
        let err = FiniteMeasure::mixture(&[half()], std::slice::from_ref(&d));
        assert!(matches!(err, Err(MeasureError::CoefficientSum { .. })));
        let err = FiniteMeasure::mixture(
            &[Scalar::from_int(2), Scalar::from_int(-1)],
            &[d.clone(), d],
        );
        assert!(matches!(err, Err(MeasureError::NegativeCoefficient(_))));
    }

    #[test]
    fn convolve_translates_point_masses() {
        let a = FiniteMeasure::dirac(Scalar::from_int(2));
        let b = FiniteMeasure::dirac(Scalar::from_ratio(1, 2));
        let c = a.convolve(&b);
        assert_eq!(c.len(), 1);
        assert_eq!(*c.min_support(), Scalar::from_ratio(5, 2));
    }

    #[test]
    fn convolve_bernoulli_pair() {
        // B(1,1/2) * B(1,1/2) = {0: 1/4, 1: 1/2, 2: 1/4}
        let b1 = FiniteMeasure::from_atoms(
            vec![(Scalar::from_int(0), half()), (Scalar::from_int(1), half())],
            Scalar::from_int(0),
        )
        .unwrap();
        let c = b1.convolve(&b1);
        assert_eq!(c.len(), 3);
        assert_eq!(c.weights()[0], Scalar::from_ratio(1, 4));
        assert_eq!(c.weights()[1], Scalar::from_ratio(1, 2));
        assert_eq!(c.weights()[2], Scalar::from_ratio(1, 4));
    }

    #[test]
    fn convolve_test_pair_enumeration() {
        // Pairwise-sum enumeration over the 4 support pairs gives
        // {-3: 3/8, 1: 4/8, 5: 1/8}.
        let (a, b) = test_pair();
        let c = a.convolve(&b);
        assert_eq!(
            c.support().to_vec(),
            vec![
                Scalar::from_int(-3),
                Scalar::from_int(1),
                Scalar::from_int(5),
            ]
        );
        assert_eq!(
            c.weights().to_vec(),
            vec![
                Scalar::from_ratio(3, 8),
                Scalar::from_ratio(4, 8),
                Scalar::from_ratio(1, 8),
            ]
        );
    }

    #[test]
    fn convolve_power_conventions() {
        let (a, _) = test_pair();
        let e = a.convolve_power(0);
        assert_eq!(e, FiniteMeasure::dirac(Scalar::from_int(0)));
        let d3 = FiniteMeasure::dirac(Scalar::from_int(1)).convolve_power(3);
        assert_eq!(d3, FiniteMeasure::dirac(Scalar::from_int(3)));
        let b1 = FiniteMeasure::from_atoms(
            vec![(Scalar::from_int(0), half()), (Scalar::from_int(1), half())],
            Scalar::from_int(0),
        )
        .unwrap();
        assert_eq!(b1.convolve_power(2), b1.convolve(&b1));
    }

    #[test]
    fn convolution_mean_is_additive() {
        let (a, b) = test_pair();
        let c = a.convolve(&b);
        assert_eq!(c.mean(), &a.mean() + &b.mean());
    }

    #[test]
    fn pushforward_scales_and_inverts() {
        let d = FiniteMeasure::dirac(Scalar::from_int(2));
        let scaled = d
            .pushforward_affine(&Scalar::from_ratio(1, 4), &Scalar::from_int(0))
            .unwrap();
        assert_eq!(scaled, FiniteMeasure::dirac(Scalar::from_ratio(1, 2)));

        let (a, _) = test_pair();
        let s = Scalar::from_ratio(-3, 2);
        let t = Scalar::from_ratio(1, 7);
        let fwd = a.pushforward_affine(&s, &t).unwrap();
        let back = fwd
            .pushforward_affine(&(&Scalar::one(Regime::Exact) / &s), &(&(-&t) / &s))
            .unwrap();
        assert_eq!(back, a);

        assert!(matches!(
            a.pushforward_affine(&Scalar::from_int(0), &t),
            Err(MeasureError::ZeroScale)
        ));
    }

    #[test]
    fn pushforward_identity() {
        let (a, _) = test_pair();
        let same = a
            .pushforward_affine(&Scalar::from_int(1), &Scalar::from_int(0))
            .unwrap();
        assert_eq!(same, a);
    }

    #[test]
    fn expectation_of_point_mass() {
        let d = FiniteMeasure::dirac(Scalar::from_ratio(5, 3));
        let v = d.expectation(|x| x * x).unwrap();
        assert_eq!(v, Scalar::from_ratio(25, 9));
    }

    #[test]
    fn float_snap_collapses_lattice_sums() {
        // 0.1 + 0.2 != 0.3 exactly; snapping must still merge the atoms.
        let a = FiniteMeasure::from_atoms(
            vec![
                (Scalar::Float(0.1), Scalar::Float(0.5)),
                (Scalar::Float(0.2), Scalar::Float(0.5)),
            ],
            Scalar::Float(0.0),
        )
        .unwrap();
        let b = FiniteMeasure::from_atoms(
            vec![
                (Scalar::Float(0.2), Scalar::Float(0.5)),
                (Scalar::Float(0.1), Scalar::Float(0.5)),
            ],
            Scalar::Float(0.0),
        )
        .unwrap();
        let c = a.convolve(&b);
        assert_eq!(c.len(), 3);
        assert!((c.weights()[1].to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn defect_combines_multiplicatively() {
        let a = FiniteMeasure::from_atoms(
            vec![(Scalar::Float(0.0), Scalar::Float(0.9))],
            Scalar::Float(0.1),
        )
        .unwrap();
        let c = a.convolve(&a);
        assert!((c.mass_defect().to_f64() - 0.19).abs() < 1e-15);
        assert!((c.total_weight().to_f64() - 0.81).abs() < 1e-15);
    }

    #[test]
    fn cdf_prefix_sums() {
        let (a, _) = test_pair();
        assert_eq!(a.cdf(&Scalar::from_int(-4)), Scalar::from_int(0));
        assert_eq!(a.cdf(&Scalar::from_int(-3)), half());
        assert_eq!(a.cdf(&Scalar::from_int(0)), half());
        assert_eq!(a.cdf(&Scalar::from_int(1)), Scalar::from_int(1));
    }

    #[test]
    fn exact_regime_rejects_defect() {
        let err = FiniteMeasure::from_atoms(
            vec![(Scalar::from_int(0), Scalar::from_ratio(1, 2))],
            Scalar::from_ratio(1, 2),
        );
        assert!(matches!(err, Err(MeasureError::InvalidDefect(_))));
    }

    #[test]
    fn json_round_trip_exact_and_float() {
        let (a, _) = test_pair();
        let json = a.to_json();
        assert_eq!(json["regime"], "exact");
        assert_eq!(json["atoms"][0]["x"], "-3/1");
        let back = FiniteMeasure::from_json(&json).unwrap();
        assert_eq!(back, a);

        let f = FiniteMeasure::from_atoms(
            vec![
                (Scalar::Float(0.0), Scalar::Float(0.25)),
                (Scalar::Float(1.5), Scalar::Float(0.75)),
            ],
            Scalar::Float(0.0),
        )
        .unwrap();
        let back = FiniteMeasure::from_json(&f.to_json()).unwrap();
        assert!(back.approx_eq(&f, 0.0));
    }
}
