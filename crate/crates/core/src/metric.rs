//! Distances between persistence pairs.
//!
//! The lifted distance weights the birth and death coordinates and the
//! per-axis offsets between the extrema of two pairs:
//!
//! ```text
//! d(p, q) = (alpha*db^nu + beta*dd^nu + g1*dx^nu + g2*dy^nu + g3*dz^nu)^(1/nu)
//! ```
//!
//! Removing a pair (matching it to the diagonal) costs either the literal
//! lifted form `alpha*|birth|^nu + beta*|death|^nu + ...` ([`DiagonalMode::Lifted`])
//! or the orthogonal projection onto the diagonal, where both coordinates move
//! by half the persistence ([`DiagonalMode::Projection`]). In both modes the
//! geometric terms measure the offset between the two critical points of the
//! pair.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{self, AssignmentError};
use crate::persistence::{PairClass, PersistencePair};
use crate::scalar::{pow_nu, root_nu, Scalar};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("pair classes differ ({0:?} vs {1:?})")]
    ClassMismatch(PairClass, PairClass),
    #[error("invalid metric parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalMode {
    Lifted,
    Projection,
}

impl DiagonalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagonalMode::Lifted => "lifted",
            DiagonalMode::Projection => "projection",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lifted" => Some(DiagonalMode::Lifted),
            "projection" => Some(DiagonalMode::Projection),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams<T> {
    pub nu: T,
    /// Birth weight.
    pub alpha: T,
    /// Death weight.
    pub beta: T,
    /// Per-axis geometric weights.
    pub gamma: [T; 3],
    pub diagonal_mode: DiagonalMode,
}

impl<T: Scalar> MetricParams<T> {
    /// Defaults for tracking maxima on normalized data: the birth (saddle)
    /// coordinate gets a small weight.
    pub fn maxima() -> Self {
        Self {
            nu: T::lit(2.0),
            alpha: T::lit(0.1),
            beta: T::one(),
            gamma: [T::one(); 3],
            diagonal_mode: DiagonalMode::Projection,
        }
    }

    /// Defaults for tracking minima: the death (saddle) coordinate gets the
    /// small weight.
    pub fn minima() -> Self {
        Self {
            alpha: T::one(),
            beta: T::lit(0.1),
            ..Self::maxima()
        }
    }

    pub fn for_class(class: PairClass) -> Self {
        match class {
            PairClass::MinSaddle => Self::minima(),
            PairClass::SaddleMax => Self::maxima(),
        }
    }

    /// Plain birth/death metric without geometric lifting.
    pub fn unlifted() -> Self {
        Self {
            nu: T::lit(2.0),
            alpha: T::one(),
            beta: T::one(),
            gamma: [T::zero(); 3],
            diagonal_mode: DiagonalMode::Projection,
        }
    }

    pub fn with_mode(mut self, mode: DiagonalMode) -> Self {
        self.diagonal_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        if !(self.nu >= T::one()) || !self.nu.is_finite() {
            return Err(MetricError::InvalidParams(format!("nu must be >= 1, got {}", self.nu)));
        }
        let weights = [self.alpha, self.beta, self.gamma[0], self.gamma[1], self.gamma[2]];
        if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(MetricError::InvalidParams(
                "weights must be finite and non-negative".into(),
            ));
        }
        if weights.iter().all(|w| *w == T::zero()) {
            return Err(MetricError::InvalidParams(
                "at least one weight must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl Default for MetricParams<f64> {
    fn default() -> Self {
        Self::maxima()
    }
}

/// A persistence pair as seen by the metric: its birth/death coordinates and
/// the positions of its extremum and of its other critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPoint<T> {
    pub birth: T,
    pub death: T,
    pub extremum_coords: [T; 3],
    pub other_coords: [T; 3],
    pub pair_class: PairClass,
}

impl<T: Scalar> MatchPoint<T> {
    pub fn persistence(&self) -> T {
        self.death - self.birth
    }
}

impl<T: Scalar> From<&PersistencePair<T>> for MatchPoint<T> {
    fn from(p: &PersistencePair<T>) -> Self {
        Self {
            birth: p.birth,
            death: p.death,
            extremum_coords: p.extremum().coords,
            other_coords: p.partner().coords,
            pair_class: p.pair_class,
        }
    }
}

pub fn match_points<T: Scalar>(pairs: &[PersistencePair<T>]) -> Vec<MatchPoint<T>> {
    pairs.iter().map(MatchPoint::from).collect()
}

/// `(|a.birth - b.birth|^nu + |a.death - b.death|^nu)^(1/nu)`.
pub fn pointwise_distance<T: Scalar>(a: &MatchPoint<T>, b: &MatchPoint<T>, nu: T) -> T {
    root_nu(
        pow_nu((a.birth - b.birth).abs(), nu) + pow_nu((a.death - b.death).abs(), nu),
        nu,
    )
}

/// Lifted distance raised to the power `nu`. Does not check pair classes.
#[inline]
pub fn lifted_cost<T: Scalar>(p: &MatchPoint<T>, q: &MatchPoint<T>, params: &MetricParams<T>) -> T {
    let nu = params.nu;
    let mut s =
        params.alpha * pow_nu((p.birth - q.birth).abs(), nu) + params.beta * pow_nu((p.death - q.death).abs(), nu);
    for a in 0..3 {
        if params.gamma[a] != T::zero() {
            s += params.gamma[a] * pow_nu((p.extremum_coords[a] - q.extremum_coords[a]).abs(), nu);
        }
    }
    s
}

pub fn lifted_distance<T: Scalar>(
    p: &MatchPoint<T>,
    q: &MatchPoint<T>,
    params: &MetricParams<T>,
) -> Result<T, MetricError> {
    if p.pair_class != q.pair_class {
        return Err(MetricError::ClassMismatch(p.pair_class, q.pair_class));
    }
    Ok(root_nu(lifted_cost(p, q, params), params.nu))
}

/// Cost of matching `p` to the diagonal, raised to the power `nu`.
#[inline]
pub fn diagonal_cost_pow<T: Scalar>(p: &MatchPoint<T>, params: &MetricParams<T>) -> T {
    let nu = params.nu;
    let mut s = match params.diagonal_mode {
        DiagonalMode::Lifted => params.alpha * pow_nu(p.birth.abs(), nu) + params.beta * pow_nu(p.death.abs(), nu),
        DiagonalMode::Projection => {
            let half = pow_nu((p.death - p.birth).abs() * T::lit(0.5), nu);
            (params.alpha + params.beta) * half
        }
    };
    for a in 0..3 {
        if params.gamma[a] != T::zero() {
            s += params.gamma[a] * pow_nu((p.extremum_coords[a] - p.other_coords[a]).abs(), nu);
        }
    }
    s
}

pub fn diagonal_cost<T: Scalar>(p: &MatchPoint<T>, params: &MetricParams<T>) -> T {
    root_nu(diagonal_cost_pow(p, params), params.nu)
}

/// True when matching `p` with `q` costs more than sending both to the
/// diagonal; such a match is never part of an optimal assignment.
pub fn prune_predicate<T: Scalar>(p: &MatchPoint<T>, q: &MatchPoint<T>, params: &MetricParams<T>) -> bool {
    root_nu(lifted_cost(p, q, params), params.nu) > diagonal_cost(p, params) + diagonal_cost(q, params)
}

/// Wasserstein distance between two diagrams of one class, using the exact
/// reduced-matrix solver.
pub fn wasserstein_distance<T: Scalar>(
    d1: &[MatchPoint<T>],
    d2: &[MatchPoint<T>],
    params: &MetricParams<T>,
) -> Result<T, AssignmentError> {
    let result = assignment::solve_reduced(d1, d2, params)?;
    Ok(root_nu(result.total_cost.max(T::zero()), params.nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mp(birth: f64, death: f64, e: [f64; 3], o: [f64; 3]) -> MatchPoint<f64> {
        MatchPoint {
            birth,
            death,
            extremum_coords: e,
            other_coords: o,
            pair_class: PairClass::SaddleMax,
        }
    }

    fn unit_params() -> MetricParams<f64> {
        MetricParams {
            nu: 2.0,
            alpha: 0.1,
            beta: 1.0,
            gamma: [1.0; 3],
            diagonal_mode: DiagonalMode::Projection,
        }
    }

    #[test]
    fn pointwise_examples() {
        let a = mp(0.0, 0.0, [0.0; 3], [0.0; 3]);
        let b = mp(3.0, 4.0, [0.0; 3], [0.0; 3]);
        assert_eq!(pointwise_distance(&a, &a, 2.0), 0.0);
        assert!((pointwise_distance(&a, &b, 2.0) - 5.0).abs() < 1e-15);
        let c = mp(1.0, 2.0, [0.0; 3], [0.0; 3]);
        let d = mp(3.0, 5.0, [0.0; 3], [0.0; 3]);
        assert!((pointwise_distance(&c, &d, 1.0) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn lifted_examples() {
        let p = mp(0.2, 0.9, [0.0; 3], [0.0; 3]);
        let q = mp(0.3, 0.8, [1.0, 0.0, 0.0], [0.0; 3]);
        let d = lifted_distance(&p, &q, &unit_params()).unwrap();
        assert!((d - 1.011f64.sqrt()).abs() < 1e-12);
        assert!((d - 1.005484).abs() < 1e-6);
        assert_eq!(lifted_distance(&p, &p, &unit_params()).unwrap(), 0.0);

        let plain = MetricParams::<f64>::unlifted();
        let q2 = mp(0.3, 0.8, [0.7, 0.1, 0.4], [0.0; 3]);
        assert!((lifted_distance(&p, &q2, &plain).unwrap() - pointwise_distance(&p, &q2, 2.0)).abs() < 1e-15);

        let mut m = q;
        m.pair_class = PairClass::MinSaddle;
        assert!(lifted_distance(&p, &m, &plain).is_err());
    }

    #[test]
    fn diagonal_examples() {
        let z = mp(0.4, 0.4, [0.2, 0.3, 0.0], [0.2, 0.3, 0.0]);
        assert_eq!(diagonal_cost(&z, &unit_params()), 0.0);

        let p = mp(0.3, 0.7, [0.0; 3], [0.5, 0.5, 0.0]);
        let plain = MetricParams::<f64>::unlifted();
        let lifted = plain.with_mode(DiagonalMode::Lifted);
        assert!((diagonal_cost(&p, &lifted) - 0.58f64.sqrt()).abs() < 1e-12);
        assert!((diagonal_cost(&p, &lifted) - 0.761577).abs() < 1e-6);
        assert!((diagonal_cost(&p, &plain) - 0.08f64.sqrt()).abs() < 1e-12);
        assert!((diagonal_cost(&p, &plain) - 0.282843).abs() < 1e-6);
    }

    #[test]
    fn prune_examples() {
        let params = unit_params();
        let p = mp(0.5, 0.52, [0.0, 0.0, 0.0], [0.01, 0.0, 0.0]);
        assert!(!prune_predicate(&p, &p, &params));
        // near-diagonal pairs in opposite corners: lifted distance ~ sqrt(2),
        // diagonal costs ~ 0.0106 each
        let q = mp(0.5, 0.52, [1.0, 1.0, 0.0], [1.0, 0.99, 0.0]);
        let d = lifted_distance(&p, &q, &params).unwrap();
        let s = diagonal_cost(&p, &params) + diagonal_cost(&q, &params);
        assert!(d > 1.4 && s < 0.05);
        assert!(prune_predicate(&p, &q, &params));
        let no_geo = MetricParams {
            gamma: [0.0; 3],
            ..params
        };
        assert!(!prune_predicate(&p, &q, &no_geo));
    }

    #[test]
    fn validation() {
        assert!(MetricParams::<f64>::maxima().validate().is_ok());
        let bad = MetricParams {
            nu: 0.5,
            ..MetricParams::<f64>::maxima()
        };
        assert!(bad.validate().is_err());
        let zero = MetricParams {
            alpha: 0.0,
            beta: 0.0,
            gamma: [0.0; 3],
            ..MetricParams::<f64>::maxima()
        };
        assert!(zero.validate().is_err());
    }

    #[test]
    fn generic_over_f32() {
        let p = MatchPoint::<f32> {
            birth: 0.2,
            death: 0.9,
            extremum_coords: [0.0; 3],
            other_coords: [0.0; 3],
            pair_class: PairClass::SaddleMax,
        };
        let q = MatchPoint {
            birth: 0.3,
            death: 0.8,
            extremum_coords: [1.0, 0.0, 0.0],
            ..p
        };
        let d = lifted_distance(&p, &q, &MetricParams::<f32>::maxima()).unwrap();
        assert!((d - 1.005484).abs() < 1e-5);
    }

    fn arb_point() -> impl Strategy<Value = MatchPoint<f64>> {
        (
            0.0..1.0f64,
            0.0..1.0f64,
            prop::array::uniform3(0.0..1.0f64),
            prop::array::uniform3(0.0..1.0f64),
        )
            .prop_map(|(a, b, e, o)| mp(a.min(b), a.max(b), e, o))
    }

    fn arb_params() -> impl Strategy<Value = MetricParams<f64>> {
        (
            prop::sample::select(vec![1.0, 2.0, 3.0]),
            0.01..2.0f64,
            0.01..2.0f64,
            prop::array::uniform3(0.01..2.0f64),
        )
            .prop_map(|(nu, alpha, beta, gamma)| MetricParams {
                nu,
                alpha,
                beta,
                gamma,
                diagonal_mode: DiagonalMode::Projection,
            })
    }

    proptest! {
        #[test]
        fn lifted_is_a_metric(p in arb_point(), q in arb_point(), r in arb_point(), params in arb_params()) {
            let d = |a: &MatchPoint<f64>, b: &MatchPoint<f64>| lifted_distance(a, b, &params).unwrap();
            prop_assert_eq!(d(&p, &p), 0.0);
            prop_assert!(d(&p, &q) >= 0.0);
            prop_assert!((d(&p, &q) - d(&q, &p)).abs() <= 1e-12);
            prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
            let pd = |a: &MatchPoint<f64>, b: &MatchPoint<f64>| pointwise_distance(a, b, params.nu);
            prop_assert!(pd(&p, &r) <= pd(&p, &q) + pd(&q, &r) + 1e-12);
            prop_assert!((pd(&p, &q) - pd(&q, &p)).abs() <= 1e-12);
        }
    }
}
