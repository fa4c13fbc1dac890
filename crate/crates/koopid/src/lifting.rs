//! State and input lifting functions.
//!
//! States are lifted to monomial features plus thin-plate radial basis
//! functions with Latin-hypercube sampled centers; inputs pass through
//! unchanged. The degree-1 monomials are the raw state itself, so the leading
//! `m` entries of every lifted state equal `x` bit-for-bit and the state is
//! recovered by reading them back (output map `C = I`, `D = 0`).

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Layout tag for the lifted-feature ordering. Bump on any reordering so
/// stale model files cannot be silently mis-applied.
pub const FEATURE_ORDER_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LiftingError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("training feature matrix is empty")]
    EmptyTrainingData,
    #[error("state recovery requires include_raw_states")]
    RecoveryUnsupported,
    #[error("invalid lifting parameter: {0}")]
    InvalidParam(String),
}

/// Declarative description of the lifting, sufficient to re-lift any state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftingSpec {
    pub state_dim: usize,
    pub input_dim: usize,
    /// Monomial degree of the polynomial block: 1 (raw states only) or 2
    /// (raw states followed by all degree-2 monomial combinations).
    pub monomial_degree: u32,
    /// RBF centers in polynomial-feature space.
    pub rbf_centers: Vec<Vec<f64>>,
    /// RBF shape parameter.
    pub alpha: f64,
    /// RBF distance offset keeping `r² ln r` defined.
    pub delta: f64,
    /// Whether the leading `state_dim` entries are guaranteed to be the raw
    /// state, enabling recovery.
    pub include_raw_states: bool,
    /// Seed used to sample the centers, kept for reproducibility.
    pub center_seed: u64,
    pub feature_version: u32,
}

impl LiftingSpec {
    /// Identity lifting: the lifted state is the state itself.
    pub fn identity(state_dim: usize, input_dim: usize) -> Self {
        Self {
            state_dim,
            input_dim,
            monomial_degree: 1,
            rbf_centers: Vec::new(),
            alpha: 1.0,
            delta: 1.0,
            include_raw_states: true,
            center_seed: 0,
            feature_version: FEATURE_ORDER_VERSION,
        }
    }

    /// Monomial lifting without radial basis functions.
    pub fn polynomial(
        state_dim: usize,
        input_dim: usize,
        monomial_degree: u32,
    ) -> Result<Self, LiftingError> {
        let spec = Self {
            monomial_degree,
            ..Self::identity(state_dim, input_dim)
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Full lifting with `rbf_count` thin-plate RBFs whose centers are
    /// Latin-hypercube sampled over the polynomial features of the given
    /// training states (one state per column).
    #[allow(clippy::too_many_arguments)]
    pub fn with_rbfs(
        state_dim: usize,
        input_dim: usize,
        monomial_degree: u32,
        rbf_count: usize,
        alpha: f64,
        delta: f64,
        seed: u64,
        train_states: &DMatrix<f64>,
    ) -> Result<Self, LiftingError> {
        let mut spec = Self {
            monomial_degree,
            alpha,
            delta,
            center_seed: seed,
            ..Self::identity(state_dim, input_dim)
        };
        spec.validate()?;
        if train_states.nrows() != state_dim {
            return Err(LiftingError::Dimension {
                expected: state_dim,
                got: train_states.nrows(),
            });
        }
        let features = spec.poly_feature_matrix(train_states)?;
        spec.rbf_centers = sample_centers(&features, rbf_count, seed)?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), LiftingError> {
        if self.state_dim == 0 {
            return Err(LiftingError::InvalidParam("state_dim must be ≥ 1".into()));
        }
        if !(self.monomial_degree == 1 || self.monomial_degree == 2) {
            return Err(LiftingError::InvalidParam(format!(
                "monomial_degree must be 1 or 2, got {}",
                self.monomial_degree
            )));
        }
        if !(self.alpha > 0.0) || !(self.delta > 0.0) {
            return Err(LiftingError::InvalidParam(format!(
                "alpha and delta must be positive, got alpha={} delta={}",
                self.alpha, self.delta
            )));
        }
        let d = self.poly_dim();
        for (i, c) in self.rbf_centers.iter().enumerate() {
            if c.len() != d {
                return Err(LiftingError::Dimension {
                    expected: d,
                    got: c.len(),
                });
            }
            if !c.iter().all(|v| v.is_finite()) {
                return Err(LiftingError::InvalidParam(format!(
                    "center {i} has non-finite entries"
                )));
            }
        }
        Ok(())
    }

    /// Length of the polynomial feature vector.
    pub fn poly_dim(&self) -> usize {
        let m = self.state_dim;
        if self.monomial_degree == 2 {
            m + m * (m + 1) / 2
        } else {
            m
        }
    }

    pub fn rbf_count(&self) -> usize {
        self.rbf_centers.len()
    }

    /// Lifted state dimension.
    pub fn p_theta(&self) -> usize {
        self.poly_dim() + self.rbf_count()
    }

    /// Lifted input dimension (identity input lifting).
    pub fn p_upsilon(&self) -> usize {
        self.input_dim
    }

    /// Combined snapshot dimension `p_theta + p_upsilon`.
    pub fn p_total(&self) -> usize {
        self.p_theta() + self.p_upsilon()
    }

    /// Monomials of the state in graded lexicographic order: degree-1 terms
    /// `x_1..x_m` followed (for degree 2) by `x_1², x_1x_2, .., x_m²`.
    pub fn poly_features(&self, x: &DVector<f64>) -> Result<DVector<f64>, LiftingError> {
        if x.len() != self.state_dim {
            return Err(LiftingError::Dimension {
                expected: self.state_dim,
                got: x.len(),
            });
        }
        let m = self.state_dim;
        let mut out = Vec::with_capacity(self.poly_dim());
        out.extend(x.iter().copied());
        if self.monomial_degree == 2 {
            for i in 0..m {
                for j in i..m {
                    out.push(x[i] * x[j]);
                }
            }
        }
        Ok(DVector::from_vec(out))
    }

    fn poly_feature_matrix(&self, states: &DMatrix<f64>) -> Result<DMatrix<f64>, LiftingError> {
        let q = states.ncols();
        if q == 0 {
            return Err(LiftingError::EmptyTrainingData);
        }
        let d = self.poly_dim();
        let mut out = DMatrix::<f64>::zeros(d, q);
        for k in 0..q {
            let f = self.poly_features(&states.column(k).into_owned())?;
            out.set_column(k, &f);
        }
        Ok(out)
    }

    /// Lift a state: polynomial features followed by the thin-plate RBF
    /// entries `r_i² ln r_i` with `r_i = alpha·‖poly(x) − c_i‖ + delta`.
    pub fn lift_state(&self, x: &DVector<f64>) -> Result<DVector<f64>, LiftingError> {
        let poly = self.poly_features(x)?;
        let mut out = Vec::with_capacity(self.p_theta());
        out.extend(poly.iter().copied());
        for c in &self.rbf_centers {
            let mut dist_sq = 0.0;
            for (p, ci) in poly.iter().zip(c.iter()) {
                let d = p - ci;
                dist_sq += d * d;
            }
            let r = self.alpha * dist_sq.sqrt() + self.delta;
            out.push(r * r * r.ln());
        }
        Ok(DVector::from_vec(out))
    }

    /// Identity input lifting.
    pub fn lift_input(&self, u: &DVector<f64>) -> Result<DVector<f64>, LiftingError> {
        if u.len() != self.input_dim {
            return Err(LiftingError::Dimension {
                expected: self.input_dim,
                got: u.len(),
            });
        }
        Ok(u.clone())
    }

    /// Read the state back out of a lifted vector (the leading block).
    pub fn recover_state(&self, lifted: &DVector<f64>) -> Result<DVector<f64>, LiftingError> {
        if !self.include_raw_states {
            return Err(LiftingError::RecoveryUnsupported);
        }
        if lifted.len() != self.p_theta() {
            return Err(LiftingError::Dimension {
                expected: self.p_theta(),
                got: lifted.len(),
            });
        }
        Ok(lifted.rows(0, self.state_dim).into_owned())
    }
}

/// Latin hypercube sample of `count` centers over the component-wise
/// `[min, max]` box of the training features (features are rows, samples are
/// columns). Each axis is split into `count` equal bins holding exactly one
/// center coordinate. Deterministic for a fixed seed.
pub fn sample_centers(
    features: &DMatrix<f64>,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, LiftingError> {
    if features.ncols() == 0 || features.nrows() == 0 {
        return Err(LiftingError::EmptyTrainingData);
    }
    if count == 0 {
        return Err(LiftingError::InvalidParam("rbf_count must be ≥ 1".into()));
    }
    let d = features.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![vec![0.0; d]; count];
    for dim in 0..d {
        let row = features.row(dim);
        let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut bins: Vec<usize> = (0..count).collect();
        bins.shuffle(&mut rng);
        let width = (hi - lo) / count as f64;
        for (k, center) in centers.iter_mut().enumerate() {
            let u: f64 = rng.random();
            center[dim] = lo + (bins[k] as f64 + u) * width;
        }
    }
    Ok(centers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dvector, DMatrix};
    use proptest::prelude::*;

    fn spec_with_centers() -> LiftingSpec {
        let mut spec = LiftingSpec::polynomial(2, 1, 2).unwrap();
        spec.alpha = 0.1;
        spec.delta = 0.001;
        spec.rbf_centers = vec![vec![0.0; 5], vec![1.0, 0.5, -0.5, 0.25, 1.5]];
        spec
    }

    #[test]
    fn poly_features_zero_maps_to_zero() {
        let spec = LiftingSpec::polynomial(2, 0, 2).unwrap();
        let f = spec.poly_features(&dvector![0.0, 0.0]).unwrap();
        assert_eq!(f, dvector![0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn poly_features_scalar() {
        let spec = LiftingSpec::polynomial(1, 0, 2).unwrap();
        let f = spec.poly_features(&dvector![3.0]).unwrap();
        assert_eq!(f, dvector![3.0, 9.0]);
    }

    #[test]
    fn poly_features_graded_lex_order() {
        let spec = LiftingSpec::polynomial(2, 0, 2).unwrap();
        let f = spec.poly_features(&dvector![1.0, 2.0]).unwrap();
        assert_eq!(f, dvector![1.0, 2.0, 1.0, 2.0, 4.0]);
    }

    #[test]
    fn poly_features_wrong_length() {
        let spec = LiftingSpec::polynomial(2, 0, 2).unwrap();
        assert!(matches!(
            spec.poly_features(&dvector![1.0]),
            Err(LiftingError::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn centers_stay_in_box() {
        let features = DMatrix::from_fn(3, 40, |i, j| (i as f64) + (j as f64) / 40.0);
        let centers = sample_centers(&features, 1, 9).unwrap();
        assert_eq!(centers.len(), 1);
        for dim in 0..3 {
            let lo = features.row(dim).min();
            let hi = features.row(dim).max();
            assert!(centers[0][dim] >= lo && centers[0][dim] <= hi);
        }
    }

    #[test]
    fn centers_deterministic_for_seed() {
        let features = DMatrix::from_fn(2, 20, |i, j| (i * j) as f64 * 0.1);
        let a = sample_centers(&features, 5, 1234).unwrap();
        let b = sample_centers(&features, 5, 1234).unwrap();
        assert_eq!(a, b);
        let c = sample_centers(&features, 5, 1235).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn centers_fill_every_stratification_bin() {
        let features =
            DMatrix::from_fn(2, 50, |i, j| if i == 0 { j as f64 } else { -(j as f64) * 2.0 });
        let count = 10;
        let centers = sample_centers(&features, count, 7).unwrap();
        for dim in 0..2 {
            let lo = features.row(dim).min();
            let hi = features.row(dim).max();
            let width = (hi - lo) / count as f64;
            let mut seen = vec![false; count];
            for c in &centers {
                let bin = (((c[dim] - lo) / width).floor() as usize).min(count - 1);
                assert!(!seen[bin], "dim {dim}: bin {bin} hit twice");
                seen[bin] = true;
            }
            assert!(seen.iter().all(|&s| s), "dim {dim}: empty bin");
        }
    }

    #[test]
    fn empty_training_data_rejected() {
        let features = DMatrix::<f64>::zeros(3, 0);
        assert!(matches!(
            sample_centers(&features, 4, 0),
            Err(LiftingError::EmptyTrainingData)
        ));
    }

    #[test]
    fn rbf_entry_at_center_is_delta_term() {
        let spec = spec_with_centers();
        // State (0, 0) lifts to the zero polynomial vector = first center.
        let lifted = spec.lift_state(&dvector![0.0, 0.0]).unwrap();
        let d = spec.delta;
        assert_relative_eq!(lifted[5], d * d * d.ln(), epsilon = 1e-15);
    }

    #[test]
    fn rbf_entry_matches_direct_arithmetic() {
        // Shape 0.1 and offset 0.001 with feature distance 10: r = 1.001.
        let mut spec = spec_with_centers();
        spec.rbf_centers = vec![vec![10.0, 0.0, 0.0, 0.0, 0.0]];
        let lifted = spec.lift_state(&dvector![0.0, 0.0]).unwrap();
        let r: f64 = 0.1 * 10.0 + 0.001;
        assert_relative_eq!(lifted[5], r * r * r.ln(), epsilon = 1e-15);
        assert_relative_eq!(r, 1.001, epsilon = 1e-15);
    }

    #[test]
    fn raw_states_lead_the_lift() {
        let spec = spec_with_centers();
        let x = dvector![0.37, -1.2];
        let lifted = spec.lift_state(&x).unwrap();
        assert_eq!(lifted[0], x[0]);
        assert_eq!(lifted[1], x[1]);
        assert_eq!(lifted.len(), spec.p_theta());
    }

    #[test]
    fn lift_input_is_identity() {
        let spec = spec_with_centers();
        assert_eq!(spec.lift_input(&dvector![0.0]).unwrap(), dvector![0.0]);
        let spec2 = LiftingSpec::identity(1, 2);
        assert_eq!(
            spec2.lift_input(&dvector![1.5, -2.0]).unwrap(),
            dvector![1.5, -2.0]
        );
        assert!(spec2.lift_input(&dvector![1.0]).is_err());
    }

    #[test]
    fn recovery_requires_flag() {
        let mut spec = spec_with_centers();
        spec.include_raw_states = false;
        let lifted = spec.lift_state(&dvector![1.0, -1.0]).unwrap();
        assert!(matches!(
            spec.recover_state(&lifted),
            Err(LiftingError::RecoveryUnsupported)
        ));
    }

    #[test]
    fn recover_reads_leading_entries() {
        let spec = LiftingSpec::identity(2, 0);
        let recovered = spec.recover_state(&dvector![1.0, -1.0]).unwrap();
        assert_eq!(recovered, dvector![1.0, -1.0]);
    }

    #[test]
    fn spec_serializes_losslessly() {
        let spec = spec_with_centers();
        let json = serde_json::to_string(&spec).unwrap();
        let back: LiftingSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
        let x = dvector![0.3, 0.7];
        assert_eq!(spec.lift_state(&x).unwrap(), back.lift_state(&x).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip_is_bit_exact(x0 in -1e6_f64..1e6, x1 in -1e6_f64..1e6) {
            let spec = spec_with_centers();
            let x = dvector![x0, x1];
            let lifted = spec.lift_state(&x).unwrap();
            let back = spec.recover_state(&lifted).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn rbf_entries_always_finite(x0 in -1e8_f64..1e8, x1 in -1e8_f64..1e8) {
            let spec = spec_with_centers();
            let lifted = spec.lift_state(&dvector![x0, x1]).unwrap();
            prop_assert!(lifted.iter().all(|v| v.is_finite()));
        }

        #[test]
        fn lift_is_locally_continuous(x0 in -2.0_f64..2.0, x1 in -2.0_f64..2.0) {
            let spec = spec_with_centers();
            let a = spec.lift_state(&dvector![x0, x1]).unwrap();
            let b = spec.lift_state(&dvector![x0 + 1e-10, x1]).unwrap();
            prop_assert!((a - b).norm() <= 1e-6);
        }
    }
}
