//! Closed-form leaf weights, split gain, and exact greedy split search over
//! the second-order surrogate objective.

use thiserror::Error;

use super::matrix::FeatureMatrix;
use super::objective::GradPair;
use super::TrainConfig;
use crate::scalar::{cast, Scalar};

/// The regularized Hessian sum vanished, so no finite weight minimizes the
/// surrogate.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("singular leaf: summed hessian plus lambda is zero")]
pub struct SingularLeaf;

/// Weight minimizing the leaf's quadratic surrogate
/// `G w + (H + lambda) w^2 / 2`, namely `-G / (H + lambda)`.
pub fn leaf_weight<S: Scalar>(grad_sum: S, hess_sum: S, lambda: S) -> Result<S, SingularLeaf> {
    let denom = hess_sum + lambda;
    if denom <= S::zero() {
        return Err(SingularLeaf);
    }
    Ok(-(grad_sum / denom))
}

/// Surrogate reduction from splitting a node into (L, R), minus the
/// per-leaf penalty gamma.
pub fn split_gain<S: Scalar>(
    grad_left: S,
    hess_left: S,
    grad_right: S,
    hess_right: S,
    lambda: S,
    gamma: S,
) -> S {
    let grad_total = grad_left + grad_right;
    let hess_total = hess_left + hess_right;
    let score = |g: S, h: S| g * g / (h + lambda);
    cast::<S>(0.5)
        * (score(grad_left, hess_left) + score(grad_right, hess_right)
            - score(grad_total, hess_total))
        - gamma
}

/// Chosen split: route left when `value < threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitDecision<S> {
    pub feature_index: usize,
    pub threshold: S,
    pub gain: S,
}

/// Candidate threshold between two adjacent distinct sorted values.
///
/// The arithmetic midpoint can round down onto `low` when the values are
/// adjacent floats; fall back to `high` so `low` still routes left.
pub(crate) fn midpoint<S: Scalar>(low: S, high: S) -> S {
    debug_assert!(low < high);
    let mid = (low + high) / cast::<S>(2.0);
    if mid > low {
        mid
    } else {
        high
    }
}

/// Exact greedy split search.
///
/// For every feature, rows are sorted by value and prefix sums of (g, h)
/// scanned; candidate thresholds sit at midpoints between distinct adjacent
/// values. Returns the maximal split with positive gain whose children each
/// carry at least `min_child_hessian`, or `None`. Equal gains resolve to the
/// lower feature index, then the lower threshold, making the search
/// deterministic.
pub fn best_split<S: Scalar>(
    rows: &[usize],
    features: &FeatureMatrix<S>,
    grad: &[GradPair<S>],
    config: &TrainConfig<S>,
) -> Option<SplitDecision<S>> {
    if rows.len() < 2 {
        return None;
    }

    let mut grad_total = S::zero();
    let mut hess_total = S::zero();
    for &row in rows {
        grad_total += grad[row].g;
        hess_total += grad[row].h;
    }

    let mut best: Option<SplitDecision<S>> = None;
    let mut order: Vec<usize> = Vec::with_capacity(rows.len());

    for feature_index in 0..features.n_cols() {
        order.clear();
        order.extend_from_slice(rows);
        order.sort_by(|&a, &b| {
            features
                .value(a, feature_index)
                .partial_cmp(&features.value(b, feature_index))
                .expect("finite feature values")
        });

        let mut grad_left = S::zero();
        let mut hess_left = S::zero();
        for pair in order.windows(2) {
            let (row, next) = (pair[0], pair[1]);
            grad_left += grad[row].g;
            hess_left += grad[row].h;

            let value = features.value(row, feature_index);
            let next_value = features.value(next, feature_index);
            if value == next_value {
                continue;
            }

            let hess_right = hess_total - hess_left;
            if hess_left < config.min_child_hessian || hess_right < config.min_child_hessian {
                continue;
            }

            let grad_right = grad_total - grad_left;
            let gain = split_gain(
                grad_left,
                hess_left,
                grad_right,
                hess_right,
                config.lambda,
                config.gamma,
            );
            if gain <= S::zero() {
                continue;
            }
            // Strict improvement keeps the first (lowest feature, lowest
            // threshold) candidate on ties.
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(SplitDecision {
                    feature_index,
                    threshold: midpoint(value, next_value),
                    gain,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(lambda: f64, gamma: f64, min_child_hessian: f64) -> TrainConfig<f64> {
        TrainConfig {
            lambda,
            gamma,
            min_child_hessian,
            ..TrainConfig::default()
        }
    }

    // Numeric 1-D minimization of the surrogate G w + (H + lambda) w^2 / 2:
    // a three-point parabolic vertex, which locates the minimum of a
    // quadratic from function values alone.
    fn minimize_surrogate(g: f64, h: f64, lambda: f64) -> f64 {
        let f = |w: f64| g * w + 0.5 * (h + lambda) * w * w;
        let center = 0.0;
        let d = 1.0;
        let (fm, f0, fp) = (f(center - d), f(center), f(center + d));
        center - d * (fp - fm) / (2.0 * (fp - 2.0 * f0 + fm))
    }

    #[test]
    fn leaf_weight_hand_case() {
        assert_eq!(leaf_weight(2.0, 3.0, 1.0).unwrap(), -0.5);
    }

    #[test]
    fn leaf_weight_matches_numeric_minimizer() {
        assert!((leaf_weight(2.0, 3.0, 1.0).unwrap() - minimize_surrogate(2.0, 3.0, 1.0)).abs() < 1e-9);
    }

    #[test]
    fn zero_gradient_zero_weight() {
        assert_eq!(leaf_weight(0.0, 7.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn singular_leaf_detected() {
        assert_eq!(leaf_weight(1.0, 0.0, 0.0).unwrap_err(), SingularLeaf);
    }

    #[test]
    fn balanced_split_gains_nothing() {
        // G_L = G_R = 1, H_L = H_R = 1, lambda 0: 0.5 (1 + 1 - 4/2) = 0
        assert_eq!(split_gain(1.0, 1.0, 1.0, 1.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn gamma_prunes() {
        let without = split_gain(-1.0, 1.0, 1.0, 1.0, 0.0, 0.0);
        assert!(without > 0.0);
        assert!(split_gain(-1.0, 1.0, 1.0, 1.0, 0.0, without + 0.1) < 0.0);
    }

    #[test]
    fn four_row_hand_case() {
        // values [1,2,3,4], g = [-1,-1,1,1], h = 1, lambda 1, gamma 0:
        // best threshold 2.5 with gain 0.5 (4/3 + 4/3 - 0/5) = 4/3
        let matrix = FeatureMatrix::from_rows(
            &[[1.0f64], [2.0], [3.0], [4.0]],
            vec!["x".into()],
        )
        .unwrap();
        let grad: Vec<GradPair<f64>> = [-1.0, -1.0, 1.0, 1.0]
            .iter()
            .map(|&g| GradPair { g, h: 1.0 })
            .collect();
        let decision = best_split(&[0, 1, 2, 3], &matrix, &grad, &config(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(decision.feature_index, 0);
        assert_eq!(decision.threshold, 2.5);
        assert!((decision.gain - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identical_values_give_no_split() {
        let matrix =
            FeatureMatrix::from_rows(&[[2.0f64], [2.0], [2.0]], vec!["x".into()]).unwrap();
        let grad: Vec<GradPair<f64>> = [-1.0, 1.0, 1.0]
            .iter()
            .map(|&g| GradPair { g, h: 1.0 })
            .collect();
        assert_eq!(
            best_split(&[0, 1, 2], &matrix, &grad, &config(1.0, 0.0, 0.0)),
            None
        );
    }

    #[test]
    fn min_child_hessian_filters_candidates() {
        let matrix = FeatureMatrix::from_rows(
            &[[1.0f64], [2.0], [3.0], [4.0]],
            vec!["x".into()],
        )
        .unwrap();
        let grad: Vec<GradPair<f64>> = [-1.0, -1.0, 1.0, 1.0]
            .iter()
            .map(|&g| GradPair { g, h: 1.0 })
            .collect();
        // requiring 2.5 summed hessian per child leaves no candidate
        assert_eq!(
            best_split(&[0, 1, 2, 3], &matrix, &grad, &config(1.0, 0.0, 2.5)),
            None
        );
    }

    #[test]
    fn midpoint_of_adjacent_floats_stays_routable() {
        let low = 1.0f64;
        let high = f64::from_bits(low.to_bits() + 1);
        let thr = midpoint(low, high);
        assert!(low < thr, "low must route left");
        assert!(thr <= high);
    }

    // Brute-force oracle: enumerate every (feature, midpoint) candidate and
    // evaluate split_gain from freshly summed partitions.
    fn brute_force_best(
        rows: &[usize],
        matrix: &FeatureMatrix<f64>,
        grad: &[GradPair<f64>],
        cfg: &TrainConfig<f64>,
    ) -> Option<SplitDecision<f64>> {
        let mut best: Option<SplitDecision<f64>> = None;
        for feature_index in 0..matrix.n_cols() {
            let mut sorted: Vec<usize> = rows.to_vec();
            sorted.sort_by(|&a, &b| {
                matrix
                    .value(a, feature_index)
                    .partial_cmp(&matrix.value(b, feature_index))
                    .unwrap()
            });
            for cut in 1..sorted.len() {
                let low = matrix.value(sorted[cut - 1], feature_index);
                let high = matrix.value(sorted[cut], feature_index);
                if low == high {
                    continue;
                }
                let threshold = midpoint(low, high);
                let (mut gl, mut hl) = (0.0, 0.0);
                for &r in &sorted[..cut] {
                    gl += grad[r].g;
                    hl += grad[r].h;
                }
                let (mut gr, mut hr) = (0.0, 0.0);
                for &r in &sorted[cut..] {
                    gr += grad[r].g;
                    hr += grad[r].h;
                }
                if hl < cfg.min_child_hessian || hr < cfg.min_child_hessian {
                    continue;
                }
                let gain = split_gain(gl, hl, gr, hr, cfg.lambda, cfg.gamma);
                if gain <= 0.0 {
                    continue;
                }
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(SplitDecision {
                        feature_index,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn matches_brute_force_enumeration(
            n_rows in 2usize..=12,
            n_cols in 1usize..=3,
            lambda in 0.0f64..5.0,
            gamma in 0.0f64..1.0,
            seed in proptest::num::u64::ANY,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
            let rows_data: Vec<Vec<f64>> = (0..n_rows)
                .map(|_| {
                    (0..n_cols)
                        // coarse grid so duplicate values occur
                        .map(|_| (rng.random_range(-4i32..=4) as f64) * 0.5)
                        .collect()
                })
                .collect();
            let names = (0..n_cols).map(|i| format!("f{i}")).collect();
            let matrix = FeatureMatrix::from_rows(&rows_data, names).unwrap();
            let grad: Vec<GradPair<f64>> = (0..n_rows)
                .map(|_| GradPair {
                    g: rng.random_range(-2.0..2.0),
                    h: rng.random_range(0.05..2.0),
                })
                .collect();
            let cfg = config(lambda, gamma, 0.0);
            let rows: Vec<usize> = (0..n_rows).collect();

            let fast = best_split(&rows, &matrix, &grad, &cfg);
            let slow = brute_force_best(&rows, &matrix, &grad, &cfg);
            match (fast, slow) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    prop_assert_eq!(a.feature_index, b.feature_index);
                    prop_assert_eq!(a.threshold, b.threshold);
                    prop_assert!((a.gain - b.gain).abs() <= 1e-9);
                }
                (a, b) => prop_assert!(false, "disagreement: {a:?} vs {b:?}"),
            }
        }

        // lambda never increases the weight magnitude.
        #[test]
        fn regularization_shrinks_weights(
            g in -10.0f64..10.0,
            h in 0.0f64..10.0,
            lambda in 0.01f64..10.0,
            bump in 0.01f64..10.0,
        ) {
            let w = leaf_weight(g, h, lambda).unwrap().abs();
            let w_more = leaf_weight(g, h, lambda + bump).unwrap().abs();
            prop_assert!(w_more <= w);
        }

        // The closed form sits at a local minimum of the surrogate.
        #[test]
        fn weight_is_local_minimum(
            g in -10.0f64..10.0,
            h in 0.0f64..10.0,
            lambda in 0.1f64..10.0,
        ) {
            let w = leaf_weight(g, h, lambda).unwrap();
            let f = |w: f64| g * w + 0.5 * (h + lambda) * w * w;
            prop_assert!(f(w) <= f(w + 1e-3));
            prop_assert!(f(w) <= f(w - 1e-3));
        }

        #[test]
        fn gain_symmetric_under_side_swap(
            gl in -5.0f64..5.0,
            hl in 0.1f64..5.0,
            gr in -5.0f64..5.0,
            hr in 0.1f64..5.0,
            lambda in 0.0f64..5.0,
            gamma in 0.0f64..1.0,
        ) {
            let a = split_gain(gl, hl, gr, hr, lambda, gamma);
            let b = split_gain(gr, hr, gl, hl, lambda, gamma);
            prop_assert_eq!(a, b);
        }
    }
}
