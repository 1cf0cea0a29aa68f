//! Binary logistic objective: margin-to-probability mapping, per-sample
//! first and second derivatives, and the loss itself.

use serde::{Deserialize, Serialize};

use crate::scalar::{cast, Scalar};

/// First and second derivative of the loss w.r.t. one sample's margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradPair<S> {
    pub g: S,
    pub h: S,
}

/// `1 / (1 + e^-margin)`, stable at large |margin|.
pub fn sigmoid<S: Scalar>(margin: S) -> S {
    if margin >= S::zero() {
        S::one() / (S::one() + (-margin).exp())
    } else {
        let e = margin.exp();
        e / (S::one() + e)
    }
}

/// Inverse of [`sigmoid`]: `ln(p / (1 - p))`.
pub fn logit<S: Scalar>(p: S) -> S {
    (p / (S::one() - p)).ln()
}

/// Derivatives of the logistic loss at `margin` for a binary label:
/// `g = p - y`, `h = p(1 - p)` with `p = sigmoid(margin)`.
///
/// The Hessian is clamped below at 1e-16 so saturated samples cannot zero a
/// leaf's denominator.
pub fn logistic_grad_hess<S: Scalar>(margin: S, label: u8) -> GradPair<S> {
    debug_assert!(label <= 1);
    let p = sigmoid(margin);
    let y = if label == 0 { S::zero() } else { S::one() };
    GradPair {
        g: p - y,
        h: (p * (S::one() - p)).max(cast::<S>(1e-16)),
    }
}

/// Logistic loss of one sample: `softplus(margin) - y * margin`, evaluated
/// without overflow at large |margin|.
pub fn logistic_loss<S: Scalar>(margin: S, label: u8) -> S {
    debug_assert!(label <= 1);
    let softplus = margin.max(S::zero()) + (-margin.abs()).exp().ln_1p();
    let y = if label == 0 { S::zero() } else { S::one() };
    softplus - y * margin
}

/// Mean logistic loss over aligned margins and labels.
pub fn mean_logistic_loss<S: Scalar>(margins: &[S], labels: &[u8]) -> S {
    debug_assert_eq!(margins.len(), labels.len());
    let sum = margins
        .iter()
        .zip(labels)
        .fold(S::zero(), |acc, (&m, &y)| acc + logistic_loss(m, y));
    sum / cast::<S>(margins.len() as f64)
}
