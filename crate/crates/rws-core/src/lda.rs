//! Two-class linear discriminant analysis with a plug-in covariance
//! estimate.
//!
//! The discriminant is
//! `d(x) = ln(π̂₀/π̂₁) + (x − (μ̂₀+μ̂₁)/2)ᵀ Σ̂⁻¹ (μ̂₀ − μ̂₁)`
//! and the predicted label is the indicator `d(x) < 0` taken literally:
//! `d < 0` maps to label 1, anything else (ties included) to label 0. The
//! inverse never materializes — `Σ̂⁻¹v` products go through a Cholesky
//! factorization, which is also the positive-definiteness gate.

use crate::error::{Error, Result};
use crate::matrix::{Cholesky, SymmetricMatrix};
use crate::pilot::DataMatrix;
use crate::scalar::{real, real_of, Scalar};

/// Fitted two-class discriminant model.
#[derive(Debug, Clone)]
pub struct LdaModel<F> {
    pub pi0: F,
    pub pi1: F,
    pub mu0: Vec<F>,
    pub mu1: Vec<F>,
    /// Handle for `Σ̂⁻¹v` products.
    factor: Cholesky<F>,
    /// Precomputed `Σ̂⁻¹(μ̂₀ − μ̂₁)`.
    direction: Vec<F>,
}

fn class_means<F: Scalar>(x: &DataMatrix<F>, labels: &[u8]) -> Result<(Vec<F>, Vec<F>, usize, usize)> {
    if labels.len() != x.n() {
        return Err(Error::InvalidInput("label count does not match the observation count".into()));
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::InvalidInput("labels must be 0 or 1".into()));
    }
    let p = x.p();
    let mut mu0 = vec![F::zero(); p];
    let mut mu1 = vec![F::zero(); p];
    let mut n0 = 0usize;
    let mut n1 = 0usize;
    for i in 0..x.n() {
        let (mu, count) = if labels[i] == 0 { (&mut mu0, &mut n0) } else { (&mut mu1, &mut n1) };
        *count += 1;
        for (m, &v) in mu.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    if n0 == 0 || n1 == 0 {
        return Err(Error::InvalidInput("both classes must be present in the training data".into()));
    }
    for m in &mut mu0 {
        *m /= real_of::<F>(n0);
    }
    for m in &mut mu1 {
        *m /= real_of::<F>(n1);
    }
    Ok((mu0, mu1, n0, n1))
}

/// Fits the model from labeled training data and a positive definite
/// covariance estimate.
pub fn lda_fit<F: Scalar>(
    x: &DataMatrix<F>,
    labels: &[u8],
    sigma_hat: &SymmetricMatrix<F>,
) -> Result<LdaModel<F>> {
    if sigma_hat.dim() != x.p() {
        return Err(Error::InvalidInput("covariance dimension does not match the data".into()));
    }
    let (mu0, mu1, n0, n1) = class_means(x, labels)?;
    let factor = sigma_hat.cholesky()?;
    let diff: Vec<F> = mu0.iter().zip(&mu1).map(|(&a, &b)| a - b).collect();
    let direction = factor.solve(&diff);
    let n = real_of::<F>(n0 + n1);
    Ok(LdaModel {
        pi0: real_of::<F>(n0) / n,
        pi1: real_of::<F>(n1) / n,
        mu0,
        mu1,
        factor,
        direction,
    })
}

impl<F: Scalar> LdaModel<F> {
    /// `Σ̂⁻¹ v` through the stored factorization.
    pub fn sigma_inv_action(&self, v: &[F]) -> Vec<F> {
        self.factor.solve(v)
    }

    pub fn discriminant(&self, x: &[F]) -> F {
        let prior = (self.pi0 / self.pi1).ln();
        let half = real::<F>(0.5);
        let mut dot = F::zero();
        for i in 0..x.len() {
            let centered = x[i] - half * (self.mu0[i] + self.mu1[i]);
            dot += centered * self.direction[i];
        }
        prior + dot
    }

    /// Label 1 iff the discriminant is strictly negative.
    pub fn predict(&self, x: &[F]) -> u8 {
        u8::from(self.discriminant(x) < F::zero())
    }
}

/// Predicted labels and the misclassification rate on a labeled test set.
#[derive(Debug, Clone)]
pub struct LdaPrediction<F> {
    pub labels: Vec<u8>,
    pub error_rate: F,
}

/// Fits on the training set, predicts the test set, and scores against its
/// labels.
pub fn lda_fit_predict<F: Scalar>(
    train: &DataMatrix<F>,
    train_labels: &[u8],
    test: &DataMatrix<F>,
    test_labels: &[u8],
    sigma_hat: &SymmetricMatrix<F>,
) -> Result<LdaPrediction<F>> {
    if test_labels.len() != test.n() {
        return Err(Error::InvalidInput("test label count does not match".into()));
    }
    if test.p() != train.p() {
        return Err(Error::InvalidInput("train and test dimensions differ".into()));
    }
    let model = lda_fit(train, train_labels, sigma_hat)?;
    let labels: Vec<u8> = (0..test.n()).map(|i| model.predict(test.row(i))).collect();
    let wrong = labels.iter().zip(test_labels).filter(|(a, b)| a != b).count();
    Ok(LdaPrediction { labels, error_rate: real_of::<F>(wrong) / real_of::<F>(test.n()) })
}

/// Rows centered by their class mean — the residuals whose covariance the
/// plug-in estimators are fitted on.
pub fn class_centered<F: Scalar>(x: &DataMatrix<F>, labels: &[u8]) -> Result<DataMatrix<F>> {
    let (mu0, mu1, _, _) = class_means(x, labels)?;
    let rows: Vec<Vec<F>> = (0..x.n())
        .map(|i| {
            let mu = if labels[i] == 0 { &mu0 } else { &mu1 };
            x.row(i).iter().zip(mu).map(|(&v, &m)| v - m).collect()
        })
        .collect();
    DataMatrix::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(rows: Vec<Vec<f64>>) -> DataMatrix<f64> {
        DataMatrix::new(rows).unwrap()
    }

    #[test]
    fn tie_predicts_the_first_class() {
        // Equal priors and identical class means: the discriminant is
        // exactly zero everywhere, and I{0 < 0} = 0 picks label 0.
        let train = dm(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0]]);
        let labels = [0u8, 0, 1, 1];
        let model = lda_fit(&train, &labels, &SymmetricMatrix::identity(2)).unwrap();
        assert_eq!(model.discriminant(&[0.3, -0.7]), 0.0);
        assert_eq!(model.predict(&[0.3, -0.7]), 0);

        // Balanced test set scores 50% error.
        let test = dm(vec![vec![0.0, 1.0], vec![0.0, 2.0]]);
        let pred = lda_fit_predict(&train, &labels, &test, &[0, 1], &SymmetricMatrix::identity(2))
            .unwrap();
        assert!((pred.error_rate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn separated_classes_classify_perfectly() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let jitter = (i as f64) * 0.01;
            rows.push(vec![jitter, jitter]);
            labels.push(0u8);
            rows.push(vec![50.0 + jitter, 50.0 - jitter]);
            labels.push(1u8);
        }
        let x = dm(rows.clone());
        let pred = lda_fit_predict(&x, &labels, &x, &labels, &SymmetricMatrix::identity(2)).unwrap();
        assert_eq!(pred.error_rate, 0.0);
        assert_eq!(&pred.labels, &labels);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let x = dm(vec![vec![1.0], vec![2.0]]);
        assert!(lda_fit(&x, &[0, 0], &SymmetricMatrix::identity(1)).is_err());
        assert!(lda_fit(&x, &[0, 2], &SymmetricMatrix::identity(1)).is_err());
        assert!(lda_fit(&x, &[0], &SymmetricMatrix::identity(1)).is_err());
        let singular = SymmetricMatrix::from_diagonal(&[1.0f64, 0.0]);
        let x2 = dm(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            lda_fit(&x2, &[0, 1], &singular),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn class_centered_residuals_have_zero_class_means() {
        let x = dm(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![10.0, 20.0], vec![30.0, 40.0]]);
        let labels = [0u8, 0, 1, 1];
        let centered = class_centered(&x, &labels).unwrap();
        assert!((centered.get(0, 0) + 1.0).abs() < 1e-15);
        assert!((centered.get(0, 0) + centered.get(1, 0)).abs() < 1e-15);
        assert!((centered.get(2, 1) + centered.get(3, 1)).abs() < 1e-15);
    }

    #[test]
    fn model_matches_hand_computed_discriminant() {
        // μ̂₀ = (2,0), μ̂₁ = (0,0), Σ̂ = diag(4,1), balanced priors.
        let train = dm(vec![vec![2.0, 1.0], vec![2.0, -1.0], vec![0.0, 1.0], vec![0.0, -1.0]]);
        let labels = [0u8, 0, 1, 1];
        let sigma = SymmetricMatrix::from_diagonal(&[4.0f64, 1.0]);
        let model = lda_fit(&train, &labels, &sigma).unwrap();
        // d(x) = (x₁ − 1)·(2/4): at x = (3, 0) → 1.0.
        let d = model.discriminant(&[3.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(model.predict(&[3.0, 0.0]), 0);
        assert_eq!(model.predict(&[-1.0, 0.0]), 1);
    }
}
