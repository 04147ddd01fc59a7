//! Soft-thresholding operators: the universal scalar threshold, the
//! entry-dependent adaptive thresholds `t_ij = λ√(σ̃_ii σ̃_jj ln p / n)`, and
//! their composition (the thresholded pilot estimate).
//!
//! The soft threshold is the proximal map of the off-diagonal L1 norm:
//! entrywise it solves `argmin_x ½(x−a)² + t|x|`, so exact zeros are
//! represented as true zeros and sparsity counts are unambiguous. The
//! diagonal is never thresholded.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::pilot::PilotEstimate;
use crate::scalar::{real, real_of, Scalar};

/// Per-entry nonnegative thresholds with a zero diagonal.
#[derive(Debug, Clone)]
pub struct ThresholdMatrix<F> {
    t: SymmetricMatrix<F>,
}

impl<F: Scalar> ThresholdMatrix<F> {
    /// Validates symmetry-by-construction input: nonnegative, zero diagonal.
    pub fn new(t: SymmetricMatrix<F>) -> Result<Self> {
        if (0..t.dim()).any(|i| t.get(i, i) != F::zero()) {
            return Err(Error::InvalidInput("threshold diagonal must be zero".into()));
        }
        if t.as_slice().iter().any(|&v| v < F::zero()) {
            return Err(Error::InvalidInput("thresholds must be nonnegative".into()));
        }
        Ok(Self { t })
    }

    /// One scalar threshold for every off-diagonal entry.
    pub fn uniform(dim: usize, t: F) -> Result<Self> {
        if t < F::zero() || !t.is_finite() {
            return Err(Error::InvalidInput("threshold must be nonnegative and finite".into()));
        }
        Ok(Self {
            t: SymmetricMatrix::from_fn(dim, |i, j| if i == j { F::zero() } else { t }),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.t.get(i, j)
    }

    pub fn as_matrix(&self) -> &SymmetricMatrix<F> {
        &self.t
    }
}

/// Scalar soft threshold `sign(a)(|a| − t)₊`.
#[inline]
pub fn soft<F: Scalar>(a: F, t: F) -> F {
    let shrunk = a.abs() - t;
    if shrunk > F::zero() {
        shrunk * a.signum()
    } else {
        F::zero()
    }
}

/// Applies entrywise soft thresholds off the diagonal; diagonal entries pass
/// through unchanged.
pub fn soft_threshold<F: Scalar>(a: &SymmetricMatrix<F>, t: &ThresholdMatrix<F>) -> SymmetricMatrix<F> {
    assert_eq!(a.dim(), t.dim(), "dimension mismatch");
    SymmetricMatrix::from_fn(a.dim(), |i, j| {
        if i == j {
            a.get(i, j)
        } else {
            soft(a.get(i, j), t.get(i, j))
        }
    })
}

/// Entry-dependent adaptive thresholds from a pilot's diagonal scales:
/// `t_ij = λ √(σ̃_ii σ̃_jj ln p / n)` for `i ≠ j`, `t_ii = 0`. Natural log.
pub fn rate_thresholds<F: Scalar>(
    pilot: &PilotEstimate<F>,
    lambda: F,
    n: usize,
) -> Result<ThresholdMatrix<F>> {
    if lambda < F::zero() || !lambda.is_finite() {
        return Err(Error::InvalidInput("lambda must be nonnegative and finite".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let p = pilot.sigma.dim();
    if pilot.diag_scale.iter().any(|&s| s <= F::zero()) {
        return Err(Error::InvalidInput(
            "entry-dependent thresholds need strictly positive diagonal scales".into(),
        ));
    }
    let rate = real::<F>((p as f64).ln()) / real_of::<F>(n);
    let t = SymmetricMatrix::from_fn(p, |i, j| {
        if i == j {
            F::zero()
        } else {
            lambda * (pilot.diag_scale[i] * pilot.diag_scale[j] * rate).sqrt()
        }
    });
    ThresholdMatrix::new(t)
}

/// The thresholded pilot: adaptive thresholds applied to `Σ̃`.
pub fn rate_estimate<F: Scalar>(
    pilot: &PilotEstimate<F>,
    lambda: F,
    n: usize,
) -> Result<SymmetricMatrix<F>> {
    let t = rate_thresholds(pilot, lambda, n)?;
    Ok(soft_threshold(&pilot.sigma, &t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pilot::{sample_covariance, DataMatrix, PilotMethod, PilotParams};

    fn pilot_with_scales(sigma: SymmetricMatrix<f64>) -> PilotEstimate<f64> {
        let diag_scale = sigma.diagonal();
        PilotEstimate { sigma, diag_scale, method: PilotMethod::Sample, params: PilotParams::Sample }
    }

    fn pseudo_symmetric(dim: usize, seed: u64) -> SymmetricMatrix<f64> {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z = z ^ (z >> 31);
            (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        SymmetricMatrix::from_fn(dim, |_, _| next())
    }

    #[test]
    fn zero_threshold_is_identity() {
        let a = pseudo_symmetric(4, 1);
        let t = ThresholdMatrix::uniform(4, 0.0).unwrap();
        assert_eq!(soft_threshold(&a, &t).as_slice(), a.as_slice());
    }

    #[test]
    fn below_threshold_entry_becomes_exact_zero() {
        let mut a = SymmetricMatrix::identity(2);
        a.set(0, 1, 0.3);
        let t = ThresholdMatrix::uniform(2, 0.5).unwrap();
        let out = soft_threshold(&a, &t);
        assert_eq!(out.get(0, 1), 0.0);
        assert_eq!(out.get(0, 0), 1.0);
    }

    // The soft threshold is the proximal map of t|x|: each off-diagonal
    // output entry must minimize ½(x−a)² + t|x|. The objective is quadratic
    // on each side of the |x| kink, so sampling three points per side and
    // taking the parabola vertex pins the minimizer to rounding error —
    // plain ternary search stalls at ~√ε. Only objective samples are used.
    pub(crate) fn prox_oracle(a: f64, t: f64) -> f64 {
        let f = |x: f64| 0.5 * (x - a) * (x - a) + t * x.abs();
        let r = a.abs() + 1.0;
        let mut candidates = vec![0.0f64];
        for (lo, hi) in [(-r, 0.0), (0.0, r)] {
            let mid = 0.5 * (lo + hi);
            let h = 0.25 * (hi - lo);
            let (f0, fm, f1) = (f(mid - h), f(mid), f(mid + h));
            let curv = f0 - 2.0 * fm + f1;
            if curv > 0.0 {
                candidates.push((mid - 0.5 * h * (f1 - f0) / curv).clamp(lo, hi));
            }
        }
        candidates
            .into_iter()
            .min_by(|&x, &y| f(x).partial_cmp(&f(y)).unwrap())
            .unwrap()
    }

    #[test]
    fn soft_threshold_matches_proximal_oracle() {
        let a = pseudo_symmetric(4, 9);
        let t = ThresholdMatrix::uniform(4, 0.35).unwrap();
        let out = soft_threshold(&a, &t);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let want = prox_oracle(a.get(i, j), 0.35);
                    assert!((out.get(i, j) - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn monotone_in_threshold() {
        let a = pseudo_symmetric(5, 3);
        let t1 = ThresholdMatrix::uniform(5, 0.1).unwrap();
        let t2 = ThresholdMatrix::uniform(5, 0.4).unwrap();
        let o1 = soft_threshold(&a, &t1);
        let o2 = soft_threshold(&a, &t2);
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!(o2.get(i, j).abs() <= o1.get(i, j).abs() + 1e-15);
                }
            }
        }
    }

    #[test]
    fn sparsity_nonincreasing_in_lambda() {
        let x = DataMatrix::new(
            (0..30)
                .map(|i| (0..6).map(|j| ((i * 7 + j * 13) % 17) as f64 / 3.0 - 2.0).collect())
                .collect(),
        )
        .unwrap();
        let pilot = sample_covariance(&x).unwrap();
        let mut last = usize::MAX;
        for lambda in [0.0, 0.1, 0.3, 1.0, 5.0] {
            let est = rate_estimate(&pilot, lambda, 30).unwrap();
            let nz = est.count_nonzeros(0.0);
            assert!(nz <= last);
            last = nz;
        }
    }

    #[test]
    fn rate_threshold_formula() {
        // Unit scales collapse the formula to λ√(ln p / n).
        let sigma = SymmetricMatrix::identity(3);
        let pilot = pilot_with_scales(sigma);
        let t = rate_thresholds(&pilot, 1.0, 1).unwrap();
        let want = (3f64.ln()).sqrt();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert_eq!(t.get(i, j), 0.0);
                } else {
                    assert!((t.get(i, j) - want).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn rate_threshold_homogeneity() {
        // Doubling both σ̃_ii and σ̃_jj doubles t_ij.
        let base = pilot_with_scales(SymmetricMatrix::from_diagonal(&[1.0, 2.0]));
        let scaled = pilot_with_scales(SymmetricMatrix::from_diagonal(&[2.0, 4.0]));
        let t1 = rate_thresholds(&base, 0.7, 50).unwrap();
        let t2 = rate_thresholds(&scaled, 0.7, 50).unwrap();
        assert!((t2.get(0, 1) - 2.0 * t1.get(0, 1)).abs() < 1e-15);
    }

    #[test]
    fn rate_threshold_rejects_nonpositive_scale() {
        let pilot = pilot_with_scales(SymmetricMatrix::from_diagonal(&[1.0, 0.0]));
        assert!(rate_thresholds(&pilot, 1.0, 10).is_err());
        let pilot = pilot_with_scales(SymmetricMatrix::from_diagonal(&[1.0, 2.0]));
        assert!(rate_thresholds(&pilot, -0.5, 10).is_err());
    }

    #[test]
    fn rate_estimate_limits() {
        let mut sigma = SymmetricMatrix::from_diagonal(&[2.0, 3.0]);
        sigma.set(0, 1, 1.5);
        let pilot = pilot_with_scales(sigma.clone());
        // λ = 0: pilot unchanged.
        let same = rate_estimate(&pilot, 0.0, 10).unwrap();
        assert_eq!(same.as_slice(), sigma.as_slice());
        // Huge λ: everything off-diagonal killed, diagonal kept.
        let diag = rate_estimate(&pilot, 1e9, 10).unwrap();
        assert_eq!(diag.get(0, 1), 0.0);
        assert_eq!(diag.get(0, 0), 2.0);
        assert_eq!(diag.get(1, 1), 3.0);
    }

    #[test]
    fn threshold_matrix_validation() {
        let mut bad_diag = SymmetricMatrix::zeros(2);
        bad_diag.set(0, 0, 0.1);
        assert!(ThresholdMatrix::new(bad_diag).is_err());
        let mut negative = SymmetricMatrix::zeros(2);
        negative.set(0, 1, -0.1);
        assert!(ThresholdMatrix::new(negative).is_err());
        assert!(ThresholdMatrix::uniform(2, -1.0).is_err());
    }
}
