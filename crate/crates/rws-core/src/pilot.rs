//! Robust pilot covariance estimators built from an `n×p` data matrix.
//!
//! A pilot is a (possibly indefinite) first-stage estimate `Σ̃` that the
//! thresholding and solver stages refine. Four constructions are provided:
//!
//! * [`sample_covariance`] — the plain `1/n`-divisor sample covariance;
//! * [`rank_pilot`] — MAD scales on the diagonal, Kendall-tau-derived
//!   correlations `sin(π τ̃/2)` off it;
//! * [`huber_pilot`] — entrywise robust means via the Huber estimating
//!   equation `Σ ψ_H(z_k − μ) = 0` applied to products and marginals;
//! * [`mom_pilot`] — median-of-means over `M` near-equal groups.
//!
//! Entry-level computations are independent; the expensive estimators fan out
//! over column pairs with rayon and collect in index order, so results do not
//! depend on thread count.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::scalar::{real, real_of, Scalar};

/// Default Fisher consistency constant for the MAD scale (≈ 1/Φ⁻¹(0.75)).
pub const DEFAULT_FISHER_CONSTANT: f64 = 1.4826;

/// MAD floor substituted for a zero median absolute deviation when
/// degenerate scales are explicitly allowed.
pub const DEGENERATE_SCALE_FLOOR: f64 = 1e-12;

/// `n` observations of a `p`-dimensional vector, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix<F> {
    n: usize,
    p: usize,
    rows: Vec<F>,
}

impl<F: Scalar> DataMatrix<F> {
    /// Builds from observation rows; requires `n ≥ 2`, equal row lengths and
    /// finite entries.
    pub fn new(rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        let p = rows[0].len();
        if p == 0 {
            return Err(Error::InvalidInput("observations must have at least one column".into()));
        }
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidInput("observation rows have unequal lengths".into()));
        }
        let flat: Vec<F> = rows.into_iter().flatten().collect();
        if flat.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("observations must be finite".into()));
        }
        Ok(Self { n, p, rows: flat })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.rows[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.rows[i * self.p..(i + 1) * self.p]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn column_means(&self) -> Vec<F> {
        let inv_n = F::one() / real_of::<F>(self.n);
        (0..self.p)
            .map(|j| (0..self.n).map(|i| self.get(i, j)).sum::<F>() * inv_n)
            .collect()
    }

    /// New matrix holding the given rows (in the given order).
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        Self::new(idx.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    /// New matrix with columns permuted: column `j` of the result is column
    /// `perm[j]` of the input.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.p);
        let rows = (0..self.n)
            .map(|i| perm.iter().map(|&pj| self.get(i, pj)).collect())
            .collect();
        Self::new(rows).expect("permutation preserves validity")
    }
}

/// Which pilot construction produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotMethod {
    Sample,
    Rank,
    Huber,
    MedianOfMeans,
}

/// Huber robustification strength: one `H` for every entry, or the adaptive
/// per-entry rule `H = c · sd̂(z) · sqrt(n / ln p)` with `sd̂` the MAD-based
/// scale of the sequence being averaged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HuberTuning<F> {
    Adaptive { c: F },
    Fixed { h: F },
}

impl<F: Scalar> Default for HuberTuning<F> {
    fn default() -> Self {
        HuberTuning::Adaptive { c: F::one() }
    }
}

/// Parameters a pilot construction actually used.
#[derive(Debug, Clone)]
pub enum PilotParams<F> {
    Sample,
    Rank { fisher_constant: F },
    Huber { tuning: HuberTuning<F>, cross_h: SymmetricMatrix<F>, marginal_h: Vec<F> },
    MedianOfMeans { groups: usize, shuffle_seed: Option<u64> },
}

/// Pilot covariance `Σ̃` plus the per-entry scale information that
/// entry-dependent thresholds need.
#[derive(Debug, Clone)]
pub struct PilotEstimate<F> {
    pub sigma: SymmetricMatrix<F>,
    /// Diagonal scales `σ̃_11 … σ̃_pp`.
    pub diag_scale: Vec<F>,
    pub method: PilotMethod,
    pub params: PilotParams<F>,
}

/// Sample covariance with divisor `n` (not `n−1`).
pub fn sample_covariance<F: Scalar>(x: &DataMatrix<F>) -> Result<PilotEstimate<F>> {
    if x.n() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: x.n() });
    }
    let means = x.column_means();
    let inv_n = F::one() / real_of::<F>(x.n());
    let sigma = SymmetricMatrix::from_fn(x.p(), |a, b| {
        let mut s = F::zero();
        for i in 0..x.n() {
            s += (x.get(i, a) - means[a]) * (x.get(i, b) - means[b]);
        }
        s * inv_n
    });
    let diag_scale = sigma.diagonal();
    Ok(PilotEstimate { sigma, diag_scale, method: PilotMethod::Sample, params: PilotParams::Sample })
}

/// Median of a sequence; the median of an even count is the average of the
/// two central values. The input is consumed as scratch.
pub fn median<F: Scalar>(mut v: Vec<F>) -> F {
    assert!(!v.is_empty(), "median of empty sequence");
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) * real::<F>(0.5)
    }
}

/// Median absolute deviation `med_i |v_i − med_j v_j|` (unscaled).
pub fn mad<F: Scalar>(v: &[F]) -> F {
    let med = median(v.to_vec());
    median(v.iter().map(|&x| (x - med).abs()).collect())
}

/// Empirical Kendall tau (tau-a): pair count over all `C(n,2)` index pairs,
/// ties contributing zero to the numerator.
pub fn kendall_tau<F: Scalar>(x: &[F], y: &[F]) -> F {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    assert!(n >= 2, "kendall tau needs at least two observations");
    let mut s = 0i64;
    for a in 0..n {
        for b in (a + 1)..n {
            let dx = x[a] - x[b];
            let dy = y[a] - y[b];
            let prod = dx * dy;
            if prod > F::zero() {
                s += 1;
            } else if prod < F::zero() {
                s -= 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    real::<F>(s as f64 / pairs)
}

/// Rank-based pilot `Σ̃ = D̃ R̃ D̃` with MAD scales and
/// `r̃_ij = sin(π τ̃_ij / 2)`. Zero-MAD columns are an error.
pub fn rank_pilot<F: Scalar>(x: &DataMatrix<F>, fisher_constant: F) -> Result<PilotEstimate<F>> {
    rank_pilot_opts(x, fisher_constant, false)
}

/// As [`rank_pilot`], but a zero MAD is replaced by a small floor when
/// `allow_degenerate_scale` is set instead of erroring.
pub fn rank_pilot_opts<F: Scalar>(
    x: &DataMatrix<F>,
    fisher_constant: F,
    allow_degenerate_scale: bool,
) -> Result<PilotEstimate<F>> {
    let (n, p) = (x.n(), x.p());
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let columns: Vec<Vec<F>> = (0..p).map(|j| x.column(j)).collect();

    let mut d = Vec::with_capacity(p); // sqrt(σ̃_uu)
    for (u, col) in columns.iter().enumerate() {
        let mut m = mad(col);
        if m == F::zero() {
            if allow_degenerate_scale {
                m = real::<F>(DEGENERATE_SCALE_FLOOR);
            } else {
                return Err(Error::DegenerateScale { column: u });
            }
        }
        d.push(fisher_constant * m);
    }

    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| ((i + 1)..p).map(move |j| (i, j))).collect();
    let half_pi = F::FRAC_PI_2();
    let corr: Vec<F> = pairs
        .par_iter()
        .map(|&(i, j)| (half_pi * kendall_tau(&columns[i], &columns[j])).sin())
        .collect();

    let mut sigma = SymmetricMatrix::from_fn(p, |i, j| if i == j { d[i] * d[i] } else { F::zero() });
    for (&(i, j), &r) in pairs.iter().zip(&corr) {
        sigma.set(i, j, d[i] * d[j] * r);
    }
    let diag_scale = sigma.diagonal();
    Ok(PilotEstimate {
        sigma,
        diag_scale,
        method: PilotMethod::Rank,
        params: PilotParams::Rank { fisher_constant },
    })
}

/// Root of the Huber estimating equation `Σ_k ψ_H(z_k − μ) = 0` with
/// `ψ_H(t) = clamp(t, −H, H)`, found by bracketing bisection on
/// `[min z, max z]` to `|Σψ_H| ≤ 1e-10·n·H`.
pub fn huber_mean<F: Scalar>(z: &[F], h: F) -> Result<F> {
    assert!(!z.is_empty());
    if h <= F::zero() || !h.is_finite() {
        return Err(Error::InvalidInput("Huber parameter H must be positive and finite".into()));
    }
    let mut lo = z[0];
    let mut hi = z[0];
    for &v in z {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        return Ok(lo);
    }
    let psi_sum = |mu: F| -> F { z.iter().map(|&v| (v - mu).max(-h).min(h)).sum() };
    let tol = real::<F>(1e-10) * real_of::<F>(z.len()) * h;
    let half = real::<F>(0.5);
    let eps = F::epsilon();
    // The estimating function is continuous and nonincreasing in μ, with
    // psi_sum(lo) ≥ 0 ≥ psi_sum(hi): a root is bracketed. Bisect until the
    // bracket collapses to machine width, then verify the residual tolerance.
    for _ in 0..200 {
        let mid = (lo + hi) * half;
        let g = psi_sum(mid);
        if g > F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= eps * F::one().max(lo.abs()).max(hi.abs()) {
            let root = (lo + hi) * half;
            if psi_sum(root).abs() <= tol {
                return Ok(root);
            }
            break;
        }
    }
    Err(Error::SolverFailure("Huber bisection did not reach tolerance in 200 steps".into()))
}

fn adaptive_h<F: Scalar>(z: &[F], c: F, p: usize) -> F {
    let scale = real::<F>(DEFAULT_FISHER_CONSTANT) * mad(z);
    let n = real_of::<F>(z.len());
    let logp = real::<F>((p.max(2) as f64).ln());
    c * scale * (n / logp).sqrt()
}

/// Robust mean of a sequence under the given tuning. A zero MAD scale in
/// adaptive mode degenerates ψ_H to 0, so the median (the majority value) is
/// returned directly.
fn robust_mean<F: Scalar>(z: &[F], tuning: HuberTuning<F>, p: usize) -> Result<(F, F)> {
    let h = match tuning {
        HuberTuning::Fixed { h } => h,
        HuberTuning::Adaptive { c } => {
            let h = adaptive_h(z, c, p);
            if h <= F::zero() {
                return Ok((median(z.to_vec()), F::zero()));
            }
            h
        }
    };
    Ok((huber_mean(z, h)?, h))
}

/// Adaptive Huber pilot: `σ̃_ij = μ̃_ij − μ̃_i μ̃_j` with each `μ̃` the Huber
/// robust mean of the products `x_ik x_jk` or marginals.
pub fn huber_pilot<F: Scalar>(x: &DataMatrix<F>, tuning: HuberTuning<F>) -> Result<PilotEstimate<F>> {
    let (n, p) = (x.n(), x.p());
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if let HuberTuning::Fixed { h } = tuning {
        if h <= F::zero() || !h.is_finite() {
            return Err(Error::InvalidInput("Huber parameter H must be positive and finite".into()));
        }
    }
    let columns: Vec<Vec<F>> = (0..p).map(|j| x.column(j)).collect();

    let marginals: Vec<(F, F)> = columns
        .par_iter()
        .map(|col| robust_mean(col, tuning, p))
        .collect::<Result<_>>()?;

    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect();
    let cross: Vec<(F, F)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let prod: Vec<F> = columns[i].iter().zip(&columns[j]).map(|(&a, &b)| a * b).collect();
            robust_mean(&prod, tuning, p)
        })
        .collect::<Result<_>>()?;

    let mut sigma = SymmetricMatrix::zeros(p);
    let mut cross_h = SymmetricMatrix::zeros(p);
    for (&(i, j), &(mu_ij, h_ij)) in pairs.iter().zip(&cross) {
        sigma.set(i, j, mu_ij - marginals[i].0 * marginals[j].0);
        cross_h.set(i, j, h_ij);
    }
    let diag_scale = sigma.diagonal();
    Ok(PilotEstimate {
        sigma,
        diag_scale,
        method: PilotMethod::Huber,
        params: PilotParams::Huber {
            tuning,
            cross_h,
            marginal_h: marginals.iter().map(|&(_, h)| h).collect(),
        },
    })
}

/// Contiguous partition of `0..n` into `m` groups whose sizes differ by at
/// most one (the first `n mod m` groups take the extra element).
fn group_bounds(n: usize, m: usize) -> Vec<(usize, usize)> {
    let base = n / m;
    let rem = n % m;
    let mut bounds = Vec::with_capacity(m);
    let mut start = 0;
    for g in 0..m {
        let len = base + usize::from(g < rem);
        bounds.push((start, start + len));
        start += len;
    }
    bounds
}

fn mom_mean<F: Scalar>(z: &[F], bounds: &[(usize, usize)]) -> F {
    let means: Vec<F> = bounds
        .iter()
        .map(|&(a, b)| z[a..b].iter().copied().sum::<F>() / real_of::<F>(b - a))
        .collect();
    median(means)
}

/// Median-of-means pilot over `m` contiguous index groups.
pub fn mom_pilot<F: Scalar>(x: &DataMatrix<F>, m: usize) -> Result<PilotEstimate<F>> {
    mom_pilot_opts(x, m, None)
}

/// As [`mom_pilot`] with an optional seeded shuffle of the observation order
/// before grouping. One partition is shared by every entry of the matrix.
pub fn mom_pilot_opts<F: Scalar>(
    x: &DataMatrix<F>,
    m: usize,
    shuffle_seed: Option<u64>,
) -> Result<PilotEstimate<F>> {
    let (n, p) = (x.n(), x.p());
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("group count must satisfy 1 ≤ M ≤ n = {n}, got {m}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = shuffle_seed {
        order.shuffle(&mut ChaCha12Rng::seed_from_u64(seed));
    }
    let bounds = group_bounds(n, m);
    let columns: Vec<Vec<F>> = (0..p)
        .map(|j| order.iter().map(|&i| x.get(i, j)).collect())
        .collect();

    let marginals: Vec<F> = columns.par_iter().map(|col| mom_mean(col, &bounds)).collect();
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect();
    let cross: Vec<F> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let prod: Vec<F> = columns[i].iter().zip(&columns[j]).map(|(&a, &b)| a * b).collect();
            mom_mean(&prod, &bounds)
        })
        .collect();

    let mut sigma = SymmetricMatrix::zeros(p);
    for (&(i, j), &mu_ij) in pairs.iter().zip(&cross) {
        sigma.set(i, j, mu_ij - marginals[i] * marginals[j]);
    }
    let diag_scale = sigma.diagonal();
    Ok(PilotEstimate {
        sigma,
        diag_scale,
        method: PilotMethod::MedianOfMeans,
        params: PilotParams::MedianOfMeans { groups: m, shuffle_seed },
    })
}
