//! Deterministic construction of the benchmark covariance structures and
//! seeded sampling from the four observation distributions.
//!
//! Structures:
//! * banded — `σ*_ij = max(1 − |i−j|/10, 0)` (seed-independent);
//! * block diagonal — `blockdiag(A + δI, 4I)` on a `p/2` split, where `A`
//!   has independent `Unif(0.3,0.8)·Bernoulli(0.2)` entries (upper triangle
//!   drawn, mirrored) and `δ = max(−γ_min(A), 0) + 0.001`, forcing the
//!   minimum eigenvalue to exactly `0.001` whenever `A` is indefinite.
//!
//! Distributions: `N(0, Σ*)`; multivariate t with 3.5 df; skew-t with 4 df
//! and shape `α = 10·1` (selection construction: a `(p+1)`-dimensional
//! normal with correlation block `[[1, δᵀ],[δ, Ω̄]]`, the body sign-flipped
//! on the latent coordinate, rescaled by the marginal scales, then divided
//! by `√(W/ν)`); and the contaminated t, whose rows are `N(−5·1, I)` with
//! probability 0.1 and multivariate t with 5 df otherwise.
//!
//! The t draws use Σ* as the *scale* matrix (covariance `Σ*·ν/(ν−2)`);
//! setting `t_covariance_matched` rescales so the covariance equals Σ*.
//!
//! RNG: ChaCha12, seeded from the scenario seed. The block-diagonal
//! structure uses the reserved stream `STRUCTURE_STREAM`; repetition `r`
//! samples on stream `r`. Per row the draw order is fixed: the optional
//! contamination uniform, then the normal vector (`p` or `p+1` values),
//! then the chi-squared mixing draw where applicable — so every dataset is
//! bit-reproducible from `(seed, rep)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Cholesky, SymmetricMatrix};
use crate::pilot::DataMatrix;
use crate::scalar::{real, Scalar};

/// Reserved RNG stream for structure generation (distinct from every
/// repetition stream).
pub const STRUCTURE_STREAM: u64 = 1 << 63;

/// Skew-t shape parameter applied to every coordinate.
pub const SKEW_SHAPE: f64 = 10.0;
/// Contamination probability of the contaminated-t rows.
pub const CONTAM_PROB: f64 = 0.1;
/// Mean shift of contaminated rows.
pub const CONTAM_MEAN: f64 = -5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Banded,
    BlockDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution2 {
    Normal,
    T35,
    SkewT4,
    ContamT5,
}

/// Scenario: structure, sampling distribution, sizes and seeding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub structure: Structure,
    pub distribution: Distribution2,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub reps: usize,
    /// Rescale t draws so their covariance (rather than scale) equals Σ*.
    #[serde(default)]
    pub t_covariance_matched: bool,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: self.n });
        }
        if self.p == 0 || self.reps == 0 {
            return Err(Error::InvalidInput("dimension and repetition count must be positive".into()));
        }
        if self.structure == Structure::BlockDiagonal && self.p % 2 != 0 {
            return Err(Error::InvalidInput("block-diagonal structure needs an even dimension".into()));
        }
        Ok(())
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The scenario's true covariance. Banded is seed-independent; block
/// diagonal depends only on the scenario seed.
pub fn true_covariance<F: Scalar>(spec: &ScenarioSpec) -> Result<SymmetricMatrix<F>> {
    spec.validate()?;
    match spec.structure {
        Structure::Banded => Ok(banded(spec.p)),
        Structure::BlockDiagonal => block_diagonal(spec.p, spec.seed),
    }
}

/// `σ*_ij = max(1 − |i−j|/10, 0)`.
pub fn banded<F: Scalar>(p: usize) -> SymmetricMatrix<F> {
    SymmetricMatrix::from_fn(p, |i, j| {
        let d = (j - i) as f64; // from_fn visits i ≤ j
        real::<F>((1.0 - d / 10.0).max(0.0))
    })
}

fn block_diagonal<F: Scalar>(p: usize, seed: u64) -> Result<SymmetricMatrix<F>> {
    let half = p / 2;
    let mut rng = rng_for(seed, STRUCTURE_STREAM);
    let mut a = SymmetricMatrix::<F>::zeros(half);
    for i in 0..half {
        for j in i..half {
            let u = 0.3 + 0.5 * rng.random::<f64>();
            let hit = rng.random::<f64>() < 0.2;
            a.set(i, j, real::<F>(if hit { u } else { 0.0 }));
        }
    }
    let gmin = a.sym_eig()?.min_eigenvalue();
    let delta = (-gmin).max(F::zero()) + real::<F>(1e-3);
    Ok(SymmetricMatrix::from_fn(p, |i, j| {
        if i < half && j < half {
            a.get(i, j) + if i == j { delta } else { F::zero() }
        } else if i >= half && j >= half {
            if i == j {
                real::<F>(4.0)
            } else {
                F::zero()
            }
        } else {
            F::zero()
        }
    }))
}

struct SkewSetup<F> {
    scales: Vec<F>,
    factor: Cholesky<F>, // of the (p+1)-dimensional selection correlation
}

fn skew_setup<F: Scalar>(sigma: &SymmetricMatrix<F>) -> Result<SkewSetup<F>> {
    let p = sigma.dim();
    let scales: Vec<F> = (0..p).map(|i| sigma.get(i, i).sqrt()).collect();
    let omega_bar =
        SymmetricMatrix::from_fn(p, |i, j| sigma.get(i, j) / (scales[i] * scales[j]));
    let alpha = real::<F>(SKEW_SHAPE);
    let t: Vec<F> = (0..p)
        .map(|i| alpha * (0..p).map(|j| omega_bar.get(i, j)).sum::<F>())
        .collect();
    let s: F = t.iter().map(|&ti| alpha * ti).sum();
    let denom = (F::one() + s).sqrt();
    let delta: Vec<F> = t.iter().map(|&ti| ti / denom).collect();
    let star = SymmetricMatrix::from_fn(p + 1, |i, j| {
        if i == 0 && j == 0 {
            F::one()
        } else if i == 0 {
            delta[j - 1]
        } else {
            omega_bar.get(i - 1, j - 1)
        }
    });
    let factor = star.cholesky().map_err(|_| {
        Error::InvalidInput("scenario covariance does not support the skew construction".into())
    })?;
    Ok(SkewSetup { scales, factor })
}

fn standard_normals<F: Scalar>(rng: &mut ChaCha12Rng, len: usize) -> Vec<F> {
    (0..len).map(|_| real::<F>(StandardNormal.sample(rng))).collect()
}

/// Draws the scenario's `n×p` dataset for repetition `rep`.
pub fn sample_rep<F: Scalar>(
    spec: &ScenarioSpec,
    sigma_star: &SymmetricMatrix<F>,
    rep: usize,
) -> Result<DataMatrix<F>> {
    spec.validate()?;
    if sigma_star.dim() != spec.p {
        return Err(Error::InvalidInput("covariance dimension does not match the scenario".into()));
    }
    let factor = sigma_star.cholesky().map_err(|_| {
        Error::InvalidInput("scenario covariance must be positive definite".into())
    })?;
    let mut rng = rng_for(spec.seed, rep as u64);
    let p = spec.p;

    let t_scale = |df: f64| -> F {
        if spec.t_covariance_matched {
            real::<F>(((df - 2.0) / df).sqrt())
        } else {
            F::one()
        }
    };

    let skew = if spec.distribution == Distribution2::SkewT4 {
        Some(skew_setup(sigma_star)?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let row: Vec<F> = match spec.distribution {
            Distribution2::Normal => {
                let z = standard_normals::<F>(&mut rng, p);
                factor.factor_matvec(&z)
            }
            Distribution2::T35 => {
                let df = 3.5;
                let z = standard_normals::<F>(&mut rng, p);
                let w: f64 = ChiSquared::new(df).unwrap().sample(&mut rng);
                let m = t_scale(df) / real::<F>((w / df).sqrt());
                factor.factor_matvec(&z).into_iter().map(|v| v * m).collect()
            }
            Distribution2::SkewT4 => {
                let df = 4.0;
                let setup = skew.as_ref().expect("prepared above");
                let z = standard_normals::<F>(&mut rng, p + 1);
                let u = setup.factor.factor_matvec(&z);
                let flip = u[0] <= F::zero();
                let w: f64 = ChiSquared::new(df).unwrap().sample(&mut rng);
                let m = t_scale(df) / real::<F>((w / df).sqrt());
                (0..p)
                    .map(|i| {
                        let body = if flip { -u[i + 1] } else { u[i + 1] };
                        setup.scales[i] * body * m
                    })
                    .collect()
            }
            Distribution2::ContamT5 => {
                let contaminated = rng.random::<f64>() < CONTAM_PROB;
                if contaminated {
                    let z = standard_normals::<F>(&mut rng, p);
                    z.into_iter().map(|v| real::<F>(CONTAM_MEAN) + v).collect()
                } else {
                    let df = 5.0;
                    let z = standard_normals::<F>(&mut rng, p);
                    let w: f64 = ChiSquared::new(df).unwrap().sample(&mut rng);
                    let m = t_scale(df) / real::<F>((w / df).sqrt());
                    factor.factor_matvec(&z).into_iter().map(|v| v * m).collect()
                }
            }
        };
        rows.push(row);
    }
    DataMatrix::new(rows)
}

/// Repetition 0 of the scenario.
pub fn sample<F: Scalar>(spec: &ScenarioSpec, sigma_star: &SymmetricMatrix<F>) -> Result<DataMatrix<F>> {
    sample_rep(spec, sigma_star, 0)
}
