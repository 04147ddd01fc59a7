//! Alternating-direction solver for the constrained sparse-fit problem
//!
//! ```text
//! minimize   ½‖Σ − Σ̃‖_F² + λ‖W ⊙ Σ‖_{1,off}
//! subject to Σ ⪰ 0  and  Cond(Σ) ≤ κ          (condition-number variants)
//!            Σ ⪰ τI                            (floor variant)
//!            Σ_ij = b_ij for (i,j) ∈ Ω         (correlation variant, extra)
//! ```
//!
//! splitting on an auxiliary variable `Y = Σ`. Each iteration performs
//!
//! 1. **Y-step** — project `Σᵏ + μΛᵏ` onto the constraint set (eigenvalue
//!    clamp, see [`crate::projection`]);
//! 2. **Σ-step** — closed-form shrinkage `Σᵢⱼ = μ/(1+μ)·soft(𝒵ᵢⱼ, λwᵢⱼ)`
//!    with `𝒵 = Σ̃ − Λᵏ + Yᵏ⁺¹/μ`; the diagonal uses a zero threshold but the
//!    same `μ/(1+μ)` factor, and pinned entries are written directly;
//! 3. **dual ascent** — `Λᵏ⁺¹ = Λᵏ + (Σᵏ⁺¹ − Yᵏ⁺¹)/μ`.
//!
//! The loop stops when
//! `max{‖Σᵏ⁺¹−Σᵏ‖_F², ‖Σᵏ⁺¹−Yᵏ⁺¹‖_F²} / ‖Σᵏ‖_F² < ε`. The returned
//! estimate is the final `Y` iterate, which satisfies the spectral
//! constraint by construction even on non-converged runs; the sparse `Σ`
//! iterate and the multiplier ride along in the result for sparsity
//! reporting and optimality checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::projection::{project_cond, project_floor};
use crate::scalar::{real, Scalar};
use crate::threshold::soft;

/// Constrained model the solver targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant<F> {
    /// Condition-number cap, plain off-diagonal L1 penalty.
    Rws { kappa: F },
    /// Condition-number cap, weighted penalty (`weights` required).
    Arws { kappa: F },
    /// Eigenvalue floor `Σ ⪰ τI`.
    Rpde { tau: F },
    /// Condition-number cap plus exactly pinned entries (`Σ_ij = b_ij` on Ω,
    /// unit diagonal by default).
    Correlation { kappa: F },
}

impl<F: Scalar> Variant<F> {
    pub fn kappa(&self) -> Option<F> {
        match *self {
            Variant::Rws { kappa } | Variant::Arws { kappa } | Variant::Correlation { kappa } => {
                Some(kappa)
            }
            Variant::Rpde { .. } => None,
        }
    }

    pub fn tau(&self) -> Option<F> {
        match *self {
            Variant::Rpde { tau } => Some(tau),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(kappa) = self.kappa() {
            if !(kappa >= F::one()) || !kappa.is_finite() {
                return Err(Error::InvalidInput(format!("kappa must be ≥ 1, got {kappa}")));
            }
        }
        if let Some(tau) = self.tau() {
            if !(tau > F::zero()) || !tau.is_finite() {
                return Err(Error::InvalidInput(format!("tau must be > 0, got {tau}")));
            }
        }
        Ok(())
    }
}

/// Symmetric set Ω of pinned entries with their target values.
#[derive(Debug, Clone)]
pub struct FixedEntries<F> {
    dim: usize,
    values: Vec<Option<F>>,
}

impl<F: Scalar> FixedEntries<F> {
    pub fn new(dim: usize) -> Self {
        Self { dim, values: vec![None; dim * dim] }
    }

    /// Pins `(i,j)` and its mirror `(j,i)` to `b`.
    pub fn pin(&mut self, i: usize, j: usize, b: F) {
        assert!(b.is_finite());
        self.values[i * self.dim + j] = Some(b);
        self.values[j * self.dim + i] = Some(b);
    }

    /// The correlation default: every diagonal entry pinned to 1.
    pub fn unit_diagonal(dim: usize) -> Self {
        let mut s = Self::new(dim);
        for i in 0..dim {
            s.pin(i, i, F::one());
        }
        s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<F> {
        self.values[i * self.dim + j]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, F)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (0..self.dim).filter_map(move |j| self.get(i, j).map(|b| (i, j, b)))
        })
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    /// Overwrites the pinned entries of `m` with their targets.
    pub fn apply(&self, m: &mut SymmetricMatrix<F>) {
        for (i, j, b) in self.iter() {
            m.set(i, j, b);
        }
    }

    /// True when every pinned entry of `m` equals its target exactly.
    pub fn satisfied_exactly(&self, m: &SymmetricMatrix<F>) -> bool {
        self.iter().all(|(i, j, b)| m.get(i, j) == b)
    }
}

/// Full solver configuration.
#[derive(Debug, Clone)]
pub struct SolverConfig<F> {
    /// Sparsity level `λ ≥ 0`.
    pub lambda: F,
    pub variant: Variant<F>,
    /// Augmented-Lagrangian penalty `μ > 0`.
    pub mu: F,
    /// Stopping tolerance on the squared relative residuals.
    pub epsilon: F,
    pub max_iters: usize,
    /// Entrywise penalty weights `W` (nonnegative; diagonal ignored).
    pub weights: Option<SymmetricMatrix<F>>,
    /// Pinned entries Ω. Defaults to the unit diagonal for the correlation
    /// variant when absent.
    pub fixed_entries: Option<FixedEntries<F>>,
    /// Starting point for `Σ⁰ = Y⁰` (e.g. a thresholded pilot); the pilot
    /// itself is used when absent.
    pub warm_start: Option<SymmetricMatrix<F>>,
    /// Return the starting point untouched when it already satisfies the
    /// variant's constraint (and no explicit iterate state was supplied).
    pub accept_feasible_pilot: bool,
    /// Report the sparse `Σ` iterate as `estimate` instead of the projected
    /// `Y` iterate.
    pub return_sigma: bool,
}

impl<F: Scalar> SolverConfig<F> {
    pub fn new(lambda: F, variant: Variant<F>) -> Self {
        Self {
            lambda,
            variant,
            mu: F::one(),
            epsilon: real(1e-6),
            max_iters: 5000,
            weights: None,
            fixed_entries: None,
            warm_start: None,
            accept_feasible_pilot: false,
            return_sigma: false,
        }
    }

    pub fn with_mu(mut self, mu: F) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_epsilon(mut self, epsilon: F) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_warm_start(mut self, warm: SymmetricMatrix<F>) -> Self {
        self.warm_start = Some(warm);
        self
    }

    pub fn with_weights(mut self, weights: SymmetricMatrix<F>) -> Self {
        self.weights = Some(weights);
        self
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.lambda < F::zero() || !self.lambda.is_finite() {
            return Err(Error::InvalidInput("lambda must be nonnegative and finite".into()));
        }
        if !(self.mu > F::zero()) || !self.mu.is_finite() {
            return Err(Error::InvalidInput("mu must be positive and finite".into()));
        }
        if !(self.epsilon > F::zero()) {
            return Err(Error::InvalidInput("epsilon must be positive".into()));
        }
        self.variant.validate()?;
        if let Some(w) = &self.weights {
            if w.dim() != dim {
                return Err(Error::InvalidInput("weight matrix dimension mismatch".into()));
            }
            if w.as_slice().iter().any(|&v| v < F::zero()) {
                return Err(Error::InvalidInput("weights must be nonnegative".into()));
            }
        }
        if matches!(self.variant, Variant::Arws { .. }) && self.weights.is_none() {
            return Err(Error::InvalidInput("the weighted variant requires a weight matrix".into()));
        }
        if let Some(fix) = &self.fixed_entries {
            if fix.dim() != dim {
                return Err(Error::InvalidInput("fixed-entry set dimension mismatch".into()));
            }
        }
        if let Some(w) = &self.warm_start {
            if w.dim() != dim {
                return Err(Error::InvalidInput("warm start dimension mismatch".into()));
            }
        }
        Ok(())
    }

    /// Pinned entries effective for this configuration.
    fn effective_fixed(&self, dim: usize) -> Option<FixedEntries<F>> {
        match (&self.variant, &self.fixed_entries) {
            (Variant::Correlation { .. }, None) => Some(FixedEntries::unit_diagonal(dim)),
            (Variant::Correlation { .. }, Some(f)) => Some(f.clone()),
            _ => None,
        }
    }
}

/// One solver iterate `(Σᵏ, Yᵏ, Λᵏ)` plus its residuals.
#[derive(Debug, Clone)]
pub struct AdmmState<F> {
    pub sigma: SymmetricMatrix<F>,
    pub y: SymmetricMatrix<F>,
    pub dual: SymmetricMatrix<F>,
    pub iter: usize,
    pub primal_residual: F,
    pub relative_change: F,
}

/// Per-iteration residual record.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IterationRecord<F> {
    pub iter: usize,
    /// `‖Σᵏ⁺¹ − Yᵏ⁺¹‖_F`.
    pub primal_residual: F,
    /// `‖Σᵏ⁺¹ − Σᵏ‖_F / ‖Σᵏ‖_F` (guarded denominator).
    pub relative_change: F,
}

/// Solver output. `estimate` is the feasible `Y` iterate unless
/// `return_sigma` was set.
#[derive(Debug, Clone)]
pub struct SolveResult<F> {
    pub estimate: SymmetricMatrix<F>,
    pub iterations: usize,
    pub converged: bool,
    pub objective: F,
    pub trace: Vec<IterationRecord<F>>,
    /// Final sparse `Σ` iterate.
    pub sigma_iterate: SymmetricMatrix<F>,
    /// Final multiplier `Λ`.
    pub dual: SymmetricMatrix<F>,
}

/// Penalized fit `½‖Σ − Σ̃‖_F² + λ‖W ⊙ Σ‖_{1,off}` (`W ≡ 1` when absent).
/// The constraint is not part of the value; feasibility is checked
/// separately.
pub fn objective<F: Scalar>(
    sigma: &SymmetricMatrix<F>,
    pilot: &SymmetricMatrix<F>,
    lambda: F,
    weights: Option<&SymmetricMatrix<F>>,
) -> F {
    assert_eq!(sigma.dim(), pilot.dim(), "dimension mismatch");
    let d = sigma.frobenius_distance(pilot);
    let mut penalty = F::zero();
    for i in 0..sigma.dim() {
        for j in 0..sigma.dim() {
            if i != j {
                let w = weights.map_or(F::one(), |w| w.get(i, j));
                penalty += w * sigma.get(i, j).abs();
            }
        }
    }
    real::<F>(0.5) * d * d + lambda * penalty
}

fn constraint_satisfied<F: Scalar>(
    m: &SymmetricMatrix<F>,
    variant: &Variant<F>,
    fixed: Option<&FixedEntries<F>>,
) -> Result<bool> {
    let eig = m.sym_eig()?;
    let gmin = eig.min_eigenvalue();
    let spectral_ok = match variant {
        Variant::Rws { kappa } | Variant::Arws { kappa } | Variant::Correlation { kappa } => {
            gmin > F::zero() && eig.max_eigenvalue() <= *kappa * gmin
        }
        Variant::Rpde { tau } => gmin >= *tau,
    };
    let pinned_ok = fixed.map_or(true, |f| f.satisfied_exactly(m));
    Ok(spectral_ok && pinned_ok)
}

/// Alternating projections between the condition-number cone and the pinned
/// entries, ending on the exact pin, so the correlation estimate satisfies
/// both constraints at once.
fn finish_correlation<F: Scalar>(
    y: &SymmetricMatrix<F>,
    kappa: F,
    fixed: &FixedEntries<F>,
) -> Result<(SymmetricMatrix<F>, bool)> {
    let tol = F::one() + real::<F>(1e-8);
    let mut m = y.clone();
    for _ in 0..500 {
        fixed.apply(&mut m);
        let eig = m.sym_eig()?;
        let gmin = eig.min_eigenvalue();
        if gmin > F::zero() && eig.max_eigenvalue() <= kappa * gmin * tol {
            return Ok((m, true));
        }
        m = project_cond(&m, kappa)?.projected;
    }
    fixed.apply(&mut m);
    Ok((m, false))
}

/// Runs the alternating-direction loop from `init` (or from the warm
/// start / pilot) and returns the feasible estimate.
pub fn solve<F: Scalar>(
    pilot: &SymmetricMatrix<F>,
    config: &SolverConfig<F>,
    init: Option<AdmmState<F>>,
) -> Result<SolveResult<F>> {
    let dim = pilot.dim();
    config.validate(dim)?;
    if let Some(state) = &init {
        if state.sigma.dim() != dim || state.y.dim() != dim || state.dual.dim() != dim {
            return Err(Error::InvalidInput("initial state dimension mismatch".into()));
        }
    }
    let fixed = config.effective_fixed(dim);
    let start = config.warm_start.clone().unwrap_or_else(|| pilot.clone());

    // Mirrors the protocol where a well-conditioned thresholded pilot is
    // used directly as the final estimate.
    if init.is_none()
        && config.accept_feasible_pilot
        && constraint_satisfied(&start, &config.variant, fixed.as_ref())?
    {
        let objective = objective(&start, pilot, config.lambda, config.weights.as_ref());
        return Ok(SolveResult {
            estimate: start.clone(),
            iterations: 0,
            converged: true,
            objective,
            trace: Vec::new(),
            sigma_iterate: start,
            dual: SymmetricMatrix::zeros(dim),
        });
    }

    let (mut sigma, mut y, mut dual) = match init {
        Some(state) => (state.sigma, state.y, state.dual),
        None => (start.clone(), start, SymmetricMatrix::zeros(dim)),
    };

    let mu = config.mu;
    let shrink = mu / (F::one() + mu);
    let inv_mu = F::one() / mu;
    let lambda = config.lambda;
    let den_guard = real::<F>(1e-20);

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for k in 0..config.max_iters {
        // Y-step: project Σᵏ + μΛᵏ onto the spectral constraint set.
        let target = sigma.add_scaled(&dual, mu);
        let y_next = match config.variant {
            Variant::Rws { kappa } | Variant::Arws { kappa } | Variant::Correlation { kappa } => {
                project_cond(&target, kappa)?.projected
            }
            Variant::Rpde { tau } => project_floor(&target, tau)?,
        };

        // Σ-step: entrywise shrinkage of 𝒵 = Σ̃ − Λᵏ + Yᵏ⁺¹/μ.
        let sigma_next = SymmetricMatrix::from_fn(dim, |i, j| {
            if let Some(b) = fixed.as_ref().and_then(|f| f.get(i, j)) {
                return b;
            }
            let z = pilot.get(i, j) - dual.get(i, j) + inv_mu * y_next.get(i, j);
            if i == j {
                shrink * z
            } else {
                let w = config.weights.as_ref().map_or(F::one(), |w| w.get(i, j));
                shrink * soft(z, lambda * w)
            }
        });

        // Dual ascent.
        dual = dual.add_scaled(&sigma_next.sub(&y_next), inv_mu);

        let den = (sigma.frobenius().powi(2)).max(den_guard);
        let change2 = sigma_next.frobenius_distance(&sigma).powi(2);
        let gap2 = sigma_next.frobenius_distance(&y_next).powi(2);
        iterations = k + 1;
        trace.push(IterationRecord {
            iter: iterations,
            primal_residual: gap2.sqrt(),
            relative_change: (change2 / den).sqrt(),
        });

        sigma = sigma_next;
        y = y_next;

        if (change2 / den).max(gap2 / den) < config.epsilon {
            converged = true;
            break;
        }
    }

    // The returned estimate is the projected iterate, feasible by
    // construction; the correlation variant additionally needs its pinned
    // entries exact, which the finishing pass restores.
    let estimate = match (&config.variant, &fixed) {
        (Variant::Correlation { kappa }, Some(f)) => {
            let (m, ok) = finish_correlation(&y, *kappa, f)?;
            converged = converged && ok;
            m
        }
        _ => y.clone(),
    };
    let reported = if config.return_sigma { sigma.clone() } else { estimate };
    let objective = objective(&reported, pilot, lambda, config.weights.as_ref());
    Ok(SolveResult {
        estimate: reported,
        iterations,
        converged,
        objective,
        trace,
        sigma_iterate: sigma,
        dual,
    })
}

/// First-order optimality residuals at the solver's final iterate, measured
/// on the sparse `Σ` iterate and final multiplier with `R = Σ̃ − Σ̂ − Λ̂`:
///
/// * off the diagonal (outside Ω), `|R_ij| ≤ λw_ij` with
///   `R_ij = λw_ij·sign(Σ̂_ij)` wherever `Σ̂_ij ≠ 0`;
/// * on the diagonal (outside Ω), `R_ii = 0`;
/// * `Σ̂ = Ŷ` at the optimum (`primal_gap`).
#[derive(Debug, Clone, Copy)]
pub struct KktReport<F> {
    /// `max (|R_ij| − λw_ij)₊` over unpinned off-diagonal entries.
    pub offdiag_excess: F,
    /// `max |R_ij − λw_ij sign(Σ̂_ij)|` over unpinned nonzero off-diagonals.
    pub sign_gap: F,
    /// `max |R_ii|` over unpinned diagonal entries.
    pub diag_residual: F,
    /// `‖Σ̂ − Ŷ‖_F` where `Ŷ` is the feasible estimate.
    pub primal_gap: F,
}

pub fn kkt_residuals<F: Scalar>(
    pilot: &SymmetricMatrix<F>,
    result: &SolveResult<F>,
    config: &SolverConfig<F>,
) -> KktReport<F> {
    let dim = pilot.dim();
    let fixed = config.effective_fixed(dim);
    let sigma = &result.sigma_iterate;
    let mut offdiag_excess = F::zero();
    let mut sign_gap = F::zero();
    let mut diag_residual = F::zero();
    for i in 0..dim {
        for j in 0..dim {
            if fixed.as_ref().and_then(|f| f.get(i, j)).is_some() {
                continue;
            }
            let r = pilot.get(i, j) - sigma.get(i, j) - result.dual.get(i, j);
            if i == j {
                diag_residual = diag_residual.max(r.abs());
            } else {
                let w = config.weights.as_ref().map_or(F::one(), |w| w.get(i, j));
                let t = config.lambda * w;
                offdiag_excess = offdiag_excess.max((r.abs() - t).max(F::zero()));
                let s = sigma.get(i, j);
                if s != F::zero() {
                    sign_gap = sign_gap.max((r - t * s.signum()).abs());
                }
            }
        }
    }
    KktReport {
        offdiag_excess,
        sign_gap,
        diag_residual,
        primal_gap: sigma.frobenius_distance(&result.estimate),
    }
}

/// Search grid for the penalty parameter: `0.1, 0.6, 1.1, …, 9.6` plus the
/// endpoint `10.0`.
pub fn mu_grid<F: Scalar>() -> Vec<F> {
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let mu = 0.1 + 0.5 * f64::from(k);
        if mu > 9.6 + 1e-12 {
            break;
        }
        grid.push(real::<F>(mu));
        k += 1;
    }
    grid.push(real::<F>(10.0));
    grid
}

/// One grid entry of [`mu_search`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MuRun<F> {
    pub mu: F,
    pub iterations: usize,
    pub converged: bool,
}

/// Outcome of the penalty-parameter search.
#[derive(Debug)]
pub struct MuSearch<F> {
    pub best_mu: F,
    pub result: SolveResult<F>,
    pub runs: Vec<MuRun<F>>,
}

/// Runs [`solve`] for every grid value of `μ` and keeps the one converging
/// in the fewest iterations; ties go to the smaller `μ`. Non-converged runs
/// count at `max_iters`.
pub fn mu_search<F: Scalar>(
    pilot: &SymmetricMatrix<F>,
    config: &SolverConfig<F>,
) -> Result<MuSearch<F>> {
    let grid = mu_grid::<F>();
    let outcomes: Vec<Result<SolveResult<F>>> = grid
        .par_iter()
        .map(|&mu| solve(pilot, &config.clone().with_mu(mu), None))
        .collect();
    let mut best: Option<(usize, SolveResult<F>)> = None;
    let mut runs = Vec::with_capacity(grid.len());
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        let result = outcome?;
        runs.push(MuRun { mu: grid[idx], iterations: result.iterations, converged: result.converged });
        let better = match &best {
            None => true,
            Some((best_idx, best_result)) => result.iterations < best_result.iterations && *best_idx != idx,
        };
        if better {
            best = Some((idx, result));
        }
    }
    let (idx, result) = best.expect("grid is nonempty");
    Ok(MuSearch { best_mu: grid[idx], result, runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::condition_number;

    fn pseudo_symmetric(dim: usize, seed: u64, scale: f64) -> SymmetricMatrix<f64> {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z = z ^ (z >> 31);
            ((z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0) * scale
        };
        SymmetricMatrix::from_fn(dim, |_, _| next())
    }

    #[test]
    fn feasible_pilot_with_zero_lambda_is_returned() {
        let pilot = SymmetricMatrix::from_diagonal(&[2.0f64, 1.0]);
        let mut config = SolverConfig::new(0.0, Variant::Rws { kappa: 10.0 });
        config.accept_feasible_pilot = true;
        let r = solve(&pilot, &config, None).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
        assert_eq!(r.estimate.as_slice(), pilot.as_slice());

        // Without the short-circuit the loop still fixes the pilot in one
        // iteration (μ = 1 keeps the arithmetic exact).
        let config = SolverConfig::new(0.0, Variant::Rws { kappa: 10.0 });
        let r = solve(&pilot, &config, None).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        assert!(r.estimate.frobenius_distance(&pilot) < 1e-12);
    }

    #[test]
    fn two_by_two_matches_dense_grid_oracle() {
        // κ so large the constraint is inactive: the optimum is the plain
        // prox, diag kept, off-diagonal soft(0.9, 0.5) = 0.4. The oracle
        // scans the 3 free entries of the symmetric 2×2, filtered to the
        // feasible (PD) set.
        let pilot =
            SymmetricMatrix::from_raw(2, vec![1.0f64, 0.9, 0.9, 1.0]).unwrap();
        let config = SolverConfig::new(0.5, Variant::Rws { kappa: 1e6 }).with_epsilon(1e-14);
        let r = solve(&pilot, &config, None).unwrap();
        assert!(r.converged);
        assert!((r.estimate.get(0, 1) - 0.4).abs() < 1e-5);

        let mut best = f64::INFINITY;
        let mut best_entry = (0.0, 0.0, 0.0);
        let steps = 160;
        for ai in 0..=steps {
            let a = 0.5 + ai as f64 / steps as f64;
            for bi in 0..=steps {
                let b = 0.5 + bi as f64 / steps as f64;
                for ci in 0..=steps {
                    let c = -0.5 + ci as f64 / steps as f64;
                    if a <= 0.0 || b <= 0.0 || a * b - c * c <= 0.0 {
                        continue;
                    }
                    let fit = 0.5 * ((a - 1.0).powi(2) + (b - 1.0).powi(2) + 2.0 * (c - 0.9).powi(2));
                    let val = fit + 0.5 * 2.0 * c.abs();
                    if val < best {
                        best = val;
                        best_entry = (a, b, c);
                    }
                }
            }
        }
        assert!((r.estimate.get(0, 0) - best_entry.0).abs() < 2e-2);
        assert!((r.estimate.get(0, 1) - best_entry.2).abs() < 2e-2);
        assert!(r.objective <= best + 1e-5);
    }

    #[test]
    fn kkt_residuals_vanish_at_convergence() {
        let pilot = pseudo_symmetric(8, 3, 1.0);
        let config = SolverConfig::new(0.1, Variant::Rws { kappa: 10.0 }).with_epsilon(1e-13);
        let r = solve(&pilot, &config, None).unwrap();
        assert!(r.converged);
        let kkt = kkt_residuals(&pilot, &r, &config);
        assert!(kkt.offdiag_excess <= 1e-9, "{kkt:?}");
        assert!(kkt.sign_gap <= 1e-7, "{kkt:?}");
        assert!(kkt.diag_residual <= 1e-9, "{kkt:?}");
        assert!(kkt.primal_gap <= 1e-4, "{kkt:?}");
    }

    #[test]
    fn feasibility_holds_per_variant() {
        let pilot = pseudo_symmetric(10, 7, 2.0);
        let kappa = 25.0;
        let r = solve(&pilot, &SolverConfig::new(0.05, Variant::Rws { kappa }), None).unwrap();
        let cond = condition_number(&r.estimate).unwrap();
        assert!(cond <= kappa * (1.0 + 1e-6), "cond {cond}");

        let tau = 0.2;
        let r = solve(&pilot, &SolverConfig::new(0.05, Variant::Rpde { tau }), None).unwrap();
        let gmin = r.estimate.sym_eig().unwrap().min_eigenvalue();
        assert!(gmin >= tau * (1.0 - 1e-6), "gmin {gmin}");

        let w = SymmetricMatrix::from_fn(10, |i, j| if i == j { 0.0 } else { 0.5 + ((i + j) % 3) as f64 });
        let config = SolverConfig::new(0.05, Variant::Arws { kappa }).with_weights(w);
        let r = solve(&pilot, &config, None).unwrap();
        assert!(condition_number(&r.estimate).unwrap() <= kappa * (1.0 + 1e-6));
    }

    #[test]
    fn correlation_variant_pins_entries_exactly() {
        let mut pilot = pseudo_symmetric(6, 11, 0.4);
        for i in 0..6 {
            pilot.set(i, i, 1.0 + 0.3 * (i as f64 % 2.0));
        }
        let kappa = 50.0;
        let config = SolverConfig::new(0.05, Variant::Correlation { kappa }).with_epsilon(1e-10);
        let r = solve(&pilot, &config, None).unwrap();
        for i in 0..6 {
            assert_eq!(r.estimate.get(i, i), 1.0);
        }
        assert!(condition_number(&r.estimate).unwrap() <= kappa * (1.0 + 1e-6));
        assert!(r.converged);
    }

    #[test]
    fn scaling_equivariance_without_penalty() {
        let pilot = pseudo_symmetric(7, 19, 1.5);
        let config = SolverConfig::new(0.0, Variant::Rws { kappa: 5.0 }).with_epsilon(1e-13);
        let r1 = solve(&pilot, &config, None).unwrap();
        let c = 3.5;
        let r2 = solve(&pilot.scale(c), &config, None).unwrap();
        assert!(r2.estimate.frobenius_distance(&r1.estimate.scale(c)) < 1e-8);
    }

    #[test]
    fn objective_matches_norms_oracle() {
        let sigma = pseudo_symmetric(5, 23, 1.0);
        let pilot = pseudo_symmetric(5, 29, 1.0);
        let lambda = 0.3;
        let got = objective(&sigma, &pilot, lambda, None);
        let want = 0.5 * sigma.frobenius_distance(&pilot).powi(2) + lambda * sigma.l1_off();
        assert!((got - want).abs() < 1e-12);

        // Diagonal Σ equal to a diagonal pilot: both terms vanish.
        let d = SymmetricMatrix::from_diagonal(&[1.0f64, 2.0]);
        assert_eq!(objective(&d, &d, 5.0, None), 0.0);

        // Hand 2×2 case: fit ½·(2·0.2²) plus penalty 2λ·|0.3|.
        let a = SymmetricMatrix::from_raw(2, vec![1.0f64, 0.3, 0.3, 1.0]).unwrap();
        let b = SymmetricMatrix::from_raw(2, vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        let got = objective(&a, &b, 0.1, None);
        assert!((got - (0.5 * 2.0 * 0.04 + 0.1 * 0.6)).abs() < 1e-12);
    }

    #[test]
    fn residual_trend_and_convergence() {
        let pilot = pseudo_symmetric(12, 31, 2.0);
        let config = SolverConfig::new(0.1, Variant::Rws { kappa: 8.0 });
        let r = solve(&pilot, &config, None).unwrap();
        assert!(r.converged);
        let last = r.trace.last().unwrap();
        let den = 1.0f64.max(r.sigma_iterate.frobenius());
        assert!(last.relative_change < config.epsilon.sqrt() * 1.01);
        assert!(last.primal_residual / den < config.epsilon.sqrt() * 1.01);
        // Summability proxy: residuals fall, comparing the first and last
        // quarters of the trace.
        if r.trace.len() >= 8 {
            let q = r.trace.len() / 4;
            let head: f64 = r.trace[..q].iter().map(|t| t.primal_residual).sum::<f64>() / q as f64;
            let tail: f64 =
                r.trace[r.trace.len() - q..].iter().map(|t| t.primal_residual).sum::<f64>() / q as f64;
            assert!(tail < head);
        }
    }

    #[test]
    fn hitting_the_iteration_cap_is_not_an_error() {
        let pilot = pseudo_symmetric(10, 41, 3.0);
        let mut config = SolverConfig::new(0.2, Variant::Rws { kappa: 3.0 }).with_epsilon(1e-16);
        config.max_iters = 3;
        let r = solve(&pilot, &config, None).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
        // The reported estimate is still feasible.
        assert!(condition_number(&r.estimate).unwrap() <= 3.0 * (1.0 + 1e-6));
    }

    #[test]
    fn mu_grid_contents() {
        let grid = mu_grid::<f64>();
        assert_eq!(grid.len(), 21);
        assert!((grid[0] - 0.1).abs() < 1e-12);
        assert!((grid[1] - 0.6).abs() < 1e-12);
        assert!((grid[19] - 9.6).abs() < 1e-12);
        assert!((grid[20] - 10.0).abs() < 1e-12);
        for w in grid.windows(2).take(19) {
            assert!((w[1] - w[0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_search_tie_breaks_to_smallest() {
        // Inactive constraints: every μ converges immediately, so the tie
        // break selects the first grid value.
        let pilot = SymmetricMatrix::from_diagonal(&[2.0f64, 1.0]);
        let config = SolverConfig::new(0.0, Variant::Rws { kappa: 100.0 });
        let s = mu_search(&pilot, &config).unwrap();
        assert!((s.best_mu - 0.1).abs() < 1e-12);
        assert!(s.runs.iter().all(|r| r.converged));

        // Deterministic across repeat calls.
        let pilot = pseudo_symmetric(6, 55, 1.0);
        let config = SolverConfig::new(0.1, Variant::Rws { kappa: 5.0 });
        let a = mu_search(&pilot, &config).unwrap();
        let b = mu_search(&pilot, &config).unwrap();
        assert_eq!(a.best_mu, b.best_mu);
        assert_eq!(a.result.iterations, b.result.iterations);
        assert_eq!(a.result.estimate.as_slice(), b.result.estimate.as_slice());
    }

    #[test]
    fn config_validation() {
        let pilot = SymmetricMatrix::<f64>::identity(3);
        assert!(solve(&pilot, &SolverConfig::new(-1.0, Variant::Rws { kappa: 2.0 }), None).is_err());
        assert!(solve(&pilot, &SolverConfig::new(0.1, Variant::Rws { kappa: 0.5 }), None).is_err());
        assert!(solve(&pilot, &SolverConfig::new(0.1, Variant::Rpde { tau: 0.0 }), None).is_err());
        assert!(solve(&pilot, &SolverConfig::new(0.1, Variant::Arws { kappa: 2.0 }), None).is_err());
        let bad_mu = SolverConfig::new(0.1, Variant::Rws { kappa: 2.0 }).with_mu(0.0);
        assert!(solve(&pilot, &bad_mu, None).is_err());
        let wrong_dim = SolverConfig::new(0.1, Variant::Rws { kappa: 2.0 })
            .with_weights(SymmetricMatrix::identity(2));
        assert!(solve(&pilot, &wrong_dim, None).is_err());
    }

    #[test]
    fn weighted_penalty_shrinks_heavier_entries_more() {
        let mut pilot = SymmetricMatrix::<f64>::identity(3);
        pilot.set(0, 1, 0.8);
        pilot.set(0, 2, 0.8);
        let mut w = SymmetricMatrix::zeros(3);
        w.set(0, 1, 1.0);
        w.set(0, 2, 3.0);
        let config =
            SolverConfig::new(0.2, Variant::Arws { kappa: 1e9 }).with_weights(w).with_epsilon(1e-13);
        let r = solve(&pilot, &config, None).unwrap();
        assert!((r.estimate.get(0, 1) - 0.6).abs() < 1e-5);
        assert!((r.estimate.get(0, 2) - 0.2).abs() < 1e-5);
    }
}
