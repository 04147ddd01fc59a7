//! Eigenvalue projections: onto the cone of positive semidefinite matrices
//! with a bounded condition number, onto `{Σ ⪰ τI}` (an eigenvalue floor),
//! and onto an eigenvalue interval `[τ₁, τ₂]`.
//!
//! All three preserve the eigenvectors of the input and act on the spectrum
//! alone: for the condition-number cone `{Y ⪰ 0 : γ_max(Y) ≤ κ·γ_min(Y)}`
//! the Frobenius-nearest point maps each eigenvalue to
//! `clamp(γ̂_i, ν*, κν*)`, where `ν* ≥ 0` minimizes the separable objective
//!
//! ```text
//! f(ν) = Σ_i (clamp(γ̂_i, ν, κν) − γ̂_i)²
//! ```
//!
//! `f` is convex and piecewise quadratic in `ν`, so `ν*` is found exactly by
//! scanning the breakpoints `{γ̂_i/κ, γ̂_i}` of its derivative and solving the
//! stationarity equation on the sign-change segment:
//!
//! ```text
//! ν = (κ·Σ_{γ̂_i > κν} γ̂_i + Σ_{γ̂_i < ν} γ̂_i) / (α κ² + m),
//! ```
//!
//! with `α` eigenvalues clipped from above and `m` from below. Note the
//! low-side sum includes *negative* eigenvalues — they are clamped up to `ν`
//! like any other — and `ν* = 0` (the zero matrix) is the optimum whenever
//! the derivative is already nonnegative at zero. The degenerate cases
//! (input already feasible → returned bit-identically; spectrum entirely
//! nonpositive → zero matrix) are handled before the scan.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::scalar::{real, real_of, Scalar};

/// Eigenvalues in `(−EIG_ZERO_TOL, 0]` from the numerical eigensolver are
/// treated as zero when classifying the input.
pub const EIG_ZERO_TOL: f64 = 1e-12;

/// Outcome of the condition-number projection.
#[derive(Debug, Clone)]
pub struct CondProjectionResult<F> {
    pub projected: SymmetricMatrix<F>,
    /// Optimal lower clip level `ν*` (0 for the zero-matrix return).
    pub nu_star: F,
    /// Count of eigenvalues lowered to `κν*`.
    pub alpha_star: usize,
    /// Smallest (1-based) index whose eigenvalue is raised to `ν*`;
    /// `p + 1 − clipped_low`.
    pub beta_star: usize,
    /// Count of eigenvalues raised to `ν*`.
    pub clipped_low: usize,
    /// Count of eigenvalues lowered to `κν*` (equals `alpha_star`).
    pub clipped_high: usize,
    /// True when the input already satisfied the constraint and was returned
    /// bit-identically.
    pub unchanged: bool,
}

/// Derivative of `f(ν)/2` at `ν`, using strict comparisons so the value is
/// exact at breakpoints (where the clamped terms vanish continuously).
fn half_derivative<F: Scalar>(g: &[F], kappa: F, nu: F) -> F {
    let mut d = F::zero();
    for &gi in g {
        if gi > kappa * nu {
            d += kappa * (kappa * nu - gi);
        } else if gi < nu {
            d += nu - gi;
        }
    }
    d
}

/// Exact minimizer `ν* ≥ 0` of the clamp objective for a (descending)
/// spectrum. Returns 0 when the zero matrix is optimal.
fn optimal_nu<F: Scalar>(g: &[F], kappa: F) -> F {
    if half_derivative(g, kappa, F::zero()) >= F::zero() {
        return F::zero();
    }
    let mut bps: Vec<F> = Vec::with_capacity(2 * g.len() + 1);
    bps.push(F::zero());
    for &gi in g {
        if gi > F::zero() {
            bps.push(gi / kappa);
            bps.push(gi);
        }
    }
    bps.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    bps.dedup();

    // f' is continuous, nondecreasing, and negative at 0: find the first
    // breakpoint where it becomes nonnegative and solve the stationarity
    // equation on the segment just below it.
    let mut prev = F::zero();
    let mut crossing: Option<(F, F)> = None;
    for &bp in bps.iter().skip(1) {
        let d = half_derivative(g, kappa, bp);
        if d >= F::zero() {
            crossing = Some((prev, bp));
            break;
        }
        prev = bp;
    }
    let (lo, hi) = match crossing {
        Some(seg) => seg,
        // Still descending at the top breakpoint: every eigenvalue is below
        // ν on the last segment, so the stationary point is the plain mean.
        None => {
            let mean = g.iter().copied().sum::<F>() / real_of::<F>(g.len());
            return mean.max(prev);
        }
    };
    let probe = (lo + hi) * real::<F>(0.5);
    let mut alpha = 0usize;
    let mut low = 0usize;
    let mut high_sum = F::zero();
    let mut low_sum = F::zero();
    for &gi in g {
        if gi > kappa * probe {
            alpha += 1;
            high_sum += gi;
        } else if gi < probe {
            low += 1;
            low_sum += gi;
        }
    }
    let denom = real_of::<F>(alpha) * kappa * kappa + real_of::<F>(low);
    if denom == F::zero() {
        // f' vanishes identically on the segment: any point is stationary.
        return lo;
    }
    let nu = (kappa * high_sum + low_sum) / denom;
    nu.max(lo).min(hi)
}

/// Frobenius projection onto `{Y ⪰ 0 : Cond(Y) ≤ κ}` (with the zero matrix
/// admitted as the degenerate apex of the cone).
pub fn project_cond<F: Scalar>(y: &SymmetricMatrix<F>, kappa: F) -> Result<CondProjectionResult<F>> {
    if !(kappa >= F::one()) || !kappa.is_finite() {
        return Err(Error::InvalidInput(format!("kappa must be a finite real ≥ 1, got {kappa}")));
    }
    let p = y.dim();
    let eig = y.sym_eig()?;
    let snap = |v: F| {
        if v > -real::<F>(EIG_ZERO_TOL) && v <= F::zero() {
            F::zero()
        } else {
            v
        }
    };
    let gmax = snap(eig.max_eigenvalue());
    let gmin = snap(eig.min_eigenvalue());

    // Fast path: already feasible, returned bit-identically.
    if gmin > F::zero() && gmax <= kappa * gmin {
        return Ok(CondProjectionResult {
            projected: y.clone(),
            nu_star: gmin,
            alpha_star: 0,
            beta_star: p + 1,
            clipped_low: 0,
            clipped_high: 0,
            unchanged: true,
        });
    }

    let g = eig.eigenvalues();
    let nu = if gmax <= F::zero() { F::zero() } else { optimal_nu(g, kappa) };

    if nu <= F::zero() {
        let clipped_low = g.iter().filter(|&&v| v < F::zero()).count();
        return Ok(CondProjectionResult {
            projected: SymmetricMatrix::zeros(p),
            nu_star: F::zero(),
            alpha_star: 0,
            beta_star: p + 1 - clipped_low,
            clipped_low,
            clipped_high: 0,
            unchanged: false,
        });
    }

    let hi = kappa * nu;
    let clipped_high = g.iter().filter(|&&v| v > hi).count();
    let clipped_low = g.iter().filter(|&&v| v < nu).count();
    let spectrum: Vec<F> = g.iter().map(|&v| v.max(nu).min(hi)).collect();
    Ok(CondProjectionResult {
        projected: eig.recombine(&spectrum),
        nu_star: nu,
        alpha_star: clipped_high,
        beta_star: p + 1 - clipped_low,
        clipped_low,
        clipped_high,
        unchanged: false,
    })
}

/// Frobenius projection onto `{Σ ⪰ τI}`: eigenvalues floored at `τ`,
/// eigenvectors kept. Feasible input is returned bit-identically.
pub fn project_floor<F: Scalar>(y: &SymmetricMatrix<F>, tau: F) -> Result<SymmetricMatrix<F>> {
    if !(tau > F::zero()) || !tau.is_finite() {
        return Err(Error::InvalidInput(format!("tau must be a positive finite real, got {tau}")));
    }
    let eig = y.sym_eig()?;
    if eig.min_eigenvalue() >= tau {
        return Ok(y.clone());
    }
    let spectrum: Vec<F> = eig.eigenvalues().iter().map(|&v| v.max(tau)).collect();
    Ok(eig.recombine(&spectrum))
}

/// Frobenius projection onto `{τ₁I ⪯ Σ ⪯ τ₂I}`: eigenvalues clamped into
/// `[τ₁, τ₂]`.
pub fn project_interval<F: Scalar>(
    y: &SymmetricMatrix<F>,
    tau1: F,
    tau2: F,
) -> Result<SymmetricMatrix<F>> {
    if !(tau1 > F::zero()) || !tau1.is_finite() || !tau2.is_finite() {
        return Err(Error::InvalidInput("eigenvalue bounds must be positive finite reals".into()));
    }
    if tau1 > tau2 {
        return Err(Error::InvalidInput(format!("lower bound {tau1} exceeds upper bound {tau2}")));
    }
    let eig = y.sym_eig()?;
    if eig.min_eigenvalue() >= tau1 && eig.max_eigenvalue() <= tau2 {
        return Ok(y.clone());
    }
    let spectrum: Vec<F> = eig.eigenvalues().iter().map(|&v| v.max(tau1).min(tau2)).collect();
    Ok(eig.recombine(&spectrum))
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

    /// Independent minimizer of the 1-D convex objective
    /// `f(ν) = Σ (clamp(γ, ν, κν) − γ)²`.
    ///
    /// The objective is piecewise quadratic with knots at `{γ_i/κ, γ_i}`.
    /// Plain golden section cannot localize a quadratic minimum beyond
    /// ~√ε·scale (nearby function values become indistinguishable), so each
    /// knot cell is refined with an exact three-sample parabola vertex; the
    /// best candidate over all cells and knots wins. Only objective samples
    /// are used — never the stationarity formula under test.
    pub(crate) fn golden_section_nu(g: &[f64], kappa: f64) -> f64 {
        let f = |nu: f64| -> f64 {
            g.iter().map(|&v| (v.clamp(nu, kappa * nu) - v).powi(2)).sum()
        };
        let gmax = g.iter().cloned().fold(0.0f64, f64::max);
        let mut knots: Vec<f64> = vec![0.0, gmax + 1.0];
        for &v in g {
            if v > 0.0 {
                knots.push(v / kappa);
                knots.push(v);
            }
        }
        knots.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        knots.dedup();

        let mut candidates: Vec<f64> = knots.clone();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 1e-300 {
                continue;
            }
            let mid = 0.5 * (a + b);
            let h = 0.25 * (b - a);
            let (f0, fm, f1) = (f(mid - h), f(mid), f(mid + h));
            let curv = f0 - 2.0 * fm + f1;
            if curv > 0.0 {
                let vertex = mid - 0.5 * h * (f1 - f0) / curv;
                candidates.push(vertex.clamp(a, b));
            }
        }
        let mut best = candidates[0];
        let mut best_f = f(best);
        for &c in &candidates[1..] {
            let fc = f(c);
            if fc < best_f {
                best_f = fc;
                best = c;
            }
        }
        best
    }

    /// Oracle projection: eigen-basis clamp at the golden-section ν.
    pub(crate) fn oracle_project(y: &SymmetricMatrix<f64>, kappa: f64) -> SymmetricMatrix<f64> {
        let eig = y.sym_eig().unwrap();
        let nu = golden_section_nu(eig.eigenvalues(), kappa);
        let spectrum: Vec<f64> =
            eig.eigenvalues().iter().map(|&v| v.clamp(nu, kappa * nu)).collect();
        eig.recombine(&spectrum)
    }

    /// The published case-split scan (positive-part numerator in the
    /// all-indefinite case): kept in tests to document where it diverges
    /// from the true projection.
    fn literal_case_nu(g: &[f64], kappa: f64) -> f64 {
        let p = g.len();
        let s = g.iter().filter(|&&v| v > 0.0).count(); // largest index with γ_s > 0 (1-based)
        let upper = if g[p - 1] > 0.0 { p } else { s };
        // Scan consistent (α, β) pairs against the truncated-numerator rule.
        for alpha in 0..=p {
            for beta in (alpha + 1)..=(p + 1) {
                let high: f64 = g[..alpha].iter().sum();
                let low: f64 = g[(beta - 1).min(upper)..upper].iter().sum();
                let denom = alpha as f64 * kappa * kappa + (p + 1 - beta) as f64;
                if denom == 0.0 {
                    continue;
                }
                let nu = (kappa * high + low) / denom;
                if nu <= 0.0 {
                    continue;
                }
                let alpha_ok = g.iter().filter(|&&v| v > kappa * nu).count() == alpha;
                let beta_ok = g.iter().filter(|&&v| v < nu).count() == p + 1 - beta;
                if alpha_ok && beta_ok {
                    return nu;
                }
            }
        }
        f64::NAN
    }

    #[test]
    fn fast_path_is_bit_identical() {
        let id = SymmetricMatrix::<f64>::identity(3);
        let r = project_cond(&id, 10.0).unwrap();
        assert!(r.unchanged);
        assert_eq!(r.projected.as_slice(), id.as_slice());
        assert_eq!(r.clipped_low + r.clipped_high, 0);
    }

    #[test]
    fn all_nonpositive_spectrum_projects_to_zero() {
        let d = SymmetricMatrix::from_diagonal(&[-1.0f64, -2.0]);
        for kappa in [1.0, 5.0, 1e6] {
            let r = project_cond(&d, kappa).unwrap();
            assert_eq!(r.projected.as_slice(), SymmetricMatrix::<f64>::zeros(2).as_slice());
            assert_eq!(r.nu_star, 0.0);
            assert!(!r.unchanged);
        }
    }

    #[test]
    fn worked_three_eigenvalue_example() {
        // diag(10, 5, 1) with κ = 5: one eigenvalue clipped from each end,
        // ν* = (10κ + 1)/(κ² + 1) = 51/26.
        let d = SymmetricMatrix::from_diagonal(&[10.0f64, 5.0, 1.0]);
        let r = project_cond(&d, 5.0).unwrap();
        let nu = 51.0 / 26.0;
        assert!((r.nu_star - nu).abs() < 1e-12);
        assert_eq!((r.alpha_star, r.beta_star), (1, 3));
        assert_eq!((r.clipped_high, r.clipped_low), (1, 1));
        let eig = r.projected.sym_eig().unwrap();
        let got = eig.eigenvalues();
        assert!((got[0] - 5.0 * nu).abs() < 1e-10);
        assert!((got[1] - 5.0).abs() < 1e-10);
        assert!((got[2] - nu).abs() < 1e-10);
    }

    #[test]
    fn dominant_negatives_force_zero_matrix() {
        // γ̂_1 > 0 but the derivative at ν = 0 is already nonnegative: the
        // optimum is the cone apex.
        let d = SymmetricMatrix::from_diagonal(&[0.1f64, -100.0]);
        let r = project_cond(&d, 2.0).unwrap();
        assert_eq!(r.projected.as_slice(), SymmetricMatrix::<f64>::zeros(2).as_slice());
        assert_eq!(r.nu_star, 0.0);
        let oracle = oracle_project(&d, 2.0);
        assert!(oracle.frobenius() < 1e-6);
    }

    #[test]
    fn matches_golden_section_oracle_on_random_inputs() {
        for seed in 0..30u64 {
            let y = pseudo_symmetric(6 + (seed as usize % 5), seed, 3.0);
            for kappa in [2.0, 10.0, 100.0] {
                let r = project_cond(&y, kappa).unwrap();
                let oracle = oracle_project(&y, kappa);
                let d = r.projected.frobenius_distance(&oracle);
                assert!(d <= 1e-7, "seed {seed} kappa {kappa}: distance {d}");
            }
        }
    }

    #[test]
    fn literal_scan_agrees_when_spectrum_positive() {
        // Definite spectra with an active constraint: the published scan and
        // the exact one coincide.
        for seed in 0..10u64 {
            let base = pseudo_symmetric(6, seed, 1.0);
            let shifted = base.add_scaled(&SymmetricMatrix::identity(6), 5.0);
            let eig = shifted.sym_eig().unwrap();
            if eig.min_eigenvalue() <= 0.0 {
                continue;
            }
            let kappa = 1.05;
            if eig.max_eigenvalue() / eig.min_eigenvalue() <= kappa {
                continue;
            }
            let lit = literal_case_nu(eig.eigenvalues(), kappa);
            let r = project_cond(&shifted, kappa).unwrap();
            assert!((lit - r.nu_star).abs() < 1e-9, "seed {seed}: {lit} vs {}", r.nu_star);
        }
    }

    #[test]
    fn literal_scan_diverges_with_negative_eigenvalues() {
        // Documented divergence: spectrum (10, −1), κ = 2. The truncated
        // numerator yields ν = 4 while the true projection sits at 3.8
        // (the −1 is clamped up to ν and belongs in the stationarity sum).
        let g = [10.0f64, -1.0];
        let lit = literal_case_nu(&g, 2.0);
        assert!((lit - 4.0).abs() < 1e-12);
        let d = SymmetricMatrix::from_diagonal(&g);
        let r = project_cond(&d, 2.0).unwrap();
        assert!((r.nu_star - 3.8).abs() < 1e-12);
        let oracle_nu = golden_section_nu(&g, 2.0);
        assert!((oracle_nu - 3.8).abs() < 1e-9, "oracle sides with the exact scan");
    }

    #[test]
    fn idempotent_and_nonexpansive() {
        for seed in 40..50u64 {
            let a = pseudo_symmetric(7, seed, 2.0);
            let b = pseudo_symmetric(7, seed + 1000, 2.0);
            let kappa = 8.0;
            let pa = project_cond(&a, kappa).unwrap().projected;
            let pb = project_cond(&b, kappa).unwrap().projected;
            let paa = project_cond(&pa, kappa).unwrap().projected;
            assert!(pa.frobenius_distance(&paa) <= 1e-10);
            assert!(pa.frobenius_distance(&pb) <= a.frobenius_distance(&b) + 1e-12);
        }
    }

    #[test]
    fn output_spectrum_sorted_and_feasible() {
        let y = pseudo_symmetric(9, 5, 4.0);
        let r = project_cond(&y, 3.0).unwrap();
        let eig = r.projected.sym_eig().unwrap();
        for w in eig.eigenvalues().windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
        let cond = condition_number(&r.projected).unwrap();
        assert!(cond <= 3.0 * (1.0 + 1e-8));
    }

    #[test]
    fn kappa_validation() {
        let id = SymmetricMatrix::<f64>::identity(2);
        assert!(project_cond(&id, 0.5).is_err());
        assert!(project_cond(&id, f64::NAN).is_err());
    }

    #[test]
    fn floor_projection_cases() {
        let d = SymmetricMatrix::from_diagonal(&[2.0f64, -1.0]);
        let out = project_floor(&d, 0.5).unwrap();
        let eig = out.sym_eig().unwrap();
        assert!((eig.eigenvalues()[0] - 2.0).abs() < 1e-12);
        assert!((eig.eigenvalues()[1] - 0.5).abs() < 1e-12);

        let pd = SymmetricMatrix::from_diagonal(&[2.0f64, 1.0]);
        assert_eq!(project_floor(&pd, 0.5).unwrap().as_slice(), pd.as_slice());
        assert!(project_floor(&pd, 0.0).is_err());
    }

    #[test]
    fn floor_matches_shift_trick_oracle() {
        // Independent route: floor(Y, τ) == psd-clip(Y − τI) + τI, where the
        // clip decomposes the *shifted* matrix. Checked at two tolerances.
        for seed in 0..5u64 {
            let y = pseudo_symmetric(8, seed + 100, 2.0);
            let tau = 0.3;
            let a = project_floor(&y, tau).unwrap();
            let shifted = y.add_scaled(&SymmetricMatrix::identity(8), -tau);
            let eig = shifted.sym_eig().unwrap();
            let clipped: Vec<f64> = eig.eigenvalues().iter().map(|&v| v.max(0.0)).collect();
            let b = eig.recombine(&clipped).add_scaled(&SymmetricMatrix::identity(8), tau);
            let d = a.frobenius_distance(&b);
            assert!(d < 1e-9, "seed {seed}: {d}");
            assert!(d < 1e-7);
        }
    }

    #[test]
    fn interval_projection_cases() {
        let d = SymmetricMatrix::from_diagonal(&[5.0f64, 1.0, 0.1]);
        let out = project_interval(&d, 0.5, 3.0).unwrap();
        let eig = out.sym_eig().unwrap();
        let got = eig.eigenvalues();
        assert!((got[0] - 3.0).abs() < 1e-12);
        assert!((got[1] - 1.0).abs() < 1e-12);
        assert!((got[2] - 0.5).abs() < 1e-12);

        let collapsed = project_interval(&d, 2.0, 2.0).unwrap();
        assert!(collapsed.frobenius_distance(&SymmetricMatrix::identity(3).scale(2.0)) < 1e-12);

        assert!(project_interval(&d, 3.0, 0.5).is_err());
        assert!(project_interval(&d, 0.0, 1.0).is_err());
    }

    #[test]
    fn interval_consistent_with_cond_projection_at_matching_bounds() {
        // When the interval endpoints are exactly (ν*, κν*) from the cone
        // projection, the two operators produce the same matrix.
        let y = SymmetricMatrix::from_diagonal(&[12.0f64, 7.0, 3.0, 0.4]);
        let kappa = 4.0;
        let r = project_cond(&y, kappa).unwrap();
        assert!(!r.unchanged);
        let via_interval = project_interval(&y, r.nu_star, kappa * r.nu_star).unwrap();
        assert!(r.projected.frobenius_distance(&via_interval) < 1e-12);
    }
}
