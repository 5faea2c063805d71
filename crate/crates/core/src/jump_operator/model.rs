//! The computable model: M = C_{α,1} with a Dirichlet wall at r = 1 and one
//! excision circle r = ε (k = 1, b = 1). Harmonic extensions are explicit in
//! r^{±ν} and log r, so R_ε is diagonal:
//!
//! * n ≠ 0, ν = |n|/α: εμ_n = 2ν/(1 − ε^{2ν});
//! * n = 0: εμ_0 = 1/log(1/ε).
//!
//! There is no constant kernel, so the n = 0 mode is part of the operator.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::adet::{logdet_a_eps, regularized_linear_logdet};
use super::bounds::{comeback_bound, norm_a_inv_single, norm_k_a_inv, root_bound, trace_norm_k, TAIL_TARGET};
use super::modes::{log_inv, ModeIndex};
use super::provider::ModelProvider;
use crate::error::{Error, Result};
use crate::specfun::gamma::ZETA_AT_0;

fn check(eps: f64, alpha: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0,1), got {eps}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// ε^{2ν} for mode n.
fn x_n(eps: f64, alpha: f64, n: u64) -> f64 {
    (-2.0 * n as f64 / alpha * log_inv(eps)).exp()
}

/// Eigenvalue μ_n of R_ε in the model (positive orientation).
pub fn model_r_eigen(idx: ModeIndex, eps: f64, alpha: f64) -> Result<f64> {
    check(eps, alpha)?;
    if idx.j != 1 {
        return Err(Error::InvalidArgument(format!("the model has one circle, got j = {}", idx.j)));
    }
    if idx.n == 0 {
        return Ok(1.0 / (eps * log_inv(eps)));
    }
    let nu = idx.n.unsigned_abs() as f64 / alpha;
    let x = x_n(eps, alpha, idx.n.unsigned_abs());
    Ok(2.0 * nu / (eps * (1.0 - x)))
}

/// Model asymptote of log det R_ε: log(πα) − log log(1/ε).
pub fn model_asymptote(eps: f64, alpha: f64) -> f64 {
    (std::f64::consts::PI * alpha).ln() - log_inv(eps).ln()
}

/// ζ_{R_ε}(0) of the full model operator: 2ζ_R(0) from the nonconstant
/// modes plus one for the n = 0 eigenvalue, i.e. 0.
pub fn model_zeta_at_zero() -> f64 {
    2.0 * ZETA_AT_0 + 1.0
}

/// ζ_{R_ε}(0) on the nonconstant modes L₀², where the constant mode is the
/// kernel of the closed-surface operator: −1.
pub fn zeta_r_at_zero() -> f64 {
    -1.0
}

/// The determinant assembly for the model. JSON keys are the six public
/// fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelDeterminant {
    pub logdet_eps_r: f64,
    pub logdet_r: f64,
    pub logdet_a: f64,
    pub residual: f64,
    pub comeback_bound: f64,
    pub paper_bound: f64,
    #[serde(skip)]
    pub eps: f64,
    #[serde(skip)]
    pub alpha: f64,
    #[serde(skip)]
    pub modes: usize,
    /// Whether ε ≤ 2^{−α}, where the explicit bounds are proven.
    #[serde(skip)]
    pub in_regime: bool,
}

impl ModelDeterminant {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }
}

/// Σ_{n≥1} −2 log(1 − ε^{2n/α}) with a certified geometric tail.
fn correction_sum(eps: f64, alpha: f64, mode_cutoff: usize) -> Result<f64> {
    let head: f64 = (1..=mode_cutoff as u64).rev().map(|n| -2.0 * (-x_n(eps, alpha, n)).ln_1p()).sum();
    // −log(1 − x) ≤ x/(1 − x) ≤ rⁿ/(1 − r), r = ε^{2/α}
    let r = x_n(eps, alpha, 1);
    let tail = 2.0 * r.powf(mode_cutoff as f64 + 1.0) / ((1.0 - r) * (1.0 - r));
    if tail > TAIL_TARGET * head && tail > f64::MIN_POSITIVE {
        return Err(Error::IncreaseCutoff { modes: mode_cutoff, target: TAIL_TARGET });
    }
    Ok(head)
}

/// log det R_ε for the model.
///
/// εR_ε on the nonconstant modes has eigenvalues 2ν·(1 − ε^{2ν})⁻¹: the
/// regularized Σ log 2ν is log(πα) from ζ_R special values, and the factors
/// (1 − ε^{2ν})⁻¹ give a convergent sum. The n = 0 eigenvalue contributes
/// −log log(1/ε). The full operator has ζ(0) = 0, so unscaling by ε leaves
/// the determinant unchanged.
pub fn logdet_model_r(eps: f64, alpha: f64, mode_cutoff: usize) -> Result<ModelDeterminant> {
    check(eps, alpha)?;
    let correction = correction_sum(eps, alpha, mode_cutoff)?;
    let l0 = regularized_linear_logdet(alpha) + correction;
    let constant_mode = -log_inv(eps).ln();
    let logdet_eps_r = l0 + constant_mode;
    let logdet_r = logdet_eps_r - model_zeta_at_zero() * eps.ln();
    // A_ε on L₀² is the single-circle operator; the n = 0 entry of εR_ε is
    // already diagonal and belongs to A.
    let logdet_a = logdet_a_eps(eps, &[alpha], &[1.0])? + constant_mode;
    let trace = trace_norm_k(eps, &[alpha], &[1.0], mode_cutoff, &ModelProvider)?;
    let q = norm_k_a_inv(eps, &[alpha], &[1.0], &ModelProvider)?;
    Ok(ModelDeterminant {
        logdet_eps_r,
        logdet_r,
        logdet_a,
        residual: logdet_eps_r - logdet_a,
        comeback_bound: comeback_bound(norm_a_inv_single(alpha), trace, q),
        paper_bound: root_bound(eps, alpha),
        eps,
        alpha,
        modes: mode_cutoff,
        in_regime: eps <= 2f64.powf(-alpha),
    })
}

/// Numerical ζ(0) of the model operator by heat-trace continuation:
/// θ(t) = Σ e^{−tεμ_n} is fitted on small t by c₋₁/t + c₀ + c₁t + c₂t² + c₃t³
/// and c₀ is returned with a spread-based error estimate. ζ(0) does not
/// depend on the overall scale, so εR_ε is used.
pub fn model_zeta_at_zero_numeric(eps: f64, alpha: f64, include_constant_mode: bool) -> Result<(f64, f64)> {
    check(eps, alpha)?;
    let spacing = 2.0 / alpha;
    let fit = |tau_lo: f64, tau_hi: f64| -> Result<f64> {
        let modes = (45.0 / tau_lo).ceil() as u64 + 1;
        let evals: Vec<f64> = (1..=modes)
            .map(|n| 2.0 * (n as f64 / alpha) / (1.0 - x_n(eps, alpha, n)))
            .collect();
        let npts = 40;
        let taus: Vec<f64> = (0..npts)
            .map(|i| tau_lo * (tau_hi / tau_lo).powf(i as f64 / (npts - 1) as f64))
            .collect();
        let theta = |tau: f64| -> f64 {
            let t = tau / spacing;
            let mut s: f64 = evals.iter().rev().map(|l| 2.0 * (-t * l).exp()).sum();
            if include_constant_mode {
                s += (-t / log_inv(eps)).exp();
            }
            s
        };
        let design = DMatrix::from_fn(npts, 5, |i, j| taus[i].powi(j as i32 - 1));
        let rhs = DVector::from_iterator(npts, taus.iter().map(|&tau| theta(tau)));
        let c = design
            .svd(true, true)
            .solve(&rhs, 1e-300)
            .map_err(|e| Error::Numeric(format!("zeta(0) fit failed: {e}")))?;
        Ok(c[1])
    };
    let a = fit(0.005, 0.05)?;
    let b = fit(0.0025, 0.025)?;
    Ok((a, (a - b).abs() + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalue_examples() {
        let m = model_r_eigen(ModeIndex::new(1, 1), 0.1, 1.0).unwrap();
        assert!((0.1 * m - (1.0 - 10.1 / (0.1 - 10.0))).abs() < 1e-13);
        let e = (-1.0f64).exp();
        assert!((e * model_r_eigen(ModeIndex::new(0, 1), e, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let small = 1e-8 * model_r_eigen(ModeIndex::new(3, 1), 1e-8, 1.5).unwrap();
        assert!((small - 2.0 * 3.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_positive_and_decreasing_in_eps() {
        // εμ₀ = 1/log(1/ε) means μ₀ is smallest at ε = 1/e, so monotonicity
        // holds for every mode only below 1/e
        for n in [-3i64, 0, 1, 5] {
            let mut prev = f64::INFINITY;
            for eps in [0.01, 0.05, 0.1, 0.2, 0.3, 0.36] {
                let v = model_r_eigen(ModeIndex::new(n, 1), eps, 1.7).unwrap();
                assert!(v > 0.0 && v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn constant_mode_turns_around_at_inverse_e() {
        let at = |eps: f64| model_r_eigen(ModeIndex::new(0, 1), eps, 1.0).unwrap();
        assert!(at(0.6) > at(0.4));
    }

    #[test]
    fn zeta_at_zero_numeric() {
        for (alpha, eps) in [(1.0, 0.1), (2.0, 0.05), (0.7, 0.4)] {
            let (z, err) = model_zeta_at_zero_numeric(eps, alpha, false).unwrap();
            assert!((z + 1.0).abs() < 1e-6, "alpha={alpha} eps={eps} z={z} err={err}");
            let (z, _) = model_zeta_at_zero_numeric(eps, alpha, true).unwrap();
            assert!(z.abs() < 1e-6);
        }
    }

    #[test]
    fn unit_disk_assembly() {
        let d = logdet_model_r(0.25, 1.0, 60).unwrap();
        assert!(d.residual > 0.0);
        assert!(d.residual <= d.comeback_bound);
        assert!(d.comeback_bound <= d.paper_bound);
        assert_eq!(d.logdet_r, d.logdet_eps_r);
        let json = d.to_json();
        for key in ["logdet_eps_r", "logdet_r", "logdet_a", "residual", "comeback_bound", "paper_bound"] {
            assert!(json.contains(key));
        }
        assert!(!json.contains("modes"));
    }
}
