//! Trace-norm and operator-norm bounds for the perturbation K_ε in
//! εR_ε = A_ε + K_ε, assembled mode by mode with certified geometric tails.

use super::modes::{k_coupling_eigen, k_diag_eigen, log_inv, ModeIndex};
use super::provider::ExtensionProvider;
use crate::error::{Error, Result};

/// Relative size below which a truncated mode sum counts as converged.
pub const TAIL_TARGET: f64 = 1e-14;

/// Mode cutoff N = ⌈40 α_max / log(1/ε)⌉ + 2, so that ε^{N/α} < e^{−40}.
pub fn default_mode_cutoff(eps: f64, alphas: &[f64]) -> usize {
    let amax = alphas.iter().cloned().fold(0.0, f64::max);
    (40.0 * amax / log_inv(eps)).ceil() as usize + 2
}

/// Σ_{n>N} c·n·rⁿ in closed form.
fn linear_geometric_tail(c: f64, r: f64, n: usize) -> f64 {
    let nf = n as f64;
    c * r.powf(nf + 1.0) * ((nf + 1.0) - nf * r) / ((1.0 - r) * (1.0 - r))
}

fn validate(eps: f64, alphas: &[f64], bs: &[f64]) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0,1), got {eps}")));
    }
    if alphas.is_empty() || alphas.len() != bs.len() {
        return Err(Error::InvalidArgument("need one radius scale per cone angle".into()));
    }
    if alphas.iter().chain(bs).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("cone angles and radius scales must be positive".into()));
    }
    Ok(())
}

/// Tr|K_ε| (an upper bound when the provider is not the model).
///
/// On L₀² the |𝒱| + 𝒱T⁻¹ part is diagonal and counted exactly; the
/// 𝒱(U⁻)⁻¹L part contributes at most ‖L‖·Σ|𝒱(U⁻)⁻¹|, whose eigenvalues are
/// twice the `k_coupling_eigen` family. The finite-rank blocks touching 𝒞
/// contribute (k−1)‖L‖(2/log(1/ε) + sup|𝒱(U⁻)⁻¹|). Everything is divided by
/// b_j (diagonal part) or b_min (the rest) to undo B.
pub fn trace_norm_k(
    eps: f64,
    alphas: &[f64],
    bs: &[f64],
    mode_cutoff: usize,
    provider: &dyn ExtensionProvider,
) -> Result<f64> {
    validate(eps, alphas, bs)?;
    let l = provider.norm_bound();
    let k = alphas.len();
    let bmin = bs.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut diag = 0.0;
    let mut coupling = 0.0;
    let mut coupling_sup: f64 = 0.0;
    let mut tail = 0.0;
    for (j, (&a, &b)) in alphas.iter().zip(bs).enumerate() {
        let mut d = 0.0;
        let mut c = 0.0;
        for n in (1..=mode_cutoff as i64).rev() {
            let idx = ModeIndex::new(n, j + 1);
            d += 2.0 * k_diag_eigen(idx, eps, a)?.abs();
            let e1 = 2.0 * k_coupling_eigen(idx, eps, a)?.abs();
            c += 2.0 * e1;
            coupling_sup = coupling_sup.max(e1);
        }
        diag += d / b;
        coupling += c;
        let y = eps.powf(1.0 / a);
        // |evalstwo| ≤ (2n/α) y^{2n}/(1 − y²), |𝒱(U⁻)⁻¹| ≤ (2n/α) yⁿ/(1 − y²), both for ±n
        tail += 2.0 * linear_geometric_tail(2.0 / (a * (1.0 - y * y)), y * y, mode_cutoff) / b;
        if l > 0.0 {
            tail += 2.0 * l * linear_geometric_tail(2.0 / (a * (1.0 - y * y)), y, mode_cutoff) / bmin;
        }
    }
    let l0 = diag + l * coupling / bmin;
    let finite_rank = if k > 1 {
        (k as f64 - 1.0) * l * (2.0 / log_inv(eps) + coupling_sup) / bmin
    } else {
        0.0
    };
    let head = l0 + finite_rank;
    if tail > TAIL_TARGET * head && tail > f64::MIN_POSITIVE {
        return Err(Error::IncreaseCutoff { modes: mode_cutoff, target: TAIL_TARGET });
    }
    Ok(head + tail)
}

/// Upper bound on ‖K_εA_ε⁻¹‖ from the four blocks of BK_εA_ε⁻¹B⁻¹, each
/// bounded by the supremum of its per-mode magnitudes, then conjugated back
/// by B (factor b_max/b_min).
pub fn norm_k_a_inv(eps: f64, alphas: &[f64], bs: &[f64], provider: &dyn ExtensionProvider) -> Result<f64> {
    validate(eps, alphas, bs)?;
    let l = provider.norm_bound();
    let k = alphas.len();
    let amax = alphas.iter().cloned().fold(0.0, f64::max);
    let bmin = bs.iter().cloned().fold(f64::INFINITY, f64::min);
    let bmax = bs.iter().cloned().fold(0.0, f64::max);
    let log_inv_eps = log_inv(eps);
    let cutoff = default_mode_cutoff(eps, alphas);

    // |evalstwo|/ν = 2x/(1 − x) is largest at n = 1; sup|𝒱(U⁻)⁻¹| is found by scanning
    let mut diag_sup: f64 = 0.0;
    let mut coupling_sup: f64 = 0.0;
    for (j, &a) in alphas.iter().enumerate() {
        let idx = ModeIndex::new(1, j + 1);
        diag_sup = diag_sup.max(k_diag_eigen(idx, eps, a)?.abs() * a);
        for n in 1..=cutoff as i64 {
            coupling_sup = coupling_sup.max(2.0 * k_coupling_eigen(ModeIndex::new(n, j + 1), eps, a)?.abs());
        }
    }
    let mut bound = 0.5 * (diag_sup + l * coupling_sup * amax);
    if k > 1 {
        bound += 0.5 * l * amax / log_inv_eps + log_inv_eps * coupling_sup * l + l;
    }
    Ok(bound * bmax / bmin)
}

/// ‖A_ε⁻¹‖ on L₀² when k = 1, b = 1: α/2.
pub fn norm_a_inv_single(alpha: f64) -> f64 {
    alpha / 2.0
}

/// The right-hand side of the comparison estimate
/// ‖A⁻¹‖ · Tr|K| / (1 − ‖KA⁻¹‖); infinite when ‖KA⁻¹‖ ≥ 1.
pub fn comeback_bound(norm_a_inv: f64, trace_k: f64, norm_ka_inv: f64) -> f64 {
    if norm_ka_inv >= 1.0 {
        f64::INFINITY
    } else {
        norm_a_inv * trace_k / (1.0 - norm_ka_inv)
    }
}

/// 6ε^{1/α}.
pub fn root_bound(eps: f64, alpha: f64) -> f64 {
    6.0 * eps.powf(1.0 / alpha)
}
