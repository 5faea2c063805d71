//! Determinant of the diagonal part A_ε, including the finite matrix B̂ on
//! the locally constant functions.

use super::modes::log_inv;
use crate::error::{Error, Result};
use crate::specfun::gamma::{ZETA_AT_0, ZETA_PRIME_AT_0};

/// The (k−1)×(k−1) matrix with entries (b_k − b_j)/k + b_j δ_ij.
pub fn bhat_matrix(bs: &[f64]) -> Vec<Vec<f64>> {
    let k = bs.len();
    let bk = bs[k - 1];
    (0..k - 1)
        .map(|i| (0..k - 1).map(|j| (bk - bs[j]) / k as f64 + if i == j { bs[j] } else { 0.0 }).collect())
        .collect()
}

/// log det B̂ by Gaussian elimination with partial pivoting.
pub fn bhat_logdet(bs: &[f64]) -> Result<f64> {
    if bs.len() < 2 {
        return Err(Error::InvalidArgument("B-hat needs at least two circles".into()));
    }
    if bs.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
        return Err(Error::InvalidArgument("radius scales must be positive".into()));
    }
    let mut m = bhat_matrix(bs);
    let n = m.len();
    let mut log_det = 0.0;
    let mut negative = false;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty range");
        if m[pivot][col] == 0.0 {
            return Err(Error::Numeric("B-hat is singular".into()));
        }
        if pivot != col {
            m.swap(pivot, col);
            negative = !negative;
        }
        let p = m[col][col];
        if p < 0.0 {
            negative = !negative;
        }
        log_det += p.abs().ln();
        for row in col + 1..n {
            let (top, bottom) = m.split_at_mut(row);
            let (pivot, target) = (&top[col], &mut bottom[0]);
            let f = target[col] / p;
            for (t, &v) in target[col..].iter_mut().zip(&pivot[col..]) {
                *t -= f * v;
            }
        }
    }
    if negative {
        return Err(Error::Numeric("B-hat has negative determinant".into()));
    }
    Ok(log_det)
}

/// Regularized log det of the spectrum {2m/c : m ≥ 1}, each twice, from the
/// Riemann-zeta special values: 2 log(2/c) ζ(0) − 2ζ′(0) = log(πc).
pub(crate) fn regularized_linear_logdet(c: f64) -> f64 {
    2.0 * (2.0 / c).ln() * ZETA_AT_0 - 2.0 * ZETA_PRIME_AT_0
}

/// log det A_ε = −(k−1) log log(1/ε) + Σ log(π b_i α_i) − log β.
pub fn logdet_a_eps(eps: f64, alphas: &[f64], bs: &[f64]) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0,1), got {eps}")));
    }
    if alphas.is_empty() || alphas.len() != bs.len() {
        return Err(Error::InvalidArgument("need one radius scale per cone angle".into()));
    }
    let k = alphas.len();
    let l0: f64 = alphas.iter().zip(bs).map(|(a, b)| regularized_linear_logdet(a * b)).sum();
    if k == 1 {
        return Ok(l0);
    }
    // on 𝒞: eigenvalues of B̂⁻¹ times −1/log(1/ε), absolute values taken
    let constants = -bhat_logdet(bs)? - (k as f64 - 1.0) * log_inv(eps).ln();
    Ok(l0 + constants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::beta;
    use std::f64::consts::PI;

    #[test]
    fn bhat_examples() {
        assert!(bhat_logdet(&[1.0, 1.0, 1.0]).unwrap().abs() < 1e-15);
        assert!((bhat_logdet(&[0.5, 1.0]).unwrap() - 0.75f64.ln()).abs() < 1e-15);
        let bs = [0.3, 0.9, 0.55, 0.7];
        assert!((bhat_logdet(&bs).unwrap() - beta(&bs).unwrap().ln()).abs() < 1e-12);
    }

    #[test]
    fn a_eps_examples() {
        assert!((logdet_a_eps(0.3, &[1.0], &[1.0]).unwrap() - PI.ln()).abs() < 1e-14);
        let e = (-std::f64::consts::E).exp();
        assert!((logdet_a_eps(e, &[1.0, 1.0], &[1.0, 1.0]).unwrap() - (2.0 * PI.ln() - 1.0)).abs() < 1e-14);
        assert!((logdet_a_eps(0.01, &[2.0], &[1.0]).unwrap() - (2.0 * PI).ln()).abs() < 1e-14);
    }
}
