//! Fourier-mode operators on the excision circles. Every operator here is
//! diagonal in the basis f_{n,j} = e^{inθ} on the j-th circle.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Basis index f_{n,j}: Fourier mode n on circle j (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ModeIndex {
    pub n: i64,
    pub j: usize,
}

impl ModeIndex {
    pub fn new(n: i64, j: usize) -> Self {
        Self { n, j }
    }

    fn nonconstant(self) -> Result<Self> {
        if self.n == 0 {
            Err(Error::InvalidMode { n: 0 })
        } else {
            Ok(self)
        }
    }
}

/// Which part of the boundary data an operator lives on: L₀² is the span of
/// the nonconstant modes, 𝒞 the locally constant functions with zero mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subspace {
    L0,
    ConstAndL0,
    Full,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0,1), got {eps}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// ln(1/ε).
pub(crate) fn log_inv(eps: f64) -> f64 {
    -eps.ln()
}

/// T_ε = (ε^{n/α} − ε^{−n/α}) / (ε^{n/α} + ε^{−n/α}).
pub fn t_eps(idx: ModeIndex, eps: f64, alpha: f64) -> Result<f64> {
    let idx = idx.nonconstant()?;
    check_eps(eps)?;
    check_alpha(alpha)?;
    Ok(-(idx.n as f64 / alpha * log_inv(eps)).tanh())
}

/// U⁻_ε = ½(ε^{n/α} − ε^{−n/α}).
pub fn u_eps_minus(idx: ModeIndex, eps: f64, alpha: f64) -> Result<f64> {
    let idx = idx.nonconstant()?;
    check_eps(eps)?;
    check_alpha(alpha)?;
    Ok(-(idx.n as f64 / alpha * log_inv(eps)).sinh())
}

/// 𝒱 = n/α.
pub fn mode_mult(idx: ModeIndex, alpha: f64) -> Result<f64> {
    let idx = idx.nonconstant()?;
    check_alpha(alpha)?;
    Ok(idx.n as f64 / alpha)
}

/// |𝒱| = |n|/α.
pub fn abs_mode_mult(idx: ModeIndex, alpha: f64) -> Result<f64> {
    Ok(mode_mult(idx, alpha)?.abs())
}

/// B̄ f_{n,j} = b_j f_{n,j}.
pub fn b_mult(idx: ModeIndex, bs: &[f64]) -> Result<f64> {
    bs.get(idx.j.wrapping_sub(1))
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("circle index {} outside 1..={}", idx.j, bs.len())))
}

/// Dirichlet-to-Neumann map of the small cone C_{α,bε}: −|n|/(bεα), and 0
/// on constants.
pub fn p_cone_mode(idx: ModeIndex, eps: f64, bs: &[f64], alphas: &[f64]) -> Result<f64> {
    check_eps(eps)?;
    let b = b_mult(idx, bs)?;
    let alpha = alphas[idx.j - 1];
    check_alpha(alpha)?;
    if idx.n == 0 {
        return Ok(0.0);
    }
    Ok(-(idx.n.unsigned_abs() as f64) / (b * eps * alpha))
}

/// x = ε^{2ν} with ν = |n|/α, computed through exp for small powers.
fn pow_eps(eps: f64, nu: f64) -> f64 {
    (-nu * log_inv(eps)).exp()
}

/// Eigenvalue of |𝒱| + 𝒱T_ε⁻¹: (2|n|/α)/(1 − ε^{−2|n|/α}).
pub fn k_diag_eigen(idx: ModeIndex, eps: f64, alpha: f64) -> Result<f64> {
    let nu = abs_mode_mult(idx, alpha)?;
    check_eps(eps)?;
    let x = pow_eps(eps, 2.0 * nu);
    // 1/(1 − 1/x) = −x/(1 − x)
    Ok(-2.0 * nu * x / (1.0 - x))
}

/// The coupling family n/(α(ε^{n/α} − ε^{−n/α})), even in n. Because U⁻_ε
/// carries a factor ½, the eigenvalue of 𝒱(U⁻_ε)⁻¹ itself is twice this.
pub fn k_coupling_eigen(idx: ModeIndex, eps: f64, alpha: f64) -> Result<f64> {
    let nu = abs_mode_mult(idx, alpha)?;
    check_eps(eps)?;
    let y = pow_eps(eps, nu);
    Ok(-nu * y / (1.0 - y * y))
}

type EvalFn = dyn Fn(ModeIndex) -> Result<f64> + Send + Sync;

/// A diagonal operator: a rule giving the eigenvalue of each f_{n,j}.
#[derive(Clone)]
pub struct DiagonalModeOperator {
    pub name: &'static str,
    pub subspace: Subspace,
    pub circles: usize,
    eval: Arc<EvalFn>,
}

impl std::fmt::Debug for DiagonalModeOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiagonalModeOperator")
            .field("name", &self.name)
            .field("subspace", &self.subspace)
            .field("circles", &self.circles)
            .finish()
    }
}

impl DiagonalModeOperator {
    pub fn new<F>(name: &'static str, subspace: Subspace, circles: usize, eval: F) -> Self
    where
        F: Fn(ModeIndex) -> Result<f64> + Send + Sync + 'static,
    {
        Self { name, subspace, circles, eval: Arc::new(eval) }
    }

    pub fn eval(&self, idx: ModeIndex) -> Result<f64> {
        if idx.j == 0 || idx.j > self.circles {
            return Err(Error::InvalidArgument(format!("circle index {} outside 1..={}", idx.j, self.circles)));
        }
        if self.subspace == Subspace::L0 && idx.n == 0 {
            return Err(Error::InvalidMode { n: 0 });
        }
        let v = (self.eval)(idx)?;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("{} is not finite at {idx:?}", self.name)));
        }
        Ok(v)
    }

    pub fn t_eps(eps: f64, alphas: Vec<f64>) -> Self {
        Self::new("T_eps", Subspace::L0, alphas.len(), move |i| t_eps(i, eps, alphas[i.j - 1]))
    }

    pub fn u_eps_minus(eps: f64, alphas: Vec<f64>) -> Self {
        Self::new("U_eps_minus", Subspace::L0, alphas.len(), move |i| u_eps_minus(i, eps, alphas[i.j - 1]))
    }

    pub fn mode_mult(alphas: Vec<f64>) -> Self {
        Self::new("V", Subspace::L0, alphas.len(), move |i| mode_mult(i, alphas[i.j - 1]))
    }

    pub fn abs_mode_mult(alphas: Vec<f64>) -> Self {
        Self::new("abs_V", Subspace::L0, alphas.len(), move |i| abs_mode_mult(i, alphas[i.j - 1]))
    }

    pub fn b_mult(bs: Vec<f64>) -> Self {
        Self::new("B_bar", Subspace::Full, bs.len(), move |i| b_mult(i, &bs))
    }

    /// Mode table with header `n,j,eigenvalue` for −n_max ≤ n ≤ n_max.
    pub fn to_csv(&self, n_max: i64) -> Result<String> {
        let mut out = String::from("n,j,eigenvalue\n");
        for j in 1..=self.circles {
            for n in -n_max..=n_max {
                if n == 0 && self.subspace == Subspace::L0 {
                    continue;
                }
                let v = self.eval(ModeIndex::new(n, j))?;
                let _ = writeln!(out, "{n},{j},{v:.17e}");
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(n: i64) -> ModeIndex {
        ModeIndex::new(n, 1)
    }

    #[test]
    fn defining_formulas() {
        assert_eq!(mode_mult(i(2), 1.0).unwrap(), 2.0);
        assert_eq!(abs_mode_mult(i(-3), 1.5).unwrap(), 2.0);
        let t = t_eps(i(1), 0.1, 1.0).unwrap();
        assert!((t - (0.1 - 10.0) / (0.1 + 10.0)).abs() < 1e-15);
        assert!((u_eps_minus(i(1), 0.1, 1.0).unwrap() + 4.95).abs() < 1e-13);
        assert_eq!(b_mult(ModeIndex::new(5, 2), &[0.3, 0.7]).unwrap(), 0.7);
    }

    #[test]
    fn cone_map_examples() {
        assert!((p_cone_mode(i(1), 0.1, &[1.0], &[1.0]).unwrap() + 10.0).abs() < 1e-12);
        assert_eq!(p_cone_mode(i(0), 0.1, &[1.0], &[1.0]).unwrap(), 0.0);
        assert!((p_cone_mode(i(-3), 0.5, &[1.0], &[3.0]).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_families() {
        let e2 = k_diag_eigen(i(1), 0.1, 1.0).unwrap();
        assert!((e2 - 2.0 / (1.0 - 100.0)).abs() < 1e-15);
        let e1 = k_coupling_eigen(i(1), 0.1, 1.0).unwrap();
        assert!((e1 - 1.0 / (0.1 - 10.0)).abs() < 1e-15);
        assert_eq!(k_coupling_eigen(i(-1), 0.1, 1.0).unwrap(), e1);
        // evalstwo as |𝒱| + 𝒱/T
        for n in [-4i64, -1, 1, 3] {
            let direct = abs_mode_mult(i(n), 1.3).unwrap() + mode_mult(i(n), 1.3).unwrap() / t_eps(i(n), 0.2, 1.3).unwrap();
            assert!((direct - k_diag_eigen(i(n), 0.2, 1.3).unwrap()).abs() < 1e-13);
            let coupling = mode_mult(i(n), 1.3).unwrap() / u_eps_minus(i(n), 0.2, 1.3).unwrap();
            assert!((coupling - 2.0 * k_coupling_eigen(i(n), 0.2, 1.3).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_mode_rejected_on_l0() {
        assert_eq!(t_eps(i(0), 0.1, 1.0), Err(Error::InvalidMode { n: 0 }));
        assert_eq!(k_diag_eigen(i(0), 0.1, 1.0), Err(Error::InvalidMode { n: 0 }));
        let op = DiagonalModeOperator::t_eps(0.1, vec![1.0]);
        assert_eq!(op.eval(i(0)), Err(Error::InvalidMode { n: 0 }));
        assert!(op.eval(ModeIndex::new(1, 2)).is_err());
        assert!(DiagonalModeOperator::b_mult(vec![0.5]).eval(i(0)).is_ok());
    }

    #[test]
    fn csv_table() {
        let csv = DiagonalModeOperator::mode_mult(vec![1.0]).to_csv(2).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,j,eigenvalue");
        assert_eq!(lines.len(), 5);
    }
}
