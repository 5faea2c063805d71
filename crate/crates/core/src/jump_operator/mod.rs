//! The Neumann jump operator R_ε, mode by mode.
//!
//! Boundary data on the excision circles split as 𝒦 ⊕ 𝒞 ⊕ L₀² (global
//! constants, locally constant functions with zero mean, nonconstant modes).
//! On 𝒞 ⊕ L₀² one has εR_ε = A_ε + K_ε with A_ε diagonal and K_ε small; this
//! module provides the diagonal pieces, the determinant of A_ε, bounds on
//! K_ε, and the explicit model in which every piece is computable.

mod adet;
mod bounds;
mod model;
mod modes;
mod provider;

pub use adet::{bhat_logdet, bhat_matrix, logdet_a_eps};
pub use bounds::{
    comeback_bound, default_mode_cutoff, norm_a_inv_single, norm_k_a_inv, root_bound, trace_norm_k,
    TAIL_TARGET,
};
pub use model::{
    logdet_model_r, model_asymptote, model_r_eigen, model_zeta_at_zero, model_zeta_at_zero_numeric,
    zeta_r_at_zero, ModelDeterminant,
};
pub use modes::{
    abs_mode_mult, b_mult, k_coupling_eigen, k_diag_eigen, mode_mult, p_cone_mode, t_eps, u_eps_minus,
    DiagonalModeOperator, ModeIndex, Subspace,
};
pub use provider::{check_contract, mode_norm, ContractionProvider, ExtensionProvider, ModeVector, ModelProvider};

/// Where K_ε comes from: diagonal in the model, through a provider otherwise.
#[derive(Clone)]
pub enum KPart {
    Diagonal(DiagonalModeOperator),
    Provider(std::sync::Arc<dyn ExtensionProvider>),
}

/// εR_ε = A_ε + K_ε on 𝒞 ⊕ L₀².
#[derive(Clone)]
pub struct BlockDecomposition {
    pub a_part: DiagonalModeOperator,
    pub k_part: KPart,
}

impl BlockDecomposition {
    /// The k = 1, b = 1 decomposition for the model: A_ε = −2|𝒱| on L₀² and
    /// −1/log(1/ε) on the n = 0 mode; K_ε = |𝒱| + 𝒱T_ε⁻¹. Signs follow the
    /// decomposition; determinants use absolute values.
    pub fn model(eps: f64, alpha: f64) -> Self {
        let a_part = DiagonalModeOperator::new("A_eps", Subspace::Full, 1, move |i| {
            if i.n == 0 {
                Ok(-1.0 / (-eps.ln()))
            } else {
                Ok(-2.0 * abs_mode_mult(i, alpha)?)
            }
        });
        let k_part = DiagonalModeOperator::new("K_eps", Subspace::Full, 1, move |i| {
            if i.n == 0 {
                Ok(0.0)
            } else {
                k_diag_eigen(i, eps, alpha)
            }
        });
        Self { a_part, k_part: KPart::Diagonal(k_part) }
    }

    /// |A + K| at one mode, when K is diagonal.
    pub fn eps_r_eigen(&self, idx: ModeIndex) -> crate::Result<f64> {
        match &self.k_part {
            KPart::Diagonal(k) => Ok((self.a_part.eval(idx)? + k.eval(idx)?).abs()),
            KPart::Provider(_) => Err(crate::Error::InvalidArgument(
                "eigenvalues are only available for a diagonal K part".into(),
            )),
        }
    }
}
