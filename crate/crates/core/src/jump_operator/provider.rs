//! Suppliers of the extension map L_ε: boundary data on the excision circles
//! ↦ restriction to Γ₁ of its harmonic extension. The contract is
//! ‖L_ε‖ ≤ 1, invariance of 𝒞 ⊕ L₀², and the identity on global constants.

use std::collections::BTreeMap;

use super::modes::ModeIndex;
use crate::error::{Error, Result};

/// Boundary data as coefficients of f_{n,j}.
pub type ModeVector = BTreeMap<ModeIndex, f64>;

pub trait ExtensionProvider: Send + Sync {
    fn name(&self) -> &'static str;

    /// Upper bound on ‖L_ε‖ restricted to 𝒞 ⊕ L₀².
    fn norm_bound(&self) -> f64;

    fn apply(&self, data: &ModeVector) -> ModeVector;
}

/// L² norm with the f_{n,j} treated as orthonormal.
pub fn mode_norm(v: &ModeVector) -> f64 {
    v.values().map(|c| c * c).sum::<f64>().sqrt()
}

/// Split off the global-constant part (equal n = 0 coefficients on all k circles).
fn global_constant(data: &ModeVector, k: usize) -> f64 {
    let s: f64 = data.iter().filter(|(i, _)| i.n == 0).map(|(_, c)| c).sum();
    s / k as f64
}

fn circles(data: &ModeVector) -> usize {
    data.keys().map(|i| i.j).max().unwrap_or(1)
}

/// The computable model: M is the unit cone with a Dirichlet wall at r = 1,
/// so u₊ vanishes on Γ₁ and L_ε ≡ 0. The model has no constant kernel.
#[derive(Debug, Clone, Copy, Default)]
pub struct ModelProvider;

impl ExtensionProvider for ModelProvider {
    fn name(&self) -> &'static str {
        "model"
    }

    fn norm_bound(&self) -> f64 {
        0.0
    }

    fn apply(&self, _data: &ModeVector) -> ModeVector {
        ModeVector::new()
    }
}

/// Worst case allowed by the contract: L_ε acts as `norm`·Id on 𝒞 ⊕ L₀² and
/// as the identity on global constants. Bounds computed with it hold for
/// every admissible provider.
#[derive(Debug, Clone, Copy)]
pub struct ContractionProvider {
    norm: f64,
}

impl ContractionProvider {
    pub fn new(norm: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&norm) {
            return Err(Error::InvalidArgument(format!("extension norm must lie in [0,1], got {norm}")));
        }
        Ok(Self { norm })
    }
}

impl ExtensionProvider for ContractionProvider {
    fn name(&self) -> &'static str {
        "contraction"
    }

    fn norm_bound(&self) -> f64 {
        self.norm
    }

    fn apply(&self, data: &ModeVector) -> ModeVector {
        let k = circles(data);
        let mean = global_constant(data, k);
        data.iter()
            .map(|(i, c)| {
                let out = if i.n == 0 { mean + self.norm * (c - mean) } else { self.norm * c };
                (*i, out)
            })
            .collect()
    }
}

/// Check ‖L f‖ ≤ ‖f‖ on the supplied samples with zero global-constant part.
pub fn check_contract(provider: &dyn ExtensionProvider, samples: &[ModeVector]) -> Result<()> {
    for f in samples {
        let k = circles(f);
        let mean = global_constant(f, k);
        let mut g = f.clone();
        for (i, c) in g.iter_mut() {
            if i.n == 0 {
                *c -= mean;
            }
        }
        let lf = provider.apply(&g);
        if mode_norm(&lf) > mode_norm(&g) * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::InvalidArgument(format!(
                "provider {} enlarges a boundary datum: {} > {}",
                provider.name(),
                mode_norm(&lf),
                mode_norm(&g)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ModeVector {
        [(ModeIndex::new(0, 1), 1.0), (ModeIndex::new(0, 2), -0.5), (ModeIndex::new(3, 1), 2.0)]
            .into_iter()
            .collect()
    }

    #[test]
    fn model_is_zero() {
        assert!(ModelProvider.apply(&sample()).is_empty());
        check_contract(&ModelProvider, &[sample()]).unwrap();
    }

    #[test]
    fn contraction_keeps_constants_and_shrinks_the_rest() {
        let p = ContractionProvider::new(0.5).unwrap();
        let out = p.apply(&sample());
        assert!((out[&ModeIndex::new(3, 1)] - 1.0).abs() < 1e-15);
        // mean 0.25 is kept, deviations halve
        assert!((out[&ModeIndex::new(0, 1)] - 0.625).abs() < 1e-15);
        check_contract(&p, &[sample()]).unwrap();
        assert!(ContractionProvider::new(1.5).is_err());
    }
}
