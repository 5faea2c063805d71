//! Dirichlet spectra of cones and conic annuli and their zeta-regularized
//! determinants, by heat-trace continuation and by the per-mode route.

mod gy;
mod heat;
mod spectrum;

pub use gy::{gelfand_yaglom_logdet, DEFAULT_GY_MODES};
pub use heat::{
    logdet_from_spectrum, logdet_from_spectrum_with, zeta0_cone, zeta0_smooth, HeatCoefficients,
    HeatTraceOptions, ZetaDetResult,
};
pub use spectrum::{enumerate_annulus_spectrum, enumerate_cone_spectrum, weyl_count, Spectrum, SpectrumEntry};
