//! Special functions: Bessel functions of real order, their zeros, and the
//! gamma-family helpers the determinant routines need.

pub mod bessel;
pub mod gamma;
pub mod quad;

pub use bessel::{
    bessel_j, bessel_j_and_derivative, bessel_j_zero, bessel_y, bessel_zeros_below,
    cross_product, cross_product_relative_residual, cross_product_zero,
    cross_product_zeros_below, mcmahon_zero, BesselOrder,
};
pub use gamma::{exp_integral_e1, ln_gamma, stirling_remainder};
