//! Dirichlet spectra of flat cones and conic annuli by separation of
//! variables: angular mode n gives Bessel order ν = |n|/α, and the radial
//! eigenvalues are squares of Bessel (cone) or cross-product (annulus) zeros.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{AnnulusSpec, ConeSpec, Domain};
use crate::specfun::{bessel_zeros_below, cross_product_zeros_below, BesselOrder};

/// One eigenvalue family member: angular mode n ≥ 0, radial index m ≥ 1.
/// Modes n ≠ 0 stand for the ±n pair and carry multiplicity 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub n: u64,
    pub m: u32,
    pub nu: f64,
    pub lambda: f64,
    pub multiplicity: u32,
}

/// Every Dirichlet eigenvalue ≤ `cutoff`, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub domain: Domain,
    pub cutoff: f64,
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.lambda)
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|e| e.multiplicity)
    }

    /// Eigenvalue count N(Λ) with multiplicity.
    pub fn count(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity as u64).sum()
    }

    pub fn ground_state(&self) -> f64 {
        self.entries[0].lambda
    }

    /// Two-term Weyl prediction (Area/4π)Λ − (Perimeter/4π)√Λ.
    pub fn weyl_count(&self) -> f64 {
        weyl_count(&self.domain, self.cutoff)
    }

    /// Relative deviation of the actual count from the Weyl prediction.
    pub fn weyl_deviation(&self) -> f64 {
        let w = self.weyl_count();
        (self.count() as f64 - w).abs() / w
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,nu,lambda,multiplicity\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{:.17e},{:.17e},{}", e.n, e.m, e.nu, e.lambda, e.multiplicity);
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

pub fn weyl_count(domain: &Domain, cutoff: f64) -> f64 {
    let pi4 = 4.0 * std::f64::consts::PI;
    domain.area() / pi4 * cutoff - domain.perimeter() / pi4 * cutoff.sqrt()
}

fn assemble(domain: Domain, cutoff: f64, per_mode: Vec<Vec<f64>>, alpha: f64, scale: f64) -> Result<Spectrum> {
    let mut entries: Vec<SpectrumEntry> = per_mode
        .into_iter()
        .enumerate()
        .flat_map(|(n, zs)| {
            let nu = n as f64 / alpha;
            zs.into_iter().enumerate().map(move |(m, z)| {
                let k = z / scale;
                SpectrumEntry {
                    n: n as u64,
                    m: m as u32 + 1,
                    nu,
                    lambda: k * k,
                    multiplicity: if n == 0 { 1 } else { 2 },
                }
            })
        })
        .filter(|e| e.lambda <= cutoff)
        .collect();
    if entries.is_empty() {
        return Err(Error::EmptySpectrum { cutoff });
    }
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.n.cmp(&b.n)).then(a.m.cmp(&b.m)));
    Ok(Spectrum { domain, cutoff, entries })
}

/// Highest mode that can contribute: every zero of order ν exceeds ν.
fn mode_bound(alpha: f64, xmax: f64) -> usize {
    (alpha * xmax).ceil() as usize + 1
}

/// All eigenvalues (j_{ν,m}/L)² ≤ Λ of the cone C_{α,L}. Only regular (J-type)
/// radial solutions are admitted at the tip.
pub fn enumerate_cone_spectrum(cone: ConeSpec, cutoff: f64) -> Result<Spectrum> {
    ensure_positive("cutoff", cutoff)?;
    let xmax = cutoff.sqrt() * cone.length;
    let per_mode = (0..=mode_bound(cone.alpha, xmax))
        .into_par_iter()
        .map(|n| bessel_zeros_below(BesselOrder::new(n as f64 / cone.alpha)?, xmax))
        .collect::<Result<Vec<_>>>()?;
    assemble(Domain::Cone(cone), cutoff, per_mode, cone.alpha, cone.length)
}

/// All eigenvalues (z_{ν,m}/b)² ≤ Λ of the conic annulus a < r < b.
pub fn enumerate_annulus_spectrum(ann: AnnulusSpec, cutoff: f64) -> Result<Spectrum> {
    ensure_positive("cutoff", cutoff)?;
    let xmax = cutoff.sqrt() * ann.outer;
    let ratio = ann.ratio();
    let per_mode = (0..=mode_bound(ann.alpha, xmax))
        .into_par_iter()
        .map(|n| cross_product_zeros_below(BesselOrder::new(n as f64 / ann.alpha)?, ratio, xmax))
        .collect::<Result<Vec<_>>>()?;
    assemble(Domain::Annulus(ann), cutoff, per_mode, ann.alpha, ann.outer)
}
