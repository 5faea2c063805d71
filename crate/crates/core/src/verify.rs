//! End-to-end checks on the computable model: the gluing identity, sweeps of
//! the jump-operator determinant in ε, and decay-rate fits.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{scale_logdet, AnnulusSpec, ConeSpec, Domain};
use crate::jump_operator::{default_mode_cutoff, logdet_model_r, model_asymptote, model_zeta_at_zero};
use crate::spectral_det::{
    enumerate_annulus_spectrum, enumerate_cone_spectrum, gelfand_yaglom_logdet, logdet_from_spectrum,
    zeta0_cone, HeatCoefficients, ZetaDetResult, DEFAULT_GY_MODES,
};

pub const SWEEP_CSV_HEADER: &str =
    "eps,logdet_r_numeric,logdet_r_asymptotic,residual,comeback_bound,paper_bound,runtime_seconds";

/// Default spectral cutoff for unit-size domains.
pub const DEFAULT_SPECTRAL_CUTOFF: f64 = 4.0e4;

/// Terms of the gluing identity
/// `log det C_{α,1} = log det Ann(α; ε, 1) + log det C_{α,ε} + log det R_ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BfkReport {
    pub alpha: f64,
    pub eps: f64,
    pub logdet_whole: f64,
    pub logdet_annulus: f64,
    pub logdet_small_cone: f64,
    pub logdet_r: f64,
    pub identity_residual: f64,
    pub tolerance: f64,
    /// Heat-trace minus Gelfand–Yaglom values for the cone and the annulus.
    pub cone_oracle_gap: f64,
    pub annulus_oracle_gap: f64,
    /// Largest error estimate among the numerical terms.
    pub err_estimate: f64,
    pub spectral_cutoff: f64,
    pub mode_cutoff: usize,
}

impl BfkReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }

    pub fn passes(&self) -> bool {
        self.identity_residual.abs() <= self.tolerance
    }

    /// The same identity for the metric multiplied by δ². Surface terms pick
    /// up −2ζ(0) log δ and the first-order R_ε picks up −ζ(0) log δ.
    pub fn rescaled(&self, delta: f64) -> BfkReport {
        let zc = zeta0_cone(self.alpha);
        let mut out = self.clone();
        out.logdet_whole = scale_logdet(self.logdet_whole, zc, delta);
        out.logdet_small_cone = scale_logdet(self.logdet_small_cone, zc, delta);
        out.logdet_annulus = scale_logdet(self.logdet_annulus, 0.0, delta);
        out.logdet_r = self.logdet_r - model_zeta_at_zero() * delta.ln();
        out.identity_residual = identity(&out);
        out
    }
}

fn identity(r: &BfkReport) -> f64 {
    r.logdet_whole - r.logdet_annulus - r.logdet_small_cone - r.logdet_r
}

fn heat_logdet(domain: Domain, cutoff: f64) -> Result<ZetaDetResult> {
    let spectrum = match domain {
        Domain::Cone(c) => enumerate_cone_spectrum(c, cutoff)?,
        Domain::Annulus(a) => enumerate_annulus_spectrum(a, cutoff)?,
    };
    logdet_from_spectrum(&spectrum, &HeatCoefficients::for_domain(&domain))
}

/// Checks the gluing identity on the cone C_{α,1} cut along r = ε.
///
/// The cone and annulus are computed from their spectra below
/// `spectral_cutoff` and cross-checked against the Gelfand–Yaglom values;
/// C_{α,ε} is the unit cone rescaled; R_ε is the model operator with
/// `mode_cutoff` modes (default when `None`).
pub fn verify_bfk_model(
    alpha: f64,
    eps: f64,
    spectral_cutoff: f64,
    mode_cutoff: Option<usize>,
    tol: f64,
) -> Result<BfkReport> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1/2], got {eps}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let cone = Domain::Cone(ConeSpec::new(alpha, 1.0)?);
    let annulus = Domain::Annulus(AnnulusSpec::new(alpha, eps, 1.0)?);
    let modes = mode_cutoff.unwrap_or_else(|| default_mode_cutoff(eps, &[alpha]));

    let (cone_heat, annulus_heat) = rayon::join(
        || heat_logdet(cone, spectral_cutoff),
        || heat_logdet(annulus, spectral_cutoff),
    );
    let (cone_heat, annulus_heat) = (cone_heat?, annulus_heat?);
    let cone_gy = gelfand_yaglom_logdet(&cone, DEFAULT_GY_MODES)?;
    let annulus_gy = gelfand_yaglom_logdet(&annulus, DEFAULT_GY_MODES)?;
    let r = logdet_model_r(eps, alpha, modes)?;

    let report = {
        let mut rep = BfkReport {
            alpha,
            eps,
            logdet_whole: cone_heat.logdet,
            logdet_annulus: annulus_heat.logdet,
            logdet_small_cone: scale_logdet(cone_heat.logdet, zeta0_cone(alpha), eps),
            logdet_r: r.logdet_r,
            identity_residual: 0.0,
            tolerance: tol,
            cone_oracle_gap: cone_heat.logdet - cone_gy.logdet,
            annulus_oracle_gap: annulus_heat.logdet - annulus_gy.logdet,
            err_estimate: cone_heat.err_estimate.max(annulus_heat.err_estimate),
            spectral_cutoff,
            mode_cutoff: modes,
        };
        rep.identity_residual = identity(&rep);
        rep
    };

    let limit = tol / 4.0;
    let worst = report
        .err_estimate
        .max(report.cone_oracle_gap.abs())
        .max(report.annulus_oracle_gap.abs());
    if worst > limit {
        return Err(Error::Inconclusive(format!(
            "numerical uncertainty {worst:.3e} exceeds tol/4 = {limit:.3e}; raise the spectral cutoff"
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub logdet_r_numeric: f64,
    pub logdet_r_asymptotic: f64,
    pub residual: f64,
    pub comeback_bound: f64,
    pub paper_bound: f64,
    pub runtime_seconds: f64,
    /// Whether ε ≤ 2^{−α}, where the bounds are established.
    pub in_regime: bool,
}

impl SweepRow {
    /// `|residual| ≤ comeback_bound ≤ paper_bound`.
    pub fn chain_holds(&self) -> bool {
        self.residual.abs() <= self.comeback_bound && self.comeback_bound <= self.paper_bound
    }
}

/// log det R_ε of the model on each grid point, against the asymptote
/// log(πα) − log log(1/ε). Rows come back ordered by ε descending;
/// points outside ε ≤ 2^{−α} are kept with `in_regime = false`.
pub fn sweep_jump_determinant(alpha: f64, eps_grid: &[f64], mode_cutoff: Option<usize>) -> Result<Vec<SweepRow>> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidArgument("empty eps grid".into()));
    }
    let mut rows = eps_grid
        .par_iter()
        .map(|&eps| {
            let start = Instant::now();
            let modes = mode_cutoff.unwrap_or_else(|| default_mode_cutoff(eps, &[alpha]));
            let det = logdet_model_r(eps, alpha, modes)?;
            let asymptotic = model_asymptote(eps, alpha);
            Ok(SweepRow {
                eps,
                logdet_r_numeric: det.logdet_r,
                logdet_r_asymptotic: asymptotic,
                residual: det.residual,
                comeback_bound: det.comeback_bound,
                paper_bound: det.paper_bound,
                runtime_seconds: start.elapsed().as_secs_f64(),
                in_regime: det.in_regime,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.eps, r.logdet_r_numeric, r.logdet_r_asymptotic, r.residual, r.comeback_bound, r.paper_bound, r.runtime_seconds
        )?;
    }
    Ok(())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_sweep_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Residuals below this are treated as rounding noise.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// Least-squares slope of log|residual| against log ε.
pub fn fit_convergence_rate(rows: &[SweepRow]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.residual.abs() >= RESIDUAL_FLOOR && r.eps > 0.0)
        .map(|r| (r.eps.ln(), r.residual.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} rows above the {RESIDUAL_FLOOR:e} floor, need 3",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all usable rows share one eps".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(eps: &[f64], f: impl Fn(f64) -> f64) -> Vec<SweepRow> {
        eps.iter()
            .map(|&e| SweepRow {
                eps: e,
                logdet_r_numeric: 0.0,
                logdet_r_asymptotic: 0.0,
                residual: f(e),
                comeback_bound: 0.0,
                paper_bound: 0.0,
                runtime_seconds: 0.0,
                in_regime: true,
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let grid = [0.2, 0.1, 0.05, 0.01];
        let s1 = fit_convergence_rate(&synthetic(&grid, |e| 3.0 * e)).unwrap();
        assert!((s1 - 1.0).abs() < 1e-9);
        let s2 = fit_convergence_rate(&synthetic(&grid, |e| 0.5 * e * e)).unwrap();
        assert!((s2 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn too_few_rows() {
        let rows = synthetic(&[0.1, 0.01, 0.001], |e| if e < 0.05 { 0.0 } else { e });
        assert!(matches!(fit_convergence_rate(&rows), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn sweep_alpha_one() {
        let rows = sweep_jump_determinant(1.0, &[0.05, 0.25, 0.025, 0.1], None).unwrap();
        let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
        assert_eq!(eps, vec![0.25, 0.1, 0.05, 0.025]);
        for w in rows.windows(2) {
            assert!(w[1].residual.abs() < w[0].residual.abs());
        }
        for r in &rows {
            assert!(r.in_regime && r.chain_holds(), "{r:?}");
            assert!(r.residual.abs() <= 6.0 * r.eps);
        }
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().next(), Some(SWEEP_CSV_HEADER));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn out_of_regime_points_are_flagged() {
        let rows = sweep_jump_determinant(2.0, &[0.4, 0.1], None).unwrap();
        assert!(!rows[0].in_regime);
        assert!(rows[1].in_regime);
    }

    #[test]
    fn alpha_two_rate() {
        let grid: Vec<f64> = (0..8).map(|i| 0.25 * 0.5f64.powi(i)).collect();
        let rows = sweep_jump_determinant(2.0, &grid, None).unwrap();
        assert!(fit_convergence_rate(&rows).unwrap() >= 0.45);
    }

    #[test]
    fn identity_with_gelfand_yaglom_terms() {
        for (alpha, eps) in [(1.0, 0.1), (2.0, 0.3), (0.5, 0.2)] {
            let cone = gelfand_yaglom_logdet(&Domain::Cone(ConeSpec::new(alpha, 1.0).unwrap()), DEFAULT_GY_MODES).unwrap();
            let ann = gelfand_yaglom_logdet(&Domain::Annulus(AnnulusSpec::new(alpha, eps, 1.0).unwrap()), DEFAULT_GY_MODES)
                .unwrap();
            let r = logdet_model_r(eps, alpha, default_mode_cutoff(eps, &[alpha])).unwrap();
            let small = scale_logdet(cone.logdet, zeta0_cone(alpha), eps);
            let res = cone.logdet - ann.logdet - small - r.logdet_r;
            assert!(res.abs() < 1e-8, "alpha {alpha} eps {eps}: {res:e}");
        }
    }

    #[test]
    fn annulus_is_scale_invariant() {
        let base = gelfand_yaglom_logdet(&Domain::Annulus(AnnulusSpec::new(1.5, 0.2, 1.0).unwrap()), DEFAULT_GY_MODES)
            .unwrap();
        for lam in [0.5, 3.0] {
            let moved =
                gelfand_yaglom_logdet(&Domain::Annulus(AnnulusSpec::new(1.5, 0.2 * lam, lam).unwrap()), DEFAULT_GY_MODES)
                    .unwrap();
            assert!((scale_logdet(moved.logdet, 0.0, 1.0 / lam) - base.logdet).abs() < 1e-8);
        }
    }

    #[test]
    fn bad_arguments() {
        assert!(verify_bfk_model(1.0, 0.7, 1e3, None, 1e-3).is_err());
        assert!(verify_bfk_model(1.0, 0.1, 1e3, None, 0.0).is_err());
    }
}
