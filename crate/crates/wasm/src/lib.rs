//! Browser bindings: three small entry points returning JSON text, used by
//! `www/index.html`. They are ordinary Rust functions as well, so the same
//! code is tested natively.

use conic_det::asymptotics::{divergence_class, khuri_expansion};
use conic_det::geometry::{parse_rational_list, parse_real_list, ConeSpec, Domain};
use conic_det::jump_operator::{default_mode_cutoff, logdet_model_r};
use conic_det::spectral_det::gelfand_yaglom_logdet;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Mode count for the in-browser Gelfand–Yaglom sums; smaller than the
/// native default to keep the page responsive.
const BROWSER_GY_MODES: usize = 4000;

fn text(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Khuri coefficients and divergence class for genus `genus` and
/// comma-separated cone parameters (fractions allowed).
#[wasm_bindgen]
pub fn khuri(genus: u32, angles: &str) -> Result<String, String> {
    let alphas = parse_rational_list(angles).map_err(text)?;
    let report = khuri_expansion(genus, &alphas, None, None).map_err(text)?;
    let mut v = report.to_json();
    v["divergence"] = json!(divergence_class(genus, &alphas).map_err(text)?.to_string());
    Ok(v.to_string())
}

/// Model jump-determinant rows for a comma-separated ε list, ordered by ε
/// descending. Points with ε > 2^{−α} are returned with `in_regime: false`.
#[wasm_bindgen]
pub fn jump_sweep(alpha: f64, eps_list: &str) -> Result<String, String> {
    let mut grid = parse_real_list(eps_list).map_err(text)?;
    grid.sort_by(|a, b| b.total_cmp(a));
    let rows = grid
        .iter()
        .map(|&eps| {
            let d = logdet_model_r(eps, alpha, default_mode_cutoff(eps, &[alpha])).map_err(text)?;
            Ok(json!({
                "eps": eps,
                "logdet_r": d.logdet_r,
                "residual": d.residual,
                "comeback_bound": d.comeback_bound,
                "paper_bound": d.paper_bound,
                "in_regime": d.in_regime,
            }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(serde_json::Value::Array(rows).to_string())
}

/// log det of the Dirichlet Laplacian on the cone C_{α,L}.
#[wasm_bindgen]
pub fn cone_logdet(alpha: f64, length: f64) -> Result<String, String> {
    let cone = ConeSpec::new(alpha, length).map_err(text)?;
    let r = gelfand_yaglom_logdet(&Domain::Cone(cone), BROWSER_GY_MODES).map_err(text)?;
    Ok(r.to_json())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn khuri_output() {
        let v = parse(&khuri(2, "3").unwrap());
        assert_eq!(v["c_log_eps"], "-4/9");
        assert_eq!(v["divergence"], "to_plus_infinity");
        assert!(khuri(1, "").is_err());
    }

    #[test]
    fn sweep_output() {
        let v = parse(&jump_sweep(1.0, "0.1, 0.6, 0.01").unwrap());
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0]["eps"], 0.6);
        assert_eq!(rows[0]["in_regime"], false);
        assert!(rows[2]["residual"].as_f64().unwrap() < rows[1]["residual"].as_f64().unwrap());
        assert!(jump_sweep(1.0, "abc").is_err());
    }

    #[test]
    fn disk_value() {
        let v = parse(&cone_logdet(1.0, 1.0).unwrap());
        assert!((v["logdet"].as_f64().unwrap() + 0.7737138523).abs() < 1e-8);
        assert!(cone_logdet(-1.0, 1.0).is_err());
    }
}
