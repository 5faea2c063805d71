use conic_det::geometry::{AnnulusSpec, ConeSpec, Domain};
use conic_det::jump_operator::model_zeta_at_zero_numeric;
use conic_det::spectral_det::{enumerate_annulus_spectrum, enumerate_cone_spectrum, gelfand_yaglom_logdet};
use conic_det::verify::verify_bfk_model;

#[test]
fn gluing_report_is_scale_covariant() {
    let report = verify_bfk_model(1.5, 0.2, 2.0e4, None, 1e-3).unwrap();
    assert!(report.passes());
    for delta in [0.1, 3.0, 25.0] {
        let moved = report.rescaled(delta);
        assert!((moved.identity_residual - report.identity_residual).abs() < 1e-10);
        assert!((moved.logdet_whole - report.logdet_whole).abs() > 1e-3);
    }
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    for key in ["logdet_whole", "logdet_annulus", "logdet_small_cone", "logdet_r", "identity_residual", "tolerance"] {
        assert!(json[key].is_number(), "{key}");
    }
}

#[test]
fn low_cutoff_is_inconclusive_not_wrong() {
    let err = verify_bfk_model(2.0, 0.1, 2.0e3, None, 1e-4).unwrap_err();
    assert!(matches!(err, conic_det::Error::Inconclusive(_)), "{err}");
}

#[test]
fn full_model_zeta_vanishes() {
    let (z, err) = model_zeta_at_zero_numeric(0.1, 1.0, true).unwrap();
    assert!(z.abs() < 1e-6, "{z} ± {err}");
}

#[test]
fn spectra_export_and_count() {
    let disk = enumerate_cone_spectrum(ConeSpec::new(1.0, 1.0).unwrap(), 500.0).unwrap();
    let csv = disk.to_csv();
    assert_eq!(csv.lines().next(), Some("n,m,nu,lambda,multiplicity"));
    assert_eq!(csv.lines().count() as u64 - 1, disk.entries.len() as u64);
    assert!((disk.ground_state() - 2.404825557695773f64.powi(2)).abs() < 1e-9);
    let ann = enumerate_annulus_spectrum(AnnulusSpec::new(1.0, 0.5, 1.0).unwrap(), 2000.0).unwrap();
    assert!(ann.weyl_deviation().abs() < 0.1);
}

#[test]
fn gelfand_yaglom_reference_values() {
    let cases = [
        (Domain::Cone(ConeSpec::new(1.0, 1.0).unwrap()), -0.7737138523),
        (Domain::Cone(ConeSpec::new(2.0, 1.0).unwrap()), -1.5868507228),
        (Domain::Annulus(AnnulusSpec::new(1.0, 0.5, 1.0).unwrap()), -2.4886627509),
    ];
    for (d, v) in cases {
        assert!((gelfand_yaglom_logdet(&d, 20_000).unwrap().logdet - v).abs() < 1e-9, "{d:?}");
    }
}
