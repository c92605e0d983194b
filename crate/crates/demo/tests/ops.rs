use opfree_demo::ops;

#[test]
fn flip_model_is_the_semicircle() {
    let d = ops::offdiagonal_density(1.0, 1.0, -3.0, 3.0, 61, 1e-3).unwrap();
    assert_eq!(d.len(), 61);
    // x = 0 sits at index 30
    assert!((d[30] - 1.0 / std::f64::consts::PI).abs() < 1e-3);
    assert!(d[0] < 1e-3 && d[60] < 1e-3);
}

#[test]
fn truncation_returns_both_curves() {
    let d = ops::truncated_semicircle(40, -2.5, 2.5, 101, 0.3).unwrap();
    assert_eq!(d.len(), 202);
    let (approx, exact) = d.split_at(101);
    assert!((exact[50] - 1.0 / std::f64::consts::PI).abs() < 1e-12);
    // at this height the fraction has converged to the smoothed semicircle
    let smoothed = ((4.09f64).sqrt() - 0.3) / (2.0 * std::f64::consts::PI);
    assert!((approx[50] - smoothed).abs() < 1e-4, "{} vs {smoothed}", approx[50]);
}

#[test]
fn corner_atom_at_zero() {
    let json = r#"{"dim":2,"mean":[[[0,0],[0,0]],[[0,0],[0,0]]],"kraus":[[[[0,0],[1,0]],[[0,0],[0,0]]]]}"#;
    let v: serde_json::Value = serde_json::from_str(&ops::atom_report(json, 0.0).unwrap()).unwrap();
    assert!((v["mass"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((v["nilpotent_lower_bound"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn bad_input_is_an_error() {
    assert!(ops::offdiagonal_density(1.0, 1.0, 1.0, -1.0, 10, 1e-3).is_err());
    assert!(ops::atom_report("{}", 0.0).is_err());
}
