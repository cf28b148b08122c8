use willmore_core::comparison::decay_constants;
use willmore_core::manifold::{envelope_lambda, reissner_nordstrom, schwarzschild, ProbeSettings};

#[test]
fn schwarzschild_decay_constants_match_closed_form() {
    let b0_exact = (1.0 + 4f64.ln()) / 3.0;
    for &m in &[1.0, 2.0, 5.0] {
        let w = schwarzschild(m, 3).unwrap();
        let lam = envelope_lambda(&w, &ProbeSettings::default()).unwrap();
        let c = decay_constants(&lam, 1e-10).unwrap();
        assert!((c.b1 - 2.0 / (3.0 * m)).abs() < 1e-8, "m={m}: b1 = {}", c.b1);
        assert!((c.b0 - b0_exact).abs() < 1e-8, "m={m}: b0 = {}", c.b0);
        assert!(c.b0_error < 1e-8 && c.b1_error < 1e-8);
    }
}

#[test]
fn reissner_nordstrom_constants_match_reference_quadrature() {
    // Reference values from a 30-digit quadrature in the profile variable s.
    let w = reissner_nordstrom(3.0, 1.0, 3).unwrap();
    let lam = envelope_lambda(&w, &ProbeSettings::default()).unwrap();
    let c = decay_constants(&lam, 1e-10).unwrap();
    assert!((c.b1 - 0.247_050_652_364_343_55).abs() < 1e-8, "{c:?}");
    assert!((c.b0 - 0.864_598_154_948_896_8).abs() < 1e-8, "{c:?}");
}
