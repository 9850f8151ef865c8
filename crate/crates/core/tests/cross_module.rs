//! Agreement between the exact Seifert engine, the geometry and the numerical spectrum.

use reeb_core::functionals::{functional_report, QuadratureGrid};
use reeb_core::sasaki_geometry::identities::sample_points;
use reeb_core::sasaki_geometry::{WeightedSphere, Weights};
use reeb_core::seifert_rr::{
    bochner_bound, mu1_d, verdict, weighted_min_scal, weighted_seifert, Rational, Status,
};
use reeb_core::spectrum::{compute_spectrum, SpectrumConfig};

fn cfg() -> SpectrumConfig {
    SpectrumConfig {
        modes: 4,
        radial: 40,
        top: 20,
        ..Default::default()
    }
}

#[test]
fn exact_and_numerical_contact_eigenvalues_agree() {
    for (k, l) in [(1, 1), (2, 1), (3, 2), (5, 3)] {
        let exact = mu1_d(&weighted_seifert(k, l).unwrap()).unwrap();
        let report = compute_spectrum(Weights::new(k, l).unwrap(), 1.0, &cfg()).unwrap();
        let numeric = report.mu1_d.expect("a contact eigenvalue is captured");
        assert!(
            (numeric - exact as f64).abs() < 1e-4,
            "({k},{l}): {numeric} vs {exact}"
        );
        assert!((report.mu1.unwrap() - 2.0).abs() < 1e-4);
    }
}

#[test]
fn verdict_matches_the_deformed_spectrum() {
    let (k, l) = (2, 1);
    let data = weighted_seifert(k, l).unwrap();
    let w = Weights::new(k, l).unwrap();
    for (num, den) in [(1, 1), (5, 4), (7, 4), (2, 1)] {
        let a = Rational::new(num, den);
        let v = verdict(&data, a).unwrap();
        let report = compute_spectrum(w, a.to_f64(), &cfg()).unwrap();
        let contact = report.mu1_d.unwrap();
        assert!((contact - (k + l) as f64 / a.to_f64()).abs() < 1e-4);
        // Minimizer exactly when no contact eigenvalue drops below 2.
        assert_eq!(
            v.status == Status::Minimizer,
            contact >= 2.0 - 1e-9,
            "a = {a}"
        );
        let mu1 = report.mu1.unwrap();
        assert!((mu1 - contact.min(2.0)).abs() < 1e-4, "a = {a}: mu1 {mu1}");
    }
}

#[test]
fn scalar_curvature_minimum_and_bochner_bound() {
    for (k, l) in [(1, 1), (2, 1), (3, 2), (5, 3), (7, 4)] {
        let w = Weights::new(k, l).unwrap();
        let sphere = WeightedSphere::undeformed(w);
        let exact_min = weighted_min_scal(k, l);
        let sampled = sample_points(2000, 5)
            .iter()
            .map(|p| sphere.scalar_curvature(p))
            .fold(f64::INFINITY, f64::min);
        assert!(sampled >= exact_min.to_f64() - 1e-9);
        assert!(sampled <= exact_min.to_f64() + 0.1 * (k - l + 1) as f64);
        let mu = mu1_d(&weighted_seifert(k, l).unwrap()).unwrap();
        assert!(bochner_bound(exact_min, mu), "({k},{l})");
    }
}

#[test]
fn skyrme_bound_uses_the_numerical_first_eigenvalue() {
    let w = Weights::new(3, 2).unwrap();
    let rep = functional_report(w, 1.0, &QuadratureGrid::default()).unwrap();
    let spectrum = compute_spectrum(w, 1.0, &cfg()).unwrap();
    let area = std::f64::consts::PI / 6.0;
    let bound = 0.5 * area * area * spectrum.mu1.unwrap() * rep.hopf_q;
    assert!((bound - rep.bound_rhs).abs() < 1e-6);
    assert!((rep.skyrme_f - bound).abs() < 1e-6);
}
