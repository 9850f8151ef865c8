use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;

use super::fields::*;
use super::identities::*;
use super::*;

fn w(k: i64, l: i64) -> Weights {
    Weights::new(k, l).unwrap()
}

fn sphere(k: i64, l: i64, a: f64) -> WeightedSphere {
    WeightedSphere::new(w(k, l), a).unwrap()
}

fn p0() -> Point {
    Point::new(0.7, 1.1, 2.3).unwrap()
}

const ALL_WEIGHTS: [(i64, i64); 4] = [(1, 1), (2, 1), (3, 2), (5, 3)];

#[test]
fn weights_and_points_validate() {
    assert!(Weights::new(4, 2).is_err());
    assert!(Weights::new(2, 3).is_err());
    assert!(Weights::new(1, 0).is_err());
    assert!(Point::new(0.0, 0.0, 0.0).is_err());
    assert!(Point::new(FRAC_PI_2, 0.0, 0.0).is_err());
    let p = Point::new(0.5, -1.0, 7.0).unwrap();
    assert!((p.phi1 - (2.0 * PI - 1.0)).abs() < 1e-14);
    assert!(WeightedSphere::new(w(1, 1), 0.0).is_err());
}

#[test]
fn sigma_examples() {
    let w21 = w(2, 1);
    assert_eq!(w21.sigma(0.0), 1.0);
    assert!((w21.sigma(FRAC_PI_2) - 2.0).abs() < 1e-15);
    assert!((w21.sigma(FRAC_PI_4) - 1.5).abs() < 1e-15);
}

#[test]
fn round_metric_in_hopf_coordinates() {
    let p = p0();
    let g = sphere(1, 1, 1.0).metric_at(&p);
    let (sn, cs) = p.s.sin_cos();
    let want = Matrix3::from_diagonal(&Vector3::new(1.0, cs * cs, sn * sn));
    assert!((g - want).abs().max() < 1e-14);
}

#[test]
fn reeb_field_is_unit_for_every_deformation() {
    for a in [1.0, 4.0, 0.5] {
        let sp = sphere(3, 2, a);
        let xi = Vector3::from(sp.frame_at(&p0()).xi);
        let n = (xi.transpose() * sp.metric_at(&p0()) * xi)[0];
        assert!((n - 1.0).abs() < 1e-12, "a = {a}: {n}");
    }
}

#[test]
fn round_frame_matches_killing_fields() {
    let f = sphere(1, 1, 1.0).frame_at(&p0());
    assert_eq!(f.xi, [0.0, 1.0, 1.0]);
    let (sp, cp) = p0().psi().sin_cos();
    let t = p0().s.tan();
    let want = [cp, sp * t, -sp / t];
    for c in 0..3 {
        assert!((f.x1[c] - want[c]).abs() < 1e-14);
    }
}

#[test]
fn frame_gram_is_identity_at_reference_point() {
    let sp = sphere(3, 2, 1.0);
    let e = sp.frame_at(&p0()).matrix();
    let gram = e.transpose() * sp.metric_at(&p0()) * e;
    assert!((gram - Matrix3::identity()).abs().max() < 1e-10);
}

#[test]
fn structure_functions_match_closed_forms() {
    for (k, l) in ALL_WEIGHTS {
        let sp = sphere(k, l, 1.0);
        for p in sample_points(50, 3) {
            let c = sp.structure_functions(&p);
            assert!((c.c0 - ((k + l) as f64 - 1.0)).abs() < 1e-9, "C0 at {p:?}");
            let (c1, c2) = oracle::closed_form_c12(&sp, &p);
            assert!((c.c1 - c1).abs() < 1e-9 && (c.c2 - c2).abs() < 1e-9);
            assert!(c.residual < PROJECTION_TOL);
        }
    }
    let c = sphere(3, 2, 1.0).structure_functions(&p0());
    assert!((c.c1 - 0.2431).abs() < 1e-4 && (c.c2 + 0.9196).abs() < 1e-4);
}

#[test]
fn round_structure_functions_are_constant() {
    let c = sphere(1, 1, 1.0).structure_functions(&p0());
    assert!((c.c0 - 1.0).abs() < 1e-12 && c.c1.abs() < 1e-12 && c.c2.abs() < 1e-12);
}

#[test]
fn deformed_structure_functions_rescale() {
    let base = sphere(3, 2, 1.0).structure_functions(&p0());
    let a = 2.0;
    let def = sphere(3, 2, a).structure_functions(&p0());
    assert!((def.c0 + 1.0 - (base.c0 + 1.0) / a).abs() < 1e-12);
    assert!((def.c1 - base.c1 / a.sqrt()).abs() < 1e-12);
    assert!((def.c2 - base.c2 / a.sqrt()).abs() < 1e-12);
}

#[test]
fn scalar_curvature_examples() {
    let w21 = w(2, 1);
    assert!((w(1, 1).scalar_curvature(0.3) - 6.0).abs() < 1e-12);
    assert!((w21.scalar_curvature(FRAC_PI_2) + 2.0).abs() < 1e-12);
    assert!((w21.scalar_curvature(0.0) - 22.0).abs() < 1e-12);
}

#[test]
fn scalar_curvature_minimum_on_dense_grid() {
    for (k, l) in ALL_WEIGHTS {
        let wt = w(k, l);
        let min = (0..=20_000)
            .map(|i| wt.scalar_curvature(FRAC_PI_2 * i as f64 / 20_000.0))
            .fold(f64::INFINITY, f64::min);
        assert!((min - (8.0 * (2 * l - k) as f64 - 2.0)).abs() < 1e-6);
    }
}

#[test]
fn deformed_scalar_curvature_matches_curvature_trace() {
    for a in [0.5, 2.0] {
        let sp = sphere(3, 2, a);
        for p in sample_points(20, 9) {
            assert!((sp.scalar_curvature_fd(&p) - sp.scalar_curvature(&p)).abs() < 1e-3);
        }
    }
}

#[test]
fn curl_examples() {
    for (k, l) in ALL_WEIGHTS {
        let sp = sphere(k, l, 1.0);
        let c = sp.curl(&ReebField, &p0());
        assert!(norm3(&sub3(&c, &[2.0, 0.0, 0.0])) < 1e-12);
        let f = SigmaFrameField::new(w(k, l), 1);
        let c = sp.curl(&f, &p0());
        let v = f.jet(&p0()).coeffs;
        for i in 0..3 {
            assert!((c[i] - (k + l) as f64 * v[i]).abs() < 1e-10);
        }
        let g = sp.curl(&SigmaGradient { weights: w(k, l) }, &p0());
        assert!(norm3(&g) < 1e-10);
    }
    let sp = sphere(3, 2, 2.0);
    let f = SigmaFrameField::new(w(3, 2), 1);
    let c = sp.curl(&f, &p0());
    assert!((c[1] - 2.5 * f.jet(&p0()).coeffs[1]).abs() < 1e-10);
}

#[test]
fn divergence_examples() {
    let sp = sphere(2, 1, 1.0);
    assert_eq!(sp.divergence(&ReebField, &p0()), 0.0);
    assert!(
        sp.divergence(&SigmaFrameField::new(w(2, 1), 1), &p0())
            .abs()
            < 1e-12
    );
    let grad = SigmaGradient { weights: w(2, 1) };
    let lap = oracle::laplace_beltrami(&sp, &p0(), |q| w(2, 1).sigma(q.s));
    assert!((sp.divergence(&grad, &p0()) - lap).abs() < 1e-4);
}

#[test]
fn finite_difference_fields_agree_with_analytic_jets() {
    let wt = w(3, 2);
    let analytic = SigmaFrameField::new(wt, 1);
    let fd = FiniteDifferenceField {
        weights: wt,
        coeffs: |q: &Point| analytic.jet(q).coeffs,
    };
    assert_eq!(fd.kind(), DerivativeKind::FiniteDifference);
    for p in sample_points(30, 4) {
        let a = analytic.jet(&p);
        let b = fd.jet(&p);
        for i in 0..3 {
            for j in 0..3 {
                let scale = 1.0 + a.frame_derivs[i][j].abs();
                assert!((a.frame_derivs[i][j] - b.frame_derivs[i][j]).abs() < 1e-6 * scale);
            }
        }
    }
    let grad = SigmaGradient { weights: wt };
    let fd = FiniteDifferenceField {
        weights: wt,
        coeffs: |q: &Point| grad.jet(q).coeffs,
    };
    let (a, b) = (grad.jet(&p0()), fd.jet(&p0()));
    for i in 0..3 {
        for j in 0..3 {
            assert!((a.frame_derivs[i][j] - b.frame_derivs[i][j]).abs() < 1e-6);
        }
    }
}

#[test]
fn jets_commute_like_frame_brackets() {
    // [X1, X2] f = (-2 xi + C1 X1 + C2 X2) f, tested on an analytic coefficient
    let sp = sphere(3, 2, 1.0);
    let wt = w(3, 2);
    let field = SigmaGradient { weights: wt };
    let p = p0();
    let h = 1e-5;
    let frame = sp.base_frame(&p).vectors();
    let along = |v: [f64; 3], j: usize| -> f64 {
        let q = |t: f64| Point::raw(p.s + t * v[0], p.phi1 + t * v[1], p.phi2 + t * v[2]);
        (field.jet(&q(h)).frame_derivs[1][j] - field.jet(&q(-h)).frame_derivs[1][j]) / (2.0 * h)
    };
    let lhs = along(frame[1], 2) - along(frame[2], 1);
    let c = sp.structure_functions(&p);
    let d = field.jet(&p).frame_derivs[1];
    let rhs = -2.0 * d[0] + c.c1 * d[1] + c.c2 * d[2];
    assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
}

#[test]
fn phi_map_examples() {
    assert_eq!(phi_map([0.0, 1.0, 0.0]), [0.0, 0.0, -1.0]);
    assert_eq!(phi_map([1.0, 0.0, 0.0]), [0.0, 0.0, 0.0]);
    assert_eq!(phi_map(phi_map([0.0, 0.3, -0.7])), [0.0, -0.3, 0.7]);
}

#[test]
fn mixed_curvature_examples() {
    assert!(sphere(1, 1, 1.0).mixed_curvature_check(&p0(), [1.0, 0.0]) < 1e-6);
    let sp = sphere(3, 2, 1.0);
    for p in sample_points(20, 11) {
        assert!(sp.mixed_curvature_check(&p, [0.0, 1.0]) < 1e-3);
    }
    assert_eq!(sp.mixed_curvature_check(&p0(), [0.0, 0.0]), 0.0);
}

#[test]
fn ricci_examples() {
    let round = sphere(1, 1, 1.0).ricci(&p0());
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 2.0 } else { 0.0 };
            assert!((round[i][j] - want).abs() < 1e-6);
        }
    }
    let sp = sphere(2, 1, 1.0);
    let p = Point::new(FRAC_PI_4, 0.4, 1.9).unwrap();
    let (a, b) = sp.ricci_check(&p);
    assert!(a < 1e-3 && b < 1e-3);
    assert!((sp.scalar_curvature_fd(&p) - sp.scalar_curvature(&p)).abs() < 1e-3);
}

#[test]
fn eigenfield_laplacian_examples() {
    let pts = sample_points(50, 5);
    assert!(eigenfield_laplacian_check(&pts).unwrap() < 1e-3);
    let round = sphere(1, 1, 1.0);
    let lap = oracle::laplace_beltrami(&round, &p0(), |_| 1.0);
    assert!(lap.abs() < 1e-8);
    let f = SigmaFrameField::new(Weights::round(), 1);
    assert_eq!(f.jet(&p0()).coeffs[0], 0.0);
}

#[test]
fn identity_suite_passes_and_flags_bad_tolerances() {
    for (k, l) in ALL_WEIGHTS {
        for a in [1.0, 0.5, 2.0] {
            let r = run_identity_suite(&sphere(k, l, a), 40, 7, &Tolerances::default());
            assert!(r.passed, "({k},{l}) a={a}: {:?}", r.failures());
        }
    }
    let mut tight = Tolerances::default();
    tight.set("curl_sigma_x1", 1e-30).unwrap();
    let r = run_identity_suite(&sphere(3, 2, 1.0), 10, 1, &tight);
    assert!(!r.passed);
    assert!(tight.set("nonsense", 1.0).is_err());
    assert!(tight.set("curl_reeb", -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_orthonormal_everywhere(
        wi in 0usize..4,
        a in prop::sample::select(vec![1.0, 0.5, 2.0]),
        s in CHART_MARGIN..(FRAC_PI_2 - CHART_MARGIN),
        phi1 in 0.0..6.28f64,
        phi2 in 0.0..6.28f64,
    ) {
        let (k, l) = ALL_WEIGHTS[wi];
        let sp = sphere(k, l, a);
        let p = Point::new(s, phi1, phi2).unwrap();
        let e = sp.frame_at(&p).matrix();
        let gram = e.transpose() * sp.metric_at(&p) * e;
        prop_assert!((gram - Matrix3::identity()).abs().max() < 1e-10);
        prop_assert!(sp.structure_functions(&p).residual < PROJECTION_TOL);
    }

    #[test]
    fn phi_squared_is_minus_identity_on_contact_plane(f in -10.0..10.0f64, f1 in -10.0..10.0f64, f2 in -10.0..10.0f64) {
        let twice = phi_map(phi_map([f, f1, f2]));
        prop_assert_eq!(twice, [0.0, -f1, -f2]);
    }
}
