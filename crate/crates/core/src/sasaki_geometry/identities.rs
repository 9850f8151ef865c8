//! Randomized identity suite over interior points of the weighted sphere.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::fields::{PhiField, ReebField, RoundAntiReeb, SigmaFrameField, SigmaGradient};
use super::{norm3, oracle, sub3, FieldEvaluator, Point, WeightedSphere, Weights, CHART_MARGIN};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("tolerance for {0} must be positive")]
    BadTolerance(String),
    #[error("round-sphere field fails curl R = -2R (deviation {0:e})")]
    AntiReebConstruction(f64),
}

/// Default tolerance for every identity the suite knows about.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("frame_orthonormality", 1e-10),
    ("structure_projection", 1e-8),
    ("curl_reeb", 1e-8),
    ("curl_sigma_x1", 1e-8),
    ("curl_sigma_x2", 1e-8),
    ("curl_phi_eigenfield", 1e-8),
    ("curl_gradient", 1e-8),
    ("div_reeb", 1e-8),
    ("div_sigma_x1", 1e-8),
    ("div_sigma_x2", 1e-8),
    ("div_gradient_laplacian", 1e-4),
    ("nabla_x1_reeb", 1e-6),
    ("xi_scalar_curvature", 1e-8),
    ("integrability", 1e-4),
    ("scalar_curvature_trace", 1e-3),
    ("mixed_curvature", 1e-3),
    ("ricci_reeb", 1e-3),
    ("ricci_contact", 1e-3),
    ("phi_sectional", 1e-3),
    ("round_structure", 1e-8),
    ("round_scalar_curvature", 1e-3),
    ("round_anti_reeb_curl", 1e-6),
    ("round_eigenfunction_laplacian", 1e-3),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(
            DEFAULT_TOLERANCES
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
        )
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), IdentityError> {
        if !self.0.contains_key(name) {
            return Err(IdentityError::UnknownIdentity(name.to_string()));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(IdentityError::BadTolerance(name.to_string()));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IdentityReport {
    pub weights: Weights,
    pub a: f64,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
    pub passed: bool,
}

impl IdentityReport {
    pub fn failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Uniform samples with s in [1e-3, pi/2 - 1e-3] and both angles in [0, 2 pi).
pub fn sample_points(count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = rng.gen_range(CHART_MARGIN..=FRAC_PI_2 - CHART_MARGIN);
            Point::raw(s, rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU))
        })
        .collect()
}

fn eigen_deviation(sphere: &WeightedSphere, field: &dyn FieldEvaluator, mu: f64, p: &Point) -> f64 {
    let curl = sphere.curl(field, p);
    let coeffs = field.jet(p).coeffs;
    norm3(&[
        curl[0] - mu * coeffs[0],
        curl[1] - mu * coeffs[1],
        curl[2] - mu * coeffs[2],
    ])
}

fn gram_deviation(sphere: &WeightedSphere, p: &Point) -> f64 {
    let e = sphere.frame_at(p).matrix();
    let gram = e.transpose() * sphere.metric_at(p) * e;
    (gram - Matrix3::identity()).abs().max()
}

fn metric_norm(sphere: &WeightedSphere, p: &Point, v: [f64; 3]) -> f64 {
    let v = Vector3::from(v);
    (v.transpose() * sphere.metric_at(p) * v)[0].max(0.0).sqrt()
}

/// |nabla_{X1} xi - X2| in the metric, with the covariant derivative taken from
/// finite-differenced Christoffel symbols of the (deformed) metric.
pub fn nabla_x1_reeb_deviation(sphere: &WeightedSphere, p: &Point) -> f64 {
    let frame = sphere.frame_at(p);
    let xi = frame.xi;
    let got = oracle::covariant_derivative(sphere, p, frame.x1, |_| xi);
    metric_norm(sphere, p, sub3(&got, &frame.x2))
}

/// Deviations of one point, keyed like `DEFAULT_TOLERANCES`.
fn point_deviations(sphere: &WeightedSphere, p: &Point) -> Vec<(&'static str, f64)> {
    let w = sphere.weights;
    let mu_d = w.sum() / sphere.a;
    let sx1 = SigmaFrameField::new(w, 1);
    let sx2 = SigmaFrameField::new(w, 2);
    let grad = SigmaGradient { weights: w };
    let sc = sphere.structure_functions(p);
    let scal = sphere.scalar_curvature(p);

    let laplacian = oracle::laplace_beltrami(sphere, p, |q| w.sigma(q.s));
    // the deformed gradient of sigma is grad(sigma) / a since xi(sigma) = 0
    let div_grad = sphere.divergence(&grad, p) / sphere.a;

    let xi_step = 1e-4;
    let frame = sphere.frame_at(p);
    let xi_scal = {
        let shift = |t: f64| {
            let c = p.coords();
            Point::raw(
                c[0] + t * frame.xi[0],
                c[1] + t * frame.xi[1],
                c[2] + t * frame.xi[2],
            )
        };
        (sphere.scalar_curvature(&shift(xi_step)) - sphere.scalar_curvature(&shift(-xi_step)))
            / (2.0 * xi_step)
    };

    let ints = sphere.integrability_residuals(p);
    let (ric_reeb, ric_contact) = sphere.ricci_check(p);
    let mixed = sphere
        .mixed_curvature_check(p, [1.0, 0.0])
        .max(sphere.mixed_curvature_check(p, [0.0, 1.0]))
        .max(sphere.mixed_curvature_check(p, [0.6, -0.8]));

    vec![
        ("frame_orthonormality", gram_deviation(sphere, p)),
        ("structure_projection", sc.residual),
        ("curl_reeb", eigen_deviation(sphere, &ReebField, 2.0, p)),
        ("curl_sigma_x1", eigen_deviation(sphere, &sx1, mu_d, p)),
        ("curl_sigma_x2", eigen_deviation(sphere, &sx2, mu_d, p)),
        (
            "curl_phi_eigenfield",
            eigen_deviation(sphere, &PhiField(sx1), mu_d, p),
        ),
        ("curl_gradient", norm3(&sphere.curl(&grad, p))),
        ("div_reeb", sphere.divergence(&ReebField, p).abs()),
        ("div_sigma_x1", sphere.divergence(&sx1, p).abs()),
        ("div_sigma_x2", sphere.divergence(&sx2, p).abs()),
        ("div_gradient_laplacian", (div_grad - laplacian).abs()),
        ("nabla_x1_reeb", nabla_x1_reeb_deviation(sphere, p)),
        ("xi_scalar_curvature", xi_scal.abs()),
        ("integrability", ints[0].abs().max(ints[1].abs())),
        (
            "scalar_curvature_trace",
            (sphere.scalar_curvature_fd(p) - scal).abs(),
        ),
        ("mixed_curvature", mixed),
        ("ricci_reeb", ric_reeb),
        ("ricci_contact", ric_contact),
        (
            "phi_sectional",
            (sphere.phi_sectional(p) - (scal - 4.0) / 2.0).abs(),
        ),
    ]
}

fn round_deviations(sphere: &WeightedSphere, p: &Point) -> Vec<(&'static str, f64)> {
    let c = sphere.structure_functions(p);
    let lap = eigenfunction_laplacian_residual(p);
    vec![
        ("round_structure", norm3(&[c.c0 - 1.0, c.c1, c.c2])),
        (
            "round_scalar_curvature",
            (sphere.scalar_curvature_fd(p) - 6.0).abs(),
        ),
        (
            "round_anti_reeb_curl",
            eigen_deviation(sphere, &RoundAntiReeb, -2.0, p),
        ),
        ("round_eigenfunction_laplacian", lap),
    ]
}

/// |Delta f - 8 f| for f = eta(R), R = d_phi1 - d_phi2 on the round sphere, with
/// Delta = -div grad evaluated by the coordinate finite-difference oracle.
pub fn eigenfunction_laplacian_residual(p: &Point) -> f64 {
    let round = WeightedSphere::undeformed(Weights::round());
    let f = |q: &Point| RoundAntiReeb.jet(q).coeffs[0];
    let delta = -oracle::laplace_beltrami(&round, p, f);
    (delta - 8.0 * f(p)).abs()
}

/// Maximum of |Delta f - 8 f| over `points`, after checking curl R = -2R there.
pub fn eigenfield_laplacian_check(points: &[Point]) -> Result<f64, IdentityError> {
    let round = WeightedSphere::undeformed(Weights::round());
    let construction = points
        .iter()
        .map(|p| eigen_deviation(&round, &RoundAntiReeb, -2.0, p))
        .fold(0.0, f64::max);
    if construction > 1e-6 {
        return Err(IdentityError::AntiReebConstruction(construction));
    }
    Ok(points
        .iter()
        .map(eigenfunction_laplacian_residual)
        .fold(0.0, f64::max))
}

pub fn run_identity_suite(
    sphere: &WeightedSphere,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> IdentityReport {
    let points = sample_points(samples, seed);
    let round = sphere.weights == Weights::round() && sphere.a == 1.0;
    let per_point: Vec<Vec<(&'static str, f64)>> = points
        .par_iter()
        .map(|p| {
            let mut d = point_deviations(sphere, p);
            if round {
                d.extend(round_deviations(sphere, p));
            }
            d
        })
        .collect();

    let mut worst: BTreeMap<&'static str, f64> = BTreeMap::new();
    for devs in &per_point {
        for &(name, v) in devs {
            let e = worst.entry(name).or_insert(0.0);
            // NaN must fail loudly rather than vanish in max()
            *e = if v.is_nan() || e.is_nan() {
                f64::NAN
            } else {
                e.max(v)
            };
        }
    }
    let checks: Vec<IdentityCheck> = DEFAULT_TOLERANCES
        .iter()
        .filter_map(|&(name, _)| {
            worst.get(name).map(|&dev| {
                let tolerance = tol.get(name);
                IdentityCheck {
                    name: name.to_string(),
                    max_deviation: dev,
                    tolerance,
                    passed: dev <= tolerance,
                }
            })
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    IdentityReport {
        weights: sphere.weights,
        a: sphere.a,
        samples,
        seed,
        checks,
        passed,
    }
}
