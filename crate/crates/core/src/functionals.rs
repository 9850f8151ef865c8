//! Global integrals over the weighted sphere: volume, energy, helicity, Hopf
//! invariant, Faddeev-Skyrme energy and first/second variation checks.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::sasaki_geometry::fields::{ReebField, ScaledField, SigmaFrameField};
use crate::sasaki_geometry::{
    connection_table, FieldEvaluator, FieldJet, Point, WeightedSphere, Weights,
};

pub const DEFAULT_NS: usize = 64;
pub const DEFAULT_NPHI: usize = 32;
/// Largest relative change allowed when the grid is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Eigenfield check applied before helicity and second variation.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionalError {
    #[error("quadrature needs n_s >= 2 and n_phi >= 1 (got {0}, {1})")]
    BadGrid(usize, usize),
    #[error("field is not a curl eigenfield with mu = {mu}: relative residual {residual:e}")]
    NotEigenfield { mu: f64, residual: f64 },
    #[error("eigenvalue must be nonzero")]
    ZeroEigenvalue,
    #[error("{quantity} changed by {change:e} (relative) when the grid was doubled")]
    NotConverged { quantity: &'static str, change: f64 },
}

/// Tensor grid: Gauss-Legendre in s on (0, pi/2) and uniform periodic rules in both angles.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub n_s: usize,
    pub n_phi: usize,
    pub s_nodes: Vec<f64>,
    pub s_weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(n_s: usize, n_phi: usize) -> Result<Self, FunctionalError> {
        if n_s < 2 || n_phi < 1 {
            return Err(FunctionalError::BadGrid(n_s, n_phi));
        }
        let rule = GaussLegendre::new(n_s).map_err(|_| FunctionalError::BadGrid(n_s, n_phi))?;
        let half = FRAC_PI_2 / 2.0;
        let mut pairs: Vec<(f64, f64)> = rule
            .iter()
            .map(|(x, w)| (half * (x + 1.0), half * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(QuadratureGrid {
            n_s,
            n_phi,
            s_nodes: pairs.iter().map(|p| p.0).collect(),
            s_weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn doubled(&self) -> Result<Self, FunctionalError> {
        QuadratureGrid::new(2 * self.n_s, 2 * self.n_phi)
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_phi as f64
    }

    /// Integral of `f(p) * weight` over the chart, where the caller supplies the
    /// density. Summation order is fixed so results are bit-stable.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&Point) -> f64 + Sync,
    {
        let dphi = TAU / self.n_phi as f64;
        let rows: Vec<f64> = (0..self.n_s)
            .into_par_iter()
            .map(|i| {
                let s = self.s_nodes[i];
                let mut acc = 0.0;
                for j in 0..self.n_phi {
                    for l in 0..self.n_phi {
                        acc += f(&Point::raw(s, self.angle(j), self.angle(l)));
                    }
                }
                acc * self.s_weights[i]
            })
            .collect();
        rows.iter().sum::<f64>() * dphi * dphi
    }

    /// Maximum of `f` over the grid nodes.
    pub fn max_over<F>(&self, f: F) -> f64
    where
        F: Fn(&Point) -> f64 + Sync,
    {
        (0..self.n_s)
            .into_par_iter()
            .map(|i| {
                let s = self.s_nodes[i];
                let mut m: f64 = 0.0;
                for j in 0..self.n_phi {
                    for l in 0..self.n_phi {
                        let v = f(&Point::raw(s, self.angle(j), self.angle(l)));
                        m = if v.is_nan() || m.is_nan() {
                            f64::NAN
                        } else {
                            m.max(v)
                        };
                    }
                }
                m
            })
            .collect::<Vec<f64>>()
            .into_iter()
            .fold(0.0, |m, v| {
                if v.is_nan() || m.is_nan() {
                    f64::NAN
                } else {
                    m.max(v)
                }
            })
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid::new(DEFAULT_NS, DEFAULT_NPHI).expect("default grid is valid")
    }
}

pub fn volume(sphere: &WeightedSphere, grid: &QuadratureGrid) -> f64 {
    grid.integrate(|p| sphere.volume_density(p))
}

/// Squared L2 norm of a field in the (deformed) metric and volume.
pub fn l2_norm_sq(
    field: &dyn FieldEvaluator,
    sphere: &WeightedSphere,
    grid: &QuadratureGrid,
) -> f64 {
    grid.integrate(|p| sphere.norm_sq(&field.jet(p).coeffs) * sphere.volume_density(p))
}

/// E(X) = (1/2) int |X|^2.
pub fn energy(field: &dyn FieldEvaluator, sphere: &WeightedSphere, grid: &QuadratureGrid) -> f64 {
    0.5 * l2_norm_sq(field, sphere, grid)
}

/// ||curl X - mu X|| / ||X|| on the grid (0 for the zero field).
pub fn eigen_residual(
    field: &dyn FieldEvaluator,
    mu: f64,
    sphere: &WeightedSphere,
    grid: &QuadratureGrid,
) -> f64 {
    let num = grid.integrate(|p| {
        let jet = field.jet(p);
        let c = sphere.curl_of_jet(&jet, p);
        let d = [
            c[0] - mu * jet.coeffs[0],
            c[1] - mu * jet.coeffs[1],
            c[2] - mu * jet.coeffs[2],
        ];
        sphere.norm_sq(&d) * sphere.volume_density(p)
    });
    let den = l2_norm_sq(field, sphere, grid);
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).sqrt()
}

fn require_eigenfield(
    field: &dyn FieldEvaluator,
    mu: f64,
    sphere: &WeightedSphere,
    grid: &QuadratureGrid,
) -> Result<(), FunctionalError> {
    let residual = eigen_residual(field, mu, sphere, grid);
    if residual.is_nan() || residual > EIGEN_RESIDUAL_TOL {
        return Err(FunctionalError::NotEigenfield { mu, residual });
    }
    Ok(())
}

/// Helicity (curl^{-1} X, X) of a verified eigenfield: ||X||^2 / mu.
pub fn helicity_eigenfield(
    field: &dyn FieldEvaluator,
    mu: f64,
    sphere: &WeightedSphere,
    grid: &QuadratureGrid,
) -> Result<f64, FunctionalError> {
    if mu == 0.0 {
        return Err(FunctionalError::ZeroEigenvalue);
    }
    require_eigenfield(field, mu, sphere, grid)?;
    Ok(l2_norm_sq(field, sphere, grid) / mu)
}

/// d eta(X1, X2) = -eta([X1, X2]) on the undeformed sphere, read off the bracket.
fn d_eta_12(sphere: &WeightedSphere, p: &Point) -> f64 {
    -sphere.frame_brackets(p)[2][0]
}

/// Q = int A ^ dA with A = -(k l / 2 pi) eta, i.e. (k l / 2 pi)^2 int eta ^ d eta.
pub fn hopf_invariant(weights: Weights, grid: &QuadratureGrid) -> f64 {
    let sphere = WeightedSphere::undeformed(weights);
    let kl = (weights.k() * weights.l()) as f64;
    let integral = grid.integrate(|p| d_eta_12(&sphere, p) * sphere.volume_density(p));
    (kl / TAU).powi(2) * integral
}

/// (F, bound) with F = (1/2) int |pi* Omega|^2, pi* Omega = d eta / 2, and
/// bound = (Area^2 / 2) * 2 * Q with Area = pi / (k l).
pub fn skyrme_energy_and_bound(weights: Weights, grid: &QuadratureGrid) -> (f64, f64) {
    let sphere = WeightedSphere::undeformed(weights);
    let f =
        0.5 * grid.integrate(|p| (0.5 * d_eta_12(&sphere, p)).powi(2) * sphere.volume_density(p));
    let area = PI / (weights.k() * weights.l()) as f64;
    let bound = 0.5 * area * area * 2.0 * hopf_invariant(weights, grid);
    (f, bound)
}

/// Deformed-frame coefficients and derivatives of a jet.
fn deformed(sphere: &WeightedSphere, jet: &FieldJet) -> ([f64; 3], [[f64; 3]; 3]) {
    let sc = sphere.scales();
    let mut f = [0.0; 3];
    let mut d = [[0.0; 3]; 3];
    for i in 0..3 {
        f[i] = jet.coeffs[i] * sc[i];
        for j in 0..3 {
            d[i][j] = jet.frame_derivs[i][j] * sc[i] / sc[j];
        }
    }
    (f, d)
}

/// Pointwise |nabla_X X - (1/2) grad |X|^2| in the deformed metric.
pub fn first_variation_defect(
    field: &dyn FieldEvaluator,
    sphere: &WeightedSphere,
    p: &Point,
) -> f64 {
    let gamma = connection_table(sphere.structure_functions(p).as_array(), true);
    let (f, d) = deformed(sphere, &field.jet(p));
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            *o += f[j] * d[k][j];
            for i in 0..3 {
                *o += f[j] * f[i] * gamma[j][i][k];
            }
            *o -= f[j] * d[j][k];
        }
    }
    (out[0] * out[0] + out[1] * out[1] + out[2] * out[2]).sqrt()
}

pub fn first_variation_residual(
    field: &dyn FieldEvaluator,
    sphere: &WeightedSphere,
    grid: &QuadratureGrid,
) -> f64 {
    grid.max_over(|p| first_variation_defect(field, sphere, p))
}

/// nabla_{xi'} v in the deformed frame.
fn reeb_derivative(sphere: &WeightedSphere, jet: &FieldJet, p: &Point) -> [f64; 3] {
    let gamma = connection_table(sphere.structure_functions(p).as_array(), true);
    let (f, d) = deformed(sphere, jet);
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = d[k][0] + (0..3).map(|i| f[i] * gamma[0][i][k]).sum::<f64>();
    }
    out
}

/// int (|nabla_xi v|^2 - |v|^2) for a verified D-tangent eigenfield v with eigenvalue mu.
pub fn second_variation(
    field: &dyn FieldEvaluator,
    mu: f64,
    sphere: &WeightedSphere,
    grid: &QuadratureGrid,
) -> Result<f64, FunctionalError> {
    require_eigenfield(field, mu, sphere, grid)?;
    Ok(grid.integrate(|p| {
        let jet = field.jet(p);
        let dv = reeb_derivative(sphere, &jet, p);
        let dv2: f64 = dv.iter().map(|x| x * x).sum();
        (dv2 - sphere.norm_sq(&jet.coeffs)) * sphere.volume_density(p)
    }))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SecondVariationEntry {
    pub field: String,
    pub a: f64,
    pub mu: f64,
    pub value: f64,
    pub expected: f64,
    pub norm_sq: f64,
    /// |value - expected| / max(|expected|, |v|^2)
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FunctionalReport {
    pub weights: Weights,
    pub a: f64,
    pub n_s: usize,
    pub n_phi: usize,
    pub volume: f64,
    pub volume_exact: f64,
    pub energy: f64,
    pub helicity: f64,
    pub hopf_q: f64,
    pub skyrme_f: f64,
    pub bound_rhs: f64,
    pub first_variation_reeb: f64,
    pub first_variation_eigenfield: f64,
    pub second_variation: Vec<SecondVariationEntry>,
}

pub const SIGMA_X1_LABEL: &str = "sigma^(3/2) X1";

/// Second variation of the deformed Reeb field along sigma^(3/2) X1.
pub fn second_variation_entry(
    weights: Weights,
    a: f64,
    grid: &QuadratureGrid,
) -> Result<SecondVariationEntry, FunctionalError> {
    let sphere = WeightedSphere::new(weights, a).expect("positive deformation");
    let v = SigmaFrameField::new(weights, 1);
    let mu = weights.sum() / a;
    let value = second_variation(&v, mu, &sphere, grid)?;
    let norm_sq = l2_norm_sq(&v, &sphere, grid);
    let expected = mu * (mu - 2.0) * norm_sq;
    Ok(SecondVariationEntry {
        field: SIGMA_X1_LABEL.to_string(),
        a,
        mu,
        value,
        expected,
        norm_sq,
        // Measured against |v|^2 as well, so mu = 2 (expected value 0) stays finite.
        relative_error: (value - expected).abs() / expected.abs().max(norm_sq),
    })
}

fn check_converged(quantity: &'static str, coarse: f64, fine: f64) -> Result<(), FunctionalError> {
    let change = (coarse - fine).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if change.is_nan() || change >= CONVERGENCE_TOL {
        return Err(FunctionalError::NotConverged { quantity, change });
    }
    Ok(())
}

/// Full report for weights `w` and deformation `a`, after a grid-doubling check
/// of volume, Q and F.
pub fn functional_report(
    weights: Weights,
    a: f64,
    grid: &QuadratureGrid,
) -> Result<FunctionalReport, FunctionalError> {
    let sphere = WeightedSphere::new(weights, a).expect("positive deformation");
    let fine = grid.doubled()?;
    let vol = volume(&sphere, grid);
    check_converged("volume", vol, volume(&sphere, &fine))?;
    let q = hopf_invariant(weights, grid);
    check_converged("hopf invariant", q, hopf_invariant(weights, &fine))?;
    let (f, bound) = skyrme_energy_and_bound(weights, grid);
    check_converged(
        "skyrme energy",
        f,
        skyrme_energy_and_bound(weights, &fine).0,
    )?;

    let reeb = ScaledField(ReebField, 1.0 / a);
    let eigen = SigmaFrameField::new(weights, 1);
    Ok(FunctionalReport {
        weights,
        a,
        n_s: grid.n_s,
        n_phi: grid.n_phi,
        volume: vol,
        volume_exact: a * a * 2.0 * PI * PI / (weights.k() * weights.l()) as f64,
        energy: energy(&reeb, &sphere, grid),
        helicity: helicity_eigenfield(&reeb, 2.0, &sphere, grid)?,
        hopf_q: q,
        skyrme_f: f,
        bound_rhs: bound,
        first_variation_reeb: first_variation_residual(&reeb, &sphere, grid),
        first_variation_eigenfield: first_variation_residual(&eigen, &sphere, grid),
        second_variation: vec![second_variation_entry(weights, a, grid)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sasaki_geometry::fields::ZeroField;

    fn w(k: i64, l: i64) -> Weights {
        Weights::new(k, l).unwrap()
    }

    fn sphere(k: i64, l: i64, a: f64) -> WeightedSphere {
        WeightedSphere::new(w(k, l), a).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn grid_nodes_stay_inside_the_chart() {
        let g = QuadratureGrid::default();
        assert!(g.s_nodes[0] > 0.0 && *g.s_nodes.last().unwrap() < FRAC_PI_2);
        assert!((g.s_weights.iter().sum::<f64>() - FRAC_PI_2).abs() < 1e-13);
        assert!(QuadratureGrid::new(1, 4).is_err());
        // uniform rule integrates cos(3 phi)^2 exactly at n_phi = 8
        let g = QuadratureGrid::new(4, 8).unwrap();
        let v = g.integrate(|p| (3.0 * p.phi1).cos().powi(2));
        assert!((v - FRAC_PI_2 * TAU * PI).abs() < 1e-12);
    }

    #[test]
    fn volume_examples() {
        let g = QuadratureGrid::default();
        assert!(rel(volume(&sphere(1, 1, 1.0), &g), 2.0 * PI * PI) < 1e-12);
        assert!(rel(volume(&sphere(2, 1, 1.0), &g), PI * PI) < 1e-12);
        assert!(rel(volume(&sphere(3, 2, 1.0), &g), PI * PI / 3.0) < 1e-12);
    }

    #[test]
    fn energy_examples() {
        let g = QuadratureGrid::default();
        for (k, l) in [(1, 1), (2, 1), (3, 2)] {
            let e = energy(&ReebField, &sphere(k, l, 1.0), &g);
            assert!(rel(e, PI * PI / (k * l) as f64) < 1e-12);
        }
        let e = energy(&ScaledField(ReebField, 0.5), &sphere(1, 1, 2.0), &g);
        assert!(rel(e, 4.0 * PI * PI) < 1e-12);
        assert_eq!(energy(&ZeroField, &sphere(2, 1, 1.0), &g), 0.0);
    }

    #[test]
    fn helicity_examples() {
        let g = QuadratureGrid::default();
        let sp = sphere(2, 1, 1.0);
        let h = helicity_eigenfield(&ReebField, 2.0, &sp, &g).unwrap();
        assert!(rel(h, PI * PI / 2.0) < 1e-12);
        assert!((h - energy(&ReebField, &sp, &g)).abs() < 1e-12);
        let v = SigmaFrameField::new(w(2, 1), 1);
        let hv = helicity_eigenfield(&v, 3.0, &sp, &g).unwrap();
        assert!(rel(hv, l2_norm_sq(&v, &sp, &g) / 3.0) < 1e-14);
        assert_eq!(helicity_eigenfield(&ZeroField, 2.0, &sp, &g).unwrap(), 0.0);
        assert!(matches!(
            helicity_eigenfield(&v, 2.0, &sp, &g),
            Err(FunctionalError::NotEigenfield { .. })
        ));
    }

    #[test]
    fn sigma_field_norm_matches_radial_integral() {
        // ||sigma^(3/2) X1||^2 = 4 pi^2 int sigma^3 sin s cos s / sigma^2 ds, done in t = sin^2 s
        let g = QuadratureGrid::default();
        let (k, l) = (2.0, 1.0);
        let n = l2_norm_sq(&SigmaFrameField::new(w(2, 1), 1), &sphere(2, 1, 1.0), &g);
        let exact = 4.0 * PI * PI * 0.5 * (l + (k - l) * 0.5);
        assert!(rel(n, exact) < 1e-12);
    }

    #[test]
    fn hopf_invariant_examples() {
        let g = QuadratureGrid::default();
        for (k, l) in [(1, 1), (2, 1), (3, 2), (5, 3), (7, 4)] {
            let q = hopf_invariant(w(k, l), &g);
            assert!((q - (k * l) as f64).abs() < 1e-6, "({k},{l}): {q}");
        }
    }

    #[test]
    fn skyrme_examples() {
        let g = QuadratureGrid::default();
        for (k, l) in [(2, 1), (1, 1), (5, 3)] {
            let (f, b) = skyrme_energy_and_bound(w(k, l), &g);
            let want = PI * PI / (k * l) as f64;
            assert!((f - want).abs() < 1e-6 && (b - want).abs() < 1e-6);
            assert!(f >= b - 1e-6);
        }
    }

    #[test]
    fn first_variation_examples() {
        let g = QuadratureGrid::new(16, 8).unwrap();
        let sp = sphere(2, 1, 1.0);
        assert!(first_variation_residual(&ReebField, &sp, &g) < 1e-12);
        let v = SigmaFrameField::new(w(2, 1), 1);
        assert!(first_variation_residual(&v, &sp, &g) < 1e-6);
        let x1 = FieldFromFrame;
        assert!(first_variation_residual(&x1, &sp, &g) > 1e-3);
    }

    /// X1 alone: not a Beltrami field off the round sphere.
    struct FieldFromFrame;

    impl FieldEvaluator for FieldFromFrame {
        fn jet(&self, _p: &Point) -> FieldJet {
            FieldJet {
                coeffs: [0.0, 1.0, 0.0],
                frame_derivs: [[0.0; 3]; 3],
            }
        }
    }

    #[test]
    fn second_variation_examples() {
        let g = QuadratureGrid::default();
        let plus = second_variation_entry(w(2, 1), 1.0, &g).unwrap();
        assert!(plus.value > 0.0 && plus.relative_error < 1e-4);
        assert!(rel(plus.value, 3.0 * plus.norm_sq) < 1e-4);
        let minus = second_variation_entry(w(2, 1), 2.0, &g).unwrap();
        assert!(minus.value < 0.0 && rel(minus.value, -0.75 * minus.norm_sq) < 1e-4);
        let zero = second_variation(&ZeroField, 3.0, &sphere(2, 1, 1.0), &g).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn second_variation_vanishes_at_the_round_threshold() {
        let e = second_variation_entry(w(1, 1), 1.0, &QuadratureGrid::default()).unwrap();
        assert_eq!(e.expected, 0.0);
        assert!(e.value.abs() < 1e-8 * e.norm_sq);
        assert!(e.relative_error < 1e-8);
    }

    #[test]
    fn second_variation_sign_flips_across_threshold() {
        let g = QuadratureGrid::default();
        let below = second_variation_entry(w(2, 1), 21.0 / 16.0, &g).unwrap();
        let above = second_variation_entry(w(2, 1), 27.0 / 16.0, &g).unwrap();
        assert!(below.value > 0.0 && above.value < 0.0);
        assert!(below.relative_error < 1e-4 && above.relative_error < 1e-4);
    }

    #[test]
    fn report_is_bit_stable() {
        let g = QuadratureGrid::default();
        let a = functional_report(w(3, 2), 1.0, &g).unwrap();
        let b = functional_report(w(3, 2), 1.0, &g).unwrap();
        assert_eq!(a, b);
    }
}
