//! Pointwise geometry of the weighted Sasakian 3-sphere in Hopf coordinates
//! (s, phi1, phi2), with optional D-homothetic deformation by a constant `a`.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{Matrix3, Vector3};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod fields;
pub mod identities;
pub mod oracle;

pub use fields::{DerivativeKind, FieldEvaluator, FieldJet};

/// Pointwise operations refuse points closer than this to the Hopf circles s = 0, pi/2.
pub const CHART_MARGIN: f64 = 1e-3;
/// Coordinate step for finite differences of structure functions.
pub const CURVATURE_STEP: f64 = 1e-4;
/// Tolerance on the bracket projection residual.
pub const PROJECTION_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("weights ({k}, {l}) must be coprime with 1 <= l <= k")]
    BadWeights { k: i64, l: i64 },
    #[error("s = {0} lies outside the chart interior [1e-3, pi/2 - 1e-3]")]
    OffChart(f64),
    #[error("deformation constant {0} must be positive and finite")]
    BadDeformation(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    k: i64,
    l: i64,
}

impl Weights {
    pub fn new(k: i64, l: i64) -> Result<Self, GeometryError> {
        if l < 1 || k < l || k.gcd(&l) != 1 {
            return Err(GeometryError::BadWeights { k, l });
        }
        Ok(Weights { k, l })
    }

    pub fn round() -> Self {
        Weights { k: 1, l: 1 }
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    pub fn lf(&self) -> f64 {
        self.l as f64
    }

    /// The first D-tangent curl eigenvalue k + l of the undeformed structure.
    pub fn sum(&self) -> f64 {
        (self.k + self.l) as f64
    }

    /// sigma(s) = l cos^2 s + k sin^2 s.
    pub fn sigma(&self, s: f64) -> f64 {
        let (sn, cs) = s.sin_cos();
        self.lf() * cs * cs + self.kf() * sn * sn
    }

    pub fn sigma_ds(&self, s: f64) -> f64 {
        (self.kf() - self.lf()) * (2.0 * s).sin()
    }

    pub fn sigma_dss(&self, s: f64) -> f64 {
        2.0 * (self.kf() - self.lf()) * (2.0 * s).cos()
    }

    /// Closed-form scalar curvature of the undeformed metric.
    pub fn scalar_curvature(&self, s: f64) -> f64 {
        let (k, l) = (self.kf(), self.lf());
        6.0 - 8.0 * (1.0 + k + l - 3.0 * k * l / self.sigma(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub s: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl Point {
    /// Validated chart point; angles are reduced into [0, 2 pi).
    pub fn new(s: f64, phi1: f64, phi2: f64) -> Result<Self, GeometryError> {
        if !(CHART_MARGIN..=FRAC_PI_2 - CHART_MARGIN).contains(&s) {
            return Err(GeometryError::OffChart(s));
        }
        Ok(Point {
            s,
            phi1: phi1.rem_euclid(TAU),
            phi2: phi2.rem_euclid(TAU),
        })
    }

    /// Unchecked point, for quadrature nodes and finite-difference stencils.
    pub fn raw(s: f64, phi1: f64, phi2: f64) -> Self {
        Point { s, phi1, phi2 }
    }

    pub fn psi(&self) -> f64 {
        self.phi1 + self.phi2
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.s, self.phi1, self.phi2]
    }

    pub fn shifted(&self, axis: usize, h: f64) -> Point {
        let mut c = self.coords();
        c[axis] += h;
        Point::raw(c[0], c[1], c[2])
    }
}

/// Coordinate components of (xi, X1, X2) in the basis (d_s, d_phi1, d_phi2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub xi: [f64; 3],
    pub x1: [f64; 3],
    pub x2: [f64; 3],
}

impl Frame {
    pub fn vectors(&self) -> [[f64; 3]; 3] {
        [self.xi, self.x1, self.x2]
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[
            Vector3::from(self.xi),
            Vector3::from(self.x1),
            Vector3::from(self.x2),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureFunctions {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Largest bracket component outside the allowed pattern.
    pub residual: f64,
}

impl StructureFunctions {
    pub fn as_array(&self) -> [f64; 3] {
        [self.c0, self.c1, self.c2]
    }
}

/// `gamma[i][j][k]`: component along e_k of nabla_{e_i} e_j, frame order (xi, X1, X2).
pub type Connection = [[[f64; 3]; 3]; 3];
/// `r[i][j][l][n]`: component along e_n of R(e_i, e_j) e_l.
pub type Curvature = [[[[f64; 3]; 3]; 3]; 3];

/// Connection coefficients of a Sasakian adapted frame with structure functions `c`.
/// With `constants = false` only the parts linear in `c` are kept, which is what
/// a directional derivative of the table sees.
pub fn connection_table(c: [f64; 3], constants: bool) -> Connection {
    let one = if constants { 1.0 } else { 0.0 };
    let [c0, c1, c2] = c;
    let mut g = [[[0.0; 3]; 3]; 3];
    g[0][1][2] = -c0;
    g[0][2][1] = c0;
    g[1][0][2] = one;
    g[1][1][2] = -c1;
    g[1][2][0] = -one;
    g[1][2][1] = c1;
    g[2][0][1] = -one;
    g[2][1][0] = one;
    g[2][1][2] = -c2;
    g[2][2][1] = c2;
    g
}

/// phi on adapted-frame coefficients: phi(xi) = 0, phi(X1) = -X2, phi(X2) = X1.
pub fn phi_map(c: [f64; 3]) -> [f64; 3] {
    [0.0, c[2], -c[1]]
}

/// The weighted sphere with weights `w`, D-homothetically deformed by `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSphere {
    pub weights: Weights,
    pub a: f64,
}

impl WeightedSphere {
    pub fn new(weights: Weights, a: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(GeometryError::BadDeformation(a));
        }
        Ok(WeightedSphere { weights, a })
    }

    pub fn undeformed(weights: Weights) -> Self {
        WeightedSphere { weights, a: 1.0 }
    }

    /// Frame scale factors: the deformed frame is (xi / a, X1 / sqrt a, X2 / sqrt a).
    pub fn scales(&self) -> [f64; 3] {
        let r = self.a.sqrt();
        [self.a, r, r]
    }

    pub fn sigma(&self, p: &Point) -> f64 {
        self.weights.sigma(p.s)
    }

    /// Contact form eta in coordinates.
    pub fn eta_coords(&self, p: &Point) -> [f64; 3] {
        let sig = self.sigma(p);
        let (sn, cs) = p.s.sin_cos();
        [0.0, cs * cs / sig, sn * sn / sig]
    }

    /// g' = a g_w + a (a - 1) eta (x) eta.
    pub fn metric_at(&self, p: &Point) -> Matrix3<f64> {
        let w = &self.weights;
        let sig = self.sigma(p);
        let (sn, cs) = p.s.sin_cos();
        let eta = Vector3::from(self.eta_coords(p));
        let beta = Vector3::new(0.0, w.kf(), -w.lf());
        let mut g = Matrix3::zeros();
        g[(0, 0)] = 1.0 / sig;
        g += beta * beta.transpose() * (sn * sn * cs * cs / sig.powi(3));
        g += eta * eta.transpose();
        g * self.a + eta * eta.transpose() * (self.a * (self.a - 1.0))
    }

    /// Undeformed frame together with coordinate Jacobians `jac[v][c][d] = d_d v^c`.
    pub fn base_frame_jet(&self, p: &Point) -> (Frame, [[[f64; 3]; 3]; 3]) {
        let w = &self.weights;
        let sig = self.sigma(p);
        let r = sig.sqrt();
        let rs = w.sigma_ds(p.s) / (2.0 * r);
        let t = p.s.tan();
        let ct = 1.0 / t;
        let (sp, cp) = p.psi().sin_cos();
        let dt = 1.0 + t * t;
        let dct = -(1.0 + ct * ct);

        let xi = [0.0, w.lf(), w.kf()];
        let x1 = [r * cp, r * sp * t, -r * sp * ct];
        let x2 = [r * sp, -r * cp * t, r * cp * ct];

        let x1_s = [rs * cp, sp * (rs * t + r * dt), -sp * (rs * ct + r * dct)];
        let x1_psi = [-r * sp, r * cp * t, -r * cp * ct];
        let x2_s = [rs * sp, -cp * (rs * t + r * dt), cp * (rs * ct + r * dct)];
        let x2_psi = [r * cp, r * sp * t, -r * sp * ct];

        let mut jac = [[[0.0; 3]; 3]; 3];
        for c in 0..3 {
            jac[1][c] = [x1_s[c], x1_psi[c], x1_psi[c]];
            jac[2][c] = [x2_s[c], x2_psi[c], x2_psi[c]];
        }
        (Frame { xi, x1, x2 }, jac)
    }

    pub fn base_frame(&self, p: &Point) -> Frame {
        self.base_frame_jet(p).0
    }

    /// The deformed orthonormal frame (xi / a, X1 / sqrt a, X2 / sqrt a).
    pub fn frame_at(&self, p: &Point) -> Frame {
        let f = self.base_frame(p);
        let sc = self.scales();
        let div = |v: [f64; 3], d: f64| [v[0] / d, v[1] / d, v[2] / d];
        Frame {
            xi: div(f.xi, sc[0]),
            x1: div(f.x1, sc[1]),
            x2: div(f.x2, sc[2]),
        }
    }

    /// Coordinate brackets of the deformed frame, projected back onto it.
    /// Rows are [xi, X1], [X2, xi], [X1, X2] in frame coefficients.
    pub fn frame_brackets(&self, p: &Point) -> [[f64; 3]; 3] {
        let (frame, jac) = self.base_frame_jet(p);
        let sc = self.scales();
        let vecs = frame.vectors();
        let bracket = |u: usize, v: usize| -> Vector3<f64> {
            let mut out = Vector3::zeros();
            for c in 0..3 {
                let mut acc = 0.0;
                for d in 0..3 {
                    acc += vecs[u][d] * jac[v][c][d] - vecs[v][d] * jac[u][c][d];
                }
                out[c] = acc / (sc[u] * sc[v]);
            }
            out
        };
        let deformed = self.frame_at(p).matrix();
        let inv = deformed
            .try_inverse()
            .expect("adapted frame is invertible at interior points");
        let proj = |v: Vector3<f64>| {
            let c = inv * v;
            [c[0], c[1], c[2]]
        };
        [
            proj(bracket(0, 1)),
            proj(bracket(2, 0)),
            proj(bracket(1, 2)),
        ]
    }

    /// (C0, C1, C2) read off the frame brackets:
    /// [xi, X1] = -(C0 + 1) X2, [X2, xi] = -(C0 + 1) X1, [X1, X2] = -2 xi + C1 X1 + C2 X2.
    pub fn structure_functions(&self, p: &Point) -> StructureFunctions {
        let [b01, b20, b12] = self.frame_brackets(p);
        let c0 = -b01[2] - 1.0;
        let residual = [
            b01[0].abs(),
            b01[1].abs(),
            b20[0].abs(),
            b20[2].abs(),
            (b20[1] - b01[2]).abs(),
            (b12[0] + 2.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        StructureFunctions {
            c0,
            c1: b12[1],
            c2: b12[2],
            residual,
        }
    }

    pub fn connection(&self, p: &Point) -> Connection {
        connection_table(self.structure_functions(p).as_array(), true)
    }

    /// Scalar curvature of the (deformed) metric in closed form.
    pub fn scalar_curvature(&self, p: &Point) -> f64 {
        (self.weights.scalar_curvature(p.s) + 2.0) / self.a - 2.0
    }

    /// Coordinate gradient of the structure functions by central differences.
    fn structure_gradient(&self, p: &Point, h: f64) -> [[f64; 3]; 3] {
        let mut grad = [[0.0; 3]; 3];
        for axis in 0..3 {
            let plus = self.structure_functions(&p.shifted(axis, h)).as_array();
            let minus = self.structure_functions(&p.shifted(axis, -h)).as_array();
            for (c, g) in grad.iter_mut().enumerate() {
                g[axis] = (plus[c] - minus[c]) / (2.0 * h);
            }
        }
        grad
    }

    /// Derivatives of (C0, C1, C2) along the deformed frame: `out[j][c] = e_j(C_c)`.
    pub fn structure_frame_derivatives(&self, p: &Point, h: f64) -> [[f64; 3]; 3] {
        let grad = self.structure_gradient(p, h);
        let frame = self.frame_at(p).vectors();
        let mut out = [[0.0; 3]; 3];
        for j in 0..3 {
            for c in 0..3 {
                out[j][c] = (0..3).map(|d| frame[j][d] * grad[c][d]).sum();
            }
        }
        out
    }

    /// Residuals of the Jacobi-identity constraints on (C0, C1, C2):
    /// X1(C0) - xi(C1) - C2 (C0 + 1) and X2(C0) - xi(C2) + C1 (C0 + 1).
    pub fn integrability_residuals(&self, p: &Point) -> [f64; 2] {
        let c = self.structure_functions(p);
        let d = self.structure_frame_derivatives(p, CURVATURE_STEP);
        [
            d[1][0] - d[0][1] - c.c2 * (c.c0 + 1.0),
            d[2][0] - d[0][2] + c.c1 * (c.c0 + 1.0),
        ]
    }

    /// Riemann tensor in the deformed frame from finite differences of the connection.
    pub fn curvature(&self, p: &Point) -> Curvature {
        let c = self.structure_functions(p).as_array();
        let gamma = connection_table(c, true);
        let dc = self.structure_frame_derivatives(p, CURVATURE_STEP);
        let dgamma: Vec<Connection> = (0..3).map(|i| connection_table(dc[i], false)).collect();
        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let bracket: Vec<f64> = (0..3).map(|k| gamma[i][j][k] - gamma[j][i][k]).collect();
                for l in 0..3 {
                    for n in 0..3 {
                        let mut v = dgamma[i][j][l][n] - dgamma[j][i][l][n];
                        for k in 0..3 {
                            v += gamma[j][l][k] * gamma[i][k][n] - gamma[i][l][k] * gamma[j][k][n];
                            v -= bracket[k] * gamma[k][l][n];
                        }
                        r[i][j][l][n] = v;
                    }
                }
            }
        }
        r
    }

    /// Ricci tensor in the deformed frame: Ric(e_j, e_l) = sum_i g(R(e_i, e_j) e_l, e_i).
    pub fn ricci(&self, p: &Point) -> [[f64; 3]; 3] {
        ricci_of(&self.curvature(p))
    }

    pub fn scalar_curvature_fd(&self, p: &Point) -> f64 {
        let ric = self.ricci(p);
        ric[0][0] + ric[1][1] + ric[2][2]
    }

    /// |R(v, xi) xi - v| for v = v1 X1 + v2 X2.
    pub fn mixed_curvature_check(&self, p: &Point, v: [f64; 2]) -> f64 {
        let r = self.curvature(p);
        let vf = [0.0, v[0], v[1]];
        let mut out = [0.0; 3];
        for i in 0..3 {
            for (n, o) in out.iter_mut().enumerate() {
                *o += vf[i] * r[i][0][0][n];
            }
        }
        norm3(&sub3(&out, &vf))
    }

    /// (|Ric xi - 2 xi|, max over unit v in D of |Ric(v, v) - (Scal / 2 - 1)|).
    pub fn ricci_check(&self, p: &Point) -> (f64, f64) {
        let ric = self.ricci(p);
        let reeb = norm3(&[ric[0][0] - 2.0, ric[1][0], ric[2][0]]);
        let target = self.scalar_curvature(p) / 2.0 - 1.0;
        let contact = (0..16)
            .map(|q| {
                let (sn, cs) = (q as f64 * std::f64::consts::PI / 16.0).sin_cos();
                let rvv = cs * cs * ric[1][1] + 2.0 * sn * cs * ric[1][2] + sn * sn * ric[2][2];
                (rvv - target).abs()
            })
            .fold(0.0, f64::max);
        (reeb, contact)
    }

    /// phi-sectional curvature X1(C2) - X2(C1) - C1^2 - C2^2 + 2 C0 - 1.
    pub fn phi_sectional(&self, p: &Point) -> f64 {
        let c = self.structure_functions(p);
        let d = self.structure_frame_derivatives(p, CURVATURE_STEP);
        d[1][2] - d[2][1] - c.c1 * c.c1 - c.c2 * c.c2 + 2.0 * c.c0 - 1.0
    }

    /// Deformed-frame coefficients of a field jet and their deformed-frame derivatives.
    fn deformed_jet(&self, jet: &FieldJet) -> ([f64; 3], [[f64; 3]; 3]) {
        let sc = self.scales();
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

    /// Curl of the field at `p`, as coefficients in the undeformed frame (xi, X1, X2).
    pub fn curl(&self, field: &dyn FieldEvaluator, p: &Point) -> [f64; 3] {
        let jet = field.jet(p);
        self.curl_of_jet(&jet, p)
    }

    pub fn curl_of_jet(&self, jet: &FieldJet, p: &Point) -> [f64; 3] {
        let c = self.structure_functions(p);
        let (f, d) = self.deformed_jet(jet);
        let rot = c.c0 + 1.0;
        let out = [
            d[2][1] - d[1][2] - c.c1 * f[1] - c.c2 * f[2] + 2.0 * f[0],
            -d[2][0] + d[0][2] + rot * f[1],
            d[1][0] - d[0][1] + rot * f[2],
        ];
        let sc = self.scales();
        [out[0] / sc[0], out[1] / sc[1], out[2] / sc[2]]
    }

    pub fn divergence(&self, field: &dyn FieldEvaluator, p: &Point) -> f64 {
        self.divergence_of_jet(&field.jet(p), p)
    }

    pub fn divergence_of_jet(&self, jet: &FieldJet, p: &Point) -> f64 {
        let c = self.structure_functions(p);
        let (f, d) = self.deformed_jet(jet);
        d[0][0] + d[1][1] + d[2][2] - c.c2 * f[1] + c.c1 * f[2]
    }

    /// Squared length of a vector given by undeformed-frame coefficients.
    pub fn norm_sq(&self, coeffs: &[f64; 3]) -> f64 {
        let sc = self.scales();
        (0..3).map(|i| (coeffs[i] * sc[i]).powi(2)).sum()
    }

    /// Coordinate components of a vector given by undeformed-frame coefficients.
    pub fn to_coords(&self, p: &Point, coeffs: &[f64; 3]) -> [f64; 3] {
        let f = self.base_frame(p).vectors();
        let mut out = [0.0; 3];
        for (i, v) in f.iter().enumerate() {
            for c in 0..3 {
                out[c] += coeffs[i] * v[c];
            }
        }
        out
    }

    /// Riemannian volume density |det g'|^(1/2) in coordinates: a^2 sin s cos s / sigma^2.
    pub fn volume_density(&self, p: &Point) -> f64 {
        let (sn, cs) = p.s.sin_cos();
        self.a * self.a * sn * cs / self.sigma(p).powi(2)
    }
}

pub fn ricci_of(r: &Curvature) -> [[f64; 3]; 3] {
    let mut ric = [[0.0; 3]; 3];
    for j in 0..3 {
        for l in 0..3 {
            ric[j][l] = (0..3).map(|i| r[i][j][l][i]).sum();
        }
    }
    ric
}

pub(crate) fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

#[cfg(test)]
mod tests;
