//! A reduced eigenvector lifted back to a real vector field on the sphere, so the
//! full three-dimensional curl and divergence can check it pointwise.

use super::radial::{combine, RadialBasis};
use crate::sasaki_geometry::fields::{FieldEvaluator, FieldJet};
use crate::sasaki_geometry::Point;

/// Re e^{i(m phi1 + n phi2 + phase)} (F eta + i U theta_s + W theta_2) for the
/// radial profiles given by `coefficients` in `basis`.
#[derive(Debug, Clone)]
pub struct ModeField {
    pub basis: RadialBasis,
    pub coefficients: Vec<f64>,
    pub phase: f64,
}

impl ModeField {
    pub fn new(basis: RadialBasis, coefficients: Vec<f64>, phase: f64) -> Self {
        ModeField {
            basis,
            coefficients,
            phase,
        }
    }
}

impl FieldEvaluator for ModeField {
    fn jet(&self, p: &Point) -> FieldJet {
        let b = &self.basis;
        let t = p.s.sin().powi(2);
        let v = combine(&b.sample(t), &self.coefficients);
        let (m, n) = (b.m as f64, b.n as f64);
        let (sin_t, cos_t) = (m * p.phi1 + n * p.phi2 + self.phase).sin_cos();
        let (sin_p, cos_p) = p.psi().sin_cos();
        let ra = b.a.sqrt();

        // Undeformed-frame values and coordinate gradients (d_s, d_phi1, d_phi2).
        let eta = v.f * cos_t / b.a;
        let eta_grad = [
            v.f_s * cos_t / b.a,
            -m * v.f * sin_t / b.a,
            -n * v.f * sin_t / b.a,
        ];
        let radial = -v.u * sin_t / ra;
        let radial_grad = [
            -v.u_s * sin_t / ra,
            -m * v.u * cos_t / ra,
            -n * v.u * cos_t / ra,
        ];
        let angular = v.w * cos_t / ra;
        let angular_grad = [
            v.w_s * cos_t / ra,
            -m * v.w * sin_t / ra,
            -n * v.w * sin_t / ra,
        ];

        let first = radial * cos_p - angular * sin_p;
        let second = radial * sin_p + angular * cos_p;
        let mut first_grad = [0.0; 3];
        let mut second_grad = [0.0; 3];
        for axis in 0..3 {
            // psi = phi1 + phi2 moves with both angles.
            let dpsi = if axis == 0 { 0.0 } else { 1.0 };
            first_grad[axis] =
                radial_grad[axis] * cos_p - angular_grad[axis] * sin_p - dpsi * second;
            second_grad[axis] =
                radial_grad[axis] * sin_p + angular_grad[axis] * cos_p + dpsi * first;
        }
        FieldJet::from_coordinates(
            &b.weights,
            p,
            [eta, first, second],
            [eta_grad, first_grad, second_grad],
        )
    }
}
