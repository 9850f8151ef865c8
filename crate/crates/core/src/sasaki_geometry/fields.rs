//! Vector fields on the weighted sphere given by adapted-frame coefficients.

use super::{phi_map, Point, WeightedSphere, Weights};

/// Central-difference step of the finite-difference fallback.
pub const FIELD_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKind {
    Analytic,
    FiniteDifference,
}

/// Coefficients (f, f1, f2) of a field in the undeformed frame (xi, X1, X2) and
/// their derivatives: `frame_derivs[i][j]` is the derivative of `coeffs[i]` along
/// the j-th undeformed frame vector.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldJet {
    pub coeffs: [f64; 3],
    pub frame_derivs: [[f64; 3]; 3],
}

impl FieldJet {
    /// Converts coordinate gradients `grad[i] = (d_s, d_phi1, d_phi2) coeffs[i]`.
    pub fn from_coordinates(w: &Weights, p: &Point, coeffs: [f64; 3], grad: [[f64; 3]; 3]) -> Self {
        let frame = WeightedSphere::undeformed(*w).base_frame(p).vectors();
        let mut frame_derivs = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                frame_derivs[i][j] = (0..3).map(|c| frame[j][c] * grad[i][c]).sum();
            }
        }
        FieldJet {
            coeffs,
            frame_derivs,
        }
    }
}

pub trait FieldEvaluator: Sync {
    fn jet(&self, p: &Point) -> FieldJet;

    fn kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }
}

impl<F: FieldEvaluator + ?Sized> FieldEvaluator for &F {
    fn jet(&self, p: &Point) -> FieldJet {
        (**self).jet(p)
    }

    fn kind(&self) -> DerivativeKind {
        (**self).kind()
    }
}

/// The undeformed Reeb field xi = l d_phi1 + k d_phi2.
#[derive(Debug, Clone, Copy)]
pub struct ReebField;

impl FieldEvaluator for ReebField {
    fn jet(&self, _p: &Point) -> FieldJet {
        FieldJet {
            coeffs: [1.0, 0.0, 0.0],
            frame_derivs: [[0.0; 3]; 3],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroField;

impl FieldEvaluator for ZeroField {
    fn jet(&self, _p: &Point) -> FieldJet {
        FieldJet::default()
    }
}

/// sigma^(3/2) X1 (`component = 1`) or sigma^(3/2) X2 (`component = 2`): the
/// D-tangent curl eigenfields of eigenvalue k + l.
#[derive(Debug, Clone, Copy)]
pub struct SigmaFrameField {
    pub weights: Weights,
    pub component: usize,
}

impl SigmaFrameField {
    pub fn new(weights: Weights, component: usize) -> Self {
        assert!(component == 1 || component == 2, "component must be 1 or 2");
        SigmaFrameField { weights, component }
    }
}

impl FieldEvaluator for SigmaFrameField {
    fn jet(&self, p: &Point) -> FieldJet {
        let sig = self.weights.sigma(p.s);
        let mut coeffs = [0.0; 3];
        let mut grad = [[0.0; 3]; 3];
        coeffs[self.component] = sig.powf(1.5);
        grad[self.component][0] = 1.5 * sig.sqrt() * self.weights.sigma_ds(p.s);
        FieldJet::from_coordinates(&self.weights, p, coeffs, grad)
    }
}

/// Gradient of the function sigma in the undeformed metric.
#[derive(Debug, Clone, Copy)]
pub struct SigmaGradient {
    pub weights: Weights,
}

impl FieldEvaluator for SigmaGradient {
    fn jet(&self, p: &Point) -> FieldJet {
        let w = &self.weights;
        let sig = w.sigma(p.s);
        let ds = w.sigma_ds(p.s);
        let radial = sig.sqrt() * ds;
        let radial_ds = ds * ds / (2.0 * sig.sqrt()) + sig.sqrt() * w.sigma_dss(p.s);
        let (sp, cp) = p.psi().sin_cos();
        let coeffs = [0.0, radial * cp, radial * sp];
        let grad = [
            [0.0; 3],
            [radial_ds * cp, -radial * sp, -radial * sp],
            [radial_ds * sp, radial * cp, radial * cp],
        ];
        FieldJet::from_coordinates(w, p, coeffs, grad)
    }
}

/// d_phi1 - d_phi2 on the round sphere; curl of it is -2 times itself.
#[derive(Debug, Clone, Copy)]
pub struct RoundAntiReeb;

impl FieldEvaluator for RoundAntiReeb {
    fn jet(&self, p: &Point) -> FieldJet {
        let (s2, c2) = (2.0 * p.s).sin_cos();
        let (sp, cp) = p.psi().sin_cos();
        let coeffs = [c2, sp * s2, -cp * s2];
        let grad = [
            [-2.0 * s2, 0.0, 0.0],
            [2.0 * sp * c2, cp * s2, cp * s2],
            [-2.0 * cp * c2, sp * s2, sp * s2],
        ];
        FieldJet::from_coordinates(&Weights::round(), p, coeffs, grad)
    }
}

/// phi applied to another field.
#[derive(Debug, Clone, Copy)]
pub struct PhiField<F>(pub F);

impl<F: FieldEvaluator> FieldEvaluator for PhiField<F> {
    fn jet(&self, p: &Point) -> FieldJet {
        let inner = self.0.jet(p);
        let d = inner.frame_derivs;
        FieldJet {
            coeffs: phi_map(inner.coeffs),
            frame_derivs: [[0.0; 3], d[2], [-d[1][0], -d[1][1], -d[1][2]]],
        }
    }

    fn kind(&self) -> DerivativeKind {
        self.0.kind()
    }
}

/// A field multiplied by a constant.
#[derive(Debug, Clone, Copy)]
pub struct ScaledField<F>(pub F, pub f64);

impl<F: FieldEvaluator> FieldEvaluator for ScaledField<F> {
    fn jet(&self, p: &Point) -> FieldJet {
        let mut j = self.0.jet(p);
        for i in 0..3 {
            j.coeffs[i] *= self.1;
            for d in j.frame_derivs[i].iter_mut() {
                *d *= self.1;
            }
        }
        j
    }

    fn kind(&self) -> DerivativeKind {
        self.0.kind()
    }
}

/// Linear combination of two fields.
#[derive(Debug, Clone, Copy)]
pub struct SumField<A, B> {
    pub first: A,
    pub second: B,
    pub first_scale: f64,
    pub second_scale: f64,
}

impl<A: FieldEvaluator, B: FieldEvaluator> FieldEvaluator for SumField<A, B> {
    fn jet(&self, p: &Point) -> FieldJet {
        let a = self.first.jet(p);
        let b = self.second.jet(p);
        let mut out = FieldJet::default();
        for i in 0..3 {
            out.coeffs[i] = self.first_scale * a.coeffs[i] + self.second_scale * b.coeffs[i];
            for j in 0..3 {
                out.frame_derivs[i][j] = self.first_scale * a.frame_derivs[i][j]
                    + self.second_scale * b.frame_derivs[i][j];
            }
        }
        out
    }
}

/// Wraps a coefficient function and differentiates it by central differences.
pub struct FiniteDifferenceField<F> {
    pub weights: Weights,
    pub coeffs: F,
}

impl<F: Fn(&Point) -> [f64; 3] + Sync> FieldEvaluator for FiniteDifferenceField<F> {
    fn jet(&self, p: &Point) -> FieldJet {
        let h = FIELD_FD_STEP;
        let mut grad = [[0.0; 3]; 3];
        for axis in 0..3 {
            let plus = (self.coeffs)(&p.shifted(axis, h));
            let minus = (self.coeffs)(&p.shifted(axis, -h));
            for i in 0..3 {
                grad[i][axis] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        FieldJet::from_coordinates(&self.weights, p, (self.coeffs)(p), grad)
    }

    fn kind(&self) -> DerivativeKind {
        DerivativeKind::FiniteDifference
    }
}
