//! Coordinate-based finite-difference references that share no code path with
//! the frame calculus: Christoffel symbols from differenced metrics and the
//! Laplace-Beltrami operator in divergence form.

use nalgebra::{Matrix3, Vector3};

use super::{Point, WeightedSphere};

pub const METRIC_FD_STEP: f64 = 1e-5;
pub const LAPLACIAN_FD_STEP: f64 = 1e-4;

/// `gamma[k][i][j]` = Christoffel symbol Gamma^k_{ij} in Hopf coordinates.
pub fn christoffel(sphere: &WeightedSphere, p: &Point) -> [[[f64; 3]; 3]; 3] {
    let h = METRIC_FD_STEP;
    let dg: Vec<Matrix3<f64>> = (0..3)
        .map(|axis| {
            (sphere.metric_at(&p.shifted(axis, h)) - sphere.metric_at(&p.shifted(axis, -h)))
                / (2.0 * h)
        })
        .collect();
    let ginv = sphere
        .metric_at(p)
        .try_inverse()
        .expect("metric is invertible at interior points");
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                gamma[k][i][j] = 0.5
                    * (0..3)
                        .map(|l| ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                        .sum::<f64>();
            }
        }
    }
    gamma
}

/// nabla_v Y in coordinates, for a coordinate vector field `field`.
pub fn covariant_derivative<F>(
    sphere: &WeightedSphere,
    p: &Point,
    v: [f64; 3],
    field: F,
) -> [f64; 3]
where
    F: Fn(&Point) -> [f64; 3],
{
    let h = METRIC_FD_STEP;
    let gamma = christoffel(sphere, p);
    let y = field(p);
    let mut out = [0.0; 3];
    for axis in 0..3 {
        let plus = field(&p.shifted(axis, h));
        let minus = field(&p.shifted(axis, -h));
        for k in 0..3 {
            out[k] += v[axis] * (plus[k] - minus[k]) / (2.0 * h);
        }
    }
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                *o += gamma[k][i][j] * v[i] * y[j];
            }
        }
    }
    out
}

/// div grad u = |g|^(-1/2) d_i (|g|^(1/2) g^{ij} d_j u), by nested central differences.
pub fn laplace_beltrami<F>(sphere: &WeightedSphere, p: &Point, u: F) -> f64
where
    F: Fn(&Point) -> f64,
{
    let h = LAPLACIAN_FD_STEP;
    let flux = |q: &Point, axis: usize| -> f64 {
        let g = sphere.metric_at(q);
        let sqrt_det = g.determinant().sqrt();
        let ginv = g.try_inverse().expect("metric is invertible");
        let grad =
            Vector3::from_fn(|j, _| (u(&q.shifted(j, h)) - u(&q.shifted(j, -h))) / (2.0 * h));
        sqrt_det * (ginv.row(axis) * grad)[0]
    };
    let sqrt_det = sphere.metric_at(p).determinant().sqrt();
    let mut acc = 0.0;
    for axis in 0..3 {
        acc += (flux(&p.shifted(axis, h), axis) - flux(&p.shifted(axis, -h), axis)) / (2.0 * h);
    }
    acc / sqrt_det
}

/// Closed forms of C1 and C2 on the undeformed weighted sphere, used only to
/// cross-check the bracket projection.
pub fn closed_form_c12(sphere: &WeightedSphere, p: &Point) -> (f64, f64) {
    let w = &sphere.weights;
    let q = 1.5 * w.sigma_ds(p.s) / w.sigma(p.s).sqrt();
    let (sp, cp) = p.psi().sin_cos();
    (-sp * q, cp * q)
}
