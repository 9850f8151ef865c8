//! Mode-agnostic curl eigensolver on the round unit sphere, used as an independent
//! oracle for the reduced solver. It works with ambient polynomial vector fields
//! of bounded degree projected to the sphere; that space is curl-invariant, so the
//! Rayleigh-Ritz values are exact eigenvalues.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use super::radial::radial_rule;

/// Exponent vectors of all monomials in four variables of degree <= `degree`.
fn monomials(degree: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for a in 0..=degree {
        for b in 0..=degree - a {
            for c in 0..=degree - a - b {
                for d in 0..=degree - a - b - c {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

fn monomial(e: &[u32; 4], x: &[f64; 4]) -> f64 {
    (0..4).map(|i| x[i].powi(e[i] as i32)).product()
}

fn monomial_grad(e: &[u32; 4], x: &[f64; 4]) -> [f64; 4] {
    let mut g = [0.0; 4];
    for (c, gc) in g.iter_mut().enumerate() {
        if e[c] == 0 {
            continue;
        }
        *gc = e[c] as f64
            * (0..4)
                .map(|i| {
                    let p = if i == c { e[i] - 1 } else { e[i] };
                    x[i].powi(p as i32)
                })
                .product::<f64>();
    }
    g
}

/// Sign of the permutation (a, b, c, d) of (0, 1, 2, 3), zero if any index repeats.
fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Orientation sign fixed so that the Hopf field (-x1, x0, -x3, x2) has curl
/// +2 times itself, matching the contact normalization of the reduced solver.
const ORIENTATION: f64 = -1.0;

/// Curl of the tangent projection of an ambient field, given the field's Jacobian
/// `jac[c][d] = d_c V_d` at a point x of the unit sphere.
pub fn ambient_curl(x: &[f64; 4], jac: &[[f64; 4]; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (a, oa) in out.iter_mut().enumerate() {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let e = levi_civita([a, b, c, d]);
                    if e != 0.0 {
                        *oa += ORIENTATION * e * x[b] * jac[c][d];
                    }
                }
            }
        }
    }
    out
}

/// Eigenvalue clusters of the round-sphere oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientSpectrum {
    /// All nonzero eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Dimension of the discarded kernel (gradient fields).
    pub kernel_dim: usize,
    /// Dimension of the projected polynomial space.
    pub rank: usize,
}

impl AmbientSpectrum {
    /// Eigenvalues with |mu| <= bound, ascending.
    pub fn within(&self, bound: f64) -> Vec<f64> {
        self.values
            .iter()
            .copied()
            .filter(|v| v.abs() <= bound)
            .collect()
    }
}

/// Solves the curl eigenproblem on projected polynomial fields of degree <= `degree`.
pub fn round_sphere_spectrum(degree: u32) -> AmbientSpectrum {
    let monos = monomials(degree);
    let nb = 4 * monos.len();
    // Integrands are polynomials of degree <= 4 * degree + 2 in x.
    let n_phi = 4 * degree as usize + 4;
    let rule = radial_rule(2 * degree as usize + 4);
    let mut gram = DMatrix::<f64>::zeros(nb, nb);
    let mut stiff = DMatrix::<f64>::zeros(nb, nb);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut fields = vec![[0.0; 4]; nb];
    let mut curls = vec![[0.0; 4]; nb];
    for &(t, wt) in &rule {
        let (sn, cs) = (t.sqrt(), (1.0 - t).sqrt());
        for i in 0..n_phi {
            for j in 0..n_phi {
                let (s1, c1) = (i as f64 * dphi).sin_cos();
                let (s2, c2) = (j as f64 * dphi).sin_cos();
                let x = [cs * c1, cs * s1, sn * c2, sn * s2];
                let weight = 0.5 * wt * dphi * dphi;
                for (k, e) in monos.iter().enumerate() {
                    let val = monomial(e, &x);
                    let grad = monomial_grad(e, &x);
                    for comp in 0..4 {
                        let idx = 4 * k + comp;
                        let mut v = [0.0; 4];
                        v[comp] = val;
                        let radial = val * x[comp];
                        for d in 0..4 {
                            v[d] -= radial * x[d];
                        }
                        let mut jac = [[0.0; 4]; 4];
                        for (c, row) in jac.iter_mut().enumerate() {
                            row[comp] = grad[c];
                        }
                        fields[idx] = v;
                        curls[idx] = ambient_curl(&x, &jac);
                    }
                }
                for p in 0..nb {
                    for q in 0..nb {
                        let s: f64 = (0..4).map(|d| fields[p][d] * curls[q][d]).sum();
                        stiff[(p, q)] += weight * s;
                        if q >= p {
                            let g: f64 = (0..4).map(|d| fields[p][d] * fields[q][d]).sum();
                            gram[(p, q)] += weight * g;
                        }
                    }
                }
            }
        }
    }
    for p in 0..nb {
        for q in 0..p {
            gram[(p, q)] = gram[(q, p)];
        }
    }
    // Restrict to the non-degenerate part of the Gram matrix.
    let ge = SymmetricEigen::new(gram);
    let top = ge.eigenvalues.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..nb)
        .filter(|&i| ge.eigenvalues[i] > 1e-10 * top)
        .collect();
    let basis = DMatrix::from_fn(nb, keep.len(), |r, c| {
        ge.eigenvectors[(r, keep[c])] / ge.eigenvalues[keep[c]].sqrt()
    });
    let sym = (&stiff + stiff.transpose()) * 0.5;
    let reduced = basis.transpose() * sym * &basis;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(reduced);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    let kernel_dim = values.iter().filter(|v| v.abs() < 1e-8).count();
    values.retain(|v| v.abs() >= 1e-8);
    AmbientSpectrum {
        values,
        kernel_dim,
        rank: keep.len(),
    }
}
