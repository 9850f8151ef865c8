//! Radial profiles of one torus mode and the reduced curl operator acting on them.
//!
//! A mode (m, n) field is Re e^{i(m phi1 + n phi2)} (F eta + i U theta_s + W theta_2)
//! in the invariant coframe dual to (xi', e_s', e_2') with
//! e_s = sqrt(sigma) d_s and e_2 = sqrt(sigma) (cot s d_phi2 - tan s d_phi1).
//! Regularity at the Hopf circles is built into the basis: in t = sin^2 s,
//! F = c^|m| s^|n| P(t), U + W = sqrt(sigma) c^|m+1| s^|n+1| P(t) and
//! U - W = sqrt(sigma) c^|m-1| s^|n-1| P(t), with P ranging over Jacobi polynomials.

use gauss_quad::GaussLegendre;

use crate::sasaki_geometry::Weights;

/// Values P_0 .. P_{count-1} of the Jacobi polynomials P^(alpha, beta) at x.
pub fn jacobi_values(count: usize, alpha: f64, beta: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(1.0);
    if count == 1 {
        return out;
    }
    out.push(0.5 * ((alpha - beta) + (alpha + beta + 2.0) * x));
    for n in 2..count {
        let nf = n as f64;
        let ab = alpha + beta;
        let a1 = 2.0 * nf * (nf + ab) * (2.0 * nf + ab - 2.0);
        let a2 = (2.0 * nf + ab - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (2.0 * nf + ab - 2.0) * (2.0 * nf + ab - 1.0) * (2.0 * nf + ab);
        let a4 = 2.0 * (nf + alpha - 1.0) * (nf + beta - 1.0) * (2.0 * nf + ab);
        let next = ((a2 + a3 * x) * out[n - 1] - a4 * out[n - 2]) / a1;
        out.push(next);
    }
    out
}

/// d/dx of P_0 .. P_{count-1}.
pub fn jacobi_derivatives(count: usize, alpha: f64, beta: f64, x: f64) -> Vec<f64> {
    let shifted = jacobi_values(count.saturating_sub(1), alpha + 1.0, beta + 1.0, x);
    (0..count)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                0.5 * (j as f64 + alpha + beta + 1.0) * shifted[j - 1]
            }
        })
        .collect()
}

/// Which radial profile a basis function feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    /// eta-component F, charge (m, n)
    Eta,
    /// U + W, charge (m + 1, n + 1)
    Plus,
    /// U - W, charge (m - 1, n - 1)
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct BlockShape {
    block: Block,
    cos_power: f64,
    sin_power: f64,
    count: usize,
}

/// Sampled triple (F, U, W), the s-derivatives of F and W, and U's s-derivative.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProfileSample {
    pub f: f64,
    pub u: f64,
    pub w: f64,
    pub f_s: f64,
    pub u_s: f64,
    pub w_s: f64,
}

/// Geometric coefficients of the reduced operator at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCoefficients {
    pub s: f64,
    pub t: f64,
    pub sqrt_sigma: f64,
    /// sqrt(sigma) (n cot s - m tan s)
    pub p: f64,
    /// (m l + n k) / a
    pub q: f64,
    /// bracket coefficient [e_s, e_2] = -2 xi + c2 e_2
    pub c2: f64,
    /// dt / (2 sigma^2): the measure of the symmetric L2 pairing
    pub measure: f64,
}

/// Per-mode radial basis and the operator coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialBasis {
    pub weights: Weights,
    pub a: f64,
    pub m: i64,
    pub n: i64,
    blocks: [BlockShape; 3],
}

impl RadialBasis {
    /// `eta_count` eta-profiles and `eta_count + 1` profiles per charged block, so
    /// gradients of charge-(m, n) scalars lie in the span.
    pub fn new(weights: Weights, a: f64, m: i64, n: i64, eta_count: usize) -> Self {
        let shape = |block, mm: i64, nn: i64, count| BlockShape {
            block,
            cos_power: mm.abs() as f64,
            sin_power: nn.abs() as f64,
            count,
        };
        RadialBasis {
            weights,
            a,
            m,
            n,
            blocks: [
                shape(Block::Eta, m, n, eta_count),
                shape(Block::Plus, m + 1, n + 1, eta_count + 1),
                shape(Block::Minus, m - 1, n - 1, eta_count + 1),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index range of a block inside the coefficient vector.
    pub fn block_range(&self, block: Block) -> std::ops::Range<usize> {
        let mut start = 0;
        for b in &self.blocks {
            if b.block == block {
                return start..start + b.count;
            }
            start += b.count;
        }
        unreachable!("every block is present")
    }

    pub fn coefficients(&self, t: f64) -> RadialCoefficients {
        let w = &self.weights;
        let (k, l) = (w.kf(), w.lf());
        let s = t.sqrt().asin();
        let (sn, cs) = (t.sqrt(), (1.0 - t).sqrt());
        let sigma = l * cs * cs + k * sn * sn;
        let r = sigma.sqrt();
        let dsigma = 2.0 * (k - l) * sn * cs;
        RadialCoefficients {
            s,
            t,
            sqrt_sigma: r,
            p: r * (self.n as f64 * cs / sn - self.m as f64 * sn / cs),
            q: (self.m as f64 * l + self.n as f64 * k) / self.a,
            c2: dsigma / (2.0 * r) + (k * sn * sn - l * cs * cs) / (r * sn * cs),
            measure: 1.0 / (2.0 * sigma * sigma),
        }
    }

    /// Every basis function sampled at t, in coefficient order.
    pub fn sample(&self, t: f64) -> Vec<ProfileSample> {
        let w = &self.weights;
        let (sn, cs) = (t.sqrt(), (1.0 - t).sqrt());
        let x = 2.0 * t - 1.0;
        let sigma = w.lf() * cs * cs + w.kf() * sn * sn;
        let dsigma = 2.0 * (w.kf() - w.lf()) * sn * cs;
        let mut out = Vec::with_capacity(self.len());
        for b in &self.blocks {
            let vals = jacobi_values(b.count, b.cos_power, b.sin_power, x);
            let ders = jacobi_derivatives(b.count, b.cos_power, b.sin_power, x);
            let (weight, log_weight_ds) = match b.block {
                Block::Eta => (1.0, 0.0),
                _ => (sigma.sqrt(), dsigma / (2.0 * sigma)),
            };
            let envelope = weight * cs.powf(b.cos_power) * sn.powf(b.sin_power);
            let log_env_ds = log_weight_ds + b.sin_power * cs / sn - b.cos_power * sn / cs;
            for j in 0..b.count {
                let v = envelope * vals[j];
                let v_s = v * log_env_ds + envelope * ders[j] * 4.0 * sn * cs;
                out.push(match b.block {
                    Block::Eta => ProfileSample {
                        f: v,
                        f_s: v_s,
                        ..Default::default()
                    },
                    Block::Plus => ProfileSample {
                        u: 0.5 * v,
                        w: 0.5 * v,
                        u_s: 0.5 * v_s,
                        w_s: 0.5 * v_s,
                        ..Default::default()
                    },
                    Block::Minus => ProfileSample {
                        u: 0.5 * v,
                        w: -0.5 * v,
                        u_s: 0.5 * v_s,
                        w_s: -0.5 * v_s,
                        ..Default::default()
                    },
                });
            }
        }
        out
    }

    /// Reduced curl of one sampled profile: components (F, U, W).
    pub fn apply(&self, c: &RadialCoefficients, v: &ProfileSample) -> [f64; 3] {
        let ra = self.a.sqrt();
        [
            2.0 * v.f + (c.p * v.u + c.sqrt_sigma * v.w_s - c.c2 * v.w) / ra,
            c.p * v.f / ra - c.q * v.w,
            -c.q * v.u - c.sqrt_sigma * v.f_s / ra,
        ]
    }

    /// Reduced divergence of one sampled profile (the real factor of i div).
    pub fn divergence(&self, c: &RadialCoefficients, v: &ProfileSample) -> f64 {
        c.q * v.f + (c.sqrt_sigma * v.u_s - c.c2 * v.u + c.p * v.w) / self.a.sqrt()
    }
}

/// Gauss-Legendre nodes and weights on t in (0, 1), ascending.
pub fn radial_rule(nodes: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(nodes.max(2)).expect("at least two nodes");
    let mut pairs: Vec<(f64, f64)> = rule
        .iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Linear combination of sampled basis functions.
pub fn combine(samples: &[ProfileSample], coeffs: &[f64]) -> ProfileSample {
    let mut out = ProfileSample::default();
    for (s, &c) in samples.iter().zip(coeffs) {
        out.f += c * s.f;
        out.u += c * s.u;
        out.w += c * s.w;
        out.f_s += c * s.f_s;
        out.u_s += c * s.u_s;
        out.w_s += c * s.w_s;
    }
    out
}
