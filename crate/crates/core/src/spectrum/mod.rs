//! Curl spectrum of the weighted sphere by torus-equivariant reduction: every
//! Fourier mode (m, n) gives a small symmetric radial eigenproblem, discretized
//! by a spectral Galerkin method in t = sin^2 s.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::sasaki_geometry::Weights;

pub mod ambient;
pub mod mode_field;
pub mod radial;

use radial::{combine, radial_rule, Block, RadialBasis};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("invalid spectrum configuration: {0}")]
    BadConfig(String),
    #[error("mode ({m}, {n}): Gram matrix is not positive definite")]
    Gram { m: i64, n: i64 },
    #[error("mode ({m}, {n}): symmetric eigensolver did not converge")]
    NoConvergence { m: i64, n: i64 },
}

/// Tolerances and resolution of a spectrum run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumConfig {
    /// Fourier truncation: |m|, |n| <= modes
    pub modes: i64,
    /// Radial resolution N: Gauss nodes in t used for assembly
    pub radial: usize,
    /// Eigenpairs kept per mode (smallest |mu| first)
    pub top: usize,
    pub cluster_tol: f64,
    pub residual_tol: f64,
    pub refine_tol: f64,
    pub kernel_tol: f64,
    pub d_tangent_tol: f64,
    /// Iteration cap of the symmetric eigensolver per mode; 0 means no cap.
    pub max_iterations: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            modes: 5,
            radial: 200,
            top: 40,
            cluster_tol: 1e-4,
            residual_tol: 1e-6,
            refine_tol: 1e-6,
            kernel_tol: 1e-6,
            d_tangent_tol: 1e-6,
            max_iterations: 0,
        }
    }
}

impl SpectrumConfig {
    pub fn validate(&self) -> Result<(), SpectrumError> {
        if self.modes < 0 {
            return Err(SpectrumError::BadConfig(
                "modes must be non-negative".into(),
            ));
        }
        if self.radial < 8 {
            return Err(SpectrumError::BadConfig(
                "radial resolution must be at least 8".into(),
            ));
        }
        if self.top == 0 {
            return Err(SpectrumError::BadConfig("top must be positive".into()));
        }
        Ok(())
    }

    /// Basis functions per eta-profile at radial resolution `radial`.
    pub fn eta_count(radial: usize) -> usize {
        radial / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ModeSpec {
    pub m: i64,
    pub n: i64,
}

/// All modes with |m|, |n| <= bound, sorted by (m, n).
pub fn mode_list(bound: i64) -> Vec<ModeSpec> {
    let mut out = Vec::new();
    for m in -bound..=bound {
        for n in -bound..=bound {
            out.push(ModeSpec { m, n });
        }
    }
    out
}

/// Galerkin matrices of the reduced curl for one mode: `stiffness` = (phi_i, L phi_j)
/// and `gram` = (phi_i, phi_j), both in the symmetric L2 pairing.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub mode: ModeSpec,
    pub radial: usize,
    pub basis: RadialBasis,
    pub stiffness: DMatrix<f64>,
    pub gram: DMatrix<f64>,
    /// Column scaling applied so the Gram diagonal is 1.
    pub scale: Vec<f64>,
    /// Largest |A - A^T| entry before symmetrization.
    pub asymmetry: f64,
}

impl DiscreteOperator {
    /// Coefficient vector in the normalized basis -> raw basis coefficients.
    pub fn raw_coefficients(&self, c: &[f64]) -> Vec<f64> {
        c.iter().zip(&self.scale).map(|(x, s)| x * s).collect()
    }
}

pub fn reduce_mode(weights: Weights, a: f64, mode: ModeSpec, radial: usize) -> DiscreteOperator {
    let basis = RadialBasis::new(
        weights,
        a,
        mode.m,
        mode.n,
        SpectrumConfig::eta_count(radial),
    );
    let nb = basis.len();
    let rule = radial_rule(radial);
    let rows = 3 * rule.len();
    let mut vals = DMatrix::<f64>::zeros(rows, nb);
    let mut imgs = DMatrix::<f64>::zeros(rows, nb);
    for (q, &(t, wt)) in rule.iter().enumerate() {
        let c = basis.coefficients(t);
        let sw = (wt * c.measure).sqrt();
        for (j, smp) in basis.sample(t).iter().enumerate() {
            let img = basis.apply(&c, smp);
            vals[(3 * q, j)] = sw * smp.f;
            vals[(3 * q + 1, j)] = sw * smp.u;
            vals[(3 * q + 2, j)] = sw * smp.w;
            for r in 0..3 {
                imgs[(3 * q + r, j)] = sw * img[r];
            }
        }
    }
    let gram_raw = vals.transpose() * &vals;
    let stiff_raw = vals.transpose() * &imgs;
    let scale: Vec<f64> = (0..nb).map(|i| 1.0 / gram_raw[(i, i)].sqrt()).collect();
    let d = DMatrix::from_diagonal(&DVector::from_vec(scale.clone()));
    let gram = &d * gram_raw * &d;
    let stiff = &d * stiff_raw * &d;
    let asymmetry = (&stiff - stiff.transpose()).abs().max();
    let stiffness = (&stiff + stiff.transpose()) * 0.5;
    let gram = (&gram + gram.transpose()) * 0.5;
    DiscreteOperator {
        mode,
        radial,
        basis,
        stiffness,
        gram,
        scale,
        asymmetry,
    }
}

/// Reduces A c = mu M c to a standard symmetric problem L^-1 A L^-T with M = L L^T.
fn reduced_problem(op: &DiscreteOperator) -> Result<(DMatrix<f64>, DMatrix<f64>), SpectrumError> {
    let (m, n) = (op.mode.m, op.mode.n);
    let lower = op
        .gram
        .clone()
        .cholesky()
        .ok_or(SpectrumError::Gram { m, n })?
        .l();
    let gram_err = SpectrumError::Gram { m, n };
    let half = lower
        .solve_lower_triangular(&op.stiffness)
        .ok_or(gram_err.clone())?;
    let reduced = lower
        .solve_lower_triangular(&half.transpose())
        .ok_or(gram_err)?;
    Ok(((&reduced + reduced.transpose()) * 0.5, lower))
}

fn by_magnitude(x: f64, y: f64) -> std::cmp::Ordering {
    x.abs().total_cmp(&y.abs()).then(x.total_cmp(&y))
}

/// Generalized symmetric eigenpairs (A c = mu M c), coefficients in the normalized
/// basis, sorted by |mu|.
pub fn generalized_eigen(
    op: &DiscreteOperator,
    max_iterations: usize,
) -> Result<Vec<(f64, DVector<f64>)>, SpectrumError> {
    let (reduced, lower) = reduced_problem(op)?;
    let eig = SymmetricEigen::try_new(reduced, f64::EPSILON, max_iterations).ok_or(
        SpectrumError::NoConvergence {
            m: op.mode.m,
            n: op.mode.n,
        },
    )?;
    let upper = lower.transpose();
    let mut pairs = Vec::with_capacity(eig.eigenvalues.len());
    for (i, &mu) in eig.eigenvalues.iter().enumerate() {
        let v = upper
            .solve_upper_triangular(&eig.eigenvectors.column(i).into_owned())
            .ok_or(SpectrumError::Gram {
                m: op.mode.m,
                n: op.mode.n,
            })?;
        pairs.push((mu, v));
    }
    pairs.sort_by(|x, y| by_magnitude(x.0, y.0));
    Ok(pairs)
}

/// Generalized eigenvalues only, sorted by |mu|.
pub fn generalized_eigenvalues(op: &DiscreteOperator) -> Result<Vec<f64>, SpectrumError> {
    let (reduced, _) = reduced_problem(op)?;
    let mut values: Vec<f64> = reduced.symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SpectrumError::NoConvergence {
            m: op.mode.m,
            n: op.mode.n,
        });
    }
    values.sort_by(|x, y| by_magnitude(*x, *y));
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    pub value: f64,
    /// ||L v - mu v|| / ||v|| on the verification grid
    pub residual: f64,
    pub mode: ModeSpec,
    pub d_tangent: bool,
    /// sup |F| / sup |(F, U, W)| on the verification grid
    pub eta_fraction: f64,
    /// ||div v|| / ||v|| on the verification grid
    pub divergence: f64,
    /// |mu(N) - mu(2N)| / |mu(N)|
    pub refinement_shift: f64,
    /// raw basis coefficients of the eigenvector
    #[serde(skip)]
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSolution {
    pub mode: ModeSpec,
    pub results: Vec<EigenResult>,
    pub kernel_dim: usize,
    /// Candidates dropped by the refinement or residual filters.
    pub discarded: usize,
    /// Largest |mu| captured when the top-T cut was reached, else None.
    pub truncated_at: Option<f64>,
    pub asymmetry: f64,
}

/// Residual, divergence and eta fraction of an eigenvector on an independent grid.
pub fn verify_eigenvector(
    basis: &RadialBasis,
    raw: &[f64],
    mu: f64,
    nodes: usize,
) -> (f64, f64, f64) {
    let mut res = 0.0;
    let mut div = 0.0;
    let mut norm = 0.0;
    let mut sup_f: f64 = 0.0;
    let mut sup_all: f64 = 0.0;
    for (t, wt) in radial_rule(nodes) {
        let c = basis.coefficients(t);
        let v = combine(&basis.sample(t), raw);
        let lv = basis.apply(&c, &v);
        let d = [lv[0] - mu * v.f, lv[1] - mu * v.u, lv[2] - mu * v.w];
        let w = wt * c.measure;
        res += w * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        div += w * basis.divergence(&c, &v).powi(2);
        norm += w * (v.f * v.f + v.u * v.u + v.w * v.w);
        sup_f = sup_f.max(v.f.abs());
        sup_all = sup_all.max((v.f * v.f + v.u * v.u + v.w * v.w).sqrt());
    }
    ((res / norm).sqrt(), (div / norm).sqrt(), sup_f / sup_all)
}

/// Verification grid size for radial resolution N: finer than, and disjoint from, the
/// assembly grid.
pub fn verification_nodes(radial: usize) -> usize {
    2 * radial + 11
}

/// Smallest-|mu| eigenpairs of one mode that survive the kernel, refinement and
/// residual filters.
pub fn solve_mode(
    op: &DiscreteOperator,
    cfg: &SpectrumConfig,
) -> Result<ModeSolution, SpectrumError> {
    let pairs = generalized_eigen(op, cfg.max_iterations)?;
    let kernel_dim = pairs.iter().filter(|p| p.0.abs() < cfg.kernel_tol).count();
    let candidates: Vec<&(f64, DVector<f64>)> = pairs
        .iter()
        .filter(|p| p.0.abs() >= cfg.kernel_tol)
        .take(cfg.top)
        .collect();
    let truncated_at = if candidates.len() == cfg.top {
        candidates.last().map(|p| p.0.abs())
    } else {
        None
    };

    let fine = reduce_mode(op.basis.weights, op.basis.a, op.mode, 2 * op.radial);
    let fine_values: Vec<f64> = generalized_eigenvalues(&fine)?
        .into_iter()
        .filter(|mu| mu.abs() >= cfg.kernel_tol)
        .collect();

    let mut results = Vec::new();
    let mut discarded = 0;
    for (mu, vec) in candidates {
        let nearest = fine_values
            .iter()
            .map(|f| (f - mu).abs())
            .fold(f64::INFINITY, f64::min);
        let shift = nearest / mu.abs();
        let raw = op.raw_coefficients(vec.as_slice());
        let (residual, divergence, eta_fraction) =
            verify_eigenvector(&op.basis, &raw, *mu, verification_nodes(op.radial));
        if !(shift <= cfg.refine_tol && residual <= cfg.residual_tol) {
            discarded += 1;
            continue;
        }
        results.push(EigenResult {
            value: *mu,
            residual,
            mode: op.mode,
            d_tangent: eta_fraction < cfg.d_tangent_tol,
            eta_fraction,
            divergence,
            refinement_shift: shift,
            coefficients: raw,
        });
    }
    Ok(ModeSolution {
        mode: op.mode,
        results,
        kernel_dim,
        discarded,
        truncated_at,
        asymmetry: op.asymmetry,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub mu: f64,
    pub multiplicity: usize,
    pub d_tangent: usize,
    pub max_residual: f64,
    pub max_divergence: f64,
    pub possibly_incomplete: bool,
    pub modes: Vec<ModeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub weights: Weights,
    pub a: f64,
    pub modes: i64,
    pub radial: usize,
    pub top: usize,
    pub cluster_tol: f64,
    pub clusters: Vec<Cluster>,
    /// Smallest positive cluster.
    pub mu1: Option<f64>,
    /// Smallest positive cluster with a D-tangent member.
    pub mu1_d: Option<f64>,
    /// |mu| above which some mode may have further eigenvalues beyond its top-T cut.
    pub completeness_bound: Option<f64>,
    pub discarded: usize,
    pub max_asymmetry: f64,
}

impl SpectrumReport {
    pub fn cluster_near(&self, mu: f64, tol: f64) -> Option<&Cluster> {
        self.clusters.iter().find(|c| (c.mu - mu).abs() <= tol)
    }

    pub fn positive(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(|c| c.mu > 0.0)
    }
}

/// Merges per-mode results into clusters of nearly equal eigenvalues.
pub fn aggregate(
    weights: Weights,
    a: f64,
    cfg: &SpectrumConfig,
    solutions: &[ModeSolution],
) -> SpectrumReport {
    let mut all: Vec<&EigenResult> = solutions.iter().flat_map(|s| s.results.iter()).collect();
    all.sort_by(|x, y| x.value.total_cmp(&y.value).then(x.mode.cmp(&y.mode)));

    let completeness_bound = solutions
        .iter()
        .filter_map(|s| s.truncated_at)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.min(v)))
        });

    let mut clusters: Vec<Cluster> = Vec::new();
    let mut sum = 0.0;
    for r in all {
        let join = clusters
            .last()
            .map(|c| (r.value - sum / c.multiplicity as f64).abs() <= cfg.cluster_tol)
            .unwrap_or(false);
        if !join {
            clusters.push(Cluster {
                mu: 0.0,
                multiplicity: 0,
                d_tangent: 0,
                max_residual: 0.0,
                max_divergence: 0.0,
                possibly_incomplete: false,
                modes: Vec::new(),
            });
            sum = 0.0;
        }
        let c = clusters.last_mut().expect("cluster just ensured");
        sum += r.value;
        c.multiplicity += 1;
        c.mu = sum / c.multiplicity as f64;
        c.d_tangent += r.d_tangent as usize;
        c.max_residual = c.max_residual.max(r.residual);
        c.max_divergence = c.max_divergence.max(r.divergence);
        c.modes.push(r.mode);
    }
    for c in &mut clusters {
        c.modes.sort();
        c.possibly_incomplete = completeness_bound.is_some_and(|b| c.mu.abs() >= 0.95 * b);
    }
    let mu1 = clusters.iter().find(|c| c.mu > 0.0).map(|c| c.mu);
    let mu1_d = clusters
        .iter()
        .find(|c| c.mu > 0.0 && c.d_tangent > 0)
        .map(|c| c.mu);
    SpectrumReport {
        weights,
        a,
        modes: cfg.modes,
        radial: cfg.radial,
        top: cfg.top,
        cluster_tol: cfg.cluster_tol,
        clusters,
        mu1,
        mu1_d,
        completeness_bound,
        discarded: solutions.iter().map(|s| s.discarded).sum(),
        max_asymmetry: solutions.iter().map(|s| s.asymmetry).fold(0.0, f64::max),
    }
}

/// Solves every mode with |m|, |n| <= cfg.modes (in parallel, merged in (m, n) order).
pub fn solve_modes(
    weights: Weights,
    a: f64,
    cfg: &SpectrumConfig,
) -> Result<Vec<ModeSolution>, SpectrumError> {
    cfg.validate()?;
    if !(a.is_finite() && a > 0.0) {
        return Err(SpectrumError::BadConfig(format!(
            "deformation {a} must be positive"
        )));
    }
    mode_list(cfg.modes)
        .par_iter()
        .map(|&mode| solve_mode(&reduce_mode(weights, a, mode, cfg.radial), cfg))
        .collect()
}

pub fn compute_spectrum(
    weights: Weights,
    a: f64,
    cfg: &SpectrumConfig,
) -> Result<SpectrumReport, SpectrumError> {
    let solutions = solve_modes(weights, a, cfg)?;
    Ok(aggregate(weights, a, cfg, &solutions))
}

/// Coefficients of the sampled profile `(F, U + W, U - W)` given as functions of t,
/// fitted by L2 projection onto the basis of `op`.
pub fn project_profiles<F>(op: &DiscreteOperator, profiles: F) -> Vec<f64>
where
    F: Fn(f64) -> [f64; 3],
{
    let rule = radial_rule(op.radial);
    let nb = op.basis.len();
    let mut rhs = DVector::<f64>::zeros(nb);
    for &(t, wt) in &rule {
        let c = op.basis.coefficients(t);
        let [f, gp, gm] = profiles(t);
        let (u, w) = (0.5 * (gp + gm), 0.5 * (gp - gm));
        for (j, smp) in op.basis.sample(t).iter().enumerate() {
            rhs[j] += wt * c.measure * (smp.f * f + smp.u * u + smp.w * w) * op.scale[j];
        }
    }
    let sol = op
        .gram
        .clone()
        .cholesky()
        .expect("Gram matrix is positive definite")
        .solve(&rhs);
    op.raw_coefficients(sol.as_slice())
}

/// Block ranges exposed for tests and diagnostics.
pub fn block_range(op: &DiscreteOperator, block: Block) -> std::ops::Range<usize> {
    op.basis.block_range(block)
}
