//! Liouvillian spectra, steady states, the Liouvillian gap and the spectral
//! winding number `W_0`.

use std::f64::consts::TAU;
use std::io::Write;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{log_det, sparse_max_abs, sparse_null_vector, vec_norm, ZERO};
use crate::model::LatticeSpec;
use crate::superop::{build_kblock, Provenance, Superoperator};
use crate::winding::{integrate_closed_loop, wrap_phase, WindingMethod, WindingResult};

/// Relative threshold for calling an eigenvalue steady.
pub const ZERO_TOL_REL: f64 = 1e-9;
pub const DEFAULT_N_K: usize = 401;

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<c64>,
    /// Unit-norm right eigenvectors as columns, in the basis of the
    /// superoperator.
    pub right_eigenvectors: Option<Mat<c64>>,
    pub steady_indices: Vec<usize>,
    /// `|Re lambda_1|` for the slowest non-steady eigenvalue.
    pub gap: f64,
    pub zero_tol: f64,
    pub provenance: Provenance,
}

impl SpectrumResult {
    pub fn from_eigenvalues(eigenvalues: Vec<c64>, vectors: Option<Mat<c64>>, provenance: Provenance) -> Self {
        let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let zero_tol = ZERO_TOL_REL * radius;
        let steady_indices: Vec<usize> = eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() < zero_tol)
            .map(|(i, _)| i)
            .collect();
        let gap = liouvillian_gap_of(&eigenvalues, &steady_indices);
        Self {
            eigenvalues,
            right_eigenvectors: vectors,
            steady_indices,
            gap,
            zero_tol,
            provenance,
        }
    }

    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes `re_lambda,im_lambda,K_or_nan,is_steady`. `k` is `None` for
    /// real-space spectra.
    pub fn write_csv<W: Write>(&self, w: W, k: Option<f64>) -> Result<()> {
        let rows: Vec<SpectrumRow> = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &lambda)| SpectrumRow { lambda, k, is_steady: self.steady_indices.contains(&i) })
            .collect();
        write_spectrum_csv(w, &rows)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumRow {
    pub lambda: c64,
    pub k: Option<f64>,
    pub is_steady: bool,
}

pub fn write_spectrum_csv<W: Write>(mut w: W, rows: &[SpectrumRow]) -> Result<()> {
    writeln!(w, "re_lambda,im_lambda,K_or_nan,is_steady")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.lambda.re,
            r.lambda.im,
            r.k.unwrap_or(f64::NAN),
            r.is_steady
        )?;
    }
    Ok(())
}

fn liouvillian_gap_of(eigenvalues: &[c64], steady: &[usize]) -> f64 {
    eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| !steady.contains(i))
        .map(|(_, z)| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
        .abs()
        .min(f64::MAX)
}

/// `|Re lambda_1|` of the slowest decaying non-steady mode.
pub fn liouvillian_gap(spectrum: &SpectrumResult) -> f64 {
    spectrum.gap
}

/// Full eigendecomposition of a superoperator. Generators acting on
/// operators are solved in the Hermitian operator basis, where they are real;
/// other matrices go through the complex solver.
pub fn diagonalize(sup: &Superoperator, with_vectors: bool) -> Result<SpectrumResult> {
    let failure = |e: faer::linalg::evd::EvdError| Error::ConvergenceFailure {
        provenance: format!("{} ({e:?})", sup.provenance),
    };
    let (eigenvalues, vectors) = if let Some((basis, real)) = sup.real_form() {
        if with_vectors {
            let eig = real.eigen().map_err(failure)?;
            let values: Vec<c64> = eig.S().column_vector().iter().copied().collect();
            let coords = eig.U();
            let dim = sup.dim();
            let mut vecs = Mat::<c64>::zeros(dim, dim);
            let mut col = vec![ZERO; dim];
            for j in 0..dim {
                for (i, c) in col.iter_mut().enumerate() {
                    *c = coords[(i, j)];
                }
                let v = basis.expand(&col);
                let norm = vec_norm(&v);
                for (i, z) in v.iter().enumerate() {
                    vecs[(i, j)] = z / norm;
                }
            }
            (values, Some(vecs))
        } else {
            (real.eigenvalues().map_err(failure)?, None)
        }
    } else {
        let dense = sup.dense();
        if with_vectors {
            let eig = dense.eigen().map_err(failure)?;
            let values: Vec<c64> = eig.S().column_vector().iter().copied().collect();
            (values, Some(eig.U().to_owned()))
        } else {
            (dense.eigenvalues().map_err(failure)?, None)
        }
    };
    if let Some(v) = &vectors {
        check_residuals(sup, &eigenvalues, v)?;
    }
    Ok(SpectrumResult::from_eigenvalues(eigenvalues, vectors, sup.provenance.clone()))
}

/// Eigenvalues of a dense matrix, e.g. a toy matrix in a test.
pub fn diagonalize_dense(m: &Mat<c64>, with_vectors: bool) -> Result<SpectrumResult> {
    diagonalize(&Superoperator::from_dense(m, Provenance::External), with_vectors)
}

fn check_residuals(sup: &Superoperator, values: &[c64], vectors: &Mat<c64>) -> Result<()> {
    let dim = sup.dim();
    let scale = crate::linalg::sparse_frobenius(sup.sparse());
    let mut v = vec![ZERO; dim];
    for (j, &lambda) in values.iter().enumerate() {
        for (i, z) in v.iter_mut().enumerate() {
            *z = vectors[(i, j)];
        }
        let av = sup.apply(&v);
        let res = av.iter().zip(&v).map(|(a, x)| (a - lambda * x).norm_sqr()).sum::<f64>().sqrt();
        let norm = vec_norm(&v);
        if res > 1e-8 * scale * norm {
            return Err(Error::ConvergenceFailure {
                provenance: format!("{}: eigenpair {j} residual {res:e} exceeds bound", sup.provenance),
            });
        }
    }
    Ok(())
}

/// Steady state from a spectrum computed with eigenvectors.
pub fn steady_state(sup: &Superoperator, spectrum: &SpectrumResult) -> Result<DensityMatrix> {
    match spectrum.steady_indices.len() {
        0 => return Err(Error::NoSteadyState),
        1 => {}
        count => return Err(Error::DegenerateSteadyState { count, zero_tol: spectrum.zero_tol }),
    }
    let vectors = spectrum.right_eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)?;
    let n = sup.hilbert_dim().ok_or_else(|| Error::InvalidSpec("superoperator does not act on operators".into()))?;
    let j = spectrum.steady_indices[0];
    let v: Vec<c64> = (0..sup.dim()).map(|i| vectors[(i, j)]).collect();
    DensityMatrix::from_null_vector(&v, n)
}

/// Residual bound for the inverse-iteration steady state.
pub const NULL_TOL: f64 = 1e-9;

/// Steady state by shifted inverse iteration with a sparse LU factorization,
/// converged when `|L v| / |v| < 1e-9` (relative to the largest entry of `L`).
/// Uniqueness is not checked; use [`diagonalize`] for that.
pub fn steady_state_sparse(sup: &Superoperator) -> Result<DensityMatrix> {
    let n = sup.hilbert_dim().ok_or_else(|| Error::InvalidSpec("superoperator does not act on operators".into()))?;
    let scale = sparse_max_abs(sup.sparse()).max(f64::MIN_POSITIVE);
    let shift = -1e-8 * scale;
    let (v, _) = sparse_null_vector(sup.sparse(), shift, NULL_TOL * scale.max(1.0), 50)?;
    DensityMatrix::from_null_vector(&v, n)
}

/// Reference offset used for `W_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Epsilon {
    /// `min(1e-3 (B_1 + B_4), 0.1 min |lambda|)` over the non-steady
    /// eigenvalues of `L(K = 0)`.
    Auto,
    Fixed(f64),
}

impl Epsilon {
    pub fn resolve(self, spec: &LatticeSpec) -> Result<f64> {
        match self {
            Epsilon::Fixed(e) if e > 0.0 && e.is_finite() => Ok(e),
            Epsilon::Fixed(e) => Err(Error::InvalidSpec(format!("epsilon must be positive, got {e}"))),
            Epsilon::Auto => {
                let base = 1e-3 * spec.total_rate();
                let spectrum = kblock_spectrum(spec, 0.0)?;
                let radius = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let smallest = spectrum
                    .iter()
                    .map(|z| z.norm())
                    .filter(|&a| a >= ZERO_TOL_REL * radius)
                    .fold(f64::INFINITY, f64::min);
                Ok(base.min(0.1 * smallest))
            }
        }
    }
}

/// Eigenvalues of the momentum block `L(K)`.
pub fn kblock_spectrum(spec: &LatticeSpec, k: f64) -> Result<Vec<c64>> {
    let block = build_kblock(spec, k)?.assembled();
    block.eigenvalues().map_err(|e| Error::ConvergenceFailure {
        provenance: format!("kblock K={k} ({e:?})"),
    })
}

/// Union of the block spectra at the physical momenta `K = 2 pi m / L`,
/// each tagged with its `K`.
pub fn pbc_spectrum_by_blocks(spec: &LatticeSpec) -> Result<Vec<(c64, f64)>> {
    let l = spec.cells;
    let mut out = Vec::with_capacity(4 * l * l);
    for m in 0..l {
        let k = TAU * m as f64 / l as f64;
        out.extend(kblock_spectrum(spec, k)?.into_iter().map(|z| (z, k)));
    }
    Ok(out)
}

/// Smallest pivot, relative to the largest matrix entry, for which the
/// determinant is still considered off the spectrum.
const PIVOT_FLOOR: f64 = 1e-13;

/// Winding of `det[L(K) + epsilon]` over `K` in `[0, 2 pi)`.
pub fn winding_w0_log_det(spec: &LatticeSpec, n_k: usize, epsilon: f64) -> Result<WindingResult> {
    check_grid(n_k)?;
    let total = integrate_closed_loop(n_k, |k| {
        let mut m = build_kblock(spec, k)?.assembled();
        for i in 0..m.nrows() {
            m[(i, i)] += epsilon;
        }
        let ld = log_det(m);
        if !ld.log_abs.is_finite() || ld.min_relative_pivot < PIVOT_FLOOR {
            return Err(Error::ReferenceOnSpectrum { epsilon, k });
        }
        Ok(ld.phase)
    })?;
    Ok(WindingResult::from_phase(total, WindingMethod::LogDet, epsilon, n_k))
}

fn check_grid(n_k: usize) -> Result<()> {
    if n_k < 4 {
        return Err(Error::InvalidSpec(format!("n_K = {n_k} below the minimum of 4")));
    }
    Ok(())
}

/// Winding of the eigenvalue branch nearest 0 around `-epsilon`.
///
/// The branch is followed on the momentum grid, bisecting wherever its phase
/// around `-epsilon` moves by more than pi/3. Where bisection cannot make the
/// step small the nearest eigenvalue has switched identity; such a jump is
/// accepted when its straight segment passes to the left of `-epsilon`,
/// since only crossings of the ray `(-epsilon, +inf)` change the winding and
/// the spectrum reaches that ray only through the steady branch near 0.
pub fn winding_w0_branch(spec: &LatticeSpec, n_k: usize, epsilon: f64) -> Result<WindingResult> {
    check_grid(n_k)?;
    let mut tracker = BranchTracker { spec, epsilon, solves: 0, max_solves: 50 * n_k };
    let mut from = (0.0, tracker.nearest(0.0)?);
    let start = from.1;
    let mut total = 0.0;
    for j in 1..=n_k {
        let k = TAU * j as f64 / n_k as f64;
        let (end, phase) = tracker.advance(from, k, 0)?;
        total += phase;
        from = (k, end);
    }
    debug_assert!((from.1 - start).norm() <= 1e-8 * start.norm().max(1.0));
    Ok(WindingResult::from_phase(total, WindingMethod::BranchTracking, epsilon, n_k))
}

struct BranchTracker<'a> {
    spec: &'a LatticeSpec,
    epsilon: f64,
    solves: usize,
    max_solves: usize,
}

const MAX_TRACK_DEPTH: u32 = 24;

impl BranchTracker<'_> {
    fn nearest(&mut self, k: f64) -> Result<c64> {
        self.solves += 1;
        if self.solves > self.max_solves {
            return Err(Error::ConvergenceFailure {
                provenance: format!("branch tracking exceeded {} block eigensolves", self.max_solves),
            });
        }
        kblock_spectrum(self.spec, k)?
            .into_iter()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
            .ok_or(Error::NoSteadyState)
    }

    /// Moves from `(k0, lambda0)` to momentum `k`; returns the eigenvalue
    /// there and the phase accumulated around `-epsilon`.
    fn advance(&mut self, (k0, lambda0): (f64, c64), k: f64, depth: u32) -> Result<(c64, f64)> {
        let lambda = self.nearest(k)?;
        let reference = c64::new(-self.epsilon, 0.0);
        let step = wrap_phase((lambda - reference).arg() - (lambda0 - reference).arg());
        if step.abs() <= std::f64::consts::PI / 3.0 {
            return Ok((lambda, step));
        }
        if depth < MAX_TRACK_DEPTH {
            let mid = 0.5 * (k0 + k);
            let (half, p1) = self.advance((k0, lambda0), mid, depth + 1)?;
            let (end, p2) = self.advance((mid, half), k, depth + 1)?;
            return Ok((end, p1 + p2));
        }
        // a jump between eigenvalues: harmless unless it crosses the ray
        if lambda.im * lambda0.im <= 0.0 && lambda.im != lambda0.im {
            let t = lambda0.im / (lambda0.im - lambda.im);
            let x = lambda0.re + t * (lambda.re - lambda0.re);
            if x >= -self.epsilon {
                return Err(Error::ConvergenceFailure {
                    provenance: format!("nearest eigenvalue jumps across the reference ray near K = {k}"),
                });
            }
        }
        Ok((lambda, step))
    }
}

/// Both winding estimates of `W_0`.
#[derive(Clone, Debug, Serialize)]
pub struct W0Report {
    pub log_det: WindingResult,
    pub branch: WindingResult,
}

/// Computes `W_0` with both methods and returns the log-determinant result
/// when they agree.
pub fn winding_w0(spec: &LatticeSpec, n_k: usize, epsilon: Epsilon) -> Result<WindingResult> {
    let report = winding_w0_report(spec, n_k, epsilon)?;
    Ok(report.log_det)
}

pub fn winding_w0_report(spec: &LatticeSpec, n_k: usize, epsilon: Epsilon) -> Result<W0Report> {
    spec.validate()?;
    if spec.boundary != crate::model::Boundary::Pbc {
        return Err(Error::BoundaryMismatch(spec.boundary));
    }
    let eps = epsilon.resolve(spec)?;
    let log_det = winding_w0_log_det(spec, n_k, eps)?;
    let branch = winding_w0_branch(spec, n_k, eps)?;
    for r in [&log_det, &branch] {
        if r.residual >= 0.1 {
            return Err(Error::NonIntegralWinding { raw: r.raw, residual: r.residual });
        }
    }
    if log_det.value != branch.value {
        return Err(Error::MethodDisagreement { log_det: log_det.value, branch: branch.value });
    }
    Ok(W0Report { log_det, branch })
}
