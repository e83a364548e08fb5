//! Dense and sparse helpers on top of `faer`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use crate::error::{Error, Result};

pub type SparseMat = SparseColMat<usize, c64>;

pub const I: c64 = c64 { re: 0.0, im: 1.0 };
pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };

/// Triplet accumulator; duplicate entries are summed on build.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    dim: usize,
    entries: Vec<Triplet<usize, usize, c64>>,
}

impl TripletBuilder {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, val: c64) {
        debug_assert!(row < self.dim && col < self.dim);
        if val != ZERO {
            self.entries.push(Triplet { row, col, val });
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(self) -> SparseMat {
        SparseColMat::try_new_from_triplets(self.dim, self.dim, &self.entries)
            .expect("triplet indices are bounded by construction")
    }
}

/// `y = A x` for a compressed-column matrix.
pub fn spmv(a: &SparseMat, x: &[c64], y: &mut [c64]) {
    y.iter_mut().for_each(|v| *v = ZERO);
    let col_ptr = a.col_ptr();
    let rows = a.row_idx();
    let vals = a.val();
    for (j, &xj) in x.iter().enumerate() {
        if xj == ZERO {
            continue;
        }
        for p in col_ptr[j]..col_ptr[j + 1] {
            y[rows[p]] += vals[p] * xj;
        }
    }
}

pub fn vec_norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn sparse_max_abs(a: &SparseMat) -> f64 {
    a.val().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of a sparse matrix.
pub fn sparse_frobenius(a: &SparseMat) -> f64 {
    a.val().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius(a: &Mat<c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Orthonormal basis of Hermitian `n x n` matrices, indexed like the
/// column-stacked vectorization `p = row + n * col`:
///
/// * `p = (k, k)`: `E_kk`,
/// * `p = (r, c)` with `r < c`: `(E_rc + E_cr) / sqrt 2`,
/// * `p = (c, r)` with `r < c`: `i (E_rc - E_cr) / sqrt 2`.
///
/// A Hermiticity-preserving superoperator is real in this basis.
#[derive(Clone, Copy, Debug)]
pub struct HermitianBasis {
    pub n: usize,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// Coordinates `U^dagger v` of a vectorized matrix.
    pub fn coords(&self, v: &[c64]) -> Vec<c64> {
        let n = self.n;
        let mut out = vec![ZERO; n * n];
        for c in 0..n {
            for r in 0..n {
                let p = r + n * c;
                if r == c {
                    out[p] = v[p];
                } else if r < c {
                    let q = c + n * r;
                    out[p] = (v[p] + v[q]) * FRAC_1_SQRT_2;
                    out[q] = (v[q] - v[p]) * I * FRAC_1_SQRT_2;
                }
            }
        }
        out
    }

    /// Vectorized matrix `U c` from coordinates.
    pub fn expand(&self, coords: &[c64]) -> Vec<c64> {
        let n = self.n;
        let mut out = vec![ZERO; n * n];
        for c in 0..n {
            for r in 0..n {
                let p = r + n * c;
                if r == c {
                    out[p] = coords[p];
                } else if r < c {
                    let q = c + n * r;
                    out[p] = (coords[p] + I * coords[q]) * FRAC_1_SQRT_2;
                    out[q] = (coords[p] - I * coords[q]) * FRAC_1_SQRT_2;
                }
            }
        }
        out
    }

    /// Basis vector `u_p` as a sparse list of `(index, value)`.
    fn basis_vector(&self, p: usize) -> [(usize, c64); 2] {
        let n = self.n;
        let (r, c) = (p % n, p / n);
        let s = c64::new(FRAC_1_SQRT_2, 0.0);
        if r == c {
            [(p, ONE), (p, ZERO)]
        } else if r < c {
            [(p, s), (c + n * r, s)]
        } else {
            // p indexes (c', r') = (r, c) with c < r: i (E_cr - E_rc) / sqrt 2
            let upper = c + n * r;
            [(upper, I * s), (p, -I * s)]
        }
    }

    /// Real matrix `U^dagger A U` and the largest discarded imaginary part.
    pub fn real_representation(&self, a: &SparseMat) -> (Mat<f64>, f64) {
        let dim = self.dim();
        let mut out = Mat::<f64>::zeros(dim, dim);
        let mut max_imag: f64 = 0.0;
        let mut w = vec![ZERO; dim];
        let mut touched = Vec::new();
        let col_ptr = a.col_ptr();
        let rows = a.row_idx();
        let vals = a.val();
        for q in 0..dim {
            for (j, uj) in self.basis_vector(q) {
                if uj == ZERO {
                    continue;
                }
                for p in col_ptr[j]..col_ptr[j + 1] {
                    if w[rows[p]] == ZERO {
                        touched.push(rows[p]);
                    }
                    w[rows[p]] += vals[p] * uj;
                }
            }
            // project onto the basis; only coordinates paired with touched
            // entries can be nonzero
            touched.sort_unstable();
            touched.dedup();
            let n = self.n;
            for &i in &touched {
                let (r, c) = (i % n, i / n);
                let coord_indices = if r == c { [i, usize::MAX] } else { [i, c + n * r] };
                for p in coord_indices {
                    if p == usize::MAX {
                        continue;
                    }
                    let (pr, pc) = (p % n, p / n);
                    let value = if pr == pc {
                        w[p]
                    } else if pr < pc {
                        (w[p] + w[pc + n * pr]) * FRAC_1_SQRT_2
                    } else {
                        let upper = pc + n * pr;
                        (w[p] - w[upper]) * I * FRAC_1_SQRT_2
                    };
                    out[(p, q)] = value.re;
                    max_imag = max_imag.max(value.im.abs());
                }
            }
            for &i in &touched {
                w[i] = ZERO;
            }
            touched.clear();
        }
        (out, max_imag)
    }
}

/// `log det A` of a dense complex matrix by LU with partial pivoting, kept
/// in logarithmic form to avoid overflow.
#[derive(Clone, Copy, Debug)]
pub struct LogDet {
    pub log_abs: f64,
    /// Phase of the determinant, not reduced modulo 2 pi.
    pub phase: f64,
    /// Smallest pivot magnitude relative to the largest entry of `A`.
    pub min_relative_pivot: f64,
}

pub fn log_det(mut a: Mat<c64>) -> LogDet {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let scale = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| a[(i, j)].norm())
        .fold(0.0, f64::max);
    let mut log_abs = 0.0;
    let mut phase = 0.0;
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let (piv, piv_abs) = (k..n)
            .map(|i| (i, a[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        min_pivot = min_pivot.min(piv_abs);
        if piv_abs == 0.0 {
            return LogDet {
                log_abs: f64::NEG_INFINITY,
                phase,
                min_relative_pivot: 0.0,
            };
        }
        if piv != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            phase += PI;
        }
        let p = a[(k, k)];
        log_abs += piv_abs.ln();
        phase += p.arg();
        let inv = p.inv();
        for i in k + 1..n {
            let f = a[(i, k)] * inv;
            if f == ZERO {
                continue;
            }
            for j in k + 1..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
        }
    }
    LogDet {
        log_abs,
        phase,
        min_relative_pivot: if scale > 0.0 { min_pivot / scale } else { 0.0 },
    }
}

/// `exp(A)` by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &Mat<f64>) -> Mat<f64> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > THETA_13 {
        (norm1 / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings);
    let a = Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)] * scale);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let eye = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let inner_u = Mat::<f64>::from_fn(n, n, |i, j| B[13] * a6[(i, j)] + B[11] * a4[(i, j)] + B[9] * a2[(i, j)]);
    let outer_u = &a6 * &inner_u;
    let poly_u = Mat::<f64>::from_fn(n, n, |i, j| {
        outer_u[(i, j)] + B[7] * a6[(i, j)] + B[5] * a4[(i, j)] + B[3] * a2[(i, j)] + B[1] * eye(i, j)
    });
    let u = &a * &poly_u;
    let inner_v = Mat::<f64>::from_fn(n, n, |i, j| B[12] * a6[(i, j)] + B[10] * a4[(i, j)] + B[8] * a2[(i, j)]);
    let outer_v = &a6 * &inner_v;
    let v = Mat::<f64>::from_fn(n, n, |i, j| {
        outer_v[(i, j)] + B[6] * a6[(i, j)] + B[4] * a4[(i, j)] + B[2] * a2[(i, j)] + B[0] * eye(i, j)
    });
    let q = Mat::<f64>::from_fn(n, n, |i, j| v[(i, j)] - u[(i, j)]);
    let p = Mat::<f64>::from_fn(n, n, |i, j| v[(i, j)] + u[(i, j)]);
    let mut r = q.partial_piv_lu().solve(&p);
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Null vector of a (nearly) singular sparse matrix by shifted inverse
/// iteration: `(A - shift I) x_{k+1} = x_k`. Returns the normalized vector
/// and its residual `|A x| / |x|`.
pub fn sparse_null_vector(a: &SparseMat, shift: f64, tol: f64, max_iter: usize) -> Result<(Vec<c64>, f64)> {
    let dim = a.nrows();
    let mut shifted = TripletBuilder::new(dim);
    let col_ptr = a.col_ptr();
    let rows = a.row_idx();
    let vals = a.val();
    for j in 0..dim {
        for p in col_ptr[j]..col_ptr[j + 1] {
            shifted.push(rows[p], j, vals[p]);
        }
        shifted.push(j, j, c64::new(-shift, 0.0));
    }
    let shifted = shifted.build();
    let lu = shifted.sp_lu().map_err(|e| Error::ConvergenceFailure {
        provenance: format!("sparse LU of shifted superoperator failed: {e:?}"),
    })?;
    // deterministic, generic start vector
    let mut x = Mat::<c64>::from_fn(dim, 1, |i, _| c64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05));
    let mut y = vec![ZERO; dim];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        lu.solve_in_place(x.as_mut());
        let norm = (0..dim).map(|i| x[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ConvergenceFailure {
                provenance: "inverse iteration produced a non-finite iterate".into(),
            });
        }
        for i in 0..dim {
            x[(i, 0)] /= norm;
        }
        let xv: Vec<c64> = (0..dim).map(|i| x[(i, 0)]).collect();
        spmv(a, &xv, &mut y);
        residual = vec_norm(&y);
        if residual < tol {
            return Ok((xv, residual));
        }
    }
    Err(Error::ConvergenceFailure {
        provenance: format!("inverse iteration stalled at residual {residual:e} (tol {tol:e})"),
    })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(a: &Mat<c64>) -> Result<f64> {
    let vals = a
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::ConvergenceFailure {
            provenance: format!("Hermitian eigensolve: {e:?}"),
        })?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}
