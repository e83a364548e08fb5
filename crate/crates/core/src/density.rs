//! Density matrices on a site basis and their column-stacked vectorization.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_min_eigenvalue, ZERO};

/// Tolerance for the positivity certificate.
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: Mat<c64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking it is square, Hermitian, trace one and
    /// positive semidefinite.
    pub fn new(matrix: Mat<c64>) -> Result<Self> {
        let rho = Self::new_unchecked(matrix);
        if rho.dim() == 0 || rho.matrix.ncols() != rho.dim() {
            return Err(Error::InvalidInitialState("density matrix must be square and nonempty".into()));
        }
        if rho.hermiticity_error() > 1e-12 {
            return Err(Error::InvalidInitialState(format!(
                "not Hermitian (deviation {:e})",
                rho.hermiticity_error()
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidInitialState(format!("trace is {tr}, expected 1")));
        }
        let min = rho.min_eigenvalue()?;
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidInitialState(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub fn new_unchecked(matrix: Mat<c64>) -> Self {
        Self { matrix }
    }

    /// Projector onto basis state `n`.
    pub fn pure(dim: usize, n: usize) -> Self {
        let mut m = Mat::<c64>::zeros(dim, dim);
        m[(n, n)] = c64::new(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        Self {
            matrix: Mat::from_fn(dim, dim, |i, j| if i == j { c64::new(w, 0.0) } else { ZERO }),
        }
    }

    /// Builds a state from an arbitrary (eigen)vector: divide out the complex
    /// trace, Hermitize and certify positivity.
    pub fn from_null_vector(v: &[c64], dim: usize) -> Result<Self> {
        let tr: c64 = (0..dim).map(|i| v[i + dim * i]).sum();
        let vmax = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(tr.norm() > 1e-12 * vmax) {
            return Err(Error::NonPositive { min_eigenvalue: f64::NAN });
        }
        let inv = tr.inv();
        let raw = unvec(v, dim);
        let m = Mat::<c64>::from_fn(dim, dim, |i, j| (raw[(i, j)] * inv + (raw[(j, i)] * inv).conj()) * 0.5);
        let rho = Self { matrix: m };
        let min = rho.min_eigenvalue()?;
        if min < -POSITIVITY_TOL {
            return Err(Error::NonPositive { min_eigenvalue: min });
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.matrix
    }

    pub fn get(&self, n: usize, m: usize) -> c64 {
        self.matrix[(n, m)]
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Largest entry of `rho - rho^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut err: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                err = err.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        hermitian_min_eigenvalue(&self.matrix)
    }

    pub fn to_vec(&self) -> Vec<c64> {
        vec(&self.matrix)
    }

    /// Frobenius distance to another matrix of the same size.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                s += (self.matrix[(i, j)] - other.matrix[(i, j)]).norm_sqr();
            }
        }
        s.sqrt()
    }
}

/// Column-stacked vectorization, `v[n + N m] = rho[n, m]`.
pub fn vec(m: &Mat<c64>) -> Vec<c64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * m.ncols());
    for j in 0..m.ncols() {
        for i in 0..n {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn unvec(v: &[c64], dim: usize) -> Mat<c64> {
    assert_eq!(v.len(), dim * dim, "vector length does not match dimension");
    Mat::from_fn(dim, dim, |i, j| v[i + dim * j])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec_round_trip() {
        let m = Mat::<c64>::from_fn(3, 3, |i, j| c64::new(i as f64, j as f64));
        let v = vec(&m);
        assert_eq!(v[1 + 3 * 2], c64::new(1.0, 2.0));
        assert_eq!(unvec(&v, 3), m);
    }

    #[test]
    fn validation() {
        assert!(DensityMatrix::new(DensityMatrix::pure(4, 2).into_matrix()).is_ok());
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(5).into_matrix()).is_ok());
        let mut bad = DensityMatrix::pure(2, 0).into_matrix();
        bad[(0, 1)] = c64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(bad), Err(Error::InvalidInitialState(_))));
        let mut neg = Mat::<c64>::zeros(2, 2);
        neg[(0, 0)] = c64::new(2.0, 0.0);
        neg[(1, 1)] = c64::new(-1.0, 0.0);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn null_vector_normalization_fixes_scale_and_phase() {
        let rho = DensityMatrix::maximally_mixed(3);
        let v: Vec<c64> = rho.to_vec().iter().map(|z| z * c64::new(0.0, -7.0)).collect();
        let back = DensityMatrix::from_null_vector(&v, 3).unwrap();
        assert!(back.distance(&rho) < 1e-15);
        let v: Vec<c64> = rho.to_vec().iter().map(|z| z * -7.0).collect();
        let back = DensityMatrix::from_null_vector(&v, 3).unwrap();
        assert!(back.distance(&rho) < 1e-15);
    }
}
