//! Two hard-core bosons on the lattice.

use std::collections::BTreeMap;
use std::io::Write;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::ZERO;
use crate::model::LatticeSpec;
use crate::observables;
use crate::spectra::{diagonalize, steady_state, steady_state_sparse};
use crate::superop::{assemble_lindblad, JumpOperator, Provenance, Superoperator};

/// Default ceiling for densifying a two-body Liouvillian (1 GiB).
pub const DEFAULT_DENSE_BUDGET: usize = 1 << 30;

/// Unordered pairs `{p, q}`, `p < q`, of single-particle sites in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoBodyBasis {
    sites: usize,
    pairs: Vec<(usize, usize)>,
}

impl TwoBodyBasis {
    pub fn new(sites: usize) -> Self {
        let pairs = (0..sites).flat_map(|p| (p + 1..sites).map(move |q| (p, q))).collect();
        Self { sites, pairs }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        self.pairs[index]
    }

    /// Index of the state with sites `p` and `q` occupied, in either order.
    /// `None` for double occupancy.
    pub fn index(&self, p: usize, q: usize) -> Option<usize> {
        if p == q || p >= self.sites || q >= self.sites {
            return None;
        }
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        Some(p * (2 * self.sites - p - 1) / 2 + (q - p - 1))
    }

    /// `P (O (x) 1 + 1 (x) O) P` for a single-particle operator given by
    /// entries `(row, col, value)`.
    pub fn lift(&self, entries: &[(usize, usize, c64)]) -> Vec<(usize, usize, c64)> {
        let mut by_col: BTreeMap<usize, Vec<(usize, c64)>> = BTreeMap::new();
        for &(x, y, v) in entries {
            by_col.entry(y).or_default().push((x, v));
        }
        let mut out: BTreeMap<(usize, usize), c64> = BTreeMap::new();
        for (s, &(p, q)) in self.pairs.iter().enumerate() {
            for (moved, spectator) in [(p, q), (q, p)] {
                let Some(col) = by_col.get(&moved) else { continue };
                for &(x, v) in col {
                    if let Some(t) = self.index(x, spectator) {
                        *out.entry((t, s)).or_insert(ZERO) += v;
                    }
                }
            }
        }
        out.into_iter().filter(|(_, v)| *v != ZERO).map(|((t, s), v)| (t, s, v)).collect()
    }
}

pub fn build_twobody_liouvillian(spec: &LatticeSpec) -> Result<Superoperator> {
    spec.validate()?;
    let basis = TwoBodyBasis::new(spec.site_count());
    let h2 = basis.lift(&spec.hamiltonian_entries());
    let jumps: Vec<JumpOperator> = spec
        .jumps()
        .into_iter()
        .map(|j| JumpOperator { entries: basis.lift(&[(j.to, j.from, c64::new(j.rate.sqrt(), 0.0))]) })
        .collect();
    let matrix = assemble_lindblad(basis.dim(), &h2, &jumps);
    Ok(Superoperator::from_sparse(
        matrix,
        Some(basis.dim()),
        Provenance::TwoBody { cells: spec.cells, boundary: spec.boundary },
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyMode {
    /// Full diagonalization; also certifies uniqueness.
    DenseEig,
    /// Shifted inverse iteration on the sparse generator.
    SparseNull,
}

pub fn twobody_steady_state(sup: &Superoperator, mode: SteadyMode) -> Result<DensityMatrix> {
    twobody_steady_state_within(sup, mode, DEFAULT_DENSE_BUDGET)
}

pub fn twobody_steady_state_within(sup: &Superoperator, mode: SteadyMode, budget: usize) -> Result<DensityMatrix> {
    match mode {
        SteadyMode::DenseEig => {
            // a budget check before the eigensolver allocates
            let dim = sup.dim();
            let bytes = dim.saturating_mul(dim).saturating_mul(std::mem::size_of::<c64>());
            if bytes > budget {
                return Err(Error::DimensionTooLarge { dim, bytes, budget });
            }
            let spectrum = diagonalize(sup, true)?;
            steady_state(sup, &spectrum)
        }
        SteadyMode::SparseNull => steady_state_sparse(sup),
    }
}

/// `rho1[x, y] = Tr(rho2 c_y^dag c_x)`; trace 2.
#[derive(Clone, Debug)]
pub struct ReducedDensityMatrix {
    pub matrix: Mat<c64>,
}

impl ReducedDensityMatrix {
    pub fn trace(&self) -> c64 {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut e: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                e = e.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        e
    }

    /// `rho1 / 2` as a single-particle density matrix.
    pub fn normalized(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(Mat::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            self.matrix[(i, j)] * 0.5
        }))
    }

    /// Average position of the diagonal of `rho1 / 2` relative to the lattice center.
    pub fn average_position(&self, spec: &LatticeSpec) -> f64 {
        observables::average_position(&self.normalized(), spec)
    }

    /// `n,m,re,im` rows with 1-based site indices.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,m,re,im")?;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                let z = self.matrix[(i, j)];
                writeln!(w, "{},{},{},{}", i + 1, j + 1, z.re, z.im)?;
            }
        }
        Ok(())
    }
}

pub fn reduce_to_single_particle(rho2: &DensityMatrix, basis: &TwoBodyBasis) -> ReducedDensityMatrix {
    assert_eq!(rho2.dim(), basis.dim(), "two-body state does not match the basis");
    let n = basis.sites();
    let mut m = Mat::<c64>::zeros(n, n);
    // sum over states s containing x of rho2[s, s with x -> y]
    for (s, &(p, q)) in basis.pairs().iter().enumerate() {
        for (x, spectator) in [(p, q), (q, p)] {
            for y in 0..n {
                if let Some(t) = basis.index(y, spectator) {
                    m[(x, y)] += rho2.get(s, t);
                }
            }
        }
    }
    ReducedDensityMatrix { matrix: m }
}
