//! Liouvillian superoperators in real space and in momentum-difference blocks.
//!
//! Density matrices are vectorized by stacking columns: the entry
//! `rho[n, m] = <n| rho |m>` lives at index `n + N m`, so the ket index runs
//! fastest. With this convention `vec(A rho B) = (B^T (x) A) vec(rho)` and the
//! Lindblad generator reads
//!
//! ```text
//! L = -i (I (x) H - H^T (x) I)
//!     + sum_p (D_p^* (x) D_p - 1/2 I (x) D_p^dag D_p - 1/2 (D_p^dag D_p)^T (x) I).
//! ```

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spmv, HermitianBasis, SparseMat, TripletBuilder, I, ZERO};
use crate::model::{Boundary, LatticeSpec, Sublattice};

/// Bijection between `(alpha, alpha_prime, l, l_prime)` and flat indices of
/// the vectorized density matrix. `(alpha, l)` labels the ket and
/// `(alpha_prime, l_prime)` the bra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VecIndexMap {
    pub cells: usize,
    pub boundary: Boundary,
}

impl VecIndexMap {
    pub fn new(spec: &LatticeSpec) -> Self {
        Self { cells: spec.cells, boundary: spec.boundary }
    }

    fn probe(&self) -> LatticeSpec {
        LatticeSpec::new(self.cells, self.boundary)
    }

    pub fn sites(&self) -> usize {
        self.probe().site_count()
    }

    pub fn dim(&self) -> usize {
        self.sites() * self.sites()
    }

    pub fn index(&self, alpha: Sublattice, alpha_prime: Sublattice, l: usize, l_prime: usize) -> Option<usize> {
        let probe = self.probe();
        let ket = probe.site_index(alpha, l)?;
        let bra = probe.site_index(alpha_prime, l_prime)?;
        Some(ket + self.sites() * bra)
    }

    pub fn label(&self, index: usize) -> (Sublattice, Sublattice, usize, usize) {
        let n = self.sites();
        let probe = self.probe();
        let (alpha, l) = probe.site_of(index % n);
        let (alpha_prime, l_prime) = probe.site_of(index / n);
        (alpha, alpha_prime, l, l_prime)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    RealSpace { boundary: Boundary, cells: usize },
    KBlock { k: f64, n_indices: Vec<usize> },
    TwoBody { cells: usize, boundary: Boundary },
    /// Matrix supplied directly, e.g. read from a file or built in a test.
    External,
}

impl Provenance {
    fn header(&self) -> String {
        match self {
            Provenance::RealSpace { boundary, cells } => format!("real_space cells={cells} boundary={}", boundary_name(*boundary)),
            Provenance::KBlock { k, n_indices } => {
                let first = n_indices.first().copied().unwrap_or(0);
                let last = n_indices.last().copied().unwrap_or(0);
                format!("kblock K={k} n={first}..{last}")
            }
            Provenance::TwoBody { cells, boundary } => format!("two_body cells={cells} boundary={}", boundary_name(*boundary)),
            Provenance::External => "external".into(),
        }
    }
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Pbc => "pbc",
        Boundary::Obc => "obc",
        Boundary::ObcEdgeDefect => "obc_edge_defect",
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.header())
    }
}

/// A general jump operator given by its nonzero entries `(row, col, value)`.
#[derive(Clone, Debug, Default)]
pub struct JumpOperator {
    pub entries: Vec<(usize, usize, c64)>,
}

/// A Liouvillian together with the data needed to interpret its indices.
///
/// The matrix is kept in compressed-column form; [`dense`](Self::dense)
/// materializes it for eigensolvers.
#[derive(Clone, Debug)]
pub struct Superoperator {
    matrix: SparseMat,
    /// Dimension of the underlying Hilbert space for vectorized operators,
    /// `None` for K-blocks.
    hilbert_dim: Option<usize>,
    pub index_map: Option<VecIndexMap>,
    pub provenance: Provenance,
}

impl Superoperator {
    pub fn from_sparse(matrix: SparseMat, hilbert_dim: Option<usize>, provenance: Provenance) -> Self {
        Self { matrix, hilbert_dim, index_map: None, provenance }
    }

    pub fn from_dense(m: &Mat<c64>, provenance: Provenance) -> Self {
        let mut b = TripletBuilder::new(m.nrows());
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                b.push(i, j, m[(i, j)]);
            }
        }
        let n = (m.nrows() as f64).sqrt().round() as usize;
        let hilbert_dim = (n * n == m.nrows()).then_some(n);
        Self::from_sparse(b.build(), hilbert_dim, provenance)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hilbert_dim(&self) -> Option<usize> {
        self.hilbert_dim
    }

    pub fn sparse(&self) -> &SparseMat {
        &self.matrix
    }

    pub fn dense(&self) -> Mat<c64> {
        self.matrix.to_dense()
    }

    /// Dense copy, refusing allocations above `budget` bytes.
    pub fn dense_within(&self, budget: usize) -> Result<Mat<c64>> {
        let dim = self.dim();
        let bytes = dim.saturating_mul(dim).saturating_mul(std::mem::size_of::<c64>());
        if bytes > budget {
            return Err(Error::DimensionTooLarge { dim, bytes, budget });
        }
        Ok(self.dense())
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        let mut out = vec![ZERO; self.dim()];
        spmv(&self.matrix, v, &mut out);
        out
    }

    /// Whether the matrix acts on vectorized operators of a Hilbert space
    /// (as opposed to a momentum block), so that Hermiticity preservation
    /// can be exploited.
    pub fn acts_on_operators(&self) -> bool {
        self.hilbert_dim.is_some() && !matches!(self.provenance, Provenance::KBlock { .. })
    }

    /// Real matrix in the Hermitian operator basis when the generator maps
    /// Hermitian operators to Hermitian operators (discarded imaginary parts
    /// below `1e-13` of the largest entry).
    pub fn real_form(&self) -> Option<(HermitianBasis, Mat<f64>)> {
        if !self.acts_on_operators() {
            return None;
        }
        let basis = HermitianBasis { n: self.hilbert_dim? };
        let (real, max_imag) = basis.real_representation(&self.matrix);
        let scale = crate::linalg::sparse_max_abs(&self.matrix).max(f64::MIN_POSITIVE);
        (max_imag <= 1e-13 * scale).then_some((basis, real))
    }

    /// Writes the matrix as text: a header with the dimension and provenance
    /// followed by one line per row of `re im` pairs.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let dense = self.dense();
        writeln!(w, "# lindtop superoperator")?;
        writeln!(w, "dim {}", self.dim())?;
        writeln!(w, "provenance {}", self.provenance)?;
        let mut line = String::new();
        for i in 0..self.dim() {
            line.clear();
            for j in 0..self.dim() {
                if j > 0 {
                    line.push(' ');
                }
                let z = dense[(i, j)];
                let _ = write!(line, "{} {}", z.re, z.im);
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Reads the format produced by [`write_text`](Self::write_text). The
    /// provenance line is kept only as text, so the result is `External`.
    pub fn read_text<R: BufRead>(r: R) -> Result<(Mat<c64>, String)> {
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Format("unexpected end of file".into()))?
                .map_err(Error::from)
        };
        let magic = next()?;
        if magic.trim() != "# lindtop superoperator" {
            return Err(Error::Format(format!("bad magic line {magic:?}")));
        }
        let dim_line = next()?;
        let dim: usize = dim_line
            .strip_prefix("dim ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("bad dim line {dim_line:?}")))?;
        let prov_line = next()?;
        let provenance = prov_line
            .strip_prefix("provenance ")
            .ok_or_else(|| Error::Format(format!("bad provenance line {prov_line:?}")))?
            .to_string();
        let mut m = Mat::<c64>::zeros(dim, dim);
        for i in 0..dim {
            let row = next()?;
            let nums = row
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Format(format!("row {i}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if nums.len() != 2 * dim {
                return Err(Error::Format(format!("row {i} has {} numbers, expected {}", nums.len(), 2 * dim)));
            }
            for j in 0..dim {
                m[(i, j)] = c64::new(nums[2 * j], nums[2 * j + 1]);
            }
        }
        Ok((m, provenance))
    }
}

/// Assembles the Lindblad generator on an `n`-dimensional Hilbert space from
/// Hamiltonian entries and jump operators. Duplicate entries are summed.
pub fn assemble_lindblad(n: usize, hamiltonian: &[(usize, usize, c64)], jumps: &[JumpOperator]) -> SparseMat {
    let mut b = TripletBuilder::new(n * n);
    // -i (I (x) H): rho[r, m] <- H[r, c] rho[c, m]
    // +i (H^T (x) I): rho[r, m] <- rho[r, c'] H[c', m]
    for &(r, c, h) in hamiltonian {
        for m in 0..n {
            b.push(r + n * m, c + n * m, -I * h);
            b.push(m + n * c, m + n * r, I * h);
        }
    }
    for d in jumps {
        // D rho D^dag: rho'[x, x'] += d[x, y] rho[y, y'] conj(d[x', y'])
        for &(x, y, dv) in &d.entries {
            for &(xp, yp, dpv) in &d.entries {
                b.push(x + n * xp, y + n * yp, dv * dpv.conj());
            }
        }
        // G = D^dag D, G[y, y'] = sum_x conj(d[x, y]) d[x, y']
        let mut g: BTreeMap<(usize, usize), c64> = BTreeMap::new();
        for &(x, y, dv) in &d.entries {
            for &(x2, y2, dv2) in &d.entries {
                if x == x2 {
                    *g.entry((y, y2)).or_insert(ZERO) += dv.conj() * dv2;
                }
            }
        }
        for (&(y, yp), &gv) in &g {
            for m in 0..n {
                // -1/2 G rho
                b.push(y + n * m, yp + n * m, -0.5 * gv);
                // -1/2 rho G: rho'[m, yp] += rho[m, y] G[y, yp]
                b.push(m + n * yp, m + n * y, -0.5 * gv);
            }
        }
    }
    b.build()
}

/// Full real-space Liouvillian of a single particle on the lattice.
pub fn build_liouvillian_real(spec: &LatticeSpec) -> Result<Superoperator> {
    spec.validate()?;
    let n = spec.site_count();
    let jumps: Vec<JumpOperator> = spec
        .jumps()
        .into_iter()
        .map(|j| JumpOperator { entries: vec![(j.to, j.from, c64::new(j.rate.sqrt(), 0.0))] })
        .collect();
    let matrix = assemble_lindblad(n, &spec.hamiltonian_entries(), &jumps);
    Ok(Superoperator {
        matrix,
        hilbert_dim: Some(n),
        index_map: Some(VecIndexMap::new(spec)),
        provenance: Provenance::RealSpace { boundary: spec.boundary, cells: spec.cells },
    })
}

pub type Block4 = [[c64; 4]; 4];

/// Coefficients entering the momentum-difference blocks.
#[derive(Clone, Debug)]
pub struct KCoefficients {
    pub a11: c64,
    pub a14: c64,
    pub a41: c64,
    pub a44: c64,
    /// Total rate of jumps leaving sublattice a.
    pub b1: f64,
    /// Total rate of jumps leaving sublattice b.
    pub b4: f64,
    /// `C_n = sum_s J_s e^{-i s k_n}` for `n = 1..=L` (stored 0-based).
    pub c: Vec<c64>,
    /// `D_n = sum_s J_s e^{-i s k_n'}` with `k_n' = k_n + K`.
    pub d: Vec<c64>,
}

/// The block of the Liouvillian at fixed momentum difference `K`:
/// `diag(M_1, ..., M_L) + N_L (x) M_0` with `N_L` the all-ones matrix. Each
/// 4x4 block uses the sublattice pair order `(aa, ab, ba, bb)`.
#[derive(Clone, Debug)]
pub struct KBlock {
    pub k: f64,
    pub cells: usize,
    pub m: Vec<Block4>,
    pub m0: Block4,
    pub coefficients: KCoefficients,
}

/// Lattice momentum `k_n = 2 pi n / L`.
pub fn lattice_momentum(n: usize, cells: usize) -> f64 {
    TAU * n as f64 / cells as f64
}

pub fn kcoefficients(spec: &LatticeSpec, k: f64) -> KCoefficients {
    let l = spec.cells;
    let lf = l as f64;
    let mut a = [[ZERO; 2]; 2];
    let (mut b1, mut b4) = (0.0, 0.0);
    for d in &spec.dissipators {
        let phase = c64::cis(k * d.s as f64) * (d.gamma / lf);
        a[d.alpha.offset()][d.alpha_prime.offset()] += phase;
        match d.alpha_prime {
            Sublattice::A => b1 += d.gamma,
            Sublattice::B => b4 += d.gamma,
        }
    }
    let fourier = |q: f64| -> c64 {
        spec.hoppings
            .iter()
            .map(|(&s, &j)| j * c64::cis(-(s as f64) * q))
            .sum()
    };
    let c = (1..=l).map(|n| fourier(lattice_momentum(n, l))).collect();
    let d = (1..=l).map(|n| fourier(lattice_momentum(n, l) + k)).collect();
    KCoefficients {
        a11: a[0][0],
        a14: a[0][1],
        a41: a[1][0],
        a44: a[1][1],
        b1,
        b4,
        c,
        d,
    }
}

/// `M_n` for given `C_n`, `D_n` and outgoing rates.
pub fn m_block(c: c64, d: c64, b1: f64, b4: f64) -> Block4 {
    let z = ZERO;
    let re = |x: f64| c64::new(x, 0.0);
    let mid = re(-(b1 + b4) / 2.0);
    [
        [re(-b1), I * d.conj(), -I * c, z],
        [I * d, mid, z, -I * c],
        [-I * c.conj(), z, mid, I * d.conj()],
        [z, -I * c.conj(), I * d, re(-b4)],
    ]
}

pub fn m0_block(coef: &KCoefficients) -> Block4 {
    let z = ZERO;
    [
        [coef.a11, z, z, coef.a14],
        [z, z, z, z],
        [z, z, z, z],
        [coef.a41, z, z, coef.a44],
    ]
}

pub fn build_kblock(spec: &LatticeSpec, k: f64) -> Result<KBlock> {
    spec.validate()?;
    if spec.boundary != Boundary::Pbc {
        return Err(Error::BoundaryMismatch(spec.boundary));
    }
    let coefficients = kcoefficients(spec, k);
    let m = coefficients
        .c
        .iter()
        .zip(&coefficients.d)
        .map(|(&c, &d)| m_block(c, d, coefficients.b1, coefficients.b4))
        .collect();
    let m0 = m0_block(&coefficients);
    Ok(KBlock { k, cells: spec.cells, m, m0, coefficients })
}

impl KBlock {
    pub fn dim(&self) -> usize {
        4 * self.cells
    }

    pub fn assembled(&self) -> Mat<c64> {
        let l = self.cells;
        let mut out = Mat::<c64>::zeros(4 * l, 4 * l);
        for (n, block) in self.m.iter().enumerate() {
            for i in 0..4 {
                for j in 0..4 {
                    out[(4 * n + i, 4 * n + j)] += block[i][j];
                }
            }
        }
        for n in 0..l {
            for m in 0..l {
                for i in 0..4 {
                    for j in 0..4 {
                        out[(4 * n + i, 4 * m + j)] += self.m0[i][j];
                    }
                }
            }
        }
        out
    }

    /// `M_1 + L M_0`, which carries the steady branch when all blocks coincide.
    pub fn m_plus_l_m0(&self, n: usize) -> Block4 {
        let mut out = self.m[n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += self.m0[i][j] * self.cells as f64;
            }
        }
        out
    }

    pub fn to_superoperator(&self) -> Superoperator {
        Superoperator::from_sparse(
            {
                let dense = self.assembled();
                let mut b = TripletBuilder::new(self.dim());
                for j in 0..self.dim() {
                    for i in 0..self.dim() {
                        b.push(i, j, dense[(i, j)]);
                    }
                }
                b.build()
            },
            None,
            Provenance::KBlock { k: self.k, n_indices: (1..=self.cells).collect() },
        )
    }
}

/// K-blocks on the uniform grid `K_j = 2 pi j / n_k`.
pub fn kblock_sweep(spec: &LatticeSpec, n_k: usize) -> Result<Vec<KBlock>> {
    if n_k < 4 {
        return Err(Error::InvalidSpec(format!("n_K = {n_k} below the minimum of 4")));
    }
    (0..n_k).map(|j| build_kblock(spec, TAU * j as f64 / n_k as f64)).collect()
}

pub fn block_to_mat(b: &Block4) -> Mat<c64> {
    Mat::from_fn(4, 4, |i, j| b[i][j])
}
