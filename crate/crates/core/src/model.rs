//! Lattice specifications, the single-particle Hamiltonian and its Bloch form.
//!
//! Sites are ordered globally as `n = 2l - 1` for `(a, l)` and `n = 2l` for
//! `(b, l)` with 1-based cells `l`. In code the index is 0-based, so `(a, l)`
//! lives at `2(l - 1)` and `(b, l)` at `2(l - 1) + 1`. The edge-defect lattice
//! drops `(b, L)`, which is the last index, so every other index is unchanged.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::winding::{integrate_closed_loop, WindingMethod, WindingResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    pub fn offset(self) -> usize {
        match self {
            Sublattice::A => 0,
            Sublattice::B => 1,
        }
    }

    /// Eigenvalue of sigma_z on this sublattice.
    pub fn parity(self) -> f64 {
        match self {
            Sublattice::A => 1.0,
            Sublattice::B => -1.0,
        }
    }

    pub fn mirror(self) -> Sublattice {
        match self {
            Sublattice::A => Sublattice::B,
            Sublattice::B => Sublattice::A,
        }
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sublattice::A => "a",
            Sublattice::B => "b",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Pbc,
    Obc,
    /// Open chain with the basis state `(b, L)` removed.
    ObcEdgeDefect,
}

/// The family of jump operators `sqrt(gamma) |alpha, l + s><alpha_prime, l|`
/// for every cell `l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dissipator {
    pub alpha: Sublattice,
    pub alpha_prime: Sublattice,
    pub s: i64,
    pub gamma: f64,
}

impl Dissipator {
    pub fn new(alpha: Sublattice, alpha_prime: Sublattice, s: i64, gamma: f64) -> Self {
        Self { alpha, alpha_prime, s, gamma }
    }

    /// `b -> a` jump, the chiral-symmetric channel used throughout the SSH examples.
    pub fn a_from_b(s: i64, gamma: f64) -> Self {
        Self::new(Sublattice::A, Sublattice::B, s, gamma)
    }

    pub fn is_chiral(&self) -> bool {
        self.alpha != self.alpha_prime
    }
}

/// A single jump operator `sqrt(rate) |to><from|` on the site basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub to: usize,
    pub from: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    /// Number of unit cells `L`.
    pub cells: usize,
    /// Hopping amplitudes `J_s` for `|a, l + s><b, l|`.
    pub hoppings: BTreeMap<i64, c64>,
    pub dissipators: Vec<Dissipator>,
    pub boundary: Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryClass {
    pub hamiltonian_chiral: bool,
    pub dissipators_chiral: bool,
}

impl LatticeSpec {
    pub fn new(cells: usize, boundary: Boundary) -> Self {
        Self {
            cells,
            hoppings: BTreeMap::new(),
            dissipators: Vec::new(),
            boundary,
        }
    }

    pub fn with_hopping(mut self, s: i64, amplitude: impl Into<c64>) -> Self {
        self.hoppings.insert(s, amplitude.into());
        self
    }

    pub fn with_dissipator(mut self, d: Dissipator) -> Self {
        self.dissipators.push(d);
        self
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        Self { boundary, ..self.clone() }
    }

    /// Dissipative SSH chain: hoppings `J_0`, `J_1` and `b -> a` jumps at
    /// ranges 0 and 1.
    pub fn ssh(cells: usize, j0: f64, j1: f64, gamma0: f64, gamma1: f64, boundary: Boundary) -> Self {
        Self::new(cells, boundary)
            .with_hopping(0, j0)
            .with_hopping(1, j1)
            .with_dissipator(Dissipator::a_from_b(0, gamma0))
            .with_dissipator(Dissipator::a_from_b(1, gamma1))
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidSpec(msg));
        if self.cells < 2 {
            return invalid(format!("need at least 2 cells, got {}", self.cells));
        }
        let max_range = self.cells as i64;
        for (&s, j) in &self.hoppings {
            if s.abs() >= max_range {
                return invalid(format!("hopping range {s} not below L = {}", self.cells));
            }
            if !(j.re.is_finite() && j.im.is_finite()) {
                return invalid(format!("hopping J_{s} is not finite"));
            }
        }
        for (i, d) in self.dissipators.iter().enumerate() {
            if d.s.abs() >= max_range {
                return invalid(format!("dissipator {i} range {} not below L = {}", d.s, self.cells));
            }
            if !d.gamma.is_finite() || d.gamma < 0.0 {
                return invalid(format!("dissipator {i} rate {} must be finite and nonnegative", d.gamma));
            }
        }
        if !self.hoppings.values().any(|j| j.norm() > 0.0) {
            return invalid("at least one hopping must be nonzero".into());
        }
        if !self.dissipators.iter().any(|d| d.gamma > 0.0) {
            return invalid("at least one dissipator must have a positive rate".into());
        }
        Ok(())
    }

    /// Number of single-particle basis states.
    pub fn site_count(&self) -> usize {
        match self.boundary {
            Boundary::ObcEdgeDefect => 2 * self.cells - 1,
            _ => 2 * self.cells,
        }
    }

    /// 0-based basis index of `(sublattice, cell)` with 1-based `cell`, or
    /// `None` when the state is not part of the lattice.
    pub fn site_index(&self, sublattice: Sublattice, cell: usize) -> Option<usize> {
        if cell == 0 || cell > self.cells {
            return None;
        }
        if self.boundary == Boundary::ObcEdgeDefect && sublattice == Sublattice::B && cell == self.cells {
            return None;
        }
        Some(2 * (cell - 1) + sublattice.offset())
    }

    /// Inverse of [`site_index`](Self::site_index).
    pub fn site_of(&self, n: usize) -> (Sublattice, usize) {
        let sub = if n % 2 == 0 { Sublattice::A } else { Sublattice::B };
        (sub, n / 2 + 1)
    }

    /// Cell reached from `cell` by range `s`, wrapped or truncated per boundary.
    fn shifted_cell(&self, cell: usize, s: i64) -> Option<usize> {
        let l = self.cells as i64;
        let target = cell as i64 + s;
        match self.boundary {
            Boundary::Pbc => Some(((target - 1).rem_euclid(l) + 1) as usize),
            Boundary::Obc | Boundary::ObcEdgeDefect => (1..=l).contains(&target).then_some(target as usize),
        }
    }

    /// Nonzero entries `(row, col, value)` of the Hamiltonian, duplicates allowed.
    pub fn hamiltonian_entries(&self) -> Vec<(usize, usize, c64)> {
        let mut out = Vec::new();
        for (&s, &j) in &self.hoppings {
            if j.norm() == 0.0 {
                continue;
            }
            for l in 1..=self.cells {
                let Some(target) = self.shifted_cell(l, s) else { continue };
                let (Some(to), Some(from)) =
                    (self.site_index(Sublattice::A, target), self.site_index(Sublattice::B, l))
                else {
                    continue;
                };
                out.push((to, from, j));
                out.push((from, to, j.conj()));
            }
        }
        out
    }

    pub fn build_hamiltonian(&self) -> Result<Mat<c64>> {
        self.validate()?;
        let n = self.site_count();
        let mut h = Mat::<c64>::zeros(n, n);
        for (r, c, v) in self.hamiltonian_entries() {
            h[(r, c)] += v;
        }
        Ok(h)
    }

    /// All individual jump operators, one per dissipator family and cell.
    pub fn jumps(&self) -> Vec<Jump> {
        let mut out = Vec::new();
        for d in &self.dissipators {
            if d.gamma == 0.0 {
                continue;
            }
            for l in 1..=self.cells {
                let Some(target) = self.shifted_cell(l, d.s) else { continue };
                let (Some(to), Some(from)) = (self.site_index(d.alpha, target), self.site_index(d.alpha_prime, l))
                else {
                    continue;
                };
                out.push(Jump { to, from, rate: d.gamma });
            }
        }
        out
    }

    pub fn classify_symmetry(&self) -> Result<SymmetryClass> {
        self.validate()?;
        Ok(SymmetryClass {
            // every term of the Hamiltonian connects a to b
            hamiltonian_chiral: true,
            dissipators_chiral: self.dissipators.iter().filter(|d| d.gamma > 0.0).all(Dissipator::is_chiral),
        })
    }

    pub fn bloch(&self) -> BlochHamiltonian {
        BlochHamiltonian {
            hoppings: self.hoppings.iter().map(|(&s, &j)| (s, j)).collect(),
        }
    }

    pub fn max_hopping(&self) -> f64 {
        self.hoppings.values().map(|j| j.norm()).fold(0.0, f64::max)
    }

    /// Sum of all dissipation rates, `B_1 + B_4`.
    pub fn total_rate(&self) -> f64 {
        self.dissipators.iter().map(|d| d.gamma).sum()
    }

    /// Center of the lattice in 1-based site numbering.
    pub fn center(&self) -> f64 {
        match self.boundary {
            Boundary::ObcEdgeDefect => self.cells as f64,
            _ => (1.0 + 2.0 * self.cells as f64) / 2.0,
        }
    }

    /// Band winding number of `h(k)` on an `n_k` point grid.
    pub fn winding_wh(&self, n_k: usize) -> Result<WindingResult> {
        self.validate()?;
        let tol = 1e-8 * self.max_hopping();
        self.bloch().winding(n_k, tol)
    }
}

/// `H(k) = [[0, h*], [h, 0]]` with `h(k) = sum_s J_s e^{isk}`.
#[derive(Clone, Debug)]
pub struct BlochHamiltonian {
    hoppings: Vec<(i64, c64)>,
}

impl BlochHamiltonian {
    pub fn h(&self, k: f64) -> c64 {
        self.hoppings
            .iter()
            .map(|&(s, j)| j * c64::cis(s as f64 * k))
            .sum()
    }

    pub fn matrix(&self, k: f64) -> [[c64; 2]; 2] {
        let h = self.h(k);
        let zero = c64::new(0.0, 0.0);
        [[zero, h.conj()], [h, zero]]
    }

    pub fn winding(&self, n_k: usize, gap_tol: f64) -> Result<WindingResult> {
        if n_k < 64 {
            return Err(Error::InvalidSpec(format!("n_k = {n_k} below the minimum of 64")));
        }
        let mut min_abs = f64::INFINITY;
        let total = integrate_closed_loop(n_k, |k| {
            let h = self.h(k);
            min_abs = min_abs.min(h.norm());
            if h.norm() <= gap_tol {
                return Err(Error::GapClosed { min_abs: h.norm(), tol: gap_tol });
            }
            Ok(h.arg())
        })?;
        Ok(WindingResult::from_phase(total, WindingMethod::BlochPhase, 0.0, n_k))
    }
}

/// Grid of `n` Brillouin-zone momenta `2 pi j / n`.
pub fn momentum_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| 2.0 * PI * j as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    #[test]
    fn two_cell_intra_hopping_pbc() {
        let spec = LatticeSpec::new(2, Boundary::Pbc)
            .with_hopping(0, 1.0)
            .with_dissipator(Dissipator::a_from_b(0, 1.0));
        let h = spec.build_hamiltonian().unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let expected = if (r, col) == (0, 1) || (r, col) == (1, 0) || (r, col) == (2, 3) || (r, col) == (3, 2) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(h[(r, col)], c(expected), "H[{r},{col}]");
            }
        }
    }

    #[test]
    fn two_cell_inter_hopping_obc_has_no_wrap() {
        let spec = LatticeSpec::new(2, Boundary::Obc)
            .with_hopping(1, 1.0)
            .with_dissipator(Dissipator::a_from_b(0, 1.0));
        let h = spec.build_hamiltonian().unwrap();
        // <a,2|H|b,1> = 1: a,2 -> index 2, b,1 -> index 1
        assert_eq!(h[(2, 1)], c(1.0));
        assert_eq!(h[(1, 2)], c(1.0));
        let nonzero = (0..4).flat_map(|r| (0..4).map(move |c| (r, c))).filter(|&(r, c)| h[(r, c)].norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn edge_defect_drops_last_site() {
        let spec = LatticeSpec::ssh(3, 1.0, 0.5, 1.0, 1.0, Boundary::ObcEdgeDefect);
        let h = spec.build_hamiltonian().unwrap();
        assert_eq!(h.nrows(), 5);
        assert_eq!(spec.site_index(Sublattice::B, 3), None);
        assert_eq!(spec.center(), 3.0);
        assert!(spec.jumps().iter().all(|j| j.to < 5 && j.from < 5));
    }

    #[test]
    fn chiral_antisymmetry_all_boundaries() {
        for boundary in [Boundary::Pbc, Boundary::Obc, Boundary::ObcEdgeDefect] {
            let spec = LatticeSpec::new(3, boundary)
                .with_hopping(0, 1.0)
                .with_hopping(1, 0.5)
                .with_hopping(-2, c64::new(0.3, -0.2))
                .with_dissipator(Dissipator::a_from_b(1, 1.0));
            let h = spec.build_hamiltonian().unwrap();
            for r in 0..h.nrows() {
                for col in 0..h.ncols() {
                    let pr = spec.site_of(r).0.parity();
                    let pc = spec.site_of(col).0.parity();
                    assert!((pr * pc * h[(r, col)] + h[(r, col)]).norm() < 1e-15);
                    assert!((h[(r, col)] - h[(col, r)].conj()).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn symmetry_classes() {
        let fig2 = LatticeSpec::ssh(4, 0.5, 1.0, 1.2, 1.2, Boundary::Obc);
        assert_eq!(
            fig2.classify_symmetry().unwrap(),
            SymmetryClass { hamiltonian_chiral: true, dissipators_chiral: true }
        );
        let fig4 = LatticeSpec::new(4, Boundary::Obc)
            .with_hopping(0, 0.6)
            .with_hopping(1, 1.0)
            .with_dissipator(Dissipator::new(Sublattice::A, Sublattice::A, 1, 2.25))
            .with_dissipator(Dissipator::new(Sublattice::B, Sublattice::B, -1, 1.2));
        assert_eq!(
            fig4.classify_symmetry().unwrap(),
            SymmetryClass { hamiltonian_chiral: true, dissipators_chiral: false }
        );
        let empty = LatticeSpec::new(4, Boundary::Obc).with_hopping(0, 1.0);
        assert!(matches!(empty.classify_symmetry(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn validation_errors() {
        let base = LatticeSpec::ssh(4, 0.5, 1.0, 1.2, 1.2, Boundary::Obc);
        assert!(base.validate().is_ok());
        let mut bad = base.clone();
        bad.cells = 1;
        assert!(bad.validate().is_err());
        assert!(base.clone().with_hopping(4, 1.0).validate().is_err());
        assert!(base.clone().with_dissipator(Dissipator::a_from_b(0, -1.0)).validate().is_err());
        assert!(base.clone().with_dissipator(Dissipator::a_from_b(-5, 1.0)).validate().is_err());
        let mut silent = base.clone();
        silent.dissipators.iter_mut().for_each(|d| d.gamma = 0.0);
        assert!(silent.validate().is_err());
    }

    #[test]
    fn band_winding_values() {
        let w = |spec: LatticeSpec| spec.winding_wh(256).unwrap();
        let r = w(LatticeSpec::ssh(10, 0.5, 1.0, 1.2, 1.2, Boundary::Pbc));
        assert_eq!(r.value, 1);
        assert!(r.residual < 0.01);
        assert_eq!(w(LatticeSpec::ssh(10, 2.0, 1.0, 1.2, 1.2, Boundary::Pbc)).value, 0);
        for s_h in -2..=2 {
            let spec = LatticeSpec::new(10, Boundary::Pbc)
                .with_hopping(s_h, 0.7)
                .with_dissipator(Dissipator::a_from_b(0, 1.0));
            assert_eq!(w(spec).value, s_h);
        }
        let long_range = LatticeSpec::new(10, Boundary::Pbc)
            .with_hopping(0, 0.5)
            .with_hopping(1, 1.0)
            .with_hopping(-1, 0.5)
            .with_dissipator(Dissipator::a_from_b(0, 1.2))
            .with_dissipator(Dissipator::a_from_b(1, 1.2));
        assert_eq!(w(long_range).value, 1);
    }

    #[test]
    fn band_winding_gap_closed() {
        let spec = LatticeSpec::ssh(10, 1.0, 1.0, 1.2, 1.2, Boundary::Pbc);
        assert!(matches!(spec.winding_wh(256), Err(Error::GapClosed { .. })));
        assert!(spec.winding_wh(32).is_err());
    }
}
