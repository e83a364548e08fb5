//! Skin-effect diagnostics of a density matrix: average position and the
//! distance-resolved coherence profile.

use std::io::Write;

use faer::c64;
use serde::Serialize;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::ZERO;
use crate::model::{Boundary, LatticeSpec, Sublattice};

/// Below this `|C(1)|` the coherence length is reported as zero.
pub const COHERENCE_FLOOR: f64 = 1e-12;

/// `sum_n (n - n_0) rho_nn` with 1-based `n` and the lattice center `n_0`.
pub fn average_position(rho: &DensityMatrix, spec: &LatticeSpec) -> f64 {
    let n0 = spec.center();
    rho.populations()
        .iter()
        .enumerate()
        .map(|(i, p)| ((i + 1) as f64 - n0) * p)
        .sum()
}

/// Largest `|n - n_0|` on the lattice; dividing by it maps `n_bar` into `[-1, 1]`.
pub fn max_displacement(spec: &LatticeSpec) -> f64 {
    let n0 = spec.center();
    let last = spec.site_count() as f64;
    (n0 - 1.0).max(last - n0)
}

pub fn normalized_average_position(rho: &DensityMatrix, spec: &LatticeSpec) -> f64 {
    average_position(rho, spec) / max_displacement(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiStatus {
    Defined,
    /// `|C(1)| >= |C(0)|`: the profile does not decay.
    Undefined,
    /// `|C(1)|` below the floor: no coherence between neighbouring cells.
    Zero,
}

#[derive(Clone, Debug)]
pub struct CoherenceResult {
    /// `C(d)` for `d = 0..=d_max`.
    pub profile: Vec<c64>,
    pub xi_c: f64,
    pub xi_status: XiStatus,
    pub n_bar: f64,
    pub n_bar_normalized: f64,
    pub n_0: f64,
}

#[derive(Serialize)]
struct CoherenceSummary {
    n_bar: f64,
    n_bar_normalized: f64,
    xi_c: Option<f64>,
    xi_status: XiStatus,
    n_0: f64,
}

impl CoherenceResult {
    pub fn write_profile_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "d,re_C,im_C,abs_C")?;
        for (d, c) in self.profile.iter().enumerate() {
            writeln!(w, "{d},{},{},{}", c.re, c.im, c.norm())?;
        }
        Ok(())
    }

    /// `{n_bar, n_bar_normalized, xi_c, n_0}`; `xi_c` is null when undefined.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(CoherenceSummary {
            n_bar: self.n_bar,
            n_bar_normalized: self.n_bar_normalized,
            xi_c: (self.xi_status != XiStatus::Undefined).then_some(self.xi_c),
            xi_status: self.xi_status,
            n_0: self.n_0,
        })
        .expect("summary is plain data")
    }
}

/// `C(d) = sum_l sum_{alpha, alpha'} <alpha, l| rho |alpha', l + d>`, with
/// `l + d` wrapped for periodic lattices and truncated otherwise, and the
/// two-point coherence length `xi_c = 1 / ln(|C(0)| / |C(1)|)`.
pub fn coherence_profile(rho: &DensityMatrix, spec: &LatticeSpec, d_max: usize) -> Result<CoherenceResult> {
    if d_max >= spec.cells {
        return Err(Error::InvalidSpec(format!("d_max = {d_max} must be below L = {}", spec.cells)));
    }
    if rho.dim() != spec.site_count() {
        return Err(Error::InvalidSpec(format!(
            "density matrix of dimension {} does not fit a lattice of {} sites",
            rho.dim(),
            spec.site_count()
        )));
    }
    let l_max = spec.cells;
    let mut profile = vec![ZERO; d_max + 1];
    for (d, c) in profile.iter_mut().enumerate() {
        for l in 1..=l_max {
            let target = l + d;
            let target = match spec.boundary {
                Boundary::Pbc => (target - 1) % l_max + 1,
                _ if target > l_max => continue,
                _ => target,
            };
            for alpha in [Sublattice::A, Sublattice::B] {
                for alpha_prime in [Sublattice::A, Sublattice::B] {
                    if let (Some(i), Some(j)) = (spec.site_index(alpha, l), spec.site_index(alpha_prime, target)) {
                        *c += rho.get(i, j);
                    }
                }
            }
        }
    }
    let (c0, c1) = (profile[0].norm(), profile.get(1).map_or(0.0, |c| c.norm()));
    let (xi_c, xi_status) = if c1 < COHERENCE_FLOOR {
        (0.0, XiStatus::Zero)
    } else if c1 >= c0 {
        (f64::NAN, XiStatus::Undefined)
    } else {
        (1.0 / (c0 / c1).ln(), XiStatus::Defined)
    };
    Ok(CoherenceResult {
        profile,
        xi_c,
        xi_status,
        n_bar: average_position(rho, spec),
        n_bar_normalized: normalized_average_position(rho, spec),
        n_0: spec.center(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::Mat;

    fn spec(cells: usize, boundary: Boundary) -> LatticeSpec {
        LatticeSpec::ssh(cells, 0.5, 1.0, 1.2, 1.2, boundary)
    }

    #[test]
    fn extreme_and_mixed_positions() {
        let s = spec(20, Boundary::Obc);
        let left = DensityMatrix::pure(40, 0);
        assert_eq!(average_position(&left, &s), -19.5);
        assert_eq!(normalized_average_position(&left, &s), -1.0);
        let right = DensityMatrix::pure(40, 39);
        assert_eq!(normalized_average_position(&right, &s), 1.0);
        let mixed = DensityMatrix::maximally_mixed(40);
        assert!(average_position(&mixed, &s).abs() < 1e-13);
        let defect = spec(20, Boundary::ObcEdgeDefect);
        assert_eq!(max_displacement(&defect), 19.0);
        assert!(average_position(&DensityMatrix::maximally_mixed(39), &defect).abs() < 1e-13);
    }

    #[test]
    fn diagonal_state_has_zero_coherence_length() {
        let s = spec(5, Boundary::Obc);
        let r = coherence_profile(&DensityMatrix::maximally_mixed(10), &s, 3).unwrap();
        assert!((r.profile[0] - c64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.xi_status, XiStatus::Zero);
        assert_eq!(r.xi_c, 0.0);
    }

    #[test]
    fn uniform_coherence_and_wrapping() {
        // |psi> uniform over all sites: rho_ij = 1/N everywhere
        let n = 8;
        let m = Mat::<c64>::from_fn(n, n, |_, _| c64::new(1.0 / n as f64, 0.0));
        let rho = DensityMatrix::new(m).unwrap();
        let obc = coherence_profile(&rho, &spec(4, Boundary::Obc), 3).unwrap();
        // 4 terms per cell pair; 4 - d cell pairs
        for d in 0..4 {
            assert!((obc.profile[d].re - 4.0 * (4 - d) as f64 / 8.0).abs() < 1e-14);
        }
        assert_eq!(obc.xi_status, XiStatus::Defined);
        let pbc = coherence_profile(&rho, &spec(4, Boundary::Pbc), 3).unwrap();
        assert!((pbc.profile[3].re - 2.0).abs() < 1e-14);
        assert_eq!(pbc.xi_status, XiStatus::Undefined);
        assert!(coherence_profile(&rho, &spec(4, Boundary::Obc), 4).is_err());
    }

    #[test]
    fn csv_and_json() {
        let r = coherence_profile(&DensityMatrix::pure(10, 0), &spec(5, Boundary::Obc), 1).unwrap();
        let mut buf = Vec::new();
        r.write_profile_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "d,re_C,im_C,abs_C\n0,1,0,1\n1,0,0,0\n");
        let j = r.summary_json();
        assert_eq!(j["n_bar"], -4.5);
        assert_eq!(j["n_0"], 5.5);
    }
}
