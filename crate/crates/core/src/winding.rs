//! Winding-number bookkeeping shared by the band and Liouvillian windings.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindingMethod {
    /// Phase of the off-diagonal Bloch component `h(k)`.
    BlochPhase,
    LogDet,
    BranchTracking,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub value: i64,
    /// Accumulated phase divided by 2 pi.
    pub raw: f64,
    pub residual: f64,
    pub method: WindingMethod,
    /// Offset `epsilon` of the reference point `-epsilon` (0 for band windings).
    #[serde(rename = "epsilon")]
    pub reference_offset: f64,
    #[serde(rename = "n_K")]
    pub n_grid: usize,
}

impl WindingResult {
    pub fn from_phase(total_phase: f64, method: WindingMethod, reference_offset: f64, n_grid: usize) -> Self {
        let raw = total_phase / TAU;
        let value = raw.round();
        Self {
            value: value as i64,
            raw,
            residual: (raw - value).abs(),
            method,
            reference_offset,
            n_grid,
        }
    }
}

/// Wraps a phase difference into `(-pi, pi]`.
pub fn wrap_phase(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Largest phase step accepted between neighbouring samples before the
/// interval is bisected.
const MAX_STEP: f64 = PI / 3.0;
const MAX_DEPTH: u32 = 30;

/// Total phase accumulated by a periodic function over `[0, 2 pi)`, sampled on
/// a uniform grid of `n` points. `phase_at` returns the phase (any branch) of
/// the function at a given parameter. Intervals whose phase step exceeds
/// `pi / 3` are bisected until the steps are resolved.
pub fn integrate_closed_loop<F>(n: usize, mut phase_at: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let grid: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let phases = grid.iter().map(|&t| phase_at(t)).collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for j in 0..n {
        let (a, b) = (grid[j], if j + 1 < n { grid[j + 1] } else { TAU });
        let (pa, pb) = (phases[j], phases[(j + 1) % n]);
        total += refine(&mut phase_at, a, b, pa, pb, 0)?;
    }
    Ok(total)
}

fn refine<F>(phase_at: &mut F, a: f64, b: f64, pa: f64, pb: f64, depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let step = wrap_phase(pb - pa);
    if step.abs() <= MAX_STEP || depth >= MAX_DEPTH {
        return Ok(step);
    }
    let mid = 0.5 * (a + b);
    let pm = phase_at(mid)?;
    Ok(refine(phase_at, a, mid, pa, pm, depth + 1)? + refine(phase_at, mid, b, pm, pb, depth + 1)?)
}
