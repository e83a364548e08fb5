//! Time evolution under the master equation.

use std::io::Write;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{expm, spmv, ZERO};
use crate::model::{LatticeSpec, Sublattice};
use crate::superop::{build_liouvillian_real, Superoperator};

pub const DEFAULT_DT: f64 = 1e-3;
/// Trace drift that aborts an integration.
pub const TRACE_ABORT: f64 = 1e-6;
pub const POPULATION_FLOOR: f64 = -1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Rk4,
    /// Exact propagator `expm(L stride)` applied once per output time.
    Exponential,
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Time between recorded outputs; rounded to a whole number of steps.
    pub stride: f64,
    pub method: Integrator,
}

impl EvolveOptions {
    pub fn rk4(t_final: f64, stride: f64) -> Self {
        Self { t_final, dt: DEFAULT_DT, stride, method: Integrator::Rk4 }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    /// `rho_nn(t)`, one row per output time.
    pub populations: Vec<Vec<f64>>,
    /// `sum_n n rho_nn` with 1-based `n`.
    pub mean_position: Vec<f64>,
    pub traces: Vec<f64>,
    pub trace_drift: f64,
    /// Largest `|rho - rho^dagger|` entry seen at an output time.
    pub hermiticity_error: f64,
    pub final_state: DensityMatrix,
}

impl TrajectoryResult {
    /// Long-form `t,n,rho_nn` rows.
    pub fn write_populations_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,n,rho_nn")?;
        for (t, row) in self.times.iter().zip(&self.populations) {
            for (n, p) in row.iter().enumerate() {
                writeln!(w, "{},{},{}", t, n + 1, p)?;
            }
        }
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,mean_position,trace")?;
        for ((t, x), tr) in self.times.iter().zip(&self.mean_position).zip(&self.traces) {
            writeln!(w, "{t},{x},{tr}")?;
        }
        Ok(())
    }
}

/// Cell of the default initial state `|a, L/2>`; odd `L` rounds down.
pub fn central_cell(cells: usize) -> usize {
    (cells / 2).max(1)
}

/// Projector onto the site `(sublattice, cell)` with 1-based `cell`.
pub fn make_initial_state(spec: &LatticeSpec, sublattice: Sublattice, cell: usize) -> Result<DensityMatrix> {
    let n = spec
        .site_index(sublattice, cell)
        .ok_or(Error::SiteOutOfRange { sublattice, cell, cells: spec.cells })?;
    Ok(DensityMatrix::pure(spec.site_count(), n))
}

pub fn evolve(spec: &LatticeSpec, rho_init: &DensityMatrix, options: &EvolveOptions) -> Result<TrajectoryResult> {
    let sup = build_liouvillian_real(spec)?;
    evolve_superop(&sup, rho_init, options)
}

/// Integrates `d vec(rho)/dt = L vec(rho)` for an arbitrary generator.
pub fn evolve_superop(sup: &Superoperator, rho_init: &DensityMatrix, options: &EvolveOptions) -> Result<TrajectoryResult> {
    let n = rho_init.dim();
    if sup.hilbert_dim() != Some(n) {
        return Err(Error::InvalidInitialState(format!(
            "state of dimension {n} does not match the superoperator"
        )));
    }
    let checked = DensityMatrix::new(rho_init.matrix().clone())?;
    if !(options.dt > 0.0 && options.t_final >= 0.0 && options.stride > 0.0) {
        return Err(Error::InvalidSpec("dt and stride must be positive, t_final nonnegative".into()));
    }
    let steps_per_output = ((options.stride / options.dt).round() as usize).max(1);
    let n_outputs = (options.t_final / (steps_per_output as f64 * options.dt)).round() as usize;
    let mut recorder = Recorder::new(n);
    let mut v = checked.to_vec();
    recorder.record(0.0, &v)?;
    match options.method {
        Integrator::Rk4 => {
            let mut rk = Rk4::new(sup.dim());
            let mut step = 0usize;
            for out in 1..=n_outputs {
                for _ in 0..steps_per_output {
                    rk.step(sup, &mut v, options.dt);
                    step += 1;
                }
                let t = step as f64 * options.dt;
                debug_assert_eq!(step, out * steps_per_output);
                recorder.record(t, &v)?;
            }
        }
        Integrator::Exponential => {
            let delta = steps_per_output as f64 * options.dt;
            let propagator = Propagator::new(sup, delta);
            for out in 1..=n_outputs {
                v = propagator.apply(&v);
                recorder.record(out as f64 * delta, &v)?;
            }
        }
    }
    recorder.finish(&v)
}

struct Rk4 {
    k1: Vec<c64>,
    k2: Vec<c64>,
    k3: Vec<c64>,
    k4: Vec<c64>,
    tmp: Vec<c64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        Self {
            k1: vec![ZERO; dim],
            k2: vec![ZERO; dim],
            k3: vec![ZERO; dim],
            k4: vec![ZERO; dim],
            tmp: vec![ZERO; dim],
        }
    }

    fn step(&mut self, sup: &Superoperator, v: &mut [c64], dt: f64) {
        let a = sup.sparse();
        spmv(a, v, &mut self.k1);
        for ((t, x), k) in self.tmp.iter_mut().zip(v.iter()).zip(&self.k1) {
            *t = x + k * (0.5 * dt);
        }
        spmv(a, &self.tmp, &mut self.k2);
        for ((t, x), k) in self.tmp.iter_mut().zip(v.iter()).zip(&self.k2) {
            *t = x + k * (0.5 * dt);
        }
        spmv(a, &self.tmp, &mut self.k3);
        for ((t, x), k) in self.tmp.iter_mut().zip(v.iter()).zip(&self.k3) {
            *t = x + k * dt;
        }
        spmv(a, &self.tmp, &mut self.k4);
        let w = dt / 6.0;
        for i in 0..v.len() {
            v[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * w;
        }
    }
}

/// `expm(L delta)`, in the real Hermitian-basis form when available.
enum Propagator {
    Real(crate::linalg::HermitianBasis, Mat<f64>),
    Complex(Mat<c64>),
}

impl Propagator {
    fn new(sup: &Superoperator, delta: f64) -> Self {
        match sup.real_form() {
            Some((basis, real)) => {
                let scaled = Mat::<f64>::from_fn(real.nrows(), real.ncols(), |i, j| real[(i, j)] * delta);
                Propagator::Real(basis, expm(&scaled))
            }
            None => {
                // split into real and imaginary parts: exp of the real 2n x 2n
                // embedding [[A, -B], [B, A]]
                let m = sup.dense();
                let n = m.nrows();
                let embed = Mat::<f64>::from_fn(2 * n, 2 * n, |i, j| {
                    let z = m[(i % n, j % n)] * delta;
                    match (i < n, j < n) {
                        (true, true) | (false, false) => z.re,
                        (true, false) => -z.im,
                        (false, true) => z.im,
                    }
                });
                let e = expm(&embed);
                Propagator::Complex(Mat::from_fn(n, n, |i, j| c64::new(e[(i, j)], e[(i + n, j)])))
            }
        }
    }

    fn apply(&self, v: &[c64]) -> Vec<c64> {
        match self {
            Propagator::Real(basis, p) => {
                let c = basis.coords(v);
                let dim = c.len();
                let mut out = vec![ZERO; dim];
                for j in 0..dim {
                    let cj = c[j];
                    if cj == ZERO {
                        continue;
                    }
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += cj * p[(i, j)];
                    }
                }
                basis.expand(&out)
            }
            Propagator::Complex(p) => {
                let dim = v.len();
                let mut out = vec![ZERO; dim];
                for (j, &vj) in v.iter().enumerate() {
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += p[(i, j)] * vj;
                    }
                }
                out
            }
        }
    }
}

struct Recorder {
    n: usize,
    times: Vec<f64>,
    populations: Vec<Vec<f64>>,
    mean_position: Vec<f64>,
    traces: Vec<f64>,
    trace_drift: f64,
    hermiticity_error: f64,
}

impl Recorder {
    fn new(n: usize) -> Self {
        Self {
            n,
            times: Vec::new(),
            populations: Vec::new(),
            mean_position: Vec::new(),
            traces: Vec::new(),
            trace_drift: 0.0,
            hermiticity_error: 0.0,
        }
    }

    fn record(&mut self, t: f64, v: &[c64]) -> Result<()> {
        let n = self.n;
        let pops: Vec<f64> = (0..n).map(|i| v[i + n * i].re).collect();
        let trace: f64 = pops.iter().sum();
        let drift = (trace - 1.0).abs();
        let mut herm: f64 = 0.0;
        for j in 0..n {
            for i in 0..j {
                herm = herm.max((v[i + n * j] - v[j + n * i].conj()).norm());
            }
            herm = herm.max(v[j + n * j].im.abs());
        }
        if !trace.is_finite() || drift > TRACE_ABORT {
            return Err(Error::StepInstability { t, reason: format!("trace drift {drift:e}") });
        }
        let min_pop = pops.iter().copied().fold(f64::INFINITY, f64::min);
        if min_pop < POPULATION_FLOOR {
            return Err(Error::StepInstability { t, reason: format!("population {min_pop:e} below floor") });
        }
        self.trace_drift = self.trace_drift.max(drift);
        self.hermiticity_error = self.hermiticity_error.max(herm);
        self.mean_position
            .push(pops.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum());
        self.populations.push(pops);
        self.traces.push(trace);
        self.times.push(t);
        Ok(())
    }

    fn finish(self, v: &[c64]) -> Result<TrajectoryResult> {
        let m = crate::density::unvec(v, self.n);
        Ok(TrajectoryResult {
            times: self.times,
            populations: self.populations,
            mean_position: self.mean_position,
            traces: self.traces,
            trace_drift: self.trace_drift,
            hermiticity_error: self.hermiticity_error,
            final_state: DensityMatrix::new_unchecked(m),
        })
    }
}
