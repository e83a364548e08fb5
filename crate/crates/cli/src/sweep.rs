//! Grid sweeps over at most two spec parameters.

use std::io::Write;

use lindtop::dynamics::{central_cell, evolve, make_initial_state, EvolveOptions};
use lindtop::observables::{coherence_profile, XiStatus};
use lindtop::spectra::{diagonalize, steady_state, steady_state_sparse, winding_w0, Epsilon};
use lindtop::superop::build_liouvillian_real;
use lindtop::twobody::{build_twobody_liouvillian, reduce_to_single_particle, twobody_steady_state, TwoBodyBasis};
use lindtop::{Boundary, DensityMatrix, Error, LatticeSpec, Sublattice};
use rayon::prelude::*;

use crate::config::{OutputKind, PointOptions, RunConfig, SteadyMethod};
use crate::error::{CliError, Result};
use crate::output::PointFailure;
use crate::params::{axis_label, resolve_parameter_path};

pub struct SweepTable {
    pub header: Vec<String>,
    /// Axis coordinates followed by the output columns.
    pub rows: Vec<Vec<f64>>,
    pub failures: Vec<PointFailure>,
}

impl SweepTable {
    /// Floats use the shortest representation that round-trips.
    pub fn write_csv<W: Write>(&self, mut w: W) -> lindtop::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn output_kinds(outputs: &[OutputKind]) -> Vec<OutputKind> {
    let mut kinds: Vec<OutputKind> = outputs
        .iter()
        .map(|k| if *k == OutputKind::Steady { OutputKind::Observables } else { *k })
        .collect();
    kinds.sort();
    kinds.dedup();
    kinds
}

fn columns(kind: OutputKind) -> &'static [&'static str] {
    match kind {
        OutputKind::Spectrum => &["gap"],
        OutputKind::Winding => &["W_H", "W_0"],
        OutputKind::Steady | OutputKind::Observables => &["n_bar", "n_bar_normalized", "xi_c"],
        OutputKind::Dynamics => &["mean_position_final", "trace_drift"],
        OutputKind::Twobody => &["n_bar_twobody"],
    }
}

pub fn steady_of(spec: &LatticeSpec, method: SteadyMethod) -> lindtop::Result<DensityMatrix> {
    let sup = build_liouvillian_real(spec)?;
    match method {
        SteadyMethod::Spectral => steady_state(&sup, &diagonalize(&sup, true)?),
        SteadyMethod::Sparse => steady_state_sparse(&sup),
    }
}

pub fn epsilon_of(options: &PointOptions) -> Epsilon {
    options.epsilon.map_or(Epsilon::Auto, Epsilon::Fixed)
}

fn point_values(spec: &LatticeSpec, kinds: &[OutputKind], options: &PointOptions) -> lindtop::Result<Vec<f64>> {
    let mut out = Vec::new();
    for kind in kinds {
        match kind {
            OutputKind::Spectrum => out.push(diagonalize(&build_liouvillian_real(spec)?, false)?.gap),
            OutputKind::Winding => {
                let pbc = spec.with_boundary(Boundary::Pbc);
                // W_H is undefined exactly where the band gap closes
                let wh = match pbc.winding_wh(options.n_k) {
                    Ok(w) => w.value as f64,
                    Err(Error::GapClosed { .. }) => f64::NAN,
                    Err(e) => return Err(e),
                };
                out.push(wh);
                out.push(winding_w0(&pbc, options.n_k, epsilon_of(options))?.value as f64);
            }
            OutputKind::Steady | OutputKind::Observables => {
                let rho = steady_of(spec, options.steady)?;
                let d_max = options.d_max.unwrap_or(spec.cells - 1).min(spec.cells - 1);
                let c = coherence_profile(&rho, spec, d_max.max(1))?;
                out.push(c.n_bar);
                out.push(c.n_bar_normalized);
                out.push(if c.xi_status == XiStatus::Undefined { f64::NAN } else { c.xi_c });
            }
            OutputKind::Dynamics => {
                let init = make_initial_state(spec, Sublattice::A, central_cell(spec.cells))?;
                let opts = EvolveOptions {
                    t_final: options.t_final,
                    dt: options.dt,
                    stride: options.stride,
                    method: options.integrator,
                };
                let traj = evolve(spec, &init, &opts)?;
                out.push(*traj.mean_position.last().expect("trajectory has a first point"));
                out.push(traj.trace_drift);
            }
            OutputKind::Twobody => {
                let sup = build_twobody_liouvillian(spec)?;
                let rho2 = twobody_steady_state(&sup, options.twobody)?;
                let reduced = reduce_to_single_particle(&rho2, &TwoBodyBasis::new(spec.site_count()));
                out.push(reduced.average_position(spec));
            }
        }
    }
    Ok(out)
}

/// Evaluates every grid point, in parallel on `threads` workers. Rows come
/// back in grid order (first axis outermost) regardless of scheduling.
pub fn run_sweep(config: &RunConfig, threads: usize) -> Result<SweepTable> {
    config.validate()?;
    let kinds = output_kinds(&config.sweep.outputs);
    if kinds.is_empty() {
        return Err(CliError::Config("sweep.outputs is empty".into()));
    }
    let axes = &config.sweep.axes;
    let mut header = Vec::new();
    let mut grids = Vec::new();
    for axis in axes {
        header.push(axis_label(&axis.path, &config.spec)?);
        grids.push(axis.points()?);
    }
    header.extend(kinds.iter().flat_map(|k| columns(*k)).map(|c| c.to_string()));
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for grid in &grids {
        points = points
            .into_iter()
            .flat_map(|p| {
                grid.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    let mut specs = Vec::with_capacity(points.len());
    for p in &points {
        let mut spec = config.spec.clone();
        for (axis, &x) in axes.iter().zip(p) {
            spec = resolve_parameter_path(&spec, &axis.path, x)?;
        }
        specs.push(spec);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let options = &config.sweep.options;
    let results: Vec<lindtop::Result<Vec<f64>>> =
        pool.install(|| specs.par_iter().map(|s| point_values(s, &kinds, options)).collect());
    let width = header.len() - axes.len();
    let mut rows = Vec::with_capacity(points.len());
    let mut failures = Vec::new();
    for (index, (p, r)) in points.into_iter().zip(results).enumerate() {
        let values = match r {
            Ok(v) => v,
            Err(e) => {
                failures.push(PointFailure { index, coordinates: p.clone(), error: e.to_string() });
                vec![f64::NAN; width]
            }
        };
        rows.push(p.into_iter().chain(values).collect());
    }
    Ok(SweepTable { header, rows, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::AxisDef;

    fn config() -> RunConfig {
        RunConfig::new(LatticeSpec::ssh(4, 0.5, 1.0, 1.2, 1.2, Boundary::Obc))
            .with_axis(AxisDef::values("hoppings.0", &[0.5, 2.0]))
            .with_axis(AxisDef::linspace("dissipators[1].gamma", 0.5, 1.5, 3))
            .with_outputs(&[OutputKind::Winding, OutputKind::Steady, OutputKind::Spectrum])
    }

    #[test]
    fn header_and_order() {
        let t = run_sweep(&config(), 2).unwrap();
        assert_eq!(t.header, ["J_0", "gamma_1", "gap", "W_H", "W_0", "n_bar", "n_bar_normalized", "xi_c"]);
        assert_eq!(t.rows.len(), 6);
        assert_eq!((t.rows[0][0], t.rows[0][1]), (0.5, 0.5));
        assert_eq!((t.rows[1][0], t.rows[1][1]), (0.5, 1.0));
        assert_eq!((t.rows[3][0], t.rows[3][1]), (2.0, 0.5));
        assert_eq!((t.rows[0][3], t.rows[0][4]), (1.0, -1.0));
        assert_eq!((t.rows[5][3], t.rows[5][4]), (0.0, 1.0));
        assert!(t.failures.is_empty());
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let render = |threads| {
            let mut buf = Vec::new();
            run_sweep(&config(), threads).unwrap().write_csv(&mut buf).unwrap();
            buf
        };
        assert_eq!(render(1), render(3));
    }

    #[test]
    fn failed_points_are_reported() {
        // an oversized RK4 step makes the integration blow up
        let mut c = RunConfig::new(LatticeSpec::ssh(3, 0.5, 1.0, 12.0, 12.0, Boundary::Obc))
            .with_axis(AxisDef::values("hoppings.0", &[0.5]))
            .with_outputs(&[OutputKind::Dynamics]);
        c.sweep.options.dt = 0.5;
        c.sweep.options.stride = 0.5;
        c.sweep.options.t_final = 10.0;
        let t = run_sweep(&c, 1).unwrap();
        assert_eq!(t.failures.len(), 1);
        assert!(t.rows[0][1].is_nan());
    }
}
