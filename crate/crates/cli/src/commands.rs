use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lindtop::dynamics::{central_cell, evolve, make_initial_state, EvolveOptions, Integrator, DEFAULT_DT};
use lindtop::observables::coherence_profile;
use lindtop::oracle::verify_suite;
use lindtop::spectra::{
    diagonalize, kblock_spectrum, pbc_spectrum_by_blocks, winding_w0_report, write_spectrum_csv, SpectrumRow,
    DEFAULT_N_K,
};
use lindtop::superop::build_liouvillian_real;
use lindtop::twobody::{
    build_twobody_liouvillian, reduce_to_single_particle, twobody_steady_state_within, SteadyMode, TwoBodyBasis,
    DEFAULT_DENSE_BUDGET,
};
use lindtop::{Boundary, DensityMatrix, Error, LatticeSpec, SpectrumResult, Sublattice};
use serde_json::json;

use crate::config::{load_run, AxisDef, OutputKind, PointOptions, RunConfig, SteadyMethod};
use crate::error::{CliError, Result};
use crate::output::{base_dir, ManifestInfo, PointFailure, RunWriter};
use crate::params::apply_assignments;
use crate::presets::{self, Figure, Preset};
use crate::sweep::{epsilon_of, run_sweep, steady_of};

#[derive(Parser, Debug)]
#[command(name = "lindtop", version, about = "Liouvillian spectra, windings and skin-effect observables")]
pub struct Cli {
    /// Base output directory [default: $LINDTOP_OUT_DIR, else ./lindtop-out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Run subdirectory name [default: the preset or subcommand name]
    #[arg(long, global = true)]
    pub name: Option<String>,

    /// Worker threads for sweeps [default: available cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Run file: a lattice spec, optionally with a [sweep] table
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    pub config: Option<PathBuf>,

    /// Built-in parameter set
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,

    /// Override a spec field, e.g. `--set hoppings.0=2` (repeatable)
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub set: Vec<String>,

    /// Override the boundary condition
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BoundaryArg {
    Obc,
    Pbc,
    ObcEdgeDefect,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Obc => Boundary::Obc,
            BoundaryArg::Pbc => Boundary::Pbc,
            BoundaryArg::ObcEdgeDefect => Boundary::ObcEdgeDefect,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SteadyArg {
    Spectral,
    Sparse,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum IntegratorArg {
    Rk4,
    Exponential,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TwoBodyArg {
    Dense,
    Sparse,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Liouvillian eigenvalues: spectrum.csv, spectrum.json
    Spectrum {
        #[command(flatten)]
        input: Input,
        /// Periodic specs: sample K on this many points instead of the lattice momenta
        #[arg(long)]
        k_samples: Option<usize>,
    },
    /// W_H and W_0: winding.json, or winding.csv when the input has a sweep axis
    Winding {
        #[command(flatten)]
        input: Input,
        /// Point count of the swept axis
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_N_K)]
        n_k: usize,
        /// Fixed reference offset for W_0 [default: automatic]
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Steady state and observables: rho.csv, coherence.csv, steady.json
    Steady {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "spectral")]
        method: SteadyArg,
        /// Largest coherence distance [default: L - 1]
        #[arg(long)]
        d_max: Option<usize>,
    },
    /// Master-equation trajectory: populations.csv, trajectory.csv, dynamics.json
    Dynamics {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 20.0)]
        t_final: f64,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        /// Time between recorded outputs
        #[arg(long, default_value_t = 0.1)]
        stride: f64,
        #[arg(long, value_enum, default_value = "rk4")]
        method: IntegratorArg,
        /// Initial site `(sublattice, cell)` [default: a, L/2]
        #[arg(long, default_value = "a")]
        sublattice: String,
        #[arg(long)]
        cell: Option<usize>,
    },
    /// Parameter grid from the input's [sweep] table: sweep.csv
    Sweep {
        #[command(flatten)]
        input: Input,
    },
    /// Two hard-core bosons: reduced.csv, twobody.json
    Twobody {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "sparse")]
        mode: TwoBodyArg,
        /// Memory ceiling for the dense solver, in MiB
        #[arg(long, default_value_t = DEFAULT_DENSE_BUDGET >> 20)]
        budget_mib: usize,
    },
    /// Closed-form identities against the numerics: oracle.json
    OracleVerify,
    /// All data behind one figure, in one run directory
    Figure {
        #[arg(value_enum)]
        figure: Figure,
    },
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            let kind = if e.exit_code() == 1 { "error" } else { "numerical failure" };
            eprintln!("{kind}: {e}");
            e.exit_code()
        }
    }
}

struct Session {
    base: PathBuf,
    name: Option<String>,
    threads: usize,
}

impl Session {
    fn writer(&self, default: &str) -> Result<RunWriter> {
        RunWriter::create(self.base.join(self.name.as_deref().unwrap_or(default)))
    }

    fn finish(&self, w: RunWriter, command: &str, preset: Option<&str>, inputs: serde_json::Value) -> Result<()> {
        self.finish_with(w, command, preset, inputs, Vec::new())
    }

    fn finish_with(
        &self,
        w: RunWriter,
        command: &str,
        preset: Option<&str>,
        inputs: serde_json::Value,
        failures: Vec<PointFailure>,
    ) -> Result<()> {
        let total = inputs.get("points").and_then(|p| p.as_u64()).unwrap_or(0) as usize;
        let failed = failures.len();
        let path = w.finish(ManifestInfo {
            command: command.into(),
            preset: preset.map(str::to_string),
            inputs,
            threads: self.threads,
            failures,
        })?;
        println!("wrote {}", path.display());
        if failed > 0 {
            return Err(CliError::PointsFailed { failed, total: total.max(failed) });
        }
        Ok(())
    }
}

fn resolve_input(input: &Input) -> Result<(RunConfig, Option<Preset>)> {
    let mut config = match (&input.config, input.preset) {
        (Some(path), _) => load_run(path)?,
        (None, Some(p)) => p.config(),
        (None, None) => return Err(CliError::Config("give --config FILE or --preset NAME".into())),
    };
    if let Some(b) = input.boundary {
        config.spec = config.spec.with_boundary(b.into());
    }
    config.spec = apply_assignments(&config.spec, &input.set)?;
    config.spec.validate()?;
    config.validate()?;
    Ok((config, input.preset))
}

fn single_spec(config: &RunConfig, command: &str) -> Result<LatticeSpec> {
    if !config.sweep.axes.is_empty() {
        return Err(CliError::Config(format!("`{command}` takes a single spec; use `sweep` for axes")));
    }
    Ok(config.spec.clone())
}

fn execute(cli: Cli) -> Result<()> {
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let session = Session { base: base_dir(cli.out.as_deref()), name: cli.name, threads };
    match cli.command {
        Command::Spectrum { input, k_samples } => {
            let (config, preset) = resolve_input(&input)?;
            let spec = single_spec(&config, "spectrum")?;
            let mut w = session.writer(preset.map_or("spectrum", Preset::name))?;
            write_spectrum(&mut w, "spectrum", &spec, k_samples)?;
            session.finish(w, "spectrum", preset.map(Preset::name), json!({"run": config.to_json(), "k_samples": k_samples}))
        }
        Command::Winding { input, grid, n_k, epsilon } => {
            let (mut config, preset) = resolve_input(&input)?;
            config.sweep.options.n_k = n_k;
            config.sweep.options.epsilon = epsilon;
            let mut w = session.writer(preset.map_or("winding", Preset::name))?;
            if config.sweep.axes.is_empty() {
                if grid.is_some() {
                    return Err(CliError::Config("--grid needs an input with a sweep axis".into()));
                }
                let record = winding_record(&config.spec, &config.sweep.options)?;
                w.write_json("winding.json", &record)?;
                w.stage("winding");
                return session.finish(w, "winding", preset.map(Preset::name), json!({"run": config.to_json()}));
            }
            if let Some(n) = grid {
                if config.sweep.axes.len() != 1 {
                    return Err(CliError::Config("--grid needs exactly one sweep axis".into()));
                }
                config.sweep.axes[0] = config.sweep.axes[0].clone().with_count(n)?;
            }
            config.sweep.outputs = vec![OutputKind::Winding];
            let failures = write_sweep(&mut w, "winding.csv", &config, threads)?;
            let inputs = json!({"run": config.to_json(), "points": points(&config)?});
            session.finish_with(w, "winding", preset.map(Preset::name), inputs, failures)
        }
        Command::Steady { input, method, d_max } => {
            let (config, preset) = resolve_input(&input)?;
            let spec = single_spec(&config, "steady")?;
            let method = match method {
                SteadyArg::Spectral => SteadyMethod::Spectral,
                SteadyArg::Sparse => SteadyMethod::Sparse,
            };
            let mut w = session.writer(preset.map_or("steady", Preset::name))?;
            write_steady(&mut w, "", &spec, method, d_max)?;
            let inputs = json!({"run": config.to_json(), "method": method, "d_max": d_max});
            session.finish(w, "steady", preset.map(Preset::name), inputs)
        }
        Command::Dynamics { input, t_final, dt, stride, method, sublattice, cell } => {
            let (config, preset) = resolve_input(&input)?;
            let spec = single_spec(&config, "dynamics")?;
            let sublattice = match sublattice.to_ascii_lowercase().as_str() {
                "a" => Sublattice::A,
                "b" => Sublattice::B,
                other => return Err(CliError::Config(format!("--sublattice must be a or b, got `{other}`"))),
            };
            let opts = EvolveOptions {
                t_final,
                dt,
                stride,
                method: match method {
                    IntegratorArg::Rk4 => Integrator::Rk4,
                    IntegratorArg::Exponential => Integrator::Exponential,
                },
            };
            let cell = cell.unwrap_or(central_cell(spec.cells));
            let mut w = session.writer(preset.map_or("dynamics", Preset::name))?;
            write_dynamics(&mut w, "", &spec, &opts, sublattice, cell)?;
            let inputs = json!({
                "run": config.to_json(),
                "t_final": t_final, "dt": dt, "stride": stride, "method": opts.method,
                "initial": {"sublattice": sublattice, "cell": cell},
            });
            session.finish(w, "dynamics", preset.map(Preset::name), inputs)
        }
        Command::Sweep { input } => {
            let (config, preset) = resolve_input(&input)?;
            if config.sweep.axes.is_empty() {
                return Err(CliError::Config("the input has no sweep axes".into()));
            }
            let mut w = session.writer(preset.map_or("sweep", Preset::name))?;
            let failures = write_sweep(&mut w, "sweep.csv", &config, threads)?;
            let inputs = json!({"run": config.to_json(), "points": points(&config)?});
            session.finish_with(w, "sweep", preset.map(Preset::name), inputs, failures)
        }
        Command::Twobody { input, mode, budget_mib } => {
            let (config, preset) = resolve_input(&input)?;
            let spec = single_spec(&config, "twobody")?;
            let mode = match mode {
                TwoBodyArg::Dense => SteadyMode::DenseEig,
                TwoBodyArg::Sparse => SteadyMode::SparseNull,
            };
            let mut w = session.writer(preset.map_or("twobody", Preset::name))?;
            write_twobody(&mut w, "", &spec, mode, budget_mib << 20)?;
            let inputs = json!({"run": config.to_json(), "mode": mode, "budget_mib": budget_mib});
            session.finish(w, "twobody", preset.map(Preset::name), inputs)
        }
        Command::OracleVerify => {
            let checks = verify_suite();
            let passed = checks.iter().filter(|c| c.passed).count();
            for c in &checks {
                println!(
                    "{} {} residual {:e} tolerance {:e}{}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.residual,
                    c.tolerance,
                    c.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
                );
            }
            let mut w = session.writer("oracle")?;
            w.write_json("oracle.json", &json!({"all_passed": passed == checks.len(), "checks": checks}))?;
            session.finish(w, "oracle-verify", None, json!({}))?;
            if passed != checks.len() {
                return Err(CliError::Core(Error::ConvergenceFailure {
                    provenance: format!("oracle suite: {} of {} identities failed", checks.len() - passed, checks.len()),
                }));
            }
            Ok(())
        }
        Command::Figure { figure } => run_figure(&session, figure),
    }
}

fn points(config: &RunConfig) -> Result<usize> {
    let mut n = 1;
    for a in &config.sweep.axes {
        n *= a.points()?.len();
    }
    Ok(n)
}

fn winding_record(spec: &LatticeSpec, options: &PointOptions) -> Result<serde_json::Value> {
    let pbc = spec.with_boundary(Boundary::Pbc);
    let wh = match pbc.winding_wh(options.n_k) {
        Ok(w) => json!(w),
        Err(Error::GapClosed { .. }) => serde_json::Value::Null,
        Err(e) => return Err(e.into()),
    };
    let w0 = winding_w0_report(&pbc, options.n_k, epsilon_of(options))?;
    Ok(json!({"W_H": wh, "W_0": w0}))
}

fn prefixed(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}_{name}")
    }
}

fn write_spectrum(w: &mut RunWriter, stem: &str, spec: &LatticeSpec, k_samples: Option<usize>) -> Result<()> {
    let (summary, rows): (SpectrumResult, Vec<SpectrumRow>) = if spec.boundary == Boundary::Pbc {
        let tagged: Vec<(lindtop::c64, f64)> = match k_samples {
            Some(n) if n > 0 => {
                let mut out = Vec::new();
                for i in 0..n {
                    let k = std::f64::consts::TAU * i as f64 / n as f64;
                    out.extend(kblock_spectrum(spec, k)?.into_iter().map(|z| (z, k)));
                }
                out
            }
            _ => pbc_spectrum_by_blocks(spec)?,
        };
        let values: Vec<lindtop::c64> = tagged.iter().map(|t| t.0).collect();
        let summary = SpectrumResult::from_eigenvalues(values, None, lindtop::superop::Provenance::External);
        let rows = tagged
            .iter()
            .enumerate()
            .map(|(i, &(lambda, k))| SpectrumRow { lambda, k: Some(k), is_steady: summary.steady_indices.contains(&i) })
            .collect();
        (summary, rows)
    } else {
        let summary = diagonalize(&build_liouvillian_real(spec)?, false)?;
        let rows = summary
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &lambda)| SpectrumRow { lambda, k: None, is_steady: summary.steady_indices.contains(&i) })
            .collect();
        (summary, rows)
    };
    w.write_with(&format!("{stem}.csv"), |buf| write_spectrum_csv(buf, &rows))?;
    w.write_json(
        &format!("{stem}.json"),
        &json!({
            "boundary": spec.boundary,
            "count": summary.eigenvalues.len(),
            "gap": summary.gap,
            "steady_count": summary.steady_indices.len(),
            "max_real_part": summary.max_real_part(),
            "zero_tol": summary.zero_tol,
        }),
    )?;
    w.stage(stem);
    Ok(())
}

fn write_matrix_csv(buf: &mut Vec<u8>, rho: &DensityMatrix) -> lindtop::Result<()> {
    writeln!(buf, "n,m,re,im")?;
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            let z = rho.get(i, j);
            writeln!(buf, "{},{},{},{}", i + 1, j + 1, z.re, z.im)?;
        }
    }
    Ok(())
}

fn write_steady(
    w: &mut RunWriter,
    prefix: &str,
    spec: &LatticeSpec,
    method: SteadyMethod,
    d_max: Option<usize>,
) -> Result<DensityMatrix> {
    let rho = steady_of(spec, method)?;
    let d_max = d_max.unwrap_or(spec.cells - 1);
    let c = coherence_profile(&rho, spec, d_max)?;
    w.write_with(&prefixed(prefix, "rho.csv"), |buf| write_matrix_csv(buf, &rho))?;
    w.write_with(&prefixed(prefix, "coherence.csv"), |buf| c.write_profile_csv(buf))?;
    let mut summary = c.summary_json();
    summary["method"] = json!(method);
    summary["trace"] = json!(rho.trace().re);
    summary["hermiticity_error"] = json!(rho.hermiticity_error());
    w.write_json(&prefixed(prefix, "steady.json"), &summary)?;
    w.stage(&prefixed(prefix, "steady"));
    Ok(rho)
}

fn write_dynamics(
    w: &mut RunWriter,
    prefix: &str,
    spec: &LatticeSpec,
    opts: &EvolveOptions,
    sublattice: Sublattice,
    cell: usize,
) -> Result<()> {
    let init = make_initial_state(spec, sublattice, cell)?;
    let traj = evolve(spec, &init, opts)?;
    w.write_with(&prefixed(prefix, "populations.csv"), |buf| traj.write_populations_csv(buf))?;
    w.write_with(&prefixed(prefix, "trajectory.csv"), |buf| traj.write_summary_csv(buf))?;
    w.write_json(
        &prefixed(prefix, "dynamics.json"),
        &json!({
            "n_0": spec.center(),
            "trace_drift": traj.trace_drift,
            "hermiticity_error": traj.hermiticity_error,
            "mean_position_final": traj.mean_position.last(),
        }),
    )?;
    w.stage(&prefixed(prefix, "dynamics"));
    Ok(())
}

fn write_twobody(w: &mut RunWriter, prefix: &str, spec: &LatticeSpec, mode: SteadyMode, budget: usize) -> Result<()> {
    let sup = build_twobody_liouvillian(spec)?;
    let rho2 = twobody_steady_state_within(&sup, mode, budget)?;
    let basis = TwoBodyBasis::new(spec.site_count());
    let reduced = reduce_to_single_particle(&rho2, &basis);
    w.write_with(&prefixed(prefix, "reduced.csv"), |buf| reduced.write_csv(buf))?;
    w.write_json(
        &prefixed(prefix, "twobody.json"),
        &json!({
            "mode": mode,
            "pair_states": basis.dim(),
            "n_bar": reduced.average_position(spec),
            "n_0": spec.center(),
            "trace": reduced.trace().re,
            "hermiticity_error": reduced.hermiticity_error(),
        }),
    )?;
    w.stage(&prefixed(prefix, "twobody"));
    Ok(())
}

fn write_sweep(w: &mut RunWriter, name: &str, config: &RunConfig, threads: usize) -> Result<Vec<PointFailure>> {
    let table = run_sweep(config, threads)?;
    w.write_with(name, |buf| table.write_csv(buf))?;
    w.stage(name);
    Ok(table.failures)
}

/// Runs a sweep inside a figure bundle, tagging failures with the file name.
fn figure_sweep(w: &mut RunWriter, name: &str, config: &RunConfig, threads: usize, log: &mut Vec<serde_json::Value>, failures: &mut Vec<PointFailure>) -> Result<()> {
    let f = write_sweep(w, name, config, threads)?;
    log.push(json!({"file": name, "run": config.to_json()}));
    failures.extend(f.into_iter().map(|mut p| {
        p.error = format!("{name}: {}", p.error);
        p
    }));
    Ok(())
}

fn run_figure(session: &Session, figure: Figure) -> Result<()> {
    let mut w = session.writer(figure.name())?;
    let mut log = Vec::new();
    let mut failures = Vec::new();
    let threads = session.threads;
    let spectral = SteadyMethod::Spectral;
    match figure {
        Figure::Fig2 => {
            figure_sweep(&mut w, "a.csv", &Preset::Fig2a.config(), threads, &mut log, &mut failures)?;
            let gap = RunConfig::new(presets::ssh(8, 0.5))
                .with_axis(AxisDef::values("cells", &[8.0, 12.0, 16.0, 20.0]))
                .with_axis(AxisDef::linspace("hoppings.0", 0.2, 2.0, 19))
                .with_outputs(&[OutputKind::Spectrum]);
            figure_sweep(&mut w, "a2_gap.csv", &gap, threads, &mut log, &mut failures)?;
            for (panel, j0) in [("b", 0.5), ("c", 2.0)] {
                let spec = presets::ssh(20, j0);
                write_spectrum(&mut w, &format!("{panel}_spectrum_obc"), &spec, None)?;
                write_spectrum(&mut w, &format!("{panel}_spectrum_pbc"), &spec.with_boundary(Boundary::Pbc), None)?;
                log.push(json!({"panel": panel, "spec": lindtop::config::spec_to_toml(&spec)}));
            }
            for ((steady_panel, dyn_panel), j0) in [(("d", "f"), 0.5), (("e", "g"), 2.0)] {
                let spec = presets::ssh(20, j0);
                write_steady(&mut w, steady_panel, &spec, spectral, None)?;
                let opts = EvolveOptions::rk4(20.0, 0.1);
                write_dynamics(&mut w, dyn_panel, &spec, &opts, Sublattice::A, central_cell(spec.cells))?;
                log.push(json!({"panel": [steady_panel, dyn_panel], "spec": lindtop::config::spec_to_toml(&spec)}));
            }
        }
        Figure::Fig3 => {
            let full = Preset::Fig3a.config();
            figure_sweep(&mut w, "ab.csv", &full, threads, &mut log, &mut failures)?;
            let mut defect = full.clone();
            defect.spec = defect.spec.with_boundary(Boundary::ObcEdgeDefect);
            figure_sweep(&mut w, "ab_inset.csv", &defect, threads, &mut log, &mut failures)?;
            // one cross on each side of the edge flip near the transition
            for (panel, gamma1) in [("c", 0.3), ("d", 31.6)] {
                let spec = presets::parity_chain(1.9, gamma1).with_boundary(Boundary::Pbc);
                write_spectrum(&mut w, &format!("{panel}_spectrum_pbc"), &spec, Some(400))?;
                log.push(json!({"panel": panel, "spec": lindtop::config::spec_to_toml(&spec)}));
            }
        }
        Figure::Fig4 => {
            figure_sweep(&mut w, "a.csv", &Preset::Fig4a.config(), threads, &mut log, &mut failures)?;
            let b = RunConfig::new(presets::chiral_asymmetric(0.6, 2.25))
                .with_axis(AxisDef::linspace("hoppings.0", 0.2, 2.0, 19))
                .with_outputs(&[OutputKind::Winding]);
            figure_sweep(&mut w, "b.csv", &b, threads, &mut log, &mut failures)?;
            for (panel, j0) in [("c", 0.6), ("d", 1.4)] {
                let spec = presets::chiral_asymmetric(j0, 2.25);
                write_steady(&mut w, panel, &spec, spectral, None)?;
                log.push(json!({"panel": panel, "spec": lindtop::config::spec_to_toml(&spec)}));
            }
        }
        Figure::FigS1 => {
            figure_sweep(&mut w, "a.csv", &Preset::FigS1a.config(), threads, &mut log, &mut failures)?;
            for ((spec_panel, rho_panel), j0) in [(("b", "d"), 0.5), (("c", "e"), 2.5)] {
                let spec = presets::longer_range(j0);
                write_spectrum(&mut w, &format!("{spec_panel}_spectrum_obc"), &spec, None)?;
                write_spectrum(&mut w, &format!("{spec_panel}_spectrum_pbc"), &spec.with_boundary(Boundary::Pbc), None)?;
                write_steady(&mut w, rho_panel, &spec, spectral, None)?;
                log.push(json!({"panel": [spec_panel, rho_panel], "spec": lindtop::config::spec_to_toml(&spec)}));
            }
        }
        Figure::FigS2 => {
            for (panel, j0) in [("a", 0.5), ("b", 2.0)] {
                let spec = presets::ssh(8, j0);
                write_twobody(&mut w, panel, &spec, SteadyMode::SparseNull, DEFAULT_DENSE_BUDGET)?;
                log.push(json!({"panel": panel, "spec": lindtop::config::spec_to_toml(&spec)}));
            }
            figure_sweep(&mut w, "c.csv", &Preset::FigS2c.config(), threads, &mut log, &mut failures)?;
        }
    }
    session.finish_with(w, "figure", Some(figure.name()), json!({"panels": log}), failures)
}
