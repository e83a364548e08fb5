//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::f64::consts::TAU;
use std::time::Instant;

use faer::{c64, Mat};
use lindtop::dynamics::{evolve, make_initial_state, EvolveOptions};
use lindtop::model::{Boundary, Dissipator, LatticeSpec, Sublattice};
use lindtop::observables::{average_position, coherence_profile, normalized_average_position, XiStatus};
use lindtop::oracle::{
    compare_spectra, exact_spectrum_j0, family_grid, gauge_check, match_multiset, winding_formula,
};
use lindtop::spectra::{
    diagonalize, kblock_spectrum, pbc_spectrum_by_blocks, steady_state, steady_state_sparse, winding_w0_report,
    Epsilon, DEFAULT_N_K,
};
use lindtop::superop::{build_liouvillian_real, lattice_momentum, Superoperator};
use lindtop::twobody::{
    build_twobody_liouvillian, reduce_to_single_particle, twobody_steady_state, SteadyMode, TwoBodyBasis,
};
use lindtop::{DensityMatrix, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn ssh(cells: usize, j0: f64, boundary: Boundary) -> LatticeSpec {
    LatticeSpec::ssh(cells, j0, 1.0, 1.2, 1.2, boundary)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a, b, n).into_iter().map(|x| 10f64.powf(x)).collect()
}

/// Index `i` such that `values[i] != values[i + 1]`, if there is exactly one change.
fn single_flip<T: PartialEq>(values: &[T]) -> Option<usize> {
    let flips: Vec<usize> = (0..values.len() - 1).filter(|&i| values[i] != values[i + 1]).collect();
    (flips.len() == 1).then(|| flips[0])
}

fn spectral_steady_state(spec: &LatticeSpec) -> Result<DensityMatrix> {
    let sup = build_liouvillian_real(spec)?;
    let spectrum = diagonalize(&sup, true)?;
    steady_state(&sup, &spectrum)
}

fn sparse_steady_state(spec: &LatticeSpec) -> Result<DensityMatrix> {
    steady_state_sparse(&build_liouvillian_real(spec)?)
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Mat<c64> {
    let a = Mat::<c64>::from_fn(n, n, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

fn all_eigenvalues(sup: &Superoperator) -> Result<Vec<c64>> {
    Ok(diagonalize(sup, false)?.eigenvalues)
}

fn c1_oracle_equivalence() -> Result<Outcome> {
    let start = Instant::now();
    let cells = 10;
    let rates = [(0, 1.2), (1, 1.2)];
    let mut worst: f64 = 0.0;
    let mut mult_ok = true;
    for j0 in [0.3, 0.5, 1.0] {
        let spec = LatticeSpec::new(cells, Boundary::Pbc)
            .with_hopping(0, j0)
            .with_dissipator(Dissipator::a_from_b(0, 1.2))
            .with_dissipator(Dissipator::a_from_b(1, 1.2));
        for m in 0..cells {
            let k = lattice_momentum(m, cells);
            let exact = exact_spectrum_j0(c64::new(j0, 0.0), &rates, cells, k)?;
            let mults: Vec<usize> = exact.entries.iter().map(|e| e.1).collect();
            mult_ok &= mults == [2 * cells - 1, cells - 1, cells - 1, 1, 1, 1];
            let r = match_multiset(&kblock_spectrum(&spec, k)?, &exact, 1e-7 * exact.b4);
            worst = worst.max(r.max_error);
            mult_ok &= r.multiplicities_match;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome::new(
        worst < 1e-9 && mult_ok && secs < 10.0,
        format!("max error {worst:.2e}, multiplicities {}, {secs:.2} s", if mult_ok { "match" } else { "differ" }),
    ))
}

fn c2_gauge() -> Result<Outcome> {
    let cells = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let momenta: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..TAU)).collect();
    let mut worst: f64 = 0.0;
    for s_h in -2i64..=2 {
        let spec = LatticeSpec::new(cells, Boundary::Pbc)
            .with_hopping(s_h, c64::new(0.8, 0.3))
            .with_dissipator(Dissipator::a_from_b(0, 1.2))
            .with_dissipator(Dissipator::a_from_b(1, 0.7));
        for &k in &momenta {
            for n in 1..=cells {
                for m in 1..=cells {
                    let r = gauge_check(&spec, k, n, m)?;
                    worst = worst.max(r.map_residual_mn).max(r.map_residual_m0);
                }
            }
        }
    }
    Ok(Outcome::new(worst < 1e-12, format!("max residual {worst:.2e} over s_H in -2..=2")))
}

fn c3_winding_limits() -> Result<Outcome> {
    let base = |j0: f64, j1: f64| {
        let mut s = LatticeSpec::new(20, Boundary::Pbc)
            .with_dissipator(Dissipator::a_from_b(0, 1.2))
            .with_dissipator(Dissipator::a_from_b(1, 1.2));
        if j0 != 0.0 {
            s = s.with_hopping(0, j0);
        }
        if j1 != 0.0 {
            s = s.with_hopping(1, j1);
        }
        s
    };
    let w_no_j1 = winding_w0_report(&base(1.0, 0.0), DEFAULT_N_K, Epsilon::Auto)?.log_det.value;
    let w_no_j0 = winding_w0_report(&base(0.0, 1.0), DEFAULT_N_K, Epsilon::Auto)?.log_det.value;
    let mut mismatches = Vec::new();
    let grid = family_grid(8);
    for (i, spec) in grid.iter().enumerate() {
        let formula = winding_formula(spec)?.value;
        match winding_w0_report(spec, DEFAULT_N_K, Epsilon::Auto) {
            Ok(r) if r.log_det.value == formula && r.branch.value == formula => {}
            Ok(r) => mismatches.push(format!("[{i}] formula {formula} log_det {} branch {}", r.log_det.value, r.branch.value)),
            Err(e) => mismatches.push(format!("[{i}] {e}")),
        }
    }
    Ok(Outcome::new(
        w_no_j1 == 1 && w_no_j0 == -1 && mismatches.is_empty(),
        format!(
            "J1=0 -> {w_no_j1}, J0=0 -> {w_no_j0}, {}/{} family specs agree{}",
            grid.len() - mismatches.len(),
            grid.len(),
            if mismatches.is_empty() { String::new() } else { format!(" ({})", mismatches.join("; ")) }
        ),
    ))
}

fn c4_correspondence() -> Result<Outcome> {
    let grid = linspace(0.2, 2.0, 41);
    let mut wh = Vec::new();
    let mut w0 = Vec::new();
    for &j0 in &grid {
        let spec = ssh(20, j0, Boundary::Pbc);
        wh.push(spec.winding_wh(DEFAULT_N_K)?.value);
        w0.push(winding_w0_report(&spec, DEFAULT_N_K, Epsilon::Auto)?.log_det.value);
    }
    let (fh, f0) = (single_flip(&wh), single_flip(&w0));
    let ok = match (fh, f0) {
        (Some(i), Some(j)) => {
            i == j
                && grid[i] < 1.0
                && grid[i + 1] > 1.0
                && (wh[0], wh[40]) == (1, 0)
                && (w0[0], w0[40]) == (-1, 1)
        }
        _ => false,
    };
    let at = |f: Option<usize>| f.map_or("none".to_string(), |i| format!("({:.3}, {:.3})", grid[i], grid[i + 1]));
    Ok(Outcome::new(
        ok,
        format!("W_H {}->{} in {}, W_0 {}->{} in {}", wh[0], wh[40], at(fh), w0[0], w0[40], at(f0)),
    ))
}

fn c5_gap_closing() -> Result<Outcome> {
    let gap = |cells: usize, j0: f64| -> Result<f64> {
        Ok(diagonalize(&build_liouvillian_real(&ssh(cells, j0, Boundary::Obc))?, false)?.gap)
    };
    let sizes = [8, 12, 16, 20];
    let gaps: Vec<f64> = sizes.iter().map(|&l| gap(l, 1.0)).collect::<Result<_>>()?;
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let trivial = gap(20, 0.2)?;
    let bound = 10.0 * gaps[3];
    Ok(Outcome::new(
        decreasing && trivial > bound,
        format!(
            "gaps at J0=1: {}; J0=0.2, L=20: {trivial:.4} vs bound {bound:.4}",
            gaps.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

fn c6_steady_edge(steady: &[(f64, DensityMatrix)]) -> Outcome {
    let values: Vec<(f64, f64)> = steady
        .iter()
        .map(|(j0, rho)| (*j0, normalized_average_position(rho, &ssh(20, *j0, Boundary::Obc))))
        .collect();
    let ok = values.iter().all(|&(j0, n)| if j0 < 1.0 { n < -0.8 } else { n > 0.8 });
    Outcome::new(
        ok,
        values.iter().map(|(j0, n)| format!("J0={j0}: n_bar/(L-0.5) = {n:.3}")).collect::<Vec<_>>().join(", "),
    )
}

fn c7_dynamics(steady: &[(f64, DensityMatrix)]) -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (j0, rho0) in steady {
        let spec = ssh(20, *j0, Boundary::Obc);
        let init = make_initial_state(&spec, Sublattice::A, 10)?;
        let traj = evolve(&spec, &init, &EvolveOptions::rk4(20.0, 1.0))?;
        let shift = traj.mean_position.last().unwrap() - spec.center();
        let edge = average_position(rho0, &spec);
        let distance = traj.final_state.distance(rho0);
        let good_drift = traj.trace_drift < 1e-8;
        let good_sign = shift.signum() == edge.signum();
        let good_end = distance < 1e-4;
        ok &= good_drift && good_sign && good_end;
        parts.push(format!(
            "J0={j0}: drift {:.1e}, <n>-n0 {shift:+.2} vs steady {edge:+.2}, endpoint distance {distance:.2e}{}",
            traj.trace_drift,
            if good_end { "" } else { " (> 1e-4)" }
        ));
    }
    Ok(Outcome::new(ok, parts.join("; ")))
}

fn c8_exchange() -> Result<Outcome> {
    let cells = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut mult_ok = true;
    for _ in 0..5 {
        let (j0, j1) = (rng.random_range(0.2..2.0), rng.random_range(0.2..2.0));
        let (g0, g1) = (rng.random_range(0.2..2.0), rng.random_range(0.2..2.0));
        let forward = LatticeSpec::ssh(cells, j0, j1, g0, g1, Boundary::Pbc);
        let swapped = LatticeSpec::ssh(cells, j1, j0, g1, g0, Boundary::Pbc);
        for m in 0..3 {
            let k = TAU * m as f64 / cells as f64;
            let a = kblock_spectrum(&forward, k)?;
            let b = kblock_spectrum(&swapped, -k)?;
            let r = compare_spectra(&a, &b, 1e-7 * (g0 + g1));
            worst = worst.max(r.max_error);
            mult_ok &= r.multiplicities_match;
        }
    }
    Ok(Outcome::new(worst < 1e-9 && mult_ok, format!("max error {worst:.2e} over 5 draws x 3 momenta")))
}

fn c9_parity() -> Result<Outcome> {
    let gammas = logspace(-1.0, 1.5, 11);
    let mut full = Vec::new();
    let mut defect = Vec::new();
    let mut xi = Vec::new();
    for &g1 in &gammas {
        let spec = LatticeSpec::ssh(20, 1.0, 2.0, 2.0, g1, Boundary::Obc);
        full.push(average_position(&sparse_steady_state(&spec)?, &spec));
        let spec = spec.with_boundary(Boundary::ObcEdgeDefect);
        let c = coherence_profile(&sparse_steady_state(&spec)?, &spec, 5)?;
        defect.push(c.n_bar);
        xi.push((c.xi_c, c.xi_status));
    }
    let full_flips = full[0] < 0.0 && *full.last().unwrap() > 0.0;
    let defect_left = defect.iter().all(|&n| n < 0.0);
    let xi_defined = xi.iter().all(|x| x.1 == XiStatus::Defined);
    let (lo, hi) = xi.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x.0), hi.max(x.0)));
    let xi_ok = xi_defined && hi < 2.0 * lo;
    let sign = |v: &[f64]| v.iter().map(|x| if *x < 0.0 { '-' } else { '+' }).collect::<String>();
    Ok(Outcome::new(
        full_flips && defect_left && xi_ok,
        format!(
            "full OBC sign(n_bar) {} (flip to + at large gamma1: {}), edge defect {}, xi_c in [{lo:.4}, {hi:.4}]",
            sign(&full),
            if full_flips { "yes" } else { "no" },
            sign(&defect)
        ),
    ))
}

fn chiral_asymmetric(j0: f64, boundary: Boundary) -> LatticeSpec {
    LatticeSpec::new(20, boundary)
        .with_hopping(0, j0)
        .with_hopping(1, 1.0)
        .with_dissipator(Dissipator::new(Sublattice::A, Sublattice::A, 1, 2.25))
        .with_dissipator(Dissipator::new(Sublattice::B, Sublattice::B, -1, 1.2))
}

fn c10_chiral_asymmetric() -> Result<Outcome> {
    let mut rows = Vec::new();
    for j0 in [0.6, 1.4] {
        let pbc = chiral_asymmetric(j0, Boundary::Pbc);
        let w0 = winding_w0_report(&pbc, DEFAULT_N_K, Epsilon::Auto)?.log_det.value;
        let wh = pbc.winding_wh(DEFAULT_N_K)?.value;
        let obc = chiral_asymmetric(j0, Boundary::Obc);
        let n_bar = average_position(&sparse_steady_state(&obc)?, &obc);
        rows.push((j0, w0, wh, n_bar));
    }
    let (a, b) = (rows[0], rows[1]);
    let ok = a.1 == b.1 && a.2 != b.2 && a.3.signum() == b.3.signum();
    Ok(Outcome::new(
        ok,
        rows.iter()
            .map(|(j0, w0, wh, n)| format!("J0={j0}: W_0 {w0}, W_H {wh}, n_bar {n:+.2}"))
            .collect::<Vec<_>>()
            .join("; "),
    ))
}

fn longer_range(j0: f64, boundary: Boundary) -> LatticeSpec {
    LatticeSpec::new(20, boundary)
        .with_hopping(0, j0)
        .with_hopping(1, 1.0)
        .with_hopping(-1, 0.5)
        .with_dissipator(Dissipator::a_from_b(0, 1.2))
        .with_dissipator(Dissipator::a_from_b(1, 1.2))
}

fn c11_longer_range() -> Result<Outcome> {
    let grid = linspace(0.55, 2.45, 20);
    let mut wh = Vec::new();
    let mut w0 = Vec::new();
    let mut side = Vec::new();
    for &j0 in &grid {
        let pbc = longer_range(j0, Boundary::Pbc);
        wh.push(pbc.winding_wh(DEFAULT_N_K)?.value);
        w0.push(winding_w0_report(&pbc, DEFAULT_N_K, Epsilon::Auto)?.log_det.value);
        let obc = longer_range(j0, Boundary::Obc);
        side.push(average_position(&sparse_steady_state(&obc)?, &obc) > 0.0);
    }
    let contains = |f: Option<usize>| f.is_some_and(|i| grid[i] < 1.5 && grid[i + 1] > 1.5);
    let (fh, f0, fn_) = (single_flip(&wh), single_flip(&w0), single_flip(&side));
    let at = |f: Option<usize>| f.map_or("none".to_string(), |i| format!("({:.2}, {:.2})", grid[i], grid[i + 1]));
    Ok(Outcome::new(
        contains(fh) && contains(f0) && contains(fn_),
        format!(
            "W_H {}->{} in {}, W_0 {}->{} in {}, n_bar edge flips in {}",
            wh[0],
            wh[19],
            at(fh),
            w0[0],
            w0[19],
            at(f0),
            at(fn_)
        ),
    ))
}

fn twobody_n_bar(cells: usize, j0: f64, mode: SteadyMode) -> Result<(f64, DensityMatrix)> {
    let spec = ssh(cells, j0, Boundary::Obc);
    let sup = build_twobody_liouvillian(&spec)?;
    let rho2 = twobody_steady_state(&sup, mode)?;
    let reduced = reduce_to_single_particle(&rho2, &TwoBodyBasis::new(spec.site_count()));
    Ok((reduced.average_position(&spec), rho2))
}

fn c12_twobody() -> Result<Outcome> {
    let (_, dense4) = twobody_n_bar(4, 0.5, SteadyMode::DenseEig)?;
    let (_, sparse4) = twobody_n_bar(4, 0.5, SteadyMode::SparseNull)?;
    let distance4 = dense4.distance(&sparse4);
    let (left6, _) = twobody_n_bar(6, 0.5, SteadyMode::DenseEig)?;
    let (right6, _) = twobody_n_bar(6, 2.0, SteadyMode::DenseEig)?;
    let start = Instant::now();
    let (left8, _) = twobody_n_bar(8, 0.5, SteadyMode::SparseNull)?;
    let (right8, _) = twobody_n_bar(8, 2.0, SteadyMode::SparseNull)?;
    let secs8 = start.elapsed().as_secs_f64();
    let ok = distance4 < 1e-7 && left6 < 0.0 && right6 > 0.0 && left8 < 0.0 && right8 > 0.0 && secs8 < 600.0;
    Ok(Outcome::new(
        ok,
        format!(
            "L=4 dense vs sparse {distance4:.1e}; L=6 dense n_bar {left6:+.3} (J0=0.5) {right6:+.3} (J0=2); \
             L=8 sparse n_bar {left8:+.3} {right8:+.3} in {secs8:.1} s"
        ),
    ))
}

fn c13_invariants() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let specs = [
        ssh(5, 0.7, Boundary::Obc),
        ssh(5, 1.3, Boundary::Pbc),
        ssh(5, 1.0, Boundary::ObcEdgeDefect),
        chiral_asymmetric(0.6, Boundary::Pbc),
        longer_range(1.2, Boundary::Obc),
    ];
    // trace and Hermiticity preservation, single- and two-body
    let mut worst_trace: f64 = 0.0;
    let mut worst_herm: f64 = 0.0;
    let mut sups: Vec<Superoperator> = Vec::new();
    for spec in &specs {
        let mut small = spec.clone();
        small.cells = small.cells.min(5);
        sups.push(build_liouvillian_real(&small)?);
    }
    sups.push(build_twobody_liouvillian(&ssh(2, 0.5, Boundary::Obc))?);
    for sup in &sups {
        let n = sup.hilbert_dim().unwrap();
        for _ in 0..3 {
            let x = random_hermitian(n, &mut rng);
            let out = lindtop::density::unvec(&sup.apply(&lindtop::density::vec(&x)), n);
            let tr: c64 = (0..n).map(|i| out[(i, i)]).sum();
            worst_trace = worst_trace.max(tr.norm());
            for i in 0..n {
                for j in 0..n {
                    worst_herm = worst_herm.max((out[(i, j)] - out[(j, i)].conj()).norm());
                }
            }
        }
    }
    if worst_trace > 1e-12 || worst_herm > 1e-12 {
        failures.push(format!("trace {worst_trace:.1e} hermiticity {worst_herm:.1e}"));
    }
    // left half-plane and conjugation symmetry of real-space and block spectra
    let mut max_re = f64::NEG_INFINITY;
    let mut conj_err: f64 = 0.0;
    for spec in &specs {
        let eig = all_eigenvalues(&build_liouvillian_real(spec)?)?;
        let scale = spec.total_rate();
        max_re = max_re.max(eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) / scale);
        let conj: Vec<c64> = eig.iter().map(|z| z.conj()).collect();
        conj_err = conj_err.max(compare_spectra(&eig, &conj, 1e-7 * scale).max_error);
        if spec.boundary == Boundary::Pbc {
            for m in 1..spec.cells.min(4) {
                let k = lattice_momentum(m, spec.cells);
                let plus = kblock_spectrum(spec, k)?;
                let minus: Vec<c64> = kblock_spectrum(spec, -k)?.iter().map(|z| z.conj()).collect();
                max_re = max_re.max(plus.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) / scale);
                conj_err = conj_err.max(compare_spectra(&plus, &minus, 1e-7 * scale).max_error);
            }
        }
    }
    if max_re > 1e-10 {
        failures.push(format!("max Re lambda / scale {max_re:.1e}"));
    }
    if conj_err > 1e-9 {
        failures.push(format!("conjugation {conj_err:.1e}"));
    }
    // K-block completeness at L = 4
    let mut completeness: f64 = 0.0;
    for spec in [ssh(4, 0.7, Boundary::Pbc), chiral_asymmetric(1.4, Boundary::Pbc), longer_range(1.2, Boundary::Pbc)] {
        let mut spec = spec;
        spec.cells = 4;
        let direct = all_eigenvalues(&build_liouvillian_real(&spec)?)?;
        let blocks: Vec<c64> = pbc_spectrum_by_blocks(&spec)?.into_iter().map(|(z, _)| z).collect();
        let r = compare_spectra(&direct, &blocks, 1e-7 * spec.total_rate());
        completeness = completeness.max(if r.multiplicities_match { r.max_error } else { f64::INFINITY });
    }
    if completeness > 1e-9 {
        failures.push(format!("block completeness {completeness:.1e}"));
    }
    // W_0 independent of the reference offset and the momentum grid
    let mut unstable = Vec::new();
    for spec in [
        ssh(10, 0.5, Boundary::Pbc),
        ssh(10, 2.0, Boundary::Pbc),
        chiral_asymmetric(0.6, Boundary::Pbc),
        longer_range(1.2, Boundary::Pbc),
    ] {
        let b4 = spec.total_rate();
        let mut values = Vec::new();
        for eps in [Epsilon::Auto, Epsilon::Fixed(1e-4 * b4), Epsilon::Fixed(1e-3 * b4), Epsilon::Fixed(1e-2 * b4)] {
            for n_k in [201, 401, 801] {
                values.push(winding_w0_report(&spec, n_k, eps).map(|r| r.log_det.value).map_err(|e| e.to_string()));
            }
        }
        if values.iter().any(|v| *v != values[0]) {
            unstable.push(format!("{values:?}"));
        }
    }
    if !unstable.is_empty() {
        failures.push(format!("winding varies: {}", unstable.join("; ")));
    }
    Ok(Outcome::new(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "trace {worst_trace:.1e}, hermiticity {worst_herm:.1e}, max Re/scale {max_re:.1e}, \
                 conjugation {conj_err:.1e}, completeness {completeness:.1e}, W_0 stable over 4 eps x 3 grids"
            )
        } else {
            failures.join("; ")
        },
    ))
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    let mut report = |n: usize, name: &str, outcome: Result<Outcome>| {
        let (passed, detail) = match outcome {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!("criterion {n} [{name}]: {} {detail}", if passed { "PASS" } else { "FAIL" });
        if !passed {
            failed.push(n);
        }
    };
    report(1, "oracle equivalence", c1_oracle_equivalence());
    report(2, "gauge identities", c2_gauge());
    report(3, "winding limits", c3_winding_limits());
    report(4, "topological correspondence", c4_correspondence());
    report(5, "gap closing", c5_gap_closing());
    let steady: Result<Vec<(f64, DensityMatrix)>> = [0.5, 2.0]
        .into_iter()
        .map(|j0| spectral_steady_state(&ssh(20, j0, Boundary::Obc)).map(|r| (j0, r)))
        .collect();
    match steady {
        Ok(steady) => {
            report(6, "steady-state edge", Ok(c6_steady_edge(&steady)));
            report(7, "dynamics", c7_dynamics(&steady));
        }
        Err(e) => {
            report(6, "steady-state edge", Err(e));
            report(7, "dynamics", Ok(Outcome::new(false, "no steady state to compare against")));
        }
    }
    report(8, "parameter exchange", c8_exchange());
    report(9, "parity and edge defect", c9_parity());
    report(10, "chiral-asymmetric dissipation", c10_chiral_asymmetric());
    report(11, "longer-range hopping", c11_longer_range());
    report(12, "two-body", c12_twobody());
    report(13, "invariants", c13_invariants());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
