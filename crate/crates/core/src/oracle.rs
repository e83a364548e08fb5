//! Closed-form results for the analytically solvable families, used as an
//! independent reference for the numerical pipeline.
//!
//! Solved families have a single hopping range `s_H` and one dissipation
//! channel type. For `a <- b` jumps every block `M_n` is gauge equivalent to
//! the `J_0` block, so the spectrum of `L(K)` is
//!
//! * `-B_4/2` with multiplicity `2L - 1`,
//! * `(-B_4 +- sqrt(B_4^2 - 16 |J|^2)) / 2`, each `L - 1` times,
//! * the roots of `l^3 + 3/2 B_4 l^2 + (B_4^2 + 8|J|^2)/2 l + 2|J|^2 (B_4 - A L) = 0`
//!
//! with `A = sum_s gamma_s e^{iK(s - s_H)} / L`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use faer::c64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{I, ZERO};
use crate::model::{LatticeSpec, Sublattice};
use crate::spectra::kblock_spectrum;
use crate::superop::{build_kblock, lattice_momentum, m_block, Block4};

#[derive(Clone, Debug)]
pub struct ExactSpectrum {
    /// `(eigenvalue, multiplicity)`; multiplicities sum to `4L`.
    pub entries: Vec<(c64, usize)>,
    pub j: c64,
    pub b4: f64,
    pub a14: c64,
    pub cells: usize,
}

impl ExactSpectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }
}

/// Exact spectrum of `L(K)` for a `J_0`-only Hamiltonian with `a <- b`
/// dissipators given as `(s, gamma)`.
pub fn exact_spectrum_j0(j0: c64, gammas_ab: &[(i64, f64)], cells: usize, k: f64) -> Result<ExactSpectrum> {
    exact_spectrum_single(0, j0, gammas_ab, cells, k)
}

/// Exact spectrum for a single hopping `J` at range `s_H`, obtained from the
/// `J_0` case through the gauge map.
pub fn exact_spectrum_single(s_h: i64, j: c64, gammas_ab: &[(i64, f64)], cells: usize, k: f64) -> Result<ExactSpectrum> {
    if j.norm() == 0.0 {
        return Err(Error::DegenerateParameters("hopping amplitude is zero".into()));
    }
    let b4: f64 = gammas_ab.iter().map(|g| g.1).sum();
    if b4 <= 0.0 {
        return Err(Error::DegenerateParameters("total dissipation rate is zero".into()));
    }
    let l = cells as f64;
    let a14: c64 = gammas_ab
        .iter()
        .map(|&(s, g)| c64::cis(k * (s - s_h) as f64) * (g / l))
        .sum();
    let j2 = j.norm_sqr();
    let root = c64::new(b4 * b4 - 16.0 * j2, 0.0).sqrt();
    let mut entries = vec![
        (c64::new(-b4 / 2.0, 0.0), 2 * cells - 1),
        ((root - b4) * 0.5, cells - 1),
        ((-root - b4) * 0.5, cells - 1),
    ];
    let coeffs = [
        c64::new(1.5 * b4, 0.0),
        c64::new((b4 * b4 + 8.0 * j2) / 2.0, 0.0),
        (c64::new(b4, 0.0) - a14 * l) * (2.0 * j2),
    ];
    entries.extend(solve_monic_cubic(coeffs).into_iter().map(|r| (r, 1)));
    Ok(ExactSpectrum { entries, j, b4, a14, cells })
}

/// Roots of `x^3 + a x^2 + b x + c` by Cardano's formula, each polished by
/// Newton iterations.
pub fn solve_monic_cubic([a, b, c]: [c64; 3]) -> [c64; 3] {
    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    // pick the sign that avoids cancellation
    let w = if (-q / 2.0 + disc).norm() >= (-q / 2.0 - disc).norm() {
        -q / 2.0 + disc
    } else {
        -q / 2.0 - disc
    };
    let u = if w.norm() == 0.0 { ZERO } else { w.powf(1.0 / 3.0) };
    let omega = c64::cis(TAU / 3.0);
    let mut roots = [ZERO; 3];
    let mut uk = u;
    for r in roots.iter_mut() {
        let t = if uk.norm() == 0.0 { ZERO } else { uk - p / (uk * 3.0) };
        *r = t - a / 3.0;
        uk *= omega;
    }
    let f = |x: c64| ((x + a) * x + b) * x + c;
    let df = |x: c64| (x * 3.0 + a * 2.0) * x + b;
    let scale = 1.0 + a.norm() + b.norm().sqrt() + c.norm().cbrt();
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let d = df(*r);
            if d.norm() == 0.0 {
                break;
            }
            let step = f(*r) / d;
            *r -= step;
            if step.norm() <= 1e-13 * scale {
                break;
            }
        }
    }
    roots
}

/// Which analytically solved family a spec belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolvedFamily {
    pub s_h: i64,
    /// Target and source sublattice shared by every active dissipator.
    pub alpha: Sublattice,
    pub alpha_prime: Sublattice,
}

impl SolvedFamily {
    /// The `b`-side channels are obtained from the written-out `a`-side
    /// formulas by exchanging the sublattices.
    pub fn derived_by_symmetry(&self) -> bool {
        self.alpha == Sublattice::B
    }
}

pub fn classify_family(spec: &LatticeSpec) -> Result<SolvedFamily> {
    spec.validate()?;
    let active: Vec<_> = spec.hoppings.iter().filter(|(_, j)| j.norm() > 0.0).collect();
    let [(&s_h, _)] = active[..] else {
        return Err(Error::UnsupportedFamily(format!(
            "{} nonzero hoppings; closed forms need exactly one",
            active.len()
        )));
    };
    let channels: BTreeSet<(Sublattice, Sublattice)> = spec
        .dissipators
        .iter()
        .filter(|d| d.gamma > 0.0)
        .map(|d| (d.alpha, d.alpha_prime))
        .collect();
    let [(alpha, alpha_prime)] = channels.iter().copied().collect::<Vec<_>>()[..] else {
        return Err(Error::UnsupportedFamily(format!(
            "{} dissipation channel types; closed forms need exactly one",
            channels.len()
        )));
    };
    Ok(SolvedFamily { s_h, alpha, alpha_prime })
}

fn channel_rates(spec: &LatticeSpec, family: &SolvedFamily) -> Vec<(i64, f64)> {
    spec.dissipators
        .iter()
        .filter(|d| d.gamma > 0.0 && d.alpha == family.alpha && d.alpha_prime == family.alpha_prime)
        .map(|d| (d.s, d.gamma))
        .collect()
}

/// `d lambda_0 / dK` at `K = 0` for the steady branch.
///
/// * `a <- b`: `4 i |J|^2 sum_s (s - s_H) gamma_s / (B_4^2 + 8 |J|^2)`,
/// * `b <- a`: the same with `s + s_H` and `B_1`,
/// * `a <- a` and `b <- b`: `(i/2) sum_s s gamma_s`, independent of the hopping.
pub fn steady_branch_slope(spec: &LatticeSpec) -> Result<c64> {
    let family = classify_family(spec)?;
    let j2 = spec.hoppings[&family.s_h].norm_sqr();
    let rates = channel_rates(spec, &family);
    let total: f64 = rates.iter().map(|r| r.1).sum();
    let slope = match (family.alpha, family.alpha_prime) {
        (Sublattice::A, Sublattice::B) => {
            let moment: f64 = rates.iter().map(|&(s, g)| (s - family.s_h) as f64 * g).sum();
            I * (4.0 * j2 * moment / (total * total + 8.0 * j2))
        }
        (Sublattice::B, Sublattice::A) => {
            let moment: f64 = rates.iter().map(|&(s, g)| (s + family.s_h) as f64 * g).sum();
            I * (4.0 * j2 * moment / (total * total + 8.0 * j2))
        }
        _ => {
            let moment: f64 = rates.iter().map(|&(s, g)| s as f64 * g).sum();
            I * (0.5 * moment)
        }
    };
    Ok(slope)
}

/// Winding predicted by the closed-form sign formulas.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FormulaWinding {
    pub value: i64,
    pub family: SolvedFamily,
    pub derived_by_symmetry: bool,
}

/// `Sgn[sum_s (s - s_H) gamma_s^{a,b}]` for `a <- b` jumps,
/// `Sgn[sum_s (s + s_H) gamma_s^{b,a}]` for `b <- a`, and
/// `Sgn[sum_s s gamma_s]` for same-sublattice jumps.
pub fn winding_formula(spec: &LatticeSpec) -> Result<FormulaWinding> {
    let family = classify_family(spec)?;
    let rates = channel_rates(spec, &family);
    let shift = match (family.alpha, family.alpha_prime) {
        (Sublattice::A, Sublattice::B) => -family.s_h,
        (Sublattice::B, Sublattice::A) => family.s_h,
        _ => 0,
    };
    let moment: f64 = rates.iter().map(|&(s, g)| (s + shift) as f64 * g).sum();
    let scale: f64 = rates.iter().map(|&(s, g)| (s.abs() + shift.abs()) as f64 * g).sum();
    if moment.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateParameters(
            "weighted dissipation moment vanishes; the point gap closes".into(),
        ));
    }
    Ok(FormulaWinding {
        value: moment.signum() as i64,
        family,
        derived_by_symmetry: family.derived_by_symmetry(),
    })
}

/// `T_n = diag(e^{i s_H K}, e^{-i s_H k_n}, e^{i s_H k_n'}, 1)`.
#[derive(Clone, Copy, Debug)]
pub struct GaugeMap {
    pub s_h: i64,
    pub diag: [c64; 4],
}

impl GaugeMap {
    /// `n` is 1-based.
    pub fn new(s_h: i64, k: f64, n: usize, cells: usize) -> Self {
        let s = s_h as f64;
        let kn = lattice_momentum(n, cells);
        Self {
            s_h,
            diag: [c64::cis(s * k), c64::cis(-s * kn), c64::cis(s * (kn + k)), c64::new(1.0, 0.0)],
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GaugeResidual {
    pub map_residual_mn: f64,
    pub map_residual_m0: f64,
}

/// Frobenius residuals of `T_n^-1 M_n T_n = M(J_0 -> J_{s_H})` and
/// `T_n^-1 M_0 T_m = e^{-i s_H K} M_0` (`n`, `m` 1-based).
pub fn gauge_check(spec: &LatticeSpec, k: f64, n: usize, m: usize) -> Result<GaugeResidual> {
    let family = classify_family(spec)?;
    if (family.alpha, family.alpha_prime) != (Sublattice::A, Sublattice::B) {
        return Err(Error::UnsupportedFamily("the gauge map applies to a <- b dissipation".into()));
    }
    if n == 0 || m == 0 || n > spec.cells || m > spec.cells {
        return Err(Error::InvalidSpec(format!("block indices must lie in 1..={}", spec.cells)));
    }
    let block = build_kblock(spec, k)?;
    let j = spec.hoppings[&family.s_h];
    let coef = &block.coefficients;
    let reference = m_block(j, j, coef.b1, coef.b4);
    let tn = GaugeMap::new(family.s_h, k, n, spec.cells);
    let tm = GaugeMap::new(family.s_h, k, m, spec.cells);
    let transform = |b: &Block4, left: &GaugeMap, right: &GaugeMap| -> Block4 {
        let mut out = *b;
        for (i, row) in out.iter_mut().enumerate() {
            for (jj, v) in row.iter_mut().enumerate() {
                *v = *v * right.diag[jj] / left.diag[i];
            }
        }
        out
    };
    let diff = |a: &Block4, b: &Block4| -> f64 {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let mapped_mn = transform(&block.m[n - 1], &tn, &tn);
    let mapped_m0 = transform(&block.m0, &tn, &tm);
    let phase = c64::cis(-(family.s_h as f64) * k);
    let mut expected_m0 = block.m0;
    expected_m0.iter_mut().flatten().for_each(|v| *v *= phase);
    Ok(GaugeResidual {
        map_residual_mn: diff(&mapped_mn, &reference),
        map_residual_m0: diff(&mapped_m0, &expected_m0),
    })
}

/// Comparison of a numerical eigenvalue list against an exact multiset.
#[derive(Clone, Debug)]
pub struct MultisetMatch {
    /// Largest distance between matched cluster centres.
    pub max_error: f64,
    pub multiplicities_match: bool,
    /// `(exact value, expected multiplicity, numerical cluster size)`.
    pub clusters: Vec<(c64, usize, usize)>,
}

/// Groups values within `radius` of a cluster's running centre.
pub fn cluster(values: &[(c64, usize)], radius: f64) -> Vec<(c64, usize)> {
    let mut clusters: Vec<(c64, usize, c64)> = Vec::new();
    for &(z, mult) in values {
        if let Some(c) = clusters.iter_mut().find(|c| (c.0 - z).norm() <= radius) {
            c.2 += z * mult as f64;
            c.1 += mult;
            c.0 = c.2 / c.1 as f64;
        } else {
            clusters.push((z, mult, z * mult as f64));
        }
    }
    clusters.into_iter().map(|c| (c.0, c.1)).collect()
}

/// Matches numerical eigenvalues to an exact spectrum after clustering both
/// with `radius`; cluster centres are compared one-to-one.
pub fn match_multiset(numerical: &[c64], exact: &ExactSpectrum, radius: f64) -> MultisetMatch {
    let num: Vec<(c64, usize)> = numerical.iter().map(|&z| (z, 1)).collect();
    match_weighted(&num, &exact.entries, radius)
}

/// [`match_multiset`] for two plain eigenvalue lists.
pub fn compare_spectra(a: &[c64], b: &[c64], radius: f64) -> MultisetMatch {
    let a: Vec<(c64, usize)> = a.iter().map(|&z| (z, 1)).collect();
    let b: Vec<(c64, usize)> = b.iter().map(|&z| (z, 1)).collect();
    match_weighted(&a, &b, radius)
}

fn match_weighted(numerical: &[(c64, usize)], exact: &[(c64, usize)], radius: f64) -> MultisetMatch {
    let num = cluster(numerical, radius);
    let ex = cluster(exact, radius);
    let mut used = vec![false; num.len()];
    let mut max_error: f64 = 0.0;
    let mut ok = num.len() == ex.len();
    let mut clusters = Vec::new();
    for &(value, mult) in &ex {
        let best = num
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|a, b| (a.1 .0 - value).norm().total_cmp(&(b.1 .0 - value).norm()));
        match best {
            Some((i, &(centre, size))) => {
                used[i] = true;
                max_error = max_error.max((centre - value).norm());
                ok &= size == mult;
                clusters.push((value, mult, size));
            }
            None => {
                ok = false;
                max_error = f64::INFINITY;
                clusters.push((value, mult, 0));
            }
        }
    }
    MultisetMatch { max_error, multiplicities_match: ok, clusters }
}

/// Steady-branch slope measured by a central difference of the eigenvalue of
/// `L(K)` closest to zero at `K = +-h`.
pub fn numerical_branch_slope(spec: &LatticeSpec, h: f64) -> Result<c64> {
    let nearest = |k: f64| -> Result<c64> {
        kblock_spectrum(spec, k)?
            .into_iter()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
            .ok_or(Error::NoSteadyState)
    };
    Ok((nearest(h)? - nearest(-h)?) / (2.0 * h))
}

/// One line of the oracle-versus-numerics report.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: residual <= tolerance, residual, tolerance, note: None }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: name.into(),
            passed: false,
            residual: f64::NAN,
            tolerance: 0.0,
            note: Some(err.to_string()),
        }
    }
}

/// Dissipator sets `(s, gamma)` of the `a <- b` family grid. Ranges are
/// consecutive so the offsets `s - s_H` never share a common factor; for
/// offsets that are all even the winding doubles and only its sign follows
/// the formula.
pub const FAMILY_RATE_SETS: [&[(i64, f64)]; 4] = [
    &[(0, 1.2), (1, 1.2)],
    &[(0, 0.5), (1, 1.0), (2, 0.3)],
    &[(-1, 0.7), (0, 0.3)],
    &[(0, 1.0), (1, 0.4), (-1, 0.2)],
];

/// The 20 single-hopping, `a <- b` specs (`s_H` in `-2..=2` times the rate
/// sets above) used to compare sign formulas with numerics.
pub fn family_grid(cells: usize) -> Vec<LatticeSpec> {
    let mut out = Vec::new();
    for s_h in -2..=2 {
        for rates in FAMILY_RATE_SETS {
            let mut spec = LatticeSpec::new(cells, crate::model::Boundary::Pbc).with_hopping(s_h, 1.0);
            for &(s, g) in rates {
                spec = spec.with_dissipator(crate::model::Dissipator::a_from_b(s, g));
            }
            out.push(spec);
        }
    }
    out
}

/// Momenta used by the gauge check; fixed so reports are reproducible.
pub const GAUGE_MOMENTA: [f64; 5] = [0.3137, 1.2904, 2.5561, 3.9020, 5.7713];

/// Runs every closed-form identity against the numerical pipeline.
pub fn verify_suite() -> Vec<IdentityCheck> {
    let mut out = Vec::new();
    // exact spectra of J_0-only blocks at all physical K
    for j0 in [0.3, 0.5, 1.0] {
        let cells = 10;
        let spec = LatticeSpec::new(cells, crate::model::Boundary::Pbc)
            .with_hopping(0, j0)
            .with_dissipator(crate::model::Dissipator::a_from_b(0, 1.2))
            .with_dissipator(crate::model::Dissipator::a_from_b(1, 1.2));
        let name = format!("exact_spectrum J0={j0} L={cells}");
        let mut worst: f64 = 0.0;
        let mut mult_ok = true;
        let mut error = None;
        for m in 0..cells {
            let k = lattice_momentum(m, cells);
            let result = kblock_spectrum(&spec, k)
                .and_then(|num| exact_spectrum_j0(c64::new(j0, 0.0), &[(0, 1.2), (1, 1.2)], cells, k).map(|ex| (num, ex)));
            match result {
                Ok((num, ex)) => {
                    let r = match_multiset(&num, &ex, 1e-7 * ex.b4);
                    worst = worst.max(r.max_error);
                    mult_ok &= r.multiplicities_match;
                }
                Err(e) => error = Some(e),
            }
        }
        out.push(match error {
            Some(e) => IdentityCheck::failed(name, &e),
            None => {
                let mut c = IdentityCheck::new(name, worst, 1e-9);
                if !mult_ok {
                    c.passed = false;
                    c = c.with_note("multiplicities differ");
                }
                c
            }
        });
    }
    // gauge identities
    for s_h in -2i64..=2 {
        let cells = 8;
        let spec = LatticeSpec::new(cells, crate::model::Boundary::Pbc)
            .with_hopping(s_h, c64::new(0.8, 0.3))
            .with_dissipator(crate::model::Dissipator::a_from_b(0, 1.2))
            .with_dissipator(crate::model::Dissipator::a_from_b(1, 0.7));
        let mut worst: f64 = 0.0;
        let mut error = None;
        for k in GAUGE_MOMENTA {
            for n in 1..=cells {
                for m in 1..=cells {
                    match gauge_check(&spec, k, n, m) {
                        Ok(r) => worst = worst.max(r.map_residual_mn).max(r.map_residual_m0),
                        Err(e) => error = Some(e),
                    }
                }
            }
        }
        let name = format!("gauge s_H={s_h} L={cells}");
        out.push(match error {
            Some(e) => IdentityCheck::failed(name, &e),
            None => IdentityCheck::new(name, worst, 1e-12),
        });
    }
    // sign formulas against both numerical windings
    for (i, spec) in family_grid(8).iter().enumerate() {
        let name = format!("winding_formula family[{i}]");
        let check = winding_formula(spec).and_then(|f| {
            crate::spectra::winding_w0_report(spec, crate::spectra::DEFAULT_N_K, crate::spectra::Epsilon::Auto)
                .map(|r| (f, r))
        });
        out.push(match check {
            Ok((f, r)) => {
                let agree = f.value == r.log_det.value && f.value == r.branch.value;
                let mut c = IdentityCheck::new(name, r.log_det.residual.max(r.branch.residual), 0.1)
                    .with_note(format!("formula {} log_det {} branch {}", f.value, r.log_det.value, r.branch.value));
                c.passed &= agree;
                c
            }
            Err(e) => IdentityCheck::failed(name, &e),
        });
    }
    // steady-branch slopes against finite differences
    for (i, spec) in family_grid(8).iter().enumerate().step_by(3) {
        let name = format!("branch_slope family[{i}]");
        out.push(match steady_branch_slope(spec).and_then(|a| numerical_branch_slope(spec, 1e-4).map(|n| (a, n))) {
            Ok((a, n)) => IdentityCheck::new(name, (a - n).norm() / a.norm(), 1e-3),
            Err(e) => IdentityCheck::failed(name, &e),
        });
    }
    out
}
