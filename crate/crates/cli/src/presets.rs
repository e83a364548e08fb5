//! Named parameter sets for the figure data.
//!
//! A bare name (`fig2`, ...) is the representative single spec of that
//! figure; an `a`/`c` suffix is the sweep behind its phase-diagram panel.

use clap::ValueEnum;
use lindtop::{Boundary, Dissipator, LatticeSpec, Sublattice};

use crate::config::{AxisDef, OutputKind, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// SSH chain, L = 20, J_0 = 0.5, J_1 = 1, gamma_0 = gamma_1 = 1.2, open.
    #[value(name = "fig2")]
    Fig2,
    /// fig2 swept over J_0 in [0.2, 2] (41 points): windings, gap, n_bar.
    #[value(name = "fig2a")]
    Fig2a,
    /// SSH chain with J_1 = 2, gamma_0 = 2, J_0 = 1, gamma_1 = 1.
    #[value(name = "fig3")]
    Fig3,
    /// fig3 over log-spaced J_0 / J_1 in [0.1, 1] and gamma_1 in [0.1, 10^1.5].
    #[value(name = "fig3a")]
    Fig3a,
    /// Chiral-asymmetric dissipation: gamma_1^{aa} = 2.25, gamma_-1^{bb} = 1.2, J_0 = 0.6.
    #[value(name = "fig4")]
    Fig4,
    /// fig4 over J_0 in [0.2, 2] and gamma_1^{aa} in [0.25, 4].
    #[value(name = "fig4a")]
    Fig4a,
    /// Longer-range hopping J_{1,+} = 1, J_{1,-} = 0.5, J_0 = 0.5.
    #[value(name = "figS1")]
    FigS1,
    /// figS1 swept over J_0 in [0.2, 3] (29 points).
    #[value(name = "figS1a")]
    FigS1a,
    /// Two hard-core bosons on the fig2 chain with L = 8.
    #[value(name = "figS2")]
    FigS2,
    /// figS2 swept over J_0 in [0.2, 2] (10 points).
    #[value(name = "figS2c")]
    FigS2c,
}

/// Presets accepted by `figure`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "fig2")]
    Fig2,
    #[value(name = "fig3")]
    Fig3,
    #[value(name = "fig4")]
    Fig4,
    #[value(name = "figS1")]
    FigS1,
    #[value(name = "figS2")]
    FigS2,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::FigS1 => "figS1",
            Figure::FigS2 => "figS2",
        }
    }
}

pub fn ssh(cells: usize, j0: f64) -> LatticeSpec {
    LatticeSpec::ssh(cells, j0, 1.0, 1.2, 1.2, Boundary::Obc)
}

pub fn parity_chain(j0: f64, gamma1: f64) -> LatticeSpec {
    LatticeSpec::ssh(20, j0, 2.0, 2.0, gamma1, Boundary::Obc)
}

pub fn chiral_asymmetric(j0: f64, gamma_aa: f64) -> LatticeSpec {
    LatticeSpec::new(20, Boundary::Obc)
        .with_hopping(0, j0)
        .with_hopping(1, 1.0)
        .with_dissipator(Dissipator::new(Sublattice::A, Sublattice::A, 1, gamma_aa))
        .with_dissipator(Dissipator::new(Sublattice::B, Sublattice::B, -1, 1.2))
}

pub fn longer_range(j0: f64) -> LatticeSpec {
    LatticeSpec::new(20, Boundary::Obc)
        .with_hopping(0, j0)
        .with_hopping(1, 1.0)
        .with_hopping(-1, 0.5)
        .with_dissipator(Dissipator::a_from_b(0, 1.2))
        .with_dissipator(Dissipator::a_from_b(1, 1.2))
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig2a => "fig2a",
            Preset::Fig3 => "fig3",
            Preset::Fig3a => "fig3a",
            Preset::Fig4 => "fig4",
            Preset::Fig4a => "fig4a",
            Preset::FigS1 => "figS1",
            Preset::FigS1a => "figS1a",
            Preset::FigS2 => "figS2",
            Preset::FigS2c => "figS2c",
        }
    }

    pub fn config(self) -> RunConfig {
        use OutputKind::*;
        let j0 = "hoppings.0";
        match self {
            Preset::Fig2 => RunConfig::new(ssh(20, 0.5)),
            Preset::Fig2a => RunConfig::new(ssh(20, 0.5))
                .with_axis(AxisDef::linspace(j0, 0.2, 2.0, 41))
                .with_outputs(&[Winding, Spectrum, Observables]),
            Preset::Fig3 => RunConfig::new(parity_chain(1.0, 1.0)),
            Preset::Fig3a => RunConfig::new(parity_chain(1.0, 1.0))
                .with_axis(AxisDef::logspace(j0, 2f64.log10() - 1.0, 2f64.log10(), 21))
                .with_axis(AxisDef::logspace("dissipators[1].gamma", -1.0, 1.5, 21))
                .with_outputs(&[Observables]),
            Preset::Fig4 => RunConfig::new(chiral_asymmetric(0.6, 2.25)),
            Preset::Fig4a => RunConfig::new(chiral_asymmetric(0.6, 2.25))
                .with_axis(AxisDef::linspace(j0, 0.2, 2.0, 19))
                .with_axis(AxisDef::linspace("dissipators[0].gamma", 0.25, 4.0, 16))
                .with_outputs(&[Observables]),
            Preset::FigS1 => RunConfig::new(longer_range(0.5)),
            Preset::FigS1a => RunConfig::new(longer_range(0.5))
                .with_axis(AxisDef::linspace(j0, 0.2, 3.0, 29))
                .with_outputs(&[Winding, Spectrum, Observables]),
            Preset::FigS2 => RunConfig::new(ssh(8, 0.5)),
            Preset::FigS2c => RunConfig::new(ssh(8, 0.5))
                .with_axis(AxisDef::linspace(j0, 0.2, 2.0, 10))
                .with_outputs(&[Twobody]),
        }
    }
}
