//! TOML form of [`LatticeSpec`].
//!
//! ```toml
//! [lattice]
//! cells = 20
//!
//! [boundary]
//! kind = "obc"            # "pbc" | "obc" | "obc_edge_defect"
//!
//! [hoppings]              # J_s keyed by range s
//! 0 = 0.5
//! 1 = { re = 1.0, im = 0.0 }
//!
//! [[dissipators]]         # gamma_s^{alpha, alpha'}: |alpha, l + s><alpha', l|
//! alpha = "a"
//! alpha_prime = "b"
//! s = 0
//! gamma = 1.2
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Boundary, Dissipator, LatticeSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub lattice: LatticeSection,
    pub boundary: BoundarySection,
    #[serde(default)]
    pub hoppings: BTreeMap<String, Amplitude>,
    #[serde(default)]
    pub dissipators: Vec<Dissipator>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    pub kind: Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl From<Amplitude> for c64 {
    fn from(a: Amplitude) -> c64 {
        match a {
            Amplitude::Real(re) => c64::new(re, 0.0),
            Amplitude::Complex { re, im } => c64::new(re, im),
        }
    }
}

impl From<c64> for Amplitude {
    fn from(z: c64) -> Self {
        if z.im == 0.0 {
            Amplitude::Real(z.re)
        } else {
            Amplitude::Complex { re: z.re, im: z.im }
        }
    }
}

impl SpecFile {
    pub fn from_spec(spec: &LatticeSpec) -> Self {
        Self {
            lattice: LatticeSection { cells: spec.cells },
            boundary: BoundarySection { kind: spec.boundary },
            hoppings: spec.hoppings.iter().map(|(s, z)| (s.to_string(), (*z).into())).collect(),
            dissipators: spec.dissipators.clone(),
        }
    }

    pub fn to_spec(&self) -> Result<LatticeSpec> {
        let mut spec = LatticeSpec::new(self.lattice.cells, self.boundary.kind);
        for (key, amp) in &self.hoppings {
            let s: i64 = key
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("hoppings: key `{key}` is not an integer range")))?;
            spec = spec.with_hopping(s, *amp);
        }
        spec.dissipators = self.dissipators.clone();
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }
}

/// Parses and validates a spec; errors carry the line and key of the problem.
pub fn parse_spec(text: &str) -> Result<LatticeSpec> {
    let file: SpecFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    file.to_spec()
}

pub fn load_spec(path: &Path) -> Result<LatticeSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_spec(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn spec_to_toml(spec: &LatticeSpec) -> String {
    toml::to_string(&SpecFile::from_spec(spec)).expect("spec file serializes")
}
