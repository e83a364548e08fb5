//! Dotted paths into a [`LatticeSpec`], used by `--set` and sweep axes.
//!
//! Recognized forms: `cells`, `hoppings.<s>` (real part, imaginary part
//! cleared), `hoppings.<s>.re`, `hoppings.<s>.im`, `dissipators[<i>].gamma`
//! and `dissipators[<i>].s`.

use lindtop::{c64, Dissipator, LatticeSpec};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Field {
    Cells,
    Hopping(i64, Part),
    Gamma(usize),
    Range(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Part {
    Real,
    Re,
    Im,
}

fn parse(path: &str) -> Result<Field> {
    let unknown = || CliError::UnknownPath(path.to_string());
    let p = path.trim();
    if p == "cells" || p == "lattice.cells" {
        return Ok(Field::Cells);
    }
    if let Some(rest) = p.strip_prefix("hoppings.") {
        let (s, part) = match rest.rsplit_once('.') {
            Some((s, "re")) => (s, Part::Re),
            Some((s, "im")) => (s, Part::Im),
            _ => (rest, Part::Real),
        };
        return s.parse().map(|s| Field::Hopping(s, part)).map_err(|_| unknown());
    }
    if let Some(rest) = p.strip_prefix("dissipators[") {
        let (index, field) = rest.split_once("].").ok_or_else(unknown)?;
        let index: usize = index.parse().map_err(|_| unknown())?;
        return match field {
            "gamma" => Ok(Field::Gamma(index)),
            "s" => Ok(Field::Range(index)),
            _ => Err(unknown()),
        };
    }
    Err(unknown())
}

fn integer(path: &str, value: f64) -> Result<i64> {
    if value.fract() != 0.0 || !value.is_finite() {
        return Err(CliError::Config(format!("`{path}` needs an integer, got {value}")));
    }
    Ok(value as i64)
}

fn dissipator<'a>(spec: &'a mut LatticeSpec, path: &str, i: usize) -> Result<&'a mut Dissipator> {
    let count = spec.dissipators.len();
    spec.dissipators
        .get_mut(i)
        .ok_or_else(|| CliError::UnknownPath(format!("{path} (spec has {count} dissipators)")))
}

/// Returns a copy of `spec` with the field at `path` set to `value`, validated.
pub fn resolve_parameter_path(spec: &LatticeSpec, path: &str, value: f64) -> Result<LatticeSpec> {
    let mut out = spec.clone();
    match parse(path)? {
        Field::Cells => {
            let cells = integer(path, value)?;
            out.cells = usize::try_from(cells).map_err(|_| CliError::Config(format!("`{path}` must be positive")))?;
        }
        Field::Hopping(s, part) => {
            let j = out.hoppings.entry(s).or_insert(c64::new(0.0, 0.0));
            match part {
                Part::Real => *j = c64::new(value, 0.0),
                Part::Re => j.re = value,
                Part::Im => j.im = value,
            }
        }
        Field::Gamma(i) => dissipator(&mut out, path, i)?.gamma = value,
        Field::Range(i) => dissipator(&mut out, path, i)?.s = integer(path, value)?,
    }
    out.validate()?;
    Ok(out)
}

/// Applies `PATH=VALUE` assignments in order.
pub fn apply_assignments(spec: &LatticeSpec, assignments: &[String]) -> Result<LatticeSpec> {
    let mut spec = spec.clone();
    for a in assignments {
        let (path, value) = a
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("`--set {a}`: expected PATH=VALUE")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("`--set {a}`: `{}` is not a number", value.trim())))?;
        spec = resolve_parameter_path(&spec, path, value)?;
    }
    Ok(spec)
}

/// Column name for a path: `J_0`, `J_-1`, `gamma_1`, `L`, ...
pub fn axis_label(path: &str, spec: &LatticeSpec) -> Result<String> {
    Ok(match parse(path)? {
        Field::Cells => "L".into(),
        Field::Hopping(s, Part::Real) => format!("J_{s}"),
        Field::Hopping(s, Part::Re) => format!("re_J_{s}"),
        Field::Hopping(s, Part::Im) => format!("im_J_{s}"),
        Field::Gamma(i) => match spec.dissipators.get(i) {
            Some(d) if d.is_chiral() => format!("gamma_{}", d.s),
            Some(d) => format!("gamma_{}_{}{}", d.s, d.alpha, d.alpha_prime),
            None => format!("gamma[{i}]"),
        },
        Field::Range(i) => format!("s[{i}]"),
    })
}
