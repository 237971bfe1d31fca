//! Unit suffixes accepted in configuration files.
//!
//! Quantities resolve to eV (energy) and seconds (time). A bare number is
//! taken to be in those internal units already.

use std::fmt;

/// Planck constant in eV·s, for frequency-valued energies.
pub const PLANCK_EV_S: f64 = 4.135_667_696e-15;
/// Reduced Planck constant in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Energy,
    Time,
    Rate,
    InverseEnergy,
    Dimensionless,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Energy => "energy",
            Dimension::Time => "time",
            Dimension::Rate => "rate",
            Dimension::InverseEnergy => "inverse energy",
            Dimension::Dimensionless => "dimensionless",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot read {text:?} as {dimension}: {reason}")]
pub struct UnitError {
    pub text: String,
    pub dimension: Dimension,
    pub reason: String,
}

const ENERGY: &[(&str, f64)] = &[
    ("GeV", 1e9),
    ("MeV", 1e6),
    ("keV", 1e3),
    ("meV", 1e-3),
    ("eV", 1.0),
    ("GHz", 1e9 * PLANCK_EV_S),
    ("MHz", 1e6 * PLANCK_EV_S),
    ("kHz", 1e3 * PLANCK_EV_S),
    ("Hz", PLANCK_EV_S),
];
const TIME: &[(&str, f64)] = &[("ms", 1e-3), ("us", 1e-6), ("µs", 1e-6), ("ns", 1e-9), ("s", 1.0)];
const RATE: &[(&str, f64)] =
    &[("GHz", 1e9), ("MHz", 1e6), ("kHz", 1e3), ("Hz", 1.0), ("1/ms", 1e3), ("/ms", 1e3), ("1/s", 1.0), ("/s", 1.0)];
const INVERSE_ENERGY: &[(&str, f64)] = &[
    ("1/GeV", 1e-9),
    ("/GeV", 1e-9),
    ("1/MeV", 1e-6),
    ("/MeV", 1e-6),
    ("1/keV", 1e-3),
    ("/keV", 1e-3),
    ("1/meV", 1e3),
    ("/meV", 1e3),
    ("1/eV", 1.0),
    ("/eV", 1.0),
];

fn table(dim: Dimension) -> &'static [(&'static str, f64)] {
    match dim {
        Dimension::Energy => ENERGY,
        Dimension::Time => TIME,
        Dimension::Rate => RATE,
        Dimension::InverseEnergy => INVERSE_ENERGY,
        Dimension::Dimensionless => &[],
    }
}

/// Parses `"<number>[ ]<unit>"` into internal units.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    let err = |reason: &str| UnitError { text: text.to_string(), dimension: dim, reason: reason.into() };
    let s = text.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    for (suffix, factor) in table(dim) {
        if let Some(number) = s.strip_suffix(suffix) {
            let number = number.trim();
            // reject "1 meV" being read as "1 m" + "eV" and similar splits
            if number.is_empty() || number.ends_with(|c: char| c.is_alphabetic() && c != 'e' && c != 'E') {
                continue;
            }
            if let Ok(v) = number.parse::<f64>() {
                return Ok(v * factor);
            }
        }
    }
    let known: Vec<&str> = table(dim).iter().map(|(s, _)| *s).collect();
    if known.is_empty() {
        Err(err("expected a plain number"))
    } else {
        Err(err(&format!("unknown unit; expected one of {}", known.join(", "))))
    }
}
