//! JSON form of a [`PhiSpec`].
//!
//! φ and φ' themselves cannot be stored; a file names one of the built-ins
//! for them and supplies the representation data `(a, b, c, μ)` and flags,
//! which replace the built-in's values. A file with corrupted coefficients
//! therefore loads, and the corruption shows up in the consistency check.

use serde::{Deserialize, Serialize};

use super::{builtin, Atom, Density, LoewnerMeasure, PhiSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub kind: String,
    pub interval: [f64; 2],
    pub height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSpecFile {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub discontinuous_at_zero: bool,
    pub discontinuous_at_one: bool,
    pub operator_monotone_derivative: bool,
    pub atoms: Vec<[f64; 2]>,
    pub densities: Vec<DensityFile>,
}

impl PhiSpecFile {
    pub fn from_spec(spec: &PhiSpec) -> Result<Self> {
        let densities = spec
            .measure
            .densities()
            .iter()
            .map(|d| {
                d.uniform_height()
                    .map(|height| DensityFile { kind: "uniform".into(), interval: [d.lower(), d.upper()], height })
                    .ok_or_else(|| Error::InvalidArgument("custom densities cannot be serialized".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: spec.name.clone(),
            a: spec.a,
            b: spec.b,
            c: spec.c,
            discontinuous_at_zero: spec.discontinuous_at_zero,
            discontinuous_at_one: spec.discontinuous_at_one,
            operator_monotone_derivative: spec.operator_monotone_derivative,
            atoms: spec.measure.atoms().iter().map(|a| [a.location, a.weight]).collect(),
            densities,
        })
    }

    pub fn into_spec(self) -> Result<PhiSpec> {
        if !(self.b >= 0.0) {
            return Err(Error::InvalidArgument(format!("b: must be >= 0, got {}", self.b)));
        }
        let mut spec = builtin(&self.name)?;
        let densities = self
            .densities
            .iter()
            .enumerate()
            .map(|(i, d)| {
                if d.kind != "uniform" {
                    return Err(Error::InvalidArgument(format!("densities[{i}].kind: unknown {:?}", d.kind)));
                }
                Ok(Density::uniform(d.interval[0], d.interval[1], d.height))
            })
            .collect::<Result<Vec<_>>>()?;
        let atoms = self.atoms.iter().map(|&[location, weight]| Atom { location, weight }).collect();
        spec.measure = LoewnerMeasure::new(atoms, densities)
            .map_err(|e| Error::InvalidArgument(format!("measure: {e}")))?;
        spec.a = self.a;
        spec.b = self.b;
        spec.c = self.c;
        spec.discontinuous_at_zero = self.discontinuous_at_zero;
        spec.discontinuous_at_one = self.discontinuous_at_one;
        spec.operator_monotone_derivative = self.operator_monotone_derivative;
        Ok(spec)
    }
}

impl PhiSpec {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&PhiSpecFile::from_spec(self)?).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PhiSpecFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_spec()
    }
}
