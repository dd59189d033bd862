//! Nuclear-bath parameter registry.
//!
//! Plain CSV, one record per bath, units in the header. `#` lines are
//! comments. Cells with no literature value are the literal `null`.

use std::io::{Read, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const REGISTRY_VERSION: &str = "nv-nuclear-baths/1";

const DEFAULT_REGISTRY: &str = include_str!("registry.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConcentrationUnit {
    #[serde(rename = "percent")]
    Percent,
    #[serde(rename = "nm^-3")]
    PerNm3,
    #[serde(rename = "nm^-2")]
    PerNm2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub value: f64,
    pub unit: ConcentrationUnit,
}

/// One nuclear bath: a column of the literature parameter table.
#[derive(Debug, Clone, PartialEq)]
pub struct NucleusRecord {
    pub name: String,
    /// Hz/T.
    pub gamma_n: f64,
    pub concentration: Option<Concentration>,
    /// Hz.
    pub qubit_energy: Option<f64>,
    /// Cross-relaxation rate at the reference concentration, Hz.
    pub bare_rate_ref: Option<f64>,
    /// Hz.
    pub decoherence_ref: Option<f64>,
    /// nm²/s.
    pub diffusion_const_ref: Option<f64>,
    /// Hz.
    pub polarization_rate: Option<f64>,
    /// Fraction in [0, 1].
    pub max_polarization: Option<f64>,
    /// Hz.
    pub spin_lattice_rate: Option<f64>,
}

impl NucleusRecord {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("qubit_energy", self.qubit_energy),
            ("bare_rate_ref", self.bare_rate_ref),
            ("decoherence_ref", self.decoherence_ref),
            ("diffusion_const_ref", self.diffusion_const_ref),
            ("polarization_rate", self.polarization_rate),
            ("spin_lattice_rate", self.spin_lattice_rate),
        ];
        for (field, value) in rates {
            if let Some(v) = value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Registry(format!(
                        "{}: {field} = {v} must be a nonnegative number",
                        self.name
                    )));
                }
            }
        }
        if !(self.gamma_n.is_finite() && self.gamma_n > 0.0) {
            return Err(Error::Registry(format!(
                "{}: gamma_n = {} must be positive",
                self.name, self.gamma_n
            )));
        }
        if let Some(p) = self.max_polarization {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Registry(format!(
                    "{}: max_polarization = {p} outside [0, 1]",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

// Flat CSV row; the concentration is split over a value and a unit column.
#[derive(Debug, Serialize, Deserialize)]
struct Row {
    name: String,
    #[serde(rename = "gamma_n[Hz/T]")]
    gamma_n: f64,
    #[serde(rename = "concentration", with = "nullable")]
    concentration: Option<f64>,
    #[serde(rename = "concentration_unit", with = "nullable")]
    concentration_unit: Option<ConcentrationUnit>,
    #[serde(rename = "qubit_energy[Hz]", with = "nullable")]
    qubit_energy: Option<f64>,
    #[serde(rename = "bare_rate_ref[Hz]", with = "nullable")]
    bare_rate_ref: Option<f64>,
    #[serde(rename = "decoherence_ref[Hz]", with = "nullable")]
    decoherence_ref: Option<f64>,
    #[serde(rename = "diffusion_const_ref[nm^2/s]", with = "nullable")]
    diffusion_const_ref: Option<f64>,
    #[serde(rename = "polarization_rate[Hz]", with = "nullable")]
    polarization_rate: Option<f64>,
    #[serde(rename = "max_polarization[1]", with = "nullable")]
    max_polarization: Option<f64>,
    #[serde(rename = "spin_lattice_rate[Hz]", with = "nullable")]
    spin_lattice_rate: Option<f64>,
}

mod nullable {
    use super::*;

    pub fn serialize<T: Serialize, S: Serializer>(v: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => v.serialize(s),
            None => s.serialize_str("null"),
        }
    }

    pub fn deserialize<'de, T, D>(d: D) -> std::result::Result<Option<T>, D::Error>
    where
        T: serde::de::DeserializeOwned,
        D: Deserializer<'de>,
    {
        let raw = String::deserialize(d)?;
        let raw = raw.trim();
        if raw == "null" {
            return Ok(None);
        }
        serde_json::from_value(serde_json::Value::String(raw.to_owned()))
            .or_else(|_| raw.parse::<serde_json::Value>().and_then(serde_json::from_value))
            .map(Some)
            .map_err(|_| serde::de::Error::custom(format!("cannot parse `{raw}` (use `null` for an absent value)")))
    }
}

impl TryFrom<Row> for NucleusRecord {
    type Error = Error;

    fn try_from(row: Row) -> Result<Self> {
        let concentration = match (row.concentration, row.concentration_unit) {
            (Some(value), Some(unit)) => Some(Concentration { value, unit }),
            (None, None) => None,
            _ => {
                return Err(Error::Registry(format!(
                    "{}: concentration and concentration_unit must both be null or both set",
                    row.name
                )))
            }
        };
        let record = NucleusRecord {
            name: row.name,
            gamma_n: row.gamma_n,
            concentration,
            qubit_energy: row.qubit_energy,
            bare_rate_ref: row.bare_rate_ref,
            decoherence_ref: row.decoherence_ref,
            diffusion_const_ref: row.diffusion_const_ref,
            polarization_rate: row.polarization_rate,
            max_polarization: row.max_polarization,
            spin_lattice_rate: row.spin_lattice_rate,
        };
        record.validate()?;
        Ok(record)
    }
}

impl From<&NucleusRecord> for Row {
    fn from(r: &NucleusRecord) -> Self {
        Row {
            name: r.name.clone(),
            gamma_n: r.gamma_n,
            concentration: r.concentration.map(|c| c.value),
            concentration_unit: r.concentration.map(|c| c.unit),
            qubit_energy: r.qubit_energy,
            bare_rate_ref: r.bare_rate_ref,
            decoherence_ref: r.decoherence_ref,
            diffusion_const_ref: r.diffusion_const_ref,
            polarization_rate: r.polarization_rate,
            max_polarization: r.max_polarization,
            spin_lattice_rate: r.spin_lattice_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    pub records: Vec<NucleusRecord>,
}

impl Registry {
    /// The shipped table: natural and enriched ¹³C, ¹H on biphenyl and on
    /// Al₂O₃, ¹⁹F on Al₂O₃.
    pub fn builtin() -> Self {
        Self::from_reader(DEFAULT_REGISTRY.as_bytes()).expect("embedded registry is valid")
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Registry(format!("record {}: {e}", i + 1)))?;
            records.push(NucleusRecord::try_from(row)?);
        }
        Ok(Registry { records })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(Row::from(r))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&NucleusRecord> {
        self.records.iter().find(|r| r.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_carbon_natural_abundance() {
        let reg = Registry::builtin();
        assert_eq!(reg.records.len(), 5);
        let c = reg.get("13C-natural").unwrap();
        assert_eq!(c.qubit_energy, Some(1.1e6));
        assert_eq!(c.bare_rate_ref, Some(250e3));
        assert_eq!(c.decoherence_ref, Some(1.5e3));
        assert_eq!(c.gamma_n, 10.7e6);
        assert_eq!(
            c.concentration,
            Some(Concentration {
                value: 1.9,
                unit: ConcentrationUnit::PerNm3
            })
        );
        let enriched = reg.get("13C-enriched").unwrap();
        assert_eq!(enriched.bare_rate_ref, None);
        let f = reg.get("19F-Al2O3").unwrap();
        assert_eq!(f.max_polarization, Some(0.003));
    }

    #[test]
    fn write_then_read_is_identity() {
        let reg = Registry::builtin();
        let mut buf = Vec::new();
        reg.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("null"));
        assert_eq!(Registry::from_reader(buf.as_slice()).unwrap(), reg);
    }

    #[test]
    fn rejects_out_of_range_polarization() {
        let csv = "name,gamma_n[Hz/T],concentration,concentration_unit,qubit_energy[Hz],bare_rate_ref[Hz],\
                   decoherence_ref[Hz],diffusion_const_ref[nm^2/s],polarization_rate[Hz],max_polarization[1],spin_lattice_rate[Hz]\n\
                   x,1e6,null,null,null,null,null,null,null,1.5,null\n";
        assert!(matches!(Registry::from_reader(csv.as_bytes()), Err(Error::Registry(_))));
    }

    #[test]
    fn rejects_empty_cell() {
        let csv = "name,gamma_n[Hz/T],concentration,concentration_unit,qubit_energy[Hz],bare_rate_ref[Hz],\
                   decoherence_ref[Hz],diffusion_const_ref[nm^2/s],polarization_rate[Hz],max_polarization[1],spin_lattice_rate[Hz]\n\
                   x,1e6,null,null,,null,null,null,null,null,null\n";
        assert!(Registry::from_reader(csv.as_bytes()).is_err());
    }
}
