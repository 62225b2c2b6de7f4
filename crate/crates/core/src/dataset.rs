//! Historical technology records: schema, validation, CSV ingestion and the
//! bundled small-arms sample.
//!
//! A [`Dataset`] is immutable once built. Construction validates every record
//! (finite year, strictly positive attributes) and sorts by year, so any
//! `Dataset` value in the program is safe to take logarithms of.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names, units and CSV columns of the attribute vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    names: Vec<String>,
    units: Vec<String>,
    columns: Vec<String>,
}

impl AttributeSchema {
    /// Generic schema; CSV columns are the attribute names themselves.
    pub fn new(names: Vec<String>, units: Vec<String>) -> Result<Self> {
        let columns = names.clone();
        Self::with_columns(names, units, columns)
    }

    pub fn with_columns(names: Vec<String>, units: Vec<String>, columns: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Schema("schema needs at least one attribute".into()));
        }
        if units.len() != names.len() || columns.len() != names.len() {
            return Err(Error::Schema(format!(
                "{} names, {} units, {} columns",
                names.len(),
                units.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in names.iter().chain(columns.iter().filter(|c| !names.contains(c))) {
            if name.trim().is_empty() {
                return Err(Error::Schema("attribute names must be non-empty".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate attribute `{name}`")));
            }
        }
        for reserved in ["name", "year"] {
            if columns.iter().any(|c| c == reserved) {
                return Err(Error::Schema(format!("`{reserved}` is a reserved column")));
            }
        }
        Ok(Self { names, units, columns })
    }

    /// Velocity (m/s), effective range (m), projectile mass (kg), rate of fire (1/min).
    pub fn small_arms() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Self {
            names: s(&["velocity", "range", "mass", "rate"]),
            units: s(&["m/s", "m", "kg", "1/min"]),
            columns: s(&["velocity_mps", "range_m", "mass_kg", "rate_per_min"]),
        }
    }

    pub fn is_small_arms(&self) -> bool {
        *self == Self::small_arms()
    }

    pub fn count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Index of an attribute by name or CSV column.
    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.names
            .iter()
            .position(|n| n == key)
            .or_else(|| self.columns.iter().position(|c| c == key))
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["name".to_string(), "year".to_string()];
        h.extend(self.columns.iter().cloned());
        h
    }
}

/// One dated artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechRecord {
    pub name: String,
    pub year: f64,
    pub attributes: Vec<f64>,
}

impl TechRecord {
    pub fn new(name: impl Into<String>, year: f64, attributes: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            year,
            attributes,
        }
    }

    /// log₁₀ of every attribute.
    pub fn log_attributes(&self) -> Vec<f64> {
        self.attributes.iter().map(|x| x.log10()).collect()
    }
}

/// Validated, year-ordered collection of records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    schema: AttributeSchema,
    records: Vec<TechRecord>,
    provenance: String,
}

impl Dataset {
    /// Validates every record and sorts ascending by year (stable, so ties keep
    /// their input order).
    pub fn new(schema: AttributeSchema, records: Vec<TechRecord>, provenance: impl Into<String>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            validate_record(&schema, r, i as u64 + 1)?;
        }
        Ok(Self::from_validated(schema, records, provenance.into()))
    }

    fn from_validated(schema: AttributeSchema, mut records: Vec<TechRecord>, provenance: String) -> Self {
        records.sort_by(|a, b| a.year.total_cmp(&b.year));
        Self {
            schema,
            records,
            provenance,
        }
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn records(&self) -> &[TechRecord] {
        &self.records
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn years(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.year).collect()
    }

    /// `(first year, last year)`, or `None` when empty.
    pub fn year_span(&self) -> Option<(f64, f64)> {
        Some((self.records.first()?.year, self.records.last()?.year))
    }

    /// Records with `lo <= year <= hi`.
    pub fn filter_years(&self, lo: f64, hi: f64) -> Dataset {
        let records = self
            .records
            .iter()
            .filter(|r| r.year >= lo && r.year <= hi)
            .cloned()
            .collect();
        Dataset {
            schema: self.schema.clone(),
            records,
            provenance: self.provenance.clone(),
        }
    }

    /// Everything a forecaster standing at `cutoff` could have seen.
    pub fn truncate_at(&self, cutoff: f64) -> Dataset {
        self.filter_years(f64::NEG_INFINITY, cutoff)
    }

    /// Same schema, records duplicated `times` over. Used for weighting checks.
    pub fn repeated(&self, times: usize) -> Dataset {
        let records = self
            .records
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.clone(), times))
            .collect();
        Self::from_validated(self.schema.clone(), records, self.provenance.clone())
    }

    pub fn load_csv(path: impl AsRef<Path>, schema: AttributeSchema) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        Self::read_csv(file, schema, path.display().to_string())
    }

    /// Parses `name,year,<columns...>`; lines starting with `#` are skipped.
    pub fn read_csv<R: Read>(reader: R, schema: AttributeSchema, provenance: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);

        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Schema(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let expected = schema.header();
        for col in &expected {
            if !header.contains(col) {
                return Err(Error::Schema(format!("missing column `{col}`")));
            }
        }
        for col in &header {
            if !expected.contains(col) {
                return Err(Error::Schema(format!("unexpected column `{col}`")));
            }
        }
        let position = |col: &str| header.iter().position(|h| h == col).unwrap();
        let name_at = position("name");
        let year_at = position("year");
        let attr_at: Vec<usize> = schema.columns.iter().map(|c| position(c)).collect();

        let mut records = Vec::new();
        for row in rdr.records() {
            let row = row.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                field: "row".into(),
                reason: e.to_string(),
            })?;
            let line = row.position().map_or(0, |p| p.line());
            let parse = |at: usize, field: &str| -> Result<f64> {
                let raw = row.get(at).unwrap_or("");
                let v: f64 = raw.parse().map_err(|_| Error::Parse {
                    line,
                    field: field.to_string(),
                    reason: format!("`{raw}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        field: field.to_string(),
                        reason: format!("`{raw}` is not finite"),
                    });
                }
                Ok(v)
            };
            let year = parse(year_at, "year")?;
            let attributes = attr_at
                .iter()
                .zip(&schema.columns)
                .map(|(&at, col)| parse(at, col))
                .collect::<Result<Vec<_>>>()?;
            let record = TechRecord::new(row.get(name_at).unwrap_or(""), year, attributes);
            validate_record(&schema, &record, line)?;
            records.push(record);
        }
        Ok(Self::from_validated(schema, records, provenance.into()))
    }

    /// Writes the dataset in the same CSV layout [`Dataset::read_csv`] accepts.
    /// Floats use the shortest representation that round-trips exactly.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(self.schema.header()).map_err(io)?;
        for r in &self.records {
            let mut row = vec![r.name.clone(), r.year.to_string()];
            row.extend(r.attributes.iter().map(|a| a.to_string()));
            w.write_record(&row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// The eight example rows from the small-arms history, years 1180 to 2008.
    pub fn builtin_sample() -> Self {
        let rows: [(&str, f64, [f64; 4]); 8] = [
            ("Longbow", 1180.0, [47.0, 75.0, 0.1023, 5.0]),
            ("Crossbow 13c", 1250.0, [45.0, 75.0, 0.0840, 2.0]),
            ("Handgonne", 1350.0, [149.0, 25.0, 0.0380, 0.5]),
            ("Harquebus", 1455.0, [240.0, 50.0, 0.0278, 1.0]),
            ("Wheel lock musket", 1595.0, [456.0, 75.0, 0.0300, 1.0]),
            ("Brown Bess musket", 1722.0, [457.0, 75.0, 0.0321, 3.0]),
            ("Berdan rifle", 1870.0, [437.0, 270.0, 0.0198, 7.0]),
            ("M27 assault rifle", 2008.0, [900.0, 550.0, 0.0041, 700.0]),
        ];
        let records = rows
            .iter()
            .map(|(name, year, attrs)| TechRecord::new(*name, *year, attrs.to_vec()))
            .collect();
        Self::new(
            AttributeSchema::small_arms(),
            records,
            "built-in sample: 8 example small-arms records (Western European and U.S. weapons)",
        )
        .expect("built-in sample is valid")
    }
}

fn validate_record(schema: &AttributeSchema, r: &TechRecord, line: u64) -> Result<()> {
    let invalid = |field: &str, reason: String| Error::Validation {
        line,
        record: r.name.clone(),
        field: field.to_string(),
        reason,
    };
    if !r.year.is_finite() {
        return Err(invalid("year", format!("year {} is not finite", r.year)));
    }
    if r.attributes.len() != schema.count() {
        return Err(invalid(
            "attributes",
            format!("expected {} attributes, found {}", schema.count(), r.attributes.len()),
        ));
    }
    for (value, col) in r.attributes.iter().zip(&schema.columns) {
        if !(value.is_finite() && *value > 0.0) {
            return Err(invalid(col, format!("attribute must be finite and > 0, got {value}")));
        }
    }
    Ok(())
}
