//! Plain-text tables: `# key=value` metadata lines, one header line naming
//! three columns, then rows of three numbers written with 17 significant
//! digits so that every `f64` survives a round trip.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::classd::PiecewisePeriodic;
use crate::error::{Error, Result};
use crate::series::GridField;

/// Metadata, column names and `(abscissa, value)` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: [String; 3],
    pub rows: Vec<(f64, Complex64)>,
}

impl Table {
    pub fn new(first_column: &str, rows: Vec<(f64, Complex64)>) -> Self {
        Self { meta: Vec::new(), columns: [first_column.to_string(), "re".to_string(), "im".to_string()], rows }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for (x, z) in &self.rows {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", x, z.re, z.im);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut columns: Option<[String; 3]> = None;
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            if let Some(rest) = line.strip_prefix('#') {
                if columns.is_some() {
                    return Err(at("metadata after header".into()));
                }
                let (k, v) =
                    rest.trim().split_once('=').ok_or_else(|| at(format!("expected key=value, got {rest:?}")))?;
                meta.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(at(format!("expected 3 fields, got {}", fields.len())));
            }
            match &columns {
                None => {
                    columns = Some([fields[0].to_string(), fields[1].to_string(), fields[2].to_string()]);
                }
                Some(_) => {
                    let mut nums = [0.0; 3];
                    for (slot, f) in nums.iter_mut().zip(&fields) {
                        *slot = f.parse::<f64>().map_err(|e| at(format!("{f:?}: {e}")))?;
                    }
                    rows.push((nums[0], Complex64::new(nums[1], nums[2])));
                }
            }
        }
        let columns = columns.ok_or_else(|| Error::Parse("missing header line".into()))?;
        Ok(Self { meta, columns, rows })
    }

    fn expect_column(&self, name: &str) -> Result<()> {
        if self.columns[0] == name && self.columns[1] == "re" && self.columns[2] == "im" {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected columns {name},re,im, got {}", self.columns.join(","))))
        }
    }
}

pub fn grid_to_table(field: &GridField) -> Table {
    Table::new("x", field.xs.iter().copied().zip(field.values.iter().copied()).collect())
        .with_meta("t", format!("{:.16e}", field.t))
}

pub fn table_to_grid(table: &Table) -> Result<GridField> {
    table.expect_column("x")?;
    let t = match table.meta_value("t") {
        Some(v) => v.parse::<f64>().map_err(|e| Error::Parse(format!("t={v:?}: {e}")))?,
        None => f64::NAN,
    };
    let (xs, values) = table.rows.iter().copied().unzip();
    GridField::new(t, xs, values)
}

pub fn piecewise_to_table(f: &PiecewisePeriodic) -> Table {
    Table::new("breakpoint", f.breakpoints().iter().copied().zip(f.values().iter().copied()).collect())
}

/// Rebuilds a piecewise function; all invariants are re-validated.
pub fn table_to_piecewise(table: &Table) -> Result<PiecewisePeriodic> {
    table.expect_column("breakpoint")?;
    let (b, v) = table.rows.iter().copied().unzip();
    PiecewisePeriodic::new(b, v)
}

pub fn profile_to_table(rows: &[(f64, Complex64)]) -> Table {
    Table::new("s", rows.to_vec())
}

pub fn table_to_profile(table: &Table) -> Result<Vec<(f64, Complex64)>> {
    table.expect_column("s")?;
    Ok(table.rows.clone())
}
