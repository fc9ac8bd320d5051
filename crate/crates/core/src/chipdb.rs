//! Chip catalog: power, package size and heat density of commercial
//! processors.
//!
//! The catalog is a UTF-8 delimited text file with the fixed header
//! `device,company,product,node_nm,power_w,package_cm2,heat_density_w_cm2`.
//! Lines starting with `#` are comments. The bundled catalog ships in
//! `data/chips.csv` and can be replaced or extended without rebuilding.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CATALOG_HEADER: [&str; 7] = [
    "device",
    "company",
    "product",
    "node_nm",
    "power_w",
    "package_cm2",
    "heat_density_w_cm2",
];

/// Largest accepted gap between the stated heat density and power/area,
/// in W/cm². Stated values are rounded to 0.01.
pub const DENSITY_TOLERANCE: f64 = 0.05;

const BUNDLED: &str = include_str!("../data/chips.csv");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },
    #[error("{}{product}: package size must be > 0", line_prefix(*.line))]
    ZeroArea { line: Option<u64>, product: String },
    #[error("line {line}: {product}: stated heat density {stated:.2} W/cm² disagrees with power/area = {computed:.4} W/cm²")]
    Validation {
        line: u64,
        product: String,
        stated: f64,
        computed: f64,
    },
    #[error("reading catalog: {0}")]
    Io(#[from] std::io::Error),
}

fn line_prefix(line: Option<u64>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceClass {
    Server,
    Laptop,
    Tablet,
    Smartphone,
}

impl DeviceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DeviceClass::Server => "server",
            DeviceClass::Laptop => "laptop",
            DeviceClass::Tablet => "tablet",
            DeviceClass::Smartphone => "smartphone",
        }
    }
}

impl fmt::Display for DeviceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DeviceClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "server" => Ok(DeviceClass::Server),
            "laptop" => Ok(DeviceClass::Laptop),
            "tablet" => Ok(DeviceClass::Tablet),
            "smartphone" => Ok(DeviceClass::Smartphone),
            other => Err(format!("unknown device class {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChipSpec {
    pub device_class: DeviceClass,
    pub company: String,
    pub product: String,
    pub node_nm: u32,
    pub power_w: f64,
    pub package_cm2: f64,
    /// Heat density as recorded in the catalog, W/cm².
    pub stated_heat_density: f64,
}

impl ChipSpec {
    /// power / package size, W/cm².
    pub fn heat_density(&self) -> Result<f64, CatalogError> {
        heat_density(self)
    }
}

pub fn heat_density(spec: &ChipSpec) -> Result<f64, CatalogError> {
    if !(spec.package_cm2 > 0.0) {
        return Err(CatalogError::ZeroArea {
            line: None,
            product: spec.product.clone(),
        });
    }
    Ok(spec.power_w / spec.package_cm2)
}

/// Rounds to two decimals, the granularity of the stated column.
pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Stated versus computed heat density of one catalog row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCheck {
    pub product: String,
    pub stated: f64,
    pub computed: f64,
    pub deviation: f64,
    pub ok: bool,
}

pub fn check_heat_density(specs: &[ChipSpec]) -> Vec<DensityCheck> {
    specs
        .iter()
        .map(|s| {
            let computed = s.power_w / s.package_cm2;
            let deviation = (s.stated_heat_density - computed).abs();
            DensityCheck {
                product: s.product.clone(),
                stated: s.stated_heat_density,
                computed,
                deviation,
                ok: deviation <= DENSITY_TOLERANCE,
            }
        })
        .collect()
}

/// Parses catalog text and checks per-row invariants (positive power and
/// package size). Stated heat densities are not cross-checked; see
/// [`load_catalog`].
pub fn parse_catalog(text: &str) -> Result<Vec<ChipSpec>, CatalogError> {
    parse_rows(text).map(|rows| rows.into_iter().map(|(_, spec)| spec).collect())
}

/// [`parse_catalog`] plus rejection of any row whose stated heat density is
/// more than [`DENSITY_TOLERANCE`] away from power/area.
pub fn load_catalog(text: &str) -> Result<Vec<ChipSpec>, CatalogError> {
    let rows = parse_rows(text)?;
    for (line, spec) in &rows {
        let computed = spec.power_w / spec.package_cm2;
        if (spec.stated_heat_density - computed).abs() > DENSITY_TOLERANCE {
            return Err(CatalogError::Validation {
                line: *line,
                product: spec.product.clone(),
                stated: spec.stated_heat_density,
                computed,
            });
        }
    }
    Ok(rows.into_iter().map(|(_, spec)| spec).collect())
}

pub fn load_catalog_file(path: impl AsRef<Path>) -> Result<Vec<ChipSpec>, CatalogError> {
    load_catalog(&std::fs::read_to_string(path)?)
}

pub fn bundled_catalog_text() -> &'static str {
    BUNDLED
}

/// The bundled catalog, parsed without the heat-density cross-check.
pub fn bundled_catalog() -> Vec<ChipSpec> {
    parse_catalog(BUNDLED).expect("bundled catalog parses")
}

pub fn serialize_catalog(specs: &[ChipSpec]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CATALOG_HEADER).expect("in-memory write");
    for s in specs {
        w.write_record([
            s.device_class.as_str().to_string(),
            s.company.clone(),
            s.product.clone(),
            s.node_nm.to_string(),
            s.power_w.to_string(),
            format!("{:.2}", s.package_cm2),
            format!("{:.2}", s.stated_heat_density),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 output")
}

fn parse_rows(text: &str) -> Result<Vec<(u64, ChipSpec)>, CatalogError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    // csv line numbers skip comment lines; count physical lines instead.
    let line_of = |pos: Option<&csv::Position>| {
        pos.map_or(1, |p| {
            let mut start = (p.byte() as usize).min(text.len());
            let mut line = text.as_bytes()[..start].iter().filter(|b| **b == b'\n').count() as u64 + 1;
            // The reported start may precede skipped comment or blank lines.
            while let Some(rest) = text.get(start..) {
                let trimmed = rest.trim_start_matches([' ', '\t']);
                if !(trimmed.starts_with('#') || trimmed.starts_with('\n') || trimmed.starts_with("\r\n")) {
                    break;
                }
                match rest.find('\n') {
                    Some(nl) => {
                        start += nl + 1;
                        line += 1;
                    }
                    None => break,
                }
            }
            line
        })
    };

    let header = reader.headers().map_err(|e| csv_error(&e, 1))?.clone();
    if header.iter().ne(CATALOG_HEADER.iter().copied()) {
        return Err(CatalogError::Parse {
            line: line_of(header.position()),
            column: "header".into(),
            message: format!("expected header {:?}", CATALOG_HEADER.join(",")),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = line_of(record.position());
        let field = |idx: usize| record.get(idx).unwrap_or_default();
        let bad = |idx: usize, message: String| CatalogError::Parse {
            line,
            column: CATALOG_HEADER[idx].to_string(),
            message,
        };
        let number = |idx: usize| -> Result<f64, CatalogError> {
            let raw = field(idx);
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(idx, format!("expected a number, found {raw:?}")))
        };

        let device_class = field(0).parse::<DeviceClass>().map_err(|m| bad(0, m))?;
        let product = field(2).to_string();
        if product.is_empty() {
            return Err(bad(2, "product name is empty".into()));
        }
        let node_nm = field(3)
            .parse::<u32>()
            .map_err(|_| bad(3, format!("expected a whole number of nm, found {:?}", field(3))))?;
        let power_w = number(4)?;
        if power_w <= 0.0 {
            return Err(bad(4, format!("power must be > 0, found {power_w}")));
        }
        let package_cm2 = number(5)?;
        if package_cm2 <= 0.0 {
            return Err(CatalogError::ZeroArea {
                line: Some(line),
                product,
            });
        }
        let stated_heat_density = number(6)?;

        rows.push((
            line,
            ChipSpec {
                device_class,
                company: field(1).to_string(),
                product,
                node_nm,
                power_w,
                package_cm2,
                stated_heat_density,
            },
        ));
    }
    Ok(rows)
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> CatalogError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    CatalogError::Parse {
        line,
        column: "-".into(),
        message: e.to_string(),
    }
}
