//! On-disk formats: CSV spectra and trajectories, JSON documents.
//!
//! Boundary rule: files carry ordinary frequency in GHz and time in ns;
//! everything in memory is rad/s and seconds. Numbers are written with
//! Rust's shortest-round-trip formatting, so value columns survive a
//! write/read cycle bit for bit.
//!
//! Spectrum CSV columns: `probe_frequency_GHz,value[,real,imag]` — `value`
//! is |amplitude|² and the optional complex columns are present for
//! simulated spectra. Trajectory CSV columns: `time_ns` followed by
//! `re_<mode>,im_<mode>` per integrated mode. JSON documents carry a
//! `schema_version` field (currently 1).

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::fit::FitResult;
use crate::model::{Branch, Direction, DriveField, ModelError};
use crate::spectra::{FrequencyGrid, Provenance, SpectraError, Spectrum};
use crate::units::{ghz_to_rad_per_s, rad_per_s_to_ghz};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("file schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Grid(#[from] SpectraError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Write a spectrum as CSV. Complex columns are included when amplitudes are
/// available.
pub fn write_spectrum_csv<W: Write>(spectrum: &Spectrum, writer: W) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(writer);
    let with_amplitudes = spectrum.amplitudes.is_some();
    if with_amplitudes {
        out.write_record(["probe_frequency_GHz", "value", "real", "imag"])?;
    } else {
        out.write_record(["probe_frequency_GHz", "value"])?;
    }
    for i in 0..spectrum.len() {
        let freq = rad_per_s_to_ghz(spectrum.grid.value(i));
        match &spectrum.amplitudes {
            Some(amps) => out.write_record([
                freq.to_string(),
                spectrum.magnitudes[i].to_string(),
                amps[i].re.to_string(),
                amps[i].im.to_string(),
            ])?,
            None => out.write_record([freq.to_string(), spectrum.magnitudes[i].to_string()])?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Spectrum CSV as an in-memory string.
pub fn spectrum_csv_string(spectrum: &Spectrum) -> Result<String, IoError> {
    let mut buf = Vec::new();
    write_spectrum_csv(spectrum, &mut buf)?;
    String::from_utf8(buf).map_err(|e| IoError::Schema(e.to_string()))
}

/// Read a spectrum from CSV. The file carries no measurement metadata, so
/// the branch and probe direction must be supplied; the result is marked
/// [`Provenance::Loaded`] with no drive descriptor.
pub fn read_spectrum_csv<R: Read>(
    reader: R,
    branch: Branch,
    probe_direction: Direction,
) -> Result<Spectrum, IoError> {
    let mut csv_reader = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let freq_col = col("probe_frequency_GHz")
        .ok_or_else(|| IoError::Schema("missing column `probe_frequency_GHz`".into()))?;
    let value_col =
        col("value").ok_or_else(|| IoError::Schema("missing column `value`".into()))?;
    let complex_cols = match (col("real"), col("imag")) {
        (Some(r), Some(i)) => Some((r, i)),
        (None, None) => None,
        _ => {
            return Err(IoError::Schema(
                "columns `real` and `imag` must appear together".into(),
            ))
        }
    };

    let mut frequencies = Vec::new();
    let mut magnitudes = Vec::new();
    let mut amplitudes = complex_cols.map(|_| Vec::new());
    for (row, record) in csv_reader.records().enumerate() {
        let record = record?;
        let parse = |idx: usize| -> Result<f64, IoError> {
            record
                .get(idx)
                .ok_or_else(|| IoError::Schema(format!("row {}: missing field", row + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| IoError::Schema(format!("row {}: {e}", row + 2)))
        };
        frequencies.push(ghz_to_rad_per_s(parse(freq_col)?));
        let value = parse(value_col)?;
        magnitudes.push(value);
        if let (Some((r, i)), Some(amps)) = (complex_cols, amplitudes.as_mut()) {
            let amp = Complex64::new(parse(r)?, parse(i)?);
            if (amp.norm_sqr() - value).abs() > 1e-6 * value.abs().max(1e-12) {
                return Err(IoError::Schema(format!(
                    "row {}: value does not equal |real + i·imag|²",
                    row + 2
                )));
            }
            amps.push(amp);
        }
    }
    let grid = FrequencyGrid::from_values(&frequencies)?;
    Ok(Spectrum {
        grid,
        amplitudes,
        magnitudes,
        branch,
        probe_direction,
        drive: None,
        provenance: Provenance::Loaded,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct DriveDoc {
    power_mw: f64,
    frequency_ghz: f64,
    direction: Direction,
}

#[derive(Debug, Serialize, Deserialize)]
struct GridDoc {
    center_ghz: f64,
    span_ghz: f64,
    points: usize,
}

/// JSON document for a spectrum, with explicit units in the field names.
#[derive(Debug, Serialize, Deserialize)]
struct SpectrumDoc {
    schema_version: u32,
    kind: String,
    branch: Branch,
    probe_direction: Direction,
    provenance: Provenance,
    drive: Option<DriveDoc>,
    grid: GridDoc,
    value: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    real: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    imag: Option<Vec<f64>>,
}

/// Serialize a spectrum to pretty-printed JSON.
pub fn spectrum_json_string(spectrum: &Spectrum) -> Result<String, IoError> {
    let doc = SpectrumDoc {
        schema_version: SCHEMA_VERSION,
        kind: "spectrum".into(),
        branch: spectrum.branch,
        probe_direction: spectrum.probe_direction,
        provenance: spectrum.provenance,
        drive: spectrum.drive.map(|d| DriveDoc {
            power_mw: d.power * 1e3,
            frequency_ghz: rad_per_s_to_ghz(d.omega),
            direction: d.direction,
        }),
        grid: GridDoc {
            center_ghz: rad_per_s_to_ghz(spectrum.grid.center()),
            span_ghz: rad_per_s_to_ghz(spectrum.grid.span()),
            points: spectrum.grid.points(),
        },
        value: spectrum.magnitudes.clone(),
        real: spectrum
            .amplitudes
            .as_ref()
            .map(|a| a.iter().map(|z| z.re).collect()),
        imag: spectrum
            .amplitudes
            .as_ref()
            .map(|a| a.iter().map(|z| z.im).collect()),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Deserialize a spectrum from its JSON document.
pub fn spectrum_from_json(text: &str) -> Result<Spectrum, IoError> {
    let doc: SpectrumDoc = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(IoError::Schema(format!(
            "unsupported schema_version {}",
            doc.schema_version
        )));
    }
    if doc.kind != "spectrum" {
        return Err(IoError::Schema(format!("expected kind `spectrum`, got `{}`", doc.kind)));
    }
    let grid = FrequencyGrid::new(
        ghz_to_rad_per_s(doc.grid.center_ghz),
        ghz_to_rad_per_s(doc.grid.span_ghz),
        doc.grid.points,
    )?;
    if doc.value.len() != doc.grid.points {
        return Err(IoError::Schema(format!(
            "value array has {} entries for {} grid points",
            doc.value.len(),
            doc.grid.points
        )));
    }
    let amplitudes = match (doc.real, doc.imag) {
        (Some(re), Some(im)) => {
            if re.len() != doc.value.len() || im.len() != doc.value.len() {
                return Err(IoError::Schema("complex arrays have mismatched length".into()));
            }
            Some(
                re.into_iter()
                    .zip(im)
                    .map(|(r, i)| Complex64::new(r, i))
                    .collect(),
            )
        }
        (None, None) => None,
        _ => return Err(IoError::Schema("`real` and `imag` must appear together".into())),
    };
    let drive = doc
        .drive
        .map(|d| {
            DriveField::new(
                d.power_mw * 1e-3,
                ghz_to_rad_per_s(d.frequency_ghz),
                d.direction,
            )
        })
        .transpose()?;
    Ok(Spectrum {
        grid,
        amplitudes,
        magnitudes: doc.value,
        branch: doc.branch,
        probe_direction: doc.probe_direction,
        drive,
        provenance: doc.provenance,
    })
}

/// Write a trajectory as CSV: `time_ns` then `re_<mode>,im_<mode>` per mode.
pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, writer: W) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["time_ns".to_string()];
    for label in &trajectory.labels {
        header.push(format!("re_{label}"));
        header.push(format!("im_{label}"));
    }
    out.write_record(&header)?;
    for (i, &t) in trajectory.times.iter().enumerate() {
        let mut record = vec![(t * 1e9).to_string()];
        for series in &trajectory.series {
            record.push(series[i].re.to_string());
            record.push(series[i].im.to_string());
        }
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct FitResultDoc<'a> {
    schema_version: u32,
    kind: &'static str,
    /// Angular-frequency parameters (rates, centers) are in rad/s.
    units: &'static str,
    #[serde(flatten)]
    result: &'a FitResult,
}

/// Serialize a fit result to pretty-printed JSON with a schema header.
pub fn fit_result_json_string(result: &FitResult) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(&FitResultDoc {
        schema_version: SCHEMA_VERSION,
        kind: "fit_result",
        units: "rates and centers in rad/s; cooperativity, scale, efficiencies dimensionless",
        result,
    })?)
}
