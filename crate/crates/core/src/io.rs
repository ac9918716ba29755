//! File formats.
//!
//! Channel files are JSON:
//!
//! ```json
//! { "n": 2, "k": 3, "entries": [[[1,0],[0,0],[1,0]], [[0,0],[1,0],[1,0]]] }
//! ```
//!
//! `entries` is row-major (one array per antenna, one `[re, im]` pair per
//! user). Boundary and region samples are written as CSV with a header row.

use std::io::{Read, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySample;
use crate::error::{Error, Result};
use crate::model::ChannelSet;
use crate::region::RegionSampleSet;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub n: usize,
    pub k: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl ChannelFile {
    pub fn from_channel_set<T: Real>(h: &ChannelSet<T>) -> Self {
        Self {
            n: h.antennas(),
            k: h.users(),
            entries: (0..h.antennas())
                .map(|i| {
                    (0..h.users())
                        .map(|k| {
                            let v = h.column(k)[i];
                            [v.re.as_f64(), v.im.as_f64()]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_channel_set<T: Real>(&self) -> Result<ChannelSet<T>> {
        if self.entries.len() != self.n {
            return Err(Error::Format(format!(
                "declared n = {} but found {} rows",
                self.n,
                self.entries.len()
            )));
        }
        if let Some(i) = self.entries.iter().position(|r| r.len() != self.k) {
            return Err(Error::Format(format!(
                "row {i} has {} entries, declared k = {}",
                self.entries[i].len(),
                self.k
            )));
        }
        ChannelSet::from_columns(
            (0..self.k)
                .map(|k| {
                    self.entries
                        .iter()
                        .map(|row| Complex::new(T::lit(row[k][0]), T::lit(row[k][1])))
                        .collect()
                })
                .collect(),
        )
    }
}

pub fn parse_channel_json<T: Real>(text: &str) -> Result<ChannelSet<T>> {
    serde_json::from_str::<ChannelFile>(text)?.to_channel_set()
}

pub fn read_channel_json<T: Real>(mut reader: impl Read) -> Result<ChannelSet<T>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_channel_json(&text)
}

pub fn channel_to_json<T: Real>(h: &ChannelSet<T>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ChannelFile::from_channel_set(h))?)
}

pub const BOUNDARY_CSV_HEADER: [&str; 10] = [
    "p",
    "eps1",
    "eps2",
    "deps1",
    "deps2",
    "ddeps1",
    "ddeps2",
    "discriminant",
    "g_prime",
    "g_double_prime",
];

/// Interior-only columns are left empty at the endpoints.
pub fn write_boundary_csv<T: Real>(writer: impl Write, samples: &[BoundarySample<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(BOUNDARY_CSV_HEADER)?;
    for s in samples {
        let mut row = vec![s.p.to_string(), s.eps1.to_string(), s.eps2.to_string()];
        match &s.derivatives {
            Some(d) => row.extend(
                [
                    d.deps1,
                    d.deps2,
                    d.ddeps1,
                    d.ddeps2,
                    d.discriminant,
                    d.g_prime,
                    d.g_double_prime,
                ]
                .iter()
                .map(|v| v.to_string()),
            ),
            None => row.extend(std::iter::repeat_n(String::new(), 7)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `p_1..p_K, eps_1..eps_K`.
pub fn write_region_csv<T: Real>(writer: impl Write, set: &RegionSampleSet<T>) -> Result<()> {
    let users = set.points.first().map_or(0, |p| p.powers.len());
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<String> = (1..=users)
        .map(|k| format!("p_{k}"))
        .chain((1..=users).map(|k| format!("eps_{k}")))
        .collect();
    w.write_record(&header)?;
    for point in &set.points {
        let row: Vec<String> = point
            .powers
            .as_slice()
            .iter()
            .chain(point.mse.as_slice())
            .map(|v| v.to_string())
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a region CSV back as `(powers, mse)` rows.
pub fn read_region_csv(reader: impl Read) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let mut r = csv::Reader::from_reader(reader);
    let width = r.headers()?.len();
    if width % 2 != 0 || width == 0 {
        return Err(Error::Format(format!("region CSV has {width} columns")));
    }
    let users = width / 2;
    let mut rows = Vec::new();
    for record in r.records() {
        let values = record?
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Format(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push((values[..users].to_vec(), values[users..].to_vec()));
    }
    Ok(rows)
}
