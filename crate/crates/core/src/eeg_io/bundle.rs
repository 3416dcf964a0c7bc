use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Electrode, EventMarker, Recording};
use crate::error::{Error, Result};

pub const HEADER_FILE: &str = "header.json";
pub const SAMPLES_FILE: &str = "samples.f32";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    sample_rate_hz: f64,
    channels: Vec<ChannelEntry>,
    num_samples: usize,
    label_table: BTreeMap<String, u32>,
    events: Vec<EventEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ChannelEntry {
    name: String,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EventEntry {
    sample_index: usize,
    label: u32,
}

/// Reads a recording bundle directory (`header.json` + `samples.f32`).
pub fn read_bundle(dir: impl AsRef<Path>) -> Result<Recording> {
    let dir = dir.as_ref();
    let header_path = dir.join(HEADER_FILE);
    let text = fs::read_to_string(&header_path).map_err(|e| Error::io(&header_path, e))?;
    let header: Header =
        serde_json::from_str(&text).map_err(|e| Error::MalformedHeader(e.to_string()))?;

    let label_names = label_names_from_table(&header.label_table)?;
    let electrodes: Vec<Electrode> = header
        .channels
        .into_iter()
        .map(|c| Electrode::new(c.name, c.x, c.y, c.z))
        .collect();

    let samples_path = dir.join(SAMPLES_FILE);
    let bytes = fs::read(&samples_path).map_err(|e| Error::io(&samples_path, e))?;
    let expected = (electrodes.len() as u64) * (header.num_samples as u64) * 4;
    if bytes.len() as u64 != expected {
        return Err(Error::SampleCountMismatch {
            expected,
            actual: bytes.len() as u64,
        });
    }
    let samples: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();

    let rec = Recording {
        sample_rate_hz: header.sample_rate_hz,
        electrodes,
        num_samples: header.num_samples,
        samples,
        label_names,
        events: header
            .events
            .into_iter()
            .map(|e| EventMarker {
                sample_index: e.sample_index,
                label: e.label,
            })
            .collect(),
    };
    rec.validate()?;
    Ok(rec)
}

/// Writes a recording as a bundle directory, creating it if needed.
///
/// The recording is validated first, so nothing is written for invalid input.
pub fn write_bundle(rec: &Recording, dir: impl AsRef<Path>) -> Result<()> {
    rec.validate()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let header = Header {
        sample_rate_hz: rec.sample_rate_hz,
        channels: rec
            .electrodes
            .iter()
            .map(|e| ChannelEntry {
                name: e.name.clone(),
                x: e.x,
                y: e.y,
                z: e.z,
            })
            .collect(),
        num_samples: rec.num_samples,
        label_table: rec
            .label_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect(),
        events: rec
            .events
            .iter()
            .map(|e| EventEntry {
                sample_index: e.sample_index,
                label: e.label,
            })
            .collect(),
    };
    let header_path = dir.join(HEADER_FILE);
    let json = serde_json::to_string_pretty(&header).expect("header serializes");
    fs::write(&header_path, json).map_err(|e| Error::io(&header_path, e))?;

    let samples_path = dir.join(SAMPLES_FILE);
    let file = fs::File::create(&samples_path).map_err(|e| Error::io(&samples_path, e))?;
    let mut w = BufWriter::new(file);
    for v in &rec.samples {
        w.write_all(&v.to_le_bytes())
            .map_err(|e| Error::io(&samples_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&samples_path, e))?;
    Ok(())
}

/// Inverts the string -> id table; ids must be exactly `0..K`.
fn label_names_from_table(table: &BTreeMap<String, u32>) -> Result<Vec<String>> {
    let mut names = vec![None; table.len()];
    for (name, &id) in table {
        let slot = names.get_mut(id as usize).ok_or_else(|| {
            Error::MalformedHeader(format!("label id {id} is not dense in 0..{}", table.len()))
        })?;
        if slot.is_some() {
            return Err(Error::MalformedHeader(format!("label id {id} assigned twice")));
        }
        *slot = Some(name.clone());
    }
    Ok(names.into_iter().map(|n| n.expect("filled")).collect())
}
