//! EEG recordings: domain types, the on-disk bundle format, event-centred
//! epoching and a synthetic generator with known band signatures.

mod bundle;
mod epoch;
mod synth;

pub use bundle::{read_bundle, write_bundle, HEADER_FILE, SAMPLES_FILE};
pub use epoch::{extract_epochs, Epoch, EpochSet};
pub use synth::{synth_recording, synth_with_signatures, SynthConfig, SynthSignature};

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Scalp electrode with head-centred 3D coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Electrode {
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Electrode {
    pub fn new(name: impl Into<String>, x: f64, y: f64, z: f64) -> Self {
        Electrode {
            name: name.into(),
            x,
            y,
            z,
        }
    }
}

/// A labelled event at a sample offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventMarker {
    pub sample_index: usize,
    /// Dense class id in `0..K`; the string form lives in [`Recording::label_names`].
    pub label: u32,
}

/// A multichannel recording.
///
/// Samples are kept as `f32` microvolts, channel-major, exactly as stored on
/// disk; math widens them when epochs are extracted.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub sample_rate_hz: f64,
    pub electrodes: Vec<Electrode>,
    pub num_samples: usize,
    /// `num_channels * num_samples` values; channel `c` occupies
    /// `c * num_samples .. (c + 1) * num_samples`.
    pub samples: Vec<f32>,
    /// Class names indexed by class id.
    pub label_names: Vec<String>,
    pub events: Vec<EventMarker>,
}

impl Recording {
    pub fn num_channels(&self) -> usize {
        self.electrodes.len()
    }

    pub fn num_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        &self.samples[c * self.num_samples..(c + 1) * self.num_samples]
    }

    /// Original label string of an event.
    pub fn label_name(&self, event: &EventMarker) -> Option<&str> {
        self.label_names.get(event.label as usize).map(String::as_str)
    }

    /// Checks every structural invariant of a recording.
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidRecording(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        let expected = self.electrodes.len() * self.num_samples;
        if self.samples.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: self.samples.len(),
            });
        }
        validate_montage(&self.electrodes)?;
        if let Some(pos) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                channel: pos / self.num_samples.max(1),
                index: pos % self.num_samples.max(1),
            });
        }
        let mut seen = HashSet::new();
        for name in &self.label_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidRecording(format!("duplicate label name {name:?}")));
            }
        }
        for ev in &self.events {
            if ev.sample_index >= self.num_samples {
                return Err(Error::EventOutOfRange {
                    index: ev.sample_index,
                    num_samples: self.num_samples,
                });
            }
            if ev.label as usize >= self.label_names.len() {
                return Err(Error::InvalidRecording(format!(
                    "event label {} has no entry in the label table",
                    ev.label
                )));
            }
        }
        Ok(())
    }
}

/// Names must be unique and nonempty, coordinates finite, and projected
/// `(x, y)` pairs pairwise distinct.
pub(crate) fn validate_montage(electrodes: &[Electrode]) -> Result<()> {
    let mut names = HashSet::new();
    let mut positions = std::collections::HashMap::new();
    for (i, e) in electrodes.iter().enumerate() {
        if e.name.is_empty() {
            return Err(Error::InvalidRecording(format!("electrode {i} has an empty name")));
        }
        if !names.insert(e.name.as_str()) {
            return Err(Error::InvalidRecording(format!("duplicate electrode name {:?}", e.name)));
        }
        if !(e.x.is_finite() && e.y.is_finite() && e.z.is_finite()) {
            return Err(Error::InvalidRecording(format!("electrode {:?} has non-finite coordinates", e.name)));
        }
        // +0.0 and -0.0 are the same position
        let key = ((e.x + 0.0).to_bits(), (e.y + 0.0).to_bits());
        if let Some(first) = positions.insert(key, i) {
            return Err(Error::DuplicatePosition { first, second: i });
        }
    }
    Ok(())
}
