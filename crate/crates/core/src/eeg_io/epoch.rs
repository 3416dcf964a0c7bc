use super::{EventMarker, Recording};
use crate::scalar::Scalar;

/// One event-centred slice of a recording, channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch<T> {
    pub num_channels: usize,
    pub len: usize,
    /// `num_channels * len` values, channel `c` at `c * len .. (c + 1) * len`.
    pub data: Vec<T>,
    pub label: u32,
    pub source_event: EventMarker,
    /// Position of the source event in the recording's event list.
    pub event_index: usize,
    pub sample_rate_hz: f64,
}

impl<T: Scalar> Epoch<T> {
    pub fn channel(&self, c: usize) -> &[T] {
        &self.data[c * self.len..(c + 1) * self.len]
    }
}

/// Result of epoching a recording.
#[derive(Debug, Clone)]
pub struct EpochSet<T> {
    pub epochs: Vec<Epoch<T>>,
    /// Events whose window did not fit inside the recording.
    pub skipped: usize,
}

/// Number of samples in an epoch of `epoch_seconds` at `fs`.
pub fn epoch_len(epoch_seconds: f64, fs: f64) -> usize {
    (epoch_seconds * fs).round() as usize
}

/// Cuts one raw epoch per event over `[c - L/2, c - L/2 + L)`.
///
/// Events whose window crosses either end of the recording are skipped and
/// counted. Event order is preserved. A non-positive duration yields no
/// epochs and skips every event.
pub fn extract_epochs<T: Scalar>(rec: &Recording, epoch_seconds: f64) -> EpochSet<T> {
    let len = if epoch_seconds > 0.0 {
        epoch_len(epoch_seconds, rec.sample_rate_hz)
    } else {
        0
    };
    if len == 0 {
        return EpochSet {
            epochs: Vec::new(),
            skipped: rec.events.len(),
        };
    }
    let half = len / 2;
    let mut epochs = Vec::new();
    let mut skipped = 0;
    for (event_index, ev) in rec.events.iter().enumerate() {
        let c = ev.sample_index;
        if c < half || c - half + len > rec.num_samples {
            skipped += 1;
            continue;
        }
        let start = c - half;
        let mut data = Vec::with_capacity(rec.num_channels() * len);
        for ch in 0..rec.num_channels() {
            let src = &rec.channel(ch)[start..start + len];
            data.extend(src.iter().map(|&v| T::of(v as f64)));
        }
        epochs.push(Epoch {
            num_channels: rec.num_channels(),
            len,
            data,
            label: ev.label,
            source_event: *ev,
            event_index,
            sample_rate_hz: rec.sample_rate_hz,
        });
    }
    EpochSet { epochs, skipped }
}
