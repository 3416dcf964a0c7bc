use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Electrode, EventMarker, Recording};
use crate::error::{Error, Result};
use crate::spectral::BandDefinition;

const SIGNATURE_STREAM: u64 = 1;
const LAYOUT_STREAM: u64 = 2;
const NOISE_STREAM: u64 = 3;

/// Parameters of a synthetic recording.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub num_classes: usize,
    pub events_per_class: usize,
    pub sample_rate_hz: f64,
    pub montage_size: usize,
    pub seed: u64,
    /// Length of the class-specific segment centred on each event.
    pub segment_seconds: f64,
    /// Peak amplitude of a tone at an electrode with weight 1.
    pub tone_amplitude_uv: f64,
    /// Standard deviation of the white background noise.
    pub noise_std_uv: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_classes: 15,
            events_per_class: 10,
            sample_rate_hz: 128.0,
            montage_size: 32,
            seed: 0,
            segment_seconds: 20.0,
            tone_amplitude_uv: 10.0,
            noise_std_uv: 2.0,
        }
    }
}

/// Spatial-spectral fingerprint of one class: a tone per band and the
/// per-electrode gain applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSignature {
    /// Tone frequency for theta, alpha, gamma.
    pub tone_hz: [f64; 3],
    /// Electrode gains per band, each in `[0, 1]`.
    pub weights: [Vec<f64>; 3],
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::InvalidConfig(format!(
                "num_classes must be at least 2, got {}",
                self.num_classes
            )));
        }
        if self.montage_size < 8 {
            return Err(Error::InvalidConfig(format!(
                "montage_size must be at least 8, got {}",
                self.montage_size
            )));
        }
        if self.events_per_class == 0 {
            return Err(Error::InvalidConfig("events_per_class must be positive".into()));
        }
        let bands = BandDefinition::default();
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz >= 2.0 * bands.max_hz()) {
            return Err(Error::InvalidConfig(format!(
                "sample_rate_hz must be at least {} Hz, got {}",
                2.0 * bands.max_hz(),
                self.sample_rate_hz
            )));
        }
        if !(self.segment_seconds.is_finite() && self.segment_seconds > 0.0) {
            return Err(Error::InvalidConfig("segment_seconds must be positive".into()));
        }
        if !(self.tone_amplitude_uv >= 0.0 && self.noise_std_uv >= 0.0) {
            return Err(Error::InvalidConfig("amplitudes must be nonnegative".into()));
        }
        Ok(())
    }

    /// Electrodes on a sunflower lattice over the upper hemisphere of the
    /// unit sphere; projected positions are distinct by construction.
    pub fn montage(&self) -> Vec<Electrode> {
        let n = self.montage_size;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|i| {
                let r = 0.9 * ((i as f64 + 0.5) / n as f64).sqrt();
                let theta = i as f64 * golden;
                let (x, y) = (r * theta.cos(), r * theta.sin());
                Electrode::new(format!("E{:03}", i + 1), x, y, (1.0 - r * r).sqrt())
            })
            .collect()
    }

    /// Class fingerprints derived from the seed.
    ///
    /// Class `k`, band `b` gets a Gaussian hotspot at angle
    /// `2π(k + b/3)/K` on a ring of radius 0.45, normalised so the strongest
    /// electrode has weight exactly 1.
    pub fn signatures(&self) -> Vec<SynthSignature> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(SIGNATURE_STREAM);
        let montage = self.montage();
        let bands = BandDefinition::default();
        let k_total = self.num_classes as f64;
        let sigma2 = 2.0 * 0.3f64.powi(2);
        (0..self.num_classes)
            .map(|k| {
                let mut tone_hz = [0.0; 3];
                for (b, band) in bands.bands().iter().enumerate() {
                    tone_hz[b] = rng.gen_range(band.lo + 0.5..band.hi - 0.5);
                }
                let weights = std::array::from_fn(|b| {
                    let angle = std::f64::consts::TAU * (k as f64 + b as f64 / 3.0) / k_total;
                    let (cx, cy) = (0.45 * angle.cos(), 0.45 * angle.sin());
                    let raw: Vec<f64> = montage
                        .iter()
                        .map(|e| (-((e.x - cx).powi(2) + (e.y - cy).powi(2)) / sigma2).exp())
                        .collect();
                    let peak = raw.iter().cloned().fold(0.0, f64::max);
                    raw.into_iter().map(|w| w / peak).collect()
                });
                SynthSignature { tone_hz, weights }
            })
            .collect()
    }
}

/// Generates a recording from the seed-derived class signatures.
pub fn synth_recording(config: &SynthConfig) -> Result<Recording> {
    config.validate()?;
    synth_with_signatures(config, &config.signatures())
}

/// Generates a recording using caller-supplied class signatures.
///
/// Each event owns one `segment_seconds` block centred on its marker. Inside
/// the block every electrode carries the class tones scaled by its weights,
/// with a per-event phase and a ±20% amplitude jitter per band, plus white
/// noise everywhere. One second of noise pads both ends.
pub fn synth_with_signatures(config: &SynthConfig, signatures: &[SynthSignature]) -> Result<Recording> {
    config.validate()?;
    if signatures.len() != config.num_classes {
        return Err(Error::InvalidConfig(format!(
            "expected {} signatures, got {}",
            config.num_classes,
            signatures.len()
        )));
    }
    let montage = config.montage();
    let channels = montage.len();
    if signatures.iter().any(|s| s.weights.iter().any(|w| w.len() != channels)) {
        return Err(Error::InvalidConfig("signature weights must cover every electrode".into()));
    }

    let fs = config.sample_rate_hz;
    let seg = (config.segment_seconds * fs).round() as usize;
    let pad = fs.round() as usize;
    let num_events = config.num_classes * config.events_per_class;
    let num_samples = 2 * pad + num_events * seg;

    let mut layout_rng = ChaCha8Rng::seed_from_u64(config.seed);
    layout_rng.set_stream(LAYOUT_STREAM);
    let mut labels: Vec<u32> = (0..config.num_classes as u32)
        .flat_map(|k| std::iter::repeat_n(k, config.events_per_class))
        .collect();
    labels.shuffle(&mut layout_rng);

    let mut noise_rng = ChaCha8Rng::seed_from_u64(config.seed);
    noise_rng.set_stream(NOISE_STREAM);
    let noise = Normal::new(0.0, config.noise_std_uv).expect("finite std");
    let mut samples = vec![0.0f64; channels * num_samples];
    for v in samples.iter_mut() {
        *v = noise.sample(&mut noise_rng);
    }

    let mut events = Vec::with_capacity(num_events);
    for (j, &label) in labels.iter().enumerate() {
        let start = pad + j * seg;
        events.push(EventMarker {
            sample_index: start + seg / 2,
            label,
        });
        let sig = &signatures[label as usize];
        let phase: [f64; 3] = std::array::from_fn(|_| layout_rng.gen_range(0.0..std::f64::consts::TAU));
        let gain: [f64; 3] = std::array::from_fn(|_| layout_rng.gen_range(0.8..1.2));
        for t in 0..seg {
            let time = t as f64 / fs;
            let tones: [f64; 3] = std::array::from_fn(|b| {
                config.tone_amplitude_uv
                    * gain[b]
                    * (std::f64::consts::TAU * sig.tone_hz[b] * time + phase[b]).sin()
            });
            for c in 0..channels {
                let v = sig.weights[0][c] * tones[0] + sig.weights[1][c] * tones[1] + sig.weights[2][c] * tones[2];
                samples[c * num_samples + start + t] += v;
            }
        }
    }

    let rec = Recording {
        sample_rate_hz: fs,
        electrodes: montage,
        num_samples,
        samples: samples.into_iter().map(|v| v as f32).collect(),
        label_names: (0..config.num_classes).map(|k| format!("emotion_{k:02}")).collect(),
        events,
    };
    rec.validate()?;
    Ok(rec)
}
