use num_complex::Complex;

use super::dft::FftPlan;
use super::window::hann_window;
use crate::eeg_io::Epoch;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Power per nonnegative-frequency bin of a real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum<T> {
    pub freqs_hz: Vec<T>,
    pub power: Vec<T>,
    pub fs: T,
    /// Length of the time-domain signal.
    pub source_len: usize,
}

/// One-sided power of the transform of a real length-N signal.
///
/// `P[k] = |X[k]|²/N²` at DC and (for even N) Nyquist, twice that for the
/// interior bins, so `Σ P = mean(x²)`.
pub fn one_sided_power<T: Scalar>(spectrum: &[Complex<T>], fs: T) -> PowerSpectrum<T> {
    let n = spectrum.len();
    let bins = n / 2 + 1;
    let nn = T::of_usize(n) * T::of_usize(n);
    let two = T::of(2.0);
    let power = (0..bins.min(n))
        .map(|k| {
            let p = spectrum[k].norm_sqr() / nn;
            let edge = k == 0 || (n.is_multiple_of(2) && k == n / 2);
            if edge {
                p
            } else {
                two * p
            }
        })
        .collect();
    let freqs_hz = (0..bins.min(n))
        .map(|k| T::of_usize(k) * fs / T::of_usize(n))
        .collect();
    PowerSpectrum {
        freqs_hz,
        power,
        fs,
        source_len: n,
    }
}

/// Half-open frequency interval `[lo, hi)` in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn contains(&self, f: f64) -> bool {
        self.lo <= f && f < self.hi
    }
}

/// The three bands that become the image channels, in channel order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandDefinition {
    bands: [Band; 3],
}

impl Default for BandDefinition {
    /// theta [4, 8), alpha [8, 12), gamma [12, 40) Hz
    fn default() -> Self {
        BandDefinition {
            bands: [
                Band { name: "theta", lo: 4.0, hi: 8.0 },
                Band { name: "alpha", lo: 8.0, hi: 12.0 },
                Band { name: "gamma", lo: 12.0, hi: 40.0 },
            ],
        }
    }
}

impl BandDefinition {
    /// Bands must be nonempty, ascending and non-overlapping.
    pub fn new(bands: [Band; 3]) -> Result<Self> {
        for (i, b) in bands.iter().enumerate() {
            if !(b.lo.is_finite() && b.hi.is_finite() && 0.0 <= b.lo && b.lo < b.hi) {
                return Err(Error::InvalidConfig(format!("band {} is empty or invalid", b.name)));
            }
            if i > 0 && bands[i - 1].hi > b.lo {
                return Err(Error::InvalidConfig(format!(
                    "bands {} and {} overlap or are out of order",
                    bands[i - 1].name,
                    b.name
                )));
            }
        }
        Ok(BandDefinition { bands })
    }

    pub fn bands(&self) -> &[Band; 3] {
        &self.bands
    }

    pub fn max_hz(&self) -> f64 {
        self.bands[2].hi
    }
}

/// Arithmetic mean of the power over the bins of each band.
pub fn band_means<T: Scalar>(ps: &PowerSpectrum<T>, bands: &BandDefinition) -> Result<[T; 3]> {
    let fs = ps.fs.to_f64_lossy();
    if fs < 2.0 * bands.max_hz() {
        return Err(Error::SampleRateTooLow { fs, max_hz: bands.max_hz() });
    }
    let mut out = [T::zero(); 3];
    for (slot, band) in out.iter_mut().zip(bands.bands()) {
        let mut sum = T::zero();
        let mut count = 0usize;
        for (f, &p) in ps.freqs_hz.iter().zip(&ps.power) {
            if band.contains(f.to_f64_lossy()) {
                sum += p;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::EmptyBand { lo: band.lo, hi: band.hi });
        }
        *slot = sum / T::of_usize(count);
    }
    Ok(out)
}

/// Per-electrode (theta, alpha, gamma) mean power for one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPowerFrame<T> {
    /// One entry per electrode, in montage order.
    pub powers: Vec<[T; 3]>,
    pub label: u32,
}

impl<T: Scalar> BandPowerFrame<T> {
    /// Values of one band across electrodes.
    pub fn band(&self, b: usize) -> Vec<T> {
        self.powers.iter().map(|p| p[b]).collect()
    }

    pub fn scaled(&self, factor: T) -> Self {
        BandPowerFrame {
            powers: self.powers.iter().map(|p| p.map(|v| v * factor)).collect(),
            label: self.label,
        }
    }
}

/// Hann window spanning the whole epoch, transform, one-sided power and band
/// means, channel by channel.
pub fn epoch_band_powers<T: Scalar>(epoch: &Epoch<T>, bands: &BandDefinition) -> Result<BandPowerFrame<T>> {
    let fs = T::of(epoch.sample_rate_hz);
    if epoch.sample_rate_hz < 2.0 * bands.max_hz() {
        return Err(Error::SampleRateTooLow {
            fs: epoch.sample_rate_hz,
            max_hz: bands.max_hz(),
        });
    }
    let window = hann_window::<T>(epoch.len)?;
    let plan = FftPlan::new(epoch.len);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); epoch.len];
    let mut powers = Vec::with_capacity(epoch.num_channels);
    for c in 0..epoch.num_channels {
        for ((b, &x), &w) in buf.iter_mut().zip(epoch.channel(c)).zip(&window) {
            *b = Complex::new(x * w, T::zero());
        }
        plan.process(&mut buf);
        let ps = one_sided_power(&buf, fs);
        powers.push(band_means(&ps, bands)?);
    }
    Ok(BandPowerFrame {
        powers,
        label: epoch.label,
    })
}
