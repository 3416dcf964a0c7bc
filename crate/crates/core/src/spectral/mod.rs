//! Windowing, discrete Fourier transforms, one-sided power spectra and
//! per-electrode band power.

mod bands;
mod dft;
mod window;

pub use bands::{band_means, epoch_band_powers, one_sided_power, Band, BandDefinition, BandPowerFrame, PowerSpectrum};
pub use dft::{dft_naive, fft, FftPlan};
pub use num_complex::Complex;
pub use window::{apply_window, hann_window, WindowKind, WindowSpec};
