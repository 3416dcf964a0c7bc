//! EEG emotion-classification pipeline: event-centred epochs, Hann-windowed
//! band power, topographic images and a small convolutional classifier.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the double-precision types the pipeline runs on.

pub mod cnn;
pub mod eeg_io;
pub mod error;
pub mod scalar;
pub mod spectral;
pub mod topomap;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Working precision of the pipeline.
pub type Real = f64;

pub type Epoch = eeg_io::Epoch<Real>;
pub type PowerSpectrum = spectral::PowerSpectrum<Real>;
pub type BandPowerFrame = spectral::BandPowerFrame<Real>;
pub type FftPlan = spectral::FftPlan<Real>;
pub type Montage2D = topomap::Montage2D<Real>;
pub type RenderPlan = topomap::RenderPlan<Real>;
pub type TopoImage = topomap::TopoImage<Real>;
pub type Tensor = cnn::Tensor<Real>;
pub type Model = cnn::Model<Real>;
pub type Dataset = cnn::Dataset<Real>;
