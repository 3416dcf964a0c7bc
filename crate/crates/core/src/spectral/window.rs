use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hann,
}

/// A tapering window of `length` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub length: usize,
}

impl WindowSpec {
    pub fn hann(length: usize) -> Result<Self> {
        if length < 2 {
            return Err(Error::WindowTooShort(length));
        }
        Ok(WindowSpec {
            kind: WindowKind::Hann,
            length,
        })
    }

    pub fn coefficients<T: Scalar>(&self) -> Vec<T> {
        match self.kind {
            WindowKind::Hann => hann_window(self.length).expect("length checked at construction"),
        }
    }
}

/// Symmetric Hann window `0.5 (1 - cos(2πn / (a - 1)))`.
///
/// Evaluated as `0.5 + 0.5 cos(π m / (a - 1))` with `m = 2n - (a - 1)` and
/// mirrored, so both endpoints are exactly 0, the window is exactly
/// symmetric and an odd-length window peaks at exactly 1.
pub fn hann_window<T: Scalar>(length: usize) -> Result<Vec<T>> {
    if length < 2 {
        return Err(Error::WindowTooShort(length));
    }
    let denom = T::of_usize(length - 1);
    let half = T::of(0.5);
    let mut w = vec![T::zero(); length];
    for n in 0..length.div_ceil(2) {
        let m = T::of_usize(length - 1 - 2 * n);
        let v = half + half * (T::PI() * m / denom).cos();
        w[n] = v;
        w[length - 1 - n] = v;
    }
    Ok(w)
}

/// Elementwise product of a signal with a window.
pub fn apply_window<T: Scalar>(signal: &[T], window: &[T]) -> Result<Vec<T>> {
    if signal.len() != window.len() {
        return Err(Error::LengthMismatch {
            expected: window.len(),
            actual: signal.len(),
        });
    }
    Ok(signal.iter().zip(window).map(|(&s, &w)| s * w).collect())
}
