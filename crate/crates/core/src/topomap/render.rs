use super::clough_tocher::CloughTocher;
use super::montage::Montage2D;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::BandPowerFrame;

pub const DEFAULT_IMAGE_SIZE: usize = 32;

/// Square pixel grid over the montage: the bounding box of the projected
/// electrodes, widened by 5% of its longer side on every edge and padded to
/// a square. Row 0 is the top (largest y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridFrame<T> {
    pub size: usize,
    pub left: T,
    pub top: T,
    pub step: T,
}

impl<T: Scalar> GridFrame<T> {
    pub fn for_montage(m: &Montage2D<T>, size: usize) -> Self {
        let (lo, hi) = m.bounds();
        let half = T::of(0.5);
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let side = extent * T::of(1.1);
        let cx = (lo[0] + hi[0]) * half;
        let cy = (lo[1] + hi[1]) * half;
        GridFrame {
            size,
            left: cx - side * half,
            top: cy + side * half,
            step: side / T::of_usize(size),
        }
    }

    /// Centre of pixel `(row, col)`.
    pub fn pixel_center(&self, row: usize, col: usize) -> [T; 2] {
        let half = T::of(0.5);
        [
            self.left + (T::of_usize(col) + half) * self.step,
            self.top - (T::of_usize(row) + half) * self.step,
        ]
    }
}

/// Pixel-to-triangle lookup for one montage and grid, shared by every frame
/// rendered on that montage.
#[derive(Debug, Clone)]
pub struct RenderPlan<T> {
    pub montage: Montage2D<T>,
    pub frame: GridFrame<T>,
    /// Containing triangle and barycentric coordinates per pixel, row-major;
    /// `None` outside the convex hull.
    cells: Vec<Option<(usize, [T; 3])>>,
}

impl<T: Scalar> RenderPlan<T> {
    pub fn new(montage: Montage2D<T>, size: usize) -> Self {
        let frame = GridFrame::for_montage(&montage, size);
        let cells = (0..size * size)
            .map(|i| montage.locate(frame.pixel_center(i / size, i % size)))
            .collect();
        RenderPlan { montage, frame, cells }
    }

    pub fn size(&self) -> usize {
        self.frame.size
    }

    pub fn is_inside(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.frame.size + col].is_some()
    }

    /// Interpolates one value per electrode onto the grid.
    pub fn interpolate(&self, values: &[T]) -> Result<ScalarField<T>> {
        let ct = CloughTocher::new(&self.montage, values)?;
        let values = self
            .cells
            .iter()
            .map(|cell| cell.map(|(t, b)| ct.eval_in(t, b)))
            .collect();
        Ok(ScalarField {
            size: self.frame.size,
            values,
        })
    }

    /// Renders a band-power frame into a normalised three-channel image.
    pub fn render(&self, frame: &BandPowerFrame<T>) -> Result<TopoImage<T>> {
        if frame.powers.len() != self.montage.len() {
            return Err(Error::ShapeMismatch(format!(
                "frame has {} electrodes, montage has {}",
                frame.powers.len(),
                self.montage.len()
            )));
        }
        let size = self.frame.size;
        let mut pixels = vec![T::zero(); size * size * 3];
        for band in 0..3 {
            let field = self.interpolate(&frame.band(band))?;
            for (i, v) in field.normalized().into_iter().enumerate() {
                pixels[i * 3 + band] = v;
            }
        }
        Ok(TopoImage {
            size,
            pixels,
            label: frame.label,
        })
    }
}

/// Interpolated values on a square grid; `None` outside the hull.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    pub size: usize,
    pub values: Vec<Option<T>>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn get(&self, row: usize, col: usize) -> Option<T> {
        self.values[row * self.size + col]
    }

    /// Values with out-of-hull pixels set to zero.
    pub fn filled(&self) -> Vec<T> {
        self.values.iter().map(|v| v.unwrap_or_else(T::zero)).collect()
    }

    /// Min-max normalisation over in-hull pixels into `[0, 1]`.
    ///
    /// A field whose range is zero up to rounding (relative 1e-12) maps to
    /// 0.5; out-of-hull pixels stay 0.
    pub fn normalized(&self) -> Vec<T> {
        let inside = self.values.iter().flatten();
        let lo = inside.clone().fold(T::infinity(), |a, &b| a.min(b));
        let hi = inside.fold(T::neg_infinity(), |a, &b| a.max(b));
        let range = hi - lo;
        let flat = !(range > T::of(1e-12) * lo.abs().max(hi.abs()));
        self.values
            .iter()
            .map(|v| match v {
                None => T::zero(),
                Some(_) if flat => T::of(0.5),
                Some(v) => ((*v - lo) / range).max(T::zero()).min(T::one()),
            })
            .collect()
    }
}

/// `size × size × 3` image, channels (theta, alpha, gamma), row-major with
/// the channel index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TopoImage<T> {
    pub size: usize,
    pub pixels: Vec<T>,
    pub label: u32,
}

impl<T: Scalar> TopoImage<T> {
    pub fn get(&self, row: usize, col: usize, channel: usize) -> T {
        self.pixels[(row * self.size + col) * 3 + channel]
    }
}

/// Interpolates per-electrode values onto a fresh `size × size` grid.
pub fn interpolate_grid<T: Scalar>(m: &Montage2D<T>, values: &[T], size: usize) -> Result<ScalarField<T>> {
    RenderPlan::new(m.clone(), size).interpolate(values)
}

/// Renders one frame on a `size × size` grid.
pub fn render_image<T: Scalar>(m: &Montage2D<T>, frame: &BandPowerFrame<T>, size: usize) -> Result<TopoImage<T>> {
    RenderPlan::new(m.clone(), size).render(frame)
}
