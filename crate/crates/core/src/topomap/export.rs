use std::fs;
use std::io::BufWriter;
use std::path::Path;

use super::render::TopoImage;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const TENSOR_MAGIC: &[u8; 4] = b"TEN1";
pub const LABEL_MAGIC: &[u8; 4] = b"LBL1";

/// Dense row-major `f32` tensor as stored in a TEN1 file.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorData {
    pub dims: Vec<usize>,
    pub data: Vec<f32>,
}

impl TensorData {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        let expected = dims.iter().product::<usize>();
        if expected != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "dims {dims:?} need {expected} values, got {}",
                data.len()
            )));
        }
        Ok(TensorData { dims, data })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 4 * self.dims.len() + 4 * self.data.len());
        out.extend_from_slice(TENSOR_MAGIC);
        out.extend_from_slice(&(self.dims.len() as u32).to_le_bytes());
        for &d in &self.dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, Error::CorruptTensor);
        if r.take(4)? != TENSOR_MAGIC {
            return Err(Error::CorruptTensor("bad magic".into()));
        }
        let ndim = r.u32()? as usize;
        let dims = (0..ndim).map(|_| r.u32().map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
        let count = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::CorruptTensor("dimension product overflows".into()))?;
        if r.remaining() != count.saturating_mul(4) {
            return Err(Error::CorruptTensor(format!(
                "payload is {} bytes, dims {dims:?} need {}",
                r.remaining(),
                count.saturating_mul(4)
            )));
        }
        let data = r
            .rest()
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        Ok(TensorData { dims, data })
    }
}

pub fn write_ten1(path: impl AsRef<Path>, tensor: &TensorData) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, tensor.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_ten1(path: impl AsRef<Path>) -> Result<TensorData> {
    let path = path.as_ref();
    TensorData::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_lbl1(path: impl AsRef<Path>, labels: &[u32]) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(8 + 4 * labels.len());
    out.extend_from_slice(LABEL_MAGIC);
    out.extend_from_slice(&(labels.len() as u32).to_le_bytes());
    for l in labels {
        out.extend_from_slice(&l.to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_lbl1(path: impl AsRef<Path>) -> Result<Vec<u32>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut r = Reader::new(&bytes, Error::CorruptTensor);
    if r.take(4)? != LABEL_MAGIC {
        return Err(Error::CorruptTensor("bad label magic".into()));
    }
    let count = r.u32()? as usize;
    if r.remaining() != count * 4 {
        return Err(Error::CorruptTensor(format!(
            "label file declares {count} labels but holds {} bytes",
            r.remaining()
        )));
    }
    (0..count).map(|_| r.u32()).collect()
}

/// Writes images as one `[N, H, W, 3]` TEN1 tensor plus an LBL1 label file.
pub fn export_tensor<T: Scalar>(
    images: &[TopoImage<T>],
    data_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<()> {
    let first = images
        .first()
        .ok_or_else(|| Error::ShapeMismatch("no images to export".into()))?;
    let size = first.size;
    if let Some(bad) = images.iter().find(|im| im.size != size || im.pixels.len() != size * size * 3) {
        return Err(Error::ShapeMismatch(format!(
            "mixed image shapes: {size}x{size} and {}x{}",
            bad.size, bad.size
        )));
    }
    let data = images
        .iter()
        .flat_map(|im| im.pixels.iter().map(|v| v.to_f32().unwrap_or(f32::NAN)))
        .collect();
    let tensor = TensorData::new(vec![images.len(), size, size, 3], data)?;
    write_ten1(data_path, &tensor)?;
    let labels: Vec<u32> = images.iter().map(|im| im.label).collect();
    write_lbl1(labels_path, &labels)
}

/// Reads an image set written by [`export_tensor`].
pub fn import_tensor(data_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Vec<TopoImage<f32>>> {
    let tensor = read_ten1(data_path)?;
    let labels = read_lbl1(labels_path)?;
    let [n, h, w, c] = tensor.dims[..] else {
        return Err(Error::ShapeMismatch(format!("expected [N, H, W, 3], got {:?}", tensor.dims)));
    };
    if h != w || c != 3 {
        return Err(Error::ShapeMismatch(format!("expected [N, S, S, 3], got {:?}", tensor.dims)));
    }
    if labels.len() != n {
        return Err(Error::ShapeMismatch(format!("{n} images but {} labels", labels.len())));
    }
    let per = h * w * c;
    Ok(labels
        .iter()
        .enumerate()
        .map(|(i, &label)| TopoImage {
            size: h,
            pixels: tensor.data[i * per..(i + 1) * per].to_vec(),
            label,
        })
        .collect())
}

/// 8-bit value of a unit-range pixel, rounding halves up.
pub fn pixel_byte<T: Scalar>(v: T) -> u8 {
    let scaled = (v.to_f64_lossy() * 255.0 + 0.5).floor();
    scaled.clamp(0.0, 255.0) as u8
}

/// Writes an RGB PNG with R = theta, G = alpha, B = gamma.
pub fn export_png<T: Scalar>(img: &TopoImage<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.size as u32, img.size as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let bytes: Vec<u8> = img.pixels.iter().map(|&v| pixel_byte(v)).collect();
    let mut writer = encoder.write_header().map_err(|e| Error::Png(e.to_string()))?;
    writer.write_image_data(&bytes).map_err(|e| Error::Png(e.to_string()))?;
    writer.finish().map_err(|e| Error::Png(e.to_string()))
}

/// Little-endian cursor that reports truncation through a caller-chosen
/// error variant.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    err: fn(String) -> Error,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8], err: fn(String) -> Error) -> Self {
        Reader { bytes, pos: 0, err }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err((self.err)(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub(crate) fn rest(&mut self) -> &'a [u8] {
        let s = &self.bytes[self.pos..];
        self.pos = self.bytes.len();
        s
    }
}
