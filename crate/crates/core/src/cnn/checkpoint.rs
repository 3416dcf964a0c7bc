//! Checkpoint layout: `"CKPT"`, a little-endian u32 manifest length, a JSON
//! manifest, then every tensor as row-major little-endian f64.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{Model, ModelConfig, Param};
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topomap::Reader;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"CKPT";
pub const CHECKPOINT_VERSION: u32 = 1;
/// Prefix of the tensor names that hold RMSprop accumulators.
const ACCUM_PREFIX: &str = "rms.";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    version: u32,
    model_config: ModelConfig,
    tensors: BTreeMap<String, TensorEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorEntry {
    dims: Vec<usize>,
    /// Byte offset into the payload.
    offset: usize,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptCheckpoint(msg.into())
}

pub fn checkpoint_bytes<T: Scalar>(model: &Model<T>) -> Vec<u8> {
    let mut tensors = BTreeMap::new();
    let mut payload = Vec::new();
    let mut push = |name: String, t: &Tensor<T>| {
        tensors.insert(
            name,
            TensorEntry {
                dims: t.dims().to_vec(),
                offset: payload.len(),
            },
        );
        for v in t.data() {
            payload.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
    };
    for p in &model.params {
        push(p.name.clone(), &p.value);
        push(format!("{ACCUM_PREFIX}{}", p.name), &p.accum);
    }
    let manifest = serde_json::to_vec(&Manifest {
        version: CHECKPOINT_VERSION,
        model_config: model.config.clone(),
        tensors,
    })
    .expect("manifest serializes");
    let mut out = Vec::with_capacity(8 + manifest.len() + payload.len());
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&(manifest.len() as u32).to_le_bytes());
    out.extend_from_slice(&manifest);
    out.extend_from_slice(&payload);
    out
}

pub fn model_from_checkpoint_bytes<T: Scalar>(bytes: &[u8]) -> Result<Model<T>> {
    let mut r = Reader::new(bytes, Error::CorruptCheckpoint);
    if r.take(4)? != CHECKPOINT_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let len = r.u32()? as usize;
    let manifest: Manifest =
        serde_json::from_slice(r.take(len)?).map_err(|e| corrupt(format!("unreadable manifest: {e}")))?;
    if manifest.version != CHECKPOINT_VERSION {
        return Err(corrupt(format!("unsupported version {}", manifest.version)));
    }
    manifest
        .model_config
        .validate()
        .map_err(|e| corrupt(format!("invalid model config: {e}")))?;
    let payload = r.rest();

    let specs = manifest.model_config.param_specs();
    if manifest.tensors.len() != 2 * specs.len() {
        return Err(corrupt(format!(
            "manifest lists {} tensors, the model needs {}",
            manifest.tensors.len(),
            2 * specs.len()
        )));
    }
    let mut used = 0usize;
    let mut read = |name: &str, dims: &[usize]| -> Result<Tensor<T>> {
        let entry = manifest
            .tensors
            .get(name)
            .ok_or_else(|| corrupt(format!("missing tensor {name}")))?;
        if entry.dims != dims {
            return Err(Error::ShapeMismatch(format!(
                "{name}: checkpoint holds {:?}, config implies {dims:?}",
                entry.dims
            )));
        }
        let count: usize = dims.iter().product();
        let end = entry
            .offset
            .checked_add(count * 8)
            .filter(|&e| e <= payload.len())
            .ok_or_else(|| corrupt(format!("{name} runs past the end of the file")))?;
        used += count * 8;
        let data = payload[entry.offset..end]
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect::<Vec<_>>();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(corrupt(format!("{name} holds non-finite values")));
        }
        Tensor::from_vec(dims, data.into_iter().map(T::of).collect())
    };
    let mut params = Vec::with_capacity(specs.len());
    for (name, dims) in &specs {
        let value = read(name, dims)?;
        let accum = read(&format!("{ACCUM_PREFIX}{name}"), dims)?;
        if accum.data().iter().any(|&v| v < T::zero()) {
            return Err(corrupt(format!("negative accumulator for {name}")));
        }
        params.push(Param {
            name: name.clone(),
            value,
            accum,
        });
    }
    if used != payload.len() {
        return Err(corrupt(format!("payload is {} bytes, tensors cover {used}", payload.len())));
    }
    Ok(Model {
        config: manifest.model_config,
        params,
    })
}

pub fn save_checkpoint<T: Scalar>(model: &Model<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, checkpoint_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint<T: Scalar>(path: impl AsRef<Path>) -> Result<Model<T>> {
    let path = path.as_ref();
    model_from_checkpoint_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

impl<T: Scalar> Model<T> {
    /// Checks that the model accepts `input_shape` images and `num_classes`
    /// labels.
    pub fn ensure_compatible(&self, input_shape: [usize; 3], num_classes: usize) -> Result<()> {
        if self.config.input_shape != input_shape || self.config.num_classes != num_classes {
            return Err(Error::ShapeMismatch(format!(
                "model takes {:?} images into {} classes, data has {:?} images and {} classes",
                self.config.input_shape, self.config.num_classes, input_shape, num_classes
            )));
        }
        Ok(())
    }
}
