use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nif::cnn::{argmax, load_checkpoint, Model};
use nif::topomap::read_ten1;
use nif::{Error, Real};

use crate::args::{resolve_workers, PredictArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{default_manifest_path, write_atomic, RunManifest};

/// One line of `predict` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub index: usize,
    pub probs: Vec<f64>,
    pub argmax: usize,
}

pub fn cmd_predict(args: &PredictArgs) -> CliResult<Vec<Prediction>> {
    let start = Instant::now();
    let workers = resolve_workers(args.workers).map_err(CliError::Usage)?;
    let model: Model<Real> = load_checkpoint(&args.model)?;
    let tensor = read_ten1(&args.data)?;
    let &[n, h, w, c] = tensor.dims.as_slice() else {
        return Err(Error::ShapeMismatch(format!("image tensor must be 4-D, got {:?}", tensor.dims)).into());
    };
    if [h, w, c] != model.config.input_shape {
        return Err(Error::ShapeMismatch(format!(
            "images are {:?}, model expects {:?}",
            [h, w, c],
            model.config.input_shape
        ))
        .into());
    }
    let per = h * w * c;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let predictions = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let image: Vec<Real> = tensor.data[i * per..(i + 1) * per].iter().map(|&v| v as Real).collect();
                let probs = model.predict(&image)?;
                Ok(Prediction {
                    index: i,
                    argmax: argmax(&probs),
                    probs,
                })
            })
            .collect::<nif::Result<Vec<_>>>()
    })?;

    let mut out = Vec::new();
    for p in &predictions {
        serde_json::to_writer(&mut out, p).expect("prediction serializes");
        out.push(b'\n');
    }
    write_atomic(&args.out, &out)?;

    let manifest_path = args.manifest.clone().unwrap_or_else(|| default_manifest_path(&args.out));
    RunManifest {
        command: "predict".into(),
        config: serde_json::json!({ "flags": args, "workers": workers }),
        seed: None,
        inputs: vec![args.model.clone(), args.data.clone()],
        outputs: vec![args.out.clone()],
        wall_time_seconds: start.elapsed().as_secs_f64(),
        workers,
        epochs_generated: None,
        epochs_skipped: None,
    }
    .write(&manifest_path)?;
    Ok(predictions)
}
