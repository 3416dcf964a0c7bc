use std::time::Instant;

use nif::cnn::{evaluate, load_checkpoint, Evaluation, Model};
use nif::{Error, Real};

use crate::args::EvalArgs;
use crate::commands::train::load_dataset;
use crate::error::CliResult;
use crate::manifest::{default_manifest_path, write_atomic, RunManifest};

/// Evaluates a checkpoint. Labels beyond the checkpoint's class count are a
/// shape mismatch.
pub fn cmd_eval(args: &EvalArgs) -> CliResult<Evaluation> {
    let start = Instant::now();
    let model: Model<Real> = load_checkpoint(&args.model)?;
    let data = load_dataset(&args.data, &args.labels)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset.into());
    }
    if data.shape != model.config.input_shape {
        return Err(Error::ShapeMismatch(format!(
            "images are {:?}, model expects {:?}",
            data.shape, model.config.input_shape
        ))
        .into());
    }
    if data.label_span() > model.num_classes() {
        return Err(Error::ShapeMismatch(format!(
            "labels span {} classes, checkpoint has {}",
            data.label_span(),
            model.num_classes()
        ))
        .into());
    }
    let result = evaluate(&model, &data)?;
    write_atomic(&args.out, &serde_json::to_vec_pretty(&result).expect("metrics serialize"))?;

    let manifest_path = args.manifest.clone().unwrap_or_else(|| default_manifest_path(&args.out));
    RunManifest {
        command: "eval".into(),
        config: serde_json::to_value(args).expect("flags serialize"),
        seed: None,
        inputs: vec![args.model.clone(), args.data.clone(), args.labels.clone()],
        outputs: vec![args.out.clone()],
        wall_time_seconds: start.elapsed().as_secs_f64(),
        workers: 1,
        epochs_generated: None,
        epochs_skipped: None,
    }
    .write(&manifest_path)?;
    Ok(result)
}
