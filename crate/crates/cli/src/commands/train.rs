use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use nif::cnn::{
    evaluate, save_checkpoint, split_by_group, split_dataset, train, Dataset, EpochMetrics, Evaluation, Model,
    ModelConfig, Split, TrainConfig,
};
use nif::topomap::{read_lbl1, read_ten1};
use nif::{Error, Real};

use crate::args::{parse_split, TrainArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{default_manifest_path, write_atomic, RunManifest};

/// Contents of the metrics file written by `train`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMetrics {
    pub model_config: ModelConfig,
    pub train_config: TrainConfig,
    pub split_mode: String,
    pub train_indices: Vec<usize>,
    pub val_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub history: Vec<EpochMetrics>,
    pub best_epoch: Option<usize>,
    /// Returned model on each partition; `None` for an empty partition.
    pub final_train: Option<Evaluation>,
    pub final_val: Option<Evaluation>,
    pub final_test: Option<Evaluation>,
}

impl TrainMetrics {
    pub fn test_accuracy(&self) -> Option<f64> {
        self.final_test.as_ref().map(|e| e.accuracy)
    }
}

pub fn load_dataset(data: &Path, labels: &Path) -> CliResult<Dataset<Real>> {
    let tensor = read_ten1(data)?;
    let labels = read_lbl1(labels)?;
    Ok(Dataset::from_tensor(&tensor, labels)?)
}

fn evaluate_part(model: &Model<Real>, data: &Dataset<Real>, idx: &[usize]) -> CliResult<Option<Evaluation>> {
    if idx.is_empty() {
        return Ok(None);
    }
    Ok(Some(evaluate(model, &data.subset(idx))?))
}

/// Splits, trains from a seeded initialisation, and writes the best
/// checkpoint plus a metrics file.
pub fn cmd_train(args: &TrainArgs) -> CliResult<TrainMetrics> {
    let start = Instant::now();
    let fractions = parse_split(&args.split).map_err(CliError::Usage)?;
    let cfg = TrainConfig {
        lr: args.lr,
        batch_size: args.batch,
        epochs: args.epochs,
        seed: args.seed,
        split_fractions: fractions,
        ..TrainConfig::default()
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let data = load_dataset(&args.data, &args.labels)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset.into());
    }
    let (split, mode): (Split, &str) = match &args.groups {
        Some(path) => {
            let groups = read_lbl1(path)?;
            if groups.len() != data.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} group ids for {} images",
                    groups.len(),
                    data.len()
                ))
                .into());
            }
            (split_by_group(&groups, fractions, args.seed)?, "group")
        }
        None => (split_dataset(&data.labels, fractions, args.seed)?, "stratified"),
    };

    let model_config = ModelConfig {
        input_shape: data.shape,
        ..ModelConfig::standard(data.label_span().max(2))
    };
    let model = Model::<Real>::new(model_config.clone(), args.seed)?;
    let (train_set, val_set) = (data.subset(&split.train), data.subset(&split.val));
    let (model, history) = train(model, &train_set, &val_set, &cfg)?;

    let metrics = TrainMetrics {
        model_config,
        train_config: cfg,
        split_mode: mode.into(),
        final_train: evaluate_part(&model, &data, &split.train)?,
        final_val: evaluate_part(&model, &data, &split.val)?,
        final_test: evaluate_part(&model, &data, &split.test)?,
        train_indices: split.train,
        val_indices: split.val,
        test_indices: split.test,
        history: history.epochs,
        best_epoch: history.best_epoch,
    };
    save_checkpoint(&model, &args.out)?;
    write_atomic(&args.metrics, &serde_json::to_vec_pretty(&metrics).expect("metrics serialize"))?;

    let manifest_path = args.manifest.clone().unwrap_or_else(|| default_manifest_path(&args.out));
    let mut inputs = vec![args.data.clone(), args.labels.clone()];
    inputs.extend(args.groups.clone());
    RunManifest {
        command: "train".into(),
        config: serde_json::json!({ "flags": args, "train_config": metrics.train_config }),
        seed: Some(args.seed),
        inputs,
        outputs: vec![args.out.clone(), args.metrics.clone()],
        wall_time_seconds: start.elapsed().as_secs_f64(),
        workers: 1,
        epochs_generated: None,
        epochs_skipped: None,
    }
    .write(&manifest_path)?;
    Ok(metrics)
}
