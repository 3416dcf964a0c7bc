use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "nif", version, about = "EEG band-power topographic images and CNN classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic recordings, one bundle per subject.
    Synth(SynthArgs),
    /// Render band-power images from recording bundles.
    Images(ImagesArgs),
    /// Train a classifier on an image tensor.
    Train(TrainArgs),
    /// Evaluate a checkpoint on labelled images.
    Eval(EvalArgs),
    /// Write class probabilities for every image.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2)]
    pub subjects: usize,
    #[arg(long, default_value_t = 15)]
    pub classes: usize,
    #[arg(long, default_value_t = 10)]
    pub events_per_class: usize,
    #[arg(long, default_value_t = 128.0)]
    pub sample_rate: f64,
    #[arg(long, default_value_t = 32)]
    pub channels: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; receives `subject_01`, `subject_02`, ...
    #[arg(long)]
    pub out: PathBuf,
    /// Allow writing into a non-empty directory.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ImagesArgs {
    /// Recording bundle directory; repeat for several.
    #[arg(long = "bundle", required = true)]
    pub bundles: Vec<PathBuf>,
    #[arg(long, default_value_t = 20.0)]
    pub epoch_seconds: f64,
    /// Image side length in pixels.
    #[arg(long, default_value_t = 32)]
    pub size: usize,
    /// Render threads; defaults to the number of CPUs.
    #[arg(long, env = "NIF_WORKERS")]
    pub workers: Option<usize>,
    /// Image tensor output (TEN1).
    #[arg(long)]
    pub out: PathBuf,
    /// Label output (LBL1).
    #[arg(long)]
    pub labels: PathBuf,
    /// Optional LBL1 file holding the bundle index of every image.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    #[arg(long)]
    pub png_dir: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Train/validation/test fractions.
    #[arg(long, default_value = "0.7/0.15/0.15")]
    pub split: String,
    /// Hold out whole groups (e.g. subjects) listed in this LBL1 file
    /// instead of splitting samples at random.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    /// Checkpoint output.
    #[arg(long)]
    pub out: PathBuf,
    /// Metrics JSON output.
    #[arg(long)]
    pub metrics: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Metrics JSON output.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// JSON-lines output.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "NIF_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Parses `"train/val/test"` fractions that must sum to one.
pub fn parse_split(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split('/').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("split {s:?} must have three parts, like 0.7/0.15/0.15"));
    };
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip([a, b, c]) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| format!("split part {p:?} is not a number"))?;
    }
    nif::cnn::validate_fractions(out).map_err(|e| e.to_string())?;
    Ok(out)
}

pub fn resolve_workers(workers: Option<usize>) -> Result<usize, String> {
    match workers {
        Some(0) => Err("--workers must be at least 1".into()),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_strings() {
        assert_eq!(parse_split("0.7/0.15/0.15").unwrap(), [0.7, 0.15, 0.15]);
        assert_eq!(parse_split(" 0.5 / 0.25/0.25").unwrap(), [0.5, 0.25, 0.25]);
        for bad in ["0.7/0.7", "0.7/0.2/0.2", "a/b/c", "1/0/0", "0.7/0.15/0.15/0"] {
            assert!(parse_split(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn worker_resolution() {
        assert_eq!(resolve_workers(Some(3)), Ok(3));
        assert!(resolve_workers(Some(0)).is_err());
        assert!(resolve_workers(None).unwrap() >= 1);
    }
}
