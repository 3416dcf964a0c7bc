mod eval;
mod images;
mod predict;
mod synth;
mod train;

pub use eval::cmd_eval;
pub use images::{cmd_images, ImagesSummary};
pub use predict::{cmd_predict, Prediction};
pub use synth::{cmd_synth, subject_dir_name};
pub use train::{cmd_train, load_dataset, TrainMetrics};
