//! Small convolutional classifier trained with RMSprop.

mod checkpoint;
mod data;
mod gradcheck;
mod layers;
mod model;
mod tensor;
mod train;

pub use checkpoint::{
    checkpoint_bytes, load_checkpoint, model_from_checkpoint_bytes, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use data::{split_by_group, split_dataset, validate_fractions, Dataset, Split};
pub use gradcheck::{check_gradients, reduced_config, relative_error, GradientCheck, REL_ERROR_FLOOR};
pub use layers::{
    argmax, conv2d_backward, conv2d_forward, dense_backward, dense_forward, maxpool_backward, maxpool_forward, relu,
    softmax, softmax_xent,
};
pub use model::{Model, ModelConfig, Param, RmsProp};
pub use tensor::Tensor;
pub use train::{evaluate, train, EpochMetrics, Evaluation, History, TrainConfig};
