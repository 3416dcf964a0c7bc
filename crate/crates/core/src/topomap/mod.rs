//! Topographic band-power images: projected montage, Clough–Tocher
//! interpolation onto a square grid, per-channel normalisation and export.

mod clough_tocher;
mod export;
mod montage;
mod render;

pub use clough_tocher::{estimate_gradients, CloughTocher};
pub use export::{
    export_png, export_tensor, import_tensor, pixel_byte, read_lbl1, read_ten1, write_lbl1, write_ten1, TensorData,
    LABEL_MAGIC, TENSOR_MAGIC,
};
pub(crate) use export::Reader;
pub use montage::{project_montage, Montage2D};
pub use render::{interpolate_grid, render_image, GridFrame, RenderPlan, ScalarField, TopoImage, DEFAULT_IMAGE_SIZE};
