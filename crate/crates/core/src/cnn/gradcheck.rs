use serde::Serialize;

use super::model::{Model, ModelConfig};
use crate::error::Result;

/// Comparison of one backprop gradient entry with its central difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientCheck {
    pub param: String,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

/// Denominator floor of the relative error, so that entries whose true
/// gradient is zero are judged on absolute error instead.
pub const REL_ERROR_FLOOR: f64 = 1e-6;

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(REL_ERROR_FLOOR)
}

/// Reduced architecture used for gradient audits: 8×8×3 input, one block of
/// two 3×3 filters, four hidden units, three classes.
pub fn reduced_config() -> ModelConfig {
    ModelConfig {
        input_shape: [8, 8, 3],
        kernel_size: 3,
        conv_filters: vec![2],
        dense_hidden: 4,
        num_classes: 3,
    }
}

/// Checks every parameter entry of the mean batch loss gradient against
/// `(L(θ+h) − L(θ−h)) / 2h`.
pub fn check_gradients(model: &Model<f64>, images: &[&[f64]], labels: &[u32], h: f64) -> Result<Vec<GradientCheck>> {
    let (grads, _) = model.gradients(images, labels)?;
    let mean_loss = |m: &Model<f64>| -> Result<f64> {
        let mut total = 0.0;
        for (img, &l) in images.iter().zip(labels) {
            total += m.loss(img, l)?;
        }
        Ok(total / images.len() as f64)
    };
    let mut probe = model.clone();
    let mut out = Vec::new();
    for (p, g) in grads.iter().enumerate() {
        for i in 0..g.len() {
            let orig = probe.params[p].value.data()[i];
            probe.params[p].value.data_mut()[i] = orig + h;
            let up = mean_loss(&probe)?;
            probe.params[p].value.data_mut()[i] = orig - h;
            let down = mean_loss(&probe)?;
            probe.params[p].value.data_mut()[i] = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = g.data()[i];
            out.push(GradientCheck {
                param: model.params[p].name.clone(),
                index: i,
                analytic,
                numeric,
                rel_error: relative_error(analytic, numeric),
            });
        }
    }
    Ok(out)
}
