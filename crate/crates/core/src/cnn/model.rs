use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layers::{
    conv2d_backward, conv2d_forward, dense_backward, dense_forward, maxpool_backward, maxpool_forward, relu, softmax,
    softmax_xent,
};
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Architecture: a stack of `conv(k×k) → ReLU → 2×2 max-pool` blocks,
/// flatten, one ReLU hidden dense layer, and a softmax output layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// `[height, width, channels]`
    pub input_shape: [usize; 3],
    pub kernel_size: usize,
    /// Filters per convolution block.
    pub conv_filters: Vec<usize>,
    pub dense_hidden: usize,
    pub num_classes: usize,
}

impl ModelConfig {
    /// 32×32×3 input, conv 16 and 32 filters of 3×3, 64 hidden units.
    pub fn standard(num_classes: usize) -> Self {
        ModelConfig {
            input_shape: [32, 32, 3],
            kernel_size: 3,
            conv_filters: vec![16, 32],
            dense_hidden: 64,
            num_classes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 classes, got {}", self.num_classes)));
        }
        if self.kernel_size == 0 || self.dense_hidden == 0 || self.conv_filters.contains(&0) {
            return Err(Error::InvalidConfig("layer sizes must be positive".into()));
        }
        self.block_shapes().map(|_| ())
    }

    /// Input shape of every conv block followed by the final pooled shape.
    pub fn block_shapes(&self) -> Result<Vec<[usize; 3]>> {
        let mut shape = self.input_shape;
        if shape.contains(&0) {
            return Err(Error::InvalidConfig(format!("input shape {shape:?} has a zero dimension")));
        }
        let mut shapes = vec![shape];
        for &f in &self.conv_filters {
            let [h, w, _] = shape;
            if h < self.kernel_size || w < self.kernel_size {
                return Err(Error::InvalidConfig(format!("{h}x{w} is smaller than the kernel")));
            }
            let (ch, cw) = (h - self.kernel_size + 1, w - self.kernel_size + 1);
            if ch < 2 || cw < 2 {
                return Err(Error::InvalidConfig(format!("{ch}x{cw} cannot be pooled")));
            }
            shape = [ch / 2, cw / 2, f];
            shapes.push(shape);
        }
        Ok(shapes)
    }

    pub fn flat_len(&self) -> usize {
        let s = *self.block_shapes().expect("validated config").last().unwrap();
        s[0] * s[1] * s[2]
    }

    /// Names and shapes of every parameter, in update order.
    pub fn param_specs(&self) -> Vec<(String, Vec<usize>)> {
        let mut specs = Vec::new();
        let mut in_ch = self.input_shape[2];
        let k = self.kernel_size;
        for (l, &f) in self.conv_filters.iter().enumerate() {
            specs.push((format!("conv{l}.kernel"), vec![k, k, in_ch, f]));
            specs.push((format!("conv{l}.bias"), vec![f]));
            in_ch = f;
        }
        specs.push(("dense0.weight".into(), vec![self.dense_hidden, self.flat_len()]));
        specs.push(("dense0.bias".into(), vec![self.dense_hidden]));
        specs.push(("dense1.weight".into(), vec![self.num_classes, self.dense_hidden]));
        specs.push(("dense1.bias".into(), vec![self.num_classes]));
        specs
    }

    pub fn input_len(&self) -> usize {
        self.input_shape.iter().product()
    }
}

/// A trainable tensor with its RMSprop accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Param<T> {
    pub name: String,
    pub value: Tensor<T>,
    /// Running mean of squared gradients.
    pub accum: Tensor<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    pub config: ModelConfig,
    pub params: Vec<Param<T>>,
}

/// Intermediate values of one forward pass, kept for backpropagation.
struct Trace<T> {
    /// input to each conv block
    block_inputs: Vec<Tensor<T>>,
    /// pre-activation conv outputs
    conv_out: Vec<Tensor<T>>,
    pool_argmax: Vec<Vec<usize>>,
    flat: Vec<T>,
    hidden_pre: Vec<T>,
    hidden: Vec<T>,
    logits: Vec<T>,
}

impl<T: Scalar> Model<T> {
    /// He-uniform weights (`±sqrt(6 / fan_in)`) and zero biases from a
    /// seeded generator.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = config
            .param_specs()
            .into_iter()
            .map(|(name, dims)| {
                let value = if name.ends_with(".bias") {
                    Tensor::zeros(&dims)
                } else {
                    let fan_in: usize = if dims.len() == 4 { dims[0] * dims[1] * dims[2] } else { dims[1] };
                    let limit = (6.0 / fan_in as f64).sqrt();
                    let n = dims.iter().product();
                    let data = (0..n).map(|_| T::of(rng.gen_range(-limit..limit))).collect();
                    Tensor::from_vec(&dims, data).expect("parameter dims")
                };
                Param {
                    accum: Tensor::zeros(&dims),
                    name,
                    value,
                }
            })
            .collect();
        Ok(Model { config, params })
    }

    pub fn param(&self, name: &str) -> Option<&Param<T>> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn param_mut(&mut self, name: &str) -> Option<&mut Param<T>> {
        self.params.iter_mut().find(|p| p.name == name)
    }

    pub fn num_classes(&self) -> usize {
        self.config.num_classes
    }

    fn check_input(&self, image: &[T]) -> Result<()> {
        if image.len() != self.config.input_len() {
            return Err(Error::ShapeMismatch(format!(
                "image has {} values, model expects {:?}",
                image.len(),
                self.config.input_shape
            )));
        }
        Ok(())
    }

    fn trace(&self, image: &[T]) -> Result<Trace<T>> {
        self.check_input(image)?;
        let blocks = self.config.conv_filters.len();
        let mut x = Tensor::from_vec(&self.config.input_shape, image.to_vec())?;
        let mut block_inputs = Vec::with_capacity(blocks);
        let mut conv_out = Vec::with_capacity(blocks);
        let mut pool_argmax = Vec::with_capacity(blocks);
        for l in 0..blocks {
            let z = conv2d_forward(&x, &self.params[2 * l].value, &self.params[2 * l + 1].value)?;
            let (pooled, arg) = maxpool_forward(&relu(&z))?;
            block_inputs.push(x);
            conv_out.push(z);
            pool_argmax.push(arg);
            x = pooled;
        }
        let flat = x.into_data();
        let d = 2 * blocks;
        let hidden_pre = dense_forward(&flat, &self.params[d].value, &self.params[d + 1].value)?;
        let hidden: Vec<T> = hidden_pre.iter().map(|&v| v.max(T::zero())).collect();
        let logits = dense_forward(&hidden, &self.params[d + 2].value, &self.params[d + 3].value)?;
        Ok(Trace {
            block_inputs,
            conv_out,
            pool_argmax,
            flat,
            hidden_pre,
            hidden,
            logits,
        })
    }

    pub fn logits(&self, image: &[T]) -> Result<Vec<T>> {
        Ok(self.trace(image)?.logits)
    }

    /// Class probabilities for one image.
    pub fn predict(&self, image: &[T]) -> Result<Vec<T>> {
        Ok(softmax(&self.logits(image)?))
    }

    /// Cross-entropy loss of one image.
    pub fn loss(&self, image: &[T], label: u32) -> Result<T> {
        self.check_label(label)?;
        Ok(softmax_xent(&self.logits(image)?, label as usize).1)
    }

    fn check_label(&self, label: u32) -> Result<()> {
        if label as usize >= self.config.num_classes {
            return Err(Error::ShapeMismatch(format!(
                "label {label} outside the model's {} classes",
                self.config.num_classes
            )));
        }
        Ok(())
    }

    /// Mean cross-entropy over a batch and its exact gradient with respect to
    /// every parameter (same order as `params`). Samples are accumulated in
    /// batch order.
    pub fn gradients(&self, images: &[&[T]], labels: &[u32]) -> Result<(Vec<Tensor<T>>, T)> {
        if images.is_empty() || images.len() != labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "batch of {} images with {} labels",
                images.len(),
                labels.len()
            )));
        }
        let mut grads: Vec<Tensor<T>> = self.params.iter().map(|p| Tensor::zeros(p.value.dims())).collect();
        let mut total = T::zero();
        for (&image, &label) in images.iter().zip(labels) {
            self.check_label(label)?;
            total += self.accumulate(image, label, &mut grads)?;
        }
        let scale = T::one() / T::of_usize(images.len());
        for g in grads.iter_mut() {
            g.data_mut().iter_mut().for_each(|v| *v *= scale);
        }
        Ok((grads, total * scale))
    }

    fn accumulate(&self, image: &[T], label: u32, grads: &mut [Tensor<T>]) -> Result<T> {
        let tr = self.trace(image)?;
        let (probs, loss) = softmax_xent(&tr.logits, label as usize);
        let mut dlogits = probs;
        dlogits[label as usize] -= T::one();

        let blocks = self.config.conv_filters.len();
        let d = 2 * blocks;
        let (head, tail) = grads.split_at_mut(d + 2);
        let (gw1, gb1) = tail.split_at_mut(1);
        let dhidden = dense_backward(&tr.hidden, &self.params[d + 2].value, &dlogits, gw1[0].data_mut(), gb1[0].data_mut());
        let dhidden_pre: Vec<T> = dhidden
            .iter()
            .zip(&tr.hidden_pre)
            .map(|(&g, &z)| if z > T::zero() { g } else { T::zero() })
            .collect();
        let (conv_grads, dense0) = head.split_at_mut(d);
        let (gw0, gb0) = dense0.split_at_mut(1);
        let dflat = dense_backward(&tr.flat, &self.params[d].value, &dhidden_pre, gw0[0].data_mut(), gb0[0].data_mut());

        let shapes = self.config.block_shapes()?;
        let mut upstream = Tensor::from_vec(&shapes[blocks], dflat)?;
        for l in (0..blocks).rev() {
            let z = &tr.conv_out[l];
            let mut dz = maxpool_backward(&upstream, &tr.pool_argmax[l], z.dims());
            for (g, &zv) in dz.data_mut().iter_mut().zip(z.data()) {
                if zv <= T::zero() {
                    *g = T::zero();
                }
            }
            let input = &tr.block_inputs[l];
            let (gk, gb) = conv_grads[2 * l..2 * l + 2].split_at_mut(1);
            if l > 0 {
                let mut dinput = Tensor::zeros(input.dims());
                conv2d_backward(input, &self.params[2 * l].value, &dz, gk[0].data_mut(), gb[0].data_mut(), Some(dinput.data_mut()));
                upstream = dinput;
            } else {
                conv2d_backward(input, &self.params[2 * l].value, &dz, gk[0].data_mut(), gb[0].data_mut(), None);
            }
        }
        Ok(loss)
    }

    /// One RMSprop update:
    /// `acc ← ρ·acc + (1−ρ)·g²`, `θ ← θ − lr·g / (√acc + ε)`.
    pub fn rmsprop_step(&mut self, grads: &[Tensor<T>], hp: &RmsProp) -> Result<()> {
        if grads.len() != self.params.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} gradients for {} parameters",
                grads.len(),
                self.params.len()
            )));
        }
        let (lr, rho, eps) = (T::of(hp.lr), T::of(hp.rho), T::of(hp.epsilon));
        let one_minus_rho = T::one() - rho;
        for (p, g) in self.params.iter_mut().zip(grads) {
            g.expect_dims(p.value.dims(), &p.name)?;
            for ((theta, acc), &gv) in p.value.data_mut().iter_mut().zip(p.accum.data_mut()).zip(g.data()) {
                *acc = rho * *acc + one_minus_rho * gv * gv;
                *theta -= lr * gv / (acc.sqrt() + eps);
            }
        }
        Ok(())
    }
}

/// RMSprop hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsProp {
    pub lr: f64,
    pub rho: f64,
    pub epsilon: f64,
}

impl Default for RmsProp {
    fn default() -> Self {
        RmsProp {
            lr: 1e-3,
            rho: 0.9,
            epsilon: 1e-8,
        }
    }
}
