use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::data::{validate_fractions, Dataset};
use super::layers::{argmax, softmax_xent};
use super::model::{Model, RmsProp};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub rho: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// `(train, val, test)`
    pub split_fractions: [f64; 3],
}

impl Default for TrainConfig {
    fn default() -> Self {
        let hp = RmsProp::default();
        TrainConfig {
            lr: hp.lr,
            rho: hp.rho,
            epsilon: hp.epsilon,
            batch_size: 32,
            epochs: 20,
            seed: 0,
            split_fractions: [0.7, 0.15, 0.15],
        }
    }
}

impl TrainConfig {
    pub fn rmsprop(&self) -> RmsProp {
        RmsProp {
            lr: self.lr,
            rho: self.rho,
            epsilon: self.epsilon,
        }
    }

    /// A learning rate of zero is accepted so a run can leave parameters untouched.
    pub fn validate(&self) -> Result<()> {
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return Err(Error::InvalidConfig(format!("learning rate {} must be non-negative", self.lr)));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidConfig(format!("rho {} must lie in (0, 1)", self.rho)));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon {} must be non-negative", self.epsilon)));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        validate_fractions(self.split_fractions)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub mean_loss: f64,
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<usize>>,
}

/// Accuracy, mean cross-entropy and confusion matrix of `model` on `data`.
/// Predictions take the most probable class, lowest index on ties.
pub fn evaluate<T: Scalar>(model: &Model<T>, data: &Dataset<T>) -> Result<Evaluation> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let k = model.num_classes();
    if data.label_span() > k {
        return Err(Error::ShapeMismatch(format!(
            "labels reach class {} but the model has {k} classes",
            data.label_span() - 1
        )));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    let mut total_loss = 0.0;
    for i in 0..data.len() {
        let logits = model.logits(data.image(i))?;
        let label = data.labels[i] as usize;
        let (probs, loss) = softmax_xent(&logits, label);
        confusion[label][argmax(&probs)] += 1;
        total_loss += loss.to_f64_lossy();
    }
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    Ok(Evaluation {
        accuracy: correct as f64 / data.len() as f64,
        mean_loss: total_loss / data.len() as f64,
        confusion,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    /// 1-based
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochMetrics>,
    /// Epoch whose parameters were returned; `None` when no epoch ran.
    pub best_epoch: Option<usize>,
}

/// Trains with shuffled mini-batches and RMSprop. After every epoch the full
/// training and validation sets are evaluated with the current parameters.
/// Returns the parameters of the epoch with the best validation accuracy; on
/// ties the later epoch wins.
pub fn train<T: Scalar>(
    mut model: Model<T>,
    train_set: &Dataset<T>,
    val_set: &Dataset<T>,
    cfg: &TrainConfig,
) -> Result<(Model<T>, History)> {
    cfg.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let input = model.config.input_shape;
    for d in [train_set, val_set] {
        if d.shape != input {
            return Err(Error::ShapeMismatch(format!("images are {:?}, model expects {input:?}", d.shape)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let hp = cfg.rmsprop();
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = History::default();
    let mut best: Option<(f64, Model<T>)> = None;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let images: Vec<&[T]> = batch.iter().map(|&i| train_set.image(i)).collect();
            let labels: Vec<u32> = batch.iter().map(|&i| train_set.labels[i]).collect();
            let (grads, _) = model.gradients(&images, &labels)?;
            model.rmsprop_step(&grads, &hp)?;
        }
        let tr = evaluate(&model, train_set)?;
        let va = evaluate(&model, val_set)?;
        history.epochs.push(EpochMetrics {
            epoch,
            train_loss: tr.mean_loss,
            train_accuracy: tr.accuracy,
            val_loss: va.mean_loss,
            val_accuracy: va.accuracy,
        });
        if best.as_ref().is_none_or(|(acc, _)| va.accuracy >= *acc) {
            best = Some((va.accuracy, model.clone()));
            history.best_epoch = Some(epoch);
        }
    }
    Ok((best.map_or(model, |(_, m)| m), history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnn::{ModelConfig, Tensor};

    fn tiny() -> ModelConfig {
        ModelConfig {
            input_shape: [6, 6, 2],
            kernel_size: 3,
            conv_filters: vec![3],
            dense_hidden: 5,
            num_classes: 3,
        }
    }

    /// Class c lights up channel c % 2 in a class-specific quadrant.
    fn blobs(n: usize, seed: u64) -> Dataset<f64> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut images = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let c = i % 3;
            for r in 0..6 {
                for col in 0..6 {
                    for ch in 0..2 {
                        let hot = ch == c % 2 && (r / 3) == (c / 2) && (col / 3) == (c % 2);
                        images.push(if hot { 1.0 } else { 0.0 } + rng.gen_range(0.0..0.1));
                    }
                }
            }
            labels.push(c as u32);
        }
        Dataset::new([6, 6, 2], images, labels).unwrap()
    }

    #[test]
    fn uniform_model_scores_class_zero_fraction() {
        let mut m = Model::<f64>::new(tiny(), 0).unwrap();
        let last = m.params.len() - 2;
        m.params[last].value.fill(0.0);
        let d = blobs(9, 1);
        let e = evaluate(&m, &d).unwrap();
        assert!((e.accuracy - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.mean_loss - 3f64.ln()).abs() < 1e-12);
        assert_eq!(e.confusion.iter().flatten().sum::<usize>(), 9);
        assert_eq!(e.confusion[1][0], 3);
        assert!(evaluate(&m, &d.subset(&[])).is_err());
    }

    #[test]
    fn evaluate_rejects_foreign_labels() {
        let m = Model::<f64>::new(tiny(), 0).unwrap();
        let mut d = blobs(3, 0);
        d.labels[0] = 4;
        assert!(matches!(evaluate(&m, &d), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn learns_and_is_deterministic() {
        let cfg = TrainConfig {
            lr: 1e-2,
            batch_size: 8,
            epochs: 6,
            seed: 9,
            ..TrainConfig::default()
        };
        let (tr, va) = (blobs(60, 2), blobs(15, 3));
        let m = Model::<f64>::new(tiny(), 5).unwrap();
        let (a, ha) = train(m.clone(), &tr, &va, &cfg).unwrap();
        let (b, hb) = train(m, &tr, &va, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha, hb);
        assert_eq!(ha.epochs.len(), 6);
        assert!(ha.epochs[4].train_loss < ha.epochs[0].train_loss);
        let best = ha.best_epoch.unwrap();
        let top = ha.epochs.iter().map(|e| e.val_accuracy).fold(0.0, f64::max);
        assert_eq!(ha.epochs[best - 1].val_accuracy, top);
        assert!(ha.epochs[best..].iter().all(|e| e.val_accuracy < top));
        assert!((evaluate(&a, &va).unwrap().accuracy - top).abs() < 1e-15);
    }

    #[test]
    fn zero_learning_rate_keeps_parameters() {
        let cfg = TrainConfig {
            lr: 0.0,
            batch_size: 7,
            epochs: 2,
            ..TrainConfig::default()
        };
        let m = Model::<f64>::new(tiny(), 1).unwrap();
        let (tr, va) = (blobs(20, 0), blobs(6, 1));
        let initial = evaluate(&m, &va).unwrap();
        let (out, h) = train(m.clone(), &tr, &va, &cfg).unwrap();
        for (p, q) in out.params.iter().zip(&m.params) {
            assert_eq!(p.value, q.value);
        }
        assert!(h.epochs.iter().all(|e| e.val_accuracy == initial.accuracy));
    }

    #[test]
    fn zero_epochs_returns_initial_model() {
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let m = Model::<f64>::new(tiny(), 1).unwrap();
        let (out, h) = train(m.clone(), &blobs(6, 0), &blobs(3, 1), &cfg).unwrap();
        assert_eq!(out, m);
        assert_eq!(h, History::default());
        assert!(matches!(
            train(m, &blobs(0, 0), &blobs(3, 1), &cfg),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn duplicated_sample_gives_same_gradient() {
        let m = Model::<f64>::new(tiny(), 2).unwrap();
        let d = blobs(1, 0);
        let (g1, l1) = m.gradients(&[d.image(0)], &[0]).unwrap();
        let (g2, l2) = m.gradients(&[d.image(0), d.image(0)], &[0, 0]).unwrap();
        assert!((l1 - l2).abs() < 1e-15);
        // terms are summed into shared buffers, so only rounding may differ
        for (a, b) in g1.iter().zip(&g2) {
            let scale = a.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.data().iter().zip(b.data()) {
                assert!((x - y).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn zero_output_weights_give_softmax_bias_gradient() {
        let mut m = Model::<f64>::new(tiny(), 3).unwrap();
        let w = m.params.len() - 2;
        m.params[w].value = Tensor::zeros(m.params[w].value.dims());
        let d = blobs(5, 4);
        let images: Vec<&[f64]> = (0..5).map(|i| d.image(i)).collect();
        let (g, _) = m.gradients(&images, &d.labels).unwrap();
        // probs are uniform, so the bias gradient is 1/3 minus the label frequency
        let bias = g.last().unwrap().data();
        for c in 0..3 {
            let freq = d.labels.iter().filter(|&&l| l == c as u32).count() as f64 / 5.0;
            assert!((bias[c] - (1.0 / 3.0 - freq)).abs() < 1e-15);
        }
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig { lr: -1.0, ..Default::default() },
            TrainConfig { rho: 1.0, ..Default::default() },
            TrainConfig { batch_size: 0, ..Default::default() },
            TrainConfig { split_fractions: [0.7, 0.7, -0.4], ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
