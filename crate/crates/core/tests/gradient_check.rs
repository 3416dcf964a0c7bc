//! Backprop gradients against central finite differences.

use nif::cnn::{check_gradients, reduced_config, Model, ModelConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn batch(cfg: &ModelConfig, n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let images = (0..n)
        .map(|_| (0..cfg.input_len()).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    let labels = (0..n).map(|i| (i % cfg.num_classes) as u32).collect();
    (images, labels)
}

fn audit(cfg: ModelConfig, seed: u64) {
    let model = Model::<f64>::new(cfg.clone(), seed).unwrap();
    let (images, labels) = batch(&cfg, 4, seed + 100);
    let refs: Vec<&[f64]> = images.iter().map(Vec::as_slice).collect();
    let checks = check_gradients(&model, &refs, &labels, 1e-5).unwrap();
    let total: usize = model.params.iter().map(|p| p.value.len()).sum();
    assert_eq!(checks.len(), total);
    let worst = checks.iter().max_by(|a, b| a.rel_error.total_cmp(&b.rel_error)).unwrap();
    assert!(worst.rel_error < 1e-4, "{worst:?}");
    // the audit must exercise real gradients, not only dead units
    assert!(checks.iter().filter(|c| c.analytic.abs() > 1e-3).count() > total / 4);
}

#[test]
fn reduced_model() {
    audit(reduced_config(), 7);
}

#[test]
fn two_conv_blocks() {
    let cfg = ModelConfig {
        input_shape: [12, 12, 2],
        kernel_size: 3,
        conv_filters: vec![2, 3],
        dense_hidden: 4,
        num_classes: 3,
    };
    audit(cfg, 3);
}
