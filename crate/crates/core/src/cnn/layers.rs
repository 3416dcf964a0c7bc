//! Layer primitives. Activations are `H × W × C` row-major with the channel
//! fastest; convolution kernels are `k × k × C × F`; dense weights are
//! `out × in`.

use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Valid (unpadded) stride-1 convolution:
/// `out[i,j,f] = bias[f] + Σ_{a,b,c} input[i+a, j+b, c] · kernels[a,b,c,f]`.
pub fn conv2d_forward<T: Scalar>(input: &Tensor<T>, kernels: &Tensor<T>, bias: &Tensor<T>) -> Result<Tensor<T>> {
    let [h, w, c] = dims3(input, "conv input")?;
    let [k, k2, kc, f] = dims4(kernels, "conv kernels")?;
    if k != k2 || kc != c || k > h.min(w) || k == 0 {
        return Err(Error::ShapeMismatch(format!(
            "kernels {:?} do not fit input {:?}",
            kernels.dims(),
            input.dims()
        )));
    }
    bias.expect_dims(&[f], "conv bias")?;
    let (oh, ow) = (h - k + 1, w - k + 1);
    let x = input.data();
    let kd = kernels.data();
    let mut out = Vec::with_capacity(oh * ow * f);
    for _ in 0..oh * ow {
        out.extend_from_slice(bias.data());
    }
    for i in 0..oh {
        for j in 0..ow {
            let o = &mut out[(i * ow + j) * f..(i * ow + j + 1) * f];
            for a in 0..k {
                for b in 0..k {
                    let xin = &x[((i + a) * w + j + b) * c..((i + a) * w + j + b + 1) * c];
                    let krow = &kd[(a * k + b) * c * f..(a * k + b + 1) * c * f];
                    for (ci, &xv) in xin.iter().enumerate() {
                        let kf = &krow[ci * f..(ci + 1) * f];
                        for (ov, &kv) in o.iter_mut().zip(kf) {
                            *ov += xv * kv;
                        }
                    }
                }
            }
        }
    }
    Tensor::from_vec(&[oh, ow, f], out)
}

/// Accumulates convolution gradients given the upstream gradient of the
/// output. `grad_input`, when requested, receives the gradient with respect
/// to the input.
pub fn conv2d_backward<T: Scalar>(
    input: &Tensor<T>,
    kernels: &Tensor<T>,
    grad_out: &Tensor<T>,
    grad_kernels: &mut [T],
    grad_bias: &mut [T],
    mut grad_input: Option<&mut [T]>,
) {
    let [h, w, c] = [input.dims()[0], input.dims()[1], input.dims()[2]];
    let k = kernels.dims()[0];
    let f = kernels.dims()[3];
    let (oh, ow) = (h - k + 1, w - k + 1);
    debug_assert_eq!(grad_out.dims(), &[oh, ow, f]);
    let x = input.data();
    let kd = kernels.data();
    let g = grad_out.data();
    for i in 0..oh {
        for j in 0..ow {
            let go = &g[(i * ow + j) * f..(i * ow + j + 1) * f];
            for (gb, &gv) in grad_bias.iter_mut().zip(go) {
                *gb += gv;
            }
            for a in 0..k {
                for b in 0..k {
                    let base = ((i + a) * w + j + b) * c;
                    let kbase = (a * k + b) * c * f;
                    for ci in 0..c {
                        let xv = x[base + ci];
                        let gk = &mut grad_kernels[kbase + ci * f..kbase + (ci + 1) * f];
                        for (gkv, &gv) in gk.iter_mut().zip(go) {
                            *gkv += xv * gv;
                        }
                        if let Some(gi) = grad_input.as_deref_mut() {
                            let kf = &kd[kbase + ci * f..kbase + (ci + 1) * f];
                            let mut acc = T::zero();
                            for (&kv, &gv) in kf.iter().zip(go) {
                                acc += kv * gv;
                            }
                            gi[base + ci] += acc;
                        }
                    }
                }
            }
        }
    }
}

/// 2×2 stride-2 max pooling. An odd trailing row or column is dropped.
/// Returns the pooled tensor and, per output, the flat input index of the
/// maximum (first in scan order on ties).
pub fn maxpool_forward<T: Scalar>(input: &Tensor<T>) -> Result<(Tensor<T>, Vec<usize>)> {
    let [h, w, c] = dims3(input, "pool input")?;
    let (oh, ow) = (h / 2, w / 2);
    if oh == 0 || ow == 0 {
        return Err(Error::ShapeMismatch(format!("cannot pool {:?}", input.dims())));
    }
    let x = input.data();
    let mut out = Vec::with_capacity(oh * ow * c);
    let mut argmax = Vec::with_capacity(oh * ow * c);
    for i in 0..oh {
        for j in 0..ow {
            for ch in 0..c {
                let mut best = (2 * i * w + 2 * j) * c + ch;
                for (a, b) in [(0, 1), (1, 0), (1, 1)] {
                    let idx = ((2 * i + a) * w + 2 * j + b) * c + ch;
                    if x[idx] > x[best] {
                        best = idx;
                    }
                }
                out.push(x[best]);
                argmax.push(best);
            }
        }
    }
    Ok((Tensor::from_vec(&[oh, ow, c], out)?, argmax))
}

/// Routes each output gradient to its stored argmax position.
pub fn maxpool_backward<T: Scalar>(grad_out: &Tensor<T>, argmax: &[usize], input_dims: &[usize]) -> Tensor<T> {
    let mut grad = Tensor::zeros(input_dims);
    let gd = grad.data_mut();
    for (&g, &idx) in grad_out.data().iter().zip(argmax) {
        gd[idx] += g;
    }
    grad
}

/// `weights · input + bias`.
pub fn dense_forward<T: Scalar>(input: &[T], weights: &Tensor<T>, bias: &Tensor<T>) -> Result<Vec<T>> {
    let [m, n] = match weights.dims() {
        &[m, n] => [m, n],
        d => return Err(Error::ShapeMismatch(format!("dense weights must be 2-D, got {d:?}"))),
    };
    if input.len() != n {
        return Err(Error::ShapeMismatch(format!("dense input has {} values, weights expect {n}", input.len())));
    }
    bias.expect_dims(&[m], "dense bias")?;
    let wd = weights.data();
    Ok((0..m)
        .map(|r| {
            let row = &wd[r * n..(r + 1) * n];
            let mut acc = bias.data()[r];
            for (&wv, &xv) in row.iter().zip(input) {
                acc += wv * xv;
            }
            acc
        })
        .collect())
}

/// Accumulates dense-layer gradients; returns the gradient w.r.t. the input.
pub fn dense_backward<T: Scalar>(
    input: &[T],
    weights: &Tensor<T>,
    grad_out: &[T],
    grad_weights: &mut [T],
    grad_bias: &mut [T],
) -> Vec<T> {
    let n = input.len();
    let wd = weights.data();
    let mut grad_in = vec![T::zero(); n];
    for (r, &g) in grad_out.iter().enumerate() {
        grad_bias[r] += g;
        let gw = &mut grad_weights[r * n..(r + 1) * n];
        for (gwv, &xv) in gw.iter_mut().zip(input) {
            *gwv += g * xv;
        }
        for (gi, &wv) in grad_in.iter_mut().zip(&wd[r * n..(r + 1) * n]) {
            *gi += g * wv;
        }
    }
    grad_in
}

/// Numerically stable softmax and cross-entropy `-ln p[label]`.
pub fn softmax_xent<T: Scalar>(logits: &[T], label: usize) -> (Vec<T>, T) {
    let probs = softmax(logits);
    let max = logits.iter().cloned().fold(T::neg_infinity(), T::max);
    let log_sum = logits.iter().map(|&z| (z - max).exp()).sum::<T>().ln();
    // log-domain loss avoids ln(0) when a probability underflows
    let loss = -(logits[label] - max - log_sum);
    (probs, loss)
}

pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().cloned().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: T = exps.iter().cloned().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn relu<T: Scalar>(t: &Tensor<T>) -> Tensor<T> {
    t.map(|v| v.max(T::zero()))
}

fn dims3<T: Scalar>(t: &Tensor<T>, what: &str) -> Result<[usize; 3]> {
    match t.dims() {
        &[a, b, c] => Ok([a, b, c]),
        d => Err(Error::ShapeMismatch(format!("{what} must be 3-D, got {d:?}"))),
    }
}

fn dims4<T: Scalar>(t: &Tensor<T>, what: &str) -> Result<[usize; 4]> {
    match t.dims() {
        &[a, b, c, d] => Ok([a, b, c, d]),
        d => Err(Error::ShapeMismatch(format!("{what} must be 4-D, got {d:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(dims: &[usize], data: Vec<f64>) -> Tensor<f64> {
        Tensor::from_vec(dims, data).unwrap()
    }

    #[test]
    fn conv_sum_of_ones() {
        let out = conv2d_forward(&t(&[3, 3, 1], vec![1.0; 9]), &t(&[2, 2, 1, 1], vec![1.0; 4]), &t(&[1], vec![0.0])).unwrap();
        assert_eq!(out.dims(), &[2, 2, 1]);
        assert_eq!(out.data(), &[4.0; 4]);
    }

    #[test]
    fn conv_delta_kernel_crops() {
        let input = t(&[4, 4, 1], (0..16).map(|v| v as f64).collect());
        let mut k = vec![0.0; 9];
        k[0] = 1.0;
        let out = conv2d_forward(&input, &t(&[3, 3, 1, 1], k), &t(&[1], vec![0.0])).unwrap();
        assert_eq!(out.data(), &[0.0, 1.0, 4.0, 5.0]);
    }

    #[test]
    fn conv_bias_only() {
        let out = conv2d_forward(&t(&[5, 4, 2], vec![3.0; 40]), &Tensor::zeros(&[3, 3, 2, 2]), &t(&[2], vec![5.0, 5.0])).unwrap();
        assert_eq!(out.dims(), &[3, 2, 2]);
        assert!(out.data().iter().all(|&v| v == 5.0));
    }

    #[test]
    fn conv_shape_errors() {
        let input = Tensor::<f64>::zeros(&[2, 2, 1]);
        assert!(conv2d_forward(&input, &Tensor::zeros(&[3, 3, 1, 1]), &Tensor::zeros(&[1])).is_err());
        assert!(conv2d_forward(&input, &Tensor::zeros(&[2, 2, 3, 1]), &Tensor::zeros(&[1])).is_err());
        assert!(conv2d_forward(&input, &Tensor::zeros(&[2, 2, 1, 1]), &Tensor::zeros(&[2])).is_err());
    }

    #[test]
    fn pool_basics() {
        let (out, arg) = maxpool_forward(&t(&[2, 2, 1], vec![1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(out.data(), &[4.0]);
        assert_eq!(arg, vec![3]);
        let (out, _) = maxpool_forward(&t(&[4, 6, 2], vec![1.5; 48])).unwrap();
        assert_eq!(out.dims(), &[2, 3, 2]);
        assert!(out.data().iter().all(|&v| v == 1.5));
        // 13x13 crops to 12x12 then pools to 6x6
        let (out, _) = maxpool_forward(&Tensor::<f64>::zeros(&[13, 13, 1])).unwrap();
        assert_eq!(out.dims(), &[6, 6, 1]);
    }

    #[test]
    fn pool_backward_routes_to_argmax() {
        let input = t(&[2, 2, 1], vec![1.0, 7.0, 3.0, 4.0]);
        let (_, arg) = maxpool_forward(&input).unwrap();
        let g = maxpool_backward(&t(&[1, 1, 1], vec![2.5]), &arg, input.dims());
        assert_eq!(g.data(), &[0.0, 2.5, 0.0, 0.0]);
    }

    #[test]
    fn dense_cases() {
        let eye = t(&[2, 2], vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(dense_forward(&[3.0, -1.0], &eye, &Tensor::zeros(&[2])).unwrap(), vec![3.0, -1.0]);
        let b = t(&[2], vec![0.5, 2.0]);
        assert_eq!(dense_forward(&[3.0, -1.0], &Tensor::zeros(&[2, 2]), &b).unwrap(), vec![0.5, 2.0]);
        assert_eq!(dense_forward(&[2.0, 3.0], &t(&[1, 2], vec![1.0, 1.0]), &t(&[1], vec![0.0])).unwrap(), vec![5.0]);
        assert!(dense_forward(&[2.0], &eye, &b).is_err());
    }

    #[test]
    fn softmax_cases() {
        let (p, loss) = softmax_xent(&[0.0f64, 0.0, 0.0], 1);
        for v in &p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((loss - 3f64.ln()).abs() < 1e-15);
        let (_, loss) = softmax_xent(&[800.0f64, 0.0, 0.0], 0);
        assert!((0.0..1e-300).contains(&loss));
        let (_, loss) = softmax_xent(&[-800.0f64, 0.0, 0.0], 0);
        assert!(loss.is_finite() && (loss - (800.0 + 2f64.ln())).abs() < 1e-9);
        assert_eq!(argmax(&[0.2, 0.5, 0.5]), 1);
        assert_eq!(argmax(&[1.0 / 3.0; 3]), 0);
    }

    proptest! {
        #[test]
        fn softmax_shift_invariant(logits in prop::collection::vec(-30.0f64..30.0, 2..8), shift in -100.0f64..100.0, label in 0usize..2) {
            let (p, l) = softmax_xent(&logits, label);
            let shifted: Vec<f64> = logits.iter().map(|v| v + shift).collect();
            let (q, m) = softmax_xent(&shifted, label);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&v| v > 0.0));
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            prop_assert!((l - m).abs() < 1e-9);
        }

        #[test]
        fn conv_is_linear(
            x in prop::collection::vec(-1.0f64..1.0, 5 * 5 * 2),
            y in prop::collection::vec(-1.0f64..1.0, 5 * 5 * 2),
            k in prop::collection::vec(-1.0f64..1.0, 3 * 3 * 2 * 3),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let kern = t(&[3, 3, 2, 3], k);
            let zero = Tensor::zeros(&[3]);
            let mix = t(&[5, 5, 2], x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect());
            let lhs = conv2d_forward(&mix, &kern, &zero).unwrap();
            let cx = conv2d_forward(&t(&[5, 5, 2], x), &kern, &zero).unwrap();
            let cy = conv2d_forward(&t(&[5, 5, 2], y), &kern, &zero).unwrap();
            for ((l, u), v) in lhs.data().iter().zip(cx.data()).zip(cy.data()) {
                prop_assert!((l - (a * u + b * v)).abs() < 1e-12);
            }
        }

        #[test]
        fn pool_backward_conserves_mass(x in prop::collection::vec(-1.0f64..1.0, 7 * 6 * 2), g in prop::collection::vec(-1.0f64..1.0, 3 * 3 * 2)) {
            let input = t(&[7, 6, 2], x);
            let (out, arg) = maxpool_forward(&input).unwrap();
            let gout = t(out.dims(), g);
            let gin = maxpool_backward(&gout, &arg, input.dims());
            let total_in: f64 = gin.data().iter().sum();
            let total_out: f64 = gout.data().iter().sum();
            prop_assert!((total_in - total_out).abs() < 1e-12);
        }
    }
}
