//! Clough–Tocher evaluation against frozen reference values.
//!
//! The expected values were produced by SciPy 1.15's
//! `CloughTocher2DInterpolator` with its vertex gradients overwritten by the
//! analytic gradient below, so only the element construction is compared.

use nif::topomap::{CloughTocher, Montage2D};

const POINTS: [[f64; 2]; 10] = [
    [-0.8, -0.6],
    [0.7, -0.75],
    [0.9, 0.3],
    [0.1, 0.95],
    [-0.85, 0.4],
    [0.05, -0.1],
    [-0.3, 0.35],
    [0.4, 0.2],
    [-0.2, -0.55],
    [0.45, -0.35],
];

fn f(p: [f64; 2]) -> f64 {
    (2.0 * p[0]).sin() * p[1].cos() + 0.3 * p[0] * p[1] * p[1]
}

fn grad(p: [f64; 2]) -> [f64; 2] {
    [
        2.0 * (2.0 * p[0]).cos() * p[1].cos() + 0.3 * p[1] * p[1],
        -(2.0 * p[0]).sin() * p[1].sin() + 0.6 * p[0] * p[1],
    ]
}

const REFERENCE: [([f64; 2], f64); 8] = [
    ([0.0, 0.0], -0.00023915006785547367),
    ([0.3, 0.1], 0.5616980969951486),
    ([-0.5, 0.0], -0.8262448237802934),
    ([0.2, -0.5], 0.33800264839079924),
    ([0.6, 0.0], 0.9265562061923986),
    ([-0.1, 0.7], -0.16472430354511267),
    ([-0.6, -0.3], -0.8927592167241553),
    ([0.35, 0.55], 0.5712988008023644),
];

#[test]
fn matches_reference_element() {
    let m = Montage2D::from_points(POINTS.to_vec()).unwrap();
    let mut tris: Vec<[usize; 3]> = m
        .triangles
        .iter()
        .map(|t| {
            let mut s = *t;
            s.sort();
            s
        })
        .collect();
    tris.sort();
    // same triangulation as the reference (points are in general position)
    assert_eq!(tris.len(), 13);

    let values: Vec<f64> = POINTS.iter().map(|&p| f(p)).collect();
    let grads = POINTS.iter().map(|&p| grad(p)).collect();
    let ct = CloughTocher::with_gradients(&m, &values, grads);
    for (p, expected) in REFERENCE {
        let got = ct.eval(p).unwrap();
        assert!((got - expected).abs() < 1e-12, "at {p:?}: {got} vs {expected}");
    }
    assert!(ct.eval([0.8, -0.5]).is_none());
}
