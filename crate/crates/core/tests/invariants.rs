//! Property checks for the spectral and interpolation modules.

use nif::spectral::{dft_naive, fft, hann_window, one_sided_power, BandPowerFrame};
use nif::topomap::{CloughTocher, Montage2D, RenderPlan};
use proptest::prelude::*;

fn signal(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

/// Points in the unit disk, at least 0.02 apart.
fn montage_points() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), 6..30).prop_filter_map(
        "points too close",
        |polar| {
            let pts: Vec<[f64; 2]> = polar.iter().map(|&(r, t)| [r.sqrt() * t.cos(), r.sqrt() * t.sin()]).collect();
            for (i, a) in pts.iter().enumerate() {
                for b in &pts[..i] {
                    if (a[0] - b[0]).hypot(a[1] - b[1]) < 0.02 {
                        return None;
                    }
                }
            }
            Some(pts)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_agrees_with_naive(x in signal(1..300)) {
        let (a, b) = (fft(&x), dft_naive(&x));
        let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).norm() <= 1e-11 * scale);
        }
    }

    #[test]
    fn parseval(x in signal(1..500)) {
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let spectral: f64 = fft(&x).iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
        prop_assert!((energy - spectral).abs() <= 1e-10 * energy.max(1e-300));
    }

    #[test]
    fn one_sided_power_is_mean_square(x in signal(1..500)) {
        let ms = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        let ps = one_sided_power(&fft(&x), 128.0);
        prop_assert_eq!(ps.power.len(), x.len() / 2 + 1);
        let total: f64 = ps.power.iter().sum();
        prop_assert!((total - ms).abs() <= 1e-10 * ms.max(1e-300));
    }

    #[test]
    fn hann_is_symmetric(len in 2usize..2000) {
        let w: Vec<f64> = hann_window(len).unwrap();
        prop_assert_eq!(w[0], 0.0);
        prop_assert_eq!(w[len - 1], 0.0);
        for i in 0..len {
            prop_assert_eq!(w[i], w[len - 1 - i]);
            prop_assert!((0.0..=1.0).contains(&w[i]));
        }
    }

    #[test]
    fn interpolant_is_exact_at_sites_and_linear_on_planes(
        pts in montage_points(),
        vals in prop::collection::vec(-5.0f64..5.0, 30),
        plane in (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0),
    ) {
        let n = pts.len();
        let m = Montage2D::from_points(pts.clone()).unwrap();
        let ct = CloughTocher::new(&m, &vals[..n]).unwrap();
        for (p, v) in pts.iter().zip(&vals) {
            prop_assert!((ct.eval(*p).unwrap() - v).abs() < 1e-9);
        }
        let f = |p: [f64; 2]| plane.0 + plane.1 * p[0] + plane.2 * p[1];
        let lin: Vec<f64> = pts.iter().map(|&p| f(p)).collect();
        let ct = CloughTocher::new(&m, &lin).unwrap();
        for t in &m.triangles {
            let c = [0usize, 1].map(|k| (pts[t[0]][k] + pts[t[1]][k] + pts[t[2]][k]) / 3.0);
            prop_assert!((ct.eval(c).unwrap() - f(c)).abs() < 1e-6);
        }
    }

    #[test]
    fn rendering_is_bounded_and_scale_free(
        pts in montage_points(),
        powers in prop::collection::vec(0.0f64..100.0, 90),
        scale in 1e-3f64..1e3,
    ) {
        let n = pts.len();
        let frame = BandPowerFrame {
            powers: (0..n).map(|i| [powers[3 * i], powers[3 * i + 1], powers[3 * i + 2]]).collect(),
            label: 0,
        };
        let plan = RenderPlan::new(Montage2D::from_points(pts).unwrap(), 24);
        let a = plan.render(&frame).unwrap();
        let b = plan.render(&frame.scaled(scale)).unwrap();
        for r in 0..24 {
            for c in 0..24 {
                for ch in 0..3 {
                    let v = a.get(r, c, ch);
                    if plan.is_inside(r, c) {
                        prop_assert!((0.0..=1.0).contains(&v));
                    } else {
                        prop_assert_eq!(v, 0.0);
                    }
                    prop_assert!((v - b.get(r, c, ch)).abs() < 1e-9);
                }
            }
        }
    }
}
