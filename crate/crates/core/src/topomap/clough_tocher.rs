//! C1 piecewise-cubic interpolation of scattered data (Clough–Tocher).
//!
//! Each Delaunay triangle is split at its centroid into three cubic Bézier
//! patches. Vertex control points come from the data values and vertex
//! gradients; the cross-boundary derivative along each edge is constrained to
//! vary linearly, measured in the direction joining the centroids of the two
//! triangles sharing the edge (or towards the centroid on the hull). Both
//! triangles agree on that direction, which makes the surface C1, and the
//! construction is affine invariant.

use super::montage::Montage2D;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Interpolant over a montage for one set of vertex values.
#[derive(Debug, Clone)]
pub struct CloughTocher<'a, T> {
    montage: &'a Montage2D<T>,
    values: Vec<T>,
    gradients: Vec<[T; 2]>,
    /// per-triangle edge-direction parameters, indexed like `neighbors`
    edge_g: Vec<[T; 3]>,
}

impl<'a, T: Scalar> CloughTocher<'a, T> {
    /// Builds the interpolant, estimating vertex gradients by least squares
    /// over each vertex's 1-ring.
    pub fn new(montage: &'a Montage2D<T>, values: &[T]) -> Result<Self> {
        check_values(montage, values)?;
        let gradients = estimate_gradients(montage, values);
        Ok(Self::with_gradients(montage, values, gradients))
    }

    /// Builds the interpolant with caller-supplied vertex gradients.
    ///
    /// # Panics
    ///
    /// Panics if the slice lengths do not match the montage.
    pub fn with_gradients(montage: &'a Montage2D<T>, values: &[T], gradients: Vec<[T; 2]>) -> Self {
        assert_eq!(values.len(), montage.len());
        assert_eq!(gradients.len(), montage.len());
        CloughTocher {
            montage,
            values: values.to_vec(),
            gradients,
            edge_g: edge_parameters(montage),
        }
    }

    pub fn gradients(&self) -> &[[T; 2]] {
        &self.gradients
    }

    /// Value at `p`, or `None` outside the convex hull.
    pub fn eval(&self, p: [T; 2]) -> Option<T> {
        let (t, b) = self.montage.locate(p)?;
        Some(self.eval_in(t, b))
    }

    /// Value inside triangle `t` at barycentric coordinates `b`.
    pub fn eval_in(&self, t: usize, b: [T; 3]) -> T {
        let tri = self.montage.triangles[t];
        let p = tri.map(|i| self.montage.points[i]);
        let f = tri.map(|i| self.values[i]);
        let df = tri.map(|i| self.gradients[i]);
        let g = self.edge_g[t];

        let e12 = sub(p[1], p[0]);
        let e23 = sub(p[2], p[1]);
        let e31 = sub(p[0], p[2]);

        // directional derivatives at each vertex along its two edges
        let df12 = dot(df[0], e12);
        let df21 = -dot(df[1], e12);
        let df23 = dot(df[1], e23);
        let df32 = -dot(df[2], e23);
        let df31 = dot(df[2], e31);
        let df13 = -dot(df[0], e31);

        let three = T::of(3.0);
        let two = T::of(2.0);
        let half = T::of(0.5);

        let c3000 = f[0];
        let c2100 = (df12 + three * c3000) / three;
        let c2010 = (df13 + three * c3000) / three;
        let c0300 = f[1];
        let c1200 = (df21 + three * c0300) / three;
        let c0210 = (df23 + three * c0300) / three;
        let c0030 = f[2];
        let c1020 = (df31 + three * c0030) / three;
        let c0120 = (df32 + three * c0030) / three;

        let c2001 = (c2100 + c2010 + c3000) / three;
        let c0201 = (c1200 + c0300 + c0210) / three;
        let c0021 = (c1020 + c0120 + c0030) / three;

        let c0111 = (g[0] * (-c0300 + three * c0210 - three * c0120 + c0030)
            + (-c0300 + two * c0210 - c0120 + c0021 + c0201))
            * half;
        let c1011 = (g[1] * (-c0030 + three * c1020 - three * c2010 + c3000)
            + (-c0030 + two * c1020 - c2010 + c2001 + c0021))
            * half;
        let c1101 = (g[2] * (-c3000 + three * c2100 - three * c1200 + c0300)
            + (-c3000 + two * c2100 - c1200 + c2001 + c0201))
            * half;

        let c1002 = (c1101 + c1011 + c2001) / three;
        let c0102 = (c1101 + c0111 + c0201) / three;
        let c0012 = (c1011 + c0111 + c0021) / three;
        let c0003 = (c1002 + c0102 + c0012) / three;

        // coordinates in the sub-triangle opposite the smallest barycentric
        // coordinate; one of b1..b3 is zero
        let m = b[0].min(b[1]).min(b[2]);
        let (b1, b2, b3, b4) = (b[0] - m, b[1] - m, b[2] - m, three * m);
        let six = T::of(6.0);

        b1 * b1 * b1 * c3000
            + three * b1 * b1 * b2 * c2100
            + three * b1 * b1 * b3 * c2010
            + three * b1 * b1 * b4 * c2001
            + three * b1 * b2 * b2 * c1200
            + six * b1 * b2 * b4 * c1101
            + three * b1 * b3 * b3 * c1020
            + six * b1 * b3 * b4 * c1011
            + three * b1 * b4 * b4 * c1002
            + b2 * b2 * b2 * c0300
            + three * b2 * b2 * b3 * c0210
            + three * b2 * b2 * b4 * c0201
            + three * b2 * b3 * b3 * c0120
            + six * b2 * b3 * b4 * c0111
            + three * b2 * b4 * b4 * c0102
            + b3 * b3 * b3 * c0030
            + three * b3 * b3 * b4 * c0021
            + three * b3 * b4 * b4 * c0012
            + b4 * b4 * b4 * c0003
    }
}

fn check_values<T: Scalar>(montage: &Montage2D<T>, values: &[T]) -> Result<()> {
    if values.len() != montage.len() {
        return Err(Error::LengthMismatch {
            expected: montage.len(),
            actual: values.len(),
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue(i));
    }
    Ok(())
}

/// Least-squares plane through each vertex and its 1-ring:
/// minimises `Σ_j (f_j − f_i − g·(p_j − p_i))²` over the gradient `g`.
pub fn estimate_gradients<T: Scalar>(montage: &Montage2D<T>, values: &[T]) -> Vec<[T; 2]> {
    (0..montage.len())
        .map(|i| {
            let pi = montage.points[i];
            let (mut sxx, mut sxy, mut syy, mut rx, mut ry) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
            for &j in &montage.rings[i] {
                let dx = montage.points[j][0] - pi[0];
                let dy = montage.points[j][1] - pi[1];
                let df = values[j] - values[i];
                sxx += dx * dx;
                sxy += dx * dy;
                syy += dy * dy;
                rx += dx * df;
                ry += dy * df;
            }
            // every vertex lies on a non-degenerate triangle, so the ring spans the plane
            let det = sxx * syy - sxy * sxy;
            [(syy * rx - sxy * ry) / det, (sxx * ry - sxy * rx) / det]
        })
        .collect()
}

fn edge_parameters<T: Scalar>(montage: &Montage2D<T>) -> Vec<[T; 3]> {
    let third = T::one() / T::of(3.0);
    (0..montage.triangles.len())
        .map(|t| {
            std::array::from_fn(|k| {
                let Some(nb) = montage.neighbors[t][k] else {
                    return T::of(-0.5);
                };
                let tri = montage.triangles[nb];
                let mut centroid = [T::zero(); 2];
                for &v in &tri {
                    centroid[0] += montage.points[v][0] * third;
                    centroid[1] += montage.points[v][1] * third;
                }
                let c = montage.barycentric(t, centroid);
                let two = T::of(2.0);
                let three = T::of(3.0);
                match k {
                    0 => (two * c[2] + c[1] - T::one()) / (two - three * c[2] - three * c[1]),
                    1 => (two * c[0] + c[2] - T::one()) / (two - three * c[0] - three * c[2]),
                    _ => (two * c[1] + c[0] - T::one()) / (two - three * c[1] - three * c[0]),
                }
            })
        })
        .collect()
}

fn sub<T: Scalar>(a: [T; 2], b: [T; 2]) -> [T; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}
