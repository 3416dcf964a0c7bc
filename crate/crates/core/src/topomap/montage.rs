use std::collections::HashMap;

use spade::{DelaunayTriangulation, Point2, Triangulation};

use crate::eeg_io::{validate_montage, Electrode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Electrode positions in the scalp plane with their Delaunay triangulation.
///
/// Triangles are counter-clockwise; `neighbors[t][k]` is the triangle
/// across the edge opposite vertex `k` of triangle `t`, if any.
#[derive(Debug, Clone)]
pub struct Montage2D<T> {
    pub points: Vec<[T; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub neighbors: Vec<[Option<usize>; 3]>,
    /// Convex hull vertices, counter-clockwise.
    pub hull: Vec<usize>,
    /// Sorted 1-ring neighbours of every vertex.
    pub rings: Vec<Vec<usize>>,
}

/// Drops the z coordinate and triangulates the projected positions.
pub fn project_montage<T: Scalar>(electrodes: &[Electrode]) -> Result<Montage2D<T>> {
    if electrodes.len() < 4 {
        return Err(Error::MontageTooSmall(electrodes.len()));
    }
    validate_montage(electrodes)?;
    let points: Vec<[T; 2]> = electrodes.iter().map(|e| [T::of(e.x), T::of(e.y)]).collect();
    Montage2D::from_points(points)
}

impl<T: Scalar> Montage2D<T> {
    pub fn from_points(points: Vec<[T; 2]>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::MontageTooSmall(points.len()));
        }
        let mut dt: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
        let mut vertex_of_handle = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            let handle = dt
                .insert(Point2::new(p[0].to_f64_lossy(), p[1].to_f64_lossy()))
                .map_err(|e| Error::InvalidConfig(format!("electrode {i} cannot be triangulated: {e:?}")))?;
            if let Some(first) = vertex_of_handle.insert(handle.index(), i) {
                return Err(Error::DuplicatePosition { first, second: i });
            }
        }
        let mut triangles: Vec<[usize; 3]> = dt
            .inner_faces()
            .map(|f| f.vertices().map(|v| vertex_of_handle[&v.fix().index()]))
            .collect();
        if triangles.is_empty() {
            return Err(Error::CollinearMontage);
        }
        // canonical order, independent of insertion internals
        for t in triangles.iter_mut() {
            let lowest = (0..3).min_by_key(|&k| t[k]).unwrap();
            t.rotate_left(lowest);
        }
        triangles.sort_unstable();

        let neighbors = triangle_neighbors(&triangles);
        let hull = hull_cycle(&triangles, &neighbors);
        let mut rings = vec![Vec::new(); points.len()];
        for t in &triangles {
            for k in 0..3 {
                rings[t[k]].push(t[(k + 1) % 3]);
                rings[t[k]].push(t[(k + 2) % 3]);
            }
        }
        for r in rings.iter_mut() {
            r.sort_unstable();
            r.dedup();
        }
        Ok(Montage2D {
            points,
            triangles,
            neighbors,
            hull,
            rings,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Twice the signed area of triangle `t`.
    pub fn doubled_area(&self, t: usize) -> T {
        let [a, b, c] = self.triangles[t].map(|i| self.points[i]);
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    }

    /// Barycentric coordinates of `p` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, p: [T; 2]) -> [T; 3] {
        let [a, b, c] = self.triangles[t].map(|i| self.points[i]);
        let det = self.doubled_area(t);
        let b1 = ((p[0] - a[0]) * (c[1] - a[1]) - (p[1] - a[1]) * (c[0] - a[0])) / det;
        let b2 = ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / det;
        [T::one() - b1 - b2, b1, b2]
    }

    /// First triangle containing `p` (with a relative tolerance on the
    /// barycentric coordinates), and the coordinates.
    pub fn locate(&self, p: [T; 2]) -> Option<(usize, [T; 3])> {
        let tol = T::of(-1e-12);
        (0..self.triangles.len()).find_map(|t| {
            let b = self.barycentric(t, p);
            (b[0] >= tol && b[1] >= tol && b[2] >= tol).then_some((t, b))
        })
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> ([T; 2], [T; 2]) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }
}

fn triangle_neighbors(triangles: &[[usize; 3]]) -> Vec<[Option<usize>; 3]> {
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            edge_owner.insert((tri[(k + 1) % 3], tri[(k + 2) % 3]), t);
        }
    }
    triangles
        .iter()
        .map(|tri| {
            std::array::from_fn(|k| {
                // the neighbour traverses the shared edge in the other direction
                edge_owner.get(&(tri[(k + 2) % 3], tri[(k + 1) % 3])).copied()
            })
        })
        .collect()
}

/// Boundary edges chained into a counter-clockwise cycle starting at the
/// lowest vertex index.
fn hull_cycle(triangles: &[[usize; 3]], neighbors: &[[Option<usize>; 3]]) -> Vec<usize> {
    let mut next = HashMap::new();
    for (tri, nb) in triangles.iter().zip(neighbors) {
        for k in 0..3 {
            if nb[k].is_none() {
                next.insert(tri[(k + 1) % 3], tri[(k + 2) % 3]);
            }
        }
    }
    let start = *next.keys().min().expect("triangulation has a boundary");
    let mut hull = vec![start];
    let mut v = next[&start];
    while v != start && hull.len() <= next.len() {
        hull.push(v);
        v = next[&v];
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_z() {
        let electrodes = vec![
            Electrode::new("a", 0.3, -0.2, 0.9),
            Electrode::new("b", -0.5, 0.1, 0.8),
            Electrode::new("c", 0.2, 0.6, 0.7),
            Electrode::new("d", -0.1, -0.7, 0.6),
        ];
        let m = project_montage::<f64>(&electrodes).unwrap();
        assert_eq!(m.points[0], [0.3, -0.2]);
    }

    #[test]
    fn unit_square() {
        let m = Montage2D::<f64>::from_points(vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]]).unwrap();
        assert_eq!(m.triangles.len(), 2);
        assert_eq!(m.hull, vec![0, 1, 2, 3]);
        for t in 0..2 {
            assert!(m.doubled_area(t) > 0.0);
        }
        let total: f64 = (0..2).map(|t| m.doubled_area(t)).sum();
        assert_eq!(total, 2.0);
        // the two triangles share one edge
        let shared = m.neighbors.iter().flatten().filter(|n| n.is_some()).count();
        assert_eq!(shared, 2);
    }

    #[test]
    fn duplicate_projection_rejected() {
        let electrodes = vec![
            Electrode::new("a", 0.0, 0.0, 1.0),
            Electrode::new("b", 1.0, 0.0, 0.0),
            Electrode::new("c", 0.0, 1.0, 0.0),
            Electrode::new("d", 1.0, 0.0, -0.5),
        ];
        let err = project_montage::<f64>(&electrodes).unwrap_err();
        assert!(err.to_string().contains("duplicate projected position"), "{err}");
    }

    #[test]
    fn too_few_and_collinear() {
        let pts = vec![[0., 0.], [1., 0.], [2., 0.]];
        assert!(matches!(Montage2D::<f64>::from_points(pts), Err(Error::MontageTooSmall(3))));
        let pts = vec![[0., 0.], [1., 1.], [2., 2.], [3., 3.], [4., 4.]];
        assert!(matches!(Montage2D::<f64>::from_points(pts), Err(Error::CollinearMontage)));
    }

    #[test]
    fn locate_and_barycentric() {
        let m = Montage2D::<f64>::from_points(vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]]).unwrap();
        let (t, b) = m.locate([0.25, 0.5]).unwrap();
        let tri = m.triangles[t];
        let x: f64 = (0..3).map(|k| b[k] * m.points[tri[k]][0]).sum();
        let y: f64 = (0..3).map(|k| b[k] * m.points[tri[k]][1]).sum();
        assert!((x - 0.25).abs() < 1e-15 && (y - 0.5).abs() < 1e-15);
        assert!(m.locate([1.5, 0.5]).is_none());
    }

    #[test]
    fn rings_are_symmetric() {
        let cfg = crate::eeg_io::SynthConfig { montage_size: 32, ..Default::default() };
        let m = project_montage::<f64>(&cfg.montage()).unwrap();
        for (v, ring) in m.rings.iter().enumerate() {
            assert!(ring.len() >= 2);
            for &u in ring {
                assert!(m.rings[u].contains(&v));
            }
        }
        // Euler: T = 2n - h - 2 for a triangulated point set
        assert_eq!(m.triangles.len(), 2 * m.len() - m.hull.len() - 2);
    }
}
