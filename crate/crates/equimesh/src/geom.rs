//! The regularizing element transformation.
//!
//! A triangle is transformed by rotating each vertex spoke `x_i - c` (with `c`
//! the centroid) onto the direction of the next vertex while keeping its
//! length, then resetting the centroid. Folded into a single step this reads
//!
//! ```text
//! x_i' = 2/3 r_i (x_i - c) - 1/3 r_{i+1} (x_{i+1} - c) - 1/3 r_{i-1} (x_{i-1} - c) + c
//! r_i  = |x_{i-1} - c| / |x_i - c|
//! ```
//!
//! with cyclic indices. Iterating drives every triangle to an equilateral one:
//! the largest vertex-centroid distance strictly shrinks and the smallest
//! strictly grows, so all ratios `r_i` tend to 1. The same formula applies
//! verbatim to triangles embedded in 3D (it only uses distances to the
//! centroid), which is how tetrahedra are smoothed face by face.
//!
//! [`transform_polygon`] is the k-gon generalization. It does **not** converge
//! in general: a kite quadrilateral with opposite spokes of equal length is
//! exactly 2-periodic (see the tests), so polygons are transformed for
//! demonstration purposes only.

use nalgebra::SVector;
use thiserror::Error;

/// Euclidean position, `D` = 2 or 3.
pub type Point<const D: usize> = SVector<f64, D>;

/// Vertices closer than `RADIUS_EPS_FACTOR` × diameter to the centroid are
/// rejected rather than transformed.
pub const RADIUS_EPS_FACTOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// A vertex (almost) coincides with the element centroid; the ratios
    /// `r_i` are not computable.
    #[error("vertex {vertex} is within {limit:.3e} of the element centroid")]
    NearCentroidVertex { vertex: usize, limit: f64 },
}

/// Outcome of [`iterate_triangle`].
#[derive(Debug, Clone)]
pub struct TriangleIteration<const D: usize> {
    /// Final triangle.
    pub triangle: [Point<D>; 3],
    /// Number of transformation steps applied.
    pub iterations: usize,
    /// Radius ratios of every visited state, the input first
    /// (`iterations + 1` entries).
    pub ratio_history: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Error)]
pub enum IterateError<const D: usize> {
    #[error(transparent)]
    Geom(#[from] GeomError),
    /// Tolerance not reached; carries the last state.
    #[error("max |r - 1| = {deviation:.3e} after {} iterations (tolerance {tol:.3e})", .last.iterations)]
    MaxIterExceeded {
        tol: f64,
        deviation: f64,
        last: TriangleIteration<D>,
    },
}

/// Arithmetic mean of the vertices.
pub fn centroid<const D: usize>(vertices: &[Point<D>]) -> Point<D> {
    let mut sum = Point::<D>::zeros();
    for v in vertices {
        sum += v;
    }
    sum / vertices.len() as f64
}

/// Largest pairwise vertex distance.
pub fn diameter<const D: usize>(vertices: &[Point<D>]) -> f64 {
    let mut max = 0.0_f64;
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            max = max.max((vertices[i] - vertices[j]).norm());
        }
    }
    max
}

/// Distances from each vertex to the centroid, guarded against vertices at
/// the centroid.
fn centroid_distances<const D: usize>(vertices: &[Point<D>]) -> Result<Vec<f64>, GeomError> {
    let c = centroid(vertices);
    let limit = RADIUS_EPS_FACTOR * diameter(vertices);
    vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let d = (v - c).norm();
            if d <= limit {
                Err(GeomError::NearCentroidVertex { vertex: i, limit })
            } else {
                Ok(d)
            }
        })
        .collect()
}

/// Cyclic ratios `r_i = |x_{i-1} - c| / |x_i - c|` of an element's
/// vertex-centroid distances. Their product is 1 by construction
/// (telescoping), up to rounding.
pub fn radius_ratios<const D: usize>(vertices: &[Point<D>]) -> Result<Vec<f64>, GeomError> {
    let d = centroid_distances(vertices)?;
    let k = d.len();
    Ok((0..k).map(|i| d[(i + k - 1) % k] / d[i]).collect())
}

/// One transformation step. The centroid of the output equals the centroid of
/// the input; the max vertex-centroid distance strictly decreases and the min
/// strictly increases for every non-equilateral triangle.
pub fn transform_triangle<const D: usize>(tri: &[Point<D>; 3]) -> Result<[Point<D>; 3], GeomError> {
    let c = centroid(tri);
    let u = [tri[0] - c, tri[1] - c, tri[2] - c];
    let limit = RADIUS_EPS_FACTOR * diameter(tri);
    let mut d = [0.0_f64; 3];
    for (i, ui) in u.iter().enumerate() {
        d[i] = ui.norm();
        if d[i] <= limit {
            return Err(GeomError::NearCentroidVertex { vertex: i, limit });
        }
    }
    let r = [d[2] / d[0], d[0] / d[1], d[1] / d[2]];
    let mut out = [Point::<D>::zeros(); 3];
    for i in 0..3 {
        let next = (i + 1) % 3;
        let prev = (i + 2) % 3;
        out[i] = u[i] * (2.0 / 3.0 * r[i]) - u[next] * (r[next] / 3.0) - u[prev] * (r[prev] / 3.0)
            + c;
    }
    Ok(out)
}

/// Repeats [`transform_triangle`] until `max_i |r_i - 1| < tol` or `max_iter`
/// steps were taken. An equilateral input converges at iteration 0.
pub fn iterate_triangle<const D: usize>(
    tri: &[Point<D>; 3],
    tol: f64,
    max_iter: usize,
) -> Result<TriangleIteration<D>, IterateError<D>> {
    assert!(tol > 0.0, "tolerance must be positive");
    let mut current = *tri;
    let mut history = vec![ratio_triple(&current)?];
    loop {
        let deviation = history
            .last()
            .unwrap()
            .iter()
            .fold(0.0_f64, |m, r| m.max((r - 1.0).abs()));
        let iterations = history.len() - 1;
        if deviation < tol {
            return Ok(TriangleIteration {
                triangle: current,
                iterations,
                ratio_history: history,
            });
        }
        if iterations >= max_iter {
            return Err(IterateError::MaxIterExceeded {
                tol,
                deviation,
                last: TriangleIteration {
                    triangle: current,
                    iterations,
                    ratio_history: history,
                },
            });
        }
        current = transform_triangle(&current)?;
        history.push(ratio_triple(&current)?);
    }
}

fn ratio_triple<const D: usize>(tri: &[Point<D>; 3]) -> Result<[f64; 3], GeomError> {
    let r = radius_ratios(tri)?;
    Ok([r[0], r[1], r[2]])
}

/// The k-gon generalization: with the centroid moved to the origin,
///
/// ```text
/// x_i' = (k-1)/k r_i x_i - 1/k sum_{j != i} r_j x_j
/// ```
///
/// The input is re-centred first and the output centroid stays at the origin
/// exactly (the weighted sums cancel). Callers are expected to pass a convex
/// polygon; only vanishing radii are rejected.
pub fn transform_polygon(polygon: &[Point<2>]) -> Result<Vec<Point<2>>, GeomError> {
    let k = polygon.len();
    assert!(k >= 3, "polygon needs at least 3 vertices");
    let c = centroid(polygon);
    let x: Vec<Point<2>> = polygon.iter().map(|p| p - c).collect();
    let d = centroid_distances(polygon)?;
    let r: Vec<f64> = (0..k).map(|i| d[(i + k - 1) % k] / d[i]).collect();
    let mut s = Point::<2>::zeros();
    for j in 0..k {
        s += x[j] * r[j];
    }
    // (k-1)/k r_i x_i - 1/k (s - r_i x_i)  ==  r_i x_i - s/k
    Ok((0..k).map(|i| x[i] * r[i] - s / k as f64).collect())
}
