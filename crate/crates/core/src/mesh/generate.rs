//! Built-in test geometries.

use std::collections::HashMap;

use super::{cross, dot3, sub, MeshError, ProblemMode, SurfaceMesh};
use crate::scalar::Real;

/// Finest icosphere level accepted by [`gen_sphere`] (163 842 vertices).
pub const MAX_SPHERE_LEVEL: usize = 7;

fn normalize<T: Real>(p: [T; 3]) -> [T; 3] {
    let n = dot3(&p, &p).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

/// Unit sphere: an icosahedron with two vertices on the `x₃` axis,
/// subdivided `level` times with every new vertex projected radially.
/// `V = 10·4^level + 2`.
pub fn gen_sphere<T: Real>(level: usize) -> Result<SurfaceMesh<T>, MeshError> {
    if level > MAX_SPHERE_LEVEL {
        return Err(MeshError::InvalidParameters(format!(
            "sphere level {level} exceeds {MAX_SPHERE_LEVEL}"
        )));
    }
    let z = T::one() / T::lit(5.0).sqrt();
    let rho = T::lit(2.0) * z;
    let mut verts: Vec<[T; 3]> = vec![[T::zero(), T::zero(), T::one()], [T::zero(), T::zero(), -T::one()]];
    let tau = T::lit(2.0) * T::pi() / T::lit(5.0);
    for k in 0..5 {
        let a = tau * T::from_usize_lossy(k);
        verts.push([rho * a.cos(), rho * a.sin(), z]);
    }
    for k in 0..5 {
        let a = tau * T::from_usize_lossy(k) + tau / T::lit(2.0);
        verts.push([rho * a.cos(), rho * a.sin(), -z]);
    }
    let up = |k: usize| 2 + k % 5;
    let lo = |k: usize| 7 + k % 5;
    let mut tris = Vec::with_capacity(20);
    for k in 0..5 {
        tris.push([0, up(k), up(k + 1)]);
        tris.push([up(k), lo(k), up(k + 1)]);
        tris.push([up(k + 1), lo(k), lo(k + 1)]);
        tris.push([1, lo(k + 1), lo(k)]);
    }
    for tri in tris.iter_mut() {
        let n = cross(
            &sub(&verts[tri[1]], &verts[tri[0]]),
            &sub(&verts[tri[2]], &verts[tri[0]]),
        );
        if dot3(&n, &verts[tri[0]]) < T::zero() {
            tri.swap(1, 2);
        }
    }

    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::with_capacity(tris.len() * 2);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[T; 3]>| -> usize {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (pa, pb) = (verts[a], verts[b]);
                verts.push(normalize([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        tris = next;
    }
    SurfaceMesh::new(verts, tris, Some(ProblemMode::ZeroMean))
}

/// Torus `x = [(R + r cos φ₁) cos φ₂, (R + r cos φ₁) sin φ₂, r sin φ₁]` on a
/// structured `n1 × n2` parameter grid; each cell is split into two triangles.
pub fn gen_torus<T: Real>(major: T, minor: T, n1: usize, n2: usize) -> Result<SurfaceMesh<T>, MeshError> {
    if !(minor > T::zero() && minor < major && major.is_finite()) {
        return Err(MeshError::InvalidParameters(format!(
            "torus radii must satisfy 0 < r < R (got R = {major}, r = {minor})"
        )));
    }
    if n1 < 3 || n2 < 3 {
        return Err(MeshError::InvalidParameters(format!(
            "torus resolution must be at least 3 x 3 (got {n1} x {n2})"
        )));
    }
    let two_pi = T::lit(2.0) * T::pi();
    let mut verts = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        let p1 = two_pi * T::from_usize_lossy(i) / T::from_usize_lossy(n1);
        let ring = major + minor * p1.cos();
        for j in 0..n2 {
            let p2 = two_pi * T::from_usize_lossy(j) / T::from_usize_lossy(n2);
            verts.push([ring * p2.cos(), ring * p2.sin(), minor * p1.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % n1) * n2 + (j % n2);
    let mut tris = Vec::with_capacity(2 * n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([v00, v10, v11]);
            tris.push([v00, v11, v01]);
        }
    }
    SurfaceMesh::new(verts, tris, Some(ProblemMode::PositiveReaction))
}

/// Graded 1-d node set on `[-1, 1]`: `2·N0` uniform intervals, with `p`
/// extra nodes at offsets `h·2^{-n}` (`n = 1..p`, `h = 1/N0`) measured from
/// `-1`, `0⁻`, `0⁺` and `1` inside the four adjacent intervals.
/// Returns `2·N0 + 4p + 1` increasing nodes.
pub fn graded_nodes<T: Real>(n0: usize, p: usize) -> Vec<T> {
    let h = T::one() / T::from_usize_lossy(n0);
    let n1 = 2 * n0;
    let mut nodes: Vec<T> = (0..=n1).map(|k| -T::one() + h * T::from_usize_lossy(k)).collect();
    // exact centre and right end, independent of rounding in k·h
    nodes[n0] = T::zero();
    nodes[n1] = T::one();
    let mut offset = h;
    for _ in 0..p {
        offset /= T::lit(2.0);
        nodes.push(-T::one() + offset);
        nodes.push(-offset);
        nodes.push(offset);
        nodes.push(T::one() - offset);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    nodes
}

/// Tensor grid on `xs × ys` in the plane `x₃ = 0`. Each cell is split along
/// the diagonal that points at the origin or at the outer corner of its
/// quadrant, so the pattern is symmetric about both axes.
pub fn tensor_grid<T: Real>(xs: &[T], ys: &[T], mode: ProblemMode) -> Result<SurfaceMesh<T>, MeshError> {
    let (nx, ny) = (xs.len(), ys.len());
    if nx < 2 || ny < 2 {
        return Err(MeshError::InvalidParameters(
            "tensor grid needs at least two nodes per direction".into(),
        ));
    }
    let mut verts = Vec::with_capacity(nx * ny);
    for &y in ys {
        for &x in xs {
            verts.push([x, y, T::zero()]);
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut tris = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    let half = T::lit(0.5);
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let xc = half * (xs[i] + xs[i + 1]);
            let yc = half * (ys[j] + ys[j + 1]);
            if xc * yc > T::zero() {
                tris.push([v00, v10, v11]);
                tris.push([v00, v11, v01]);
            } else {
                tris.push([v00, v10, v01]);
                tris.push([v10, v11, v01]);
            }
        }
    }
    SurfaceMesh::new(verts, tris, Some(mode))
}

/// Graded checkerboard grid on `[-1, 1]²` (Dirichlet hint).
pub fn gen_graded_square<T: Real>(n0: usize, p: usize) -> Result<SurfaceMesh<T>, MeshError> {
    if n0 < 2 {
        return Err(MeshError::InvalidParameters(format!(
            "graded square needs N0 >= 2 (got {n0})"
        )));
    }
    let nodes = graded_nodes::<T>(n0, p);
    tensor_grid(&nodes, &nodes, ProblemMode::Dirichlet)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosahedron() {
        let m = gen_sphere::<f64>(0).unwrap();
        assert_eq!(m.num_vertices(), 12);
        assert_eq!(m.num_triangles(), 20);
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.is_closed());
    }

    #[test]
    fn sphere_counts_and_projection() {
        for level in 0..=4 {
            let m = gen_sphere::<f64>(level).unwrap();
            assert_eq!(m.num_vertices(), 10 * 4usize.pow(level as u32) + 2);
            assert_eq!(m.num_triangles(), 20 * 4usize.pow(level as u32));
            assert_eq!(m.euler_characteristic(), 2);
            for v in m.vertices() {
                assert!((dot3(v, v).sqrt() - 1.0).abs() <= 1e-15);
            }
        }
        assert!(gen_sphere::<f64>(MAX_SPHERE_LEVEL + 1).is_err());
    }

    #[test]
    fn sphere_refinement_halves_edges() {
        let mut prev = gen_sphere::<f64>(1).unwrap();
        for level in 2..=4 {
            let m = gen_sphere::<f64>(level).unwrap();
            assert_eq!(m.num_triangles(), 4 * prev.num_triangles());
            let ratio = m.max_edge_length() / prev.max_edge_length();
            assert!((ratio - 0.5).abs() < 0.05, "level {level} ratio {ratio}");
            prev = m;
        }
    }

    #[test]
    fn torus_topology_and_surface() {
        let m = gen_torus(0.5, 0.2, 4, 4).unwrap();
        assert_eq!(m.num_vertices(), 16);
        assert_eq!(m.num_triangles(), 32);
        assert_eq!(m.euler_characteristic(), 0);
        let m = gen_torus(0.5f64, 0.2, 24, 40).unwrap();
        for v in m.vertices() {
            let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
            assert!(((rho - 0.5).powi(2) + v[2] * v[2] - 0.04).abs() < 1e-14);
        }
        assert!(gen_torus(0.2, 0.5, 8, 8).is_err());
        assert!(gen_torus(0.5, 0.2, 2, 8).is_err());
    }

    #[test]
    fn graded_square_uniform_case() {
        let m = gen_graded_square::<f64>(2, 0).unwrap();
        assert_eq!(m.num_vertices(), 25);
        assert_eq!(m.boundary_vertices().len(), 16);
        assert_eq!(m.mode_hint(), ProblemMode::Dirichlet);
    }

    #[test]
    fn graded_nodes_counts_and_ratio() {
        let nodes = graded_nodes::<f64>(500, 12);
        assert_eq!(nodes.len(), 1049);
        // interior (free) nodes per direction
        assert_eq!(nodes.len() - 2, 1047);
        for (n0, p) in [(4, 3), (25, 12), (500, 12)] {
            let nodes = graded_nodes::<f64>(n0, p);
            let gaps: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
            let hmax = gaps.iter().cloned().fold(0.0, f64::max);
            let hmin = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((hmax / hmin - 2f64.powi(p as i32)).abs() < 1e-6 * 2f64.powi(p as i32));
        }
    }
}
