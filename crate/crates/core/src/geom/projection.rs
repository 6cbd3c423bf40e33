use super::{Approx, ConvexPolyhedron, Plane, PolyUnion, Vec3, TAU_GEOM};

/// `{Y in clip | segment XY meets P}` for convex `P`.
///
/// For `X` outside `P` this is the cone from `X` spanned by `P`'s silhouette,
/// cut by the facets of `P` that face `X`. `Over` relaxes every halfspace by
/// `TAU_GEOM`, `Under` tightens it.
pub fn project_polyhedron(
    x: Vec3,
    p: &ConvexPolyhedron,
    clip: &ConvexPolyhedron,
    mode: Approx,
) -> Option<ConvexPolyhedron> {
    let slack = match mode {
        Approx::Under => -TAU_GEOM,
        Approx::Over => TAU_GEOM,
    };
    let inside = match mode {
        Approx::Over => p.contains(x, TAU_GEOM),
        Approx::Under => p.max_violation(x) < -TAU_GEOM,
    };
    if inside {
        return Some(clip.clone());
    }
    let mut planes: Vec<Plane> = Vec::new();
    for h in p.planes() {
        if h.signed_distance(x) > TAU_GEOM {
            planes.push(h.shifted(slack));
        }
    }
    if planes.is_empty() {
        // X sits on the boundary without strictly seeing any facet
        planes.extend(p.planes().iter().map(|h| h.shifted(slack)));
    }
    let verts = p.vertices();
    for (i, j) in p.edges() {
        let (a, b) = (verts[i as usize], verts[j as usize]);
        let Some(mut h) = Plane::through((a - x).cross(b - x), x) else {
            continue;
        };
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for v in verts {
            let d = h.signed_distance(*v);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if hi > TAU_GEOM && lo < -TAU_GEOM {
            continue;
        }
        if hi > TAU_GEOM {
            h = h.flipped(0.0);
        }
        planes.push(h.shifted(slack));
    }
    clip.clip_by(&planes)
}

/// Union over members of `region` of their projections from `x`, within
/// `clip`.
pub fn project(x: Vec3, region: &PolyUnion, clip: &ConvexPolyhedron, mode: Approx) -> PolyUnion {
    PolyUnion::new(
        region
            .pieces()
            .iter()
            .filter_map(|p| project_polyhedron(x, p, clip, mode))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (ConvexPolyhedron, ConvexPolyhedron) {
        (
            ConvexPolyhedron::cube([1.0; 3], [2.0; 3]),
            ConvexPolyhedron::cube([-10.0; 3], [10.0; 3]),
        )
    }

    #[test]
    fn probes() {
        let (cube, clip) = setup();
        let s = project_polyhedron(Vec3::ZERO, &cube, &clip, Approx::Over).unwrap();
        assert!(s.contains(Vec3::new(4.0, 4.0, 4.0), 1e-9));
        assert!(!s.contains(Vec3::new(-1.0, -1.0, -1.0), 1e-9));
        assert!(s.contains(Vec3::new(1.5, 1.5, 1.5), 1e-9));
        // just in front of the cube is not shadowed
        assert!(!s.contains(Vec3::new(0.9, 0.9, 0.9), 1e-9));
    }

    #[test]
    fn inside_returns_clip() {
        let (cube, clip) = setup();
        let s = project_polyhedron(Vec3::splat(1.5), &cube, &clip, Approx::Over).unwrap();
        assert!((s.volume() - clip.volume()).abs() < 1e-9);
    }

    #[test]
    fn shadow_of_slab_from_above() {
        // viewer above a square tile: shadow below is a frustum
        let tile = ConvexPolyhedron::cube([-1.0, -1.0, 0.0], [1.0, 1.0, 0.1]);
        let clip = ConvexPolyhedron::cube([-10.0, -10.0, -1.0], [10.0, 10.0, 10.0]);
        let s = project_polyhedron(Vec3::new(0.0, 0.0, 1.0), &tile, &clip, Approx::Over).unwrap();
        // frustum through the top edges, from z=-1 up to the tile top
        let hw = |z: f64| (1.0 - z) / 0.9;
        let exact = {
            let (a, b) = (hw(-1.0), hw(0.1));
            // frustum volume of square cross-section with half-widths a, b, height 1.1
            1.1 / 3.0 * 4.0 * (a * a + a * b + b * b)
        };
        assert!((s.volume() - exact).abs() < 1e-4, "{} {exact}", s.volume());
    }
}
