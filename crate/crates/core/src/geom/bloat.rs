use super::{sphere_approx, Aabb, Approx, ConvexPolyhedron, Plane, PolyUnion, Vec3, TAU_GEOM};
use crate::{Error, Result};

/// Minkowski sum of two convex polyhedra.
///
/// Facet normals of the sum are facet normals of either operand or
/// normalized cross products of an edge of each whose support sets meet;
/// each candidate gets offset `h_a(n) + h_b(n)`.
pub fn bloat_polyhedron(a: &ConvexPolyhedron, b: &ConvexPolyhedron) -> ConvexPolyhedron {
    let mut normals: Vec<Vec3> = Vec::new();
    normals.extend(a.planes().iter().map(|p| p.normal));
    normals.extend(b.planes().iter().map(|p| p.normal));

    let dirs = |p: &ConvexPolyhedron| -> Vec<(Vec3, Vec3, Vec3)> {
        p.edges()
            .into_iter()
            .filter_map(|(i, j)| {
                let (u, v) = (p.vertices()[i as usize], p.vertices()[j as usize]);
                (v - u).normalized().map(|d| (u, v, d))
            })
            .collect()
    };
    let ea = dirs(a);
    let eb = dirs(b);
    for &(a0, a1, da) in &ea {
        for &(b0, b1, db) in &eb {
            let Some(n) = da.cross(db).normalized() else {
                continue;
            };
            for n in [n, -n] {
                let ha = a.support(n);
                if n.dot(a0) < ha - TAU_GEOM || n.dot(a1) < ha - TAU_GEOM {
                    continue;
                }
                let hb = b.support(n);
                if n.dot(b0) < hb - TAU_GEOM || n.dot(b1) < hb - TAU_GEOM {
                    continue;
                }
                normals.push(n);
            }
        }
    }

    let mut planes: Vec<Plane> = Vec::with_capacity(normals.len());
    for n in normals {
        if planes.iter().any(|p| (p.normal - n).norm() < 1e-9) {
            continue;
        }
        planes.push(Plane {
            normal: n,
            offset: a.support(n) + b.support(n),
        });
    }
    let bound = Aabb::new(a.bbox().min + b.bbox().min, a.bbox().max + b.bbox().max);
    ConvexPolyhedron::from_aabb(&bound)
        .and_then(|p| p.clip_by(&planes))
        .expect("Minkowski sum of full-dimensional polyhedra is full-dimensional")
}

/// Approximation of `{x | dist(x, region) <= d}` within Hausdorff
/// distance `rho`.
pub fn bloat(region: &PolyUnion, d: f64, rho: f64, mode: Approx) -> Result<PolyUnion> {
    if !(d >= 0.0) {
        return Err(Error::domain(format!("bloating distance must be >= 0, got {d}")));
    }
    if d == 0.0 {
        return Ok(region.clone());
    }
    let ball = sphere_approx(Vec3::ZERO, d, rho, mode)?;
    Ok(PolyUnion::new(
        region
            .pieces()
            .iter()
            .map(|p| bloat_polyhedron(p, &ball))
            .collect(),
    ))
}
