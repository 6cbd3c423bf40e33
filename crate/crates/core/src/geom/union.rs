use super::{Aabb, Approx, ConvexPolyhedron, Vec3};
use crate::{Error, Result};

/// A finite union of convex polyhedra. Pieces may overlap.
#[derive(Debug, Clone, Default)]
pub struct PolyUnion {
    pieces: Vec<ConvexPolyhedron>,
}

impl PolyUnion {
    pub fn new(pieces: Vec<ConvexPolyhedron>) -> PolyUnion {
        PolyUnion { pieces }
    }

    pub fn empty() -> PolyUnion {
        PolyUnion { pieces: Vec::new() }
    }

    pub fn single(p: ConvexPolyhedron) -> PolyUnion {
        PolyUnion { pieces: vec![p] }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[ConvexPolyhedron] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<ConvexPolyhedron> {
        self.pieces
    }

    pub fn push(&mut self, p: ConvexPolyhedron) {
        self.pieces.push(p);
    }

    pub fn extend(&mut self, o: PolyUnion) {
        self.pieces.extend(o.pieces);
    }

    pub fn bbox(&self) -> Aabb {
        self.pieces
            .iter()
            .fold(Aabb::empty(), |b, p| b.union(p.bbox()))
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        self.pieces.iter().any(|c| c.contains(p, tol))
    }

    pub fn translated(&self, t: Vec3) -> PolyUnion {
        PolyUnion::new(self.pieces.iter().map(|p| p.translated(t)).collect())
    }

    /// Volume of the union (overlaps counted once).
    pub fn volume(&self) -> f64 {
        let mut total = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let mut rest = vec![p.clone()];
            for q in &self.pieces[..i] {
                if !q.bbox().intersects(p.bbox(), 0.0) {
                    continue;
                }
                rest = rest
                    .into_iter()
                    .flat_map(|r| r.difference(q, Approx::Over))
                    .collect();
                if rest.is_empty() {
                    break;
                }
            }
            total += rest.iter().map(|r| r.volume()).sum::<f64>();
        }
        total
    }

    /// Sum of piece volumes; equals `volume` when pieces are disjoint.
    pub fn piece_volume_sum(&self) -> f64 {
        self.pieces.iter().map(|p| p.volume()).sum()
    }

    /// Rewrites the union as interior-disjoint pieces.
    pub fn disjoint(&self) -> PolyUnion {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let mut rest = vec![p.clone()];
            for q in &self.pieces[..i] {
                if !q.bbox().intersects(p.bbox(), 0.0) {
                    continue;
                }
                rest = rest
                    .into_iter()
                    .flat_map(|r| r.difference(q, Approx::Over))
                    .collect();
            }
            out.extend(rest);
        }
        PolyUnion::new(out)
    }
}

pub fn bool_union(a: &PolyUnion, b: &PolyUnion) -> PolyUnion {
    let mut v = a.pieces.clone();
    v.extend(b.pieces.iter().cloned());
    PolyUnion::new(v)
}

pub fn bool_intersect(a: &PolyUnion, b: &PolyUnion) -> PolyUnion {
    let mut out = Vec::new();
    for p in &a.pieces {
        for q in &b.pieces {
            if let Some(r) = p.intersect(q) {
                out.push(r);
            }
        }
    }
    PolyUnion::new(out)
}

/// `a ∖ b`; `mode` picks which side of the cut the boundary tolerance errs on.
pub fn bool_diff(a: &PolyUnion, b: &PolyUnion, mode: Approx) -> PolyUnion {
    let mut out = Vec::new();
    for p in &a.pieces {
        let mut rest = vec![p.clone()];
        for q in &b.pieces {
            if !q.bbox().intersects(p.bbox(), 0.0) {
                continue;
            }
            rest = rest
                .into_iter()
                .flat_map(|r| r.difference(q, mode))
                .collect();
            if rest.is_empty() {
                break;
            }
        }
        out.extend(rest);
    }
    PolyUnion::new(out)
}

/// Distance from `p` to the union.
pub fn distance_point_region(p: Vec3, u: &PolyUnion) -> Result<f64> {
    if u.is_empty() {
        return Err(Error::domain("distance to an empty region"));
    }
    Ok(point_region_distance(p, u))
}

/// Distance from segment `ab` to the union.
pub fn distance_segment_region(a: Vec3, b: Vec3, u: &PolyUnion) -> Result<f64> {
    if u.is_empty() {
        return Err(Error::domain("distance to an empty region"));
    }
    Ok(segment_region_distance(a, b, u))
}

/// Distance from `p` to the union, `+∞` when it is empty.
pub(crate) fn point_region_distance(p: Vec3, u: &PolyUnion) -> f64 {
    let mut order: Vec<(f64, &ConvexPolyhedron)> = u
        .pieces
        .iter()
        .map(|c| (c.bbox().distance_to_point(p), c))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = f64::INFINITY;
    for (lb, c) in order {
        if lb >= best {
            break;
        }
        best = best.min(c.distance_to_point(p));
        if best == 0.0 {
            break;
        }
    }
    best
}

/// Distance from segment `ab` to the union, `+∞` when it is empty.
fn segment_region_distance(a: Vec3, b: Vec3, u: &PolyUnion) -> f64 {
    let seg_box = Aabb::from_points(&[a, b]);
    let mut order: Vec<(f64, &ConvexPolyhedron)> = u
        .pieces
        .iter()
        .map(|c| (box_box_distance(&seg_box, c.bbox()), c))
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    for (lb, c) in order {
        if lb >= best {
            break;
        }
        best = best.min(c.distance_to_segment(a, b));
        if best == 0.0 {
            break;
        }
    }
    best
}

fn box_box_distance(a: &Aabb, b: &Aabb) -> f64 {
    let gap = |lo1: f64, hi1: f64, lo2: f64, hi2: f64| (lo2 - hi1).max(lo1 - hi2).max(0.0);
    let dx = gap(a.min.x, a.max.x, b.min.x, b.max.x);
    let dy = gap(a.min.y, a.max.y, b.min.y, b.max.y);
    let dz = gap(a.min.z, a.max.z, b.min.z, b.max.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}
