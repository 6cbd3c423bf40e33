use std::collections::HashMap;

use super::distance::{point_triangle_distance, segment_triangle_distance};
use super::{Aabb, Approx, Plane, Vec3, TAU_GEOM};
use crate::{Error, Result};

/// Half-width of the starting box used when converting halfspaces to
/// vertices; anything reaching it is reported as unbounded.
const WORLD: f64 = 1.0e7;

/// Polyhedra thinner than this in some facet direction are treated as empty.
const FLAT: f64 = 10.0 * TAU_GEOM;

/// A facet: its supporting plane and vertex loop, counter-clockwise when
/// seen from outside.
#[derive(Debug, Clone)]
pub struct Face {
    pub plane: Plane,
    pub verts: Vec<u32>,
}

/// A bounded, full-dimensional convex polyhedron `{x | n_i · x <= b_i}`.
///
/// The halfspace list is irredundant: every plane supports a facet.
#[derive(Debug, Clone)]
pub struct ConvexPolyhedron {
    planes: Vec<Plane>,
    vertices: Vec<Vec3>,
    faces: Vec<Face>,
    bbox: Aabb,
}

/// Mutable face-list polyhedron used while clipping.
#[derive(Clone)]
struct Clipper {
    verts: Vec<Vec3>,
    faces: Vec<Face>,
}

enum ClipOutcome {
    Unchanged,
    Cut,
    Empty,
}

impl Clipper {
    fn from_box(b: &Aabb) -> Clipper {
        let (lo, hi) = (b.min, b.max);
        let verts: Vec<Vec3> = (0..8)
            .map(|i| {
                Vec3::new(
                    if i & 1 == 0 { lo.x } else { hi.x },
                    if i & 2 == 0 { lo.y } else { hi.y },
                    if i & 4 == 0 { lo.z } else { hi.z },
                )
            })
            .collect();
        let spec: [(Vec3, f64, [u32; 4]); 6] = [
            (Vec3::new(-1.0, 0.0, 0.0), -lo.x, [0, 4, 6, 2]),
            (Vec3::new(1.0, 0.0, 0.0), hi.x, [1, 3, 7, 5]),
            (Vec3::new(0.0, -1.0, 0.0), -lo.y, [0, 1, 5, 4]),
            (Vec3::new(0.0, 1.0, 0.0), hi.y, [2, 6, 7, 3]),
            (Vec3::new(0.0, 0.0, -1.0), -lo.z, [0, 2, 3, 1]),
            (Vec3::new(0.0, 0.0, 1.0), hi.z, [4, 5, 7, 6]),
        ];
        let faces = spec
            .iter()
            .map(|(n, b, loop_)| Face {
                plane: Plane {
                    normal: *n,
                    offset: *b,
                },
                verts: loop_.to_vec(),
            })
            .collect();
        Clipper { verts, faces }
    }

    fn from_poly(p: &ConvexPolyhedron) -> Clipper {
        Clipper {
            verts: p.vertices.clone(),
            faces: p.faces.clone(),
        }
    }

    fn clip(&mut self, plane: &Plane, tol: f64) -> ClipOutcome {
        let d: Vec<f64> = self.verts.iter().map(|v| plane.signed_distance(*v)).collect();
        let mut any_out = false;
        let mut any_in = false;
        for &x in &d {
            if x > tol {
                any_out = true;
            }
            if x < -tol {
                any_in = true;
            }
        }
        if !any_out {
            return ClipOutcome::Unchanged;
        }
        if !any_in {
            return ClipOutcome::Empty;
        }

        let mut edge_points: HashMap<(u32, u32), u32> = HashMap::new();
        let mut new_faces = Vec::with_capacity(self.faces.len() + 1);
        for face in &self.faces {
            let n = face.verts.len();
            let mut out: Vec<u32> = Vec::with_capacity(n + 2);
            for i in 0..n {
                let a = face.verts[i];
                let b = face.verts[(i + 1) % n];
                let (da, db) = (d[a as usize], d[b as usize]);
                if da <= tol {
                    out.push(a);
                }
                if (da < -tol && db > tol) || (da > tol && db < -tol) {
                    let key = (a.min(b), a.max(b));
                    let idx = *edge_points.entry(key).or_insert_with(|| {
                        let (va, vb) = (self.verts[a as usize], self.verts[b as usize]);
                        let t = da / (da - db);
                        self.verts.push(va + (vb - va) * t);
                        (self.verts.len() - 1) as u32
                    });
                    out.push(idx);
                }
            }
            dedup_loop(&mut out);
            if out.len() >= 3 {
                new_faces.push(Face {
                    plane: face.plane,
                    verts: out,
                });
            }
        }

        // cap polygon on the cutting plane
        let mut cap: Vec<u32> = edge_points.values().copied().collect();
        for (i, &x) in d.iter().enumerate() {
            if x.abs() <= tol {
                cap.push(i as u32);
            }
        }
        cap.sort_unstable();
        cap.dedup();
        // weld coincident cap points so that face loops stay consistent
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut unique: Vec<u32> = Vec::with_capacity(cap.len());
        for &c in &cap {
            let p = self.verts[c as usize];
            if let Some(&u) = unique
                .iter()
                .find(|&&u| self.verts[u as usize].dist(p) <= tol)
            {
                remap.insert(c, u);
            } else {
                unique.push(c);
            }
        }
        if !remap.is_empty() {
            for f in &mut new_faces {
                for v in &mut f.verts {
                    if let Some(&u) = remap.get(v) {
                        *v = u;
                    }
                }
                dedup_loop(&mut f.verts);
            }
            new_faces.retain(|f| f.verts.len() >= 3);
        }
        if unique.len() >= 3 {
            let centroid =
                unique.iter().fold(Vec3::ZERO, |acc, &i| acc + self.verts[i as usize])
                    / unique.len() as f64;
            let u = plane.normal.any_orthogonal();
            let w = plane.normal.cross(u);
            let mut keyed: Vec<(f64, u32)> = unique
                .iter()
                .map(|&i| {
                    let r = self.verts[i as usize] - centroid;
                    (w.dot(r).atan2(u.dot(r)), i)
                })
                .collect();
            keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
            let loop_: Vec<u32> = keyed.into_iter().map(|(_, i)| i).collect();
            new_faces.push(Face {
                plane: *plane,
                verts: loop_,
            });
        }
        self.faces = new_faces;
        if self.faces.len() < 4 {
            return ClipOutcome::Empty;
        }
        self.compact();
        ClipOutcome::Cut
    }

    fn compact(&mut self) {
        let mut map = vec![u32::MAX; self.verts.len()];
        let mut verts = Vec::with_capacity(self.verts.len());
        for f in &mut self.faces {
            for v in &mut f.verts {
                let old = *v as usize;
                if map[old] == u32::MAX {
                    map[old] = verts.len() as u32;
                    verts.push(self.verts[old]);
                }
                *v = map[old];
            }
        }
        self.verts = verts;
    }

    fn finish(self) -> Option<ConvexPolyhedron> {
        if self.verts.len() < 4 || self.faces.len() < 4 {
            return None;
        }
        let mut min_depth = f64::INFINITY;
        for f in &self.faces {
            let depth = self
                .verts
                .iter()
                .map(|v| -f.plane.signed_distance(*v))
                .fold(f64::NEG_INFINITY, f64::max);
            min_depth = min_depth.min(depth);
        }
        if !(min_depth > FLAT) {
            return None;
        }
        let bbox = Aabb::from_points(&self.verts);
        let planes = self.faces.iter().map(|f| f.plane).collect();
        Some(ConvexPolyhedron {
            planes,
            vertices: self.verts,
            faces: self.faces,
            bbox,
        })
    }
}

fn dedup_loop(l: &mut Vec<u32>) {
    l.dedup();
    while l.len() > 1 && l.first() == l.last() {
        l.pop();
    }
}

impl ConvexPolyhedron {
    /// Axis-aligned box. Returns `None` for a degenerate box.
    pub fn from_aabb(b: &Aabb) -> Option<ConvexPolyhedron> {
        if b.is_empty() {
            return None;
        }
        Clipper::from_box(b).finish()
    }

    pub fn cube(min: [f64; 3], max: [f64; 3]) -> ConvexPolyhedron {
        Self::from_aabb(&Aabb::new(min.into(), max.into())).expect("non-degenerate box")
    }

    /// Intersection of the given halfspaces. `Ok(None)` when the result is
    /// empty or not full-dimensional; an error when it is unbounded.
    pub fn from_halfspaces(planes: &[Plane]) -> Result<Option<ConvexPolyhedron>> {
        let world = Aabb::new(Vec3::splat(-WORLD), Vec3::splat(WORLD));
        let mut c = Clipper::from_box(&world);
        for p in order_for_clipping(planes) {
            match c.clip(p, TAU_GEOM) {
                ClipOutcome::Empty => return Ok(None),
                ClipOutcome::Unchanged | ClipOutcome::Cut => {}
            }
        }
        let Some(poly) = c.finish() else {
            return Ok(None);
        };
        let lim = WORLD * 0.999;
        if poly.bbox.min.x < -lim
            || poly.bbox.min.y < -lim
            || poly.bbox.min.z < -lim
            || poly.bbox.max.x > lim
            || poly.bbox.max.y > lim
            || poly.bbox.max.z > lim
        {
            return Err(Error::Unbounded("halfspace set does not bound a region".into()));
        }
        Ok(Some(poly))
    }

    /// Intersection of `self` with additional halfspaces.
    pub fn clip_by<'a>(&self, planes: impl IntoIterator<Item = &'a Plane>) -> Option<ConvexPolyhedron> {
        let mut c = Clipper::from_poly(self);
        let mut changed = false;
        for p in planes {
            match c.clip(p, TAU_GEOM) {
                ClipOutcome::Empty => return None,
                ClipOutcome::Cut => changed = true,
                ClipOutcome::Unchanged => {}
            }
        }
        if !changed {
            return Some(self.clone());
        }
        c.finish()
    }

    pub fn clip_by_plane(&self, plane: &Plane) -> Option<ConvexPolyhedron> {
        self.clip_by(std::iter::once(plane))
    }

    pub fn intersect(&self, other: &ConvexPolyhedron) -> Option<ConvexPolyhedron> {
        if !self.bbox.intersects(&other.bbox, TAU_GEOM) {
            return None;
        }
        // quick separating-plane rejection
        for p in &other.planes {
            if self.vertices.iter().all(|v| p.signed_distance(*v) >= -TAU_GEOM) {
                return None;
            }
        }
        for p in &self.planes {
            if other.vertices.iter().all(|v| p.signed_distance(*v) >= -TAU_GEOM) {
                return None;
            }
        }
        if self.vertices.len() >= other.vertices.len() {
            self.clip_by(&other.planes)
        } else {
            other.clip_by(&self.planes)
        }
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn bbox(&self) -> &Aabb {
        &self.bbox
    }

    pub fn face_points<'a>(&'a self, f: &'a Face) -> impl Iterator<Item = Vec3> + 'a {
        f.verts.iter().map(move |&i| self.vertices[i as usize])
    }

    /// Unique undirected edges as vertex index pairs.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e: Vec<(u32, u32)> = Vec::new();
        for f in &self.faces {
            let n = f.verts.len();
            for i in 0..n {
                let (a, b) = (f.verts[i], f.verts[(i + 1) % n]);
                e.push((a.min(b), a.max(b)));
            }
        }
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Fan triangulation of every face, as vertex triples.
    pub fn triangles(&self) -> impl Iterator<Item = [Vec3; 3]> + '_ {
        self.faces.iter().flat_map(move |f| {
            let v0 = self.vertices[f.verts[0] as usize];
            (1..f.verts.len() - 1).map(move |i| {
                [
                    v0,
                    self.vertices[f.verts[i] as usize],
                    self.vertices[f.verts[i + 1] as usize],
                ]
            })
        })
    }

    pub fn centroid_of_vertices(&self) -> Vec3 {
        self.vertices.iter().fold(Vec3::ZERO, |a, v| a + *v) / self.vertices.len() as f64
    }

    pub fn volume(&self) -> f64 {
        let o = self.centroid_of_vertices();
        let mut six_v = 0.0;
        for [a, b, c] in self.triangles() {
            six_v += (a - o).dot((b - o).cross(c - o));
        }
        (six_v / 6.0).abs()
    }

    /// Closed membership with slack `tol`.
    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        self.bbox.contains_point(p, tol) && self.planes.iter().all(|h| h.signed_distance(p) <= tol)
    }

    /// Largest halfspace violation (negative inside, approximates distance
    /// to the boundary from inside).
    pub fn max_violation(&self, p: Vec3) -> f64 {
        self.planes
            .iter()
            .map(|h| h.signed_distance(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn distance_to_point(&self, p: Vec3) -> f64 {
        if self.contains(p, 0.0) {
            return 0.0;
        }
        self.triangles()
            .map(|[a, b, c]| point_triangle_distance(p, a, b, c))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the closed segment meets the polyhedron (Cyrus-Beck).
    pub fn segment_intersects(&self, a: Vec3, b: Vec3) -> bool {
        let d = b - a;
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for h in &self.planes {
            let num = h.offset - h.normal.dot(a);
            let den = h.normal.dot(d);
            if den.abs() < 1e-300 {
                if num < 0.0 {
                    return false;
                }
            } else {
                let t = num / den;
                if den > 0.0 {
                    t1 = t1.min(t);
                } else {
                    t0 = t0.max(t);
                }
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }

    pub fn distance_to_segment(&self, a: Vec3, b: Vec3) -> f64 {
        if self.segment_intersects(a, b) {
            return 0.0;
        }
        self.triangles()
            .map(|[p, q, r]| segment_triangle_distance(a, b, p, q, r))
            .fold(f64::INFINITY, f64::min)
    }

    /// Support function `max_{x in P} u · x`.
    pub fn support(&self, u: Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|v| u.dot(*v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn translated(&self, t: Vec3) -> ConvexPolyhedron {
        ConvexPolyhedron {
            planes: self.planes.iter().map(|p| p.translated(t)).collect(),
            vertices: self.vertices.iter().map(|v| *v + t).collect(),
            faces: self
                .faces
                .iter()
                .map(|f| Face {
                    plane: f.plane.translated(t),
                    verts: f.verts.clone(),
                })
                .collect(),
            bbox: Aabb::new(self.bbox.min + t, self.bbox.max + t),
        }
    }

    /// Uniform scaling about the origin by `s > 0`.
    pub fn scaled(&self, s: f64) -> ConvexPolyhedron {
        assert!(s > 0.0);
        let scale_plane = |p: &Plane| Plane {
            normal: p.normal,
            offset: p.offset * s,
        };
        ConvexPolyhedron {
            planes: self.planes.iter().map(scale_plane).collect(),
            vertices: self.vertices.iter().map(|v| *v * s).collect(),
            faces: self
                .faces
                .iter()
                .map(|f| Face {
                    plane: scale_plane(&f.plane),
                    verts: f.verts.clone(),
                })
                .collect(),
            bbox: Aabb::new(self.bbox.min * s, self.bbox.max * s),
        }
    }

    /// Whether every vertex of `other` lies in `self` (within `tol`).
    pub fn contains_poly(&self, other: &ConvexPolyhedron, tol: f64) -> bool {
        self.bbox.contains_box(&other.bbox, tol)
            && other.vertices.iter().all(|v| self.contains(*v, tol))
    }

    /// Closure of `self ∖ other` as a list of convex pieces.
    ///
    /// `Under` shifts each complement halfspace outward by `TAU_GEOM` (pieces
    /// stay away from `other`); `Over` shifts it inward.
    pub fn difference(&self, other: &ConvexPolyhedron, mode: Approx) -> Vec<ConvexPolyhedron> {
        if self.intersect(other).is_none() {
            return vec![self.clone()];
        }
        let shift = match mode {
            Approx::Under => TAU_GEOM,
            Approx::Over => -TAU_GEOM,
        };
        let mut pieces = Vec::new();
        let mut cur = Clipper::from_poly(self);
        for h in &other.planes {
            let cuts = cur.verts.iter().any(|v| h.signed_distance(*v) > TAU_GEOM);
            if !cuts {
                continue;
            }
            let mut outside = cur.clone();
            match outside.clip(&h.flipped(shift), TAU_GEOM) {
                ClipOutcome::Empty => {}
                _ => {
                    if let Some(p) = outside.finish() {
                        pieces.push(p);
                    }
                }
            }
            match cur.clip(h, TAU_GEOM) {
                ClipOutcome::Empty => return pieces,
                _ => {}
            }
        }
        pieces
    }

    /// Closure of `clip ∖ self` decomposed radially: one piece per facet of
    /// `self`, bounded by the cone from an interior point through the facet.
    pub fn complement_within(&self, clip: &ConvexPolyhedron, mode: Approx) -> Vec<ConvexPolyhedron> {
        if clip.intersect(self).is_none() {
            return vec![clip.clone()];
        }
        let center = self.centroid_of_vertices();
        let shift = match mode {
            Approx::Under => TAU_GEOM,
            Approx::Over => -TAU_GEOM,
        };
        let mut out = Vec::new();
        for f in &self.faces {
            // skip facets whose outer side misses the clip region
            if clip
                .vertices
                .iter()
                .all(|v| f.plane.signed_distance(*v) <= -shift)
            {
                continue;
            }
            let pts: Vec<Vec3> = self.face_points(f).collect();
            let fc = pts.iter().fold(Vec3::ZERO, |a, v| a + *v) / pts.len() as f64;
            let mut planes = Vec::with_capacity(pts.len() + 1);
            planes.push(f.plane.flipped(shift));
            for i in 0..pts.len() {
                let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
                let Some(mut p) = Plane::through((a - center).cross(b - center), center) else {
                    continue;
                };
                if p.signed_distance(fc) > 0.0 {
                    p = p.flipped(0.0);
                }
                planes.push(p);
            }
            if let Some(piece) = clip.clip_by(&planes) {
                out.push(piece);
            }
        }
        out
    }

    /// Envelope of two polyhedra: the halfspaces of each that contain the
    /// other. Equals the union exactly when the union is convex.
    pub fn envelope(&self, other: &ConvexPolyhedron) -> Option<ConvexPolyhedron> {
        let mut planes: Vec<Plane> = Vec::new();
        for h in &self.planes {
            if other.vertices.iter().all(|v| h.signed_distance(*v) <= TAU_GEOM) {
                planes.push(*h);
            }
        }
        for h in &other.planes {
            if self.vertices.iter().all(|v| h.signed_distance(*v) <= TAU_GEOM) {
                planes.push(*h);
            }
        }
        let bound = self.bbox.union(&other.bbox);
        let start = ConvexPolyhedron::from_aabb(&bound)?;
        start.clip_by(&planes)
    }

    /// Canonical halfspace rows `[nx, ny, nz, b]`.
    pub fn halfspace_rows(&self) -> Vec<[f64; 4]> {
        self.planes.iter().map(|p| p.to_array()).collect()
    }
}

/// Box-like planes first: they shrink the world box quickly and keep the
/// intermediate vertex counts small.
fn order_for_clipping(planes: &[Plane]) -> Vec<&Plane> {
    let mut v: Vec<&Plane> = planes.iter().collect();
    v.sort_by(|a, b| {
        let ka = axis_score(a.normal);
        let kb = axis_score(b.normal);
        kb.total_cmp(&ka)
    });
    v
}

fn axis_score(n: Vec3) -> f64 {
    n.x.abs().max(n.y.abs()).max(n.z.abs())
}
