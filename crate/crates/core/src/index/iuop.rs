use crate::geom::{Aabb, Approx, ConvexPolyhedron, PolyUnion, Vec3, TAU_GEOM};

use super::AabbTree;

/// Relative volume tolerance for accepting a pair merge in [`simplify`].
const MERGE_REL_TOL: f64 = 1e-9;

/// A [`PolyUnion`] with an AABB tree over its members.
#[derive(Debug, Clone, Default)]
pub struct IndexedUnion {
    union: PolyUnion,
    tree: Option<AabbTree>,
}

/// Work counters reported by the indexed operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpStats {
    /// Pairwise polyhedron operations actually performed.
    pub pair_ops: usize,
}

impl IndexedUnion {
    /// Indexes `union` as is (no simplification).
    pub fn new(union: PolyUnion) -> IndexedUnion {
        let boxes: Vec<Aabb> = union.pieces().iter().map(|p| *p.bbox()).collect();
        let tree = AabbTree::build(&boxes);
        IndexedUnion { union, tree }
    }

    pub fn empty() -> IndexedUnion {
        IndexedUnion::default()
    }

    pub fn from_pieces(pieces: Vec<ConvexPolyhedron>) -> IndexedUnion {
        IndexedUnion::new(PolyUnion::new(pieces))
    }

    pub fn union(&self) -> &PolyUnion {
        &self.union
    }

    pub fn into_union(self) -> PolyUnion {
        self.union
    }

    pub fn pieces(&self) -> &[ConvexPolyhedron] {
        self.union.pieces()
    }

    pub fn tree(&self) -> Option<&AabbTree> {
        self.tree.as_ref()
    }

    pub fn len(&self) -> usize {
        self.union.len()
    }

    pub fn is_empty(&self) -> bool {
        self.union.is_empty()
    }

    pub fn bbox(&self) -> Aabb {
        self.tree.as_ref().map_or(Aabb::empty(), |t| t.root_bbox())
    }

    /// Indices of members whose bbox meets `probe`.
    pub fn query(&self, probe: &Aabb) -> Vec<usize> {
        self.tree
            .as_ref()
            .map_or_else(Vec::new, |t| t.query(probe, 0.0))
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        let Some(t) = &self.tree else {
            return false;
        };
        t.query_point(p, tol)
            .into_iter()
            .any(|i| self.union.pieces()[i].contains(p, tol))
    }

    pub fn volume(&self) -> f64 {
        let pieces = self.union.pieces();
        let mut total = 0.0;
        for (i, p) in pieces.iter().enumerate() {
            let mut rest = vec![p.clone()];
            for j in self.query(p.bbox()) {
                if j >= i {
                    continue;
                }
                rest = rest
                    .into_iter()
                    .flat_map(|r| r.difference(&pieces[j], Approx::Over))
                    .collect();
                if rest.is_empty() {
                    break;
                }
            }
            total += rest.iter().map(|r| r.volume()).sum::<f64>();
        }
        total
    }

    /// Pieces overlapping `clip`, intersected with it.
    pub fn clipped(&self, clip: &ConvexPolyhedron) -> PolyUnion {
        PolyUnion::new(
            self.query(clip.bbox())
                .into_iter()
                .filter_map(|i| self.union.pieces()[i].intersect(clip))
                .collect(),
        )
    }
}

pub(crate) fn intersect_raw(a: &IndexedUnion, b: &IndexedUnion, stats: &mut OpStats) -> Vec<ConvexPolyhedron> {
    let mut out = Vec::new();
    if a.is_empty() || b.is_empty() || !a.bbox().intersects(&b.bbox(), 0.0) {
        return out;
    }
    // probe the larger tree with the members of the smaller union
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    for p in small.pieces() {
        for j in large.query(p.bbox()) {
            stats.pair_ops += 1;
            if let Some(r) = p.intersect(&large.pieces()[j]) {
                out.push(r);
            }
        }
    }
    out
}

pub(crate) fn diff_raw(
    a: &IndexedUnion,
    b: &IndexedUnion,
    mode: Approx,
    stats: &mut OpStats,
) -> Vec<ConvexPolyhedron> {
    let mut out = Vec::new();
    for p in a.pieces() {
        let mut rest = vec![p.clone()];
        for j in b.query(p.bbox()) {
            let q = &b.pieces()[j];
            let mut next = Vec::with_capacity(rest.len());
            for r in rest {
                if !r.bbox().intersects(q.bbox(), 0.0) {
                    next.push(r);
                    continue;
                }
                stats.pair_ops += 1;
                next.extend(r.difference(q, mode));
            }
            rest = next;
            if rest.is_empty() {
                break;
            }
        }
        out.extend(rest);
    }
    out
}

/// `A ∩ B`, simplified and re-indexed, with work counters.
pub fn iuop_intersect_with_stats(a: &IndexedUnion, b: &IndexedUnion) -> (IndexedUnion, OpStats) {
    let mut stats = OpStats::default();
    let raw = intersect_raw(a, b, &mut stats);
    (IndexedUnion::new(simplify(&PolyUnion::new(raw))), stats)
}

pub fn iuop_intersect(a: &IndexedUnion, b: &IndexedUnion) -> IndexedUnion {
    iuop_intersect_with_stats(a, b).0
}

pub fn iuop_union(list: &[&IndexedUnion]) -> IndexedUnion {
    let mut all = PolyUnion::empty();
    for u in list {
        all.extend(u.union.clone());
    }
    IndexedUnion::new(simplify(&all))
}

/// `A ∖ B`; B members whose bbox misses an A member are never visited.
pub fn iuop_diff(a: &IndexedUnion, b: &IndexedUnion, mode: Approx) -> IndexedUnion {
    let mut stats = OpStats::default();
    let raw = diff_raw(a, b, mode, &mut stats);
    IndexedUnion::new(simplify(&PolyUnion::new(raw)))
}

/// Merges members pairwise while the merge is exact, until no pair merges.
///
/// A member contained in another is dropped. Otherwise two members whose
/// boxes touch are replaced by their envelope when the envelope's volume
/// equals the volume of their union. Candidates with fewer combined
/// vertices are tried first.
pub fn simplify(u: &PolyUnion) -> PolyUnion {
    let mut live: Vec<Option<ConvexPolyhedron>> = u.pieces().iter().cloned().map(Some).collect();
    loop {
        let current: Vec<usize> = (0..live.len()).filter(|&i| live[i].is_some()).collect();
        if current.len() < 2 {
            break;
        }
        let boxes: Vec<Aabb> = current
            .iter()
            .map(|&i| *live[i].as_ref().unwrap().bbox())
            .collect();
        let tree = AabbTree::build(&boxes).expect("non-empty");
        let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
        for (a, b) in boxes.iter().enumerate() {
            for other in tree.query(b, TAU_GEOM) {
                if other > a {
                    let (i, j) = (current[a], current[other]);
                    let cost = live[i].as_ref().unwrap().vertices().len()
                        + live[j].as_ref().unwrap().vertices().len();
                    candidates.push((cost, i, j));
                }
            }
        }
        candidates.sort_unstable();
        let mut merged_any = false;
        for (_, i, j) in candidates {
            let (Some(p), Some(q)) = (&live[i], &live[j]) else {
                continue;
            };
            if let Some(m) = try_merge(p, q) {
                live[i] = Some(m);
                live[j] = None;
                merged_any = true;
            }
        }
        if !merged_any {
            break;
        }
    }
    PolyUnion::new(live.into_iter().flatten().collect())
}

fn try_merge(p: &ConvexPolyhedron, q: &ConvexPolyhedron) -> Option<ConvexPolyhedron> {
    if q.contains_poly(p, TAU_GEOM) {
        return Some(q.clone());
    }
    if p.contains_poly(q, TAU_GEOM) {
        return Some(p.clone());
    }
    let env = p.envelope(q)?;
    let (vp, vq) = (p.volume(), q.volume());
    let vi = p.intersect(q).map_or(0.0, |r| r.volume());
    let vu = vp + vq - vi;
    if (env.volume() - vu).abs() <= MERGE_REL_TOL * vu.max(f64::MIN_POSITIVE) {
        Some(env)
    } else {
        None
    }
}
