use crate::geom::{raw_angle, Aabb, Vec3};
use crate::scenario::{Placed, Scenario};
use crate::{Error, Result};

/// Whether `sensor` alone satisfies the range and line-of-sight conditions
/// for `x` at quality `q`.
fn sees(x: Vec3, sensor: &Placed, q: usize, sc: &Scenario) -> bool {
    let cap = sc.sensors[sensor.sensor].capabilities[q];
    if x.dist(sensor.pos) > cap.range {
        return false;
    }
    segment_clear(x, sensor.pos, cap.ffz, sc)
}

/// `dist(segment ab, O) > f`.
pub(crate) fn segment_clear(a: Vec3, b: Vec3, f: f64, sc: &Scenario) -> bool {
    let probe = Aabb::from_points(&[a, b]).expanded(f);
    let pieces = sc.obstacles.pieces();
    sc.obstacles
        .query(&probe)
        .into_iter()
        .all(|i| pieces[i].distance_to_segment(a, b) > f)
}

fn angle_ok(x: Vec3, a: Vec3, b: Vec3, q: usize, sc: &Scenario) -> bool {
    if x == a || x == b {
        return false;
    }
    let ql = &sc.qualities[q];
    let t = raw_angle(x, a, b);
    ql.theta_min <= t && t <= ql.theta_max
}

/// Whether `x` is covered at quality `q` by the two sensors together.
pub fn point_q_cover(x: Vec3, s1: &Placed, s2: &Placed, q: usize, sc: &Scenario) -> Result<bool> {
    if sc.in_obstacle(x) {
        return Err(Error::domain("coverage is undefined inside an obstacle"));
    }
    if s1.sensor == s2.sensor {
        return Err(Error::domain("a sensor cannot pair with itself"));
    }
    Ok(sees(x, s1, q, sc) && sees(x, s2, q, sc) && angle_ok(x, s1.pos, s2.pos, q, sc))
}

/// Pairs (as indices into `placed`) covering `x` at quality `q`.
pub fn covering_pairs(x: Vec3, q: usize, placed: &[Placed], sc: &Scenario) -> Vec<(usize, usize)> {
    let seen: Vec<bool> = placed.iter().map(|s| sees(x, s, q, sc)).collect();
    let mut out = Vec::new();
    for i in 0..placed.len() {
        if !seen[i] {
            continue;
        }
        for k in i + 1..placed.len() {
            if seen[k] && angle_ok(x, placed[i].pos, placed[k].pos, q, sc) {
                out.push((i, k));
            }
        }
    }
    out
}

/// Whether at most `budget` vertices can touch every edge.
fn has_vertex_cover(edges: &[(usize, usize)], budget: usize) -> bool {
    let Some(&(u, v)) = edges.first() else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    [u, v].into_iter().any(|w| {
        let rest: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| a != w && b != w)
            .collect();
        has_vertex_cover(&rest, budget - 1)
    })
}

/// `cover^{j,q}(x)`: true when every fault set of at most `j` sensors leaves
/// a pair covering `x`. Points inside obstacles count as covered.
pub fn cover_jq(x: Vec3, j: usize, q: usize, placed: &[Placed], sc: &Scenario) -> bool {
    if sc.in_obstacle(x) {
        return true;
    }
    let pairs = covering_pairs(x, q, placed, sc);
    // x is uncovered iff some set of <= j faults meets every covering pair
    !has_vertex_cover(&pairs, j)
}

/// Smallest number of sensor faults that leaves `x` without a covering
/// pair at quality `q`, searched up to `limit` (returns `limit + 1` when
/// more are needed). Obstacle points report `usize::MAX`.
pub fn faults_to_uncover(x: Vec3, q: usize, limit: usize, placed: &[Placed], sc: &Scenario) -> usize {
    if sc.in_obstacle(x) {
        return usize::MAX;
    }
    let pairs = covering_pairs(x, q, placed, sc);
    (0..=limit)
        .find(|&b| has_vertex_cover(&pairs, b))
        .unwrap_or(limit + 1)
}

/// Membership of `x` in `U^{j,q}` evaluated literally from the geometric
/// decomposition: union over fault sets of the intersection over surviving
/// ordered pairs of the pair-uncovered regions, minus obstacles.
///
/// Enumerates all fault sets, so it is meant for small deployments.
pub fn in_uncovered_formula(x: Vec3, j: usize, q: usize, placed: &[Placed], sc: &Scenario) -> bool {
    if !sc.in_roi(x) || sc.in_obstacle(x) {
        return false;
    }
    let n = placed.len();
    assert!(n < 64, "too many sensors for fault-set enumeration");
    let ql = &sc.qualities[q];
    let out_of_range = |s: &Placed| x.dist(s.pos) > sc.sensors[s.sensor].capabilities[q].range;
    let shadowed = |s: &Placed| !segment_clear(x, s.pos, sc.sensors[s.sensor].capabilities[q].ffz, sc);
    let bad_angle = |a: &Placed, b: &Placed| {
        let t = raw_angle(x, a.pos, b.pos);
        t < ql.theta_min || t > ql.theta_max || x == a.pos || x == b.pos
    };
    let in_pair_region = |a: &Placed, b: &Placed| {
        out_of_range(a) || out_of_range(b) || shadowed(a) || shadowed(b) || bad_angle(a, b)
    };
    // fault sets as bitmasks over the deployed sensors
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize <= j)
        .any(|faults| {
            (0..n).all(|a| {
                (0..n).all(|b| {
                    a == b
                        || faults >> a & 1 == 1
                        || faults >> b & 1 == 1
                        || in_pair_region(&placed[a], &placed[b])
                })
            })
        })
}
