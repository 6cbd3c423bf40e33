use super::Vec3;
use crate::{Error, Result};

/// Angle `∠AXB` in radians, in `[0, π]`.
pub fn angle_at(x: Vec3, a: Vec3, b: Vec3) -> Result<f64> {
    if x == a || x == b {
        return Err(Error::domain("angle undefined at a coincident point"));
    }
    Ok(raw_angle(x, a, b))
}

/// `∠AXB` without the coincidence check (0 when `x` equals `a` or `b`).
pub(crate) fn raw_angle(x: Vec3, a: Vec3, b: Vec3) -> f64 {
    let (u, v) = (a - x, b - x);
    // atan2 form is accurate near 0 and π
    u.cross(v).norm().atan2(u.dot(v))
}

pub fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Closest point on triangle `abc` to `p`.
pub fn closest_point_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = va + vb + vc;
    if denom.abs() < 1e-300 {
        // degenerate triangle: fall back to its edges
        let cands = [(a, b), (b, c), (c, a)];
        return cands
            .iter()
            .map(|&(s, e)| closest_point_segment(p, s, e))
            .min_by(|x, y| x.dist(p).total_cmp(&y.dist(p)))
            .unwrap();
    }
    let v = vb / denom;
    let w = vc / denom;
    a + ab * v + ac * w
}

fn closest_point_segment(p: Vec3, a: Vec3, b: Vec3) -> Vec3 {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return a;
    }
    a + ab * ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
}

pub fn point_triangle_distance(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    p.dist(closest_point_triangle(p, a, b, c))
}

pub fn segment_segment_distance(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm2();
    let e = d2.norm2();
    let f = d2.dot(r);
    let eps = 1e-300;
    let (s, t);
    if a <= eps && e <= eps {
        return p1.dist(p2);
    }
    if a <= eps {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= eps {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (p1 + d1 * s).dist(p2 + d2 * t)
}

/// Whether segment `pq` crosses triangle `abc` (Möller-Trumbore, closed).
fn segment_hits_triangle(p: Vec3, q: Vec3, a: Vec3, b: Vec3, c: Vec3) -> bool {
    let d = q - p;
    let e1 = b - a;
    let e2 = c - a;
    let h = d.cross(e2);
    let det = e1.dot(h);
    let scale = e1.norm() * e2.norm() * d.norm();
    if det.abs() <= 1e-14 * scale {
        return false;
    }
    let inv = 1.0 / det;
    let s = p - a;
    let u = s.dot(h) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = s.cross(e1);
    let v = d.dot(qv) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let t = e2.dot(qv) * inv;
    (0.0..=1.0).contains(&t)
}

pub fn segment_triangle_distance(p: Vec3, q: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    if segment_hits_triangle(p, q, a, b, c) {
        return 0.0;
    }
    let mut best = point_triangle_distance(p, a, b, c).min(point_triangle_distance(q, a, b, c));
    for (s, e) in [(a, b), (b, c), (c, a)] {
        best = best.min(segment_segment_distance(p, q, s, e));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn angles() {
        let a = angle_at(v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)).unwrap();
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let a = angle_at(v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(-1.0, 0.0, 0.0)).unwrap();
        assert!((a - std::f64::consts::PI).abs() < 1e-15);
        let a = angle_at(v(0.0, 100.0, 0.0), v(-1.0, 0.0, 0.0), v(1.0, 0.0, 0.0)).unwrap();
        assert!((a - 2.0 * (0.01f64).atan()).abs() < 1e-15);
        assert!(angle_at(v(1.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn point_triangle_regions() {
        let (a, b, c) = (v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0));
        assert!((point_triangle_distance(v(0.2, 0.2, 3.0), a, b, c) - 3.0).abs() < 1e-15);
        assert!((point_triangle_distance(v(-1.0, -1.0, 0.0), a, b, c) - 2f64.sqrt()).abs() < 1e-15);
        assert!((point_triangle_distance(v(1.0, 1.0, 0.0), a, b, c) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn segments() {
        let d = segment_segment_distance(
            v(0.0, 0.0, 0.0),
            v(1.0, 0.0, 0.0),
            v(0.5, 1.0, -1.0),
            v(0.5, 1.0, 1.0),
        );
        assert!((d - 1.0).abs() < 1e-15);
        let (a, b, c) = (v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0));
        assert_eq!(segment_triangle_distance(v(0.2, 0.2, -1.0), v(0.2, 0.2, 1.0), a, b, c), 0.0);
        let d = segment_triangle_distance(v(2.0, 0.0, -1.0), v(2.0, 0.0, 1.0), a, b, c);
        assert!((d - 1.0).abs() < 1e-15);
    }
}
