//! Polyhedral approximations of `{X | ∠AXB >= θ}` and its complement.
//!
//! In coordinates `z` along `AB` from its midpoint and `ρ` (distance from
//! the line `AB`), the boundary `∠AXB = θ` is the circle of radius
//! `Rc = c / sin θ` centered at `(0, h)`, `h = c cot θ`, `c = |AB| / 2`.
//! Profile points are parametrized by the circle angle `t` as
//! `(Rc sin t, h + Rc cos t)`.
//!
//! For `θ >= 90°` the region is a convex lemon. Otherwise it is an apple:
//! a convex filled solid `{|z| <= Rc, ρ <= h + sqrt(Rc² - z²)}` minus two
//! trumpet-shaped dimples `{c < |z| <= Rc, ρ < h - sqrt(Rc² - z²)}` around
//! the axis beyond `A` and `B`. Each convex solid of revolution is cut by
//! `M` meridian directions; dimples are split into `z`-slabs.

use std::f64::consts::{FRAC_PI_2, PI};

use super::distance::raw_angle;
use super::{Approx, ConvexPolyhedron, Plane, PolyUnion, Vec3};
use crate::{Error, Result};

/// Fewest meridian directions used for any solid of revolution.
const MIN_MERIDIANS: usize = 16;

/// `{∠AXB >= θ}` for sensors `a`, `b` (θ in radians, `0 < θ < π`).
#[derive(Debug, Clone)]
pub struct AngleSolid {
    a: Vec3,
    b: Vec3,
    theta: f64,
    mid: Vec3,
    axis: Vec3,
    p1: Vec3,
    p2: Vec3,
    c: f64,
    h: f64,
    rc: f64,
}

/// One profile line `a z + b ρ <= d` with `b >= 0`.
#[derive(Debug, Clone, Copy)]
struct ProfileLine {
    a: f64,
    b: f64,
    d: f64,
}

impl AngleSolid {
    pub fn new(a: Vec3, b: Vec3, theta: f64) -> Option<AngleSolid> {
        let len = a.dist(b);
        if !(len > 0.0) || !(theta > 0.0 && theta < PI) {
            return None;
        }
        let axis = (b - a) / len;
        let p1 = axis.any_orthogonal();
        let p2 = axis.cross(p1);
        let c = len / 2.0;
        Some(AngleSolid {
            a,
            b,
            theta,
            mid: (a + b) * 0.5,
            axis,
            p1,
            p2,
            c,
            h: c / theta.tan(),
            rc: c / theta.sin(),
        })
    }

    pub fn is_lemon(&self) -> bool {
        self.h <= 0.0
    }

    /// Exact membership.
    pub fn contains(&self, x: Vec3) -> bool {
        raw_angle(x, self.a, self.b) >= self.theta
    }

    fn meridians(&self, rho: f64) -> usize {
        let g_max = self.rc + self.h;
        // (g_max + ρ/2)(sec(π/M) - 1) <= ρ/2
        let cos_min = (g_max + rho / 2.0) / (g_max + rho);
        let m = (PI / cos_min.acos()).ceil() as usize;
        let m = m.max(MIN_MERIDIANS);
        m + (m % 2)
    }

    fn arc_segments(&self, span: f64, budget: f64) -> usize {
        // Rc (sec(Δt/2) - 1) <= budget
        let half = (self.rc / (self.rc + budget)).acos();
        ((span / (2.0 * half)).ceil() as usize).max(1)
    }

    /// Halfspaces for `{u_k · y <= κ ρ_max(z)}` over all meridians `u_k`,
    /// where the profile constraint is `line`; `axis_sign` mirrors `z`.
    fn line_planes(&self, line: ProfileLine, kappa: f64, m: usize, axis_sign: f64, out: &mut Vec<Plane>) {
        let e = self.axis * axis_sign;
        if line.b.abs() < 1e-12 {
            if let Some(p) = Plane::new(e * line.a, line.d + line.a * e.dot(self.mid)) {
                out.push(p);
            }
            return;
        }
        for k in 0..m {
            let phi = 2.0 * PI * k as f64 / m as f64;
            let u = self.p1 * phi.cos() + self.p2 * phi.sin();
            let n = u * line.b + e * (kappa * line.a);
            let offset = kappa * line.d + n.dot(self.mid);
            if let Some(p) = Plane::new(n, offset) {
                out.push(p);
            }
        }
    }

    fn z_cap(&self, sign: f64, bound: f64) -> Plane {
        let e = self.axis * sign;
        Plane {
            normal: e,
            offset: bound + e.dot(self.mid),
        }
    }

    /// Convex solid bounded by the upper arc `t in [-t_max, t_max]` and
    /// `|z| <= z_max`, approximated within `budget`.
    fn convex_part(&self, t_max: f64, z_max: f64, rho: f64, mode: Approx) -> Vec<Plane> {
        let m = self.meridians(rho);
        let n = self.arc_segments(2.0 * t_max, rho / 2.0);
        let dt = 2.0 * t_max / n as f64;
        let mut planes = vec![self.z_cap(1.0, z_max), self.z_cap(-1.0, z_max)];
        match mode {
            Approx::Over => {
                for i in 0..=n {
                    let t = -t_max + dt * i as f64;
                    let line = ProfileLine {
                        a: t.sin(),
                        b: t.cos().max(0.0),
                        d: self.rc + self.h * t.cos(),
                    };
                    self.line_planes(line, 1.0, m, 1.0, &mut planes);
                }
            }
            Approx::Under => {
                let kappa = (PI / m as f64).cos();
                for i in 0..n {
                    let t = -t_max + dt * (i as f64 + 0.5);
                    let line = ProfileLine {
                        a: t.sin(),
                        b: t.cos(),
                        d: self.rc * (dt / 2.0).cos() + self.h * t.cos(),
                    };
                    self.line_planes(line, kappa, m, 1.0, &mut planes);
                }
            }
        }
        planes
    }

    /// The convex solid: the whole lemon, or the filled apple.
    fn filled(&self, rho: f64, mode: Approx) -> Option<ConvexPolyhedron> {
        let planes = if self.is_lemon() {
            let t_a = (-self.h / self.rc).clamp(-1.0, 1.0).acos();
            self.convex_part(t_a, self.c, rho, mode)
        } else {
            self.convex_part(FRAC_PI_2, self.rc, rho, mode)
        };
        ConvexPolyhedron::from_halfspaces(&planes).ok().flatten()
    }

    /// Dimple slabs on the side `axis_sign` (apple only).
    fn dimple(&self, axis_sign: f64, rho: f64, mode: Approx, clip: &ConvexPolyhedron) -> Vec<ConvexPolyhedron> {
        let m = self.meridians(rho);
        let t_a = (-self.h / self.rc).clamp(-1.0, 1.0).acos();
        let span = t_a - FRAC_PI_2;
        if span <= 0.0 {
            return Vec::new();
        }
        let n = self.arc_segments(span, rho / 4.0);
        let dt = span / n as f64;
        let kappa = match mode {
            Approx::Under => (PI / m as f64).cos(),
            Approx::Over => 1.0,
        };
        let mut out = Vec::new();
        for i in 0..n {
            let (t0, t1) = (FRAC_PI_2 + dt * i as f64, FRAC_PI_2 + dt * (i + 1) as f64);
            let tm = 0.5 * (t0 + t1);
            let (z_hi, z_lo) = (self.rc * t0.sin(), self.rc * t1.sin());
            // below the lower arc: -sin t z - cos t ρ <= -(R' + h cos t)
            let reach = match mode {
                Approx::Under => self.rc,
                Approx::Over => self.rc * (dt / 2.0).cos(),
            };
            let line = ProfileLine {
                a: -tm.sin(),
                b: -tm.cos(),
                d: -(reach + self.h * tm.cos()),
            };
            let mut planes = vec![self.z_cap(axis_sign, z_hi), self.z_cap(-axis_sign, -z_lo)];
            self.line_planes(line, kappa, m, axis_sign, &mut planes);
            if let Some(p) = clip.clip_by(&planes) {
                out.push(p);
            }
        }
        out
    }

    fn dimples(&self, rho: f64, mode: Approx, clip: &ConvexPolyhedron) -> Vec<ConvexPolyhedron> {
        let mut v = self.dimple(1.0, rho, mode, clip);
        v.extend(self.dimple(-1.0, rho, mode, clip));
        v
    }

    /// `{∠AXB >= θ} ∩ clip`, approximated within `rho`.
    pub fn at_least(&self, clip: &ConvexPolyhedron, rho: f64, mode: Approx) -> PolyUnion {
        let Some(f) = self.filled(rho, mode).and_then(|f| f.intersect(clip)) else {
            return PolyUnion::empty();
        };
        if self.is_lemon() {
            return PolyUnion::single(f);
        }
        let holes = PolyUnion::new(self.dimples(rho, mode.opposite(), clip));
        super::bool_diff(&PolyUnion::single(f), &holes, mode)
    }

    /// `{∠AXB < θ} ∩ clip`, approximated within `rho`.
    pub fn below(&self, clip: &ConvexPolyhedron, rho: f64, mode: Approx) -> PolyUnion {
        let mut out = match self.filled(rho, mode.opposite()) {
            Some(f) => f.complement_within(clip, mode),
            None => vec![clip.clone()],
        };
        if !self.is_lemon() {
            out.extend(self.dimples(rho, mode, clip));
        }
        PolyUnion::new(out)
    }
}

/// `{X in clip | ∠AXB ∉ [θ_min, θ_max]}`, approximated within `rho`.
pub fn angle_region(
    a: Vec3,
    b: Vec3,
    theta_min: f64,
    theta_max: f64,
    clip: &PolyUnion,
    rho: f64,
    mode: Approx,
) -> Result<PolyUnion> {
    if a == b {
        return Err(Error::domain("angle region needs two distinct points"));
    }
    if !(0.0 < theta_min && theta_min < theta_max && theta_max < PI) {
        return Err(Error::domain(format!(
            "angle range must satisfy 0 < min < max < pi, got [{theta_min}, {theta_max}]"
        )));
    }
    let low = AngleSolid::new(a, b, theta_min).expect("validated");
    let high = AngleSolid::new(a, b, theta_max).expect("validated");
    let mut out = PolyUnion::empty();
    for c in clip.pieces() {
        out.extend(low.below(c, rho, mode));
        out.extend(high.at_least(c, rho, mode));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_sandwich(theta_deg: f64) {
        let (a, b) = (Vec3::new(-10.0, 0.0, 0.0), Vec3::new(10.0, 0.0, 0.0));
        let s = AngleSolid::new(a, b, theta_deg.to_radians()).unwrap();
        let clip = ConvexPolyhedron::cube([-40.0; 3], [40.0; 3]);
        let rho = 1.0;
        let under = s.at_least(&clip, rho, Approx::Under);
        let over = s.at_least(&clip, rho, Approx::Over);
        let under_c = s.below(&clip, rho, Approx::Under);
        let over_c = s.below(&clip, rho, Approx::Over);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..4000 {
            let x = Vec3::new(
                rng.gen_range(-40.0..40.0),
                rng.gen_range(-40.0..40.0),
                rng.gen_range(-40.0..40.0),
            );
            let inside = s.contains(x);
            if under.contains(x, 0.0) {
                assert!(inside, "under not inside at {x:?}");
            }
            if inside {
                assert!(over.contains(x, 1e-9), "over misses {x:?}");
            }
            if under_c.contains(x, 0.0) {
                assert!(!inside);
            }
            if !inside {
                assert!(over_c.contains(x, 1e-9), "complement over misses {x:?}");
            }
        }
    }

    #[test]
    fn lemon_sandwich() {
        check_sandwich(120.0);
    }

    #[test]
    fn apple_sandwich() {
        check_sandwich(30.0);
    }

    #[test]
    fn sphere_case_volume() {
        // θ = 90° is the ball on AB as diameter
        let s = AngleSolid::new(Vec3::new(-5.0, 0.0, 0.0), Vec3::new(5.0, 0.0, 0.0), FRAC_PI_2).unwrap();
        let clip = ConvexPolyhedron::cube([-10.0; 3], [10.0; 3]);
        let exact = 4.0 / 3.0 * PI * 125.0;
        let u = s.at_least(&clip, 0.1, Approx::Under).volume();
        let o = s.at_least(&clip, 0.1, Approx::Over).volume();
        assert!(u <= exact && exact <= o, "{u} {exact} {o}");
        assert!(o - u < 0.05 * exact);
    }
}
