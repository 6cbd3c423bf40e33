//! Convex polyhedra, unions of convex polyhedra, and the curved-region
//! approximations (spheres, bloating, shadows, angle regions) built on them.
//!
//! Halfspaces are authoritative; vertex/face structure is derived by
//! clipping and cached on each [`ConvexPolyhedron`]. All operations are pure.

mod aabb;
mod bloat;
mod distance;
mod polyhedron;
mod projection;
mod revolution;
mod sphere;
mod union;
mod vec3;

pub use aabb::Aabb;
pub use bloat::{bloat, bloat_polyhedron};
pub use distance::{
    angle_at, point_segment_distance, point_triangle_distance, segment_segment_distance,
    segment_triangle_distance,
};
pub use polyhedron::{ConvexPolyhedron, Face};
pub use projection::{project, project_polyhedron};
pub use revolution::{angle_region, AngleSolid};
pub(crate) use distance::raw_angle;
pub(crate) use union::point_region_distance;
pub use sphere::{geodesic_frequency, sphere_approx, unit_geodesic, GeodesicSphere};
pub use union::{
    bool_diff, bool_intersect, bool_union, distance_point_region, distance_segment_region,
    PolyUnion,
};
pub use vec3::Vec3;

use serde::{Deserialize, Serialize};

/// Numeric tolerance for halfspace tests, in length units.
pub const TAU_GEOM: f64 = 1e-6;

/// Direction of a certified approximation of a curved region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approx {
    /// Result is contained in the exact region.
    Under,
    /// Result contains the exact region.
    Over,
}

impl Approx {
    pub fn opposite(self) -> Approx {
        match self {
            Approx::Under => Approx::Over,
            Approx::Over => Approx::Under,
        }
    }
}

/// Approximation tolerance `rho` for curved regions and the halfspace test
/// tolerance `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rho: f64,
    pub tau: f64,
}

impl ToleranceConfig {
    pub fn new(rho: f64) -> crate::Result<Self> {
        let t = ToleranceConfig { rho, tau: TAU_GEOM };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(crate::Error::domain(format!("rho must be > 0, got {}", self.rho)));
        }
        if !(self.tau > 0.0 && self.tau * 100.0 <= self.rho) {
            return Err(crate::Error::domain(format!(
                "tau ({}) must be positive and much smaller than rho ({})",
                self.tau, self.rho
            )));
        }
        Ok(())
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rho: 10.0,
            tau: TAU_GEOM,
        }
    }
}

/// Closed halfspace `normal · x <= offset` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: Vec3,
    pub offset: f64,
}

impl Plane {
    /// Normalizes `normal`; returns `None` for a degenerate normal.
    pub fn new(normal: Vec3, offset: f64) -> Option<Plane> {
        let len = normal.norm();
        if !(len > 1e-12) || !offset.is_finite() || !len.is_finite() {
            return None;
        }
        Some(Plane {
            normal: normal / len,
            offset: offset / len,
        })
    }

    /// Halfspace with the given normal passing through `point`.
    pub fn through(normal: Vec3, point: Vec3) -> Option<Plane> {
        let n = normal.normalized()?;
        Some(Plane {
            normal: n,
            offset: n.dot(point),
        })
    }

    #[inline]
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    /// The closed complement `normal · x >= offset + shift`.
    pub fn flipped(&self, shift: f64) -> Plane {
        Plane {
            normal: -self.normal,
            offset: -self.offset - shift,
        }
    }

    pub fn shifted(&self, delta: f64) -> Plane {
        Plane {
            normal: self.normal,
            offset: self.offset + delta,
        }
    }

    pub fn translated(&self, t: Vec3) -> Plane {
        Plane {
            normal: self.normal,
            offset: self.offset + self.normal.dot(t),
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.normal.x, self.normal.y, self.normal.z, self.offset]
    }

    /// Near-equality of normals and offsets.
    pub fn approx_eq(&self, o: &Plane, tol: f64) -> bool {
        (self.normal - o.normal).norm() <= 1e-9 && (self.offset - o.offset).abs() <= tol
    }
}
