use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{Approx, ConvexPolyhedron, Plane, Vec3};
use crate::{Error, Result};

/// Largest subdivision frequency tried before giving up on a tolerance.
const MAX_FREQUENCY: u32 = 128;

/// Subdivided icosahedron with vertices on the unit sphere.
#[derive(Debug, Clone)]
pub struct GeodesicSphere {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

const ICO_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

fn icosahedron() -> Vec<Vec3> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalized().unwrap())
    .collect()
}

/// Geodesic sphere of the given frequency (`10 f^2 + 2` vertices).
pub fn unit_geodesic(freq: u32) -> GeodesicSphere {
    let f = freq.max(1) as usize;
    let base = icosahedron();
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut lookup: HashMap<[i64; 3], u32> = HashMap::new();
    let mut index_of = |p: Vec3, vertices: &mut Vec<Vec3>| -> u32 {
        let key = [
            (p.x * 1e9).round() as i64,
            (p.y * 1e9).round() as i64,
            (p.z * 1e9).round() as i64,
        ];
        *lookup.entry(key).or_insert_with(|| {
            vertices.push(p);
            (vertices.len() - 1) as u32
        })
    };
    let mut triangles = Vec::with_capacity(20 * f * f);
    for face in ICO_FACES {
        let (a, b, c) = (base[face[0]], base[face[1]], base[face[2]]);
        let mut grid = vec![vec![0u32; f + 1]; f + 1];
        for i in 0..=f {
            for j in 0..=(f - i) {
                let p = a + (b - a) * (i as f64 / f as f64) + (c - a) * (j as f64 / f as f64);
                grid[i][j] = index_of(p.normalized().unwrap(), &mut vertices);
            }
        }
        for i in 0..f {
            for j in 0..(f - i) {
                triangles.push([grid[i][j], grid[i + 1][j], grid[i][j + 1]]);
                if i + j + 1 < f {
                    triangles.push([grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]]);
                }
            }
        }
    }
    GeodesicSphere {
        vertices,
        triangles,
    }
}

/// Unit-sphere approximations at one frequency with their measured radial
/// errors.
struct Level {
    under: ConvexPolyhedron,
    over: ConvexPolyhedron,
    under_err: f64,
    over_err: f64,
}

fn build_level(freq: u32) -> Level {
    let g = unit_geodesic(freq);
    let mut under_planes = Vec::with_capacity(g.triangles.len());
    for t in &g.triangles {
        let (a, b, c) = (
            g.vertices[t[0] as usize],
            g.vertices[t[1] as usize],
            g.vertices[t[2] as usize],
        );
        let mut n = (b - a).cross(c - a);
        if n.dot(a) < 0.0 {
            n = -n;
        }
        under_planes.push(Plane::through(n, a).expect("non-degenerate facet"));
    }
    let under = ConvexPolyhedron::from_halfspaces(&under_planes)
        .expect("bounded")
        .expect("non-empty");
    let under_err = 1.0
        - under
            .planes()
            .iter()
            .map(|p| p.offset)
            .fold(f64::INFINITY, f64::min);

    let over_planes: Vec<Plane> = g
        .vertices
        .iter()
        .map(|v| Plane {
            normal: *v,
            offset: 1.0,
        })
        .collect();
    let over = ConvexPolyhedron::from_halfspaces(&over_planes)
        .expect("bounded")
        .expect("non-empty");
    let over_err = over
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        - 1.0;
    Level {
        under,
        over,
        under_err,
        over_err,
    }
}

fn level(freq: u32) -> Arc<Level> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Level>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(l) = cache.lock().unwrap().get(&freq) {
        return l.clone();
    }
    let l = Arc::new(build_level(freq));
    cache.lock().unwrap().entry(freq).or_insert(l).clone()
}

/// Smallest frequency whose unit-sphere approximations (both directions)
/// have radial error at most `rel_tol`.
pub fn geodesic_frequency(rel_tol: f64) -> u32 {
    let mut f = 1;
    while f < MAX_FREQUENCY {
        let l = level(f);
        if l.under_err <= rel_tol && l.over_err <= rel_tol {
            return f;
        }
        // the error falls roughly as 1/f^2, so jump ahead
        let worst = l.under_err.max(l.over_err);
        let guess = (f as f64 * (worst / rel_tol).sqrt()).floor() as u32;
        f = guess.clamp(f + 1, MAX_FREQUENCY);
    }
    MAX_FREQUENCY
}

/// Polyhedral approximation of the ball `B(center, r)` within Hausdorff
/// distance `rho`: contained in it for `Under`, containing it for `Over`.
pub fn sphere_approx(center: Vec3, r: f64, rho: f64, mode: Approx) -> Result<ConvexPolyhedron> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("sphere radius must be > 0, got {r}")));
    }
    if !(rho > 0.0) {
        return Err(Error::domain(format!("rho must be > 0, got {rho}")));
    }
    let l = level(geodesic_frequency(rho / r));
    let unit = match mode {
        Approx::Under => &l.under,
        Approx::Over => &l.over,
    };
    Ok(unit.scaled(r).translated(center))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn geodesic_counts() {
        for f in 1..5 {
            let g = unit_geodesic(f);
            assert_eq!(g.vertices.len() as u32, 10 * f * f + 2);
            assert_eq!(g.triangles.len() as u32, 20 * f * f);
        }
    }

    #[test]
    fn sandwich_and_error() {
        let c = Vec3::new(3.0, -2.0, 1.0);
        let (r, rho) = (50.0, 1.0);
        let u = sphere_approx(c, r, rho, Approx::Under).unwrap();
        let o = sphere_approx(c, r, rho, Approx::Over).unwrap();
        for v in u.vertices() {
            assert!(v.dist(c) <= r + 1e-6);
        }
        for p in o.planes() {
            // every facet plane is tangent to the ball
            assert!((p.offset - p.normal.dot(c) - r).abs() < 1e-6);
        }
        for v in o.vertices() {
            assert!(v.dist(c) <= r + rho + 1e-9);
        }
        let ball = 4.0 / 3.0 * PI * r.powi(3);
        assert!(u.volume() < ball && ball < o.volume());
        assert!(u.volume() > 4.0 / 3.0 * PI * (r - rho).powi(3));
    }
}
