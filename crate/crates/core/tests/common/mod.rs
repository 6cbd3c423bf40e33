#![allow(dead_code)]

use covertool::geom::{point_segment_distance, Vec3};
use covertool::scenario::{Deployment, Placed, Scenario, SceneBuilder};
use rand::Rng;

pub fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

/// Uniform point in the RoI bounding box.
pub fn sample_box(rng: &mut impl Rng, sc: &Scenario) -> Vec3 {
    let b = sc.roi.bbox();
    v(
        rng.gen_range(b.min.x..b.max.x),
        rng.gen_range(b.min.y..b.max.y),
        rng.gen_range(b.min.z..b.max.z),
    )
}

/// Distance from `x` to the surface `{∠AXB = θ}`: in the plane through the
/// axis and `x` the surface is a circular arc through `a` and `b`.
pub fn angle_surface_distance(x: Vec3, a: Vec3, b: Vec3, theta: f64) -> f64 {
    let mid = (a + b) * 0.5;
    let axis = (b - a).normalized().unwrap();
    let c = a.dist(b) / 2.0;
    let rel = x - mid;
    let u = rel.dot(axis);
    let w = (rel - axis * u).norm();
    // arc centre on the bisector, on x's side for θ < 90°
    let h = c / theta.tan();
    let rc = c / theta.sin();
    let (du, dw) = (u, w - h);
    let d = (du * du + dw * dw).sqrt();
    if d > 0.0 {
        let cw = h + dw / d * rc;
        if cw >= 0.0 {
            return (d - rc).abs();
        }
    }
    // nearest circle point is on the mirrored side: the arc ends at a and b
    x.dist(a).min(x.dist(b))
}

/// Lower bound on the distance from `x` to any boundary where coverage at
/// quality `q` can switch, less the planar boundaries which get `tau`.
pub fn curved_margin(x: Vec3, placed: &[Placed], q: usize, sc: &Scenario) -> f64 {
    let mut m = f64::INFINITY;
    for s in placed {
        let cap = sc.sensors[s.sensor].capabilities[q];
        m = m.min((x.dist(s.pos) - cap.range).abs());
        for o in sc.obstacles.pieces() {
            m = m.min((o.distance_to_segment(x, s.pos) - cap.ffz).abs());
        }
    }
    let ql = &sc.qualities[q];
    for (i, a) in placed.iter().enumerate() {
        for b in &placed[i + 1..] {
            for t in [ql.theta_min, ql.theta_max] {
                m = m.min(angle_surface_distance(x, a.pos, b.pos, t));
            }
        }
    }
    m
}

/// Distance from `x` to the nearest RoI or obstacle face.
pub fn planar_margin(x: Vec3, sc: &Scenario) -> f64 {
    sc.roi
        .pieces()
        .iter()
        .chain(sc.obstacles.pieces())
        .map(|p| p.max_violation(x).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Small random scene: a 60 x 60 x 20 box, 2-4 sensors, 0-2 box obstacles,
/// two quality levels and one tolerated fault.
pub fn random_scene(rng: &mut impl Rng) -> (Scenario, Deployment) {
    let n_sensors = rng.gen_range(2..=4);
    let n_obst = rng.gen_range(0..=2);
    let mut b = SceneBuilder::new()
        .roi_box([0.0, 0.0, 0.0], [60.0, 60.0, 20.0])
        .quality("q0", 20.0, 160.0)
        .quality("q1", 35.0, 145.0)
        .faults(1);
    let mut obstacles: Vec<([f64; 3], [f64; 3])> = Vec::new();
    for _ in 0..n_obst {
        let c = [rng.gen_range(10.0..50.0), rng.gen_range(10.0..50.0)];
        let s = [rng.gen_range(3.0..8.0), rng.gen_range(3.0..8.0)];
        let h = rng.gen_range(4.0..12.0);
        let lo = [c[0] - s[0], c[1] - s[1], 0.0];
        let hi = [c[0] + s[0], c[1] + s[1], h];
        obstacles.push((lo, hi));
        b = b.obstacle(lo, hi);
    }
    let mut d = Deployment::new();
    for i in 0..n_sensors {
        let id = format!("s{i}");
        let range = rng.gen_range(35.0..70.0);
        let ffz = rng.gen_range(0.0..1.5);
        b = b.sensor(
            &id,
            &[([-10.0, -10.0, 0.0], [70.0, 70.0, 30.0])],
            1.0,
            &[(range, ffz), (range * 0.85, ffz * 1.2)],
        );
        // rejection keeps sensors out of obstacles
        let p = loop {
            let p = v(
                rng.gen_range(-5.0..65.0),
                rng.gen_range(-5.0..65.0),
                rng.gen_range(1.0..25.0),
            );
            let inside = obstacles.iter().any(|(lo, hi)| {
                (0..3).all(|k| lo[k] - 2.0 <= p[k] && p[k] <= hi[k] + 2.0)
            });
            if !inside {
                break p;
            }
        };
        d = d.with(id, p);
    }
    (b.build().unwrap(), d)
}

/// `∠AXB` evaluated with the textbook arccos formula.
pub fn angle_acos(x: Vec3, a: Vec3, b: Vec3) -> f64 {
    let (u, w) = (a - x, b - x);
    (u.dot(w) / (u.norm() * w.norm())).clamp(-1.0, 1.0).acos()
}

pub fn seg_dist(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    point_segment_distance(p, a, b)
}

/// Two sensors on the x axis at ±50 with range 90 and angle range
/// [60°, 120°], watching the slab x ∈ [-40, 40], y ∈ [30, 90], z ∈ [-1, 1].
pub fn slab_scene() -> (Scenario, Deployment) {
    let sc = SceneBuilder::new()
        .roi_box([-40.0, 30.0, -1.0], [40.0, 90.0, 1.0])
        .quality("q0", 60.0, 120.0)
        .sensor("a", &[([-60.0, -10.0, -10.0], [60.0, 10.0, 10.0])], 1.0, &[(90.0, 0.0)])
        .sensor("b", &[([-60.0, -10.0, -10.0], [60.0, 10.0, 10.0])], 1.0, &[(90.0, 0.0)])
        .weight(0, 0, "all", 1.0)
        .build()
        .unwrap();
    let d = Deployment::new()
        .with("a", v(-50.0, 0.0, 0.0))
        .with("b", v(50.0, 0.0, 0.0));
    (sc, d)
}

/// Covered length of the line `{(x, y, z) : 30 <= y <= 90}` in the slab
/// scene. Distance to the x axis must lie between the two iso-angle
/// profiles, and the point must be in range of both sensors.
fn slab_covered_length(x: f64, z: f64) -> f64 {
    let c: f64 = 50.0;
    let profile = |t: f64| c / t.tan() + (c * c / t.sin().powi(2) - x * x).sqrt();
    let rho_hi = profile(60f64.to_radians());
    let rho_lo = profile(120f64.to_radians());
    let reach = |dx: f64| 8100.0 - dx * dx - z * z;
    let y_from_rho = |r: f64| (r * r - z * z).max(0.0).sqrt();
    let lo = 30f64.max(y_from_rho(rho_lo));
    let mut hi = 90f64.min(y_from_rho(rho_hi));
    for dx in [x + c, x - c] {
        let r = reach(dx);
        if r < 0.0 {
            return 0.0;
        }
        hi = hi.min(r.sqrt());
    }
    (hi - lo).max(0.0)
}

/// Uncovered volume of the slab scene by composite Gauss-Legendre
/// quadrature over (x, z).
pub fn slab_uncovered_volume() -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let panels_x = 800;
    let panels_z = 8;
    let (hx, hz) = (80.0 / panels_x as f64, 2.0 / panels_z as f64);
    let mut covered = 0.0;
    for i in 0..panels_x {
        let cx = -40.0 + (i as f64 + 0.5) * hx;
        for k in 0..panels_z {
            let cz = -1.0 + (k as f64 + 0.5) * hz;
            for (a, wa) in NODES.iter().zip(WEIGHTS) {
                for (b, wb) in NODES.iter().zip(WEIGHTS) {
                    let x = cx + a * hx / 2.0;
                    let z = cz + b * hz / 2.0;
                    covered += wa * wb * hx * hz / 4.0 * slab_covered_length(x, z);
                }
            }
        }
    }
    80.0 * 60.0 * 2.0 - covered
}
