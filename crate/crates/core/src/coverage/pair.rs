use crate::geom::{
    angle_region, bloat_polyhedron, project_polyhedron, sphere_approx, Aabb, Approx, ConvexPolyhedron,
    PolyUnion, Vec3,
};
use crate::index::IndexedUnion;
use crate::scenario::{Placed, Scenario};
use crate::Result;

/// Regions of one sensor pair at one quality level.
#[derive(Debug, Clone)]
pub struct PairRegions {
    /// Scenario indices of the two sensors, `a < b`.
    pub a: usize,
    pub b: usize,
    pub q: usize,
    pub mode: Approx,
    /// Points of the RoI the pair does not cover.
    pub u_pair: IndexedUnion,
    /// Points of the RoI within range of both sensors.
    pub r_pair: IndexedUnion,
    /// `u_pair` split by cause, for display.
    pub out_of_range: PolyUnion,
    pub obstructed: PolyUnion,
    pub bad_angle: PolyUnion,
}

impl PairRegions {
    /// True when the pair can cover no point of the RoI.
    pub fn is_useless(&self) -> bool {
        self.r_pair.is_empty()
    }
}

/// Obstacles bloated by one distance, one convex member per obstacle
/// member, kept in obstacle order.
#[derive(Debug, Clone)]
pub struct BloatedObstacles {
    pub ffz: f64,
    pub members: IndexedUnion,
}

impl BloatedObstacles {
    pub fn new(sc: &Scenario, ffz: f64, rho: f64, mode: Approx) -> Result<BloatedObstacles> {
        let pieces = sc.obstacles.pieces();
        let members = if ffz == 0.0 || pieces.is_empty() {
            sc.obstacles.clone()
        } else {
            let ball = sphere_approx(Vec3::ZERO, ffz, rho, mode)?;
            IndexedUnion::from_pieces(pieces.iter().map(|o| bloat_polyhedron(o, &ball)).collect())
        };
        Ok(BloatedObstacles { ffz, members })
    }
}

/// Bloated obstacle sets for every distinct Fresnel radius at quality `q`.
pub(crate) fn bloat_table(sc: &Scenario, q: usize, rho: f64, mode: Approx) -> Result<Vec<BloatedObstacles>> {
    let mut radii: Vec<f64> = sc.sensors.iter().map(|s| s.capabilities[q].ffz).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
        .into_iter()
        .map(|f| BloatedObstacles::new(sc, f, rho, mode))
        .collect()
}

fn lookup(table: &[BloatedObstacles], ffz: f64) -> &BloatedObstacles {
    table
        .iter()
        .find(|b| b.ffz == ffz)
        .expect("bloat table covers every radius")
}

/// Approximates the region of the RoI not covered by the pair `s1`, `s2` at
/// quality `q`, within tolerance `rho`: a subset of the true region for
/// `Under`, a superset for `Over`.
pub fn process_sensor_pair(
    s1: &Placed,
    s2: &Placed,
    q: usize,
    sc: &Scenario,
    rho: f64,
    mode: Approx,
) -> Result<PairRegions> {
    let table = bloat_table(sc, q, rho, mode)?;
    pair_regions(s1, s2, q, sc, rho, mode, &table)
}

pub(crate) fn pair_regions(
    s1: &Placed,
    s2: &Placed,
    q: usize,
    sc: &Scenario,
    rho: f64,
    mode: Approx,
    table: &[BloatedObstacles],
) -> Result<PairRegions> {
    let (s1, s2) = if s1.sensor <= s2.sensor { (s1, s2) } else { (s2, s1) };
    let c1 = sc.sensors[s1.sensor].capabilities[q];
    let c2 = sc.sensors[s2.sensor].capabilities[q];

    let lens = |m: Approx| -> Result<Option<ConvexPolyhedron>> {
        let a = sphere_approx(s1.pos, c1.range, rho, m)?;
        let b = sphere_approx(s2.pos, c2.range, rho, m)?;
        Ok(a.intersect(&b))
    };
    // the range term is a complement, so it takes the opposite lens
    let inner = lens(mode.opposite())?;
    let outer = match mode {
        Approx::Over => lens(Approx::Over)?,
        Approx::Under => inner.clone(),
    };

    let roi = sc.roi.pieces();
    let mut out_of_range = Vec::new();
    for p in roi {
        match &inner {
            Some(l) if l.bbox().intersects(p.bbox(), 0.0) => {
                out_of_range.extend(l.complement_within(p, mode))
            }
            _ => out_of_range.push(p.clone()),
        }
    }
    let r_pair = match &inner {
        Some(l) => IndexedUnion::new(sc.roi.clipped(l)),
        None => IndexedUnion::empty(),
    };

    // the remaining terms only matter where both sensors reach
    let clips: Vec<ConvexPolyhedron> = match &outer {
        Some(l) => sc.roi.clipped(l).into_pieces(),
        None => Vec::new(),
    };

    let mut obstructed = Vec::new();
    for s in [s1, s2] {
        let bloated = &lookup(table, sc.sensors[s.sensor].capabilities[q].ffz).members;
        for c in &clips {
            // a member can only shadow c if it meets the hull of c and the sensor
            let reach = c.bbox().union(&Aabb::from_points(&[s.pos]));
            for i in bloated.query(&reach) {
                if let Some(p) = project_polyhedron(s.pos, &bloated.pieces()[i], c, mode) {
                    obstructed.push(p);
                }
            }
        }
    }

    let ql = &sc.qualities[q];
    let bad_angle = if clips.is_empty() {
        PolyUnion::empty()
    } else if s1.pos == s2.pos {
        // coincident sensors see every point under a zero angle
        PolyUnion::new(clips.clone())
    } else {
        angle_region(
            s1.pos,
            s2.pos,
            ql.theta_min,
            ql.theta_max,
            &PolyUnion::new(clips),
            rho,
            mode,
        )?
    };

    let out_of_range = PolyUnion::new(out_of_range);
    let obstructed = PolyUnion::new(obstructed);
    let mut all = out_of_range.clone();
    all.extend(obstructed.clone());
    all.extend(bad_angle.clone());
    Ok(PairRegions {
        a: s1.sensor,
        b: s2.sensor,
        q,
        mode,
        u_pair: IndexedUnion::new(all),
        r_pair,
        out_of_range,
        obstructed,
        bad_angle,
    })
}
