use serde::Serialize;

use crate::geom::{point_region_distance, Aabb, Vec3};
use crate::index::IndexedUnion;
use crate::scenario::{Deployment, Scenario};
use crate::Result;

/// Signed constraint values of one deployed sensor: positive when violated,
/// otherwise minus the robustness margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorConstraints {
    pub sensor: String,
    pub obstacle: f64,
    pub admissible: f64,
    pub isolation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub sensors: Vec<SensorConstraints>,
}

impl ConstraintReport {
    /// Flattened as `[obstacle, admissible, isolation]` per sensor.
    pub fn values(&self) -> Vec<f64> {
        self.sensors
            .iter()
            .flat_map(|s| [s.obstacle, s.admissible, s.isolation])
            .collect()
    }

    pub fn max_violation(&self) -> f64 {
        self.values().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn feasible(&self) -> bool {
        self.values().iter().all(|&v| v <= 0.0)
    }
}

/// Box enclosing every region of the scenario.
pub fn scenario_bbox(sc: &Scenario) -> Aabb {
    sc.sensors
        .iter()
        .fold(sc.roi.bbox().union(&sc.obstacles.bbox()), |b, s| {
            b.union(&s.admissible.bbox())
        })
}

/// Distance from `p` to the complement of `u`, for `p` inside `u`; the
/// deepest containing member gives the value.
fn depth(p: Vec3, u: &IndexedUnion) -> f64 {
    let pieces = u.pieces();
    let mut best: f64 = 0.0;
    if let Some(t) = u.tree() {
        for i in t.query_point(p, 0.0) {
            best = best.max(-pieces[i].max_violation(p));
        }
    }
    best
}

fn box_depth(p: Vec3, b: &Aabb) -> f64 {
    let lo = p - b.min;
    let hi = b.max - p;
    lo.x.min(lo.y).min(lo.z).min(hi.x).min(hi.y).min(hi.z)
}

/// Evaluates the placement constraints for every deployed sensor, using the
/// lowest quality level.
pub fn eval_constraints(d: &Deployment, sc: &Scenario) -> Result<ConstraintReport> {
    let placed = sc.placed(d)?;
    let world = scenario_bbox(sc);
    let cap = world.diagonal();
    let mut out = Vec::with_capacity(placed.len());
    for (i, p) in placed.iter().enumerate() {
        let spec = &sc.sensors[p.sensor];
        let c0 = spec.capabilities[0];

        let d_obst = point_region_distance(p.pos, sc.obstacles.union());
        let obstacle = if d_obst.is_infinite() {
            -cap
        } else if d_obst > 0.0 {
            c0.ffz - d_obst
        } else {
            c0.ffz + depth(p.pos, &sc.obstacles)
        };

        let d_adm = point_region_distance(p.pos, spec.admissible.union());
        let admissible = if d_adm > 0.0 {
            d_adm
        } else {
            -depth(p.pos, &spec.admissible).min(box_depth(p.pos, &world))
        };

        let isolation = placed
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, o)| {
                p.pos.dist(o.pos) - c0.range - sc.sensors[o.sensor].capabilities[0].range
            })
            .fold(f64::INFINITY, f64::min);
        out.push(SensorConstraints {
            sensor: spec.id.clone(),
            obstacle,
            admissible,
            isolation: if isolation.is_finite() { isolation } else { 0.0 },
        });
    }
    Ok(ConstraintReport { sensors: out })
}
