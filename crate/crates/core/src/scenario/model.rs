use std::collections::BTreeMap;

use crate::geom::{Approx, PolyUnion, Vec3, TAU_GEOM};
use crate::index::IndexedUnion;
use crate::{Error, Result};

/// Relative tolerance for the volumetric partition and containment checks.
pub const VOLUME_REL_TOL: f64 = 1e-6;

/// A sensing-quality level; angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityLevel {
    pub id: String,
    pub theta_min: f64,
    pub theta_max: f64,
}

/// Maximum target distance and Fresnel-zone radius of a sensor at one
/// quality level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capability {
    pub range: f64,
    pub ffz: f64,
}

#[derive(Debug, Clone)]
pub struct CostZone {
    pub region: PolyUnion,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct SensorSpec {
    pub id: String,
    pub kind: String,
    pub admissible: IndexedUnion,
    pub cost_zones: Vec<CostZone>,
    /// One entry per quality level, in quality order.
    pub capabilities: Vec<Capability>,
}

impl SensorSpec {
    /// Cost of placing this sensor at `p`: the first zone containing it.
    pub fn cost_at(&self, p: Vec3) -> Option<f64> {
        self.cost_zones
            .iter()
            .find(|z| z.region.contains(p, TAU_GEOM))
            .map(|z| z.cost)
    }
}

#[derive(Debug, Clone)]
pub struct Priority {
    pub name: String,
    pub region: IndexedUnion,
}

/// Weights `w(j, q, h)` stored densely as `[j][q][h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    values: Vec<f64>,
    nq: usize,
    nh: usize,
}

impl Weights {
    pub fn zeros(nj: usize, nq: usize, nh: usize) -> Weights {
        Weights {
            values: vec![0.0; nj * nq * nh],
            nq,
            nh,
        }
    }

    pub fn get(&self, j: usize, q: usize, h: usize) -> f64 {
        self.values[(j * self.nq + q) * self.nh + h]
    }

    pub fn set(&mut self, j: usize, q: usize, h: usize, w: f64) {
        self.values[(j * self.nq + q) * self.nh + h] = w;
    }

    pub fn faults(&self) -> usize {
        self.values.len() / (self.nq * self.nh).max(1)
    }

    /// `max_h w(j, q, h)`.
    pub fn max_over_priorities(&self, j: usize, q: usize) -> f64 {
        (0..self.nh).map(|h| self.get(j, q, h)).fold(0.0, f64::max)
    }
}

/// Sensor positions by sensor id. Sensors absent from the map are not
/// deployed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Deployment {
    pub positions: BTreeMap<String, Vec3>,
}

impl Deployment {
    pub fn new() -> Deployment {
        Deployment::default()
    }

    pub fn with(mut self, id: impl Into<String>, p: Vec3) -> Deployment {
        self.positions.insert(id.into(), p);
        self
    }

    pub fn get(&self, id: &str) -> Option<Vec3> {
        self.positions.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// A deployed sensor: its index in the scenario and its position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placed {
    pub sensor: usize,
    pub pos: Vec3,
}

/// The full problem instance. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub roi: IndexedUnion,
    pub obstacles: IndexedUnion,
    pub priorities: Vec<Priority>,
    pub qualities: Vec<QualityLevel>,
    pub sensors: Vec<SensorSpec>,
    pub k: usize,
    pub weights: Weights,
    roi_volume: f64,
}

impl Scenario {
    /// Builds and validates a scenario.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        roi: PolyUnion,
        obstacles: PolyUnion,
        priorities: Vec<(String, PolyUnion)>,
        qualities: Vec<QualityLevel>,
        sensors: Vec<SensorSpec>,
        k: usize,
        weights: Weights,
    ) -> Result<Scenario> {
        let roi = IndexedUnion::new(roi);
        let obstacles = IndexedUnion::new(obstacles);
        let roi_volume = roi.volume();
        let sc = Scenario {
            roi,
            obstacles,
            priorities: priorities
                .into_iter()
                .map(|(name, region)| Priority {
                    name,
                    region: IndexedUnion::new(region),
                })
                .collect(),
            qualities,
            sensors,
            k,
            weights,
            roi_volume,
        };
        super::validate::validate(&sc)?;
        Ok(sc)
    }

    /// `V_R`.
    pub fn roi_volume(&self) -> f64 {
        self.roi_volume
    }

    pub fn sensor_index(&self, id: &str) -> Option<usize> {
        self.sensors.iter().position(|s| s.id == id)
    }

    pub fn quality_index(&self, id: &str) -> Option<usize> {
        self.qualities.iter().position(|q| q.id == id)
    }

    pub fn priority_index(&self, name: &str) -> Option<usize> {
        self.priorities.iter().position(|p| p.name == name)
    }

    /// Priority class of `x` (first matching), if `x` lies in the RoI.
    pub fn priority_of(&self, x: Vec3) -> Option<usize> {
        self.priorities
            .iter()
            .position(|p| p.region.contains(x, TAU_GEOM))
    }

    pub fn in_roi(&self, x: Vec3) -> bool {
        self.roi.contains(x, 0.0)
    }

    pub fn in_obstacle(&self, x: Vec3) -> bool {
        self.obstacles.contains(x, 0.0)
    }

    /// Deployed sensors in scenario order. Unknown ids are an error.
    pub fn placed(&self, d: &Deployment) -> Result<Vec<Placed>> {
        for id in d.positions.keys() {
            if self.sensor_index(id).is_none() {
                return Err(Error::validation("deployment", format!("unknown sensor id {id:?}")));
            }
        }
        let mut out = Vec::with_capacity(d.len());
        for (i, s) in self.sensors.iter().enumerate() {
            if let Some(p) = d.get(&s.id) {
                if !p.is_finite() {
                    return Err(Error::validation(
                        format!("deployment.{}", s.id),
                        "non-finite coordinate",
                    ));
                }
                out.push(Placed { sensor: i, pos: p });
            }
        }
        Ok(out)
    }

    /// Total placement cost of the deployed sensors.
    pub fn placement_cost(&self, d: &Deployment) -> Result<f64> {
        let mut total = 0.0;
        for p in self.placed(d)? {
            let s = &self.sensors[p.sensor];
            total += s.cost_at(p.pos).ok_or_else(|| {
                Error::validation(
                    format!("deployment.{}", s.id),
                    "position lies in no cost zone of the sensor",
                )
            })?;
        }
        Ok(total)
    }

    /// `V_R · Σ_{j,q} max_h w(j, q, h)`: an upper bound of the summed
    /// per-point uncovered cost.
    pub fn cost_range(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..=self.k {
            for q in 0..self.qualities.len() {
                s += self.weights.max_over_priorities(j, q);
            }
        }
        self.roi_volume * s
    }

    /// The region inside the RoI but outside the obstacles.
    pub fn free_space(&self) -> PolyUnion {
        crate::geom::bool_diff(self.roi.union(), self.obstacles.union(), Approx::Over)
    }
}
