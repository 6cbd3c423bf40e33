use super::model::{Capability, CostZone, QualityLevel, Scenario, SensorSpec, Weights};
use crate::geom::{ConvexPolyhedron, PolyUnion};
use crate::index::IndexedUnion;
use crate::Result;

pub type Corners = ([f64; 3], [f64; 3]);

fn boxes(v: &[Corners]) -> PolyUnion {
    PolyUnion::new(v.iter().map(|(a, b)| ConvexPolyhedron::cube(*a, *b)).collect())
}

/// Programmatic construction of scenarios made of axis-aligned boxes.
///
/// Without explicit priorities the whole RoI forms one class named `all`.
#[derive(Debug, Clone, Default)]
pub struct SceneBuilder {
    roi: Vec<Corners>,
    obstacles: Vec<Corners>,
    priorities: Vec<(String, Vec<Corners>)>,
    qualities: Vec<QualityLevel>,
    sensors: Vec<SensorSpec>,
    k: usize,
    weights: Vec<(usize, usize, String, f64)>,
}

impl SceneBuilder {
    pub fn new() -> SceneBuilder {
        SceneBuilder::default()
    }

    pub fn roi_box(mut self, min: [f64; 3], max: [f64; 3]) -> Self {
        self.roi.push((min, max));
        self
    }

    pub fn obstacle(mut self, min: [f64; 3], max: [f64; 3]) -> Self {
        self.obstacles.push((min, max));
        self
    }

    pub fn priority(mut self, name: &str, regions: &[Corners]) -> Self {
        self.priorities.push((name.to_string(), regions.to_vec()));
        self
    }

    /// Adds a quality level; angles in degrees.
    pub fn quality(mut self, id: &str, min_deg: f64, max_deg: f64) -> Self {
        self.qualities.push(QualityLevel {
            id: id.to_string(),
            theta_min: min_deg.to_radians(),
            theta_max: max_deg.to_radians(),
        });
        self
    }

    /// Adds a sensor with a single cost zone equal to its admissible region
    /// and one `(range, ffz)` per quality level.
    pub fn sensor(mut self, id: &str, admissible: &[Corners], cost: f64, caps: &[(f64, f64)]) -> Self {
        let region = boxes(admissible);
        self.sensors.push(SensorSpec {
            id: id.to_string(),
            kind: String::new(),
            admissible: IndexedUnion::new(region.clone()),
            cost_zones: vec![CostZone { region, cost }],
            capabilities: caps.iter().map(|&(range, ffz)| Capability { range, ffz }).collect(),
        });
        self
    }

    /// Adds a sensor admissible on the union of its cost zones, which are
    /// matched in the given order.
    pub fn sensor_zones(mut self, id: &str, kind: &str, zones: &[(Corners, f64)], caps: &[(f64, f64)]) -> Self {
        let all: Vec<Corners> = zones.iter().map(|(c, _)| *c).collect();
        self.sensors.push(SensorSpec {
            id: id.to_string(),
            kind: kind.to_string(),
            admissible: IndexedUnion::new(boxes(&all)),
            cost_zones: zones
                .iter()
                .map(|(c, cost)| CostZone {
                    region: boxes(&[*c]),
                    cost: *cost,
                })
                .collect(),
            capabilities: caps.iter().map(|&(range, ffz)| Capability { range, ffz }).collect(),
        });
        self
    }

    /// Adds a fully specified sensor.
    pub fn sensor_spec(mut self, s: SensorSpec) -> Self {
        self.sensors.push(s);
        self
    }

    pub fn faults(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn weight(mut self, j: usize, q: usize, h: &str, w: f64) -> Self {
        self.weights.push((j, q, h.to_string(), w));
        self
    }

    pub fn build(self) -> Result<Scenario> {
        let mut priorities: Vec<(String, PolyUnion)> = self
            .priorities
            .iter()
            .map(|(n, r)| (n.clone(), boxes(r)))
            .collect();
        if priorities.is_empty() {
            priorities.push(("all".to_string(), boxes(&self.roi)));
        }
        let mut weights = Weights::zeros(self.k + 1, self.qualities.len(), priorities.len());
        for (j, q, h, w) in &self.weights {
            let hi = priorities.iter().position(|(n, _)| n == h).ok_or_else(|| {
                crate::Error::validation("weights", format!("unknown priority {h:?}"))
            })?;
            if *j > self.k || *q >= self.qualities.len() {
                return Err(crate::Error::validation("weights", format!("entry ({j}, {q}, {h}) out of range")));
            }
            weights.set(*j, *q, hi, *w);
        }
        Scenario::new(
            boxes(&self.roi),
            boxes(&self.obstacles),
            priorities,
            self.qualities,
            self.sensors,
            self.k,
            weights,
        )
    }
}
