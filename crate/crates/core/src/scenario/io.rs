use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geom::{Aabb, ConvexPolyhedron, Plane, PolyUnion, Vec3};
use crate::{Error, Result};

use super::model::{Capability, CostZone, Deployment, QualityLevel, Scenario, SensorSpec, Weights};
use crate::index::IndexedUnion;

/// Version tag written to and accepted in every file.
pub const SCHEMA: &str = "covertool/1";

/// Radians to degrees, rounded to 1e-9 so round trips keep whole angles whole.
fn degrees(rad: f64) -> f64 {
    (rad.to_degrees() * 1e9).round() / 1e9
}

/// A convex polyhedron on disk: halfspace rows `[nx, ny, nz, b]` meaning
/// `n · x <= b`, or an axis-aligned box given by two corners.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PolyJson {
    Halfspaces { halfspaces: Vec<[f64; 4]> },
    Box {
        #[serde(rename = "box")]
        corners: [[f64; 3]; 2],
    },
}

impl PolyJson {
    pub fn from_poly(p: &ConvexPolyhedron) -> PolyJson {
        PolyJson::Halfspaces {
            halfspaces: p.halfspace_rows(),
        }
    }

    pub fn to_poly(&self, field: &str) -> Result<ConvexPolyhedron> {
        match self {
            PolyJson::Box { corners } => {
                let b = Aabb::new(corners[0].into(), corners[1].into());
                ConvexPolyhedron::from_aabb(&b)
                    .ok_or_else(|| Error::validation(field, "box is empty or flat"))
            }
            PolyJson::Halfspaces { halfspaces } => {
                let mut planes = Vec::with_capacity(halfspaces.len());
                for (i, h) in halfspaces.iter().enumerate() {
                    let p = Plane::new(Vec3::new(h[0], h[1], h[2]), h[3]).ok_or_else(|| {
                        Error::validation(format!("{field}.halfspaces[{i}]"), "degenerate halfspace")
                    })?;
                    planes.push(p);
                }
                match ConvexPolyhedron::from_halfspaces(&planes) {
                    Ok(Some(p)) => Ok(p),
                    Ok(None) => Err(Error::validation(field, "polyhedron is empty or flat")),
                    Err(Error::Unbounded(_)) => Err(Error::Unbounded(format!("{field} is unbounded"))),
                    Err(e) => Err(e),
                }
            }
        }
    }
}

pub fn union_to_json(u: &PolyUnion) -> Vec<PolyJson> {
    u.pieces().iter().map(PolyJson::from_poly).collect()
}

pub fn union_from_json(v: &[PolyJson], field: &str) -> Result<PolyUnion> {
    let mut pieces = Vec::with_capacity(v.len());
    for (i, p) in v.iter().enumerate() {
        pieces.push(p.to_poly(&format!("{field}[{i}]"))?);
    }
    Ok(PolyUnion::new(pieces))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityJson {
    pub id: String,
    /// Degrees.
    pub theta_min: f64,
    /// Degrees.
    pub theta_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostZoneJson {
    pub region: Vec<PolyJson>,
    pub cost: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapabilityJson {
    pub quality: String,
    pub range: f64,
    pub ffz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorJson {
    pub id: String,
    #[serde(rename = "type", default)]
    pub kind: String,
    pub admissible: Vec<PolyJson>,
    pub cost_zones: Vec<CostZoneJson>,
    pub capabilities: Vec<CapabilityJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightJson {
    pub j: usize,
    pub q: String,
    pub h: String,
    pub w: f64,
}

/// On-disk scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioJson {
    #[serde(default)]
    pub schema: Option<String>,
    pub roi: Vec<PolyJson>,
    #[serde(default)]
    pub obstacles: Vec<PolyJson>,
    pub priorities: BTreeMap<String, Vec<PolyJson>>,
    pub qualities: Vec<QualityJson>,
    pub sensors: Vec<SensorJson>,
    pub k: usize,
    #[serde(default)]
    pub weights: Vec<WeightJson>,
}

fn check_schema(s: &Option<String>) -> Result<()> {
    match s.as_deref() {
        None | Some(SCHEMA) => Ok(()),
        Some(other) => Err(Error::Schema(format!("unsupported schema {other:?}, expected {SCHEMA:?}"))),
    }
}

impl ScenarioJson {
    pub fn into_scenario(self) -> Result<Scenario> {
        check_schema(&self.schema)?;
        let roi = union_from_json(&self.roi, "roi")?;
        let obstacles = union_from_json(&self.obstacles, "obstacles")?;
        let mut priorities = Vec::new();
        for (name, v) in &self.priorities {
            priorities.push((name.clone(), union_from_json(v, &format!("priorities.{name}"))?));
        }
        let qualities: Vec<QualityLevel> = self
            .qualities
            .iter()
            .map(|q| QualityLevel {
                id: q.id.clone(),
                theta_min: q.theta_min.to_radians(),
                theta_max: q.theta_max.to_radians(),
            })
            .collect();
        let q_index = |id: &str, field: &str| -> Result<usize> {
            qualities
                .iter()
                .position(|q| q.id == id)
                .ok_or_else(|| Error::validation(field, format!("unknown quality {id:?}")))
        };
        let mut sensors = Vec::new();
        for (i, s) in self.sensors.iter().enumerate() {
            let field = format!("sensors[{i}]");
            let admissible = union_from_json(&s.admissible, &format!("{field}.admissible"))?;
            let mut cost_zones = Vec::new();
            for (z, cz) in s.cost_zones.iter().enumerate() {
                cost_zones.push(CostZone {
                    region: union_from_json(&cz.region, &format!("{field}.cost_zones[{z}]"))?,
                    cost: cz.cost,
                });
            }
            let mut caps: Vec<Option<Capability>> = vec![None; qualities.len()];
            for c in &s.capabilities {
                let q = q_index(&c.quality, &format!("{field}.capabilities"))?;
                if caps[q].is_some() {
                    return Err(Error::validation(
                        format!("{field}.capabilities"),
                        format!("quality {:?} listed twice", c.quality),
                    ));
                }
                caps[q] = Some(Capability {
                    range: c.range,
                    ffz: c.ffz,
                });
            }
            let capabilities = caps
                .into_iter()
                .enumerate()
                .map(|(q, c)| {
                    c.ok_or_else(|| {
                        Error::validation(
                            format!("{field}.capabilities"),
                            format!("missing quality {:?}", qualities[q].id),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            sensors.push(SensorSpec {
                id: s.id.clone(),
                kind: s.kind.clone(),
                admissible: IndexedUnion::new(admissible),
                cost_zones,
                capabilities,
            });
        }
        let names: Vec<String> = priorities.iter().map(|(n, _)| n.clone()).collect();
        let mut weights = Weights::zeros(self.k + 1, qualities.len(), names.len());
        for (i, w) in self.weights.iter().enumerate() {
            let field = format!("weights[{i}]");
            if w.j > self.k {
                return Err(Error::validation(field, format!("j = {} exceeds k = {}", w.j, self.k)));
            }
            let q = q_index(&w.q, &field)?;
            let h = names
                .iter()
                .position(|n| *n == w.h)
                .ok_or_else(|| Error::validation(&field, format!("unknown priority {:?}", w.h)))?;
            weights.set(w.j, q, h, w.w);
        }
        Scenario::new(roi, obstacles, priorities, qualities, sensors, self.k, weights)
    }

    pub fn from_scenario(sc: &Scenario) -> ScenarioJson {
        let mut weights = Vec::new();
        for j in 0..=sc.k {
            for (q, ql) in sc.qualities.iter().enumerate() {
                for (h, p) in sc.priorities.iter().enumerate() {
                    weights.push(WeightJson {
                        j,
                        q: ql.id.clone(),
                        h: p.name.clone(),
                        w: sc.weights.get(j, q, h),
                    });
                }
            }
        }
        ScenarioJson {
            schema: Some(SCHEMA.to_string()),
            roi: union_to_json(sc.roi.union()),
            obstacles: union_to_json(sc.obstacles.union()),
            priorities: sc
                .priorities
                .iter()
                .map(|p| (p.name.clone(), union_to_json(p.region.union())))
                .collect(),
            qualities: sc
                .qualities
                .iter()
                .map(|q| QualityJson {
                    id: q.id.clone(),
                    theta_min: degrees(q.theta_min),
                    theta_max: degrees(q.theta_max),
                })
                .collect(),
            sensors: sc
                .sensors
                .iter()
                .map(|s| SensorJson {
                    id: s.id.clone(),
                    kind: s.kind.clone(),
                    admissible: union_to_json(s.admissible.union()),
                    cost_zones: s
                        .cost_zones
                        .iter()
                        .map(|z| CostZoneJson {
                            region: union_to_json(&z.region),
                            cost: z.cost,
                        })
                        .collect(),
                    capabilities: s
                        .capabilities
                        .iter()
                        .zip(&sc.qualities)
                        .map(|(c, q)| CapabilityJson {
                            quality: q.id.clone(),
                            range: c.range,
                            ffz: c.ffz,
                        })
                        .collect(),
                })
                .collect(),
            k: sc.k,
            weights,
        }
    }
}

/// On-disk deployment: `{"schema": ..., "positions": {id: [x, y, z]}}`.
/// A bare `{id: [x, y, z]}` map is accepted on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeploymentJson {
    pub schema: String,
    pub positions: BTreeMap<String, [f64; 3]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DeploymentInput {
    Wrapped {
        #[serde(default)]
        schema: Option<String>,
        positions: BTreeMap<String, [f64; 3]>,
    },
    Bare(BTreeMap<String, [f64; 3]>),
}

pub fn deployment_from_str(s: &str) -> Result<Deployment> {
    let input: DeploymentInput = serde_json::from_str(s)?;
    let positions = match input {
        DeploymentInput::Wrapped { schema, positions } => {
            check_schema(&schema)?;
            positions
        }
        DeploymentInput::Bare(m) => m,
    };
    Ok(Deployment {
        positions: positions.into_iter().map(|(k, v)| (k, v.into())).collect(),
    })
}

pub fn deployment_to_json(d: &Deployment) -> DeploymentJson {
    DeploymentJson {
        schema: SCHEMA.to_string(),
        positions: d.positions.iter().map(|(k, v)| (k.clone(), v.to_array())).collect(),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub fn scenario_from_str(s: &str) -> Result<Scenario> {
    let raw: ScenarioJson = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
    raw.into_scenario()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let raw: ScenarioJson =
        serde_json::from_reader(open(path)?).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    raw.into_scenario()
}

pub fn load_deployment(path: impl AsRef<Path>) -> Result<Deployment> {
    let path = path.as_ref();
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    deployment_from_str(&s)
}

/// Writes `value` as pretty JSON through a buffered writer.
pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn save_scenario(path: impl AsRef<Path>, sc: &Scenario) -> Result<()> {
    write_json(path, &ScenarioJson::from_scenario(sc))
}

pub fn save_deployment(path: impl AsRef<Path>, d: &Deployment) -> Result<()> {
    write_json(path, &deployment_to_json(d))
}
