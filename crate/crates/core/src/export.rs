//! Files read by the viewer: uncovered regions per `(j, q)`, per-pair
//! regions, the worst single-fault layer, and the bundle tying them to a
//! scenario and deployment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coverage::{uncovered_region, PairRegions, UncoveredConfig, UncoveredResult};
use crate::geom::{bool_intersect, Approx, PolyUnion};
use crate::scenario::{
    deployment_to_json, union_to_json, write_json, Deployment, PolyJson, Scenario, ScenarioJson,
    SCHEMA,
};
use crate::{Error, Result};

/// Both approximations of one uncovered region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub schema: String,
    pub j: usize,
    pub q: String,
    pub rho: f64,
    pub under_volume: f64,
    pub over_volume: f64,
    pub under: Vec<PolyJson>,
    pub over: Vec<PolyJson>,
}

impl RegionFile {
    pub fn file_name(&self) -> String {
        format!("uncovered-j{}-{}.json", self.j, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub a: String,
    pub b: String,
    pub q: String,
    /// Region not covered by the pair, over-approximated.
    pub uncovered: Vec<PolyJson>,
    pub out_of_range: Vec<PolyJson>,
    pub obstructed: Vec<PolyJson>,
    pub bad_angle: Vec<PolyJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub schema: String,
    pub rho: f64,
    pub pairs: Vec<PairJson>,
}

/// The single sensor whose failure costs most, with the regions its
/// survivors leave uncovered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstFault {
    pub sensor: String,
    /// `Σ_q Σ_h w(0, q, h) · vol(U^{0,q} ∩ R_h)` over the surviving sensors.
    pub cost: f64,
    /// Over-approximated `U^{0,q}` of the survivors, one entry per quality.
    pub regions: Vec<WorstFaultRegion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstFaultRegion {
    pub q: String,
    pub volume: f64,
    pub region: Vec<PolyJson>,
}

/// `uncovered.json` of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncoveredBundle {
    pub schema: String,
    pub regions: Vec<RegionFile>,
    pub pairs_available: bool,
    pub worst_fault: Option<WorstFault>,
}

pub fn region_files(res: &UncoveredResult, sc: &Scenario, rho: f64) -> Vec<RegionFile> {
    res.entries
        .iter()
        .map(|e| RegionFile {
            schema: SCHEMA.to_string(),
            j: e.j,
            q: sc.qualities[e.q].id.clone(),
            rho,
            under_volume: e.under.volume(),
            over_volume: e.over.volume(),
            under: union_to_json(e.under.union()),
            over: union_to_json(e.over.union()),
        })
        .collect()
}

pub fn pair_file(pairs: &[PairRegions], sc: &Scenario, rho: f64) -> PairFile {
    PairFile {
        schema: SCHEMA.to_string(),
        rho,
        pairs: pairs
            .iter()
            .map(|p| PairJson {
                a: sc.sensors[p.a].id.clone(),
                b: sc.sensors[p.b].id.clone(),
                q: sc.qualities[p.q].id.clone(),
                uncovered: union_to_json(p.u_pair.union()),
                out_of_range: union_to_json(&p.out_of_range),
                obstructed: union_to_json(&p.obstructed),
                bad_angle: union_to_json(&p.bad_angle),
            })
            .collect(),
    }
}

fn weighted_volume(u: &PolyUnion, q: usize, sc: &Scenario) -> f64 {
    sc.priorities
        .iter()
        .enumerate()
        .map(|(h, p)| {
            let w = sc.weights.get(0, q, h);
            if w == 0.0 {
                0.0
            } else {
                w * bool_intersect(u, p.region.union()).volume()
            }
        })
        .sum()
}

/// Enumerates single faults and returns the one maximizing the weighted
/// uncovered volume of the survivors; ties go to the earlier sensor.
/// `None` for an empty deployment.
pub fn worst_single_fault(d: &Deployment, sc: &Scenario, cfg: &UncoveredConfig) -> Result<Option<WorstFault>> {
    let mut worst: Option<WorstFault> = None;
    for s in &sc.sensors {
        if d.get(&s.id).is_none() {
            continue;
        }
        let mut rest = d.clone();
        rest.positions.remove(&s.id);
        let mut cost = 0.0;
        let mut regions = Vec::with_capacity(sc.qualities.len());
        for (q, ql) in sc.qualities.iter().enumerate() {
            let u = uncovered_region(&rest, 0, q, sc, Approx::Over, cfg)?;
            cost += weighted_volume(u.union(), q, sc);
            regions.push(WorstFaultRegion {
                q: ql.id.clone(),
                volume: u.volume(),
                region: union_to_json(u.union()),
            });
        }
        if worst.as_ref().is_none_or(|w| cost > w.cost) {
            worst = Some(WorstFault {
                sensor: s.id.clone(),
                cost,
                regions,
            });
        }
    }
    Ok(worst)
}

/// Writes `scenario.json`, `deployment.json`, `uncovered.json` and, when
/// pairs are given, `pairs.json` into `dir`. Returns the written paths.
pub fn write_bundle(
    dir: &Path,
    sc: &Scenario,
    d: &Deployment,
    regions: Vec<RegionFile>,
    pairs: Option<&PairFile>,
    worst_fault: Option<WorstFault>,
) -> Result<Vec<PathBuf>> {
    for id in d.positions.keys() {
        if sc.sensor_index(id).is_none() {
            return Err(Error::validation("deployment", format!("unknown sensor {id:?}")));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    let mut put = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let p = dir.join(name);
        f(&p)?;
        out.push(p);
        Ok(())
    };
    put("scenario.json", &|p| write_json(p, &ScenarioJson::from_scenario(sc)))?;
    put("deployment.json", &|p| write_json(p, &deployment_to_json(d)))?;
    let bundle = UncoveredBundle {
        schema: SCHEMA.to_string(),
        regions,
        pairs_available: pairs.is_some(),
        worst_fault,
    };
    put("uncovered.json", &|p| write_json(p, &bundle))?;
    if let Some(pf) = pairs {
        put("pairs.json", &|p| write_json(p, pf))?;
    }
    Ok(out)
}

/// Reads the JSON file at `path` as `T`, naming the file in errors.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&s).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

/// Checks the schema tag of a file read back from disk.
pub fn check_schema(found: &str, path: &Path) -> Result<()> {
    if found != SCHEMA {
        return Err(Error::Schema(format!(
            "{}: schema {found:?}, expected {SCHEMA:?}",
            path.display()
        )));
    }
    Ok(())
}
