use rand::Rng;

use crate::geom::Vec3;
use crate::scenario::{Deployment, Scenario};
use crate::{Error, Result};

/// Cap on rejection attempts per sensor when sampling admissible positions.
pub const MAX_ATTEMPTS: usize = 100_000;

/// Flattening of deployments of every scenario sensor, in scenario order,
/// to `[x0, y0, z0, x1, ...]`, with box bounds from the admissible regions.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchVariableMap {
    pub ids: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SearchVariableMap {
    pub fn new(sc: &Scenario) -> SearchVariableMap {
        let mut lower = Vec::with_capacity(3 * sc.sensors.len());
        let mut upper = Vec::with_capacity(3 * sc.sensors.len());
        for s in &sc.sensors {
            let b = s.admissible.bbox();
            lower.extend(b.min.to_array());
            upper.extend(b.max.to_array());
        }
        SearchVariableMap {
            ids: sc.sensors.iter().map(|s| s.id.clone()).collect(),
            lower,
            upper,
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn flatten(&self, d: &Deployment) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.dim());
        for id in &self.ids {
            let p = d
                .get(id)
                .ok_or_else(|| Error::validation("deployment", format!("sensor {id:?} is not placed")))?;
            out.extend(p.to_array());
        }
        Ok(out)
    }

    pub fn unflatten(&self, x: &[f64]) -> Result<Deployment> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                x.len()
            )));
        }
        let mut d = Deployment::new();
        for (i, id) in self.ids.iter().enumerate() {
            d = d.with(id.clone(), Vec3::new(x[3 * i], x[3 * i + 1], x[3 * i + 2]));
        }
        Ok(d)
    }
}

/// A deployment with every sensor uniform over its admissible region.
pub fn random_admissible(sc: &Scenario, rng: &mut impl Rng) -> Result<Deployment> {
    let mut d = Deployment::new();
    for s in &sc.sensors {
        let b = s.admissible.bbox();
        let e = b.extent();
        let mut found = None;
        for _ in 0..MAX_ATTEMPTS {
            let p = b.min + Vec3::new(rng.gen::<f64>() * e.x, rng.gen::<f64>() * e.y, rng.gen::<f64>() * e.z);
            if s.admissible.contains(p, 0.0) {
                found = Some(p);
                break;
            }
        }
        let p = found.ok_or_else(|| {
            Error::Sampling(format!(
                "no admissible position for sensor {:?} after {MAX_ATTEMPTS} attempts",
                s.id
            ))
        })?;
        d = d.with(s.id.clone(), p);
    }
    Ok(d)
}
