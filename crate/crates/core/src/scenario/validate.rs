use std::collections::HashSet;

use crate::geom::{bool_diff, bool_intersect, Approx, PolyUnion};
use crate::{Error, Result};

use super::model::VOLUME_REL_TOL;
use super::Scenario;

pub(super) fn validate(sc: &Scenario) -> Result<()> {
    if sc.roi.is_empty() || !(sc.roi_volume() > 0.0) {
        return Err(Error::validation("roi", "region of interest is empty"));
    }
    let vr = sc.roi_volume();
    let slack = VOLUME_REL_TOL * vr;

    let outside = bool_diff(sc.obstacles.union(), sc.roi.union(), Approx::Under).volume();
    if outside > slack {
        return Err(Error::validation("obstacles", "obstacles extend outside the region of interest"));
    }

    check_priorities(sc, vr, slack)?;
    check_qualities(sc)?;
    check_sensors(sc)?;

    if sc.weights.faults() != sc.k + 1 {
        return Err(Error::validation("weights", "weight table does not match k"));
    }
    for j in 0..=sc.k {
        for q in 0..sc.qualities.len() {
            for h in 0..sc.priorities.len() {
                let w = sc.weights.get(j, q, h);
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(Error::validation("weights", format!("w({j},{q},{h}) = {w} is not >= 0")));
                }
            }
        }
    }
    Ok(())
}

fn check_priorities(sc: &Scenario, vr: f64, slack: f64) -> Result<()> {
    if sc.priorities.is_empty() {
        return Err(Error::validation("priorities", "at least one priority region is required"));
    }
    let mut names = HashSet::new();
    for p in &sc.priorities {
        if !names.insert(p.name.as_str()) {
            return Err(Error::validation("priorities", format!("duplicate priority {:?}", p.name)));
        }
    }
    let not_partition = |why: String| Error::validation("priorities", format!("priorities not a partition: {why}"));
    let mut total = 0.0;
    for (i, p) in sc.priorities.iter().enumerate() {
        let out = bool_diff(p.region.union(), sc.roi.union(), Approx::Under).volume();
        if out > slack {
            return Err(not_partition(format!("{:?} extends outside the RoI", p.name)));
        }
        total += p.region.volume();
        for q in &sc.priorities[..i] {
            let overlap = bool_intersect(p.region.union(), q.region.union()).volume();
            if overlap > slack {
                return Err(not_partition(format!("{:?} and {:?} overlap", q.name, p.name)));
            }
        }
    }
    if (total - vr).abs() > slack {
        return Err(not_partition(format!(
            "priority volumes sum to {total}, RoI volume is {vr}"
        )));
    }
    Ok(())
}

fn check_qualities(sc: &Scenario) -> Result<()> {
    if sc.qualities.is_empty() {
        return Err(Error::validation("qualities", "at least one quality level is required"));
    }
    let mut ids = HashSet::new();
    for (i, q) in sc.qualities.iter().enumerate() {
        let field = format!("qualities[{i}]");
        if !ids.insert(q.id.as_str()) {
            return Err(Error::validation(field, format!("duplicate quality id {:?}", q.id)));
        }
        if !(0.0 < q.theta_min && q.theta_min < q.theta_max && q.theta_max < std::f64::consts::PI) {
            return Err(Error::validation(field, "angle range must satisfy 0 < min < max < 180 degrees"));
        }
        if i > 0 {
            let p = &sc.qualities[i - 1];
            if q.theta_min < p.theta_min || q.theta_max > p.theta_max {
                return Err(Error::validation(
                    field,
                    "angle range must be nested in the previous quality's range",
                ));
            }
        }
    }
    Ok(())
}

fn check_sensors(sc: &Scenario) -> Result<()> {
    let mut ids = HashSet::new();
    for (i, s) in sc.sensors.iter().enumerate() {
        let field = |f: &str| format!("sensors[{i}].{f}");
        if !ids.insert(s.id.as_str()) {
            return Err(Error::validation(field("id"), format!("duplicate sensor id {:?}", s.id)));
        }
        if s.capabilities.len() != sc.qualities.len() {
            return Err(Error::validation(
                field("capabilities"),
                "exactly one capability per quality level is required",
            ));
        }
        for (q, c) in s.capabilities.iter().enumerate() {
            if !(c.range > 0.0 && c.range.is_finite() && c.ffz >= 0.0 && c.ffz.is_finite()) {
                return Err(Error::validation(field("capabilities"), format!("invalid range/ffz at quality {q}")));
            }
            if q > 0 {
                let p = s.capabilities[q - 1];
                if c.range > p.range {
                    return Err(Error::validation(
                        field("capabilities"),
                        "range must not increase with quality",
                    ));
                }
                if c.ffz < p.ffz {
                    return Err(Error::validation(
                        field("capabilities"),
                        "Fresnel radius must not decrease with quality",
                    ));
                }
            }
        }
        if s.admissible.is_empty() {
            return Err(Error::validation(field("admissible"), "admissible region is empty"));
        }
        if s.cost_zones.is_empty() {
            return Err(Error::validation(field("cost_zones"), "at least one cost zone is required"));
        }
        for z in &s.cost_zones {
            if !(z.cost > 0.0 && z.cost.is_finite()) {
                return Err(Error::validation(field("cost_zones"), "costs must be > 0"));
            }
        }
        let zones = PolyUnion::new(
            s.cost_zones
                .iter()
                .flat_map(|z| z.region.pieces().iter().cloned())
                .collect(),
        );
        let adm_vol = s.admissible.volume();
        let uncovered = bool_diff(s.admissible.union(), &zones, Approx::Under).volume();
        if uncovered > VOLUME_REL_TOL * adm_vol {
            return Err(Error::validation(
                field("cost_zones"),
                "cost zones do not cover the admissible region",
            ));
        }
    }
    Ok(())
}
