//! Problem data: region of interest, obstacles, priorities, quality levels,
//! sensors, weights and deployments, with JSON I/O and validation.

mod builder;
mod io;
mod model;
mod validate;

pub use io::{
    deployment_from_str, deployment_to_json, load_deployment, load_scenario, save_deployment,
    save_scenario, scenario_from_str, union_from_json, union_to_json, write_json, CapabilityJson,
    CostZoneJson, DeploymentJson, PolyJson, QualityJson, ScenarioJson, SensorJson, WeightJson,
    SCHEMA,
};
pub use builder::{Corners, SceneBuilder};
pub use model::{
    Capability, CostZone, Deployment, Placed, Priority, QualityLevel, Scenario, SensorSpec, Weights,
    VOLUME_REL_TOL,
};
