//! Point coverage, placement constraints, and the polyhedral uncovered
//! region of a deployment.

mod constraints;
mod pair;
mod point;
mod uncovered;

pub use constraints::{eval_constraints, scenario_bbox, ConstraintReport, SensorConstraints};
pub use pair::{process_sensor_pair, BloatedObstacles, PairRegions};
pub use point::{cover_jq, covering_pairs, faults_to_uncover, in_uncovered_formula, point_q_cover};
pub use uncovered::{
    cell_grid, cells, uncovered, uncovered_region, useful_pairs, UncoveredConfig, UncoveredEntry,
    UncoveredResult,
};
