//! Derivative-free optimization of sensor positions: multi-start pattern
//! search over the estimated objective, plus an adapter for external
//! solvers.

mod blackbox;
pub mod external;
mod orchestrate;
mod search;
mod variables;

pub use blackbox::{black_box, mix_seed, BlackBox, BlackBoxResult, ScenarioBlackBox};
pub use external::{run_external, ExternalOutcome};
pub use orchestrate::{
    default_local_searches, eval_index, optimize, orchestrate, OptimizationReport, OptimizerConfig,
    RestartSummary, SearchReport, Solver, TracePoint,
};
pub use search::{local_search, Evaluated, SearchConfig, SearchOutcome};
pub use variables::{random_admissible, SearchVariableMap, MAX_ATTEMPTS};
