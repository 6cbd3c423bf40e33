//! Monte Carlo estimation of the deployment objective with a relative
//! `(ε, δ)` guarantee on the uncovered-volume cost.

mod ebg;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use ebg::{EbgStop, BETA, P};

use crate::coverage::faults_to_uncover;
use crate::geom::Vec3;
use crate::scenario::{Deployment, Placed, Scenario};
use crate::{Error, Result};

/// Lowest accepted fraction of RoI-box samples falling in the RoI.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorConfig {
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    /// Samples drawn per task; each batch has its own random stream.
    pub batch: usize,
    pub max_samples: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            eps: 0.01,
            delta: 0.01,
            seed: 0,
            batch: 4096,
            max_samples: 10_000_000,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::validation("eps", format!("must lie in (0, 1), got {}", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::validation("delta", format!("must lie in (0, 1), got {}", self.delta)));
        }
        if self.batch == 0 {
            return Err(Error::validation("batch", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    StoppingRule,
    /// All samples were zero and a mean above the threshold was rejected.
    ZeroHypothesis,
    Cap,
    /// Nothing to estimate: all weights vanish.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZMean {
    pub j: usize,
    pub q: String,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveEstimate {
    pub placement: f64,
    pub uncov_estimate: f64,
    pub total: f64,
    pub samples_used: u64,
    pub means: Vec<ZMean>,
    pub terminated_by: Termination,
    pub seed: u64,
}

/// A uniform point of the RoI, by rejection from its bounding box.
pub fn sample_point(sc: &Scenario, rng: &mut impl Rng) -> Result<Vec3> {
    let b = sc.roi.bbox();
    let acceptance = sc.roi_volume() / b.volume();
    if !(acceptance >= MIN_ACCEPTANCE) {
        return Err(Error::Sampling(format!(
            "RoI fills only {acceptance:.2e} of its bounding box"
        )));
    }
    let e = b.extent();
    loop {
        let x = b.min + Vec3::new(rng.gen::<f64>() * e.x, rng.gen::<f64>() * e.y, rng.gen::<f64>() * e.z);
        if sc.roi.contains(x, 0.0) {
            return Ok(x);
        }
    }
}

/// `Z^{j,q}(x)` for all `j <= k` and quality levels, flattened as
/// `j * |Q| + q`.
pub fn sample_z(x: Vec3, d: &Deployment, sc: &Scenario) -> Result<Vec<f64>> {
    let placed = sc.placed(d)?;
    z_values(x, &placed, sc)
}

fn z_values(x: Vec3, placed: &[Placed], sc: &Scenario) -> Result<Vec<f64>> {
    let h = sc
        .priority_of(x)
        .ok_or_else(|| Error::domain(format!("sample point {x:?} lies outside the RoI")))?;
    let nq = sc.qualities.len();
    let mut out = vec![0.0; (sc.k + 1) * nq];
    if sc.in_obstacle(x) {
        return Ok(out);
    }
    for q in 0..nq {
        let need = faults_to_uncover(x, q, sc.k, placed, sc);
        for j in need.min(sc.k + 1)..=sc.k {
            out[j * nq + q] = sc.roi_volume() * sc.weights.get(j, q, h);
        }
    }
    Ok(out)
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(batch);
    r
}

fn run_batch(b: u64, placed: &[Placed], sc: &Scenario, cfg: &EstimatorConfig) -> Result<Vec<Vec<f64>>> {
    let mut rng = batch_rng(cfg.seed, b);
    (0..cfg.batch)
        .map(|_| z_values(sample_point(sc, &mut rng)?, placed, sc))
        .collect()
}

/// Estimates `Placem(D) + Σ_{j,q} E[Z^{j,q}]`.
///
/// Batches are drawn in parallel but consumed in index order, so the result
/// depends only on the seed and configuration.
pub fn estimate_objective(d: &Deployment, sc: &Scenario, cfg: &EstimatorConfig) -> Result<ObjectiveEstimate> {
    cfg.validate()?;
    let placement = sc.placement_cost(d)?;
    let placed = sc.placed(d)?;
    let nq = sc.qualities.len();
    let nz = (sc.k + 1) * nq;
    let range = sc.cost_range();
    let finish = |uncov: f64, sums: &[f64], n: u64, how: Termination| {
        let means = (0..nz)
            .map(|i| ZMean {
                j: i / nq,
                q: sc.qualities[i % nq].id.clone(),
                mean: if n > 0 { sums[i] / n as f64 } else { 0.0 },
            })
            .collect();
        ObjectiveEstimate {
            placement,
            uncov_estimate: uncov,
            total: placement + uncov,
            samples_used: n,
            means,
            terminated_by: how,
            seed: cfg.seed,
        }
    };
    if range <= 0.0 {
        return Ok(finish(0.0, &vec![0.0; nz], 0, Termination::Trivial));
    }

    // half of δ for the stopping rule, half for the all-zero test
    let mut rule = EbgStop::new(cfg.eps, cfg.delta / 2.0, range)?;
    let theta = 1e-3 * placement;
    let zero_stop = if theta > 0.0 {
        ((cfg.delta / 2.0).ln() / (1.0 - theta / range).ln()).ceil()
    } else {
        f64::INFINITY
    };
    let mut all_zero = true;
    let mut sums = vec![0.0; nz];
    let mut n: u64 = 0;
    let wave = rayon::current_num_threads().max(1) as u64;
    let mut next_batch = 0u64;
    loop {
        let ids: Vec<u64> = (next_batch..next_batch + wave).collect();
        next_batch += wave;
        let batches: Result<Vec<Vec<Vec<f64>>>> =
            ids.par_iter().map(|&b| run_batch(b, &placed, sc, cfg)).collect();
        for zs in batches?.into_iter().flatten() {
            n += 1;
            let total: f64 = zs.iter().sum();
            for (s, z) in sums.iter_mut().zip(&zs) {
                *s += z;
            }
            all_zero &= total == 0.0;
            if rule.push(total) {
                return Ok(finish(rule.estimate(), &sums, n, Termination::StoppingRule));
            }
            if all_zero && n as f64 >= zero_stop {
                return Ok(finish(0.0, &sums, n, Termination::ZeroHypothesis));
            }
            if n >= cfg.max_samples {
                return Ok(finish(rule.mean(), &sums, n, Termination::Cap));
            }
        }
    }
}
