use std::time::Instant;

use super::{BlackBox, BlackBoxResult};
use crate::Result;

/// Settings of the built-in coordinate pattern search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Evaluations allowed, including the start point.
    pub budget: usize,
    /// Initial mesh size as a fraction of each variable's bound width.
    pub mesh_init: f64,
    /// The search stops once every mesh size falls below this fraction.
    pub mesh_min: f64,
    /// Relative accuracy of the objective; improvements smaller than this
    /// are confirmed by re-evaluation at half of it.
    pub eps: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 500,
            mesh_init: 0.1,
            mesh_min: 1e-3,
            eps: 0.01,
        }
    }
}

/// A point with its evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub x: Vec<f64>,
    pub result: BlackBoxResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub start: Evaluated,
    /// Best feasible point evaluated, if any.
    pub best: Option<Evaluated>,
    pub evaluations: usize,
}

/// Evaluation counter and index source of one search run.
struct Evaluator<'a> {
    bb: &'a dyn BlackBox,
    base: u64,
    used: usize,
    budget: usize,
    deadline: Option<Instant>,
}

impl Evaluator<'_> {
    fn exhausted(&self) -> bool {
        self.used >= self.budget || self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn eval(&mut self, x: &[f64], precision: f64) -> Result<BlackBoxResult> {
        let r = self.bb.evaluate(x, self.base + self.used as u64, precision)?;
        self.used += 1;
        Ok(r)
    }
}

/// Coordinate pattern search with mesh halving and a progressive barrier
/// on the aggregate constraint violation.
///
/// Polls `±Δ_i e_i` around the feasible incumbent (or, before one exists,
/// the least-violating point). A feasible trial replaces the incumbent
/// when its objective is lower; gains within `eps` of the incumbent must
/// survive a re-evaluation of both at `eps / 2`. An infeasible trial is
/// kept when it lowers the violation. `on_improve` sees every new feasible
/// incumbent.
#[allow(clippy::too_many_arguments)]
pub fn local_search(
    bb: &dyn BlackBox,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    cfg: &SearchConfig,
    index_base: u64,
    deadline: Option<Instant>,
    on_improve: &mut dyn FnMut(&Evaluated),
) -> Result<SearchOutcome> {
    let mut ev = Evaluator {
        bb,
        base: index_base,
        used: 0,
        budget: cfg.budget.max(1),
        deadline,
    };
    let start_eval = Evaluated {
        x: start.to_vec(),
        result: ev.eval(start, 1.0)?,
    };
    let mut best: Option<Evaluated> = None;
    let mut least_bad: Option<Evaluated> = None;
    if start_eval.result.feasible {
        on_improve(&start_eval);
        best = Some(start_eval.clone());
    } else {
        least_bad = Some(start_eval.clone());
    }

    let width: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| u - l).collect();
    let mut mesh: Vec<f64> = width.iter().map(|w| w * cfg.mesh_init).collect();
    // index of the last successful direction, polled first next time
    let mut lead = 0usize;
    let n = start.len();

    while !ev.exhausted() {
        if mesh.iter().zip(&width).all(|(m, w)| *m < cfg.mesh_min * w || *w == 0.0) {
            break;
        }
        let center = best.as_ref().or(least_bad.as_ref()).expect("start evaluated").x.clone();
        let mut success = false;
        for step in 0..2 * n {
            if ev.exhausted() {
                break;
            }
            let dir = (lead + step) % (2 * n);
            let (i, sign) = (dir / 2, if dir % 2 == 0 { 1.0 } else { -1.0 });
            if width[i] == 0.0 {
                continue;
            }
            let mut x = center.clone();
            x[i] = (x[i] + sign * mesh[i]).clamp(lower[i], upper[i]);
            if x[i] == center[i] {
                continue;
            }
            let r = ev.eval(&x, 1.0)?;
            let trial = Evaluated { x, result: r };
            let accepted = if trial.result.feasible {
                match &mut best {
                    None => true,
                    Some(inc) => improves(&mut ev, inc, &trial, cfg.eps)?,
                }
            } else if best.is_none() {
                let lb = least_bad.as_ref().expect("no feasible point yet");
                trial.result.violation() < lb.result.violation()
            } else {
                false
            };
            if accepted {
                if trial.result.feasible {
                    on_improve(&trial);
                    best = Some(trial);
                } else {
                    least_bad = Some(trial);
                }
                lead = dir;
                success = true;
                break;
            }
        }
        if success {
            for (m, w) in mesh.iter_mut().zip(&width) {
                *m = (*m * 2.0).min(w * cfg.mesh_init);
            }
        } else {
            for m in mesh.iter_mut() {
                *m /= 2.0;
            }
        }
    }
    Ok(SearchOutcome {
        start: start_eval,
        best,
        evaluations: ev.used,
    })
}

/// Whether feasible `trial` beats feasible incumbent `inc`, re-evaluating
/// marginal gains at doubled accuracy. Refreshes `inc` with the tighter value.
fn improves(ev: &mut Evaluator, inc: &mut Evaluated, trial: &Evaluated, eps: f64) -> Result<bool> {
    let (f_inc, f_new) = (inc.result.objective, trial.result.objective);
    if f_new >= f_inc {
        return Ok(false);
    }
    if f_inc - f_new > eps * f_inc.abs() || ev.exhausted() {
        return Ok(true);
    }
    let again = ev.eval(&trial.x, 0.5)?;
    if ev.exhausted() {
        return Ok(again.feasible && again.objective < f_inc);
    }
    let inc_again = ev.eval(&inc.x, 0.5)?;
    if inc_again.feasible {
        inc.result = inc_again;
    }
    Ok(again.feasible && again.objective < inc.result.objective)
}
