use crate::{Error, Result};

/// Growth factor of the geometric checking schedule.
pub const BETA: f64 = 1.1;
/// Exponent of the per-check failure budget `d_k = c / k^p`.
pub const P: f64 = 1.1;

/// Empirical-Bernstein stopping rule with geometric checking times, for
/// i.i.d. samples in `[0, range]`.
///
/// At the k-th check the confidence radius is
/// `σ̂ sqrt(2x/t) + 3 R x / t` with `x = -α log(d_k / 3)`; the run stops when
/// `(1+ε) LB >= (1-ε) UB` and then `½[(1+ε) LB + (1-ε) UB]` is within a
/// factor `1 ± ε` of the mean with probability at least `1 - δ`.
#[derive(Debug, Clone)]
pub struct EbgStop {
    eps: f64,
    c: f64,
    range: f64,
    t: u64,
    k: u32,
    mean: f64,
    m2: f64,
    lb: f64,
    ub: f64,
    stopped: bool,
}

fn epoch_end(k: u32) -> u64 {
    BETA.powi(k as i32).floor() as u64
}

impl EbgStop {
    pub fn new(eps: f64, delta: f64, range: f64) -> Result<EbgStop> {
        if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("need 0 < eps, delta < 1, got {eps}, {delta}")));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::domain(format!("sample range must be positive, got {range}")));
        }
        Ok(EbgStop {
            eps,
            c: delta * (P - 1.0) / P,
            range,
            t: 0,
            k: 0,
            mean: 0.0,
            m2: 0.0,
            lb: 0.0,
            ub: f64::INFINITY,
            stopped: false,
        })
    }

    /// Feeds one sample; returns true once the rule has stopped.
    pub fn push(&mut self, z: f64) -> bool {
        if self.stopped {
            return true;
        }
        self.t += 1;
        let t = self.t as f64;
        let d = z - self.mean;
        self.mean += d / t;
        self.m2 += d * (z - self.mean);

        if self.t >= epoch_end(self.k) {
            self.k += 1;
            let alpha = epoch_end(self.k) as f64 / epoch_end(self.k - 1) as f64;
            let dk = self.c / (self.k as f64).powf(P);
            let x = -alpha * (dk / 3.0).ln();
            let sigma = (self.m2 / t).max(0.0).sqrt();
            let ct = sigma * (2.0 * x / t).sqrt() + 3.0 * self.range * x / t;
            self.lb = self.lb.max(self.mean.abs() - ct);
            self.ub = self.ub.min(self.mean.abs() + ct);
            while epoch_end(self.k) <= self.t {
                self.k += 1;
            }
            self.stopped = (1.0 + self.eps) * self.lb >= (1.0 - self.eps) * self.ub;
        }
        self.stopped
    }

    pub fn stopped(&self) -> bool {
        self.stopped
    }

    pub fn samples(&self) -> u64 {
        self.t
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// The certified estimate once stopped, else the running mean.
    pub fn estimate(&self) -> f64 {
        if self.stopped {
            0.5 * ((1.0 + self.eps) * self.lb + (1.0 - self.eps) * self.ub)
        } else {
            self.mean
        }
    }
}
