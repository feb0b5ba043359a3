use std::sync::RwLock;

use crate::error::{require_positive, Result};
use crate::special_fn::gamma::ln_gamma;

/// Weight scale `alpha` and exponent `m` of the measure `∝ exp(-alpha |z|^m) dA`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightParams {
    alpha: f64,
    m: f64,
}

/// Range of `m` over which accuracy is guaranteed.
pub const GUARANTEED_M: (f64, f64) = (0.5, 10.0);
/// Range of `alpha` over which accuracy is guaranteed.
pub const GUARANTEED_ALPHA: (f64, f64) = (1e-3, 1e6);

impl WeightParams {
    pub fn new(alpha: f64, m: f64) -> Result<Self> {
        Ok(Self {
            alpha: require_positive("alpha", alpha)?,
            m: require_positive("m", m)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// `2/m`, the Gamma-argument step of the moment sequence.
    pub fn order(&self) -> f64 {
        2.0 / self.m
    }

    /// False outside the documented accuracy box. Evaluation still runs.
    pub fn is_guaranteed(&self) -> bool {
        (GUARANTEED_M.0..=GUARANTEED_M.1).contains(&self.m)
            && (GUARANTEED_ALPHA.0..=GUARANTEED_ALPHA.1).contains(&self.alpha)
    }

    /// `ln( m alpha^{2/m} / (2π Γ(2/m)) )`, the density constant of the
    /// normalized measure.
    pub fn log_density_constant(&self) -> f64 {
        self.m.ln() + self.order() * self.alpha.ln()
            - (2.0 * std::f64::consts::PI).ln()
            - ln_gamma(self.order())
    }
}

/// `ln s_n = -(2n/m) ln alpha + ln Γ(2(n+1)/m)`.
pub fn log_stieltjes_moment(params: &WeightParams, n: usize) -> f64 {
    let a = params.order();
    -(n as f64) * a * params.alpha.ln() + ln_gamma(a * (n as f64 + 1.0))
}

/// Append-only memo of `ln s_n(alpha, m)`.
///
/// Entries are computed once and never change; readers take a shared lock and
/// growth takes the exclusive lock.
#[derive(Debug)]
pub struct MomentTable {
    params: WeightParams,
    log_s: RwLock<Vec<f64>>,
}

impl MomentTable {
    pub fn new(params: WeightParams) -> Self {
        Self {
            params,
            log_s: RwLock::new(Vec::new()),
        }
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    /// Number of materialized entries.
    pub fn len(&self) -> usize {
        self.log_s.read().expect("moment table poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `ln s_n`, extending the table if needed.
    pub fn log_moment(&self, n: usize) -> f64 {
        if let Some(&v) = self.log_s.read().expect("moment table poisoned").get(n) {
            return v;
        }
        self.ensure(n + 1);
        self.log_s.read().expect("moment table poisoned")[n]
    }

    /// Makes sure at least `len` entries exist.
    pub fn ensure(&self, len: usize) {
        if self.len() >= len {
            return;
        }
        let mut table = self.log_s.write().expect("moment table poisoned");
        // grow geometrically so hot loops do not take the write lock often
        let target = len.max(2 * table.len()).max(64);
        let start = table.len();
        table.extend((start..target).map(|n| log_stieltjes_moment(&self.params, n)));
    }

    /// Runs `f` on a read view holding at least `len` entries.
    pub fn with_prefix<R>(&self, len: usize, f: impl FnOnce(&[f64]) -> R) -> R {
        self.ensure(len);
        let table = self.log_s.read().expect("moment table poisoned");
        f(&table)
    }
}
