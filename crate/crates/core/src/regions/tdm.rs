use serde::Serialize;

use super::frontier::{Frontier, TdmArc};
use crate::channel::{c, RatePair};
use crate::error::{check_range, Result};

/// Rate of a user holding time share `rho` at average power `p`:
/// `rho·C(p/rho)`, extended continuously by 0 at `rho = 0`.
pub fn tdm_rate(p: f64, rho: f64) -> f64 {
    if rho <= 0.0 {
        0.0
    } else {
        rho * c(p / rho)
    }
}

/// Smallest time share giving rate `target` at power `p`; saturates at 1.
pub fn tdm_share_for_rate(p: f64, target: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    if target >= c(p) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tdm_rate(p, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Rate pairs reachable by time-sharing the channel, `rho1 + rho2 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdmRegion {
    pub p1: f64,
    pub p2: f64,
}

impl TdmRegion {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let p1 = check_range("power P1", "finite and > 0", p1, p1 > 0.0)?;
        let p2 = check_range("power P2", "finite and > 0", p2, p2 > 0.0)?;
        Ok(Self { p1, p2 })
    }

    /// Boundary point when user 1 holds `rho` and user 2 the rest.
    pub fn boundary_point(&self, rho: f64) -> RatePair {
        RatePair::new(tdm_rate(self.p1, rho), tdm_rate(self.p2, 1.0 - rho))
    }

    pub fn rho_for_rate1(&self, r1: f64) -> f64 {
        tdm_share_for_rate(self.p1, r1)
    }

    pub fn rho_for_rate2(&self, r2: f64) -> f64 {
        tdm_share_for_rate(self.p2, r2)
    }

    pub fn contains(&self, g: &RatePair) -> bool {
        const TOL: f64 = 1e-9;
        if g.r1 < -TOL || g.r2 < -TOL || g.r1 > c(self.p1) + TOL || g.r2 > c(self.p2) + TOL {
            return false;
        }
        let rho1 = self.rho_for_rate1(g.r1);
        g.r2 <= tdm_rate(self.p2, 1.0 - rho1) + TOL
    }

    pub(crate) fn arc(&self, rho_lo: f64, rho_hi: f64, samples: usize) -> TdmArc {
        let n = samples.max(2);
        let samples = (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                self.boundary_point(rho_lo + t * (rho_hi - rho_lo))
            })
            .collect();
        TdmArc {
            region: *self,
            rho_lo,
            rho_hi,
            samples,
        }
    }
}

/// The TDM boundary sampled on `samples` evenly spaced time shares.
pub fn tdm_frontier(p1: f64, p2: f64, samples: usize) -> Result<Frontier> {
    let samples = check_range("sample count", ">= 2", samples as f64, samples >= 2)? as usize;
    Ok(Frontier::Tdm(TdmRegion::new(p1, p2)?.arc(0.0, 1.0, samples)))
}
