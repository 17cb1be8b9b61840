//! Achievable-rate regions: the fixed-split Han–Kobayashi polytope, the
//! strong-interference and MAC capacity regions, and the TDM region.

mod frontier;
mod polytope;
mod tdm;

use serde::Serialize;

pub use frontier::{ir_frontier, FeasibleSet, Frontier, TdmArc, TDM_SAMPLES};
pub use polytope::{LinearRow, RatePolytope, Scheme, FEAS_TOL, MERGE_TOL};
pub use tdm::{tdm_frontier, tdm_rate, tdm_share_for_rate, TdmRegion};

use crate::channel::{c, classify_regime, ChannelParams, RatePair, Regime};
use crate::error::{check_range, Error, Result};

/// Fractions of each user's power spent on its private message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSplit {
    pub alpha: f64,
    pub beta: f64,
}

impl PowerSplit {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let alpha = check_range("alpha", "in [0, 1]", alpha, (0.0..=1.0).contains(&alpha))?;
        let beta = check_range("beta", "in [0, 1]", beta, (0.0..=1.0).contains(&beta))?;
        Ok(Self { alpha, beta })
    }

    /// Both users send common messages only.
    pub const COMMON_ONLY: PowerSplit = PowerSplit {
        alpha: 0.0,
        beta: 0.0,
    };
}

/// Near-optimal fixed power split for the channel's regime: private power is
/// set so that it arrives at the unintended receiver at the noise level.
pub fn hk_power_split(params: &ChannelParams) -> PowerSplit {
    let inv = |inr: f64| (1.0 / inr).min(1.0);
    match classify_regime(params) {
        Regime::Strong => PowerSplit::COMMON_ONLY,
        Regime::Weak { .. } => PowerSplit {
            alpha: inv(params.inr2()),
            beta: inv(params.inr1()),
        },
        Regime::MixedAWeak => PowerSplit {
            alpha: 0.0,
            beta: inv(params.inr1()),
        },
        // mirror image of MixedAWeak
        Regime::MixedBWeak => PowerSplit {
            alpha: inv(params.inr2()),
            beta: 0.0,
        },
    }
}

/// The bounds of the fixed-split H-K region, including the three candidates
/// for the sum-rate bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HkBounds {
    pub phi1: f64,
    pub phi2: f64,
    pub phi31: f64,
    pub phi32: f64,
    pub phi33: f64,
    pub phi3: f64,
    pub phi4: f64,
    pub phi5: f64,
}

pub fn hk_bounds(params: &ChannelParams, split: PowerSplit) -> HkBounds {
    let (a, b, p1, p2) = (params.a(), params.b(), params.p1(), params.p2());
    let (al, be) = (split.alpha, split.beta);
    // noise plus private interference at each receiver
    let n1 = 1.0 + a * be * p2;
    let n2 = 1.0 + b * al * p1;

    let own1_all = c((p1 + a * (1.0 - be) * p2) / n1);
    let own2_all = c((p2 + b * (1.0 - al) * p1) / n2);
    let priv1 = c(al * p1 / n1);
    let priv2 = c(be * p2 / n2);
    let priv1_common2 = c((al * p1 + a * (1.0 - be) * p2) / n1);
    let priv2_common1 = c((be * p2 + b * (1.0 - al) * p1) / n2);

    let phi31 = own1_all + priv2;
    let phi32 = priv1 + own2_all;
    let phi33 = priv1_common2 + priv2_common1;
    HkBounds {
        phi1: c(p1 / n1),
        phi2: c(p2 / n2),
        phi31,
        phi32,
        phi33,
        phi3: phi31.min(phi32).min(phi33),
        phi4: own1_all + priv1 + priv2_common1,
        phi5: own2_all + priv2 + priv1_common2,
    }
}

impl HkBounds {
    /// Candidate corner points of the region when the `phi4` and `phi5`
    /// rows are both active, right to left. Only those with positive
    /// coordinates are extreme points.
    pub fn corner_points(&self) -> [RatePair; 4] {
        [
            RatePair::new(self.phi1, self.phi4 - 2.0 * self.phi1),
            RatePair::new(self.phi4 - self.phi3, 2.0 * self.phi3 - self.phi4),
            RatePair::new(2.0 * self.phi3 - self.phi5, self.phi5 - self.phi3),
            RatePair::new(self.phi5 - 2.0 * self.phi2, self.phi2),
        ]
    }
}

/// Region of the H-K scheme with fixed power split and no time sharing.
pub fn hk_region(params: &ChannelParams, split: PowerSplit) -> Result<RatePolytope> {
    let phi = hk_bounds(params, split);
    RatePolytope::new(
        Scheme::Hk {
            alpha: split.alpha,
            beta: split.beta,
        },
        [phi.phi1, phi.phi2],
        vec![
            LinearRow::new("phi3", [1.0, 1.0], phi.phi3),
            LinearRow::new("phi4", [2.0, 1.0], phi.phi4),
            LinearRow::new("phi5", [1.0, 2.0], phi.phi5),
        ],
    )
}

/// Sum-rate bound of the strong-interference capacity region.
pub fn strong_sum_bound(params: &ChannelParams) -> f64 {
    let (a, b, p1, p2) = (params.a(), params.b(), params.p1(), params.p2());
    c(p1 + a * p2).min(c(b * p1 + p2))
}

/// Capacity region of the strong interference channel (both users send
/// common messages decoded at both receivers).
pub fn strong_capacity_region(params: &ChannelParams) -> Result<RatePolytope> {
    if classify_regime(params) != Regime::Strong {
        return Err(Error::WrongRegime { required: "strong" });
    }
    RatePolytope::new(
        Scheme::StrongCapacity,
        [c(params.p1()), c(params.p2())],
        vec![LinearRow::new("phi6", [1.0, 1.0], strong_sum_bound(params))],
    )
}

/// Capacity region of the two-user Gaussian MAC.
pub fn mac_region(p1: f64, p2: f64) -> Result<RatePolytope> {
    let params = ChannelParams::mac(p1, p2)?;
    RatePolytope::new(
        Scheme::Mac,
        [c(params.p1()), c(params.p2())],
        vec![LinearRow::new("phi0", [1.0, 1.0], c(p1 + p2))],
    )
}
