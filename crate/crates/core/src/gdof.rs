//! High-SNR analysis in generalized degrees of freedom: payoffs are rates
//! normalized by the single-user capacities, and interference strength is
//! measured by the exponents `theta`.

use serde::Serialize;

use crate::bargain::{Phase1Outcome, Phase1Reason};
use crate::channel::RatePair;
use crate::error::{check_range, Error, Result};
use crate::nbs::{nbs_polytope, NbsResult};
use crate::regions::{LinearRow, RatePolytope, Scheme};

/// Interference exponents: `theta1 = log SNR2 / log SNR1`,
/// `theta2 = log INR1 / log SNR1`, `theta3 = log INR2 / log SNR1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GdofParams {
    theta1: f64,
    theta2: f64,
    theta3: f64,
}

impl GdofParams {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        let pos = |name, t: f64| check_range(name, "finite and > 0", t, t > 0.0);
        Ok(Self {
            theta1: pos("theta1", theta1)?,
            theta2: pos("theta2", theta2)?,
            theta3: pos("theta3", theta3)?,
        })
    }

    /// Exponents of a finite-SNR channel (all ratios must exceed 1).
    pub fn from_linear(snr1: f64, snr2: f64, inr1: f64, inr2: f64) -> Result<Self> {
        let gt1 = |name, x: f64| check_range(name, "finite and > 1", x, x > 1.0);
        let l1 = gt1("SNR1", snr1)?.ln();
        Self::new(
            gt1("SNR2", snr2)?.ln() / l1,
            gt1("INR1", inr1)?.ln() / l1,
            gt1("INR2", inr2)?.ln() / l1,
        )
    }

    pub fn theta(&self) -> [f64; 3] {
        [self.theta1, self.theta2, self.theta3]
    }
}

/// A pair of generalized degrees of freedom.
pub type GdofPoint = RatePair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GdofRegime {
    Strong,
    Weak,
    Mixed,
}

pub fn gdof_regime(theta: &GdofParams) -> Result<GdofRegime> {
    let [t1, t2, t3] = theta.theta();
    match (t2 >= t1, t3 >= 1.0) {
        (true, true) => Ok(GdofRegime::Strong),
        (false, false) => Ok(GdofRegime::Weak),
        (true, false) => Ok(GdofRegime::Mixed),
        (false, true) => Err(Error::UnsupportedRegime(theta.theta())),
    }
}

/// Named bound of a g.d.o.f. region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GdofRegion {
    /// `D1` strong, `D2` weak, `D3` mixed, `D4` time sharing.
    pub tag: &'static str,
    pub bounds: Vec<Bound>,
    pub polytope: RatePolytope,
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Optimal g.d.o.f. region of the channel.
pub fn gdof_region(theta: &GdofParams) -> Result<GdofRegion> {
    let [t1, t2, t3] = theta.theta();
    let (tag, rows): (&'static str, Vec<(&'static str, [f64; 2], f64)>) = match gdof_regime(theta)? {
        GdofRegime::Strong => {
            let phi1 = 1f64.max(t2).min(t1.max(t3));
            ("D1", vec![("phi1", [1.0, t1], phi1)])
        }
        GdofRegime::Weak => {
            let phi2 = (1.0 + pos(t1 - t3))
                .min(t1 + pos(1.0 - t2))
                .min(t2.max(1.0 - t3) + t3.max(t1 - t2));
            let phi3 = 1f64.max(t2) + t3.max(t1 - t2) + 1.0 - t3;
            let phi4 = t1.max(t3) + t2.max(1.0 - t3) + t1 - t2;
            (
                "D2",
                vec![
                    ("phi2", [1.0, t1], phi2),
                    ("phi3", [2.0, t1], phi3),
                    ("phi4", [1.0, 2.0 * t1], phi4),
                ],
            )
        }
        GdofRegime::Mixed => {
            let phi5 = (1.0 + pos(t1 - t3)).min(1f64.max(t2));
            let phi6 = t1.max(t3) + t2.max(1.0 - t3);
            ("D3", vec![("phi5", [1.0, t1], phi5), ("phi6", [1.0, 2.0 * t1], phi6)])
        }
    };
    build(tag, rows)
}

/// Region reached by time sharing: `d1 + d2 <= 1`.
pub fn gdof_tdm_region() -> GdofRegion {
    build("D4", vec![("tdm", [1.0, 1.0], 1.0)]).expect("the unit simplex is a valid region")
}

fn build(tag: &'static str, rows: Vec<(&'static str, [f64; 2], f64)>) -> Result<GdofRegion> {
    let polytope = RatePolytope::new(
        Scheme::GdofScaled { region: tag },
        [1.0, 1.0],
        rows.iter().map(|&(n, c, b)| LinearRow::new(n, c, b)).collect(),
    )?;
    Ok(GdofRegion {
        tag,
        bounds: rows.iter().map(|&(name, _, value)| Bound { name, value }).collect(),
        polytope,
    })
}

/// G.d.o.f. achieved when each receiver treats interference as noise.
pub fn gdof_disagreement(theta: &GdofParams) -> GdofPoint {
    let [t1, t2, t3] = theta.theta();
    RatePair::new(pos(1.0 - t2), pos(1.0 - t3 / t1))
}

/// Power-split rule of the H-K scheme, stated in terms of the interference
/// levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GdofSplit {
    #[serde(rename = "HK(0,0)")]
    CommonOnly,
    #[serde(rename = "HK(1/INR2,1/INR1)")]
    NoiseLevel,
    #[serde(rename = "HK(1/INR2,0)")]
    NoiseLevelUser1,
}

impl GdofSplit {
    pub fn label(&self) -> &'static str {
        match self {
            GdofSplit::CommonOnly => "HK(0,0)",
            GdofSplit::NoiseLevel => "HK(1/INR2,1/INR1)",
            GdofSplit::NoiseLevelUser1 => "HK(1/INR2,0)",
        }
    }
}

/// Pre-bargaining at high SNR. Strong and mixed channels always cooperate;
/// weak ones only if `d0` lies strictly inside every bound.
pub fn gdof_phase1(theta: &GdofParams) -> Result<Phase1Outcome<GdofSplit>> {
    let split = match gdof_regime(theta)? {
        GdofRegime::Strong => GdofSplit::CommonOnly,
        GdofRegime::Mixed => GdofSplit::NoiseLevelUser1,
        GdofRegime::Weak => GdofSplit::NoiseLevel,
    };
    let region = gdof_region(theta)?;
    let d0 = gdof_disagreement(theta);
    for row in region.polytope.rows() {
        if row.lhs(&d0) >= row.bound {
            return Ok(Phase1Outcome::failed(Phase1Reason::NotEssential, strict_label(row.label)));
        }
    }
    Ok(Phase1Outcome::agreed(split))
}

fn strict_label(row: &str) -> &'static str {
    match row {
        "phi1" => "d1 + theta1 d2 < phi1",
        "phi2" => "d1 + theta1 d2 < phi2",
        "phi3" => "2 d1 + theta1 d2 < phi3",
        "phi4" => "d1 + 2 theta1 d2 < phi4",
        "phi5" => "d1 + theta1 d2 < phi5",
        "phi6" => "d1 + 2 theta1 d2 < phi6",
        _ => "d0 strictly inside the region",
    }
}

/// NBS over the optimal region, with `d0` as disagreement point.
pub fn gdof_nbs(theta: &GdofParams) -> Result<NbsResult> {
    if !gdof_phase1(theta)?.cooperate() {
        return Err(Error::NotEssential);
    }
    nbs_polytope(&gdof_region(theta)?.polytope, gdof_disagreement(theta))
}

/// NBS over the time-sharing region.
pub fn gdof_nbs_tdm(theta: &GdofParams) -> Result<NbsResult> {
    nbs_polytope(&gdof_tdm_region().polytope, gdof_disagreement(theta))
}
