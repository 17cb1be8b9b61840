//! Bargaining problems `(G, g0)` and the decisions made before bargaining
//! starts: is there anything to gain (essential), is the equilibrium of the
//! offer game unique (regular), and do both users agree to coordinate.

use serde::Serialize;

use crate::channel::{classify_regime, disagreement_point, ChannelParams, RatePair, Regime};
use crate::error::{Error, Result};
use crate::regions::{
    hk_bounds, hk_power_split, hk_region, ir_frontier, FeasibleSet, Frontier, PowerSplit,
    RatePolytope, Scheme, TdmRegion, MERGE_TOL,
};

/// Strict-dominance margin used when deciding essentiality.
pub const ESSENTIAL_MARGIN: f64 = 1e-12;
/// Slack granted to the non-strict regularity inequalities.
pub const REGULARITY_TOL: f64 = 1e-9;

/// A feasible set together with the disagreement point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BargainingProblem {
    feasible: FeasibleSet,
    d0: RatePair,
}

impl BargainingProblem {
    pub fn new(feasible: impl Into<FeasibleSet>, d0: RatePair) -> Result<Self> {
        let feasible = feasible.into();
        if !(d0.r1.is_finite() && d0.r2.is_finite()) || !feasible.contains(&d0) {
            return Err(Error::OutsideRegion(d0));
        }
        Ok(Self { feasible, d0 })
    }

    pub fn feasible(&self) -> &FeasibleSet {
        &self.feasible
    }

    pub fn d0(&self) -> RatePair {
        self.d0
    }

    /// The same problem with the users relabeled.
    pub fn swapped(&self) -> Self {
        let feasible = match &self.feasible {
            FeasibleSet::Polytope(p) => FeasibleSet::Polytope(p.swapped()),
            FeasibleSet::Tdm(t) => FeasibleSet::Tdm(TdmRegion { p1: t.p2, p2: t.p1 }),
        };
        Self {
            feasible,
            d0: self.d0.swapped(),
        }
    }

    pub fn ir_frontier(&self) -> Result<Frontier> {
        ir_frontier(&self.feasible, &self.d0)
    }

    pub fn is_essential(&self) -> bool {
        is_essential(self)
    }

    /// Regularity read off the geometry: essential, and the individually
    /// rational frontier has no horizontal or vertical piece.
    pub fn is_structurally_regular(&self) -> bool {
        if !self.is_essential() {
            return false;
        }
        match self.ir_frontier() {
            Ok(Frontier::Polyline(pts)) => pts.windows(2).all(|w| {
                let (dx, dy) = (w[1].r1 - w[0].r1, w[0].r2 - w[1].r2);
                dx > REGULARITY_TOL && dy > REGULARITY_TOL
            }),
            Ok(Frontier::Tdm(_)) => true,
            Err(_) => false,
        }
    }
}

/// True iff some feasible point beats `d0` strictly for both users.
pub fn is_essential(problem: &BargainingProblem) -> bool {
    essential_margin(problem) > ESSENTIAL_MARGIN
}

/// `max min(g1 - d1, g2 - d2)` over the individually rational frontier.
fn essential_margin(problem: &BargainingProblem) -> f64 {
    let Ok(f) = problem.ir_frontier() else {
        return f64::NEG_INFINITY;
    };
    let d0 = problem.d0;
    let gain = |p: &RatePair| (p.r1 - d0.r1).min(p.r2 - d0.r2);
    let mut best = f.points().iter().map(gain).fold(f64::NEG_INFINITY, f64::max);
    if let Frontier::Polyline(pts) = &f {
        for w in pts.windows(2) {
            let mid = RatePair::new(0.5 * (w[0].r1 + w[1].r1), 0.5 * (w[0].r2 + w[1].r2));
            best = best.max(gain(&mid));
        }
    }
    if f.dominating_point(&d0, ESSENTIAL_MARGIN).is_some() {
        best = best.max(2.0 * ESSENTIAL_MARGIN);
    }
    best
}

/// One named inequality and the two sides it compares.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub essential: bool,
    pub regular: bool,
    pub failed_conditions: Vec<Condition>,
}

/// Regularity of the phase-2 problem over an H-K region, decided by the
/// closed-form conditions on the region bounds and the disagreement point.
pub fn is_regular(
    params: &ChannelParams,
    region: &RatePolytope,
    d0: RatePair,
) -> Result<RegularityReport> {
    let Scheme::Hk { alpha, beta } = region.scheme() else {
        return Err(Error::Mismatch("regularity conditions apply to H-K regions"));
    };
    let split = PowerSplit::new(alpha, beta)?;
    let expected = hk_region(params, split)?;
    let same = expected.caps() == region.caps()
        && expected
            .rows()
            .iter()
            .zip(region.rows())
            .all(|(x, y)| x.coef == y.coef && x.bound == y.bound)
        && expected.rows().len() == region.rows().len();
    if !same {
        return Err(Error::Mismatch("region bounds differ from the H-K bounds of the channel"));
    }

    let problem = BargainingProblem::new(region.clone(), d0)?;
    let mut failed = Vec::new();
    let margin = essential_margin(&problem);
    let essential = margin > ESSENTIAL_MARGIN;
    if !essential {
        failed.push(Condition {
            name: "F meets {R > R0}",
            lhs: margin,
            rhs: 0.0,
        });
    }

    let phi = hk_bounds(params, split);
    let pos = |x: f64| x.max(0.0);
    let mut need = |name: &'static str, lhs: f64, rhs: f64| {
        if lhs < rhs - REGULARITY_TOL {
            failed.push(Condition { name, lhs, rhs });
        }
    };
    match classify_regime(params) {
        Regime::Strong => {
            let unit = |x: f64| (x - 1.0).abs() <= REGULARITY_TOL;
            if !(unit(params.a()) && unit(params.b())) {
                failed.push(Condition {
                    name: "a = b = 1",
                    lhs: params.a().max(params.b()),
                    rhs: 1.0,
                });
            }
        }
        Regime::Weak { .. } => {
            need("R1^0 >= (phi5 - 2 phi2)+", d0.r1, pos(phi.phi5 - 2.0 * phi.phi2));
            need("R2^0 >= (phi4 - 2 phi1)+", d0.r2, pos(phi.phi4 - 2.0 * phi.phi1));
        }
        // the mixed conditions map onto each other under relabeling, so the
        // same pair covers both orientations
        Regime::MixedAWeak | Regime::MixedBWeak => {
            need(
                "R1^0 >= (min(phi5 - 2 phi2, phi3 - phi2))+",
                d0.r1,
                pos((phi.phi5 - 2.0 * phi.phi2).min(phi.phi3 - phi.phi2)),
            );
            need(
                "R2^0 >= (min(phi4 - 2 phi1, phi3 - phi1))+",
                d0.r2,
                pos((phi.phi4 - 2.0 * phi.phi1).min(phi.phi3 - phi.phi1)),
            );
        }
    }
    Ok(RegularityReport {
        essential,
        regular: failed.is_empty(),
        failed_conditions: failed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase1Reason {
    #[serde(rename = "OK")]
    Ok,
    NoisyOptimal,
    SplitDegenerate,
    NotEssential,
}

/// Result of the pre-bargaining phase. `S` describes the agreed scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Phase1Outcome<S> {
    cooperate: bool,
    reason: Phase1Reason,
    split: Option<S>,
    failed_condition: Option<&'static str>,
}

impl<S: Copy> Phase1Outcome<S> {
    pub fn agreed(split: S) -> Self {
        Self {
            cooperate: true,
            reason: Phase1Reason::Ok,
            split: Some(split),
            failed_condition: None,
        }
    }

    pub fn failed(reason: Phase1Reason, condition: &'static str) -> Self {
        debug_assert_ne!(reason, Phase1Reason::Ok);
        Self {
            cooperate: false,
            reason,
            split: None,
            failed_condition: Some(condition),
        }
    }

    pub fn cooperate(&self) -> bool {
        self.cooperate
    }

    pub fn reason(&self) -> Phase1Reason {
        self.reason
    }

    pub fn split(&self) -> Option<S> {
        self.split
    }

    /// The incentive condition that did not hold, when coordination failed.
    pub fn failed_condition(&self) -> Option<&'static str> {
        self.failed_condition
    }
}

pub const NOISY_CONDITION: &str = "sqrt(a)(b P1 + 1) + sqrt(b)(a P2 + 1) > 1";
pub const INR1_CONDITION: &str = "a P2 > 1";
pub const INR2_CONDITION: &str = "b P1 > 1";
pub const ESSENTIAL_CONDITION: &str = "F meets {R > R0}";

/// The H-K bargaining problem for a channel and split, with the
/// treat-interference-as-noise rates as disagreement point.
pub fn hk_problem(params: &ChannelParams, split: PowerSplit) -> Result<BargainingProblem> {
    BargainingProblem::new(hk_region(params, split)?, disagreement_point(params))
}

/// Pre-bargaining: pick the regime's power split and check both users gain.
pub fn phase1(params: &ChannelParams) -> Phase1Outcome<PowerSplit> {
    if params.is_noisy() {
        return Phase1Outcome::failed(Phase1Reason::NoisyOptimal, NOISY_CONDITION);
    }
    let regime = classify_regime(params);
    let (need_inr1, need_inr2) = match regime {
        Regime::Strong => (false, false),
        Regime::Weak { .. } => (true, true),
        Regime::MixedAWeak => (true, false),
        Regime::MixedBWeak => (false, true),
    };
    if need_inr1 && params.inr1() <= 1.0 {
        return Phase1Outcome::failed(Phase1Reason::SplitDegenerate, INR1_CONDITION);
    }
    if need_inr2 && params.inr2() <= 1.0 {
        return Phase1Outcome::failed(Phase1Reason::SplitDegenerate, INR2_CONDITION);
    }
    let split = hk_power_split(params);
    match hk_problem(params, split) {
        Ok(problem) if problem.is_essential() => Phase1Outcome::agreed(split),
        _ => Phase1Outcome::failed(Phase1Reason::NotEssential, ESSENTIAL_CONDITION),
    }
}

/// True if the frontier has a horizontal or vertical piece longer than the
/// merge tolerance.
pub fn has_flat_segment(frontier: &Frontier) -> bool {
    match frontier {
        Frontier::Polyline(pts) => pts.windows(2).any(|w| {
            let (dx, dy) = ((w[1].r1 - w[0].r1).abs(), (w[0].r2 - w[1].r2).abs());
            (dx <= REGULARITY_TOL && dy > MERGE_TOL) || (dy <= REGULARITY_TOL && dx > MERGE_TOL)
        }),
        Frontier::Tdm(_) => false,
    }
}
