//! The Nash bargaining solution: the feasible point maximizing
//! `(g1 - d1)(g2 - d2)` over the individually rational set.

use serde::Serialize;

use crate::bargain::{BargainingProblem, ESSENTIAL_MARGIN};
use crate::channel::{c, disagreement_point, ChannelParams, RatePair};
use crate::error::{Error, Result};
use crate::regions::{mac_region, FeasibleSet, RatePolytope, TdmRegion, FEAS_TOL};

/// Candidates farther apart than this count as distinct KKT points.
pub const UNIQUENESS_TOL: f64 = 1e-7;
/// Stopping width of the search on the time share.
pub const SHARE_TOL: f64 = 1e-12;

/// A binding constraint at the solution and its Lagrange multiplier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Active {
    pub label: &'static str,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NbsResult {
    pub point: RatePair,
    pub nash_product: f64,
    /// Binding rows and caps (labels `cap1`, `cap2`) with their multipliers
    /// for the log-product objective.
    pub active: Vec<Active>,
    /// User 1's time share, for TDM problems.
    pub time_share: Option<f64>,
}

impl NbsResult {
    pub fn multiplier(&self, label: &str) -> f64 {
        self.active
            .iter()
            .find(|a| a.label == label)
            .map_or(0.0, |a| a.multiplier)
    }
}

pub fn nash_product(g: &RatePair, d0: &RatePair) -> f64 {
    (g.r1 - d0.r1) * (g.r2 - d0.r2)
}

/// Dispatches on the kind of feasible set.
pub fn nbs(problem: &BargainingProblem) -> Result<NbsResult> {
    match problem.feasible() {
        FeasibleSet::Polytope(p) => nbs_polytope(p, problem.d0()),
        FeasibleSet::Tdm(t) => nbs_concave(t, problem.d0()),
    }
}

#[derive(Clone, Copy)]
struct Constraint {
    label: &'static str,
    n: [f64; 2],
    h: f64,
}

fn constraints(region: &RatePolytope) -> Vec<Constraint> {
    let caps = region.caps();
    let mut cs = vec![
        Constraint { label: "cap1", n: [1.0, 0.0], h: caps[0] },
        Constraint { label: "cap2", n: [0.0, 1.0], h: caps[1] },
    ];
    cs.extend(region.rows().iter().map(|r| Constraint {
        label: r.label,
        n: r.coef,
        h: r.bound,
    }));
    cs
}

/// NBS of a polytope by enumerating active sets of size one and two and
/// keeping the candidates that satisfy the KKT conditions.
///
/// The log of the Nash product is strictly concave on the interior of the
/// individually rational set, so every KKT point is the maximizer; more than
/// one distinct candidate signals a numerical problem and is reported.
pub fn nbs_polytope(region: &RatePolytope, d0: RatePair) -> Result<NbsResult> {
    let problem = BargainingProblem::new(region.clone(), d0)?;
    if !problem.is_essential() {
        return Err(Error::NotEssential);
    }
    let cs = constraints(region);
    if cs.iter().any(|k| k.n[0] * d0.r1 + k.n[1] * d0.r2 >= k.h) {
        return Err(Error::HypothesisViolated("d0 must satisfy every constraint strictly"));
    }

    let d = d0.as_array();
    let mut found: Vec<NbsResult> = Vec::new();
    let mut consider = |g: [f64; 2], act: Vec<Active>| {
        let g = RatePair::from(g);
        if !(g.r1 > d0.r1 + ESSENTIAL_MARGIN && g.r2 > d0.r2 + ESSENTIAL_MARGIN) {
            return;
        }
        if !region.contains(&g, FEAS_TOL) || act.iter().any(|a| a.multiplier < -1e-12) {
            return;
        }
        found.push(NbsResult {
            point: g,
            nash_product: nash_product(&g, &d0),
            active: act,
            time_share: None,
        });
    };

    for k in &cs {
        if k.n[0] > 0.0 && k.n[1] > 0.0 {
            let s = k.h - (k.n[0] * d[0] + k.n[1] * d[1]);
            let g = [d[0] + s / (2.0 * k.n[0]), d[1] + s / (2.0 * k.n[1])];
            consider(g, vec![Active { label: k.label, multiplier: 2.0 / s }]);
        }
    }
    for i in 0..cs.len() {
        for j in (i + 1)..cs.len() {
            let (a, b) = (cs[i], cs[j]);
            let det = a.n[0] * b.n[1] - a.n[1] * b.n[0];
            if det.abs() <= 1e-14 {
                continue;
            }
            let g = [
                (a.h * b.n[1] - b.h * a.n[1]) / det,
                (a.n[0] * b.h - b.n[0] * a.h) / det,
            ];
            let (x, y) = (g[0] - d[0], g[1] - d[1]);
            if x <= 0.0 || y <= 0.0 {
                continue;
            }
            // mu_a·n_a + mu_b·n_b = (1/x, 1/y)
            let (gx, gy) = (1.0 / x, 1.0 / y);
            let mu_a = (gx * b.n[1] - gy * b.n[0]) / det;
            let mu_b = (a.n[0] * gy - a.n[1] * gx) / det;
            consider(
                g,
                vec![
                    Active { label: a.label, multiplier: mu_a },
                    Active { label: b.label, multiplier: mu_b },
                ],
            );
        }
    }

    let best = found
        .iter()
        .max_by(|p, q| p.nash_product.total_cmp(&q.nash_product))
        .cloned()
        .ok_or_else(|| Error::Internal("no KKT point found".into()))?;
    if let Some(other) = found.iter().find(|r| r.point.dist(&best.point) > UNIQUENESS_TOL) {
        return Err(Error::Internal(format!(
            "two distinct KKT points ({}, {}) and ({}, {})",
            best.point.r1, best.point.r2, other.point.r1, other.point.r2
        )));
    }
    Ok(tidy(best))
}

/// Drops multipliers that are zero up to rounding.
fn tidy(mut r: NbsResult) -> NbsResult {
    r.active.retain(|a| a.multiplier > 1e-12);
    r
}

/// The solution written in terms of the row multipliers alone:
/// `g_i = min(c_i, d_i + 1 / sum_j mu_j A_ji)`.
pub fn kkt_point(region: &RatePolytope, d0: RatePair, result: &NbsResult) -> RatePair {
    let caps = region.caps();
    let mut g = [0.0; 2];
    for (i, gi) in g.iter_mut().enumerate() {
        let s: f64 = region
            .rows()
            .iter()
            .map(|r| result.multiplier(r.label) * r.coef[i])
            .sum();
        let free = if s > 0.0 { d0.get(i) + 1.0 / s } else { f64::INFINITY };
        *gi = caps[i].min(free);
    }
    g.into()
}

/// Closed-form NBS of the two-user MAC with single-user decoding rates as
/// disagreement point. It always lies on the sum-rate face.
pub fn nbs_mac(p1: f64, p2: f64) -> Result<NbsResult> {
    let region = mac_region(p1, p2)?;
    let d0 = disagreement_point(&ChannelParams::mac(p1, p2)?);
    let phi0 = c(p1 + p2);
    let mu = 2.0 / (phi0 - d0.r1 - d0.r2);
    let point = RatePair::new(d0.r1 + 1.0 / mu, d0.r2 + 1.0 / mu);
    debug_assert!(region.contains(&point, FEAS_TOL));
    Ok(NbsResult {
        point,
        nash_product: nash_product(&point, &d0),
        active: vec![Active { label: "phi0", multiplier: mu }],
        time_share: None,
    })
}

/// NBS on the TDM boundary. The Nash product is log-concave along the arc,
/// so the derivative of its log is decreasing in user 1's time share and
/// its sign change is found by bisection.
pub fn nbs_concave(region: &TdmRegion, d0: RatePair) -> Result<NbsResult> {
    let problem = BargainingProblem::new(*region, d0)?;
    if !problem.is_essential() {
        return Err(Error::NotEssential);
    }
    let (mut lo, mut hi) = (region.rho_for_rate1(d0.r1), 1.0 - region.rho_for_rate2(d0.r2));
    let slope = |rho: f64| {
        let g = region.boundary_point(rho);
        tdm_slope(region.p1, rho) / (g.r1 - d0.r1) - tdm_slope(region.p2, 1.0 - rho) / (g.r2 - d0.r2)
    };
    while hi - lo > SHARE_TOL {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = 0.5 * (lo + hi);
    let point = region.boundary_point(rho);
    Ok(NbsResult {
        point,
        nash_product: nash_product(&point, &d0),
        active: Vec::new(),
        time_share: Some(rho),
    })
}

/// Derivative of `rho·C(p/rho)` with respect to `rho`.
fn tdm_slope(p: f64, rho: f64) -> f64 {
    if rho <= 0.0 {
        return f64::INFINITY;
    }
    let s = p / rho;
    c(s) - s / (2.0 * std::f64::consts::LN_2 * (1.0 + s))
}
