use serde::Serialize;

use super::polytope::{RatePolytope, FEAS_TOL, MERGE_TOL};
use super::tdm::TdmRegion;
use crate::channel::RatePair;
use crate::error::{Error, Result};

/// Default number of samples kept on a TDM arc for plotting and sweeps.
pub const TDM_SAMPLES: usize = 1025;

/// A convex feasible set the bargaining layer can work with.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibleSet {
    Polytope(RatePolytope),
    Tdm(TdmRegion),
}

impl FeasibleSet {
    pub fn contains(&self, g: &RatePair) -> bool {
        match self {
            FeasibleSet::Polytope(p) => p.contains(g, FEAS_TOL),
            FeasibleSet::Tdm(t) => t.contains(g),
        }
    }

    /// The whole weakly efficient boundary.
    pub fn frontier(&self) -> Result<Frontier> {
        match self {
            FeasibleSet::Polytope(p) => Ok(Frontier::Polyline(p.efficient_chain()?)),
            FeasibleSet::Tdm(t) => Ok(Frontier::Tdm(t.arc(0.0, 1.0, TDM_SAMPLES))),
        }
    }
}

impl From<RatePolytope> for FeasibleSet {
    fn from(p: RatePolytope) -> Self {
        FeasibleSet::Polytope(p)
    }
}

impl From<TdmRegion> for FeasibleSet {
    fn from(t: TdmRegion) -> Self {
        FeasibleSet::Tdm(t)
    }
}

/// Portion of a TDM boundary, parameterized by user 1's time share.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdmArc {
    pub region: TdmRegion,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub samples: Vec<RatePair>,
}

impl TdmArc {
    pub fn point(&self, rho: f64) -> RatePair {
        self.region.boundary_point(rho)
    }
}

/// A weakly efficient boundary (or a clipped piece of one).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Frontier {
    /// Vertex list of a piecewise-linear boundary, left to right.
    Polyline(Vec<RatePair>),
    /// Smooth concave TDM boundary.
    Tdm(TdmArc),
}

impl Frontier {
    /// Vertices for polylines, the sample grid for curves.
    pub fn points(&self) -> &[RatePair] {
        match self {
            Frontier::Polyline(v) => v,
            Frontier::Tdm(arc) => &arc.samples,
        }
    }

    pub fn start(&self) -> RatePair {
        match self {
            Frontier::Polyline(v) => v[0],
            Frontier::Tdm(arc) => arc.point(arc.rho_lo),
        }
    }

    pub fn end(&self) -> RatePair {
        match self {
            Frontier::Polyline(v) => v[v.len() - 1],
            Frontier::Tdm(arc) => arc.point(arc.rho_hi),
        }
    }

    pub fn is_single_point(&self) -> bool {
        self.start().dist(&self.end()) <= MERGE_TOL
    }

    /// Largest second coordinate on the frontier above first coordinate `g1`,
    /// or `None` outside `[start.r1, end.r1]`.
    pub fn g2_at(&self, g1: f64) -> Option<f64> {
        let (s, e) = (self.start(), self.end());
        if g1 < s.r1 - 1e-12 || g1 > e.r1 + 1e-12 {
            return None;
        }
        match self {
            Frontier::Polyline(v) => {
                if v.len() == 1 {
                    return Some(v[0].r2);
                }
                for w in v.windows(2) {
                    let (p, q) = (w[0], w[1]);
                    if g1 <= q.r1 {
                        let dx = q.r1 - p.r1;
                        if dx <= 0.0 {
                            return Some(p.r2);
                        }
                        let t = ((g1 - p.r1) / dx).clamp(0.0, 1.0);
                        return Some(p.r2 + t * (q.r2 - p.r2));
                    }
                }
                Some(e.r2)
            }
            Frontier::Tdm(arc) => {
                let rho = arc.region.rho_for_rate1(g1.max(0.0));
                Some(arc.point(rho.clamp(arc.rho_lo, arc.rho_hi)).r2)
            }
        }
    }

    /// Strict-dominance witness: a frontier point exceeding `d0` by more than
    /// `margin` in both coordinates, if any.
    pub fn dominating_point(&self, d0: &RatePair, margin: f64) -> Option<RatePair> {
        match self {
            Frontier::Polyline(v) => {
                let mids = v
                    .windows(2)
                    .map(|w| RatePair::new(0.5 * (w[0].r1 + w[1].r1), 0.5 * (w[0].r2 + w[1].r2)));
                v.iter().copied().chain(mids).find(|p| p.strictly_dominates(d0, margin))
            }
            Frontier::Tdm(arc) => {
                let mid = arc.point(0.5 * (arc.rho_lo + arc.rho_hi));
                mid.strictly_dominates(d0, margin).then_some(mid)
            }
        }
    }
}

/// The efficient frontier of `feasible ∩ { g >= d0 }`.
///
/// Collapses to the single point `d0` when `d0` is itself Pareto optimal.
pub fn ir_frontier(feasible: &FeasibleSet, d0: &RatePair) -> Result<Frontier> {
    if !feasible.contains(d0) {
        return Err(Error::OutsideRegion(*d0));
    }
    match feasible {
        FeasibleSet::Polytope(p) => Ok(Frontier::Polyline(clip_chain(&p.efficient_chain()?, d0))),
        FeasibleSet::Tdm(t) => {
            let lo = t.rho_for_rate1(d0.r1);
            let hi = (1.0 - t.rho_for_rate2(d0.r2)).max(lo);
            Ok(Frontier::Tdm(t.arc(lo, hi, TDM_SAMPLES)))
        }
    }
}

/// Keeps the part of a monotone chain with `g1 >= d0.r1` and `g2 >= d0.r2`.
fn clip_chain(chain: &[RatePair], d0: &RatePair) -> Vec<RatePair> {
    const EPS: f64 = 1e-12;
    let mut out: Vec<RatePair> = Vec::new();
    let mut push = |p: RatePair| {
        if out.last().map_or(true, |q| q.dist(&p) > MERGE_TOL) {
            out.push(p);
        }
    };
    let lerp = |p: RatePair, q: RatePair, t: f64| {
        RatePair::new(p.r1 + t * (q.r1 - p.r1), p.r2 + t * (q.r2 - p.r2))
    };
    for w in chain.windows(2) {
        let (p, q) = (w[0], w[1]);
        // r1 is nondecreasing and r2 nonincreasing in t, so the admissible
        // parameters form an interval [lo, hi]
        let lo = if p.r1 >= d0.r1 - EPS {
            0.0
        } else if q.r1 > p.r1 && q.r1 >= d0.r1 - EPS {
            (d0.r1 - p.r1) / (q.r1 - p.r1)
        } else {
            continue;
        };
        let hi = if q.r2 >= d0.r2 - EPS {
            1.0
        } else if p.r2 > q.r2 && p.r2 >= d0.r2 - EPS {
            (p.r2 - d0.r2) / (p.r2 - q.r2)
        } else {
            continue;
        };
        if lo > hi + EPS {
            continue;
        }
        push(lerp(p, q, lo.clamp(0.0, 1.0)));
        push(lerp(p, q, hi.clamp(0.0, 1.0)));
    }
    if out.is_empty() {
        out.push(*d0);
    }
    out
}
