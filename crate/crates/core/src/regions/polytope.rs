use std::f64::consts::PI;

use serde::Serialize;

use crate::channel::RatePair;
use crate::error::{Error, Result};

/// Slack allowed when testing a point against a constraint, in payoff units.
pub const FEAS_TOL: f64 = 1e-9;
/// Vertices closer than this are merged.
pub const MERGE_TOL: f64 = 1e-9;

/// One linear constraint `coef · g <= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearRow {
    pub label: &'static str,
    pub coef: [f64; 2],
    pub bound: f64,
}

impl LinearRow {
    pub const fn new(label: &'static str, coef: [f64; 2], bound: f64) -> Self {
        Self { label, coef, bound }
    }

    pub fn lhs(&self, g: &RatePair) -> f64 {
        self.coef[0] * g.r1 + self.coef[1] * g.r2
    }

    pub fn slack(&self, g: &RatePair) -> f64 {
        self.bound - self.lhs(g)
    }
}

/// Which construction produced a polytope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Scheme {
    /// Han–Kobayashi superposition with private power fractions `alpha`, `beta`.
    Hk { alpha: f64, beta: f64 },
    /// Capacity region of the strong interference channel.
    StrongCapacity,
    /// Capacity region of the two-user MAC.
    Mac,
    /// A generalized-degrees-of-freedom region (`D1`..`D4`).
    GdofScaled { region: &'static str },
    /// Anything else, e.g. a transformed or cut copy of another region.
    Custom,
}

/// `{ g : floor <= g <= caps, rows }` in the payoff plane.
///
/// The floor is the origin for every region the channel model produces; it
/// only moves when a region is pushed through an affine payoff map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePolytope {
    scheme: Scheme,
    floor: [f64; 2],
    caps: [f64; 2],
    rows: Vec<LinearRow>,
}

/// Half-plane `n · g <= h`.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    n: [f64; 2],
    h: f64,
}

impl HalfPlane {
    fn violation(&self, p: [f64; 2]) -> f64 {
        self.n[0] * p[0] + self.n[1] * p[1] - self.h
    }

    fn tol(&self) -> f64 {
        FEAS_TOL * (self.n[0].abs() + self.n[1].abs()).max(1.0)
    }
}

impl RatePolytope {
    pub fn new(scheme: Scheme, caps: [f64; 2], rows: Vec<LinearRow>) -> Result<Self> {
        Self::with_floor(scheme, [0.0, 0.0], caps, rows)
    }

    pub fn with_floor(
        scheme: Scheme,
        floor: [f64; 2],
        caps: [f64; 2],
        rows: Vec<LinearRow>,
    ) -> Result<Self> {
        for i in 0..2 {
            if !floor[i].is_finite() || !caps[i].is_finite() {
                return Err(Error::Degenerate("caps and floor must be finite"));
            }
            if caps[i] < floor[i] {
                return Err(Error::Degenerate("cap below floor"));
            }
        }
        let corner = RatePair::from(floor);
        for row in &rows {
            if !(row.coef[0].is_finite() && row.coef[1].is_finite() && row.bound.is_finite()) {
                return Err(Error::Degenerate("non-finite constraint row"));
            }
            if row.coef == [0.0, 0.0] {
                return Err(Error::Degenerate("constraint row with zero coefficients"));
            }
            if row.slack(&corner) < -FEAS_TOL {
                return Err(Error::Degenerate("constraint row excludes the floor corner"));
            }
        }
        Ok(Self {
            scheme,
            floor,
            caps,
            rows,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn floor(&self) -> [f64; 2] {
        self.floor
    }

    pub fn caps(&self) -> [f64; 2] {
        self.caps
    }

    pub fn rows(&self) -> &[LinearRow] {
        &self.rows
    }

    /// Same region with one more constraint.
    pub fn with_row(&self, row: LinearRow) -> Result<Self> {
        let mut rows = self.rows.clone();
        rows.push(row);
        Self::with_floor(Scheme::Custom, self.floor, self.caps, rows)
    }

    /// Image of the region under `g -> (scale[0]·g1 + shift[0], scale[1]·g2 + shift[1])`.
    pub fn affine_map(&self, scale: [f64; 2], shift: [f64; 2]) -> Result<Self> {
        if !(scale[0] > 0.0 && scale[1] > 0.0) {
            return Err(Error::Domain {
                what: "affine scale",
                expected: "> 0 in both coordinates",
                value: scale[0].min(scale[1]),
            });
        }
        let map = |v: [f64; 2]| [scale[0] * v[0] + shift[0], scale[1] * v[1] + shift[1]];
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let coef = [r.coef[0] / scale[0], r.coef[1] / scale[1]];
                let bound = r.bound + coef[0] * shift[0] + coef[1] * shift[1];
                LinearRow::new(r.label, coef, bound)
            })
            .collect();
        Self::with_floor(Scheme::Custom, map(self.floor), map(self.caps), rows)
    }

    /// Same region with the users relabeled.
    pub fn swapped(&self) -> Self {
        let sw = |v: [f64; 2]| [v[1], v[0]];
        Self {
            scheme: Scheme::Custom,
            floor: sw(self.floor),
            caps: sw(self.caps),
            rows: self
                .rows
                .iter()
                .map(|r| LinearRow::new(r.label, sw(r.coef), r.bound))
                .collect(),
        }
    }

    pub fn contains(&self, g: &RatePair, tol: f64) -> bool {
        self.half_planes()
            .iter()
            .all(|hp| hp.violation(g.as_array()) <= tol * (hp.n[0].abs() + hp.n[1].abs()).max(1.0))
    }

    fn half_planes(&self) -> Vec<HalfPlane> {
        let mut hs = vec![
            HalfPlane { n: [-1.0, 0.0], h: -self.floor[0] },
            HalfPlane { n: [0.0, -1.0], h: -self.floor[1] },
            HalfPlane { n: [1.0, 0.0], h: self.caps[0] },
            HalfPlane { n: [0.0, 1.0], h: self.caps[1] },
        ];
        hs.extend(self.rows.iter().map(|r| HalfPlane { n: r.coef, h: r.bound }));
        hs
    }

    /// Polygon vertices in counter-clockwise order.
    ///
    /// Every pair of constraint lines is intersected and the feasible
    /// intersections are kept; with at most a handful of constraints this is
    /// exact and cheap.
    pub fn vertices(&self) -> Result<Vec<RatePair>> {
        let hs = self.half_planes();
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for i in 0..hs.len() {
            for j in (i + 1)..hs.len() {
                let (a, b) = (hs[i], hs[j]);
                let det = a.n[0] * b.n[1] - a.n[1] * b.n[0];
                let scale = (a.n[0].abs() + a.n[1].abs()) * (b.n[0].abs() + b.n[1].abs());
                if det.abs() <= 1e-14 * scale {
                    continue;
                }
                let p = [
                    (a.h * b.n[1] - b.h * a.n[1]) / det,
                    (a.n[0] * b.h - b.n[0] * a.h) / det,
                ];
                if !hs.iter().all(|hp| hp.violation(p) <= hp.tol()) {
                    continue;
                }
                if pts
                    .iter()
                    .all(|q| (q[0] - p[0]).abs() > MERGE_TOL || (q[1] - p[1]).abs() > MERGE_TOL)
                {
                    pts.push(p);
                }
            }
        }
        if pts.len() < 3 {
            return Err(Error::Degenerate("region has empty interior"));
        }
        let n = pts.len() as f64;
        let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
        let angle = |p: &[f64; 2]| {
            let t = (p[1] - cy).atan2(p[0] - cx);
            if t < -PI / 2.0 {
                t + 2.0 * PI
            } else {
                t
            }
        };
        pts.sort_by(|p, q| angle(p).total_cmp(&angle(q)));
        Ok(pts.into_iter().map(RatePair::from).collect())
    }

    /// The weakly efficient boundary, from the top-left vertex to the
    /// bottom-right one. First coordinates never decrease and second
    /// coordinates never increase along the chain.
    pub fn efficient_chain(&self) -> Result<Vec<RatePair>> {
        let vs = self.vertices()?;
        let top = vs.iter().map(|v| v.r2).fold(f64::NEG_INFINITY, f64::max);
        let right = vs.iter().map(|v| v.r1).fold(f64::NEG_INFINITY, f64::max);
        let pick = |key: fn(&RatePair) -> f64, best: f64, tie: fn(&RatePair) -> f64| {
            (0..vs.len())
                .filter(|&i| key(&vs[i]) >= best - MERGE_TOL)
                .min_by(|&i, &j| tie(&vs[i]).total_cmp(&tie(&vs[j])))
                .expect("polygon has vertices")
        };
        let start = pick(|v| v.r2, top, |v| v.r1);
        let end = pick(|v| v.r1, right, |v| v.r2);
        let n = vs.len();
        let mut chain = vec![vs[start]];
        let mut i = start;
        while i != end {
            i = (i + n - 1) % n;
            chain.push(vs[i]);
        }
        Ok(chain)
    }

    /// Corner points of the efficient boundary that lie off both axes
    /// (strictly above the floor), ordered by increasing first coordinate.
    pub fn extreme_points(&self) -> Result<Vec<RatePair>> {
        Ok(self
            .efficient_chain()?
            .into_iter()
            .filter(|v| v.r1 > self.floor[0] + MERGE_TOL && v.r2 > self.floor[1] + MERGE_TOL)
            .collect())
    }

    /// For each row, whether dropping it leaves the region unchanged.
    pub fn redundant_rows(&self) -> Result<Vec<bool>> {
        (0..self.rows.len())
            .map(|j| {
                let mut rows = self.rows.clone();
                let row = rows.remove(j);
                let rest = Self::with_floor(self.scheme, self.floor, self.caps, rows)?;
                let worst = rest
                    .vertices()?
                    .iter()
                    .map(|v| row.lhs(v))
                    .fold(f64::NEG_INFINITY, f64::max);
                Ok(worst <= row.bound + FEAS_TOL)
            })
            .collect()
    }
}
