//! Alternating-offer bargaining with random breakdown: the subgame perfect
//! agreement pair and a play-out simulator.

mod play;

pub use play::{play_aobg, Event, Game, GameTrace, Player, Strategy, MAX_ROUNDS};

use serde::Serialize;

use crate::bargain::BargainingProblem;
use crate::channel::{c, disagreement_point, ChannelParams, RatePair};
use crate::error::{check_range, Error, Result};
use crate::regions::Frontier;

/// Accepted distance between a segment parameter and `[0, 1]`.
pub const SEGMENT_TOL: f64 = 1e-9;
/// Solutions closer than this are the same agreement.
pub const DEDUP_TOL: f64 = 1e-7;

/// Probability that the game breaks down after a rejection of user 1's
/// offer (`p1`) or of user 2's offer (`p2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakdownProbs {
    p1: f64,
    p2: f64,
}

impl BreakdownProbs {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let open = |p: f64| p > 0.0 && p < 1.0;
        let p1 = check_range("breakdown probability p1", "in (0, 1)", p1, open(p1))?;
        let p2 = check_range("breakdown probability p2", "in (0, 1)", p2, open(p2))?;
        Ok(Self { p1, p2 })
    }

    /// Allows the closed interval; only the limit helpers accept these.
    pub fn boundary(p1: f64, p2: f64) -> Result<Self> {
        let closed = |p: f64| (0.0..=1.0).contains(&p);
        let p1 = check_range("breakdown probability p1", "in [0, 1]", p1, closed(p1))?;
        let p2 = check_range("breakdown probability p2", "in [0, 1]", p2, closed(p2))?;
        Ok(Self { p1, p2 })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// Probability for the given proposer (1 or 2).
    pub fn of(&self, proposer: Player) -> f64 {
        match proposer {
            Player::One => self.p1,
            Player::Two => self.p2,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
        }
    }
}

/// User 1's equilibrium offer `gbar` and user 2's equilibrium offer `gtilde`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpePair {
    pub gbar: RatePair,
    pub gtilde: RatePair,
    /// Indices of the IR-frontier segments holding `gbar` and `gtilde`;
    /// absent for smooth frontiers.
    pub segments: Option<[usize; 2]>,
}

impl SpePair {
    /// Exchanges the users' roles.
    pub fn swapped(&self) -> Self {
        Self {
            gbar: self.gtilde.swapped(),
            gtilde: self.gbar.swapped(),
            segments: self.segments.map(|[i, j]| [j, i]),
        }
    }
}

/// Residuals of the two indifference conditions at a candidate pair.
pub fn spe_residuals(pair: &SpePair, d0: &RatePair, probs: &BreakdownProbs) -> [f64; 2] {
    let (gb, gt) = (pair.gbar, pair.gtilde);
    [
        gt.r1 - ((1.0 - probs.p2) * (gb.r1 - d0.r1) + d0.r1),
        gb.r2 - ((1.0 - probs.p1) * (gt.r2 - d0.r2) + d0.r2),
    ]
}

/// The subgame perfect agreement pair of a regular problem.
///
/// Piecewise-linear frontiers are swept segment pair by segment pair; the
/// indifference conditions are linear on each pair. Smooth frontiers are
/// handled by [`spe_bisection`].
pub fn spe_pair(problem: &BargainingProblem, probs: &BreakdownProbs) -> Result<SpePair> {
    if !problem.is_structurally_regular() {
        return Err(Error::NotRegular);
    }
    let frontier = problem.ir_frontier()?;
    match &frontier {
        Frontier::Polyline(pts) => segment_sweep(pts, &problem.d0(), probs),
        Frontier::Tdm(_) => spe_bisection(&frontier, &problem.d0(), probs),
    }
}

fn segment_sweep(pts: &[RatePair], d0: &RatePair, probs: &BreakdownProbs) -> Result<SpePair> {
    let (q1, q2) = (1.0 - probs.p1, 1.0 - probs.p2);
    let mut found: Vec<SpePair> = Vec::new();
    let mut singular = false;
    let in_range = |s: f64| (-SEGMENT_TOL..=1.0 + SEGMENT_TOL).contains(&s);
    for i in 0..pts.len() - 1 {
        let (pi, di) = (pts[i], [pts[i + 1].r1 - pts[i].r1, pts[i + 1].r2 - pts[i].r2]);
        for j in 0..pts.len() - 1 {
            let (pj, dj) = (pts[j], [pts[j + 1].r1 - pts[j].r1, pts[j + 1].r2 - pts[j].r2]);
            // gbar = pi + s·di, gtilde = pj + t·dj; the four equations
            // reduce to two in (s, t)
            let (a11, a12) = (q2 * di[0], -dj[0]);
            let (a21, a22) = (di[1], -q1 * dj[1]);
            let r1 = pj.r1 - d0.r1 - q2 * (pi.r1 - d0.r1);
            let r2 = q1 * (pj.r2 - d0.r2) + d0.r2 - pi.r2;
            let det = a11 * a22 - a12 * a21;
            let scale = (a11.abs() + a12.abs()) * (a21.abs() + a22.abs());
            if det.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                singular = true;
                continue;
            }
            let s = (r1 * a22 - a12 * r2) / det;
            let t = (a11 * r2 - a21 * r1) / det;
            if !(in_range(s) && in_range(t)) {
                continue;
            }
            let (s, t) = (s.clamp(0.0, 1.0), t.clamp(0.0, 1.0));
            let cand = SpePair {
                gbar: RatePair::new(pi.r1 + s * di[0], pi.r2 + s * di[1]),
                gtilde: RatePair::new(pj.r1 + t * dj[0], pj.r2 + t * dj[1]),
                segments: Some([i, j]),
            };
            let dup = found.iter().any(|f| {
                f.gbar.dist(&cand.gbar) <= DEDUP_TOL && f.gtilde.dist(&cand.gtilde) <= DEDUP_TOL
            });
            if !dup {
                found.push(cand);
            }
        }
    }
    match found.len() {
        1 => Ok(found.pop().expect("one element")),
        0 if singular => Err(Error::Singular(probs.p1, probs.p2)),
        0 => Err(Error::Internal("no segment pair admits an equilibrium".into())),
        n => Err(Error::Internal(format!("{n} distinct equilibrium pairs on a regular problem"))),
    }
}

/// Bisection on `gbar1` for any monotone frontier, evaluating the frontier
/// exactly (by interpolation for polylines, by inversion for TDM arcs).
pub fn spe_bisection(frontier: &Frontier, d0: &RatePair, probs: &BreakdownProbs) -> Result<SpePair> {
    let (start, end) = (frontier.start(), frontier.end());
    let f = |g1: f64| {
        frontier
            .g2_at(g1.clamp(start.r1, end.r1))
            .expect("argument clamped to the frontier")
    };
    let (q1, q2) = (1.0 - probs.p1, 1.0 - probs.p2);
    let tilde1 = |gb1: f64| q2 * (gb1 - d0.r1) + d0.r1;
    // positive at the left end, nonpositive at the right end
    let residual = |gb1: f64| f(gb1) - q1 * f(tilde1(gb1)) - probs.p1 * d0.r2;
    let (mut lo, mut hi) = (start.r1, end.r1);
    if residual(lo) <= 0.0 || residual(hi) > 0.0 {
        return Err(Error::NotRegular);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gb1 = 0.5 * (lo + hi);
    let gt1 = tilde1(gb1);
    Ok(SpePair {
        gbar: RatePair::new(gb1, f(gb1)),
        gtilde: RatePair::new(gt1, f(gt1)),
        segments: None,
    })
}

/// Closed-form pair for the two-user MAC, from the 4×4 linear system in
/// `(gbar1, gbar2, gtilde1, gtilde2)`.
pub fn spe_mac(p1: f64, p2: f64, probs: &BreakdownProbs) -> Result<SpePair> {
    let probs = BreakdownProbs::new(probs.p1, probs.p2)?;
    mac_system(p1, p2, &probs)
}

/// [`spe_mac`] on the closed probability square. At `p1 = p2 = 0` the
/// system is singular and the limit along `p1 = p2 -> 0`, the Nash solution,
/// is returned.
pub fn spe_mac_limit(p1: f64, p2: f64, probs: &BreakdownProbs) -> Result<SpePair> {
    let probs = BreakdownProbs::boundary(probs.p1, probs.p2)?;
    if probs.p1 == 0.0 && probs.p2 == 0.0 {
        let g = crate::nbs::nbs_mac(p1, p2)?.point;
        return Ok(SpePair {
            gbar: g,
            gtilde: g,
            segments: Some([0, 0]),
        });
    }
    mac_system(p1, p2, &probs)
}

fn mac_system(p1: f64, p2: f64, probs: &BreakdownProbs) -> Result<SpePair> {
    let d0 = disagreement_point(&ChannelParams::mac(p1, p2)?);
    let phi0 = c(p1 + p2);
    let (q1, q2) = (1.0 - probs.p1, 1.0 - probs.p2);
    let m = [
        [q2, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, -q1],
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
    ];
    let rhs = [-probs.p2 * d0.r1, probs.p1 * d0.r2, phi0, phi0];
    let x = solve4(m, rhs).ok_or(Error::Singular(probs.p1, probs.p2))?;
    Ok(SpePair {
        gbar: RatePair::new(x[0], x[1]),
        gtilde: RatePair::new(x[2], x[3]),
        segments: Some([0, 0]),
    })
}

/// Gaussian elimination with partial pivoting.
fn solve4(mut m: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = ((row + 1)..4).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    Some(x)
}
