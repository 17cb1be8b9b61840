//! Two-user Gaussian interference channel: parameters, regime classification
//! and the uncoordinated (treat-interference-as-noise) operating point.
//!
//! Everything here works in the linear power domain and measures rates in
//! bits per real channel use.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

/// `C(x) = ½·log₂(1 + x)`, the capacity of a real AWGN channel at SNR `x`.
pub fn cap(x: f64) -> Result<f64> {
    let x = check_range("cap argument", "finite and >= 0", x, x >= 0.0)?;
    Ok(c(x))
}

/// Unchecked `C(x)`; callers guarantee `x >= 0`.
#[inline]
pub(crate) fn c(x: f64) -> f64 {
    0.5 * (1.0 + x).log2()
}

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Cross gains and power constraints of a two-user Gaussian IC.
///
/// Receiver 1 sees user 2 through a cross gain of power `a`, receiver 2 sees
/// user 1 through `b`. Direct gains and noise variances are normalized to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    a: f64,
    b: f64,
    p1: f64,
    p2: f64,
}

impl ChannelParams {
    pub fn new(a: f64, b: f64, p1: f64, p2: f64) -> Result<Self> {
        let a = check_range("cross gain a", "finite and >= 0", a, a >= 0.0)?;
        let b = check_range("cross gain b", "finite and >= 0", b, b >= 0.0)?;
        let p1 = check_range("power P1", "finite and > 0", p1, p1 > 0.0)?;
        let p2 = check_range("power P2", "finite and > 0", p2, p2 > 0.0)?;
        Ok(Self { a, b, p1, p2 })
    }

    /// The channel seen by a single receiver decoding both users (`a = b = 1`).
    pub fn mac(p1: f64, p2: f64) -> Result<Self> {
        Self::new(1.0, 1.0, p1, p2)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn snr1(&self) -> f64 {
        self.p1
    }

    pub fn snr2(&self) -> f64 {
        self.p2
    }

    /// Interference-to-noise ratio at receiver 1, `a·P2`.
    pub fn inr1(&self) -> f64 {
        self.a * self.p2
    }

    /// Interference-to-noise ratio at receiver 2, `b·P1`.
    pub fn inr2(&self) -> f64 {
        self.b * self.p1
    }

    /// Relabels the users: `(a, b, P1, P2) -> (b, a, P2, P1)`.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            p1: self.p2,
            p2: self.p1,
        }
    }

    /// Noisy-interference condition `√a(bP1+1) + √b(aP2+1) <= 1`, under which
    /// treating interference as noise achieves the sum capacity.
    pub fn is_noisy(&self) -> bool {
        self.a.sqrt() * (self.inr2() + 1.0) + self.b.sqrt() * (self.inr1() + 1.0) <= 1.0
    }
}

/// Interference regime. Gains of exactly one count as strong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "tag")]
pub enum Regime {
    /// `a >= 1` and `b >= 1`.
    Strong,
    /// `a < 1` and `b < 1`.
    Weak { noisy: bool },
    /// `a < 1`, `b >= 1`.
    MixedAWeak,
    /// `a >= 1`, `b < 1`; the mirror image of [`Regime::MixedAWeak`].
    MixedBWeak,
}

impl Regime {
    pub fn is_mixed(&self) -> bool {
        matches!(self, Regime::MixedAWeak | Regime::MixedBWeak)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Strong => "strong",
            Regime::Weak { noisy: false } => "weak",
            Regime::Weak { noisy: true } => "weak-noisy",
            Regime::MixedAWeak => "mixed-a-weak",
            Regime::MixedBWeak => "mixed-b-weak",
        }
    }
}

pub fn classify_regime(params: &ChannelParams) -> Regime {
    match (params.a >= 1.0, params.b >= 1.0) {
        (true, true) => Regime::Strong,
        (false, false) => Regime::Weak {
            noisy: params.is_noisy(),
        },
        (false, true) => Regime::MixedAWeak,
        (true, false) => Regime::MixedBWeak,
    }
}

/// A pair of payoffs, one per user.
///
/// For channel problems these are rates in bits per channel use; the
/// bargaining solvers reuse the type for any two-player payoff, including
/// generalized degrees of freedom and affinely transformed rates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub const fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }

    /// Component `i` (0 or 1).
    pub fn get(&self, i: usize) -> f64 {
        match i {
            0 => self.r1,
            1 => self.r2,
            _ => panic!("payoff index {i} out of range"),
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.r1, self.r2]
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.r2, self.r1)
    }

    pub fn dist(&self, other: &RatePair) -> f64 {
        (self.r1 - other.r1).hypot(self.r2 - other.r2)
    }

    /// True if `self` exceeds `other` by more than `margin` in both coordinates.
    pub fn strictly_dominates(&self, other: &RatePair, margin: f64) -> bool {
        self.r1 > other.r1 + margin && self.r2 > other.r2 + margin
    }
}

impl From<[f64; 2]> for RatePair {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

/// Rates reached when each receiver treats the other user's signal as noise.
///
/// With `a = b = 1` these are the "safe rates" of the two-user MAC.
pub fn disagreement_point(params: &ChannelParams) -> RatePair {
    RatePair::new(
        c(params.p1 / (1.0 + params.inr1())),
        c(params.p2 / (1.0 + params.inr2())),
    )
}
