#![allow(dead_code)]

use icbargain::bargain::phase1;
use icbargain::channel::{classify_regime, db_to_linear, ChannelParams, Regime};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    Strong,
    Weak,
    Mixed,
}

fn draw(r: &mut ChaCha8Rng, kind: Kind) -> ChannelParams {
    let p1 = db_to_linear(r.gen_range(5.0..35.0));
    let p2 = db_to_linear(r.gen_range(5.0..35.0));
    let weak = |r: &mut ChaCha8Rng| r.gen_range(0.02..0.98);
    let strong = |r: &mut ChaCha8Rng| r.gen_range(1.0..6.0);
    let (a, b) = match kind {
        Kind::Strong => (strong(r), strong(r)),
        Kind::Weak => (weak(r), weak(r)),
        Kind::Mixed if r.gen_bool(0.5) => (weak(r), strong(r)),
        Kind::Mixed => (strong(r), weak(r)),
    };
    ChannelParams::new(a, b, p1, p2).unwrap()
}

/// Random channels of the given kind whose users agree to coordinate.
pub fn cooperative(r: &mut ChaCha8Rng, kind: Kind, n: usize) -> Vec<ChannelParams> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = draw(r, kind);
        let regime = classify_regime(&p);
        let right = match kind {
            Kind::Strong => regime == Regime::Strong,
            Kind::Weak => matches!(regime, Regime::Weak { .. }),
            Kind::Mixed => regime.is_mixed(),
        };
        if right && phase1(&p).cooperate() {
            out.push(p);
        }
    }
    out
}
