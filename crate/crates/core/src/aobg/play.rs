use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{spe_pair, BreakdownProbs, SpePair};
use crate::bargain::BargainingProblem;
use crate::channel::RatePair;
use crate::error::{Error, Result};

/// Guard against runs that never end.
pub const MAX_ROUNDS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Player {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Player {
    pub fn other(self) -> Self {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }
}

/// How a player proposes and responds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Strategy {
    /// Propose the own equilibrium offer; accept anything worth at least
    /// the equilibrium offer of the other player.
    Equilibrium,
    /// Propose the own ideal point and reject everything.
    AlwaysReject,
    /// Propose `offer`; accept iff the own payoff is at least `accept_at`.
    Threshold { offer: RatePair, accept_at: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "event")]
pub enum Event {
    Offer { by: Player, point: RatePair },
    Accept { by: Player },
    Reject { by: Player },
    Continue,
    Breakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameTrace {
    pub events: Vec<Event>,
    pub payoff: RatePair,
    pub rounds: u64,
    pub agreed: bool,
}

impl GameTrace {
    /// Checks the event sequence against the history grammar: each round is
    /// an offer followed by an acceptance (terminal) or a rejection by the
    /// other player, then a breakdown (terminal) or a continuation; proposers
    /// alternate.
    pub fn is_valid(&self, first_mover: Player, d0: &RatePair) -> bool {
        let mut proposer = first_mover;
        let mut rounds = 0;
        let mut it = self.events.iter();
        loop {
            let Some(Event::Offer { by, point }) = it.next() else {
                return false;
            };
            if *by != proposer {
                return false;
            }
            rounds += 1;
            match it.next() {
                Some(Event::Accept { by }) if *by == proposer.other() => {
                    return it.next().is_none()
                        && self.agreed
                        && self.payoff == *point
                        && self.rounds == rounds;
                }
                Some(Event::Reject { by }) if *by == proposer.other() => {}
                _ => return false,
            }
            match it.next() {
                Some(Event::Breakdown) => {
                    return it.next().is_none()
                        && !self.agreed
                        && self.payoff == *d0
                        && self.rounds == rounds;
                }
                Some(Event::Continue) => proposer = proposer.other(),
                _ => return false,
            }
        }
    }
}

/// A bargaining problem with its equilibrium pair, ready to be played.
#[derive(Debug, Clone)]
pub struct Game {
    problem: BargainingProblem,
    probs: BreakdownProbs,
    spe: SpePair,
    ideal: [RatePair; 2],
}

impl Game {
    pub fn new(problem: BargainingProblem, probs: BreakdownProbs) -> Result<Self> {
        let spe = spe_pair(&problem, &probs)?;
        let f = problem.ir_frontier()?;
        let ideal = [f.end(), f.start()];
        Ok(Self {
            problem,
            probs,
            spe,
            ideal,
        })
    }

    pub fn spe(&self) -> &SpePair {
        &self.spe
    }

    pub fn problem(&self) -> &BargainingProblem {
        &self.problem
    }

    fn offer(&self, who: Player, s: &Strategy) -> RatePair {
        match (s, who) {
            (Strategy::Equilibrium, Player::One) => self.spe.gbar,
            (Strategy::Equilibrium, Player::Two) => self.spe.gtilde,
            (Strategy::AlwaysReject, _) => self.ideal[who.index()],
            (Strategy::Threshold { offer, .. }, _) => *offer,
        }
    }

    fn accepts(&self, who: Player, s: &Strategy, offer: &RatePair) -> bool {
        let own = offer.get(who.index());
        match (s, who) {
            (Strategy::Equilibrium, Player::One) => own >= self.spe.gtilde.r1,
            (Strategy::Equilibrium, Player::Two) => own >= self.spe.gbar.r2,
            (Strategy::AlwaysReject, _) => false,
            (Strategy::Threshold { accept_at, .. }, _) => own >= *accept_at,
        }
    }

    /// Plays one game. Each rejection consumes exactly one uniform draw from
    /// a ChaCha8 generator seeded with `seed`; the game breaks down when the
    /// draw falls below the proposer's breakdown probability.
    pub fn play(
        &self,
        strategies: [Strategy; 2],
        first_mover: Player,
        seed: u64,
    ) -> Result<GameTrace> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut events = Vec::new();
        let mut proposer = first_mover;
        for round in 1..=MAX_ROUNDS {
            let responder = proposer.other();
            let offer = self.offer(proposer, &strategies[proposer.index()]);
            events.push(Event::Offer { by: proposer, point: offer });
            if self.accepts(responder, &strategies[responder.index()], &offer) {
                events.push(Event::Accept { by: responder });
                return Ok(GameTrace {
                    events,
                    payoff: offer,
                    rounds: round,
                    agreed: true,
                });
            }
            events.push(Event::Reject { by: responder });
            let u: f64 = rng.gen();
            if u < self.probs.of(proposer) {
                events.push(Event::Breakdown);
                return Ok(GameTrace {
                    events,
                    payoff: self.problem.d0(),
                    rounds: round,
                    agreed: false,
                });
            }
            events.push(Event::Continue);
            proposer = responder;
        }
        Err(Error::RoundLimit(MAX_ROUNDS))
    }
}

/// One-shot convenience wrapper around [`Game`].
pub fn play_aobg(
    problem: &BargainingProblem,
    probs: &BreakdownProbs,
    strategies: [Strategy; 2],
    first_mover: Player,
    seed: u64,
) -> Result<GameTrace> {
    Game::new(problem.clone(), *probs)?.play(strategies, first_mover, seed)
}
