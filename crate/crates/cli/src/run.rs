use clap::error::ErrorKind;
use icbargain::aobg::{spe_mac, spe_pair, BreakdownProbs, Game, Player, SpePair, Strategy};
use icbargain::bargain::{
    hk_problem, is_regular, phase1, BargainingProblem, Phase1Outcome, Phase1Reason,
    ESSENTIAL_CONDITION,
};
use icbargain::channel::{classify_regime, disagreement_point, ChannelParams, RatePair};
use icbargain::gdof::{
    gdof_disagreement, gdof_phase1, gdof_regime, gdof_region, gdof_tdm_region, GdofRegion,
};
use icbargain::nbs::{nbs, nbs_mac, nbs_polytope};
use icbargain::regions::{hk_power_split, mac_region, PowerSplit, RatePolytope, TdmRegion};
use icbargain::Error;
use serde_json::{json, Value};

use crate::params::{Axis, Params};

/// Points on a TDM boundary written to region outputs.
const TDM_BOUNDARY_POINTS: usize = 129;

#[derive(Debug)]
pub enum Failure {
    /// Bad invocation; exit status 2.
    Usage(ErrorKind, String),
    /// The computation was refused or failed; exit status 1 with this body.
    Refused(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut body = json!({ "kind": error_kind(&e), "message": e.to_string() });
        if let Error::HypothesisViolated(row) = e {
            body["condition"] = json!(row);
        }
        Failure::Refused(json!({ "error": body }))
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain { .. } => "domain",
        Error::WrongRegime { .. } => "wrong_regime",
        Error::Mismatch(_) => "mismatch",
        Error::Degenerate(_) => "degenerate",
        Error::OutsideRegion(_) => "outside_region",
        Error::NotEssential => "not_essential",
        Error::HypothesisViolated(_) => "hypothesis_violated",
        Error::NotRegular => "not_regular",
        Error::UnsupportedRegime(_) => "unsupported_regime",
        Error::Singular(..) => "singular",
        Error::RoundLimit(_) => "round_limit",
        Error::Internal(_) => "internal",
    }
}

fn phase1_refusal<S: Copy>(out: &Phase1Outcome<S>) -> Failure {
    Failure::Refused(json!({
        "error": {
            "kind": "phase1_failed",
            "message": "the users do not agree to coordinate",
            "reason": out.reason(),
            "condition": out.failed_condition(),
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SchemeArg {
    Hk,
    Tdm,
}

impl SchemeArg {
    fn name(self) -> &'static str {
        match self {
            SchemeArg::Hk => "hk",
            SchemeArg::Tdm => "tdm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyArg {
    Equilibrium,
    AlwaysReject,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Equilibrium => Strategy::Equilibrium,
            StrategyArg::AlwaysReject => Strategy::AlwaysReject,
        }
    }
}

/// Monte-Carlo play-out settings for `aobg`.
#[derive(Debug, Clone)]
pub struct Playout {
    pub trials: u64,
    pub seed: u64,
    pub first_mover: Player,
    pub strategies: [StrategyArg; 2],
    pub traces: bool,
}

fn channel_block(p: &ChannelParams) -> Value {
    json!({
        "a": p.a(), "b": p.b(), "p1": p.p1(), "p2": p.p2(),
        "inr1": p.inr1(), "inr2": p.inr2(),
        "regime": classify_regime(p).name(),
    })
}

fn polytope_block(r: &RatePolytope) -> Result<Value, Failure> {
    let mut v = serde_json::to_value(r).expect("serializable");
    v["vertices"] = serde_json::to_value(r.vertices()?).expect("serializable");
    Ok(v)
}

fn tdm_block(t: &TdmRegion) -> Value {
    let n = TDM_BOUNDARY_POINTS - 1;
    let boundary: Vec<RatePair> = (0..=n).map(|k| t.boundary_point(k as f64 / n as f64)).collect();
    json!({ "kind": "tdm", "p1": t.p1, "p2": t.p2, "boundary": boundary })
}

fn header(command: &str, params: &Params) -> Value {
    json!({ "command": command, "parameters": params })
}

/// H-K problem of a channel whose users agreed in phase 1.
fn cooperative_hk(p: &ChannelParams) -> Result<(PowerSplit, BargainingProblem), Failure> {
    let out = phase1(p);
    if !out.cooperate() {
        return Err(phase1_refusal(&out));
    }
    let split = out.split().expect("cooperating outcome has a split");
    Ok((split, hk_problem(p, split)?))
}

fn tdm_problem(p: &ChannelParams) -> Result<BargainingProblem, Failure> {
    let problem = BargainingProblem::new(TdmRegion::new(p.p1(), p.p2())?, disagreement_point(p));
    let Some(problem) = problem.ok().filter(BargainingProblem::is_essential) else {
        return Err(Failure::Refused(json!({
            "error": {
                "kind": "not_essential",
                "message": "no TDM rate pair improves on the disagreement point for both users",
                "condition": ESSENTIAL_CONDITION,
            }
        })));
    };
    Ok(problem)
}

fn regularity(p: &ChannelParams, split: PowerSplit) -> Result<Value, Failure> {
    let region = icbargain::regions::hk_region(p, split)?;
    Ok(serde_json::to_value(is_regular(p, &region, disagreement_point(p))?).expect("serializable"))
}

pub fn classify(params: &Params) -> Result<Value, Failure> {
    let p = params.channel()?;
    let out = phase1(&p);
    let mut v = header("classify", params);
    v["channel"] = channel_block(&p);
    v["d0"] = json!(disagreement_point(&p));
    v["phase1"] = json!(out);
    v["regularity"] = match out.split() {
        Some(split) => regularity(&p, split)?,
        None => Value::Null,
    };
    Ok(v)
}

pub fn region(params: &Params, scheme: SchemeArg) -> Result<Value, Failure> {
    let p = params.channel()?;
    let out = phase1(&p);
    let mut v = header("region", params);
    v["channel"] = channel_block(&p);
    v["scheme"] = json!(scheme.name());
    v["phase1"] = json!(out);
    v["region"] = match scheme {
        SchemeArg::Hk => {
            let split = out.split().unwrap_or_else(|| hk_power_split(&p));
            polytope_block(&icbargain::regions::hk_region(&p, split)?)?
        }
        SchemeArg::Tdm => tdm_block(&TdmRegion::new(p.p1(), p.p2())?),
    };
    v["d0"] = json!(disagreement_point(&p));
    Ok(v)
}

fn scheme_problem(p: &ChannelParams, scheme: SchemeArg) -> Result<(BargainingProblem, Value), Failure> {
    match scheme {
        SchemeArg::Hk => {
            let (split, problem) = cooperative_hk(p)?;
            let region = match problem.feasible() {
                icbargain::regions::FeasibleSet::Polytope(r) => polytope_block(r)?,
                icbargain::regions::FeasibleSet::Tdm(t) => tdm_block(t),
            };
            let mut v = json!({ "region": region });
            v["regularity"] = regularity(p, split)?;
            Ok((problem, v))
        }
        SchemeArg::Tdm => {
            let problem = tdm_problem(p)?;
            Ok((problem, json!({ "region": tdm_block(&TdmRegion::new(p.p1(), p.p2())?) })))
        }
    }
}

pub fn nbs_cmd(params: &Params, scheme: SchemeArg) -> Result<Value, Failure> {
    let p = params.channel()?;
    let (problem, extra) = scheme_problem(&p, scheme)?;
    let mut v = header("nbs", params);
    v["channel"] = channel_block(&p);
    v["scheme"] = json!(scheme.name());
    v["phase1"] = json!(phase1(&p));
    v["region"] = extra["region"].clone();
    if let Some(r) = extra.get("regularity") {
        v["regularity"] = r.clone();
    }
    v["d0"] = json!(problem.d0());
    v["nbs"] = json!(nbs(&problem)?);
    Ok(v)
}

fn outcome(pair: [f64; 2], spe: &SpePair) -> Value {
    json!({
        "p1": pair[0],
        "p2": pair[1],
        "gbar": spe.gbar,
        "gtilde": spe.gtilde,
        "first_mover_advantage": spe.gbar.r1 >= spe.gtilde.r1 && spe.gtilde.r2 >= spe.gbar.r2,
    })
}

fn playouts(game: &Game, play: &Playout) -> Result<Value, Failure> {
    let strategies = play.strategies.map(Strategy::from);
    let (mut agreed, mut rounds) = (0u64, 0u64);
    let mut traces = Vec::new();
    for k in 0..play.trials {
        let t = game.play(strategies, play.first_mover, play.seed.wrapping_add(k))?;
        agreed += t.agreed as u64;
        rounds += t.rounds;
        if play.traces {
            traces.push(t);
        }
    }
    let mut v = json!({
        "trials": play.trials,
        "seed": play.seed,
        "first_mover": play.first_mover,
        "strategies": strategies,
        "agreed": agreed,
        "breakdowns": play.trials - agreed,
        "mean_rounds": rounds as f64 / play.trials as f64,
    });
    if play.traces {
        v["traces"] = json!(traces);
    }
    Ok(v)
}

fn need_pairs(params: &Params) -> Result<Vec<[f64; 2]>, Failure> {
    let pairs = params.prob_pairs();
    if pairs.is_empty() {
        return Err(Failure::Usage(
            ErrorKind::MissingRequiredArgument,
            "--p1 and --p2 are required (or a --preset that defines them)".into(),
        ));
    }
    Ok(pairs)
}

pub fn aobg(params: &Params, scheme: SchemeArg, play: &Playout) -> Result<Value, Failure> {
    let p = params.channel()?;
    let pairs = need_pairs(params)?;
    let (problem, extra) = scheme_problem(&p, scheme)?;
    if let Some(report) = extra.get("regularity") {
        if report["regular"] == json!(false) {
            return Err(Failure::Refused(json!({
                "error": {
                    "kind": "not_regular",
                    "message": "the bargaining problem is not regular, so the equilibrium need not be unique",
                    "failed_conditions": report["failed_conditions"],
                }
            })));
        }
    }
    let mut outcomes = Vec::new();
    for pair in pairs {
        let probs = BreakdownProbs::new(pair[0], pair[1])?;
        let game = Game::new(problem.clone(), probs)?;
        let mut o = outcome(pair, game.spe());
        if play.trials > 0 {
            o["playouts"] = playouts(&game, play)?;
        }
        outcomes.push(o);
    }
    let mut v = header("aobg", params);
    v["channel"] = channel_block(&p);
    v["scheme"] = json!(scheme.name());
    v["region"] = extra["region"].clone();
    v["d0"] = json!(problem.d0());
    v["nbs"] = json!(nbs(&problem)?);
    v["outcomes"] = json!(outcomes);
    Ok(v)
}

pub fn mac(params: &Params) -> Result<Value, Failure> {
    let (p1, p2) = params.powers()?;
    let d0 = disagreement_point(&ChannelParams::mac(p1, p2)?);
    let mut outcomes = Vec::new();
    for pair in params.prob_pairs() {
        let spe = spe_mac(p1, p2, &BreakdownProbs::new(pair[0], pair[1])?)?;
        outcomes.push(outcome(pair, &spe));
    }
    let mut v = header("mac", params);
    v["powers"] = json!([p1, p2]);
    v["region"] = polytope_block(&mac_region(p1, p2)?)?;
    v["d0"] = json!(d0);
    v["nbs"] = json!(nbs_mac(p1, p2)?);
    v["outcomes"] = json!(outcomes);
    Ok(v)
}

fn gdof_region_block(r: &GdofRegion) -> Result<Value, Failure> {
    Ok(json!({ "tag": r.tag, "bounds": r.bounds, "polytope": polytope_block(&r.polytope)? }))
}

pub fn gdof(params: &Params, scheme: SchemeArg) -> Result<Value, Failure> {
    let theta = params.gdof()?;
    let regime = gdof_regime(&theta)?;
    let out = gdof_phase1(&theta)?;
    let d0 = gdof_disagreement(&theta);
    let region = match scheme {
        SchemeArg::Hk => {
            if !out.cooperate() {
                return Err(phase1_refusal(&out));
            }
            gdof_region(&theta)?
        }
        SchemeArg::Tdm => gdof_tdm_region(),
    };
    let mut v = header("gdof", params);
    v["theta"] = json!(theta.theta());
    v["regime"] = json!(regime);
    v["scheme"] = json!(scheme.name());
    v["phase1"] = json!(out);
    v["region"] = gdof_region_block(&region)?;
    v["d0"] = json!(d0);
    v["nbs"] = json!(nbs_polytope(&region.polytope, d0)?);
    Ok(v)
}

/// A finished sweep: column names and one row of scalars per grid point.
pub struct Table {
    pub meta: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

fn channel_row(p: &ChannelParams, scheme: SchemeArg) -> Result<Vec<Value>, Failure> {
    let d0 = disagreement_point(p);
    let (star, cooperate, reason, regular): (RatePair, bool, Phase1Reason, bool) = match scheme {
        SchemeArg::Hk => {
            let out = phase1(p);
            match out.split() {
                Some(split) => {
                    let problem = hk_problem(p, split)?;
                    let report = is_regular(p, &icbargain::regions::hk_region(p, split)?, d0)?;
                    (nbs(&problem)?.point, true, out.reason(), report.regular)
                }
                None => (d0, false, out.reason(), false),
            }
        }
        SchemeArg::Tdm => {
            let problem = BargainingProblem::new(TdmRegion::new(p.p1(), p.p2())?, d0);
            match problem.ok().filter(BargainingProblem::is_essential) {
                // a TDM frontier is strictly monotone, so essential means regular
                Some(problem) => (nbs(&problem)?.point, true, Phase1Reason::Ok, true),
                None => (d0, false, Phase1Reason::NotEssential, false),
            }
        }
    };
    Ok(vec![
        json!(d0.r1),
        json!(d0.r2),
        json!(star.r1),
        json!(star.r2),
        json!(cooperate),
        json!(reason),
        json!(regular),
    ])
}

fn usage(msg: String) -> Failure {
    Failure::Usage(ErrorKind::ArgumentConflict, msg)
}

pub fn sweep(params: &Params, scheme: SchemeArg) -> Result<Table, Failure> {
    let axes = &params.axes;
    if axes.is_empty() {
        return Err(Failure::Usage(
            ErrorKind::MissingRequiredArgument,
            "--var, --from, --to and --steps are required (or a --preset that defines them)".into(),
        ));
    }
    let probs = axes[0].var.is_prob();
    if axes.iter().any(|a| a.var.is_prob() != probs) {
        return Err(usage("cannot mix channel and breakdown-probability axes".into()));
    }
    if axes.len() == 2 && axes[0].var == axes[1].var {
        return Err(usage("the two sweep axes must differ".into()));
    }
    for ax in axes {
        if ax.steps < 2 {
            return Err(Failure::Usage(ErrorKind::ValueValidation, "--steps must be at least 2".into()));
        }
    }
    let grid = grid(axes);
    let mut rows = Vec::with_capacity(grid.len());
    let columns: Vec<String>;
    if probs {
        let p = params.channel()?;
        let (problem, extra) = scheme_problem(&p, scheme)?;
        if extra.get("regularity").is_some_and(|r| r["regular"] == json!(false)) {
            return Err(Error::NotRegular.into());
        }
        let d0 = problem.d0();
        columns = ["p1", "p2", "r1_0", "r2_0", "gbar1", "gbar2", "gtilde1", "gtilde2"]
            .map(String::from)
            .to_vec();
        for point in &grid {
            let q = axes.iter().zip(point).fold(params.clone(), |q, (ax, &v)| q.with(ax.var, v));
            let (p1, p2) = match (q.p1, q.p2) {
                (Some(p1), Some(p2)) => (p1, p2),
                _ => {
                    return Err(Failure::Usage(
                        ErrorKind::MissingRequiredArgument,
                        "the breakdown probability that is not swept must be given".into(),
                    ))
                }
            };
            let spe = spe_pair(&problem, &BreakdownProbs::new(p1, p2)?)?;
            rows.push(
                [p1, p2, d0.r1, d0.r2, spe.gbar.r1, spe.gbar.r2, spe.gtilde.r1, spe.gtilde.r2]
                    .map(|x| json!(x))
                    .to_vec(),
            );
        }
    } else {
        columns = axes
            .iter()
            .map(|a| a.var.column())
            .chain(["r1_0", "r2_0", "r1_star", "r2_star", "cooperate", "reason", "regular"])
            .map(String::from)
            .collect();
        for point in &grid {
            let q = axes.iter().zip(point).fold(params.clone(), |q, (ax, &v)| q.with(ax.var, v));
            let mut row: Vec<Value> = point.iter().map(|&x| json!(x)).collect();
            row.extend(channel_row(&q.channel()?, scheme)?);
            rows.push(row);
        }
    }
    let mut meta = header("sweep", params);
    meta["scheme"] = json!(scheme.name());
    Ok(Table { meta, columns, rows })
}

/// Row-major grid over one or two axes.
fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    let first = axes[0].points();
    match axes.get(1) {
        None => first.into_iter().map(|x| vec![x]).collect(),
        Some(second) => {
            let second = second.points();
            first
                .iter()
                .flat_map(|&x| second.iter().map(move |&y| vec![x, y]))
                .collect()
        }
    }
}

