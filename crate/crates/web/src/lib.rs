//! Browser bindings. Every export takes plain numbers and returns a JSON
//! string; failures come back as `{"error": ...}` so the page never has to
//! catch exceptions.

use icbargain::aobg::{spe_pair, BreakdownProbs};
use icbargain::bargain::{hk_problem, is_regular, phase1, BargainingProblem, Phase1Reason};
use icbargain::channel::{classify_regime, db_to_linear, disagreement_point, ChannelParams, RatePair};
use icbargain::gdof::{gdof_disagreement, gdof_phase1, gdof_region, gdof_tdm_region, GdofParams};
use icbargain::nbs::{nbs, nbs_polytope};
use icbargain::regions::{hk_power_split, hk_region, TdmRegion};
use icbargain::Error;
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

const TDM_POINTS: usize = 97;

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn to_json<T: Serialize>(r: Result<T, Error>) -> String {
    let s = match r {
        Ok(v) => serde_json::to_string(&v),
        Err(e) => serde_json::to_string(&Failure { error: e.to_string() }),
    };
    s.expect("plain data serializes")
}

fn channel(a: f64, b: f64, snr1_db: f64, snr2_db: f64) -> Result<ChannelParams, Error> {
    ChannelParams::new(a, b, db_to_linear(snr1_db), db_to_linear(snr2_db))
}

fn tdm_boundary(t: &TdmRegion) -> Vec<RatePair> {
    let n = (TDM_POINTS - 1) as f64;
    (0..TDM_POINTS).map(|k| t.boundary_point(k as f64 / n)).collect()
}

#[derive(Serialize)]
struct Scenario {
    regime: &'static str,
    cooperate: bool,
    reason: Phase1Reason,
    failed_condition: Option<&'static str>,
    regular: Option<bool>,
    hk_vertices: Vec<RatePair>,
    tdm_boundary: Vec<RatePair>,
    d0: RatePair,
    hk_nbs: Option<RatePair>,
    tdm_nbs: Option<RatePair>,
}

fn scenario_inner(a: f64, b: f64, snr1_db: f64, snr2_db: f64) -> Result<Scenario, Error> {
    let p = channel(a, b, snr1_db, snr2_db)?;
    let out = phase1(&p);
    let d0 = disagreement_point(&p);
    let split = out.split().unwrap_or_else(|| hk_power_split(&p));
    let region = hk_region(&p, split)?;
    let (hk_nbs, regular) = match out.split() {
        Some(s) => (
            Some(nbs(&hk_problem(&p, s)?)?.point),
            Some(is_regular(&p, &region, d0)?.regular),
        ),
        None => (None, None),
    };
    let tdm = TdmRegion::new(p.p1(), p.p2())?;
    let tdm_nbs = match BargainingProblem::new(tdm, d0) {
        Ok(problem) if problem.is_essential() => Some(nbs(&problem)?.point),
        _ => None,
    };
    Ok(Scenario {
        regime: classify_regime(&p).name(),
        cooperate: out.cooperate(),
        reason: out.reason(),
        failed_condition: out.failed_condition(),
        regular,
        hk_vertices: region.vertices()?,
        tdm_boundary: tdm_boundary(&tdm),
        d0,
        hk_nbs,
        tdm_nbs,
    })
}

/// H-K and TDM regions, disagreement point and both Nash solutions.
#[wasm_bindgen]
pub fn scenario(a: f64, b: f64, snr1_db: f64, snr2_db: f64) -> String {
    to_json(scenario_inner(a, b, snr1_db, snr2_db))
}

#[derive(Serialize)]
struct Equilibrium {
    gbar: RatePair,
    gtilde: RatePair,
    nbs: RatePair,
}

/// Equilibrium offers of the alternating-offer game over the H-K region
/// (`tdm = false`) or the TDM region.
#[wasm_bindgen]
pub fn equilibrium(a: f64, b: f64, snr1_db: f64, snr2_db: f64, p1: f64, p2: f64, tdm: bool) -> String {
    to_json((|| {
        let p = channel(a, b, snr1_db, snr2_db)?;
        let problem = if tdm {
            BargainingProblem::new(TdmRegion::new(p.p1(), p.p2())?, disagreement_point(&p))
                .map_err(|_| Error::NotEssential)?
        } else {
            let split = phase1(&p).split().ok_or(Error::NotEssential)?;
            hk_problem(&p, split)?
        };
        if !problem.is_essential() {
            return Err(Error::NotEssential);
        }
        let spe = spe_pair(&problem, &BreakdownProbs::new(p1, p2)?)?;
        Ok(Equilibrium {
            gbar: spe.gbar,
            gtilde: spe.gtilde,
            nbs: nbs(&problem)?.point,
        })
    })())
}

#[derive(Serialize)]
struct Gdof {
    tag: &'static str,
    vertices: Vec<RatePair>,
    tdm_vertices: Vec<RatePair>,
    d0: RatePair,
    cooperate: bool,
    failed_condition: Option<&'static str>,
    nbs: Option<RatePair>,
    tdm_nbs: Option<RatePair>,
}

/// Optimal and time-sharing g.d.o.f. regions with their Nash solutions.
#[wasm_bindgen]
pub fn gdof(theta1: f64, theta2: f64, theta3: f64) -> String {
    to_json((|| {
        let th = GdofParams::new(theta1, theta2, theta3)?;
        let region = gdof_region(&th)?;
        let tdm = gdof_tdm_region();
        let d0 = gdof_disagreement(&th);
        let out = gdof_phase1(&th)?;
        let nbs_point = if out.cooperate() {
            Some(nbs_polytope(&region.polytope, d0)?.point)
        } else {
            None
        };
        Ok(Gdof {
            tag: region.tag,
            vertices: region.polytope.vertices()?,
            tdm_vertices: tdm.polytope.vertices()?,
            d0,
            cooperate: out.cooperate(),
            failed_condition: out.failed_condition(),
            nbs: nbs_point,
            tdm_nbs: nbs_polytope(&tdm.polytope, d0).ok().map(|r| r.point),
        })
    })())
}
