use std::collections::BTreeMap;

use clap::ValueEnum;
use icbargain::channel::{db_to_linear, ChannelParams};
use icbargain::gdof::GdofParams;
use serde::Serialize;

use crate::output::sig12;
use crate::run::Failure;

/// Where an effective parameter value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Flag,
    /// Stated in the figure caption.
    Caption,
    /// Stated in the discussion of the figure.
    Text,
    /// Not given for the figure; chosen here.
    Assumed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Var {
    A,
    B,
    #[value(name = "snr1-db")]
    Snr1Db,
    #[value(name = "snr2-db")]
    Snr2Db,
    Snr1,
    Snr2,
    P1,
    P2,
}

impl Var {
    pub fn column(self) -> &'static str {
        match self {
            Var::A => "a",
            Var::B => "b",
            Var::Snr1Db => "snr1_db",
            Var::Snr2Db => "snr2_db",
            Var::Snr1 => "snr1",
            Var::Snr2 => "snr2",
            Var::P1 => "p1",
            Var::P2 => "p2",
        }
    }

    pub fn is_prob(self) -> bool {
        matches!(self, Var::P1 | Var::P2)
    }
}

/// Inclusive grid `from, ..., to` with `steps` points. Points are rounded to
/// the 12 significant digits written to CSV, so a row is evaluated at
/// exactly the value it shows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub var: Var,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                let t = k as f64 / n;
                let x = self.from * (1.0 - t) + self.to * t;
                sig12(x).parse().expect("sig12 output parses")
            })
            .collect()
    }
}

/// Effective inputs of a run, echoed in every output.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr1_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr2_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
    /// Several breakdown-probability pairs shown in one figure.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub axes: Vec<Axis>,
    pub source: BTreeMap<&'static str, Source>,
}

fn missing(what: &str) -> Failure {
    Failure::Usage(
        clap::error::ErrorKind::MissingRequiredArgument,
        format!("{what} is required (give the flag or a --preset that defines it)"),
    )
}

impl Params {
    /// Sets a field, refusing to override a value a preset already defines.
    pub fn set(&mut self, key: &'static str, given: Option<f64>) -> Result<(), Failure> {
        let Some(v) = given else { return Ok(()) };
        let conflicting: &[&str] = match key {
            "snr1" | "snr1_db" => &["snr1", "snr1_db"],
            "snr2" | "snr2_db" => &["snr2", "snr2_db"],
            "p1" | "p2" => &[key, "pairs"],
            _ => &[key],
        };
        if let Some(name) = self.preset {
            if conflicting.iter().any(|k| self.source.contains_key(k)) {
                return Err(Failure::Usage(
                    clap::error::ErrorKind::ArgumentConflict,
                    format!("preset {name} already sets {key}; drop the flag or the preset"),
                ));
            }
        }
        let slot = match key {
            "a" => &mut self.a,
            "b" => &mut self.b,
            "snr1_db" => &mut self.snr1_db,
            "snr2_db" => &mut self.snr2_db,
            "snr1" => &mut self.snr1,
            "snr2" => &mut self.snr2,
            "p1" => &mut self.p1,
            "p2" => &mut self.p2,
            _ => unreachable!("unknown parameter {key}"),
        };
        *slot = Some(v);
        self.source.insert(key, Source::Flag);
        Ok(())
    }

    /// Overrides one variable for a sweep point.
    pub fn with(&self, var: Var, v: f64) -> Params {
        let mut p = self.clone();
        match var {
            Var::A => p.a = Some(v),
            Var::B => p.b = Some(v),
            Var::Snr1Db => (p.snr1_db, p.snr1) = (Some(v), None),
            Var::Snr2Db => (p.snr2_db, p.snr2) = (Some(v), None),
            Var::Snr1 => (p.snr1, p.snr1_db) = (Some(v), None),
            Var::Snr2 => (p.snr2, p.snr2_db) = (Some(v), None),
            Var::P1 => p.p1 = Some(v),
            Var::P2 => p.p2 = Some(v),
        }
        p
    }

    pub fn powers(&self) -> Result<(f64, f64), Failure> {
        let p1 = match (self.snr1_db, self.snr1) {
            (Some(db), _) => db_to_linear(db),
            (None, Some(x)) => x,
            (None, None) => return Err(missing("--snr1-db or --snr1")),
        };
        let p2 = match (self.snr2_db, self.snr2) {
            (Some(db), _) => db_to_linear(db),
            (None, Some(x)) => x,
            (None, None) => return Err(missing("--snr2-db or --snr2")),
        };
        Ok((p1, p2))
    }

    pub fn channel(&self) -> Result<ChannelParams, Failure> {
        let a = self.a.ok_or_else(|| missing("--a"))?;
        let b = self.b.ok_or_else(|| missing("--b"))?;
        let (p1, p2) = self.powers()?;
        Ok(ChannelParams::new(a, b, p1, p2)?)
    }

    /// Breakdown-probability pairs to evaluate; empty if none were given.
    pub fn prob_pairs(&self) -> Vec<[f64; 2]> {
        if !self.pairs.is_empty() {
            return self.pairs.clone();
        }
        match (self.p1, self.p2) {
            (Some(p1), Some(p2)) => vec![[p1, p2]],
            _ => Vec::new(),
        }
    }

    pub fn gdof(&self) -> Result<GdofParams, Failure> {
        let [t1, t2, t3] = self.theta.ok_or_else(|| missing("--theta1, --theta2 and --theta3"))?;
        Ok(GdofParams::new(t1, t2, t3)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig3,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
    Fig5c,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4a => "fig4a",
            Preset::Fig4b => "fig4b",
            Preset::Fig5a => "fig5a",
            Preset::Fig5b => "fig5b",
            Preset::Fig5c => "fig5c",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Fig10 => "fig10",
        }
    }

    /// The command that reproduces the figure's data.
    pub fn command(self) -> &'static str {
        match self {
            Preset::Fig3 => "mac",
            Preset::Fig4a | Preset::Fig4b | Preset::Fig6 | Preset::Fig8 => "sweep",
            Preset::Fig5a | Preset::Fig5b | Preset::Fig5c => "nbs",
            Preset::Fig7 | Preset::Fig9 => "aobg",
            Preset::Fig10 => "gdof",
        }
    }

    pub fn params(self) -> Params {
        use Source::*;
        let mut p = Params {
            preset: Some(self.name()),
            ..Params::default()
        };
        let regularity_grid = [
            Axis { var: Var::A, from: 0.05, to: 3.0, steps: 60 },
            Axis { var: Var::B, from: 0.05, to: 3.0, steps: 60 },
        ];
        match self {
            Preset::Fig3 => {
                ic(&mut p, None, (20.0, 15.0));
                p.pairs = vec![[0.5, 0.5], [0.1, 0.1]];
                p.source.insert("pairs", Assumed);
            }
            Preset::Fig4a | Preset::Fig4b => {
                let db2 = if self == Preset::Fig4a { 20.0 } else { 30.0 };
                ic(&mut p, None, (20.0, db2));
                p.axes = regularity_grid.to_vec();
                p.source.insert("axes", Assumed);
            }
            Preset::Fig5a => ic(&mut p, Some((3.0, 5.0)), (20.0, 20.0)),
            Preset::Fig5b => ic(&mut p, Some((0.1, 3.0)), (20.0, 20.0)),
            Preset::Fig5c => ic(&mut p, Some((0.2, 0.5)), (20.0, 20.0)),
            Preset::Fig6 => {
                ic(&mut p, None, (20.0, 20.0));
                put(&mut p, "a", 1.5, Caption);
                p.axes = vec![Axis { var: Var::B, from: 0.0, to: 3.0, steps: 61 }];
                p.source.insert("axes", Text);
            }
            Preset::Fig7 => {
                ic(&mut p, Some((0.2, 1.2)), (10.0, 20.0));
                p.pairs = vec![[0.5, 0.5], [0.1, 0.5], [0.1, 0.1]];
                p.source.insert("pairs", Text);
            }
            Preset::Fig8 => {
                ic(&mut p, Some((0.2, 1.2)), (10.0, 20.0));
                put(&mut p, "p2", 0.5, Caption);
                p.axes = vec![Axis { var: Var::P1, from: 0.1, to: 0.9, steps: 9 }];
                p.source.insert("axes", Assumed);
            }
            Preset::Fig9 => {
                ic(&mut p, Some((0.2, 1.2)), (20.0, 30.0));
                put(&mut p, "p1", 0.5, Caption);
                put(&mut p, "p2", 0.5, Caption);
            }
            Preset::Fig10 => {
                p.theta = Some([1.0, 1.2, 0.8]);
                p.source.insert("theta", Caption);
            }
        }
        p
    }
}

fn put(p: &mut Params, key: &'static str, v: f64, src: Source) {
    match key {
        "a" => p.a = Some(v),
        "b" => p.b = Some(v),
        "snr1_db" => p.snr1_db = Some(v),
        "snr2_db" => p.snr2_db = Some(v),
        "p1" => p.p1 = Some(v),
        "p2" => p.p2 = Some(v),
        _ => unreachable!("unknown parameter {key}"),
    }
    p.source.insert(key, src);
}

/// Channel values quoted in a caption.
fn ic(p: &mut Params, gains: Option<(f64, f64)>, db: (f64, f64)) {
    if let Some((a, b)) = gains {
        put(p, "a", a, Source::Caption);
        put(p, "b", b, Source::Caption);
    }
    put(p, "snr1_db", db.0, Source::Caption);
    put(p, "snr2_db", db.1, Source::Caption);
}
