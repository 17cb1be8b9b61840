//! `icbargain`: rate regions, Nash bargaining and alternating-offer
//! equilibria for two selfish users of a Gaussian interference channel.

mod output;
mod params;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use icbargain::aobg::Player;

use output::{csv, destination, emit, pretty};
use params::{Axis, Params, Preset, Var};
use run::{Failure, Playout, SchemeArg, StrategyArg};

const ABOUT: &str = "Coordination and bargaining over the two-user Gaussian interference channel.

All rates are in bits per real channel use, C(x) = 1/2 log2(1 + x). Direct
gains and noise powers are normalized to one; a and b are the cross-link
power gains into receivers 1 and 2. Powers given in dB are converted with
P = 10^(dB/10).

Exit status: 0 on success, 1 when the computation is refused (a JSON error
naming the failed condition is printed), 2 on invalid usage.";

#[derive(Parser, Debug)]
#[command(name = "icbargain", version, about = ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regime, pre-bargaining outcome and regularity of a channel.
    Classify {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Achievable rate region and disagreement point.
    Region {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, value_enum, default_value = "hk")]
        scheme: SchemeArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Nash bargaining solution; requires the users to agree in phase 1.
    Nbs {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, value_enum, default_value = "hk")]
        scheme: SchemeArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Subgame perfect equilibrium of the alternating-offer game, with
    /// optional Monte-Carlo play-outs.
    Aobg {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        probs: ProbArgs,
        #[arg(long, value_enum, default_value = "hk")]
        scheme: SchemeArg,
        #[command(flatten)]
        play: PlayArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Bargaining over the two-user multiple-access channel.
    Mac {
        #[command(flatten)]
        power: PowerArgs,
        #[command(flatten)]
        probs: ProbArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Generalized degrees of freedom region, disagreement point and NBS.
    Gdof {
        #[arg(long, value_parser = positive)]
        theta1: Option<f64>,
        #[arg(long, value_parser = positive)]
        theta2: Option<f64>,
        #[arg(long, value_parser = positive)]
        theta3: Option<f64>,
        #[arg(long, value_enum, default_value = "hk")]
        scheme: SchemeArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate a one- or two-dimensional grid; one row per point.
    Sweep {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        probs: ProbArgs,
        #[command(flatten)]
        axes: AxisArgs,
        #[arg(long, value_enum, default_value = "hk")]
        scheme: SchemeArg,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct PowerArgs {
    /// Transmit SNR of user 1 in dB.
    #[arg(long = "snr1-db", allow_hyphen_values = true, value_parser = parse_f64, conflicts_with_all = ["snr1", "snr2"])]
    snr1_db: Option<f64>,
    /// Transmit SNR of user 2 in dB.
    #[arg(long = "snr2-db", allow_hyphen_values = true, value_parser = parse_f64, conflicts_with_all = ["snr1", "snr2"])]
    snr2_db: Option<f64>,
    /// Transmit SNR of user 1, linear.
    #[arg(long, value_parser = positive)]
    snr1: Option<f64>,
    /// Transmit SNR of user 2, linear.
    #[arg(long, value_parser = positive)]
    snr2: Option<f64>,
}

#[derive(Args, Debug)]
struct ChannelArgs {
    /// Cross-link power gain from user 2 into receiver 1.
    #[arg(long, value_parser = nonnegative)]
    a: Option<f64>,
    /// Cross-link power gain from user 1 into receiver 2.
    #[arg(long, value_parser = nonnegative)]
    b: Option<f64>,
    #[command(flatten)]
    power: PowerArgs,
}

#[derive(Args, Debug)]
struct ProbArgs {
    /// Breakdown probability after a rejected offer of user 1, in (0, 1).
    #[arg(long, value_parser = open_unit)]
    p1: Option<f64>,
    /// Breakdown probability after a rejected offer of user 2, in (0, 1).
    #[arg(long, value_parser = open_unit)]
    p2: Option<f64>,
}

#[derive(Args, Debug)]
struct PlayArgs {
    /// Number of seeded play-outs per probability pair (0 disables them).
    #[arg(long, default_value_t = 0)]
    trials: u64,
    /// Seed of the first play-out; play-out k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2), default_value_t = 1)]
    first_mover: u8,
    #[arg(long, value_enum, default_value = "equilibrium")]
    strategy1: StrategyArg,
    #[arg(long, value_enum, default_value = "equilibrium")]
    strategy2: StrategyArg,
    /// Include every event of every play-out.
    #[arg(long)]
    traces: bool,
}

#[derive(Args, Debug)]
struct AxisArgs {
    /// Swept variable.
    #[arg(long, value_enum, requires_all = ["from", "to", "steps"])]
    var: Option<Var>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_f64)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_f64)]
    to: Option<f64>,
    /// Grid points, endpoints included (at least 2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    steps: Option<u64>,
    /// Optional second swept variable; rows run over it fastest.
    #[arg(long, value_enum, requires_all = ["var", "from2", "to2", "steps2"])]
    var2: Option<Var>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_f64)]
    from2: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_f64)]
    to2: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    steps2: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Load the parameters of a figure; flags may add values the figure
    /// leaves open but not replace the ones it fixes.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Output format (csv is available for sweeps only; sweeps default to csv).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; defaults to standard output, or to a file in the
    /// default output directory when that is set.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Default output directory.
    #[arg(long, env = "ICBARGAIN_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|e| e.to_string())
        .and_then(|x| if x.is_finite() { Ok(x) } else { Err("must be finite".into()) })
}

fn positive(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x > 0.0 { Ok(x) } else { Err("must be > 0".into()) })
}

fn nonnegative(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x >= 0.0 { Ok(x) } else { Err("must be >= 0".into()) })
}

fn open_unit(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| {
        if x > 0.0 && x < 1.0 {
            Ok(x)
        } else {
            Err("must lie strictly between 0 and 1".into())
        }
    })
}

fn base(preset: Option<Preset>) -> Params {
    preset.map(Preset::params).unwrap_or_default()
}

fn apply_power(p: &mut Params, w: &PowerArgs) -> Result<(), Failure> {
    p.set("snr1_db", w.snr1_db)?;
    p.set("snr2_db", w.snr2_db)?;
    p.set("snr1", w.snr1)?;
    p.set("snr2", w.snr2)
}

fn apply_channel(p: &mut Params, c: &ChannelArgs) -> Result<(), Failure> {
    p.set("a", c.a)?;
    p.set("b", c.b)?;
    apply_power(p, &c.power)
}

fn apply_probs(p: &mut Params, q: &ProbArgs) -> Result<(), Failure> {
    p.set("p1", q.p1)?;
    p.set("p2", q.p2)
}

fn apply_axes(p: &mut Params, a: &AxisArgs) -> Result<(), Failure> {
    let Some(var) = a.var else { return Ok(()) };
    if let Some(name) = p.preset.filter(|_| !p.axes.is_empty()) {
        return Err(Failure::Usage(
            clap::error::ErrorKind::ArgumentConflict,
            format!("preset {name} already defines the sweep grid"),
        ));
    }
    let axis = |var, from: Option<f64>, to: Option<f64>, steps: Option<u64>| Axis {
        var,
        from: from.expect("required by clap"),
        to: to.expect("required by clap"),
        steps: steps.expect("required by clap") as usize,
    };
    p.axes = vec![axis(var, a.from, a.to, a.steps)];
    if let Some(var2) = a.var2 {
        p.axes.push(axis(var2, a.from2, a.to2, a.steps2));
    }
    p.source.insert("axes", params::Source::Flag);
    Ok(())
}

struct Artifact {
    command: &'static str,
    body: String,
    ext: &'static str,
}

fn json_only(out: &OutArgs) -> Result<(), Failure> {
    if out.format == Some(Format::Csv) {
        return Err(Failure::Usage(
            clap::error::ErrorKind::InvalidValue,
            "--format csv is only available for sweep".into(),
        ));
    }
    Ok(())
}

fn execute(cmd: &Command) -> Result<Artifact, Failure> {
    let json = |command, v: serde_json::Value| Artifact {
        command,
        body: pretty(&v),
        ext: "json",
    };
    match cmd {
        Command::Classify { channel, out } => {
            json_only(out)?;
            let mut p = base(out.preset);
            apply_channel(&mut p, channel)?;
            Ok(json("classify", run::classify(&p)?))
        }
        Command::Region { channel, scheme, out } => {
            json_only(out)?;
            let mut p = base(out.preset);
            apply_channel(&mut p, channel)?;
            Ok(json("region", run::region(&p, *scheme)?))
        }
        Command::Nbs { channel, scheme, out } => {
            json_only(out)?;
            let mut p = base(out.preset);
            apply_channel(&mut p, channel)?;
            Ok(json("nbs", run::nbs_cmd(&p, *scheme)?))
        }
        Command::Aobg { channel, probs, scheme, play, out } => {
            json_only(out)?;
            let mut p = base(out.preset);
            apply_channel(&mut p, channel)?;
            apply_probs(&mut p, probs)?;
            let playout = Playout {
                trials: play.trials,
                seed: play.seed,
                first_mover: if play.first_mover == 1 { Player::One } else { Player::Two },
                strategies: [play.strategy1, play.strategy2],
                traces: play.traces,
            };
            Ok(json("aobg", run::aobg(&p, *scheme, &playout)?))
        }
        Command::Mac { power, probs, out } => {
            json_only(out)?;
            let mut p = base(out.preset);
            apply_power(&mut p, power)?;
            apply_probs(&mut p, probs)?;
            Ok(json("mac", run::mac(&p)?))
        }
        Command::Gdof { theta1, theta2, theta3, scheme, out } => {
            json_only(out)?;
            let mut p = base(out.preset);
            let given = [*theta1, *theta2, *theta3];
            if given.iter().any(Option::is_some) {
                if p.theta.is_some() {
                    return Err(Failure::Usage(
                        clap::error::ErrorKind::ArgumentConflict,
                        "the preset already sets theta".into(),
                    ));
                }
                let [Some(t1), Some(t2), Some(t3)] = given else {
                    return Err(Failure::Usage(
                        clap::error::ErrorKind::MissingRequiredArgument,
                        "--theta1, --theta2 and --theta3 go together".into(),
                    ));
                };
                p.theta = Some([t1, t2, t3]);
                p.source.insert("theta", params::Source::Flag);
            }
            Ok(json("gdof", run::gdof(&p, *scheme)?))
        }
        Command::Sweep { channel, probs, axes, scheme, out } => {
            let mut p = base(out.preset);
            apply_channel(&mut p, channel)?;
            apply_probs(&mut p, probs)?;
            apply_axes(&mut p, axes)?;
            let table = run::sweep(&p, *scheme)?;
            Ok(match out.format.unwrap_or(Format::Csv) {
                Format::Csv => Artifact {
                    command: "sweep",
                    body: csv(&table.columns, &table.rows),
                    ext: "csv",
                },
                Format::Json => {
                    let mut v = table.meta;
                    v["columns"] = serde_json::json!(table.columns);
                    v["rows"] = serde_json::json!(table.rows);
                    json("sweep", v)
                }
            })
        }
    }
}

fn out_args(cmd: &Command) -> &OutArgs {
    match cmd {
        Command::Classify { out, .. }
        | Command::Region { out, .. }
        | Command::Nbs { out, .. }
        | Command::Aobg { out, .. }
        | Command::Mac { out, .. }
        | Command::Gdof { out, .. }
        | Command::Sweep { out, .. } => out,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = out_args(&cli.command);
    match execute(&cli.command) {
        Ok(art) => {
            if let Some(pr) = out.preset.filter(|pr| pr.command() != art.command) {
                eprintln!("note: the data of {} comes from `icbargain {}`", pr.name(), pr.command());
            }
            let stem = out.preset.map_or(art.command, Preset::name);
            let target = destination(out.output.as_deref(), out.out_dir.as_deref(), stem, art.ext);
            match emit(target.as_deref(), &art.body) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(Failure::Usage(kind, msg)) => Cli::command().error(kind, msg).exit(),
        Err(Failure::Refused(body)) => {
            let msg = body["error"]["message"].as_str().unwrap_or("refused").to_string();
            print!("{}", pretty(&body));
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
