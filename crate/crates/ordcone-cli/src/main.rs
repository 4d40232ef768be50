//! Command-line driver: parse a run configuration, dispatch to the library,
//! and emit a deterministic JSON report (or a plain JSON value for query
//! commands). Human-readable summaries go to stderr; stdout carries only the
//! machine-readable output.
//!
//! Exit codes: 0 = no refuted claim, 1 = at least one refutation,
//! 2 = usage or precondition error.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use ordcone::construct::{
    build_chain, build_ertorema, build_laleche, extend_component, residue_coverage,
};
use ordcone::intcone::{intersect_scale, IntegerCone, LayeredCone};
use ordcone::intervals::{Element, Interval};
use ordcone::ratcone::{check_covers, check_not_multiple, new_block, parse_rational, Block};
use ordcone::report::{Record, Report, Verdict};
use ordcone::supernat::Supernatural;
use ordcone::verify::{run_all, Fault};
use ordcone::RunBounds;

#[derive(Parser)]
#[command(
    name = "ordcone",
    version,
    about = "Exact construction and verification of ordered-cone structures"
)]
struct Cli {
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for every sampled quantity in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Prefix length for claims quantified over all levels.
    #[arg(long, global = true, default_value_t = 10)]
    level_bound: u32,

    /// Upper end of residue-coverage sweeps.
    #[arg(long, global = true, default_value_t = 1000)]
    sweep_bound: u64,

    /// Number of pseudo-random samples where sampling applies.
    #[arg(long, global = true, default_value_t = 100)]
    sample_count: usize,

    /// Cap on enumeration work for a single decision.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    work_limit: u64,

    /// Read the run configuration from a JSON file instead of flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Arithmetic on supernatural numbers (generalized integers).
    Supernatural {
        /// First operand, e.g. "2^inf*3^2*5".
        #[arg(long)]
        a: String,
        /// Second operand where the operation needs one.
        #[arg(long)]
        b: Option<String>,
        #[command(subcommand)]
        op: SupernaturalOp,
    },
    /// Finitely generated submonoids of the non-negative integers.
    Semigroup {
        /// Generators, e.g. --gens 2,7.
        #[arg(long, value_delimiter = ',')]
        gens: Option<Vec<u64>>,
        #[command(subcommand)]
        op: SemigroupOp,
    },
    /// Block monoids M over the data (q, p, s, r).
    Block {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        r: u64,
        #[command(subcommand)]
        op: BlockOp,
    },
    /// The interval D = <e_n> of a block (optionally scaled).
    Interval {
        /// Block data "q,p,s,r".
        #[arg(long)]
        block: String,
        /// Interval kind; only "D" is defined.
        #[arg(long, default_value = "D")]
        kind: String,
        /// Examine t·D instead of D.
        #[arg(long, default_value_t = 1)]
        scale: u64,
        #[command(subcommand)]
        op: IntervalOp,
    },
    /// Extend a simple component: G = a·H + p<c,d> with its gap certificate.
    Gaps {
        #[arg(long)]
        a: u64,
        /// The component H, e.g. "<2,5>" or a layered literal.
        #[arg(long = "H")]
        h: String,
    },
    /// The chain of extensions with diverging states.
    Chain {
        #[arg(long = "H1")]
        h1: String,
        /// Ascending multiplier pool, e.g. --A 5,161,30000.
        #[arg(long = "A", value_delimiter = ',')]
        a_pool: Vec<u64>,
        /// Number of stages to materialize.
        #[arg(long)]
        depth: usize,
    },
    /// The tower of diagrams carrying one interval family per q.
    Ertorema {
        /// Pairwise relatively prime integers, e.g. --J 2,3,5.
        #[arg(long = "J", value_delimiter = ',')]
        j: Vec<u64>,
        #[arg(long)]
        diagrams: usize,
        #[arg(long)]
        size: usize,
        /// Override the first ladder parameter (default: minimal valid).
        #[arg(long)]
        p1: Option<u64>,
    },
    /// The combined grid: tower diagonal across, chain down.
    Laleche {
        /// The tower's relatively prime integers, e.g. --L 2,3.
        #[arg(long = "L", value_delimiter = ',')]
        l: Vec<u64>,
        /// Ascending chain pool coprime to every L entry, e.g. --J 5,161.
        #[arg(long = "J", value_delimiter = ',')]
        j: Vec<u64>,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        p1: Option<u64>,
    },
    /// Run the bundled verification suite.
    VerifyAll {
        /// Self-test: flip one membership answer and expect a refutation.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Subcommand)]
enum SupernaturalOp {
    /// Componentwise sum of exponents.
    Mul,
    /// Does a divide b?
    Divides,
    /// Are the supports disjoint?
    Coprime,
    /// Is the rational in the subgroup Z_a?
    Contains(ValueArg),
}

#[derive(Args)]
struct ValueArg {
    #[arg(long)]
    value: String,
}

#[derive(Subcommand)]
enum SemigroupOp {
    /// Minimal generators, conductor, and gap set.
    Analyze,
    /// Membership of a non-negative integer.
    Contains {
        #[arg(long)]
        value: u64,
    },
    /// The unique normalized state, evaluated exactly.
    State {
        #[arg(long)]
        u: u64,
        #[arg(long)]
        x: u64,
    },
    /// The cone of (1/L)(∩ cones) ∩ Z.
    IntersectScale {
        /// Cones separated by ';', e.g. --cones "<2,7>;<3,5>".
        #[arg(long)]
        cones: String,
        #[arg(long = "L", default_value_t = 1)]
        l: u64,
    },
}

#[derive(Subcommand)]
enum BlockOp {
    /// Membership of a rational in M, by both procedures.
    Member(ValueArg),
    /// e_n = (s/r)^n.
    E {
        #[arg(long)]
        n: u32,
    },
    /// Verify s ∉ t·D on the level prefix.
    NotMultiple {
        #[arg(long)]
        t: u64,
    },
    /// Find covering indices x ≤ r·e_k for every sample.
    Covers {
        /// Rationals separated by commas, e.g. --samples "2/3,5,7".
        #[arg(long)]
        samples: Option<String>,
        /// File with one rational per line.
        #[arg(long)]
        samples_file: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum IntervalOp {
    /// Least generator index whose state exceeds the threshold.
    Probe {
        #[arg(long)]
        threshold: String,
        /// Normalizing element of the ambient group.
        #[arg(long, default_value = "1")]
        u: String,
        #[arg(long, default_value_t = 32)]
        bound: usize,
    },
    /// Membership of a value up to a generator bound.
    Contains {
        #[arg(long)]
        value: String,
        #[arg(long)]
        bound: usize,
    },
    /// Softness probe over the generator prefix.
    Soft {
        #[arg(long)]
        bound: usize,
    },
}

enum Output {
    Query(Value),
    Report(Report),
}

fn main() {
    let code = match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn expand_config(path: &PathBuf) -> anyhow::Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).context("config is not valid JSON")?;
    let obj = value.as_object().ok_or_else(|| anyhow!("config must be a JSON object"))?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("config needs a \"command\" string"))?;
    let mut argv = vec!["ordcone".to_string()];
    let mut command_flags: Vec<(String, &Value)> = Vec::new();
    let mut op: Option<Vec<String>> = None;
    for (key, val) in obj {
        match key.as_str() {
            "command" => {}
            // Global knobs sit before the subcommand.
            "seed" | "level_bound" | "sweep_bound" | "sample_count" | "work_limit" => {
                argv.push(format!("--{}", key.replace('_', "-")));
                argv.push(scalar_to_arg(val)?);
            }
            "output" => {
                argv.push("--output".into());
                argv.push(scalar_to_arg(val)?);
            }
            // A nested operation: {"op": "not-multiple", "t": 2, ...}.
            "op" => {
                let op_obj = val
                    .as_object()
                    .ok_or_else(|| anyhow!("\"op\" must be an object with a \"name\""))?;
                let name = op_obj
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| anyhow!("\"op\" needs a \"name\" string"))?;
                let mut parts = vec![name.to_string()];
                for (k, v) in op_obj {
                    if k == "name" {
                        continue;
                    }
                    if v.as_bool() == Some(true) {
                        parts.push(format!("--{}", k.replace('_', "-")));
                    } else {
                        parts.push(format!("--{}", k.replace('_', "-")));
                        parts.push(scalar_to_arg(v)?);
                    }
                }
                op = Some(parts);
            }
            _ => command_flags.push((key.clone(), val)),
        }
    }
    argv.push(command.to_string());
    for (key, val) in command_flags {
        if val.as_bool() == Some(true) {
            argv.push(format!("--{key}"));
            continue;
        }
        argv.push(format!("--{key}"));
        argv.push(scalar_to_arg(val)?);
    }
    if let Some(parts) = op {
        argv.extend(parts);
    }
    Ok(argv)
}

fn scalar_to_arg(v: &Value) -> anyhow::Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        Value::Array(items) => {
            let parts: Vec<String> =
                items.iter().map(scalar_to_arg).collect::<anyhow::Result<_>>()?;
            Ok(parts.join(","))
        }
        other => Err(anyhow!("unsupported config value {other}")),
    }
}

fn run() -> anyhow::Result<i32> {
    let mut cli = Cli::parse();
    if let Some(path) = cli.config.clone() {
        let argv = expand_config(&path)?;
        let from_config = Cli::try_parse_from(argv).context("config file did not validate")?;
        cli.command = from_config.command;
        cli.seed = from_config.seed;
        cli.level_bound = from_config.level_bound;
        cli.sweep_bound = from_config.sweep_bound;
        cli.sample_count = from_config.sample_count;
        cli.work_limit = from_config.work_limit;
        if cli.output.is_none() {
            cli.output = from_config.output;
        }
    }
    let command = cli.command.take().ok_or_else(|| anyhow!("no command given; see --help"))?;
    let bounds = RunBounds {
        level_bound: cli.level_bound,
        sweep_bound: cli.sweep_bound,
        sample_count: cli.sample_count,
        work_limit: cli.work_limit,
    };

    let output = dispatch(&command, &bounds, cli.seed)?;
    let (text, code) = match output {
        Output::Query(value) => (serde_json::to_string_pretty(&value)?, 0),
        Output::Report(report) => {
            eprintln!(
                "{} proved, {} refuted, {} verified_to_bound -> exit {}",
                report.summary.proved,
                report.summary.refuted,
                report.summary.verified_to_bound,
                report.exit_code
            );
            let code = report.exit_code;
            (report.to_json(), code)
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(code)
}

fn parse_block_quad(spec: &str) -> anyhow::Result<(u64, u64, u64, u64)> {
    let parts: Vec<u64> = spec
        .split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow!("block data must be four integers \"q,p,s,r\", got {spec:?}"))?;
    if parts.len() != 4 {
        return Err(anyhow!("block data must be four integers \"q,p,s,r\", got {spec:?}"));
    }
    Ok((parts[0], parts[1], parts[2], parts[3]))
}

fn bounds_json(bounds: &RunBounds, seed: u64) -> Value {
    json!({
        "level_bound": bounds.level_bound,
        "sweep_bound": bounds.sweep_bound,
        "sample_count": bounds.sample_count,
        "work_limit": bounds.work_limit,
        "seed": seed,
    })
}

fn dispatch(command: &Command, bounds: &RunBounds, seed: u64) -> anyhow::Result<Output> {
    match command {
        Command::Supernatural { a, b, op } => {
            let a_val: Supernatural = a.parse()?;
            let need_b = || -> anyhow::Result<Supernatural> {
                Ok(b.as_deref()
                    .ok_or_else(|| anyhow!("this operation needs --b"))?
                    .parse::<Supernatural>()?)
            };
            let (name, result) = match op {
                SupernaturalOp::Mul => ("mul", json!(a_val.mul(&need_b()?).to_string())),
                SupernaturalOp::Divides => ("divides", json!(a_val.divides(&need_b()?))),
                SupernaturalOp::Coprime => ("coprime", json!(a_val.coprime(&need_b()?))),
                SupernaturalOp::Contains(v) => {
                    let x = parse_rational(&v.value)?;
                    ("contains", json!(a_val.subgroup_contains(&x)))
                }
            };
            Ok(Output::Query(json!({
                "op": name,
                "a": a_val.to_string(),
                "b": b,
                "result": result,
            })))
        }
        Command::Semigroup { gens, op } => {
            let cone = || -> anyhow::Result<IntegerCone> {
                Ok(IntegerCone::new(
                    gens.clone().ok_or_else(|| anyhow!("this operation needs --gens"))?,
                )?)
            };
            match op {
                SemigroupOp::Analyze => {
                    let profile = cone()?.analyze()?;
                    Ok(Output::Query(serde_json::to_value(&profile)?))
                }
                SemigroupOp::Contains { value } => {
                    let c = cone()?;
                    Ok(Output::Query(json!({
                        "cone": c.to_string(),
                        "value": value,
                        "result": c.contains(*value),
                    })))
                }
                SemigroupOp::State { u, x } => {
                    let c = cone()?;
                    Ok(Output::Query(json!({
                        "cone": c.to_string(),
                        "u": u,
                        "x": x,
                        "state": c.state(*u, *x)?.to_string(),
                    })))
                }
                SemigroupOp::IntersectScale { cones, l } => {
                    let parsed: Vec<IntegerCone> = cones
                        .split(';')
                        .map(|c| c.trim().parse::<IntegerCone>())
                        .collect::<ordcone::Result<_>>()?;
                    let result = intersect_scale(&parsed, *l)?;
                    Ok(Output::Query(json!({
                        "cone": result.to_string(),
                        "profile": serde_json::to_value(result.analyze()?)?,
                    })))
                }
            }
        }
        Command::Block { q, p, s, r, op } => {
            let block = new_block(*q, *p, *s, *r)?;
            let config = json!({
                "command": "block", "q": q, "p": p, "s": s, "r": r,
                "bounds": bounds_json(bounds, seed),
            });
            match op {
                BlockOp::Member(v) => {
                    let x = parse_rational(&v.value)?;
                    let direct = block.contains_direct(&x)?;
                    let ladder = block.contains_ladder(&x)?;
                    Ok(Output::Query(json!({
                        "block": block.params().to_string(),
                        "value": x.to_string(),
                        "direct": direct,
                        "ladder": ladder,
                        "result": direct && ladder,
                    })))
                }
                BlockOp::E { n } => Ok(Output::Query(json!({
                    "block": block.params().to_string(),
                    "n": n,
                    "e_n": block.e(*n).to_string(),
                }))),
                BlockOp::NotMultiple { t } => {
                    let verdict = check_not_multiple(&block, *t, bounds.level_bound)?;
                    let record = Record::new(
                        format!("block{}.not_multiple.t{t}", block.params()),
                        verdict,
                    );
                    Ok(Output::Report(Report::assemble(config, vec![record])))
                }
                BlockOp::Covers { samples, samples_file } => {
                    let mut raw = String::new();
                    if let Some(inline) = samples {
                        raw.push_str(inline);
                    }
                    if let Some(path) = samples_file {
                        let text = std::fs::read_to_string(path)
                            .with_context(|| format!("reading {}", path.display()))?;
                        for line in text.lines() {
                            if !line.trim().is_empty() {
                                if !raw.is_empty() {
                                    raw.push(',');
                                }
                                raw.push_str(line.trim());
                            }
                        }
                    }
                    if raw.is_empty() {
                        return Err(anyhow!("covers needs --samples or --samples-file"));
                    }
                    let parsed: Vec<BigRational> = raw
                        .split(',')
                        .map(|s| parse_rational(s.trim()))
                        .collect::<ordcone::Result<_>>()?;
                    let outcome = check_covers(&block, &parsed, bounds.level_bound.max(10))?;
                    let witnesses: Vec<Value> = outcome
                        .witnesses
                        .iter()
                        .map(|(x, k)| json!({"sample": x.to_string(), "k": k}))
                        .collect();
                    let record = Record::new(
                        format!("block{}.covers", block.params()),
                        outcome.verdict,
                    );
                    Ok(Output::Report(
                        Report::assemble(config, vec![record])
                            .with_meta(json!({ "witnesses": witnesses })),
                    ))
                }
            }
        }
        Command::Interval { block, kind, scale, op } => {
            if kind != "D" {
                return Err(anyhow!("only the interval kind \"D\" is defined"));
            }
            let (q, p, s, r) = parse_block_quad(block)?;
            let blk: Arc<Block> = Arc::new(new_block(q, p, s, r)?);
            let mut interval = Interval::block_powers(blk.clone());
            if *scale > 1 {
                interval = interval.scale(*scale)?;
            }
            let config = json!({
                "command": "interval", "block": block, "kind": kind, "scale": scale,
                "bounds": bounds_json(bounds, seed),
            });
            let label = format!(
                "interval{}{}",
                blk.params(),
                if *scale > 1 { format!(".scaled{scale}") } else { String::new() }
            );
            let record = match op {
                IntervalOp::Probe { threshold, u, bound } => {
                    let verdict = interval.state_sup_probe(
                        &Element::rational(parse_rational(u)?),
                        &parse_rational(threshold)?,
                        *bound,
                    )?;
                    Record::new(format!("{label}.probe.threshold{threshold}"), verdict)
                }
                IntervalOp::Contains { value, bound } => {
                    let verdict = interval
                        .contains_up_to(&Element::rational(parse_rational(value)?), *bound)?;
                    Record::new(format!("{label}.contains.{value}"), verdict)
                }
                IntervalOp::Soft { bound } => {
                    Record::new(format!("{label}.soft"), interval.is_soft(*bound)?)
                }
            };
            Ok(Output::Report(Report::assemble(config, vec![record])))
        }
        Command::Gaps { a, h } => {
            let h_cone: LayeredCone = h.parse()?;
            let ext = extend_component(&h_cone, &(*a).into(), bounds)?;
            let config = json!({
                "command": "gaps", "a": a, "H": h,
                "bounds": bounds_json(bounds, seed),
            });
            let records = vec![
                Record::new("gaps.embedding", embedding_verdict(&ext.embedding, *a)),
                Record::new("gaps.l_disjoint", ext.gap_disjoint.clone()),
                Record::new("gaps.conductor_window", ext.conductor_window.clone()),
                Record::new(
                    format!("gaps.residue_coverage.to{}", bounds.sweep_bound),
                    residue_coverage(&ext, bounds.sweep_bound),
                ),
            ];
            let meta = json!({
                "extension": ext.cone.to_string(),
                "pcd": {
                    "p": ext.pcd.p.to_string(),
                    "c": ext.pcd.c.to_string(),
                    "d": ext.pcd.d.to_string(),
                },
                "L": ext.gaps.values(64).iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "conductor": ext.gaps.n_g.to_string(),
            });
            Ok(Output::Report(Report::assemble(config, records).with_meta(meta)))
        }
        Command::Chain { h1, a_pool, depth } => {
            let h1_cone: IntegerCone = h1.parse()?;
            let config = json!({
                "command": "chain", "H1": h1, "A": a_pool, "depth": depth,
                "bounds": bounds_json(bounds, seed),
            });
            let outcome = build_chain(&h1_cone, a_pool, *depth, bounds)?;
            let meta = outcome.meta();
            Ok(Output::Report(Report::assemble(config, outcome.records).with_meta(meta)))
        }
        Command::Ertorema { j, diagrams, size, p1 } => {
            let config = json!({
                "command": "ertorema", "J": j, "diagrams": diagrams, "size": size, "p1": p1,
                "bounds": bounds_json(bounds, seed),
            });
            let outcome = build_ertorema(j, *diagrams, *size, *p1, seed, bounds)?;
            let meta = outcome.meta.clone();
            Ok(Output::Report(Report::assemble(config, outcome.records).with_meta(meta)))
        }
        Command::Laleche { l, j, size, p1 } => {
            let config = json!({
                "command": "laleche", "L": l, "J": j, "size": size, "p1": p1,
                "bounds": bounds_json(bounds, seed),
            });
            let outcome = build_laleche(l, j, *size, *p1, seed, bounds)?;
            let meta = outcome.meta.clone();
            Ok(Output::Report(Report::assemble(config, outcome.records).with_meta(meta)))
        }
        Command::VerifyAll { inject_fault } => {
            let config = json!({
                "command": "verify-all",
                "inject_fault": inject_fault,
                "bounds": bounds_json(bounds, seed),
            });
            let fault = inject_fault.then_some(Fault::FlipMembership);
            let records = run_all(bounds, seed, fault)?;
            Ok(Output::Report(Report::assemble(config, records)))
        }
    }
}

fn embedding_verdict(decision: &ordcone::embed::EmbeddingDecision, multiplier: u64) -> Verdict {
    use ordcone::embed::EmbeddingDecision::*;
    match decision {
        Proved { method } => {
            Verdict::proved(format!("x{multiplier} is an order-embedding ({method})"))
        }
        Refuted { witness } => Verdict::refuted(
            witness.to_string(),
            format!("x{multiplier} is not an order-embedding"),
        ),
        CheckedToBound { bound } => {
            Verdict::to_bound(*bound, "agreement on the scanned prefix only".to_string())
        }
    }
}
