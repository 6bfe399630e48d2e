use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use halving_core::chbuild::{build_instance, build_instance_3block, CHInstance, Variant};
use halving_core::chsolve::{
    decode, find_plan, roundtrip, synthesize, verify, Solution, SynthesisPlan,
};
use halving_core::circuit::build_lambda_hat;
use halving_core::numeric::Rational;
use halving_core::snake::{pipeline_to_width8, Pipeline};
use halving_core::tucker::{check_antipodality, random_tucker2d, StrongTuckerInstance, Tucker2D};
use halving_core::Error;

const EXIT_VERIFY: u8 = 2;
const EXIT_FORMAT: u8 = 3;
const EXIT_RANGE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "halving",
    version,
    about = "2D-Tucker → StrongTucker → ε-consensus-halving workbench"
)]
struct Cli {
    /// Print a JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tucker instance generation.
    #[command(subcommand)]
    Tucker(TuckerCmd),
    /// Fold a 2D Tucker instance down to an all-width-8 StrongTucker instance.
    Fold {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the replayable fold pipeline.
        #[arg(long)]
        pipeline: Option<PathBuf>,
    },
    /// Consensus-halving instances: build, verify, synthesize, decode.
    #[command(subcommand)]
    Ch(ChCmd),
    /// Summarize any file produced by this tool.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum TuckerCmd {
    /// Random antipodal 2D Tucker instance on [m]².
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct BuildArgs {
    /// StrongTucker instance on [8]^N used as λ.
    #[arg(long)]
    lambda: PathBuf,
    #[arg(long, default_value = "199/1000")]
    epsilon: String,
    #[arg(long, default_value = "standard")]
    variant: String,
}

#[derive(Subcommand)]
enum ChCmd {
    /// Compile λ into a CH instance.
    Build {
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact discrepancy check of a cut set.
    Verify {
        #[arg(long)]
        inst: PathBuf,
        #[arg(long)]
        cuts: PathBuf,
    },
    /// Construct a cut set from a decoded point pair.
    Synth {
        #[arg(long)]
        inst: PathBuf,
        /// Plan file {"a", "b", "k0"}; found from --lambda when omitted.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read G, φ and a StrongTucker solution off a cut set.
    Decode {
        #[arg(long)]
        inst: PathBuf,
        #[arg(long)]
        cuts: PathBuf,
    },
    /// Build, synthesize, verify and decode in one go.
    Roundtrip {
        #[command(flatten)]
        build: BuildArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Json(_)
            | Error::Io(_)
            | Error::Format(_)
            | Error::ParseRational(_)
            | Error::Shape { .. }
            | Error::NotAntipodal(_)
            | Error::Density(_)
            | Error::UnsortedCuts
            | Error::CutOutOfRange(_) => EXIT_FORMAT,
            Error::EpsilonOutOfRange(_)
            | Error::Grid(_)
            | Error::TooLarge(_)
            | Error::Layout(_)
            | Error::ParityViolation { .. } => EXIT_RANGE,
            _ => EXIT_VERIFY,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_FORMAT, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| fail(EXIT_FORMAT, format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| fail(EXIT_FORMAT, format!("{}: {e}", path.display())))
}

fn emit(json_mode: bool, report: Value, text: String) {
    if json_mode {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        println!("{text}");
    }
}

fn parse_epsilon(s: &str) -> Result<Rational, Failure> {
    s.parse::<Rational>()
        .map_err(|_| fail(EXIT_FORMAT, format!("invalid epsilon {s:?}, expected p/q")))
}

fn parse_variant(s: &str) -> Result<Variant, Failure> {
    s.parse::<Variant>().map_err(|_| {
        fail(
            EXIT_RANGE,
            format!("unknown variant {s:?}: use standard or 3block"),
        )
    })
}

fn read_lambda(path: &Path) -> Result<StrongTuckerInstance, Failure> {
    let inst: StrongTuckerInstance = read_json(path)?;
    if inst.dims().iter().any(|&m| m != 8) {
        return Err(fail(
            EXIT_RANGE,
            format!("λ must live on [8]^N, got dimensions {:?}", inst.dims()),
        ));
    }
    Ok(inst)
}

fn build(args: &BuildArgs) -> Result<CHInstance, Failure> {
    let epsilon = parse_epsilon(&args.epsilon)?;
    let variant = parse_variant(&args.variant)?;
    let lambda = read_lambda(&args.lambda)?;
    let circuit = build_lambda_hat(&lambda.label_table())?;
    Ok(match variant {
        Variant::Standard => build_instance(&circuit, &epsilon)?,
        Variant::ThreeBlock => build_instance_3block(&circuit, &epsilon)?,
    })
}

fn cmd_tucker_gen(m: usize, seed: u64, out: &Path, json_mode: bool) -> CmdResult {
    if m % 2 != 0 || !(4..=64).contains(&m) {
        return Err(fail(
            EXIT_RANGE,
            format!("m = {m}: must be even and in 4..=64"),
        ));
    }
    let t = random_tucker2d(m, seed)?;
    write_json(out, &t)?;
    emit(
        json_mode,
        json!({"m": m, "seed": seed, "out": out}),
        format!(
            "wrote antipodal Tucker instance m={m} seed={seed} to {}",
            out.display()
        ),
    );
    Ok(())
}

fn cmd_fold(input: &Path, out: &Path, pipeline_out: Option<&Path>, json_mode: bool) -> CmdResult {
    let raw: Tucker2D = read_json(input)?;
    let t = Tucker2D::new(raw.m, raw.labels)?;
    if !t.is_antipodal() {
        return Err(fail(EXIT_FORMAT, "input labelling is not antipodal"));
    }
    let (fin, pipeline) = pipeline_to_width8(&t)?;
    write_json(out, &fin)?;
    if let Some(p) = pipeline_out {
        write_json(p, &pipeline)?;
    }
    emit(
        json_mode,
        json!({"dims": fin.dims(), "stages": pipeline.records.len()}),
        format!(
            "folded m={} into dims {:?} in {} stages",
            t.m,
            fin.dims(),
            pipeline.records.len()
        ),
    );
    Ok(())
}

fn cmd_build(args: &BuildArgs, out: &Path, json_mode: bool) -> CmdResult {
    let inst = build(args)?;
    write_json(out, &inst)?;
    let l = &inst.layout;
    emit(
        json_mode,
        json!({"variant": inst.variant, "N": l.n, "m": l.m, "K": l.copies, "L": l.length(), "agents": inst.num_agents()}),
        format!(
            "built {} instance: N={} m={} K={} L={} agents={}",
            inst.variant,
            l.n,
            l.m,
            l.copies,
            l.length(),
            inst.num_agents()
        ),
    );
    Ok(())
}

fn cmd_verify(inst: &Path, cuts: &Path, json_mode: bool) -> CmdResult {
    let inst: CHInstance = read_json(inst)?;
    let sol: Solution = read_json(cuts)?;
    let report = verify(&inst, &sol.to_cuts(&inst)?)?;
    let mut text = format!(
        "{}: {} cuts for {} agents, max discrepancy {} (ε = {})",
        if report.ok { "PASS" } else { "FAIL" },
        report.num_cuts,
        report.num_agents,
        report.max_discrepancy,
        report.epsilon
    );
    for &a in &report.violations {
        text.push_str(&format!(
            "\n  agent {} ({}): {}",
            a + 1,
            inst.agents[a].label(),
            report.discrepancies[a]
        ));
    }
    let ok = report.ok;
    emit(
        json_mode,
        json!({
            "ok": ok,
            "num_cuts": report.num_cuts,
            "num_agents": report.num_agents,
            "epsilon": report.epsilon,
            "max_discrepancy": report.max_discrepancy,
            "violations": report.violations.iter().map(|&a| json!({
                "agent": a + 1,
                "label": inst.agents[a].label(),
                "discrepancy": report.discrepancies[a],
            })).collect::<Vec<_>>(),
        }),
        text,
    );
    if ok {
        Ok(())
    } else {
        Err(fail(EXIT_VERIFY, "verification failed"))
    }
}

fn cmd_synth(
    inst: &Path,
    plan: Option<&Path>,
    lambda: Option<&Path>,
    out: Option<&Path>,
    json_mode: bool,
) -> CmdResult {
    let inst: CHInstance = read_json(inst)?;
    let plan: SynthesisPlan = match (plan, lambda) {
        (Some(p), _) => read_json(p)?,
        (None, Some(l)) => find_plan(&read_lambda(l)?.label_table(), &inst.layout)?,
        (None, None) => return Err(fail(EXIT_RANGE, "either --plan or --lambda is required")),
    };
    let cuts = synthesize(&inst, &plan)?;
    let sol = Solution::from_cuts(&cuts);
    match out {
        Some(path) => {
            write_json(path, &sol)?;
            emit(
                json_mode,
                json!({"cuts": cuts.len(), "plan": plan, "out": path}),
                format!(
                    "wrote {} cuts for plan a={:?} b={:?} to {}",
                    cuts.len(),
                    plan.a,
                    plan.b,
                    path.display()
                ),
            );
        }
        None => println!(
            "{}",
            serde_json::to_string_pretty(&sol).map_err(Error::from)?
        ),
    }
    Ok(())
}

fn cmd_decode(inst: &Path, cuts: &Path, json_mode: bool) -> CmdResult {
    let inst: CHInstance = read_json(inst)?;
    let sol: Solution = read_json(cuts)?;
    let d = decode(&inst, &sol.to_cuts(&inst)?)?;
    let text = format!(
        "good copies: {}/{}\ninput-region cuts: {}\npairwise |Δφ|∞ ≤ 1: {}\nsolution: {:?}",
        d.good.len(),
        inst.layout.copies,
        d.input_cuts,
        d.phi_close,
        d.solution.points
    );
    emit(
        json_mode,
        json!({
            "good": d.good.iter().map(|k| k + 1).collect::<Vec<_>>(),
            "input_cuts": d.input_cuts,
            "phi_close": d.phi_close,
            "solution": d.solution,
        }),
        text,
    );
    Ok(())
}

fn cmd_roundtrip(args: &BuildArgs, json_mode: bool) -> CmdResult {
    let epsilon = parse_epsilon(&args.epsilon)?;
    let variant = parse_variant(&args.variant)?;
    let lambda = read_lambda(&args.lambda)?;
    let r = roundtrip(&lambda.label_table(), variant, &epsilon)?;
    let ok = r.verification.ok && r.solution_valid && r.decode.phi_close;
    let text = format!(
        "variant: {}\nagents: {} (m = {})\nplan: a={:?} b={:?}\nverify: {} (max discrepancy {})\ngood copies: {}\nsolution: {:?} ({})",
        r.variant,
        r.num_agents,
        r.gates,
        r.plan.a,
        r.plan.b,
        if r.verification.ok { "pass" } else { "fail" },
        r.verification.max_discrepancy,
        r.decode.good.len(),
        r.decode.solution.points,
        if r.solution_valid { "valid" } else { "INVALID" }
    );
    emit(
        json_mode,
        json!({
            "ok": ok,
            "variant": r.variant,
            "agents": r.num_agents,
            "gates": r.gates,
            "plan": r.plan,
            "max_discrepancy": r.verification.max_discrepancy,
            "good": r.decode.good.len(),
            "solution": r.decode.solution,
            "solution_valid": r.solution_valid,
        }),
        text,
    );
    if ok {
        Ok(())
    } else {
        Err(fail(EXIT_VERIFY, "roundtrip failed"))
    }
}

fn cmd_report(input: &Path, json_mode: bool) -> CmdResult {
    let value: Value = read_json(input)?;
    let (kind, summary): (&str, Value) = if value.get("agents").is_some() {
        let inst: CHInstance = serde_json::from_value(value).map_err(Error::from)?;
        let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
        for a in &inst.agents {
            *kinds
                .entry(a.label().split(' ').next().unwrap_or_default().to_string())
                .or_default() += 1;
        }
        let l = &inst.layout;
        (
            "ch_instance",
            json!({
                "variant": inst.variant, "epsilon": inst.epsilon, "N": l.n, "m": l.m, "K": l.copies,
                "L": l.length(), "agents": inst.num_agents(), "by_kind": kinds,
            }),
        )
    } else if value.get("cuts").is_some() {
        let sol: Solution = serde_json::from_value(value).map_err(Error::from)?;
        ("solution", json!({"cuts": sol.cuts.len()}))
    } else if value.get("dims").is_some() {
        let inst: StrongTuckerInstance = serde_json::from_value(value).map_err(Error::from)?;
        let (antipodal, witness) = check_antipodality(&inst);
        (
            "strong_tucker",
            json!({"dims": inst.dims(), "antipodal": antipodal, "witness": witness}),
        )
    } else if value.get("m").is_some() {
        let raw: Tucker2D = serde_json::from_value(value).map_err(Error::from)?;
        let t = Tucker2D::new(raw.m, raw.labels)?;
        (
            "tucker2d",
            json!({"m": t.m, "antipodal": t.is_antipodal(), "solutions": t.solutions().len()}),
        )
    } else if value.is_array() {
        let p: Pipeline = serde_json::from_value(value).map_err(Error::from)?;
        ("pipeline", json!({"stages": p.records.len()}))
    } else {
        return Err(fail(EXIT_FORMAT, "unrecognized file"));
    };
    let mut text = format!("{kind}:");
    if let Value::Object(map) = &summary {
        for (k, v) in map {
            text.push_str(&format!("\n  {k}: {v}"));
        }
    }
    emit(json_mode, json!({"kind": kind, "summary": summary}), text);
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let j = cli.json;
    match cli.command {
        Command::Tucker(TuckerCmd::Gen { m, seed, out }) => cmd_tucker_gen(m, seed, &out, j),
        Command::Fold {
            input,
            out,
            pipeline,
        } => cmd_fold(&input, &out, pipeline.as_deref(), j),
        Command::Ch(ChCmd::Build { build, out }) => cmd_build(&build, &out, j),
        Command::Ch(ChCmd::Verify { inst, cuts }) => cmd_verify(&inst, &cuts, j),
        Command::Ch(ChCmd::Synth {
            inst,
            plan,
            lambda,
            out,
        }) => cmd_synth(&inst, plan.as_deref(), lambda.as_deref(), out.as_deref(), j),
        Command::Ch(ChCmd::Decode { inst, cuts }) => cmd_decode(&inst, &cuts, j),
        Command::Ch(ChCmd::Roundtrip { build }) => cmd_roundtrip(&build, j),
        Command::Report { input } => cmd_report(&input, j),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_RANGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
