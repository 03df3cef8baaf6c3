use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use metacyclic::{
    count, enumerate, enumerate_parallel, theorem_accepts, verify_equivalence, verify_sampled,
    Element, EndoSpec, EquivalenceReport, Error, GroupContext, OracleBudget, Presentation,
    RawElement, RawQuad,
};
use serde_json::{json, Value};

const SCHEMA: &str = "1";
const SAMPLE_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(name = "metacyclic", version, about = "Automorphisms of metacyclic groups H(n,m;t,r)")]
struct Cli {
    /// Presentation as n,m,t,r.
    #[arg(long, global = true, value_name = "N,M,T,R")]
    pres: Option<String>,

    /// Quadruple x1,y1,x2,y2 for check-quadruple.
    #[arg(long, global = true, value_name = "X1,Y1,X2,Y2")]
    quad: Option<String>,

    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,

    /// Most quadruples a full brute-force scan may visit.
    #[arg(long, global = true, value_name = "N")]
    oracle_budget: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Plain,
}

#[derive(Subcommand)]
enum Command {
    /// Check r^m = 1 and t(r-1) = 0 (mod n).
    Validate,
    /// Rewrite to an equivalent presentation with t | n.
    Normalize,
    /// Prime profile and derived invariants.
    Profile,
    /// Order of the automorphism group.
    Count,
    /// Every automorphism as a JSON line.
    Enumerate,
    /// Compare the closed form against brute force.
    Verify {
        /// Samples per side when the full scan is over budget.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = SAMPLE_SEED)]
        seed: u64,
    },
    /// Run the automorphism criterion on --quad.
    CheckQuadruple,
    /// Element arithmetic.
    Elem {
        #[command(subcommand)]
        op: ElemOp,
    },
}

#[derive(Subcommand)]
enum ElemOp {
    Mul { x: String, y: String },
    Pow { x: String, k: u64 },
    Inv { x: String },
    Order { x: String },
}

enum Failure {
    Lib(Error),
    Usage(String),
    Io(io::Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Validation(_)) | Failure::Io(_) | Failure::Mismatch => 1,
            Failure::Lib(Error::ResourceLimit(_)) => 2,
            Failure::Lib(Error::InvalidArgument(_) | Error::Parse(_)) | Failure::Usage(_) => 3,
        }
    }
}

struct Output {
    sink: Box<dyn Write>,
    format: Format,
}

impl Output {
    fn open(path: Option<&PathBuf>, format: Format) -> io::Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Output { sink, format })
    }

    /// Writes `value` as one JSON line, or `plain` in plain mode.
    fn emit(&mut self, value: &Value, plain: impl FnOnce() -> String) -> io::Result<()> {
        match self.format {
            Format::Json => writeln!(self.sink, "{value}"),
            Format::Plain => writeln!(self.sink, "{}", plain()),
        }
    }
}

/// `{"schema", "n", "m", "t", "r", ...payload}`.
fn object(p: &Presentation, payload: Value) -> Value {
    let mut out = json!({ "schema": SCHEMA, "n": p.n(), "m": p.m(), "t": p.t(), "r": p.r() });
    merge(&mut out, payload);
    out
}

fn element_json(x: Element) -> Value {
    json!({ "u": x.u, "v": x.v, "text": x.to_string() })
}

fn spec_json(s: &EndoSpec) -> Value {
    json!({ "x1": s.x1, "y1": s.y1, "x2": s.x2, "y2": s.y2 })
}

fn presentation(cli: &Cli) -> Result<Presentation, Failure> {
    let text = cli.pres.as_deref().ok_or_else(|| Failure::Usage("--pres n,m,t,r is required".into()))?;
    Ok(text.parse()?)
}

/// The context for a presentation, normalizing first with a note on stderr.
fn context(pres: &Presentation) -> Result<GroupContext, Failure> {
    if let Some(v) = pres.normalizing_exponent() {
        eprintln!("note: {pres} has t not dividing n; using {} (b -> b^{v})", pres.normalize());
    }
    Ok(GroupContext::from_presentation(pres)?)
}

fn budget(cli: &Cli) -> OracleBudget {
    let mut budget = OracleBudget::default();
    if let Some(q) = cli.oracle_budget {
        budget.max_quadruples = q;
    }
    budget
}

fn verify_message(report: &EquivalenceReport) -> String {
    let relation = if report.equal() { "==" } else { "!=" };
    let mut msg = format!("theorem {relation} oracle: {} automorphisms", report.theorem_count);
    if !report.exhaustive {
        msg.push_str(&format!(" ({} sampled quadruples re-checked)", report.checked));
    }
    if let Some(oracle) = report.oracle_count.filter(|&c| c != report.theorem_count) {
        msg.push_str(&format!(", oracle found {oracle}"));
    }
    if !report.equal() {
        msg.push_str(&format!(", {} disagreements", report.disagreements.len()));
    }
    msg
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let parsed = presentation(cli);
    let mut out = Output::open(cli.out.as_ref(), cli.format)?;
    let pres = match parsed {
        Ok(pres) => pres,
        Err(Failure::Lib(Error::Validation(reason))) if matches!(cli.command, Command::Validate) => {
            let value = json!({ "schema": SCHEMA, "valid": false, "reason": reason });
            out.emit(&value, || format!("invalid: {reason}"))?;
            out.sink.flush()?;
            return Err(Failure::Lib(Error::Validation(reason)));
        }
        Err(failure) => return Err(failure),
    };
    let workers = cli.workers as usize;

    match &cli.command {
        Command::Validate => {
            let value = object(&pres, json!({
                "valid": true,
                "normalized": pres.is_normalized(),
                "order": pres.order(),
            }));
            out.emit(&value, || format!("{pres} is valid"))?;
        }
        Command::Normalize => {
            let q = pres.normalize();
            let value = object(&q, json!({
                "input": pres.to_string(),
                "presentation": q.to_string(),
                "b_exponent": pres.normalizing_exponent().unwrap_or(1),
            }));
            out.emit(&value, || q.to_string())?;
        }
        Command::Profile => {
            let ctx = context(&pres)?;
            let p = ctx.presentation();
            let value = object(p, json!({
                "presentation": p.to_string(),
                "order": p.order(),
                "d": ctx.d(),
                "epsilon": ctx.epsilon(),
                "m0": ctx.m0(),
                "primes": ctx.profiles(),
            }));
            out.emit(&value, || {
                let mut text = format!(
                    "{p}\nd = {}\neps = {}\nm0 = {}",
                    ctx.d(),
                    ctx.epsilon().map_or("-".to_string(), |e| e.to_string()),
                    ctx.m0()
                );
                for pp in ctx.profiles() {
                    text.push_str(&format!(
                        "\np = {}: alpha = {}, beta = {}, gamma = {}, delta = {}, {}",
                        pp.p, pp.alpha, pp.beta, pp.gamma, pp.delta, pp.class
                    ));
                }
                text
            })?;
        }
        Command::Count => {
            let ctx = context(&pres)?;
            let total = count(&ctx, workers);
            let value = object(ctx.presentation(), json!({ "aut_order": total }));
            out.emit(&value, || total.to_string())?;
        }
        Command::Enumerate => {
            let ctx = context(&pres)?;
            let mut write = |s: &EndoSpec| out.emit(&spec_json(s), || s.to_string());
            if workers > 1 {
                enumerate_parallel(&ctx, workers).iter().try_for_each(&mut write)?;
            } else {
                enumerate(&ctx).try_for_each(|s| write(&s))?;
            }
        }
        Command::Verify { samples, seed } => {
            let ctx = context(&pres)?;
            let budget = budget(cli);
            let p = ctx.presentation();
            let quadruples = (p.order() as u128).pow(2);
            let report = if quadruples <= budget.max_quadruples as u128 {
                verify_equivalence(&ctx, &budget, workers)?
            } else {
                eprintln!("note: {quadruples} quadruples exceed the oracle budget; sampling instead");
                verify_sampled(&ctx, *samples, *seed, &budget, workers)?
            };
            let message = verify_message(&report);
            let disagreements: Vec<Value> = report
                .disagreements
                .iter()
                .map(|d| {
                    json!({
                        "quadruple": spec_json(&d.spec),
                        "oracle": d.oracle,
                        "theorem": d.theorem,
                    })
                })
                .collect();
            let value = object(p, json!({
                "equal": report.equal(),
                "exhaustive": report.exhaustive,
                "theorem_count": report.theorem_count,
                "oracle_count": report.oracle_count,
                "checked": report.checked,
                "disagreements": disagreements,
                "summary": message,
            }));
            out.emit(&value, || {
                let mut text = message.clone();
                for d in &report.disagreements {
                    text.push_str(&format!("\n{}: oracle {}, theorem {}", d.spec, d.oracle, d.theorem));
                }
                text
            })?;
            if !report.equal() {
                out.sink.flush()?;
                eprintln!("{message}");
                return Err(Failure::Mismatch);
            }
        }
        Command::CheckQuadruple => {
            let text = cli
                .quad
                .as_deref()
                .ok_or_else(|| Failure::Usage("--quad x1,y1,x2,y2 is required".into()))?;
            let raw: RawQuad = text.parse()?;
            let ctx = context(&pres)?;
            let spec = raw.canonical(ctx.presentation());
            let verdict = theorem_accepts(&ctx, &spec);
            let value = object(ctx.presentation(), json!({
                "quadruple": spec_json(&spec),
                "accepted": verdict.accepted(),
                "failed_clause": verdict.failed_clause(),
                "detail": verdict.detail(),
            }));
            out.emit(&value, || format!("{spec}: {verdict}"))?;
        }
        Command::Elem { op } => {
            let parse = |s: &str| -> Result<Element, Failure> {
                let raw: RawElement = s.parse()?;
                Ok(pres.element_from_raw(raw))
            };
            let (name, result) = match op {
                ElemOp::Mul { x, y } => ("mul", element_json(pres.mul(parse(x)?, parse(y)?))),
                ElemOp::Pow { x, k } => ("pow", element_json(pres.pow(parse(x)?, *k))),
                ElemOp::Inv { x } => ("inv", element_json(pres.inv(parse(x)?))),
                ElemOp::Order { x } => ("order", json!(pres.element_order(parse(x)?))),
            };
            let value = object(&pres, json!({ "op": name, "result": result }));
            out.emit(&value, || match &result {
                Value::Object(map) => map["text"].as_str().unwrap_or_default().to_string(),
                other => other.to_string(),
            })?;
        }
    }
    out.sink.flush()?;
    Ok(())
}

fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(target), Value::Object(extra)) = (target, extra) {
        target.extend(extra);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Mismatch => {}
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
