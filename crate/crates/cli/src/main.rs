use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fekete_core::certificate::{Certificate, Subject};
use fekete_core::fekete::{running_bound, superadditive_hull};
use fekete_core::machines::{self, EnumeratedSet};
use fekete_core::seq::{approx_member, Modulus2, DEFAULT_BUDGET};
use fekete_core::shannon::{self, ChannelMatrix, Graph};
use fekete_core::transforms::{self, ZwKind, ZwRepresentation};
use fekete_core::{
    AdditiveKind, AdditiveRepresentation, DoubleSeqDef, Error, MonotoneRepresentation, Rational,
    SeqDef, SeqStandardDescription,
};

mod table;

#[derive(Parser, Debug)]
#[command(name = "fekete", version, about = "Exact moduli of convergence for monotone and additive sequences")]
struct Cli {
    /// Search budget (largest index any search may visit).
    #[arg(long, global = true, env = "FEKETE_BUDGET")]
    budget: Option<u64>,

    /// Emit JSON (default).
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,

    /// Emit a plain-text table.
    #[arg(long, global = true)]
    table: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prefix bound max/min of a_n/n.
    Limit {
        /// Rational sequence in `n`.
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Prefix length.
        #[arg(long)]
        terms: u64,
    },
    /// Compute a modulus of convergence and emit a certificate.
    #[command(subcommand)]
    Modulus(ModulusCmd),
    /// Representation transforms.
    Transform {
        #[arg(value_enum)]
        which: TransformKind,
        #[command(flatten)]
        input: TransformInput,
    },
    /// Superadditive hull of a prefix.
    Hull {
        /// Rational sequence in `n`.
        #[arg(long)]
        expr: String,
        /// Prefix length.
        #[arg(long)]
        terms: u64,
    },
    /// Counterexample generators and the capacity demo.
    #[command(subcommand)]
    Demo(DemoCmd),
    /// Replay a certificate's window.
    Verify {
        /// Certificate file, `-` for stdin.
        #[arg(long)]
        cert: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Super,
    Sub,
}

impl From<KindArg> for AdditiveKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Super => AdditiveKind::Superadditive,
            KindArg::Sub => AdditiveKind::Subadditive,
        }
    }
}

#[derive(Subcommand, Debug)]
enum ModulusCmd {
    /// Least n0 with upper(n0) - lower(n0) < 2^-M.
    Sandwich {
        /// Non-decreasing sequence in `n`.
        #[arg(long)]
        lower: String,
        /// Non-increasing sequence in `n`.
        #[arg(long)]
        upper: String,
        #[command(flatten)]
        common: ModulusCommon,
    },
    /// Fekete modulus from a rational sequence and a converse, or from a
    /// superadditive/subadditive pair.
    Fekete {
        /// Non-negative superadditive sequence in `n`.
        #[arg(long, requires = "converse", conflicts_with_all = ["sup", "sub"])]
        a: Option<String>,
        /// Non-increasing sequence in `n` with the same limit as a_n/n.
        #[arg(long)]
        converse: Option<String>,
        /// Superadditive sequence in `n, m`.
        #[arg(long, requires = "sub")]
        sup: Option<String>,
        #[arg(long, default_value = "1")]
        sup_modulus: String,
        /// Subadditive sequence in `n, m`.
        #[arg(long, requires = "sup")]
        sub: Option<String>,
        #[arg(long, default_value = "1")]
        sub_modulus: String,
        #[command(flatten)]
        common: ModulusCommon,
    },
    /// Modulus for a monotone representation.
    Monotone {
        /// Non-decreasing sequence in `n, m`.
        #[arg(long)]
        lower: String,
        #[arg(long, default_value = "1")]
        lower_modulus: String,
        /// Non-increasing sequence in `n, m`.
        #[arg(long)]
        upper: String,
        #[arg(long, default_value = "1")]
        upper_modulus: String,
        #[command(flatten)]
        common: ModulusCommon,
    },
}

#[derive(Args, Debug)]
struct ModulusCommon {
    /// Precision: the bound is 2^-M.
    #[arg(long = "M")]
    big_m: u64,
    /// Known limit used for the replay window, e.g. `3/2`.
    #[arg(long)]
    limit: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransformKind {
    ZwToSuper,
    ZwToSub,
    AdditiveToZw,
    Flatten,
}

#[derive(Args, Debug)]
struct TransformInput {
    /// JSON representation file, `-` for stdin.
    #[arg(long, conflicts_with = "seq")]
    input: Option<String>,
    /// Inline double sequence in `n, m`.
    #[arg(long)]
    seq: Option<String>,
    /// Inline modulus in `n, M`.
    #[arg(long, default_value = "1")]
    modulus: String,
    /// Representation kind for inline input: lower/upper or super/sub.
    #[arg(long)]
    kind: Option<String>,
    /// Number of output terms to evaluate.
    #[arg(long, default_value_t = 8)]
    terms: u64,
    /// Precision for evaluating inexact output terms.
    #[arg(long = "M", default_value_t = 16)]
    big_m: u64,
}

#[derive(Subcommand, Debug)]
enum DemoCmd {
    /// Partial sums of 2^-k over enumerated halting programs.
    Specker {
        /// Number of halting programs to enumerate.
        #[arg(long, default_value_t = 500)]
        count: u64,
        /// Number of leading terms to print.
        #[arg(long, default_value_t = 10)]
        show: u64,
        /// Dovetail steps allowed before giving up.
        #[arg(long, default_value_t = u64::MAX)]
        tick_budget: u64,
    },
    /// Indicator of a program being among the first n enumerated.
    T15(FamilyArgs),
    /// n times the t15 indicator.
    T17(FamilyArgs),
    /// Halting-time sequences with certified intervals.
    Foo {
        /// Largest program index to tabulate.
        #[arg(long, default_value_t = 10)]
        n_limit: u64,
        /// Precision of the printed intervals.
        #[arg(long = "M", default_value_t = 8)]
        big_m: u64,
    },
    /// Independence numbers of strong powers.
    Shannon {
        /// c5, k3, pentagon, edgeless:N or file:PATH.
        #[arg(long)]
        graph: String,
        /// Largest strong power.
        #[arg(long, default_value_t = 2)]
        power: u32,
        /// Refuse graphs with more vertices than this.
        #[arg(long, default_value_t = shannon::DEFAULT_VERTEX_CAP)]
        cap: usize,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Program index; defaults to the last enumerated program.
    #[arg(long)]
    m: Option<u64>,
    /// Number of halting programs to enumerate.
    #[arg(long, default_value_t = 500)]
    count: u64,
    /// Dovetail steps allowed before giving up.
    #[arg(long, default_value_t = u64::MAX)]
    tick_budget: u64,
    /// Prefix lengths to report as guessed moduli.
    #[arg(long, value_delimiter = ',', default_values_t = [10u64, 100, 250, 499])]
    guesses: Vec<u64>,
}

/// Errors raised by the front end itself.
enum CliError {
    Core(Error),
    Io(String),
    Json(String),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::BudgetExhausted { .. }) => 3,
            CliError::Core(Error::CertificateViolation(_)) => 4,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Core(e) => (e.kind(), e.to_string()),
            CliError::Io(m) => ("IoError", m.clone()),
            CliError::Json(m) => ("JsonError", m.clone()),
            CliError::Usage(m) => ("UsageError", m.clone()),
        };
        let mut obj = json!({ "kind": kind, "message": message });
        if let CliError::Core(e) = self {
            match e {
                Error::Parse { offset, .. } | Error::UnknownVariable { offset, .. } => {
                    obj["offset"] = json!(offset);
                }
                Error::BudgetExhausted { budget, .. } => obj["budget"] = json!(budget),
                _ => {}
            }
        }
        json!({ "error": obj })
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io(e.to_string()))
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Json(e.to_string()))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| json!({ "serialization_error": e.to_string() }))
}

fn parse_rational(text: &str) -> CliResult<Rational> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("`{text}` is not a rational a/b")))
}

fn seq_desc(seq: &str, modulus: &str, budget: u64) -> CliResult<SeqStandardDescription> {
    Ok(SeqStandardDescription {
        dseq: DoubleSeqDef::expr(seq)?,
        modulus: Modulus2::expr(modulus, budget)?,
    })
}

fn run(cli: Cli) -> CliResult<Value> {
    let budget = cli.budget.unwrap_or(DEFAULT_BUDGET);
    match cli.command {
        Command::Limit { expr, kind, terms } => {
            let a = SeqDef::expr(&expr)?;
            let report = running_bound(&a, kind.into(), terms)?;
            Ok(json!({ "expr": expr, "kind": to_value(&AdditiveKind::from(kind)), "report": to_value(&report) }))
        }
        Command::Modulus(cmd) => modulus(cmd, budget),
        Command::Transform { which, input } => transform(which, input, budget),
        Command::Hull { expr, terms } => {
            let input = SeqDef::expr(&expr)?;
            let hull = superadditive_hull(&input, terms)?;
            let values: Vec<Rational> = (1..=terms).map(|n| input.eval(n)).collect::<Result<_, _>>()?;
            Ok(json!({ "expr": expr, "terms": terms, "input": to_value(&values), "hull": to_value(&hull) }))
        }
        Command::Demo(cmd) => demo(cmd),
        Command::Verify { cert } => {
            let c: Certificate = parse_json(&read_input(&cert)?)?;
            c.verify()?;
            Ok(json!({ "verified": true, "M": c.big_m, "kappa": c.kappa, "checked_window": c.checked_window }))
        }
    }
}

fn modulus(cmd: ModulusCmd, budget: u64) -> CliResult<Value> {
    let (subject, common) = match cmd {
        ModulusCmd::Sandwich { lower, upper, common } => (
            Subject::Sandwich {
                lower: SeqDef::expr(&lower)?,
                upper: SeqDef::expr(&upper)?,
            },
            common,
        ),
        ModulusCmd::Fekete {
            a,
            converse,
            sup,
            sup_modulus,
            sub,
            sub_modulus,
            common,
        } => {
            let subject = match (a, converse, sup, sub) {
                (Some(a), Some(c), None, None) => Subject::FeketeRational {
                    a: SeqDef::expr(&a)?,
                    converse: SeqDef::expr(&c)?,
                },
                (None, None, Some(sup), Some(sub)) => Subject::Fekete {
                    superadditive: AdditiveRepresentation {
                        kind: AdditiveKind::Superadditive,
                        desc: seq_desc(&sup, &sup_modulus, budget)?,
                    },
                    subadditive: AdditiveRepresentation {
                        kind: AdditiveKind::Subadditive,
                        desc: seq_desc(&sub, &sub_modulus, budget)?,
                    },
                },
                _ => {
                    return Err(CliError::Usage(
                        "give either --a with --converse, or --sup with --sub".into(),
                    ))
                }
            };
            (subject, common)
        }
        ModulusCmd::Monotone {
            lower,
            lower_modulus,
            upper,
            upper_modulus,
            common,
        } => (
            Subject::Monotone {
                w: MonotoneRepresentation {
                    lower: seq_desc(&lower, &lower_modulus, budget)?,
                    upper: seq_desc(&upper, &upper_modulus, budget)?,
                },
            },
            common,
        ),
    };
    let limit = common.limit.as_deref().map(parse_rational).transpose()?;
    let cert = Certificate::issue(subject, common.big_m, budget, limit)?;
    Ok(to_value(&cert))
}

fn parse_zw_kind(kind: Option<&str>, default: ZwKind) -> CliResult<ZwKind> {
    match kind {
        None => Ok(default),
        Some("lower") => Ok(ZwKind::Lower),
        Some("upper") => Ok(ZwKind::Upper),
        Some(k) => Err(CliError::Usage(format!("ZW kind must be lower or upper, got `{k}`"))),
    }
}

fn parse_additive_kind(kind: Option<&str>) -> CliResult<AdditiveKind> {
    match kind {
        Some("super") | Some("superadditive") => Ok(AdditiveKind::Superadditive),
        Some("sub") | Some("subadditive") => Ok(AdditiveKind::Subadditive),
        other => Err(CliError::Usage(format!(
            "additive kind must be super or sub, got {other:?}"
        ))),
    }
}

fn terms_of(d: &SeqStandardDescription, count: u64, big_m: u64) -> CliResult<Vec<Value>> {
    (1..=count)
        .map(|n| Ok(json!({ "n": n, "value": to_value(&approx_member(d, n, big_m)?) })))
        .collect()
}

fn transform(which: TransformKind, input: TransformInput, budget: u64) -> CliResult<Value> {
    let text = match (&input.input, &input.seq) {
        (Some(path), _) => Some(read_input(path)?),
        (None, Some(_)) => None,
        (None, None) => return Err(CliError::Usage("give --input or --seq".into())),
    };
    let inline = || seq_desc(input.seq.as_deref().unwrap_or_default(), &input.modulus, budget);
    let zw = |default: ZwKind| -> CliResult<ZwRepresentation> {
        match &text {
            Some(t) => parse_json(t),
            None => Ok(ZwRepresentation {
                kind: parse_zw_kind(input.kind.as_deref(), default)?,
                desc: inline()?,
            }),
        }
    };
    match which {
        TransformKind::ZwToSuper | TransformKind::ZwToSub => {
            let out = match which {
                TransformKind::ZwToSuper => transforms::zw_to_superadditive(&zw(ZwKind::Lower)?)?,
                _ => transforms::zw_to_subadditive(&zw(ZwKind::Upper)?)?,
            };
            let terms = terms_of(&out.desc, input.terms, 0)?;
            Ok(json!({ "output": to_value(&out), "terms": terms }))
        }
        TransformKind::AdditiveToZw => {
            let a: AdditiveRepresentation = match &text {
                Some(t) => parse_json(t)?,
                None => AdditiveRepresentation {
                    kind: parse_additive_kind(input.kind.as_deref())?,
                    desc: inline()?,
                },
            };
            let out = transforms::additive_to_zw(&a);
            let terms = terms_of(&out.desc, input.terms, input.big_m)?;
            Ok(json!({ "output": to_value(&out), "M": input.big_m, "terms": terms }))
        }
        TransformKind::Flatten => {
            let out = transforms::zw_flatten(&zw(ZwKind::Lower)?);
            let terms: Vec<Value> = (1..=input.terms)
                .map(|n| Ok(json!({ "n": n, "value": to_value(&out.eval(n)?) })))
                .collect::<CliResult<_>>()?;
            Ok(json!({ "output": to_value(&out), "terms": terms }))
        }
    }
}

fn enumerate(count: u64, tick_budget: u64) -> CliResult<EnumeratedSet> {
    Ok(machines::enumerate_re(count, tick_budget)?)
}

fn family(args: FamilyArgs, scaled: bool) -> CliResult<Value> {
    let e = enumerate(args.count, args.tick_budget)?;
    let m = match args.m {
        Some(m) => m,
        None => e
            .records
            .last()
            .map(|r| r.program_index)
            .ok_or_else(|| CliError::Usage("empty enumeration".into()))?,
    };
    let mut values = Vec::new();
    let mut monotone = true;
    let mut prev: Option<Rational> = None;
    for n in 1..=args.count {
        let v = if scaled {
            machines::t17_family(m, n, &e)?
        } else {
            machines::t15_family(m, n, &e)?
        };
        if let Some(p) = &prev {
            monotone &= *p <= v;
        }
        prev = Some(v.clone());
        values.push(v);
    }
    let mut out = json!({
        "m": m,
        "program": machines::Program::decode(m).to_string(),
        "enumeration_position": e.position(m),
        "count": args.count,
        "values": to_value(&values),
        "non_decreasing": monotone,
    });
    if scaled {
        let limit = values.len().min(150);
        let mut ok = true;
        for l in 1..limit {
            for k in 1..=(limit - l) {
                ok &= values[l + k - 1] >= &values[l - 1] + &values[k - 1];
            }
        }
        out["superadditive_up_to"] = json!(limit);
        out["superadditive"] = json!(ok);
    }
    let guesses: Vec<u64> = args.guesses.into_iter().filter(|&g| g >= 1 && g < args.count).collect();
    if !guesses.is_empty() {
        out["non_uniformity"] = to_value(&machines::non_uniformity_report(&e, &guesses)?);
    }
    Ok(out)
}

fn named_graph(name: &str) -> CliResult<Graph> {
    if let Some(path) = name.strip_prefix("file:") {
        return Ok(read_input(path)?.parse()?);
    }
    if let Some(n) = name.strip_prefix("edgeless:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Usage(format!("bad vertex count in `{name}`")))?;
        return Ok(Graph::edgeless(n));
    }
    match name {
        "c5" => Ok(Graph::cycle(5)?),
        "k3" => Ok(Graph::complete(3)),
        "pentagon" => Ok(shannon::confusability_graph(&ChannelMatrix::pentagon())),
        _ => Err(CliError::Usage(format!(
            "unknown graph `{name}`; use c5, k3, pentagon, edgeless:N or file:PATH"
        ))),
    }
}

fn demo(cmd: DemoCmd) -> CliResult<Value> {
    match cmd {
        DemoCmd::Specker {
            count,
            show,
            tick_budget,
        } => {
            let e = enumerate(count, tick_budget)?;
            let prefix = machines::specker_prefix(count, &e)?;
            let non_decreasing = prefix.windows(2).all(|w| w[0] <= w[1]);
            let last = prefix.last().map(|d| d.to_rational()).unwrap_or_else(Rational::zero);
            let shown: Vec<Value> = prefix
                .iter()
                .take(show as usize)
                .enumerate()
                .map(|(i, d)| json!({ "n": i + 1, "value": to_value(&d.to_rational()) }))
                .collect();
            Ok(json!({
                "count": count,
                "ticks_used": e.ticks_used,
                "indices_head": e.indices().take(show as usize).collect::<Vec<_>>(),
                "terms_head": shown,
                "last_term_decimal": last.to_decimal(30),
                "non_decreasing": non_decreasing,
                "bounded_by_one": last <= Rational::one(),
            }))
        }
        DemoCmd::T15(args) => family(args, false),
        DemoCmd::T17(args) => family(args, true),
        DemoCmd::Foo { n_limit, big_m } => {
            let seqs = machines::foo_sequences(n_limit)?;
            let mut rows = Vec::new();
            let mut all_ok = true;
            for n in 1..=n_limit {
                let x = seqs.x_approx(n, big_m)?;
                let w = seqs.w_interval(n, big_m)?;
                let a = seqs.a_interval(n, big_m)?;
                let within = w.within_of(&Rational::one(), &Rational::one().div_index(n));
                all_ok &= within;
                rows.push(json!({
                    "n": n,
                    "x_approx": to_value(&x),
                    "w": to_value(&w),
                    "a": to_value(&a),
                    "w_within_1_over_n": within,
                }));
            }
            Ok(json!({ "M": big_m, "rows": rows, "all_within": all_ok }))
        }
        DemoCmd::Shannon { graph, power, cap } => {
            let g = named_graph(&graph)?;
            let report = shannon::capacity_lower_bounds(&g, power, cap)?;
            Ok(json!({
                "graph": graph,
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "report": to_value(&report),
            }))
        }
    }
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                emit(&e.to_string());
                return ExitCode::SUCCESS;
            }
            let err = CliError::Usage(e.to_string().trim().to_string());
            emit(&format!("{}\n", err.to_json()));
            return ExitCode::from(err.exit_code());
        }
    };
    let as_table = cli.table;
    match run(cli) {
        Ok(v) => {
            if as_table {
                emit(&table::render(&v));
            } else {
                emit(&format!("{}\n", serde_json::to_string_pretty(&v).unwrap_or_default()));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(&format!("{}\n", e.to_json()));
            ExitCode::from(e.exit_code())
        }
    }
}
