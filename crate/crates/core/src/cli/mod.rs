//! The `qmetric` command line.

mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use config::{Format, RunConfig};

use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::gh::{canonical_upper_bound, closed_form_gh, gh_exact, gh_lower_bound, GhEstimate};
use crate::limits::{
    cauchy_diagnostics, diameter_limit, embedding_density, epsilon_approximation,
    generate_sequence, op_graph_convergence, order_stability, Extent, Family, SequenceSpec,
};
use crate::metric::{diameter, min_positive_distance, validate_metric, MetricSpace};
use crate::nets::{equidistant_net, net_size_for, utb_certificate};
use crate::rational::Rational;
use crate::report::{approximate_csv, approximate_json, write_csv};
use crate::rings::{make_ring, MetricKind, RingOp};

/// Rings up to this size are checked against every metric axiom.
pub const EXHAUSTIVE_VALIDATION_LIMIT: u64 = 200;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nGromov-Hausdorff distance = 1/2 · min distortion over correspondences",
    "\nsquared spaces (lattices, operation graphs) report squared distances"
);

#[derive(Debug, Parser)]
#[command(name = "qmetric", version = VERSION, about = "Metric experiments on Z/pZ")]
pub struct Cli {
    /// TOML file supplying defaults; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add decimal approximations next to every exact rational.
    #[arg(long, global = true)]
    approx: bool,
    #[command(flatten)]
    caps: CapArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CapArgs {
    #[arg(long, global = true, env = "QMETRIC_MAX_POINTS")]
    max_points: Option<u64>,
    #[arg(long, global = true, env = "QMETRIC_EXACT_PAIRS")]
    exact_pairs: Option<u64>,
    #[arg(long, global = true, env = "QMETRIC_NODE_BUDGET")]
    node_budget: Option<u64>,
    #[arg(long, global = true, env = "QMETRIC_SIEVE_LIMIT")]
    sieve_limit: Option<u64>,
    #[arg(long, global = true, env = "QMETRIC_MAX_ENTRIES")]
    max_entries: Option<u64>,
}

impl CapArgs {
    fn apply(&self, mut caps: SizeCaps) -> SizeCaps {
        let set = |slot: &mut u64, v: Option<u64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut caps.max_points, self.max_points);
        set(&mut caps.exact_pairs, self.exact_pairs);
        set(&mut caps.node_budget, self.node_budget);
        set(&mut caps.sieve_limit, self.sieve_limit);
        set(&mut caps.max_entries, self.max_entries);
        caps
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Raw,
    Normalized,
    #[value(alias = "squared")]
    SquaredNormalized,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Raw => MetricKind::Raw,
            MetricArg::Normalized => MetricKind::Normalized,
            MetricArg::SquaredNormalized => MetricKind::SquaredNormalized,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    #[value(alias = "all-integers")]
    All,
    Primes,
    Dirichlet,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OpArg {
    Add,
    Mul,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Tag {
    Metric,
    Opgraph,
    Order,
    Embed,
    Diam,
}

#[derive(Debug, Args)]
struct SequenceArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Step of a Dirichlet progression.
    #[arg(long)]
    a: Option<u64>,
    /// Offset of a Dirichlet progression.
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    start: Option<u64>,
    #[arg(long, conflicts_with = "up_to")]
    count: Option<u64>,
    #[arg(long)]
    up_to: Option<u64>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a ring with its metric and checked properties.
    Space {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
    },
    /// Gromov-Hausdorff bounds, exact value and closed form for two rings.
    Gh {
        #[arg(long)]
        p1: u64,
        #[arg(long)]
        p2: u64,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        /// Run the exact search.
        #[arg(long)]
        exact: bool,
        /// Report the lower bound and the canonical upper bound.
        #[arg(long)]
        bounds: bool,
        /// Report only the closed-form value.
        #[arg(long, alias = "paper")]
        closed_form: bool,
    },
    /// Equidistant ε-net in the normalized ring.
    Net {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        epsilon: Rational,
    },
    /// Finite experiments along a sequence of moduli.
    Converge {
        #[arg(long, value_enum)]
        tag: Tag,
        #[command(flatten)]
        seq: SequenceArgs,
        #[arg(long)]
        tolerance: Option<Rational>,
        /// Also find the first ε-approximating modulus (tag metric).
        #[arg(long)]
        epsilon: Option<Rational>,
        #[arg(long, value_enum, default_value = "add")]
        op: OpArg,
        /// Smaller-or-equal side of the order comparison (tag order).
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
    },
    /// Uniform total-boundedness certificate over a range of rings.
    Certify {
        #[command(flatten)]
        seq: SequenceArgs,
        /// Comma-separated list such as `1/2,1/4,1/10`.
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<Rational>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Space { .. } => "space",
            Command::Gh { .. } => "gh",
            Command::Net { .. } => "net",
            Command::Converge { .. } => "converge",
            Command::Certify { .. } => "certify",
        }
    }
}

/// What a command produced: the report in both formats and whether an
/// invariant or budget check failed.
struct Report {
    json: Value,
    csv: String,
    breach: Option<String>,
    budget_hit: bool,
}

impl Report {
    fn new(json: Value, csv: String) -> Self {
        Report { json, csv, breach: None, budget_hit: false }
    }
}

struct Context {
    config: RunConfig,
    caps: SizeCaps,
}

impl Context {
    fn metric(&self, flag: Option<MetricArg>) -> MetricKind {
        flag.map(MetricKind::from).or(self.config.metric).unwrap_or(MetricKind::Normalized)
    }

    fn sequence(&self, args: &SequenceArgs) -> Result<SequenceSpec> {
        let base = self.config.sequence.unwrap_or(SequenceSpec::primes(
            Extent::UpTo(1_000),
            self.config.metric.unwrap_or(MetricKind::Normalized),
        ));
        let family = match args.family {
            None => match (base.family, args.a, args.b) {
                (Family::Dirichlet { a, b }, x, y) => {
                    Family::Dirichlet { a: x.unwrap_or(a), b: y.unwrap_or(b) }
                }
                (f, None, None) => f,
                _ => return Err(usage("--a and --b need --family dirichlet")),
            },
            Some(FamilyArg::All) | Some(FamilyArg::Primes) if args.a.is_some() || args.b.is_some() => {
                return Err(usage("--a and --b need --family dirichlet"));
            }
            Some(FamilyArg::All) => Family::AllIntegers,
            Some(FamilyArg::Primes) => Family::Primes,
            Some(FamilyArg::Dirichlet) => match (args.a, args.b, base.family) {
                (Some(a), Some(b), _) => Family::Dirichlet { a, b },
                (None, None, Family::Dirichlet { a, b }) => Family::Dirichlet { a, b },
                _ => return Err(usage("--family dirichlet needs --a and --b")),
            },
        };
        let extent = match (args.count, args.up_to) {
            (Some(n), _) => Extent::Count(n),
            (None, Some(m)) => Extent::UpTo(m),
            (None, None) => base.extent,
        };
        let kind = args.metric.map(MetricKind::from).or(self.config.metric).unwrap_or(base.kind);
        let spec = SequenceSpec::new(family, args.start.unwrap_or(base.start), extent, kind);
        spec.validate()?;
        Ok(spec)
    }
}

fn usage(msg: &str) -> Error {
    Error::InvalidArgument(msg.to_string())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Serialization(_) => EXIT_INVARIANT,
        _ => EXIT_USAGE,
    }
}

fn opt_str(v: &Option<Rational>) -> String {
    v.as_ref().map(|r| r.to_string()).unwrap_or_default()
}

fn cmd_space(ctx: &Context, p: u64, kind: MetricKind) -> Result<Report> {
    let ring = make_ring(p, kind)?;
    let entries = p as u128 * p as u128;
    if entries > ctx.caps.max_entries as u128 {
        return Err(Error::cap("distance matrix", entries, ctx.caps.max_entries));
    }
    let validation = (p <= EXHAUSTIVE_VALIDATION_LIMIT).then(|| validate_metric(&ring));
    let diam = diameter(&ring)?;
    let min = min_positive_distance(&ring)?;
    let properties = json!({
        "points": p,
        "diameter": diam,
        "min_distance": min,
        "valid": validation.as_ref().map(|v| v.is_valid()),
        "violations": validation.as_ref().map(|v| v.violations.len()),
    });
    let json = json!({ "space": ring.to_json_value(), "properties": properties });
    let csv = write_csv(
        &["i", "j", "distance"],
        (0..ring.len())
            .flat_map(|i| (0..ring.len()).map(move |j| (i, j)))
            .map(|(i, j)| vec![i.to_string(), j.to_string(), ring.distance(i, j).to_string()]),
    )?;
    let mut report = Report::new(json, csv);
    if validation.is_some_and(|v| !v.is_valid()) {
        report.breach = Some(format!("Z/{p}Z failed metric validation"));
    }
    Ok(report)
}

struct GhFlags {
    exact: bool,
    bounds: bool,
    closed_form_only: bool,
}

fn cmd_gh(ctx: &Context, p1: u64, p2: u64, kind: MetricKind, flags: GhFlags) -> Result<Report> {
    let x = make_ring(p1, kind)?;
    let y = make_ring(p2, kind)?;
    let closed_form = closed_form_gh(kind, p1, p2)?;
    let mut json = json!({
        "p1": p1,
        "p2": p2,
        "metric": kind.name(),
        "closed_form": closed_form,
    });
    let obj = json.as_object_mut().expect("object");
    let (mut lower, mut canonical, mut estimate): (Option<Rational>, Option<Rational>, Option<GhEstimate>) =
        (None, None, None);
    let want_bounds = flags.bounds || !(flags.exact || flags.closed_form_only);
    if want_bounds {
        let big = p1.max(p2) as u128;
        if big * big > ctx.caps.max_entries as u128 {
            return Err(Error::cap("distance matrix", big * big, ctx.caps.max_entries));
        }
        lower = Some(gh_lower_bound(&x, &y)?);
        canonical = Some(canonical_upper_bound(p1, p2, kind)?);
        obj.insert("lower_bound".into(), json!(lower));
        obj.insert("canonical_upper".into(), json!(canonical));
    }
    if flags.exact {
        let e = gh_exact(&x, &y, &ctx.caps)?;
        obj.insert("gh".into(), serde_json::to_value(&e)?);
        estimate = Some(e);
    }
    let csv = write_csv(
        &["p1", "p2", "metric", "closed_form", "lower_bound", "canonical_upper", "gh_lower", "gh_upper", "exact"],
        [vec![
            p1.to_string(),
            p2.to_string(),
            kind.name().to_string(),
            closed_form.to_string(),
            opt_str(&lower),
            opt_str(&canonical),
            estimate.as_ref().map(|e| e.lower.to_string()).unwrap_or_default(),
            estimate.as_ref().map(|e| e.upper.to_string()).unwrap_or_default(),
            estimate.as_ref().map(|e| e.exact.to_string()).unwrap_or_default(),
        ]],
    )?;
    let mut report = Report::new(json, csv);
    if let Some(e) = &estimate {
        report.budget_hit = !e.exact;
        if e.lower > e.upper {
            report.breach = Some(format!("lower bound {} exceeds upper bound {}", e.lower, e.upper));
        }
    }
    Ok(report)
}

fn cmd_net(p: u64, epsilon: &Rational) -> Result<Report> {
    let k = net_size_for(epsilon)?.min(p);
    let net = equidistant_net(p, k)?;
    let within = &net.radius <= epsilon;
    let json = json!({
        "p": p,
        "requested_epsilon": epsilon,
        "net_size": net.size(),
        "points": serde_json::to_value(&net)?["points"],
        "radius": net.radius,
        "bound": net.epsilon,
        "within": within,
    });
    let points: Vec<String> = net.points.iter().map(|c| c.representative().to_string()).collect();
    let csv = write_csv(
        &["p", "epsilon", "net_size", "radius", "bound", "points"],
        [vec![
            p.to_string(),
            epsilon.to_string(),
            net.size().to_string(),
            net.radius.to_string(),
            net.epsilon.to_string(),
            points.join(" "),
        ]],
    )?;
    let mut report = Report::new(json, csv);
    if !within || net.radius > net.epsilon {
        report.breach = Some(format!("net radius {} exceeds {}", net.radius, epsilon));
    }
    Ok(report)
}

struct ConvergeArgs {
    tag: Tag,
    spec: SequenceSpec,
    tolerance: Rational,
    epsilon: Option<Rational>,
    op: RingOp,
    n: Option<u64>,
    m: Option<u64>,
}

fn cmd_converge(ctx: &Context, a: ConvergeArgs) -> Result<Report> {
    let caps = &ctx.caps;
    match a.tag {
        Tag::Metric => {
            let r = cauchy_diagnostics(&a.spec, &a.tolerance, caps)?;
            let mut json = serde_json::to_value(&r)?;
            if let Some(eps) = &a.epsilon {
                let approx = epsilon_approximation(&a.spec, eps, caps)?;
                json.as_object_mut()
                    .expect("object")
                    .insert("epsilon_approximation".into(), serde_json::to_value(&approx)?);
            }
            Ok(Report::new(json, r.to_csv()?))
        }
        Tag::Opgraph => {
            let r = op_graph_convergence(&a.spec, a.op, caps)?;
            Ok(Report::new(serde_json::to_value(&r)?, r.to_csv()?))
        }
        Tag::Order => {
            let (Some(n), Some(m)) = (a.n, a.m) else {
                return Err(usage("--tag order needs --n and --m"));
            };
            let r = order_stability(n, m, &a.spec, caps)?;
            let moduli = generate_sequence(&a.spec, caps)?;
            let csv = write_csv(
                &["n", "m", "p", "value"],
                moduli.iter().filter(|&&p| p > n.max(m)).map(|&p| {
                    let v = crate::limits::characteristic(n, m, p).expect("admissible modulus");
                    vec![n.to_string(), m.to_string(), p.to_string(), v.as_str().to_string()]
                }),
            )?;
            let mut report = Report::new(serde_json::to_value(&r)?, csv);
            if !r.stable() {
                report.breach = Some(format!("order of [{n}] and [{m}] flips at {:?}", r.flips));
            }
            Ok(report)
        }
        Tag::Embed => {
            let moduli = generate_sequence(&a.spec, caps)?;
            let gaps = moduli
                .iter()
                .map(|&p| Ok((p, embedding_density(p)?)))
                .collect::<Result<Vec<_>>>()?;
            let decreasing = gaps.windows(2).all(|w| w[1].1 < w[0].1);
            let rows: Vec<Value> = gaps.iter().map(|(p, g)| json!({ "p": p, "max_gap": g })).collect();
            let json = json!({ "rows": rows, "strictly_decreasing": decreasing });
            let csv = write_csv(
                &["p", "max_gap"],
                gaps.iter().map(|(p, g)| vec![p.to_string(), g.to_string()]),
            )?;
            Ok(Report::new(json, csv))
        }
        Tag::Diam => {
            let r = diameter_limit(&a.spec, caps)?;
            let csv = write_csv(
                &["p", "diameter"],
                r.rows.iter().map(|r| vec![r.p.to_string(), r.diameter.to_string()]),
            )?;
            Ok(Report::new(serde_json::to_value(&r)?, csv))
        }
    }
}

fn cmd_certify(ctx: &Context, spec: &SequenceSpec, epsilons: &[Rational]) -> Result<Report> {
    let moduli = generate_sequence(spec, &ctx.caps)?;
    let cert = utb_certificate(&moduli, epsilons)?;
    let mut json = serde_json::to_value(&cert)?;
    json.as_object_mut().expect("object").insert("holds".into(), cert.holds().into());
    let mut report = Report::new(json, cert.to_csv()?);
    if !cert.holds() {
        report.breach = Some("certificate has failing cells".into());
    }
    Ok(report)
}

fn execute(cli: &Cli) -> Result<(Report, Format, Option<PathBuf>, bool)> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(cmd) = &config.command {
        if cmd != cli.command.name() {
            return Err(usage(&format!("config is for `{cmd}`, not `{}`", cli.command.name())));
        }
    }
    let caps = cli.caps.apply(config.caps.unwrap_or_default());
    let ctx = Context { config, caps };
    let report = match &cli.command {
        Command::Space { p, metric } => cmd_space(&ctx, *p, ctx.metric(*metric))?,
        Command::Gh { p1, p2, metric, exact, bounds, closed_form } => cmd_gh(
            &ctx,
            *p1,
            *p2,
            ctx.metric(*metric),
            GhFlags { exact: *exact, bounds: *bounds, closed_form_only: *closed_form },
        )?,
        Command::Net { p, epsilon } => cmd_net(*p, epsilon)?,
        Command::Converge { tag, seq, tolerance, epsilon, op, n, m } => {
            let tolerance = tolerance
                .clone()
                .or_else(|| ctx.config.tolerance.clone())
                .unwrap_or_else(|| Rational::frac(1, 100));
            let op = match op {
                OpArg::Add => RingOp::Add,
                OpArg::Mul => RingOp::Mul,
            };
            let spec = ctx.sequence(seq)?;
            cmd_converge(&ctx, ConvergeArgs { tag: *tag, spec, tolerance, epsilon: epsilon.clone(), op, n: *n, m: *m })?
        }
        Command::Certify { seq, epsilons } => {
            let eps = if epsilons.is_empty() {
                ctx.config.epsilons.clone().unwrap_or_else(|| {
                    vec![Rational::frac(1, 2), Rational::frac(1, 4), Rational::frac(1, 10)]
                })
            } else {
                epsilons.clone()
            };
            cmd_certify(&ctx, &ctx.sequence(seq)?, &eps)?
        }
    };
    let format = cli.format.or(ctx.config.format).unwrap_or_default();
    let out = cli.out.clone().or_else(|| ctx.config.out.clone());
    let approx = cli.approx || ctx.config.approx.unwrap_or(false);
    Ok((report, format, out, approx))
}

fn render(mut report: Report, format: Format, approx: bool) -> Result<(String, Report)> {
    let text = match format {
        Format::Json => {
            if approx {
                approximate_json(&mut report.json);
            }
            let mut s = serde_json::to_string_pretty(&report.json)?;
            s.push('\n');
            s
        }
        Format::Csv if approx => approximate_csv(&report.csv)?,
        Format::Csv => report.csv.clone(),
    };
    Ok((text, report))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let outcome = execute(&cli).and_then(|(report, format, out, approx)| {
        let (text, report) = render(report, format, approx)?;
        Ok((text, report, out))
    });
    let (text, report, out) = match outcome {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_INVARIANT;
    }
    if let Some(msg) = &report.breach {
        let _ = writeln!(stderr, "invariant breach: {msg}");
        return EXIT_INVARIANT;
    }
    if report.budget_hit {
        let _ = writeln!(stderr, "search budget exhausted; reported bounds are not tight");
        return EXIT_CAP;
    }
    EXIT_OK
}
