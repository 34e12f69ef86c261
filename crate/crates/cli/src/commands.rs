use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use trimetric_core::cauchy::{colimit, is_cauchy, CauchyStatus, LevelStatus};
use trimetric_core::completion::{
    has_bounded_injective_resolution, in_s, is_compactly_supported, is_perfect, sing_hom, syzygy_class,
    CompletionObject, Verdict,
};
use trimetric_core::complex::Complex;
use trimetric_core::fuzz::{cartesian_fuzz, strong_triangle_fuzz, FuzzConfig, FuzzReport};
use trimetric_core::metric::{check_good_axioms, equivalent, in_ball, length, Equivalence, GoodMetric};
use trimetric_core::rmodule::Ring;
use trimetric_core::Error as CoreError;

use crate::exit;
use crate::format::{TowerDecl, Workspace};
use crate::report::{self, OutputFormat, Report};

#[derive(Debug, Parser)]
#[command(name = "trimetric", version, about = "Metrics, Cauchy towers and completions over F_p[x]/(x^n)")]
pub struct Cli {
    /// Workspace file declaring the ring and named objects.
    #[arg(long, short = 'w', global = true)]
    pub workspace: Option<PathBuf>,
    /// `i`, `ii`, `iii` or a workspace metric, with optional `:dual` and `@t` shift.
    #[arg(long, global = true, default_value = "i")]
    pub metric: String,
    /// Measure on the dual side (same as a `:dual` suffix).
    #[arg(long, global = true)]
    pub dual: bool,
    #[arg(long, global = true, default_value_t = 8)]
    pub horizon: usize,
    #[arg(long, global = true, default_value_t = 6)]
    pub levels: u64,
    /// Required by the fuzz commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Degree window `a..b`, inclusive.
    #[arg(long, global = true, default_value = "-6..6", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Ring `P,N` for commands that run without a workspace.
    #[arg(long, global = true)]
    pub ring: Option<String>,
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    /// Largest level searched for equivalence witnesses.
    #[arg(long, global = true, default_value_t = 32)]
    pub bound: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Length of a chain map.
    Length { map: String },
    /// Ball membership of a complex, per level or at one level.
    Ball {
        complex: String,
        #[arg(long)]
        level: Option<u64>,
    },
    /// Cauchy certificate for a tower.
    CauchyCheck { tower: String },
    /// Degreewise colimit of a tower's cohomology.
    Colimit { tower: String },
    /// Whether a tower's colimit lies in the completion.
    InS { tower: String },
    /// Whether a complex is quasi-isomorphic to a bounded complex of free modules.
    IsPerfect { complex: String },
    /// Whether a complex has a bounded injective resolution.
    InjBounded { complex: String },
    /// Class of a complex in the singularity category.
    SingClass { complex: String },
    /// Hom dimension between two classes in the singularity category.
    SingHom { a: String, b: String },
    /// Ball-level equivalence of two metrics.
    MetricEquiv { first: String, second: String },
    /// Shift axiom symbolically and extension closure by fuzzing.
    AxiomsFuzz,
    /// Strong triangle inequality and pushout invariance by fuzzing.
    StrongTriangleFuzz,
}

#[derive(Debug)]
struct Failure(String);

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure(e.to_string())
    }
}

impl From<crate::format::FormatError> for Failure {
    fn from(e: crate::format::FormatError) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

/// Parses arguments and runs one command; returns `(exit code, stdout, stderr)`.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                (code, String::new(), text)
            } else {
                (code, text, String::new())
            };
        }
    };
    match execute(&cli) {
        Ok(r) => (r.code, r.render(cli.format), String::new()),
        Err(Failure(msg)) => (exit::USAGE, String::new(), format!("error: {msg}\n")),
    }
}

fn parse_window(s: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure(format!("window must look like a..b, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(Failure(format!("empty window {a}..{b}")));
    }
    Ok((a, b))
}

struct Ctx<'a> {
    cli: &'a Cli,
    ws: Option<Workspace>,
}

impl Ctx<'_> {
    fn ws(&self) -> Result<&Workspace, Failure> {
        self.ws
            .as_ref()
            .ok_or_else(|| Failure("this command needs --workspace".into()))
    }

    fn ring(&self) -> Result<Ring, Failure> {
        if let Some(spec) = &self.cli.ring {
            let bad = || Failure(format!("ring must look like P,N, got `{spec}`"));
            let (p, n) = spec.split_once(',').ok_or_else(bad)?;
            return Ok(Ring::new(p.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?)?);
        }
        Ok(self.ws.as_ref().map_or_else(|| Ring::new(2, 2).expect("valid ring"), |w| w.ring))
    }

    /// `name[:dual][@t]`, standard or declared in the workspace.
    fn metric(&self, spec: &str) -> Result<GoodMetric, Failure> {
        let (base, shift) = match spec.rsplit_once('@') {
            Some((b, t)) => (
                b,
                Some(t.parse::<i64>().map_err(|_| Failure(format!("bad metric shift in `{spec}`")))?),
            ),
            None => (spec, None),
        };
        let (name, dual) = match base.strip_suffix(":dual") {
            Some(n) => (n, true),
            None => (base, false),
        };
        let declared = self.ws.as_ref().and_then(|w| w.metrics.get(name)).cloned();
        let mut m = match declared {
            Some(m) => m,
            None => GoodMetric::standard(name)
                .map_err(|_| Failure(format!("unknown metric `{name}`")))?,
        };
        if dual {
            m = m.dual();
        }
        if let Some(t) = shift {
            m = m.shifted(t);
        }
        Ok(m)
    }

    fn global_metric(&self) -> Result<GoodMetric, Failure> {
        let m = self.metric(&self.cli.metric)?;
        Ok(if self.cli.dual { m.dual() } else { m })
    }

    fn complex(&self, name: &str) -> Result<&Complex, Failure> {
        self.ws()?
            .complexes
            .get(name)
            .ok_or_else(|| Failure(format!("unknown complex `{name}`")))
    }

    fn tower(&self, name: &str) -> Result<&TowerDecl, Failure> {
        self.ws()?
            .towers
            .get(name)
            .ok_or_else(|| Failure(format!("unknown tower `{name}`")))
    }

    fn fuzz_config(&self) -> Result<FuzzConfig, Failure> {
        let seed = self
            .cli
            .seed
            .ok_or_else(|| Failure("fuzz commands require --seed".into()))?;
        Ok(FuzzConfig::new(self.ring()?, self.cli.samples, seed))
    }
}

fn execute(cli: &Cli) -> Outcome {
    let ws = match &cli.workspace {
        Some(p) => Some(Workspace::load(p)?),
        None => None,
    };
    let ctx = Ctx { cli, ws };
    match &cli.command {
        Command::Length { map } => cmd_length(&ctx, map),
        Command::Ball { complex, level } => cmd_ball(&ctx, complex, *level),
        Command::CauchyCheck { tower } => cmd_cauchy(&ctx, tower),
        Command::Colimit { tower } => cmd_colimit(&ctx, tower),
        Command::InS { tower } => cmd_in_s(&ctx, tower),
        Command::IsPerfect { complex } => {
            let x = ctx.complex(complex)?;
            Ok(boolean("is-perfect", complex, is_perfect(x), "perfect", "not perfect"))
        }
        Command::InjBounded { complex } => {
            let x = ctx.complex(complex)?;
            Ok(boolean(
                "inj-bounded",
                complex,
                has_bounded_injective_resolution(x),
                "has a bounded injective resolution",
                "has no bounded injective resolution",
            ))
        }
        Command::SingClass { complex } => cmd_sing_class(&ctx, complex),
        Command::SingHom { a, b } => cmd_sing_hom(&ctx, a, b),
        Command::MetricEquiv { first, second } => cmd_equiv(&ctx, first, second),
        Command::AxiomsFuzz => cmd_axioms(&ctx),
        Command::StrongTriangleFuzz => cmd_triangle(&ctx),
    }
}

fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

fn boolean(command: &str, name: &str, holds: bool, yes: &str, no: &str) -> Report {
    Report {
        code: if holds { exit::OK } else { exit::NEGATIVE },
        text: format!("{name}: {}", if holds { yes } else { no }),
        data: object(vec![
            ("command", json!(command)),
            ("complex", json!(name)),
            ("verdict", json!(holds)),
        ]),
    }
}

fn verdict_value(v: &Verdict) -> (Value, String, i32) {
    match v {
        Verdict::True => (json!(true), "true".into(), exit::OK),
        Verdict::False => (json!(false), "false".into(), exit::NEGATIVE),
        Verdict::Inconclusive(why) => (json!("inconclusive"), format!("inconclusive ({why})"), exit::INCONCLUSIVE),
    }
}

fn cmd_length(ctx: &Ctx, name: &str) -> Outcome {
    let decl = ctx
        .ws()?
        .maps
        .get(name)
        .ok_or_else(|| Failure(format!("unknown map `{name}`")))?;
    let m = ctx.global_metric()?;
    let l = length(&decl.map, &m);
    Ok(Report {
        code: exit::OK,
        text: format!("length({name}: {} -> {}) = {l}  [metric {m}]", decl.source, decl.target),
        data: object(vec![
            ("command", json!("length")),
            ("map", json!(name)),
            ("source", json!(decl.source)),
            ("target", json!(decl.target)),
            ("metric", json!(m.name())),
            ("length", report::length(l)),
        ]),
    })
}

fn cmd_ball(ctx: &Ctx, name: &str, level: Option<u64>) -> Outcome {
    let x = ctx.complex(name)?;
    let m = ctx.global_metric()?;
    let support = x.cohomology_support();
    let levels: Vec<u64> = match level {
        Some(n) => vec![n],
        None => (1..=ctx.cli.levels).collect(),
    };
    let mut text = format!("{name}, cohomology in degrees {support:?}, metric {m}\n");
    let mut rows = Vec::new();
    for &n in &levels {
        let v = m.vanishing_set(n);
        let member = in_ball(x, n, &m);
        text.push_str(&format!("B_{n}: vanish on {v}: {}\n", if member { "in" } else { "out" }));
        rows.push(object(vec![
            ("level", json!(n)),
            ("vanishing", json!(v.to_string())),
            ("member", json!(member)),
        ]));
    }
    let code = match level {
        Some(n) if !in_ball(x, n, &m) => exit::NEGATIVE,
        _ => exit::OK,
    };
    Ok(Report {
        code,
        text,
        data: object(vec![
            ("command", json!("ball")),
            ("complex", json!(name)),
            ("metric", json!(m.name())),
            ("support", json!(support)),
            ("levels", Value::Array(rows)),
        ]),
    })
}

fn level_value(n: usize, s: &LevelStatus) -> (Value, String) {
    match s {
        LevelStatus::Certified { threshold } => (
            object(vec![
                ("level", json!(n)),
                ("status", json!("certified")),
                ("threshold", json!(threshold)),
            ]),
            format!("M({n}) = {threshold}"),
        ),
        LevelStatus::Violated { i, j, length } => (
            object(vec![
                ("level", json!(n)),
                ("status", json!("violated")),
                ("i", json!(i)),
                ("j", json!(j)),
                ("length", report::length(*length)),
            ]),
            format!("level {n}: violated by X_{i} -> X_{j} of length {length}"),
        ),
        LevelStatus::Inconclusive => (
            object(vec![("level", json!(n)), ("status", json!("inconclusive"))]),
            format!("level {n}: inconclusive within horizon"),
        ),
    }
}

fn cmd_cauchy(ctx: &Ctx, name: &str) -> Outcome {
    let t = ctx.tower(name)?;
    let m = ctx.global_metric()?;
    let cert = is_cauchy(&t.tower, &m, ctx.cli.horizon, ctx.cli.levels)?;
    let (status, code) = match cert.status() {
        CauchyStatus::Cauchy => ("cauchy", exit::OK),
        CauchyStatus::NotCauchy => ("not-cauchy", exit::NEGATIVE),
        CauchyStatus::Inconclusive => ("inconclusive", exit::INCONCLUSIVE),
    };
    let mut text = format!(
        "tower {name}, metric {m}, horizon {}{}\n",
        cert.horizon,
        if cert.unconditional { " (holds past the horizon)" } else { "" }
    );
    let mut levels = Vec::new();
    for (k, s) in cert.levels.iter().enumerate() {
        let (v, line) = level_value(k + 1, s);
        levels.push(v);
        text.push_str(&line);
        text.push('\n');
    }
    text.push_str(&format!("verdict: {status}\n"));
    let lengths: Map<String, Value> = cert
        .lengths
        .iter()
        .map(|(&(i, j), &l)| (format!("{i}->{j}"), report::length(l)))
        .collect();
    Ok(Report {
        code,
        text,
        data: object(vec![
            ("command", json!("cauchy-check")),
            ("tower", json!(name)),
            ("metric", json!(m.name())),
            ("horizon", json!(cert.horizon)),
            ("unconditional", json!(cert.unconditional)),
            ("levels", Value::Array(levels)),
            ("lengths", Value::Object(lengths)),
            ("verdict", json!(status)),
        ]),
    })
}

fn cmd_colimit(ctx: &Ctx, name: &str) -> Outcome {
    let t = ctx.tower(name)?;
    let window = parse_window(&ctx.cli.window)?;
    let table = colimit(&t.tower, window, ctx.cli.horizon)?;
    let mut text = format!(
        "tower {name}, window {}..{}, horizon {}\n",
        window.0, window.1, table.horizon
    );
    let mut entries = Vec::new();
    for e in &table.entries {
        let index = e.index.map_or("unstable".to_string(), |k| format!("stable from X_{k}"));
        if !e.module.is_zero() || e.index.is_none() {
            text.push_str(&format!("H^{}: {} ({index})\n", e.degree, e.module));
        }
        entries.push(object(vec![
            ("degree", json!(e.degree)),
            ("module", report::module(&e.module)),
            ("index", json!(e.index)),
        ]));
    }
    let conclusive = table.is_conclusive();
    text.push_str(if conclusive {
        "conclusive\n"
    } else {
        "inconclusive\n"
    });
    Ok(Report {
        code: if conclusive { exit::OK } else { exit::INCONCLUSIVE },
        text,
        data: object(vec![
            ("command", json!("colimit")),
            ("tower", json!(name)),
            ("window", json!([window.0, window.1])),
            ("horizon", json!(table.horizon)),
            ("entries", Value::Array(entries)),
            ("conclusive", json!(conclusive)),
            ("inconclusive_degrees", json!(table.inconclusive_degrees())),
        ]),
    })
}

fn cmd_in_s(ctx: &Ctx, name: &str) -> Outcome {
    let t = ctx.tower(name)?;
    let m = ctx.global_metric()?;
    let window = parse_window(&ctx.cli.window)?;
    let c = CompletionObject::new(t.tower.clone(), m.clone(), ctx.cli.horizon, ctx.cli.levels, window)?;
    let verdict = in_s(&c)?;
    let (v, vtext, code) = verdict_value(&verdict);
    let support = is_compactly_supported(&c)?;
    let mut text = format!("tower {name}, metric {m}\n");
    text.push_str(&format!("colimit support: {:?}\n", support.support));
    if let Some(rep) = &c.representative {
        text.push_str(&format!("representative: {rep}\n"));
    }
    text.push_str(&format!("in S: {vtext}\n"));
    Ok(Report {
        code,
        text,
        data: object(vec![
            ("command", json!("in-s")),
            ("tower", json!(name)),
            ("metric", json!(m.name())),
            ("support", json!(support.support)),
            ("representative", c.representative.as_ref().map_or(Value::Null, report::complex)),
            ("spot_check", json!(support.spot_check)),
            ("verdict", v),
        ]),
    })
}

fn cmd_sing_class(ctx: &Ctx, name: &str) -> Outcome {
    let x = ctx.complex(name)?;
    let cls = syzygy_class(x);
    let text = if cls.is_zero() {
        format!("{name}: zero in the singularity category (perfect)")
    } else {
        format!("{name}: Ω^{}({})", cls.shift - 1, cls.module)
    };
    Ok(Report {
        code: exit::OK,
        text,
        data: object(vec![
            ("command", json!("sing-class")),
            ("complex", json!(name)),
            ("module", report::module(&cls.module)),
            ("shift", json!(cls.shift)),
            ("zero", json!(cls.is_zero())),
        ]),
    })
}

fn cmd_sing_hom(ctx: &Ctx, a: &str, b: &str) -> Outcome {
    let dim = sing_hom(&syzygy_class(ctx.complex(a)?), &syzygy_class(ctx.complex(b)?))?;
    Ok(Report {
        code: exit::OK,
        text: format!("dim Hom_sg({a}, {b}) = {dim}"),
        data: object(vec![
            ("command", json!("sing-hom")),
            ("source", json!(a)),
            ("target", json!(b)),
            ("dim", json!(dim)),
        ]),
    })
}

fn cmd_equiv(ctx: &Ctx, first: &str, second: &str) -> Outcome {
    let (m1, m2) = (ctx.metric(first)?, ctx.metric(second)?);
    let head = object(vec![
        ("command", json!("metric-equiv")),
        ("first", json!(m1.name())),
        ("second", json!(m2.name())),
        ("levels", json!(ctx.cli.levels)),
        ("bound", json!(ctx.cli.bound)),
    ]);
    let Value::Object(mut data) = head else { unreachable!() };
    match equivalent(&m1, &m2, ctx.cli.levels, ctx.cli.bound) {
        Equivalence::Equivalent { witness } => {
            let pairs: Vec<String> = witness
                .iter()
                .enumerate()
                .map(|(k, m)| format!("m({}) = {m}", k + 1))
                .collect();
            data.insert("verdict".into(), json!("equivalent"));
            data.insert("witness".into(), json!(witness));
            Ok(Report {
                code: exit::OK,
                text: format!("{m1} and {m2}: equivalent\n{}", pairs.join(", ")),
                data: Value::Object(data),
            })
        }
        Equivalence::NotEquivalent { level, separating } => {
            let mut text = format!(
                "{m1} and {m2}: not equivalent\nno m ≤ {} works at level {level}; separating objects:\n",
                ctx.cli.bound
            );
            let mut seps = Vec::new();
            for s in &separating {
                let (inside, outside) = if s.first_side { (&m1, &m2) } else { (&m2, &m1) };
                text.push_str(&format!(
                    "  m = {}: k at degree {} lies in B_{}({}) but not B_{}({})\n",
                    s.m,
                    s.degree,
                    if s.first_side { s.m } else { level },
                    inside,
                    if s.first_side { level } else { s.m },
                    outside
                ));
                seps.push(object(vec![
                    ("m", json!(s.m)),
                    ("degree", json!(s.degree)),
                    ("first_side", json!(s.first_side)),
                ]));
            }
            data.insert("verdict".into(), json!("not-equivalent"));
            data.insert("level".into(), json!(level));
            data.insert("separating".into(), Value::Array(seps));
            Ok(Report {
                code: exit::NEGATIVE,
                text,
                data: Value::Object(data),
            })
        }
    }
}

fn fuzz_value(r: &FuzzReport) -> Value {
    object(vec![
        ("samples", json!(r.samples)),
        ("violations", json!(r.violations)),
        (
            "first_violation",
            r.first_violation.as_ref().map_or(Value::Null, |v| {
                object(vec![("sample", json!(v.sample)), ("detail", json!(v.detail))])
            }),
        ),
    ])
}

fn fuzz_line(label: &str, r: &FuzzReport) -> String {
    match &r.first_violation {
        None => format!("{label}: {} samples, no violations\n", r.samples),
        Some(v) => format!(
            "{label}: {} of {} samples violate; first at sample {}: {}\n",
            r.violations, r.samples, v.sample, v.detail
        ),
    }
}

fn cmd_axioms(ctx: &Ctx) -> Outcome {
    let cfg = ctx.fuzz_config()?;
    let m = ctx.global_metric()?;
    let rep = check_good_axioms(&m, ctx.cli.levels, &cfg);
    let mut text = format!("metric {m}, ring {}, seed {}\n", cfg.ring, cfg.seed);
    let shift = match &rep.shift_violation {
        None => {
            text.push_str(&format!("shift axiom: holds for levels 1..={}\n", rep.levels_checked));
            Value::Null
        }
        Some(v) => {
            text.push_str(&format!(
                "shift axiom: fails at level {}, shift {}: {} is in B_{} but its shift is not in B_{}\n",
                v.level,
                v.shift,
                v.witness,
                v.level + 1,
                v.level
            ));
            object(vec![
                ("level", json!(v.level)),
                ("shift", json!(v.shift)),
                ("degree", json!(v.degree)),
                ("witness", report::complex(&v.witness)),
            ])
        }
    };
    text.push_str(&fuzz_line("extension closure", &rep.fuzz));
    let passed = rep.passed();
    text.push_str(if passed { "good metric\n" } else { "not a good metric\n" });
    Ok(Report {
        code: if passed { exit::OK } else { exit::NEGATIVE },
        text,
        data: object(vec![
            ("command", json!("axioms-fuzz")),
            ("metric", json!(m.name())),
            ("ring", json!([cfg.ring.p(), cfg.ring.n()])),
            ("seed", json!(cfg.seed)),
            ("levels", json!(rep.levels_checked)),
            ("shift_violation", shift),
            ("extension_fuzz", fuzz_value(&rep.fuzz)),
            ("passed", json!(passed)),
        ]),
    })
}

fn cmd_triangle(ctx: &Ctx) -> Outcome {
    let cfg = ctx.fuzz_config()?;
    let m = ctx.global_metric()?;
    let tri = strong_triangle_fuzz(&m, &cfg);
    let cart = cartesian_fuzz(&m, &cfg);
    let passed = tri.passed() && cart.passed();
    let mut text = format!("metric {m}, ring {}, seed {}\n", cfg.ring, cfg.seed);
    text.push_str(&fuzz_line("strong triangle", &tri));
    text.push_str(&fuzz_line("pushout invariance", &cart));
    Ok(Report {
        code: if passed { exit::OK } else { exit::NEGATIVE },
        text,
        data: object(vec![
            ("command", json!("strong-triangle-fuzz")),
            ("metric", json!(m.name())),
            ("ring", json!([cfg.ring.p(), cfg.ring.n()])),
            ("seed", json!(cfg.seed)),
            ("strong_triangle", fuzz_value(&tri)),
            ("cartesian", fuzz_value(&cart)),
            ("passed", json!(passed)),
        ]),
    })
}
