use anyhow::{anyhow, bail, Context, Result};
use atlas::at_verify::{self, base_point_library, default_seed, neighborhood_samples, verify_x0, verify_zero, Format, Grid};
use atlas::germ_engine::{dgamma_table, dorb1, germ_coeff, phi_closed};
use atlas::integrator::{iwasawa_orbit_u0_counted, phi_oracle_counted, IntegratorConfig};
use atlas::keating::{l_int, l_int_closed, l_int_keating, MlParams};
use atlas::orbit_space::{
    classify_degenerate, n_beta, orbit_reps, DegenerateCase, RepTag, u0_semisimple, BPoint, BPointWire, SRedElt, SRedWire, Side, Space,
    U0RedElt, U0RedWire, U1RedElt, U1RedWire,
};
use atlas::orbital_values::{
    forced_s_values, orb_nil_family_s, orb_nil_reg_s, orb_nil_u0, orb_u0_ss, orb_u0_ss_case0, orb_u0_ss_case1, NilSign,
};
use atlas::padic_core::{PadicScalar, Val};
use atlas::svalue::LogQVal;
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "atlas", version, about = "Both sides of the n = 3 ramified arithmetic transfer identity, in exact arithmetic")]
struct Cli {
    /// Relative precision (digits) for reported invariants; exact when omitted
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Explicit shells on each side before the tails are summed in closed form
    #[arg(long, global = true, default_value_t = 30)]
    shell_window: i64,
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Csv,
    Text,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Self {
        match f {
            Fmt::Json => Format::Json,
            Fmt::Csv => Format::Csv,
            Fmt::Text => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that φ₁ is constant near a degenerate base point
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// ℓ-Int over a box of (m, ℓ₋, ℓ₊); ranges are written a..b
    #[command(group(ArgGroup::new("method").args(["oracle", "closed", "both"])))]
    Lint {
        #[arg(long)]
        m: String,
        #[arg(long)]
        lminus: String,
        /// Odd values or `inf`
        #[arg(long)]
        lplus: String,
        /// Comma-separated primes
        #[arg(long, default_value = "3")]
        p: String,
        /// Keating's quasi-canonical sum
        #[arg(long)]
        oracle: bool,
        /// Closed forms by case (default)
        #[arg(long)]
        closed: bool,
        /// Both, failing on any disagreement
        #[arg(long)]
        both: bool,
    },
    /// An orbital integral, closed form or shell-sum oracle
    Orb {
        #[arg(long, value_enum)]
        kind: OrbKind,
        /// key=value pairs, e.g. `lambda0=9` or `lambda=1,u=1,wtilde=0`
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        p: u32,
        /// Evaluate by shell summation and compare with the closed form
        #[arg(long)]
        oracle: bool,
    },
    /// Germ coefficients and per-orbit contributions to ∂Orb₁ at x near x0
    Germ {
        /// λ,u,w̃ of the base point
        #[arg(long)]
        x0: String,
        /// λ,u,w̃ of the point
        #[arg(long)]
        x: String,
        #[arg(long)]
        p: u32,
        /// Only the coefficients at s = 0
        #[arg(long, conflicts_with = "ds")]
        s0: bool,
        /// Only the derivatives at s = 0
        #[arg(long)]
        ds: bool,
    },
    /// Invariants of an element given as JSON
    Invariants {
        #[arg(long)]
        elem: PathBuf,
        /// Prime, when the file does not record one
        #[arg(long)]
        p: Option<u32>,
    },
    /// Listed orbital integral values
    Values {
        #[arg(long, value_enum)]
        what: ValuesKind,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        p: u32,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Exact check of the constant 4t(t−3)/(1−t)²·log q over a grid
    Zero {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 8)]
        m_max: i64,
        #[arg(long, default_value_t = 19)]
        l_max: i64,
    },
    /// Constancy by differencing around base points from a file or the built-in library
    #[command(group(ArgGroup::new("source").required(true).args(["spec", "library"])))]
    X0 {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        library: bool,
        /// Prime for --library
        #[arg(long, default_value_t = 3)]
        p: u32,
        /// Samples per ℓ-Int case when none are given
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbKind {
    NilU0,
    SsU0Case0,
    SsU0Case1,
    Xi,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValuesKind {
    NilS,
    NilU0,
    SsU0,
    ForcedS,
}

#[derive(Deserialize)]
struct X0Spec {
    p: u32,
    #[serde(default)]
    samples: Option<usize>,
    base_points: Vec<X0Entry>,
}

#[derive(Deserialize)]
struct X0Entry {
    #[serde(flatten)]
    x0: BPointWire,
    #[serde(default)]
    samples: Vec<BPointWire>,
}

fn parse_q(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().with_context(|| format!("bad number {s:?}"))?;
    let d: BigInt = d.trim().parse().with_context(|| format!("bad number {s:?}"))?;
    if d == BigInt::from(0) {
        bail!("zero denominator in {s:?}");
    }
    Ok(BigRational::new(n, d))
}

fn scalar(p: u32, s: &str) -> Result<PadicScalar> {
    Ok(PadicScalar::exact(p, parse_q(s)?))
}

fn point(p: u32, s: &str) -> Result<BPoint> {
    let parts: Vec<&str> = s.split(',').collect();
    let [l, u, w] = parts.as_slice() else { bail!("expected λ,u,w̃ but got {s:?}") };
    Ok(BPoint::new(scalar(p, l)?, scalar(p, u)?, scalar(p, w)?))
}

fn params(p: u32, s: &str) -> Result<BTreeMap<String, PadicScalar>> {
    s.split(',')
        .filter(|kv| !kv.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {kv:?}"))?;
            Ok((k.trim().to_string(), scalar(p, v)?))
        })
        .collect()
}

fn need<'a>(m: &'a BTreeMap<String, PadicScalar>, k: &str) -> Result<&'a PadicScalar> {
    m.get(k).ok_or_else(|| anyhow!("missing parameter {k}"))
}

fn base_from(p: u32, m: &BTreeMap<String, PadicScalar>, suffix: &str) -> Result<BPoint> {
    let keys = ["lambda", "u", "wtilde"].map(|k| format!("{k}{suffix}"));
    if let Some(k) = m.keys().find(|k| !keys.contains(k)) {
        bail!("unknown parameter {k}; expected {}", keys.join(", "));
    }
    let get = |k: &str| m.get(&format!("{k}{suffix}")).cloned().unwrap_or_else(|| PadicScalar::zero(p));
    Ok(BPoint::new(get("lambda"), get("u"), get("wtilde")))
}

/// `a`, `a..b` (inclusive) or a comma list of those.
fn range(s: &str, allow_inf: bool) -> Result<Vec<Val>> {
    let mut out = vec![];
    for part in s.split(',') {
        let part = part.trim();
        if allow_inf && part == "inf" {
            out.push(Val::Inf);
        } else if let Some((a, b)) = part.split_once("..") {
            let (a, b): (i64, i64) = (a.parse()?, b.parse()?);
            out.extend((a..=b).map(Val::Fin));
        } else {
            out.push(Val::Fin(part.parse().with_context(|| format!("bad value {part:?}"))?));
        }
    }
    Ok(out)
}

fn fin(v: Val) -> Result<i64> {
    match v {
        Val::Fin(k) => Ok(k),
        Val::Inf => bail!("∞ is only allowed for ℓ₊"),
    }
}

fn val_str(v: Val) -> String {
    match v {
        Val::Fin(k) => k.to_string(),
        Val::Inf => "inf".into(),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Rows of flat objects in the requested format.
fn emit(rows: &[Value], fmt: Fmt) -> Result<String> {
    match fmt {
        Fmt::Json => Ok(serde_json::to_string_pretty(rows)?),
        Fmt::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            let keys: Vec<String> = match rows.first() {
                Some(Value::Object(m)) => m.keys().cloned().collect(),
                _ => vec![],
            };
            w.write_record(&keys)?;
            for r in rows {
                w.write_record(keys.iter().map(|k| cell(&r[k])))?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Fmt::Text => Ok(rows
            .iter()
            .map(|r| match r {
                Value::Object(m) => m.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect::<Vec<_>>().join(" "),
                other => cell(other),
            })
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"),
    }
}

fn lv(v: &LogQVal) -> Value {
    Value::String(v.to_string())
}

fn row(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

struct Outcome {
    text: String,
    ok: bool,
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = IntegratorConfig { window: cli.shell_window, ..IntegratorConfig::default() };
    match &cli.cmd {
        Cmd::Verify { which } => {
            let reports = match which {
                VerifyCmd::Zero { p, m_max, l_max } => vec![verify_zero(*p, Grid { m_max: *m_max, l_max: *l_max })?],
                VerifyCmd::X0 { spec, library, p, samples } => {
                    let seed = default_seed();
                    let mut out = vec![];
                    if *library {
                        for (_, x0) in base_point_library(*p) {
                            out.push(verify_x0(&x0, &neighborhood_samples(&x0, *samples, seed)?)?);
                        }
                    }
                    if let Some(path) = spec {
                        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                        let spec: X0Spec = serde_json::from_str(&text)?;
                        let want = spec.samples.unwrap_or(*samples);
                        for e in &spec.base_points {
                            let x0 = BPoint::from_wire(&e.x0, spec.p)?;
                            let xs = if e.samples.is_empty() {
                                neighborhood_samples(&x0, want, seed)?
                            } else {
                                e.samples.iter().map(|w| BPoint::from_wire(w, spec.p)).collect::<atlas::error::Result<_>>()?
                            };
                            out.push(verify_x0(&x0, &xs)?);
                        }
                    }
                    out
                }
            };
            let ok = reports.iter().all(|r| r.passed());
            Ok(Outcome { text: at_verify::report(&reports, cli.format.into())?, ok })
        }
        Cmd::Lint { m, lminus, lplus, p, oracle, closed: _, both } => {
            let primes: Vec<u32> = p.split(',').map(|s| s.trim().parse()).collect::<std::result::Result<_, _>>()?;
            let mut rows = vec![];
            let mut ok = true;
            let mut skipped = 0;
            for &p in &primes {
                for m in range(m, false)? {
                    for lm in range(lminus, false)? {
                        for &lp in &range(lplus, true)? {
                            let t = MlParams::new(fin(m)?, fin(lm)?, lp);
                            if t.validate().is_err() {
                                skipped += 1;
                                continue;
                            }
                            let mut push = |method: &str, v: &BigRational| {
                                rows.push(row(vec![
                                    ("m", json!(t.m)),
                                    ("ell_minus", json!(t.ell_minus)),
                                    ("ell_plus", json!(val_str(t.ell_plus))),
                                    ("p", json!(p)),
                                    ("value", json!(v.to_string())),
                                    ("method", json!(method)),
                                ]))
                            };
                            if *both {
                                let (a, b) = (l_int_keating(t, p)?, l_int_closed(t, p)?);
                                ok &= a == b;
                                push("oracle", &a);
                                push("closed", &b);
                            } else if *oracle {
                                push("oracle", &l_int_keating(t, p)?);
                            } else {
                                push("closed", &l_int_closed(t, p)?);
                            }
                        }
                    }
                }
            }
            if skipped > 0 {
                eprintln!("skipped {skipped} inconsistent triples");
            }
            Ok(Outcome { text: emit(&rows, cli.format)?, ok })
        }
        Cmd::Orb { kind, params: ps, p, oracle } => {
            let p = *p;
            let m = params(p, ps)?;
            let (closed, elt): (LogQVal, Option<U0RedElt>) = match kind {
                OrbKind::NilU0 => {
                    let b = need(&m, "beta").or_else(|_| need(&m, "mu"))?;
                    (LogQVal::rational(orb_nil_u0(b)?), Some(n_beta(b)))
                }
                OrbKind::SsU0Case0 => {
                    let l = need(&m, "lambda0")?;
                    let x0 = BPoint::new(l.clone(), PadicScalar::zero(p), PadicScalar::zero(p));
                    (LogQVal::rational(orb_u0_ss_case0(l)?), Some(u0_semisimple(&x0)?))
                }
                OrbKind::SsU0Case1 => {
                    let x0 = base_from(p, &m, "0")?;
                    (LogQVal::rational(orb_u0_ss_case1(&x0.lambda, &x0.u, &x0.wtilde)?), Some(u0_semisimple(&x0)?))
                }
                OrbKind::Xi => (phi_closed(&base_from(p, &m, "")?)?, None),
            };
            let mut pairs = vec![];
            let mut ok = true;
            if *oracle {
                let c = match &elt {
                    Some(y) => iwasawa_orbit_u0_counted(y, false, &cfg)?,
                    None => phi_oracle_counted(&base_from(p, &m, "")?, &cfg)?,
                };
                ok = c.value == closed;
                pairs.extend([
                    ("value", lv(&c.value)),
                    ("method", json!("oracle")),
                    ("shells_used", json!(c.shells_used)),
                    ("closed", lv(&closed)),
                    ("agrees", json!(ok)),
                ]);
            } else {
                pairs.extend([("value", lv(&closed)), ("method", json!("closed")), ("shells_used", Value::Null)]);
            }
            let r = row(pairs);
            let text = match cli.format {
                Fmt::Json => serde_json::to_string_pretty(&r)?,
                f => emit(&[r], f)?,
            };
            Ok(Outcome { text, ok })
        }
        Cmd::Germ { x0, x, p, s0, ds } => {
            let (x0, x) = (point(*p, x0)?, point(*p, x)?);
            if !x.is_rs()? {
                bail!("{x} is not regular semisimple");
            }
            let case = classify_degenerate(&x0)?;
            let mut terms = vec![];
            // n(μ) enters through Φ and y₀ carries no germ term
            for rep in orbit_reps(&x0, Space::SRed)?.into_iter().filter(|r| !matches!(r.tag, RepTag::NMu | RepTag::Y0)) {
                let mut pairs = vec![("rep", json!(rep.tag.to_string()))];
                let coeff = germ_coeff(&x0, &rep, &x)?;
                if !*ds {
                    pairs.push(("gamma_s0", coeff.as_ref().map_or(Value::Null, |c| json!(c.value_at_0.to_string()))));
                }
                if !*s0 {
                    let d = dgamma_table(&x0, &rep, &x)?;
                    pairs.push(("dgamma_s0", d.as_ref().map_or(Value::Null, lv)));
                    let orb = forced_s_values(&x0, &rep).ok();
                    pairs.push(("orb", orb.as_ref().map_or(Value::Null, |o| json!(o.to_string()))));
                    let prod = match (d, orb) {
                        (Some(d), Some(o)) => lv(&d.scale(&o)),
                        _ => Value::Null,
                    };
                    pairs.push(("product", prod));
                }
                terms.push(row(pairs));
            }
            let text = match cli.format {
                Fmt::Json => {
                    let mut out = json!({ "x0": x0, "x": x, "case": case.name(), "terms": terms });
                    if !*s0 {
                        let d = dorb1(&x0, &x)?;
                        out["dorb1"] = lv(&d.varying);
                        out["constant"] = json!(d.constant_tag);
                        if case == DegenerateCase::Zero {
                            out["phi"] = lv(&phi_closed(&x)?);
                        }
                    }
                    serde_json::to_string_pretty(&out)?
                }
                f => emit(&terms, f)?,
            };
            Ok(Outcome { text, ok: true })
        }
        Cmd::Invariants { elem, p } => {
            let text = std::fs::read_to_string(elem).with_context(|| format!("reading {}", elem.display()))?;
            let v: Value = serde_json::from_str(&text)?;
            let p = v.get("p").and_then(Value::as_u64).map(|p| p as u32).or(*p).ok_or_else(|| anyhow!("no prime given"))?;
            let x = match v.get("space").and_then(Value::as_str) {
                Some("s_red") => SRedElt::from_wire(&serde_json::from_value::<SRedWire>(v)?, p)?.invariants(),
                Some("u0_red") => U0RedElt::from_wire(&serde_json::from_value::<U0RedWire>(v)?, p)?.invariants()?,
                Some("u1_red") => U1RedElt::from_wire(&serde_json::from_value::<U1RedWire>(v)?, p)?.invariants()?,
                other => bail!("unknown space {other:?}"),
            };
            let x = match cli.precision {
                Some(n) => BPoint::new(cap(&x.lambda, n), cap(&x.u, n), cap(&x.wtilde, n)),
                None => x,
            };
            let side = x.classify_side().ok().map(|s| if s == Side::One { 1 } else { 0 });
            let mut pairs = vec![
                ("lambda", json!(x.lambda.to_string())),
                ("u", json!(x.u.to_string())),
                ("wtilde", json!(x.wtilde.to_string())),
                ("delta", json!(x.delta().to_string())),
                ("rs", json!(x.is_rs().ok())),
                ("side", json!(side)),
            ];
            match (side, x.ml_params()) {
                (Some(1), Ok(t)) => pairs.extend([
                    ("m", json!(t.m)),
                    ("ell_minus", json!(t.ell_minus)),
                    ("ell_plus", json!(val_str(t.ell_plus))),
                    ("l_int", json!(l_int(&x)?.to_string())),
                ]),
                _ => pairs.extend([("m", Value::Null), ("ell_minus", Value::Null), ("ell_plus", Value::Null), ("l_int", Value::Null)]),
            }
            Ok(Outcome { text: emit(&[row(pairs)], cli.format)?, ok: true })
        }
        Cmd::Values { what, params: ps, p } => {
            let p = *p;
            let m = params(p, ps)?;
            let mut rows = vec![];
            let mut push = |rep: String, v: String| rows.push(row(vec![("rep", json!(rep)), ("value", json!(v))]));
            match what {
                ValuesKind::NilS => match m.get("mu") {
                    Some(mu) => push(format!("n({mu})"), orb_nil_family_s(mu)?.to_string()),
                    None => {
                        push("n0+".into(), orb_nil_reg_s(NilSign::Plus, p).to_string());
                        push("n0-".into(), orb_nil_reg_s(NilSign::Minus, p).to_string());
                    }
                },
                ValuesKind::NilU0 => {
                    let b = need(&m, "beta")?;
                    push(format!("n({b})"), orb_nil_u0(b)?.to_string());
                }
                ValuesKind::SsU0 => push("y0".into(), orb_u0_ss(&base_from(p, &m, "0")?)?.to_string()),
                ValuesKind::ForcedS => {
                    let x0 = base_from(p, &m, "0")?;
                    for rep in orbit_reps(&x0, Space::SRed)? {
                        if let Ok(v) = forced_s_values(&x0, &rep) {
                            push(rep.tag.to_string(), v.to_string());
                        }
                    }
                }
            }
            Ok(Outcome { text: emit(&rows, cli.format)?, ok: true })
        }
    }
}

fn cap(x: &PadicScalar, n: u32) -> PadicScalar {
    x.to_capped(n)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.text);
            if !o.text.ends_with('\n') {
                println!();
            }
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
