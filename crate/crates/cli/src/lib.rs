//! Command-line front end over the `zetafam` library.
//!
//! Every command writes JSON-lines records tagged `"schema": "zetafam/1"`.
//! Object keys serialize in sorted order and all randomness is seeded, so
//! runs are byte-for-byte reproducible apart from `timing_ms` fields.
//!
//! Exit codes: 0 success, 1 gate failure or refusal, 2 internal
//! inconsistency (a cross-check disagreed), 3 bad input or I/O failure.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use zetafam::ecurve::EllipticCurve;
use zetafam::family::{parse_family, FamilyKind, FamilySpec, GateReport, Specialization, SpecializedCurve};
use zetafam::ff::{make_field, FieldCtx, FieldElement};
use zetafam::hyperell::HyperCurve;
use zetafam::planecurve::{PlaneForm, SingularityKind};
use zetafam::upoly::UPoly;
use zetafam::zeta::ZetaNumerator;
use zetafam::Error;

const SCHEMA: &str = "zetafam/1";

#[derive(Parser, Debug)]
#[command(name = "zetafam", version, about = "Point counts and zeta functions of curve families over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write records to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Pretty-print each record (still one record per blank-line-free block).
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Seed for all pseudo-random checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Largest number of field evaluations any enumeration may perform.
    #[arg(long = "cap-enum", global = true, default_value_t = 1_000_000)]
    pub cap_enum: u64,

    /// Largest group-order interval a baby-step giant-step search may walk.
    #[arg(long = "cap-interval", global = true, default_value_t = 100_000_000)]
    pub cap_interval: u64,
}

/// Field and member selection shared by the family commands.
#[derive(Args, Debug, Clone)]
pub struct MemberArgs {
    /// Path to a family description (JSON).
    #[arg(long, value_name = "PATH")]
    pub family: PathBuf,

    /// Field characteristic: an odd prime below 2^61.
    #[arg(long)]
    pub p: u64,

    /// Extension degree of the coefficient field.
    #[arg(long, default_value_t = 1)]
    pub ext: usize,

    /// Parameter value as `name=integer`; repeat once per family parameter.
    /// Integers map into the field; negatives wrap.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub sets: Vec<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepWhat {
    /// Evaluate the degeneracy gate only.
    Gate,
    /// Gate, then count points on members that pass.
    Count,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the Frobenius trace of y^2 = x^3 + A x + B by the modular
    /// method and report t, #E(F_q), and the residues used.
    Schoof {
        /// Field characteristic: an odd prime below 2^61.
        #[arg(long)]
        p: u64,
        /// Extension degree of the coefficient field.
        #[arg(long, default_value_t = 1)]
        ext: usize,
        /// Coefficient A as an integer (wraps into the field).
        #[arg(long, allow_negative_numbers = true)]
        a: i128,
        /// Coefficient B as an integer (wraps into the field).
        #[arg(long, allow_negative_numbers = true)]
        b: i128,
    },
    /// Evaluate the degeneracy gate at one parameter point.
    Gate {
        #[command(flatten)]
        member: MemberArgs,
        /// Also test a line a,b,c against plane members: the gate fails if
        /// aX + bY + cZ divides the form.
        #[arg(long, value_name = "A,B,C")]
        line: Option<String>,
    },
    /// Count rational points on one gated member.
    Count {
        #[command(flatten)]
        member: MemberArgs,
    },
    /// Compute the zeta-function numerator of one gated member, with
    /// consistency checks. Refused for plane families; use `plane`.
    Zeta {
        #[command(flatten)]
        member: MemberArgs,
        /// Pseudo-random divisor classes to test against the Jacobian order.
        #[arg(long, default_value_t = 4)]
        trials: u32,
    },
    /// Analyze a plane projective curve: counts, singular points with their
    /// classification, corrected smooth count, and a genus bound. Accepts a
    /// literal form or a family member, without gating.
    Plane {
        /// Field characteristic: an odd prime below 2^61.
        #[arg(long)]
        p: u64,
        /// Extension degree of the coefficient field.
        #[arg(long, default_value_t = 1)]
        ext: usize,
        /// Literal homogeneous form in X, Y, Z with integer coefficients.
        #[arg(long, conflicts_with = "family")]
        form: Option<String>,
        /// Path to a plane family description (JSON).
        #[arg(long, value_name = "PATH")]
        family: Option<PathBuf>,
        /// Parameter value as `name=integer` (with --family).
        #[arg(long = "set", value_name = "NAME=VALUE")]
        sets: Vec<String>,
        /// Search for singular points over extensions up to this degree.
        #[arg(long, default_value_t = 2)]
        singular_degree: u32,
    },
    /// Cross-validate independent computation paths on built-in fixtures.
    /// Exits 2 if any two paths disagree.
    Selfcheck,
    /// Evaluate every member of a parameter box: gate each tuple, and with
    /// --what count also count points on members that pass.
    Sweep {
        /// Path to a family description (JSON).
        #[arg(long, value_name = "PATH")]
        family: PathBuf,
        /// Field characteristic: an odd prime below 2^61.
        #[arg(long)]
        p: u64,
        /// Extension degree of the coefficient field.
        #[arg(long, default_value_t = 1)]
        ext: usize,
        /// Fixed parameter value as `name=integer`.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        sets: Vec<String>,
        /// Swept parameter as `name=lo..hi` (hi exclusive).
        #[arg(long = "range", value_name = "NAME=LO..HI")]
        ranges: Vec<String>,
        #[arg(long, value_enum, default_value_t = SweepWhat::Gate)]
        what: SweepWhat,
        /// Worker threads. The output is identical for any worker count.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Schoof { .. } => "schoof",
            Command::Gate { .. } => "gate",
            Command::Count { .. } => "count",
            Command::Zeta { .. } => "zeta",
            Command::Plane { .. } => "plane",
            Command::Selfcheck => "selfcheck",
            Command::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Clone, Copy)]
struct Global {
    pretty: bool,
    seed: u64,
    cap_enum: u64,
    cap_interval: u64,
}

enum CmdError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> CmdError {
        CmdError::Lib(e)
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> CmdError {
        CmdError::Io(e)
    }
}

type CmdResult<T> = std::result::Result<T, CmdError>;

/// Parse arguments, dispatch, and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.output.clone() {
        Some(path) => {
            let file = match fs::File::create(&path) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("zetafam: cannot open {}: {e}", path.display());
                    return 3;
                }
            };
            let mut w = io::BufWriter::new(file);
            let code = run_to_writer(cli, &mut w);
            if w.flush().is_err() {
                return 3;
            }
            code
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            run_to_writer(cli, &mut w)
        }
    }
}

/// Dispatch against an arbitrary writer (used directly by tests).
pub fn run_to_writer(cli: Cli, w: &mut dyn Write) -> i32 {
    let g = Global {
        pretty: cli.pretty,
        seed: cli.seed,
        cap_enum: cli.cap_enum,
        cap_interval: cli.cap_interval,
    };
    let name = cli.command.name();
    let outcome = match cli.command {
        Command::Schoof { p, ext, a, b } => cmd_schoof(g, w, p, ext, a, b),
        Command::Gate { member, line } => cmd_gate(g, w, &member, line.as_deref()),
        Command::Count { member } => cmd_count(g, w, &member),
        Command::Zeta { member, trials } => cmd_zeta(g, w, &member, trials),
        Command::Plane {
            p,
            ext,
            form,
            family,
            sets,
            singular_degree,
        } => cmd_plane(g, w, p, ext, form.as_deref(), family.as_ref(), &sets, singular_degree),
        Command::Selfcheck => cmd_selfcheck(g, w),
        Command::Sweep {
            family,
            p,
            ext,
            sets,
            ranges,
            what,
            workers,
        } => cmd_sweep(g, w, &family, p, ext, &sets, &ranges, what, workers),
    };
    match outcome {
        Ok(code) => code,
        Err(CmdError::Io(e)) => {
            eprintln!("zetafam: i/o error: {e}");
            3
        }
        Err(CmdError::Lib(e)) => {
            let code = exit_code_for(&e);
            let mut rec = envelope(name);
            ins(&mut rec, "error", Value::String(e.to_string()));
            if let Error::GateFailed(report) = &e {
                ins(&mut rec, "gate", gate_json(report));
            }
            let _ = emit(w, &Value::Object(rec), g.pretty);
            code
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::GateFailed(_)
        | Error::Unsupported(_)
        | Error::UnsupportedSingularity(_)
        | Error::CapExceeded { .. } => 1,
        Error::Internal(_)
        | Error::WeilBoundViolated(_)
        | Error::NonIntegralCoefficient(_)
        | Error::NoChartApplies
        | Error::NoOrderFound => 2,
        _ => 3,
    }
}

// ---------------------------------------------------------------------------
// JSON helpers. serde_json maps are sorted, so key order never varies.
// ---------------------------------------------------------------------------

fn envelope(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(SCHEMA.into()));
    m.insert("command".into(), Value::String(command.into()));
    m
}

fn ins(m: &mut Map<String, Value>, key: &str, v: Value) {
    m.insert(key.to_string(), v);
}

fn emit(w: &mut dyn Write, v: &Value, pretty: bool) -> io::Result<()> {
    if pretty {
        serde_json::to_writer_pretty(&mut *w, v)?;
    } else {
        serde_json::to_writer(&mut *w, v)?;
    }
    writeln!(w)
}

/// Field elements serialize as their canonical index, in decimal, as a
/// string: exact for any field size and uniform across base and extension
/// fields.
fn fe_json(v: &FieldElement) -> Value {
    Value::String(v.canonical_index().to_string())
}

fn biguint_json(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => Value::from(v),
        None => Value::String(n.to_string()),
    }
}

fn bigint_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(n.to_string()),
    }
}

fn gate_json(r: &GateReport) -> Value {
    let values: Map<String, Value> = r
        .values
        .iter()
        .map(|(k, v)| (k.clone(), fe_json(v)))
        .collect();
    let mut m = Map::new();
    m.insert("passed".into(), Value::Bool(r.passed));
    m.insert("values".into(), Value::Object(values));
    m.insert(
        "failure_reason".into(),
        match &r.failure_reason {
            Some(s) => Value::String(s.clone()),
            None => Value::Null,
        },
    );
    Value::Object(m)
}

fn zeta_json(z: &ZetaNumerator) -> Value {
    let coeffs: Vec<Value> = z
        .coeffs()
        .iter()
        .map(|c| Value::String(c.to_string()))
        .collect();
    let mut m = Map::new();
    m.insert("genus".into(), Value::from(z.genus() as u64));
    m.insert("q".into(), biguint_json(z.q()));
    m.insert("coeffs".into(), Value::Array(coeffs));
    Value::Object(m)
}

fn timing_ms(start: Instant) -> Value {
    Value::from(start.elapsed().as_millis() as u64)
}

// ---------------------------------------------------------------------------
// Argument parsing helpers.
// ---------------------------------------------------------------------------

fn parse_set(s: &str) -> zetafam::Result<(String, i128)> {
    let (name, val) = s
        .split_once('=')
        .ok_or_else(|| Error::ParseError(format!("--set expects name=value, got `{s}`")))?;
    let v: i128 = val
        .trim()
        .parse()
        .map_err(|_| Error::ParseError(format!("invalid integer `{val}` for parameter `{name}`")))?;
    Ok((name.trim().to_string(), v))
}

fn parse_range(s: &str) -> zetafam::Result<(String, i128, i128)> {
    let (name, rest) = s
        .split_once('=')
        .ok_or_else(|| Error::ParseError(format!("--range expects name=lo..hi, got `{s}`")))?;
    let (lo, hi) = rest
        .split_once("..")
        .ok_or_else(|| Error::ParseError(format!("--range expects name=lo..hi, got `{s}`")))?;
    let lo: i128 = lo
        .trim()
        .parse()
        .map_err(|_| Error::ParseError(format!("invalid range start `{lo}` for `{name}`")))?;
    let hi: i128 = hi
        .trim()
        .parse()
        .map_err(|_| Error::ParseError(format!("invalid range end `{hi}` for `{name}`")))?;
    if lo >= hi {
        return Err(Error::ParseError(format!(
            "empty range {lo}..{hi} for `{name}`"
        )));
    }
    Ok((name.trim().to_string(), lo, hi))
}

fn parse_line_arg(ctx: &FieldCtx, s: &str) -> zetafam::Result<(FieldElement, FieldElement, FieldElement)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::ParseError(format!(
            "--line expects three comma-separated integers, got `{s}`"
        )));
    }
    let mut vals = Vec::with_capacity(3);
    for part in parts {
        let v: i128 = part
            .trim()
            .parse()
            .map_err(|_| Error::ParseError(format!("invalid line coefficient `{part}`")))?;
        vals.push(ctx.from_integer(v));
    }
    Ok((vals[0].clone(), vals[1].clone(), vals[2].clone()))
}

fn read_family(path: &PathBuf) -> zetafam::Result<FamilySpec> {
    let src = fs::read_to_string(path)
        .map_err(|e| Error::ParseError(format!("cannot read family file {}: {e}", path.display())))?;
    parse_family(&src)
}

/// Resolve `--set` assignments into the family's parameter order: every
/// parameter exactly once, no strangers.
fn resolve_values(
    spec: &FamilySpec,
    ctx: &FieldCtx,
    sets: &[String],
) -> zetafam::Result<Vec<FieldElement>> {
    let assigned: Vec<(String, i128)> = sets
        .iter()
        .map(|s| parse_set(s))
        .collect::<zetafam::Result<_>>()?;
    for (name, _) in &assigned {
        if !spec.params.iter().any(|p| p == name) {
            return Err(Error::ParseError(format!(
                "`{name}` is not a parameter of this family"
            )));
        }
    }
    let mut values = Vec::with_capacity(spec.params.len());
    for name in &spec.params {
        let hits: Vec<i128> = assigned
            .iter()
            .filter(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .collect();
        match hits.len() {
            1 => values.push(ctx.from_integer(hits[0])),
            0 => {
                return Err(Error::ParseError(format!(
                    "missing --set for parameter `{name}`"
                )))
            }
            _ => {
                return Err(Error::ParseError(format!(
                    "parameter `{name}` set more than once"
                )))
            }
        }
    }
    Ok(values)
}

fn load_member(m: &MemberArgs) -> zetafam::Result<Specialization> {
    let spec = read_family(&m.family)?;
    let ctx = make_field(m.p, m.ext)?;
    let values = resolve_values(&spec, &ctx, &m.sets)?;
    Specialization::new(spec, ctx, values)
}

fn params_json(s: &Specialization) -> Value {
    let m: Map<String, Value> = s
        .family()
        .params
        .iter()
        .zip(s.values())
        .map(|(name, v)| (name.clone(), fe_json(v)))
        .collect();
    Value::Object(m)
}

fn family_json(spec: &FamilySpec) -> Value {
    serde_json::to_value(spec).expect("family specs serialize")
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

fn cmd_schoof(g: Global, w: &mut dyn Write, p: u64, ext: usize, a: i128, b: i128) -> CmdResult<i32> {
    let start = Instant::now();
    let ctx = make_field(p, ext)?;
    let curve = EllipticCurve::new(ctx.from_integer(a), ctx.from_integer(b))?;
    let tr = curve.schoof_trace()?;
    let mut rec = envelope("schoof");
    ins(&mut rec, "q", biguint_json(ctx.q()));
    ins(&mut rec, "A", fe_json(curve.a()));
    ins(&mut rec, "B", fe_json(curve.b()));
    ins(&mut rec, "t", bigint_json(&tr.t));
    ins(&mut rec, "N1", biguint_json(&tr.n1()));
    ins(
        &mut rec,
        "residues",
        serde_json::to_value(&tr.residues).expect("residues serialize"),
    );
    ins(&mut rec, "timing_ms", timing_ms(start));
    emit(w, &Value::Object(rec), g.pretty)?;
    Ok(0)
}

fn cmd_gate(g: Global, w: &mut dyn Write, m: &MemberArgs, line: Option<&str>) -> CmdResult<i32> {
    let start = Instant::now();
    let s = load_member(m)?;
    let report = s.discriminant_gate_with_bound(2, g.cap_enum)?;
    let divisor_ok = match line {
        None => None,
        Some(text) => {
            let (a, b, c) = parse_line_arg(s.ctx(), text)?;
            Some(s.divisor_gate(Some((&a, &b, &c)))?)
        }
    };
    let mut rec = envelope("gate");
    ins(&mut rec, "family", family_json(s.family()));
    ins(&mut rec, "q", biguint_json(s.ctx().q()));
    ins(&mut rec, "params", params_json(&s));
    ins(&mut rec, "gate", gate_json(&report));
    if let Some(ok) = divisor_ok {
        ins(&mut rec, "divisor_gate", Value::Bool(ok));
    }
    ins(&mut rec, "timing_ms", timing_ms(start));
    emit(w, &Value::Object(rec), g.pretty)?;
    Ok(if report.passed && divisor_ok != Some(false) {
        0
    } else {
        1
    })
}

/// Gate, then build the member. Elliptic and hyperelliptic members go
/// through `specialize`; plane members are built directly since their gate
/// already ran here under the caller's caps.
fn gated_member(g: Global, s: &Specialization) -> zetafam::Result<std::result::Result<SpecializedCurve, GateReport>> {
    let report = s.discriminant_gate_with_bound(2, g.cap_enum)?;
    if !report.passed {
        return Ok(Err(report));
    }
    let curve = match s.family().kind {
        FamilyKind::PlaneProjective => SpecializedCurve::Plane(s.plane_form_of()?),
        _ => s.specialize()?,
    };
    Ok(Ok(curve))
}

fn emit_gate_failure(
    g: Global,
    w: &mut dyn Write,
    command: &str,
    s: &Specialization,
    report: &GateReport,
    start: Instant,
) -> CmdResult<i32> {
    let mut rec = envelope(command);
    ins(&mut rec, "family", family_json(s.family()));
    ins(&mut rec, "q", biguint_json(s.ctx().q()));
    ins(&mut rec, "params", params_json(s));
    ins(&mut rec, "gate", gate_json(report));
    ins(&mut rec, "timing_ms", timing_ms(start));
    emit(w, &Value::Object(rec), g.pretty)?;
    Ok(1)
}

fn cmd_count(g: Global, w: &mut dyn Write, m: &MemberArgs) -> CmdResult<i32> {
    let start = Instant::now();
    let s = load_member(m)?;
    let curve = match gated_member(g, &s)? {
        Err(report) => return emit_gate_failure(g, w, "count", &s, &report, start),
        Ok(curve) => curve,
    };
    let mut rec = envelope("count");
    ins(&mut rec, "family", family_json(s.family()));
    ins(&mut rec, "q", biguint_json(s.ctx().q()));
    ins(&mut rec, "params", params_json(&s));
    match curve {
        SpecializedCurve::Elliptic(e) => {
            let tr = e.schoof_trace()?;
            ins(&mut rec, "method", Value::String("frobenius_trace".into()));
            ins(&mut rec, "t", bigint_json(&tr.t));
            ins(&mut rec, "N1", biguint_json(&tr.n1()));
        }
        SpecializedCurve::HyperGenus2(h) => {
            let n1 = h.count_points(1, g.cap_enum)?;
            ins(&mut rec, "method", Value::String("enumeration".into()));
            ins(&mut rec, "N1", Value::from(n1));
        }
        SpecializedCurve::Plane(form) => {
            let n1 = form.count_points(1, g.cap_enum)?;
            let n1_alt = form.count_points_x_first(1, g.cap_enum)?;
            if n1 != n1_alt {
                return Err(Error::Internal(format!(
                    "chart decompositions disagree: {n1} vs {n1_alt}"
                ))
                .into());
            }
            ins(&mut rec, "method", Value::String("enumeration".into()));
            ins(&mut rec, "N1", Value::from(n1));
        }
    }
    ins(&mut rec, "timing_ms", timing_ms(start));
    emit(w, &Value::Object(rec), g.pretty)?;
    Ok(0)
}

fn cmd_zeta(g: Global, w: &mut dyn Write, m: &MemberArgs, trials: u32) -> CmdResult<i32> {
    let start = Instant::now();
    let s = load_member(m)?;
    if s.family().kind == FamilyKind::PlaneProjective {
        return Err(Error::Unsupported(
            "zeta output covers elliptic and hyperelliptic members; analyze plane members with `plane`"
                .into(),
        )
        .into());
    }
    let curve = match gated_member(g, &s)? {
        Err(report) => return emit_gate_failure(g, w, "zeta", &s, &report, start),
        Ok(curve) => curve,
    };
    let mut rec = envelope("zeta");
    ins(&mut rec, "family", family_json(s.family()));
    ins(&mut rec, "q", biguint_json(s.ctx().q()));
    ins(&mut rec, "params", params_json(&s));
    let mut all_ok = true;
    let mut checks = Map::new();
    match curve {
        SpecializedCurve::Elliptic(e) => {
            let tr = e.schoof_trace()?;
            let z = tr.zeta();
            let weil = z.check_weil().passed();
            all_ok &= weil;
            checks.insert("weil".into(), Value::Bool(weil));
            ins(&mut rec, "t", bigint_json(&tr.t));
            ins(&mut rec, "N1", biguint_json(&tr.n1()));
            ins(&mut rec, "zeta", zeta_json(&z));
        }
        SpecializedCurve::HyperGenus2(h) => {
            let z = h.zeta(g.cap_enum)?;
            let counts = z.num.counts(2);
            let weil = z.num.check_weil().passed();
            all_ok &= weil;
            checks.insert("weil".into(), Value::Bool(weil));
            if !h.is_inert_at_infinity() {
                let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
                let order = z.jacobian_order();
                let annihilated = h.jacobian_order_check(&order, trials, &mut rng)?;
                all_ok &= annihilated;
                checks.insert("annihilation".into(), Value::Bool(annihilated));
                let (_, hi) = h.jacobian_order_interval()?;
                if hi <= g.cap_interval {
                    let d = h.random_divisor(&mut rng)?;
                    let ord = h.divisor_order_bsgs(&d, g.cap_interval)?;
                    let divides = (&order % BigInt::from(ord)).is_zero();
                    all_ok &= divides;
                    checks.insert("order_divides".into(), Value::Bool(divides));
                    ins(&mut rec, "divisor_order", Value::from(ord));
                }
            }
            ins(&mut rec, "N1", bigint_json(&counts[0]));
            ins(&mut rec, "N2", bigint_json(&counts[1]));
            ins(&mut rec, "a1", bigint_json(&z.a1));
            ins(&mut rec, "a2", bigint_json(&z.a2));
            ins(&mut rec, "jacobian_order", bigint_json(&z.jacobian_order()));
            ins(&mut rec, "zeta", zeta_json(&z.num));
        }
        SpecializedCurve::Plane(_) => unreachable!("refused above"),
    }
    ins(&mut rec, "checks", Value::Object(checks));
    ins(&mut rec, "timing_ms", timing_ms(start));
    emit(w, &Value::Object(rec), g.pretty)?;
    Ok(if all_ok { 0 } else { 2 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_plane(
    g: Global,
    w: &mut dyn Write,
    p: u64,
    ext: usize,
    form_text: Option<&str>,
    family: Option<&PathBuf>,
    sets: &[String],
    singular_degree: u32,
) -> CmdResult<i32> {
    let start = Instant::now();
    let ctx = make_field(p, ext)?;
    let form: PlaneForm = match (form_text, family) {
        (Some(text), None) => PlaneForm::parse(&ctx, text)?,
        (None, Some(path)) => {
            let spec = read_family(path)?;
            if spec.kind != FamilyKind::PlaneProjective {
                return Err(Error::Unsupported(
                    "`plane` accepts only plane projective families".into(),
                )
                .into());
            }
            let values = resolve_values(&spec, &ctx, sets)?;
            Specialization::new(spec, ctx.clone(), values)?.plane_form_of()?
        }
        _ => {
            return Err(Error::ParseError(
                "give exactly one of --form or --family".into(),
            )
            .into())
        }
    };
    let n_plane = form.count_points(1, g.cap_enum)?;
    let n_alt = form.count_points_x_first(1, g.cap_enum)?;
    if n_plane != n_alt {
        return Err(Error::Internal(format!(
            "chart decompositions disagree: {n_plane} vs {n_alt}"
        ))
        .into());
    }
    let singular = form.find_singular_points(singular_degree, g.cap_enum)?;
    let sing_json: Vec<Value> = singular
        .iter()
        .map(|sp| {
            let mut m = Map::new();
            m.insert(
                "point".into(),
                Value::Array(sp.point.iter().map(fe_json).collect()),
            );
            m.insert("field_degree".into(), Value::from(sp.field_degree));
            m.insert(
                "kind".into(),
                Value::String(
                    match sp.kind {
                        SingularityKind::NodeSplit => "node_split",
                        SingularityKind::NodeNonsplit => "node_nonsplit",
                        SingularityKind::Cusp => "cusp",
                    }
                    .into(),
                ),
            );
            Value::Object(m)
        })
        .collect();
    let mut rec = envelope("plane");
    ins(&mut rec, "q", biguint_json(ctx.q()));
    ins(&mut rec, "degree", Value::from(form.degree() as u64));
    ins(&mut rec, "N_plane", Value::from(n_plane));
    ins(&mut rec, "singular", Value::Array(sing_json));
    match form.corrected_smooth_count(g.cap_enum) {
        Ok(n) => ins(&mut rec, "corrected_smooth_count", Value::from(n)),
        Err(Error::UnsupportedSingularity(msg)) => {
            ins(&mut rec, "corrected_smooth_count", Value::Null);
            ins(&mut rec, "note", Value::String(msg));
        }
        Err(e) => return Err(e.into()),
    }
    match form.genus_upper_bound(singular_degree, g.cap_enum) {
        Ok(b) => ins(&mut rec, "genus_upper_bound", Value::from(b)),
        Err(Error::UnsupportedSingularity(_)) => {
            ins(&mut rec, "genus_upper_bound", Value::Null)
        }
        Err(e) => return Err(e.into()),
    }
    if let Ok(e) = form.to_elliptic() {
        let tr = e.schoof_trace()?;
        let mut m = Map::new();
        m.insert("A".into(), fe_json(e.a()));
        m.insert("B".into(), fe_json(e.b()));
        m.insert("t".into(), bigint_json(&tr.t));
        m.insert("N1".into(), biguint_json(&tr.n1()));
        ins(&mut rec, "short_weierstrass", Value::Object(m));
    }
    ins(&mut rec, "timing_ms", timing_ms(start));
    emit(w, &Value::Object(rec), g.pretty)?;
    Ok(0)
}

fn cmd_selfcheck(g: Global, w: &mut dyn Write) -> CmdResult<i32> {
    let start = Instant::now();
    let mut checks = 0u32;
    let mut failures = 0u32;

    let mut report = |w: &mut dyn Write,
                      check: &str,
                      detail: Map<String, Value>,
                      ok: bool|
     -> io::Result<()> {
        checks += 1;
        if !ok {
            failures += 1;
        }
        let mut rec = envelope("selfcheck");
        ins(&mut rec, "check", Value::String(check.into()));
        for (k, v) in detail {
            rec.insert(k, v);
        }
        ins(
            &mut rec,
            "status",
            Value::String(if ok { "ok" } else { "mismatch" }.into()),
        );
        emit(w, &Value::Object(rec), g.pretty)
    };

    // The modular trace against direct enumeration, on a fixed panel that
    // is nondegenerate over every one of these primes.
    for p in [5u64, 7, 11, 13] {
        let ctx = make_field(p, 1)?;
        for (a, b) in [(1i128, 0i128), (0, 1), (1, 1), (2, 1), (4, 1), (0, 2)] {
            let e = EllipticCurve::new(ctx.from_integer(a), ctx.from_integer(b))?;
            let tr = e.schoof_trace()?;
            let naive = e.count_naive(10_000)?;
            let ok = tr.n1() == BigUint::from(naive);
            let mut detail = Map::new();
            detail.insert("p".into(), Value::from(p));
            detail.insert("a".into(), Value::from(a as i64));
            detail.insert("b".into(), Value::from(b as i64));
            if !ok {
                detail.insert("trace_count".into(), biguint_json(&tr.n1()));
                detail.insert("enumerated".into(), Value::from(naive));
            }
            report(w, "trace_vs_enumeration", detail, ok)?;
        }
    }

    // Genus-2 pipeline: zeta coefficients from counts must pass the
    // symmetry bounds, predict the degree-3 count, and annihilate sampled
    // divisor classes.
    for q in [3u64, 5, 7] {
        let ctx = make_field(q, 1)?;
        let h = (0..q as i64)
            .find_map(|b| HyperCurve::new(UPoly::from_ints(&ctx, &[b, 1, 0, 0, 0, 1])).ok())
            .expect("some quintic x^5 + x + b is squarefree");
        let z = h.zeta(g.cap_enum)?;
        let b_used = h.f().coeff(0).canonical_index().to_u64().unwrap_or(0);
        let base = |extra: &[(&str, Value)]| {
            let mut m = Map::new();
            m.insert("q".into(), Value::from(q));
            m.insert("b".into(), Value::from(b_used));
            for (k, v) in extra {
                m.insert((*k).into(), v.clone());
            }
            m
        };

        let weil = z.num.check_weil().passed();
        report(w, "genus2_weil_bounds", base(&[]), weil)?;

        let predicted = z.num.counts(3)[2].clone();
        let enumerated = h.count_points(3, g.cap_enum)?;
        let ok = predicted == BigInt::from(enumerated);
        report(
            w,
            "genus2_degree3_count",
            base(&[
                ("predicted", bigint_json(&predicted)),
                ("enumerated", Value::from(enumerated)),
            ]),
            ok,
        )?;

        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        let order = z.jacobian_order();
        let annihilated = h.jacobian_order_check(&order, 3, &mut rng)?;
        report(
            w,
            "genus2_order_annihilates",
            base(&[("jacobian_order", bigint_json(&order))]),
            annihilated,
        )?;

        let d = h.random_divisor(&mut rng)?;
        let ord = h.divisor_order_bsgs(&d, g.cap_interval)?;
        let divides = (&order % BigInt::from(ord)).is_zero();
        report(
            w,
            "genus2_divisor_order_divides",
            base(&[("divisor_order", Value::from(ord))]),
            divides,
        )?;
    }

    let mut rec = envelope("selfcheck_summary");
    ins(&mut rec, "checks", Value::from(checks));
    ins(&mut rec, "failures", Value::from(failures));
    ins(&mut rec, "timing_ms", timing_ms(start));
    emit(w, &Value::Object(rec), g.pretty)?;
    Ok(if failures == 0 { 0 } else { 2 })
}

enum ParamSource {
    Fixed(i128),
    Range { lo: i128, slot: usize },
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    g: Global,
    w: &mut dyn Write,
    family: &PathBuf,
    p: u64,
    ext: usize,
    sets: &[String],
    ranges: &[String],
    what: SweepWhat,
    workers: usize,
) -> CmdResult<i32> {
    let start = Instant::now();
    let spec = read_family(family)?;
    let ctx = make_field(p, ext)?;

    let fixed: Vec<(String, i128)> = sets
        .iter()
        .map(|s| parse_set(s))
        .collect::<zetafam::Result<_>>()?;
    let swept: Vec<(String, i128, i128)> = ranges
        .iter()
        .map(|s| parse_range(s))
        .collect::<zetafam::Result<_>>()?;

    // Every parameter must come from exactly one of --set / --range.
    let mut sources: Vec<ParamSource> = Vec::with_capacity(spec.params.len());
    for name in &spec.params {
        let f: Vec<_> = fixed.iter().filter(|(n, _)| n == name).collect();
        let r: Vec<_> = swept
            .iter()
            .enumerate()
            .filter(|(_, (n, _, _))| n == name)
            .collect();
        match (f.len(), r.len()) {
            (1, 0) => sources.push(ParamSource::Fixed(f[0].1)),
            (0, 1) => {
                let (slot, (_, lo, _)) = r[0];
                sources.push(ParamSource::Range { lo: *lo, slot });
            }
            (0, 0) => {
                return Err(Error::ParseError(format!(
                    "parameter `{name}` needs a --set or --range"
                ))
                .into())
            }
            _ => {
                return Err(Error::ParseError(format!(
                    "parameter `{name}` given more than once"
                ))
                .into())
            }
        }
    }
    for (name, _) in &fixed {
        if !spec.params.iter().any(|p| p == name) {
            return Err(Error::ParseError(format!(
                "`{name}` is not a parameter of this family"
            ))
            .into());
        }
    }
    for (name, _, _) in &swept {
        if !spec.params.iter().any(|p| p == name) {
            return Err(Error::ParseError(format!(
                "`{name}` is not a parameter of this family"
            ))
            .into());
        }
    }

    let spans: Vec<u64> = swept.iter().map(|(_, lo, hi)| (hi - lo) as u64).collect();
    let total: u64 = spans.iter().try_fold(1u64, |acc, s| acc.checked_mul(*s)).ok_or(
        Error::CapExceeded {
            needed: u64::MAX,
            cap: g.cap_enum,
        },
    )?;
    if total > g.cap_enum {
        return Err(Error::CapExceeded {
            needed: total,
            cap: g.cap_enum,
        }
        .into());
    }

    // Tuple index -> one digit per swept range, last range fastest.
    let digits_of = |index: u64| -> Vec<u64> {
        let mut digits = vec![0u64; spans.len()];
        let mut rest = index;
        for (j, span) in spans.iter().enumerate().rev() {
            digits[j] = rest % span;
            rest /= span;
        }
        digits
    };

    let eval_tuple = |index: u64| -> Value {
        let digits = digits_of(index);
        let ints: Vec<i128> = sources
            .iter()
            .map(|src| match src {
                ParamSource::Fixed(v) => *v,
                ParamSource::Range { lo, slot, .. } => lo + digits[*slot] as i128,
            })
            .collect();
        let values: Vec<FieldElement> = ints.iter().map(|v| ctx.from_integer(*v)).collect();
        let mut rec = envelope("sweep");
        ins(&mut rec, "index", Value::from(index));
        let params: Map<String, Value> = spec
            .params
            .iter()
            .zip(&values)
            .map(|(name, v)| (name.clone(), fe_json(v)))
            .collect();
        ins(&mut rec, "params", Value::Object(params));
        let outcome = (|| -> zetafam::Result<()> {
            let s = Specialization::new(spec.clone(), ctx.clone(), values)?;
            let report = s.discriminant_gate_with_bound(2, g.cap_enum)?;
            let passed = report.passed;
            ins(&mut rec, "gate", gate_json(&report));
            if passed && what == SweepWhat::Count {
                match s.family().kind {
                    FamilyKind::EllipticWeierstrass => {
                        if let SpecializedCurve::Elliptic(e) = s.specialize()? {
                            let tr = e.schoof_trace()?;
                            ins(&mut rec, "t", bigint_json(&tr.t));
                            ins(&mut rec, "N1", biguint_json(&tr.n1()));
                        }
                    }
                    FamilyKind::Hyperelliptic => {
                        if let SpecializedCurve::HyperGenus2(h) = s.specialize()? {
                            let n1 = h.count_points(1, g.cap_enum)?;
                            ins(&mut rec, "N1", Value::from(n1));
                        }
                    }
                    FamilyKind::PlaneProjective => {
                        let n1 = s.plane_form_of()?.count_points(1, g.cap_enum)?;
                        ins(&mut rec, "N1", Value::from(n1));
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            ins(&mut rec, "error", Value::String(e.to_string()));
        }
        Value::Object(rec)
    };

    let results: Mutex<Vec<Option<Value>>> = Mutex::new(vec![None; total as usize]);
    let next = AtomicUsize::new(0);
    let workers = workers.max(1).min(64);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i as u64 >= total {
                    break;
                }
                let rec = eval_tuple(i as u64);
                results.lock().expect("sweep results lock")[i] = Some(rec);
            });
        }
    });

    let mut gate_passed = 0u64;
    let mut gate_failed = 0u64;
    let mut errors = 0u64;
    for rec in results.into_inner().expect("sweep results lock") {
        let rec = rec.expect("every tuple evaluated");
        match (
            rec.get("gate").and_then(|v| v.get("passed")).and_then(Value::as_bool),
            rec.get("error"),
        ) {
            (_, Some(_)) => errors += 1,
            (Some(true), None) => gate_passed += 1,
            _ => gate_failed += 1,
        }
        emit(w, &rec, g.pretty)?;
    }

    let mut rec = envelope("sweep_summary");
    ins(&mut rec, "family", family_json(&spec));
    ins(&mut rec, "q", biguint_json(ctx.q()));
    ins(
        &mut rec,
        "what",
        Value::String(
            match what {
                SweepWhat::Gate => "gate",
                SweepWhat::Count => "count",
            }
            .into(),
        ),
    );
    ins(&mut rec, "total", Value::from(total));
    ins(&mut rec, "gate_passed", Value::from(gate_passed));
    ins(&mut rec, "gate_failed", Value::from(gate_failed));
    ins(&mut rec, "errors", Value::from(errors));
    ins(&mut rec, "timing_ms", timing_ms(start));
    emit(w, &Value::Object(rec), g.pretty)?;
    Ok(0)
}
