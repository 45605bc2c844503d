//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or invalid parameters,
//! 3 a verification or soundness check failed.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::channel::{minimal_levels, ChannelParams};
use crate::entropy::{random_pmf, sliding_window_check, JointPMF};
use crate::error::Error;
use crate::field::DEFAULT_DEGREE;
use crate::rational::{self, int, Rational};
use crate::region::{
    classify_regime, corner_list, outer_halfplanes, tightness_report, BoundStatus, HalfPlane, RatePoint,
    RateRegion2D, RegimeId, TightnessReport,
};
use crate::schemes::{build_corner_scheme, split_scheme, CornerKind, LinearScheme, MessageClass, Setup};
use crate::verifier::{toy_oracle, verify, VerifyReport, TOY_MAX_SLOTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetupArg {
    R0rl,
    Rlrm,
}

impl From<SetupArg> for Setup {
    fn from(s: SetupArg) -> Setup {
        match s {
            SetupArg::R0rl => Setup::R0RL,
            SetupArg::Rlrm => Setup::RLRM,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "bic", version, about = "Rate regions and linear schemes for parallel interference channels with bursty interference")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inner and outer rate regions with the tightness verdict.
    #[command(args_override_self = true)]
    Region(RegionArgs),
    /// Build or load a scheme and check decodability on every configuration.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Exhaustive linear-scheme search on the two-subcarrier toy channel.
    #[command(args_override_self = true)]
    Oracle(OracleArgs),
    /// Batch table over (setup, M, L, alpha).
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Sliding-window entropy inequality for a given pmf or random ones.
    #[command(args_override_self = true)]
    Entropy(EntropyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Seed for randomized constructions and fuzzing.
    #[arg(long, env = "BIC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// key=value file of default flags; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    #[arg(long, value_enum, default_value = "r0rl")]
    pub setup: SetupArg,
    /// Number of subcarriers.
    #[arg(short = 'M', long = "subcarriers")]
    pub m: usize,
    /// Number of subcarriers whose cross link may be active.
    #[arg(short = 'L', long = "interfered")]
    pub l: usize,
    /// Direct-link strength in levels.
    #[arg(short = 'n', long = "direct")]
    pub n: usize,
    /// Cross-link strength in levels.
    #[arg(short = 'k', long = "cross")]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    pub field_degree: u8,
}

impl ChannelArgs {
    fn params(&self) -> Result<ChannelParams, Error> {
        ChannelParams::new(self.n, self.k, self.m, self.l, self.field_degree)
    }
}

#[derive(Args, Debug)]
pub struct RegionArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Also list the conjectured outer bounds.
    #[arg(long)]
    pub conjectured: bool,
    #[command(flatten)]
    pub common: Common,
}

/// Channel flags for `verify`, optional when a scheme file carries them.
#[derive(Args, Debug)]
pub struct VerifyChannelArgs {
    #[arg(long, value_enum, default_value = "r0rl")]
    pub setup: SetupArg,
    #[arg(short = 'M', long = "subcarriers", required_unless_present = "scheme_file")]
    pub m: Option<usize>,
    #[arg(short = 'L', long = "interfered", required_unless_present = "scheme_file")]
    pub l: Option<usize>,
    #[arg(short = 'n', long = "direct", required_unless_present = "scheme_file")]
    pub n: Option<usize>,
    #[arg(short = 'k', long = "cross", required_unless_present = "scheme_file")]
    pub k: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    pub field_degree: u8,
}

impl VerifyChannelArgs {
    fn params(&self) -> Result<ChannelParams, Error> {
        match (self.n, self.k, self.m, self.l) {
            (Some(n), Some(k), Some(m), Some(l)) => ChannelParams::new(n, k, m, l, self.field_degree),
            _ => Err(Error::InvalidParams("-M, -L, -n and -k are needed to build a scheme".into())),
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub channel: VerifyChannelArgs,
    /// Corner construction to build, or `split` for the subcarrier split.
    #[arg(long, conflicts_with = "scheme_file")]
    pub corner: Option<String>,
    /// Scheme in the text format instead of a built corner.
    #[arg(long)]
    pub scheme_file: Option<PathBuf>,
    /// Also write the checked scheme to this file.
    #[arg(long)]
    pub emit_scheme: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Largest number of slots to enumerate.
    #[arg(long = "max-t", default_value_t = TOY_MAX_SLOTS)]
    pub max_t: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Restrict to one setup (default: both).
    #[arg(long, value_enum)]
    pub setup: Option<SetupArg>,
    /// Comma-separated subcarrier counts.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4, 5])]
    pub m_values: Vec<usize>,
    /// Comma-separated alpha values (`p/q` or decimals).
    #[arg(long, value_delimiter = ',', default_value = "0,1/4,1/2,3/5,2/3,3/4,1,3/2,2")]
    pub alphas: Vec<String>,
    /// Skip cells whose smallest integral n exceeds this.
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
    /// Do not build and verify corner schemes.
    #[arg(long)]
    pub no_schemes: bool,
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    pub field_degree: u8,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    /// Check this distribution instead of fuzzing.
    #[arg(long)]
    pub pmf: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 4)]
    pub max_vars: usize,
    #[arg(long, default_value_t = 3)]
    pub max_alphabet: usize,
    #[command(flatten)]
    pub common: Common,
}

/// What a command produced.
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, code: EXIT_OK }
    }

    fn checked(body: String, passed: bool) -> Self {
        Outcome {
            body,
            code: if passed { EXIT_OK } else { EXIT_FAILED },
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::ConstructionFailed(_) => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

const SUBCOMMANDS: [&str; 5] = ["region", "verify", "oracle", "sweep", "entropy"];
const BOOLEAN_KEYS: [&str; 2] = ["conjectured", "no-schemes"];

/// Short and long spellings of the same flag.
const ALIASES: [(&str, &str); 5] = [
    ("-M", "--subcarriers"),
    ("-L", "--interfered"),
    ("-n", "--direct"),
    ("-k", "--cross"),
    ("-o", "--output"),
];

fn canonical_flag(flag: &str) -> &str {
    let flag = flag.split_once('=').map_or(flag, |(f, _)| f);
    ALIASES
        .iter()
        .find(|(short, _)| *short == flag)
        .map_or(flag, |(_, long)| long)
}

/// Turns a key=value config file into flag groups (flag plus value).
fn config_flags(text: &str) -> Result<Vec<Vec<String>>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            continue;
        }
        let flag = if key.chars().count() == 1 {
            format!("-{key}")
        } else {
            format!("--{key}")
        };
        if BOOLEAN_KEYS.contains(&key.as_str()) {
            match value {
                "true" | "1" | "yes" => out.push(vec![flag]),
                "false" | "0" | "no" => {}
                _ => return Err(format!("config line {}: {key} expects true or false", i + 1)),
            }
        } else {
            out.push(vec![flag, value.to_string()]);
        }
    }
    Ok(out)
}

/// Splices the flags of any `--config FILE` right after the subcommand,
/// skipping those also given on the command line.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, (i32, String)> {
    let path = args.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            args.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| (EXIT_IO, format!("cannot read config {path}: {e}")))?;
    let groups = config_flags(&text).map_err(|e| (EXIT_USAGE, e))?;
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let given: Vec<&str> = args[pos + 1..]
        .iter()
        .filter(|a| a.starts_with('-'))
        .map(|a| canonical_flag(a))
        .collect();
    let mut out = args[..=pos].to_vec();
    for g in groups {
        if !given.contains(&canonical_flag(&g[0])) {
            out.extend(g);
        }
    }
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code. Output goes to stdout or `--output`, diagnostics to stderr.
pub fn run(args: Vec<String>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let common = match &cfg.command {
        Command::Region(a) => a.common.clone(),
        Command::Verify(a) => a.common.clone(),
        Command::Oracle(a) => a.common.clone(),
        Command::Sweep(a) => a.common.clone(),
        Command::Entropy(a) => a.common.clone(),
    };
    let result = match &cfg.command {
        Command::Region(a) => cmd_region(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Entropy(a) => cmd_entropy(a),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &common.output {
        Some(path) => fs::write(path, &outcome.body),
        None => {
            print!("{}", outcome.body);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_IO;
    }
    outcome.code
}

fn fmt_r(r: &Rational) -> String {
    rational::format(r)
}

fn point_json(p: &RatePoint) -> Value {
    json!([fmt_r(&p.x), fmt_r(&p.y)])
}

fn vertices_json(r: &RateRegion2D) -> Value {
    Value::Array(r.vertices().iter().map(point_json).collect())
}

fn plane_json(h: &HalfPlane) -> Value {
    json!({
        "label": h.label,
        "a": fmt_r(&h.a),
        "b": fmt_r(&h.b),
        "c": fmt_r(&h.c),
        "status": h.status.name(),
    })
}

fn regime_json(r: &RegimeId) -> Value {
    json!({
        "id": r.to_string(),
        "l_side": r.l_side.name(),
        "alpha_bands": r.bands.iter().map(|b| b.name()).collect::<Vec<_>>(),
    })
}

fn axis_names(setup: Setup) -> (&'static str, &'static str) {
    match setup {
        Setup::R0RL => ("R_L", "R_0"),
        Setup::RLRM => ("R_M", "R_L"),
    }
}

/// Distinct corner rates with the constructions reaching each.
fn grouped_corners(setup: Setup, m: usize, l: usize, alpha: Rational) -> Result<Vec<(RatePoint, Vec<String>)>, Error> {
    let mut out: Vec<(RatePoint, Vec<String>)> = Vec::new();
    for (corner, p) in corner_list(setup, m, l, alpha)? {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, names)) => names.push(corner.kind().name().to_string()),
            None => out.push((p, vec![corner.kind().name().to_string()])),
        }
    }
    Ok(out)
}

/// The region record as pretty JSON: regime, corners (with the
/// constructions reaching each), bounds with status, verdict and gap.
pub fn region_json(setup: Setup, p: &ChannelParams, conjectured: bool) -> Result<String, Error> {
    let (m, l, alpha) = (p.subcarriers(), p.interfered(), p.alpha());
    let regime = classify_regime(m, l, alpha)?;
    let corners = grouped_corners(setup, m, l, alpha)?;
    let bounds = outer_halfplanes(setup, m, l, alpha, conjectured)?;
    let report = tightness_report(setup, m, l, alpha)?;
    let n = int(p.n() as i128);
    let v = json!({
        "setup": setup.name(),
        "M": m,
        "L": l,
        "n": p.n(),
        "k": p.k(),
        "alpha": fmt_r(&alpha),
        "axes": [axis_names(setup).0, axis_names(setup).1],
        "regime": regime_json(&regime),
        "corners": corners.iter().map(|(pt, names)| json!({
            "rate": point_json(pt),
            "symbols_per_use": point_json(&pt.scaled(n)),
            "constructions": names,
        })).collect::<Vec<_>>(),
        "bounds": bounds.iter().map(plane_json).collect::<Vec<_>>(),
        "inner_vertices": vertices_json(&report.inner),
        "outer_vertices": vertices_json(&report.proven),
        "verdict": report.verdict.name(),
        "gap_vertices": report.gap_vertices.iter().map(point_json).collect::<Vec<_>>(),
        "gap_area": fmt_r(&report.gap_area()),
    });
    Ok(serde_json::to_string_pretty(&v).expect("json values serialize") + "\n")
}

pub fn cmd_region(a: &RegionArgs) -> Result<Outcome, Error> {
    let p = a.channel.params()?;
    let setup: Setup = a.channel.setup.into();
    let (m, l, alpha) = (p.subcarriers(), p.interfered(), p.alpha());
    let regime = classify_regime(m, l, alpha)?;
    let corners = grouped_corners(setup, m, l, alpha)?;
    let bounds = outer_halfplanes(setup, m, l, alpha, a.conjectured)?;
    let report = tightness_report(setup, m, l, alpha)?;
    let body = match a.common.format {
        Format::Json => region_json(setup, &p, a.conjectured)?,
        Format::Csv => {
            let mut s = String::from("record,label,x,y,a,b,c,status\n");
            for (pt, names) in &corners {
                let _ = writeln!(s, "corner,{},{},{},,,,", names.join("|"), fmt_r(&pt.x), fmt_r(&pt.y));
            }
            for h in &bounds {
                let _ = writeln!(
                    s,
                    "bound,{},,,{},{},{},{}",
                    h.label,
                    fmt_r(&h.a),
                    fmt_r(&h.b),
                    fmt_r(&h.c),
                    h.status.name()
                );
            }
            for v in &report.gap_vertices {
                let _ = writeln!(s, "gap_vertex,,{},{},,,,", fmt_r(&v.x), fmt_r(&v.y));
            }
            let _ = writeln!(s, "verdict,{},,,,,,", report.verdict.name());
            s
        }
        Format::Svg => region_svg(setup, &p, &corners, &bounds, &report),
        Format::Text => {
            let (xn, yn) = axis_names(setup);
            let mut s = String::new();
            let _ = writeln!(
                s,
                "setup {} M={m} L={l} n={} k={} alpha={} regime {}",
                setup.name(),
                p.n(),
                p.k(),
                fmt_r(&alpha),
                regime
            );
            let _ = writeln!(s, "corners ({xn}/n, {yn}/n):");
            for (pt, names) in &corners {
                let _ = writeln!(s, "  {pt} via {}", names.join(", "));
            }
            let _ = writeln!(s, "bounds:");
            for h in &bounds {
                let _ = writeln!(s, "  {h}");
            }
            let _ = writeln!(s, "inner hull {}", report.inner);
            let _ = writeln!(s, "proven outer {}", report.proven);
            let _ = writeln!(s, "verdict {}", report.verdict);
            if !report.gap_vertices.is_empty() {
                let gv: Vec<String> = report.gap_vertices.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(s, "gap vertices {}", gv.join(" "));
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

fn clip_line(h: &HalfPlane, xmax: f64, ymax: f64) -> Option<((f64, f64), (f64, f64))> {
    let (a, b, c) = (rational::to_f64(&h.a), rational::to_f64(&h.b), rational::to_f64(&h.c));
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut push = |x: f64, y: f64| {
        let inside = (-1e-9..=xmax + 1e-9).contains(&x) && (-1e-9..=ymax + 1e-9).contains(&y);
        if inside && !pts.iter().any(|&(px, py)| (px - x).abs() < 1e-9 && (py - y).abs() < 1e-9) {
            pts.push((x, y));
        }
    };
    if b != 0.0 {
        push(0.0, c / b);
        push(xmax, (c - a * xmax) / b);
    }
    if a != 0.0 {
        push(c / a, 0.0);
        push((c - b * ymax) / a, ymax);
    }
    (pts.len() >= 2).then(|| (pts[0], pts[1]))
}

fn region_svg(
    setup: Setup,
    p: &ChannelParams,
    corners: &[(RatePoint, Vec<String>)],
    bounds: &[HalfPlane],
    report: &TightnessReport,
) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 48.0;
    let span = SIZE - 2.0 * PAD;
    let verts = report.proven.vertices().iter().chain(report.inner.vertices());
    let (mut xmax, mut ymax) = (0.0f64, 0.0f64);
    for v in verts {
        xmax = xmax.max(rational::to_f64(&v.x));
        ymax = ymax.max(rational::to_f64(&v.y));
    }
    let xmax = if xmax > 0.0 { xmax * 1.1 } else { 1.0 };
    let ymax = if ymax > 0.0 { ymax * 1.1 } else { 1.0 };
    let sx = |x: f64| PAD + x / xmax * span;
    let sy = |y: f64| SIZE - PAD - y / ymax * span;
    let (xn, yn) = axis_names(setup);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        "<title>{} M={} L={} alpha={}: {}</title>",
        setup.name(),
        p.subcarriers(),
        p.interfered(),
        fmt_r(&p.alpha()),
        report.verdict
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let points: Vec<String> = report
        .inner
        .vertices()
        .iter()
        .map(|v| format!("{:.2},{:.2}", sx(rational::to_f64(&v.x)), sy(rational::to_f64(&v.y))))
        .collect();
    let _ = writeln!(
        s,
        r##"<polygon class="inner" points="{}" fill="#1f77b4" fill-opacity="0.25" stroke="#1f77b4" stroke-width="1.5"/>"##,
        points.join(" ")
    );
    for h in bounds {
        let Some(((x1, y1), (x2, y2))) = clip_line(h, xmax, ymax) else {
            continue;
        };
        let (color, dash) = match h.status {
            BoundStatus::Proven => ("#2ca02c", ""),
            BoundStatus::Conjectured => ("#d62728", r#" stroke-dasharray="6 4""#),
        };
        let _ = writeln!(
            s,
            r#"<line class="bound {}" data-label="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            h.status.name(),
            h.label,
            sx(x1),
            sy(y1),
            sx(x2),
            sy(y2)
        );
    }
    for (pt, _) in corners {
        let _ = writeln!(
            s,
            r##"<circle class="corner" cx="{:.2}" cy="{:.2}" r="3.5" fill="#1f77b4"/>"##,
            sx(rational::to_f64(&pt.x)),
            sy(rational::to_f64(&pt.y))
        );
    }
    let (ox, oy) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        s,
        r#"<path class="axes" d="M{ox:.2},{:.2} L{ox:.2},{oy:.2} L{:.2},{oy:.2}" fill="none" stroke="black"/>"#,
        PAD / 2.0,
        SIZE - PAD / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{xn}/n</text>"#,
        SIZE - PAD / 2.0,
        oy + 20.0
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{yn}/n</text>"#, ox + 6.0, PAD / 2.0 + 4.0);
    for (v, label) in [(xmax / 1.1, true), (ymax / 1.1, false)] {
        let text = format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_string();
        if label {
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{text}</text>"#, sx(v), oy + 16.0);
        } else {
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{text}</text>"#, ox - 6.0, sy(v) + 4.0);
        }
    }
    s.push_str("</svg>\n");
    s
}

fn report_json(r: &VerifyReport) -> Value {
    Value::Array(
        r.entries
            .iter()
            .map(|e| {
                json!({
                    "user": e.user + 1,
                    "class": e.class.name(),
                    "mask": e.mask.to_string(),
                    "symbols": e.decoded_cols,
                    "rank_decoded": e.ranks.decoded,
                    "rank_other": e.ranks.nuisance,
                    "rank_joint": e.ranks.joint,
                    "pass": e.pass,
                })
            })
            .collect(),
    )
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, Error> {
    let setup: Setup = a.channel.setup.into();
    let scheme = match (&a.scheme_file, &a.corner) {
        (Some(path), _) => LinearScheme::from_text(&fs::read_to_string(path)?)?,
        (None, Some(name)) if name == "split" => split_scheme(&a.channel.params()?, MessageClass::WL)?,
        (None, Some(name)) => {
            let kind: CornerKind = name.parse()?;
            let corner = crate::schemes::Corner::new(setup, kind)?;
            build_corner_scheme(&a.channel.params()?, corner, a.common.seed)?
        }
        (None, None) => {
            return Err(Error::InvalidParams("give --corner or --scheme-file".into()));
        }
    };
    if let Some(path) = &a.emit_scheme {
        fs::write(path, scheme.to_text())?;
    }
    let report = verify(&scheme);
    let rate = scheme.rate_point(setup);
    let (xc, yc) = setup.axes();
    let (xn, yn) = axis_names(setup);
    let body = match a.common.format {
        Format::Json => {
            let v = json!({
                "setup": setup.name(),
                "slots": scheme.slots(),
                "symbols": [scheme.dim(xc), scheme.dim(yc)],
                "rate": point_json(&rate),
                "entries": report_json(&report),
                "passed": report.passed(),
            });
            serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
        }
        _ => {
            let mut s = report.to_text();
            let _ = writeln!(
                s,
                "rate ({xn}/n, {yn}/n) = {rate}; symbols ({}, {}) over {} slot(s)",
                scheme.dim(xc),
                scheme.dim(yc),
                scheme.slots()
            );
            s
        }
    };
    Ok(Outcome::checked(body, report.passed()))
}

pub fn cmd_oracle(a: &OracleArgs) -> Result<Outcome, Error> {
    let found = toy_oracle(a.max_t)?;
    let bound = |(r1, r0): &(Rational, Rational)| int(2) * *r1 + *r0 <= int(2);
    let contained = found.iter().all(bound);
    let body = match a.common.format {
        Format::Json => {
            let v = json!({
                "max_t": a.max_t,
                "points": found.iter().map(|(x, y)| json!([fmt_r(x), fmt_r(y)])).collect::<Vec<_>>(),
                "contained": contained,
            });
            serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
        }
        _ => {
            let mut s = String::from("R1 R0\n");
            for (x, y) in &found {
                let _ = writeln!(s, "{} {}", fmt_r(x), fmt_r(y));
            }
            let _ = writeln!(
                s,
                "{} points; 2R1 + R0 <= 2 {}",
                found.len(),
                if contained { "holds" } else { "VIOLATED" }
            );
            s
        }
    };
    Ok(Outcome::checked(body, contained))
}

/// One row of the sweep table.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub setup: Setup,
    pub m: usize,
    pub l: usize,
    pub alpha: Rational,
    pub n: usize,
    pub regime: String,
    pub verdict: String,
    pub gap_area: Rational,
    pub gap_area_conjectured: Rational,
    pub schemes_passed: usize,
    pub schemes_total: usize,
    pub inner_in_outer: bool,
    pub erasure_rl: Option<Rational>,
    pub split_rl: Option<Rational>,
    pub note: String,
}

pub const SWEEP_HEADER: &str = "setup,M,L,alpha,n,regime,verdict,gap_area,gap_area_conjectured,schemes_passed,schemes_total,inner_in_outer,erasure_rl,split_rl,note";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let opt = |r: &Option<Rational>| r.as_ref().map(fmt_r).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.setup.name(),
            self.m,
            self.l,
            fmt_r(&self.alpha),
            self.n,
            self.regime,
            self.verdict,
            fmt_r(&self.gap_area),
            fmt_r(&self.gap_area_conjectured),
            self.schemes_passed,
            self.schemes_total,
            self.inner_in_outer,
            opt(&self.erasure_rl),
            opt(&self.split_rl),
            self.note
        )
    }
}

/// Best W_L rate of the erasure-coded corners, read on the W_L axis.
fn erasure_rl(setup: Setup, m: usize, l: usize, alpha: Rational) -> Result<Option<Rational>, Error> {
    let erasure = [CornerKind::ErasureAll, CornerKind::AlignmentErasure, CornerKind::StrongAlignErasure];
    Ok(corner_list(setup, m, l, alpha)?
        .into_iter()
        .filter(|(c, _)| erasure.contains(&c.kind()))
        .map(|(_, p)| if setup == Setup::R0RL { p.x } else { p.y })
        .max())
}

/// Computes one sweep row; scheme construction uses `seed`.
pub fn sweep_row(
    setup: Setup,
    m: usize,
    l: usize,
    alpha: Rational,
    degree: u8,
    with_schemes: bool,
    seed: u64,
) -> Result<SweepRow, Error> {
    let (n, k) = minimal_levels(alpha)?;
    let p = ChannelParams::new(n, k, m, l, degree)?;
    let regime = classify_regime(m, l, alpha)?;
    let report = tightness_report(setup, m, l, alpha)?;
    let corners = corner_list(setup, m, l, alpha)?;
    let mut notes = Vec::new();
    let mut passed = 0;
    if with_schemes {
        for (c, _) in &corners {
            match build_corner_scheme(&p, *c, seed) {
                Ok(_) => passed += 1,
                Err(e) => notes.push(format!("{}: {e}", c.kind().name())),
            }
        }
    }
    let split_rl = if m.is_multiple_of(2) {
        let s = split_scheme(&p, MessageClass::WL)?;
        if verify(&s).passed() {
            Some(s.normalized_rate(MessageClass::WL))
        } else {
            notes.push("split scheme failed verification".into());
            None
        }
    } else {
        None
    };
    if !report.inner_is_sound() {
        let outside: Vec<String> = report
            .inner
            .vertices()
            .iter()
            .filter(|v| !crate::region::contains(&report.proven, v))
            .map(|v| v.to_string())
            .collect();
        notes.push(format!("inner vertices outside proven outer: {}", outside.join(" ")));
    }
    Ok(SweepRow {
        setup,
        m,
        l,
        alpha,
        n,
        regime: regime.to_string(),
        verdict: report.verdict.name().to_string(),
        gap_area: report.gap_area(),
        gap_area_conjectured: report.gap_area_conjectured(),
        schemes_passed: passed,
        schemes_total: if with_schemes { corners.len() } else { 0 },
        inner_in_outer: report.inner_is_sound(),
        erasure_rl: erasure_rl(setup, m, l, alpha)?,
        split_rl,
        note: notes.join("; ").replace(',', ";"),
    })
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<Outcome, Error> {
    let alphas = a.alphas.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>, _>>()?;
    let setups: Vec<Setup> = match a.setup {
        Some(s) => vec![s.into()],
        None => Setup::ALL.to_vec(),
    };
    let mut cells = Vec::new();
    for &setup in &setups {
        for &m in &a.m_values {
            for l in 1..=m {
                for &alpha in &alphas {
                    let (n, _) = minimal_levels(alpha)?;
                    if n <= a.max_n {
                        cells.push((setup, m, l, alpha));
                    }
                }
            }
        }
    }
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(setup, m, l, alpha))| {
            sweep_row(setup, m, l, alpha, a.field_degree, !a.no_schemes, a.common.seed.wrapping_add(i as u64))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sound = rows.iter().all(|r| r.inner_in_outer);
    let body = match a.common.format {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "setup": r.setup.name(),
                        "M": r.m,
                        "L": r.l,
                        "alpha": fmt_r(&r.alpha),
                        "n": r.n,
                        "regime": r.regime,
                        "verdict": r.verdict,
                        "gap_area": fmt_r(&r.gap_area),
                        "gap_area_conjectured": fmt_r(&r.gap_area_conjectured),
                        "schemes_passed": r.schemes_passed,
                        "schemes_total": r.schemes_total,
                        "inner_in_outer": r.inner_in_outer,
                        "erasure_rl": r.erasure_rl.as_ref().map(fmt_r),
                        "split_rl": r.split_rl.as_ref().map(fmt_r),
                        "note": r.note,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
        }
        _ => {
            let mut s = String::from(SWEEP_HEADER);
            s.push('\n');
            for r in &rows {
                s.push_str(&r.to_csv());
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::checked(body, sound))
}

/// Alphabet sizes of fuzz sample `seed`.
pub fn fuzz_alphabets(seed: u64, max_vars: usize, max_alphabet: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let vars = rng.gen_range(2..=max_vars.max(2));
    (0..vars).map(|_| rng.gen_range(2..=max_alphabet.max(2))).collect()
}

pub fn cmd_entropy(a: &EntropyArgs) -> Result<Outcome, Error> {
    if let Some(path) = &a.pmf {
        let pmf = JointPMF::parse(&fs::read_to_string(path)?)?;
        let check = sliding_window_check(&pmf)?;
        let body = match a.common.format {
            Format::Json => {
                let v = json!({"holds": check.holds, "chain": check.chain});
                serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
            }
            _ => format!("{check}\n"),
        };
        return Ok(Outcome::checked(body, check.holds));
    }
    if a.max_vars < 2 || a.max_alphabet < 2 {
        return Err(Error::InvalidParams("need --max-vars >= 2 and --max-alphabet >= 2".into()));
    }
    let violations: Vec<(u64, Vec<usize>, String)> = (0..a.samples as u64)
        .into_par_iter()
        .map(|i| {
            let seed = a.common.seed.wrapping_add(i);
            let alphabets = fuzz_alphabets(seed, a.max_vars, a.max_alphabet);
            let pmf = random_pmf(&alphabets, seed)?;
            let check = sliding_window_check(&pmf)?;
            Ok((!check.holds).then(|| (seed, alphabets, check.to_string())))
        })
        .collect::<Result<Vec<_>, Error>>()?
        .into_iter()
        .flatten()
        .collect();
    let body = match a.common.format {
        Format::Json => {
            let v = json!({
                "samples": a.samples,
                "violations": violations.iter().map(|(s, al, c)| json!({"seed": s, "alphabets": al, "chain": c})).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
        }
        _ => {
            let mut s = format!("samples {} violations {}\n", a.samples, violations.len());
            for (seed, al, c) in &violations {
                let _ = writeln!(s, "seed {seed} alphabets {al:?}: {c}");
            }
            s
        }
    };
    Ok(Outcome::checked(body, violations.is_empty()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn config_lines() {
        let flags = config_flags("# defaults\nM = 4\nsetup=rlrm\nconjectured=true\nfield_degree=4\nno-schemes=false\n").unwrap();
        let flat: Vec<String> = flags.concat();
        assert_eq!(flat, ["-M", "4", "--setup", "rlrm", "--conjectured", "--field-degree", "4"]);
        assert!(config_flags("oops\n").is_err());
        assert!(config_flags("conjectured=maybe\n").is_err());
    }

    #[test]
    fn config_goes_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        fs::write(&path, "M=4\nL=2\n").unwrap();
        let args: Vec<String> = ["bic", "region", "--config", path.to_str().unwrap(), "--subcarriers", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let out = expand_config(args).unwrap();
        assert_eq!(out, ["bic", "region", "-L", "2", "--config", path.to_str().unwrap(), "--subcarriers", "2"]);
    }

    #[test]
    fn erasure_rate_column() {
        assert_eq!(erasure_rl(Setup::R0RL, 4, 3, int(1)).unwrap(), Some(int(1)));
        assert_eq!(erasure_rl(Setup::R0RL, 3, 1, frac(1, 3)).unwrap(), Some(frac(8, 3)));
    }

    #[test]
    fn clipping() {
        let h = HalfPlane::new(int(2), int(1), int(2), BoundStatus::Proven, "t").unwrap();
        let ((x1, y1), (x2, y2)) = clip_line(&h, 3.0, 3.0).unwrap();
        assert_eq!(((x1, y1), (x2, y2)), ((0.0, 2.0), (1.0, 0.0)));
    }
}
