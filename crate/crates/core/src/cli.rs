//! Command-line front end: input documents, subcommands and report rendering.

use std::fmt::Write as _;
use std::path::Path;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::alphabound::{certificate, compare_with_slope, Certificate};
use crate::appendix::grid_oracle;
use crate::cones::{ampleness_violation, face_decompose, mu};
use crate::curves::{fiber_classes, minus_one_curves};
use crate::error::{Error, Result};
use crate::lattice::{DivClass, SurfaceModel};
use crate::rational::Rational;
use crate::stability::{cubic_line_family_report, verdict, Status, Verdict};

#[derive(Parser, Debug)]
#[command(
    name = "kstab",
    version,
    about = "Exact K-stability checks for polarized del Pezzo surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verdict for a polarization
    Check(ClassArgs),
    /// Effective divisor bounding alpha from above (degrees 4 to 7)
    AlphaBound(ClassArgs),
    /// List (-1)-curves, or conic fiber classes
    Curves {
        #[arg(long)]
        degree: u8,
        #[arg(long)]
        fibers: bool,
        #[arg(long)]
        json: bool,
    },
    /// Threshold mu(L) and the rescaled class
    Mu(ClassArgs),
    /// Cubic surface polarized by -K + x E for a line E
    ExampleCubic {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        json: bool,
    },
    /// Grid check of the two slope inequalities
    VerifyAppendix {
        #[arg(long)]
        max_denominator: u32,
        #[arg(long, default_value = "1")]
        delta_max: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args, Debug)]
pub struct ClassArgs {
    #[arg(long)]
    pub degree: Option<u8>,
    /// Path to a JSON document, or the document itself
    #[arg(long = "L")]
    pub l: String,
    #[arg(long)]
    pub json: bool,
}

/// A validated polarization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedInput {
    pub model: SurfaceModel,
    pub class: DivClass,
}

impl ParsedInput {
    pub fn echo(&self) -> Value {
        json!({ "degree": self.model.degree(), "L": self.class })
    }
}

/// Parses an input document. `degree` supplies or cross-checks the degree.
///
/// Accepted shapes: `{"degree", "L": {"h", "e"}}`, a bare `{"h", "e"}` (with
/// `degree`), `{"degree": 3, "family": "six-line", "x"}` and
/// `{"degree", "family": "anticanonical-plus", "delta", "a"}`.
pub fn parse_input(document: &str, degree: Option<u8>) -> Result<ParsedInput> {
    let v: Value = serde_json::from_str(document).map_err(|e| Error::Input(format!("malformed JSON: {e}")))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Input("input must be a JSON object".into()))?;
    let doc_degree = match obj.get("degree") {
        None => None,
        Some(d) => Some(
            d.as_u64()
                .and_then(|d| u8::try_from(d).ok())
                .ok_or_else(|| Error::Input(format!("degree must be an integer, got {d}")))?,
        ),
    };
    let d = match (doc_degree, degree) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Input(format!("document has degree {a} but --degree is {b}")));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => {
            return Err(Error::Input(
                "degree missing: give it in the document or with --degree".into(),
            ))
        }
    };
    let s = SurfaceModel::new(d)?;
    let class = if let Some(family) = obj.get("family") {
        match family.as_str() {
            Some("six-line") => {
                if d != 3 {
                    return Err(Error::Input(
                        "the six-line family lives on the cubic surface (degree 3)".into(),
                    ));
                }
                let x = rational_field(obj.get("x"), "x")?;
                let sum = (1..=6).fold(s.zero(), |acc, i| &acc + &s.e(i));
                s.anticanonical().add_scaled(&x, &sum)
            }
            Some("anticanonical-plus") => anticanonical_plus(&s, obj)?,
            _ => return Err(Error::Input(format!("unknown family {family}"))),
        }
    } else {
        let l = obj.get("L").unwrap_or(&v);
        parse_class(&s, l)?
    };
    if let Some(why) = ampleness_violation(&class, &s)? {
        return Err(Error::Input(format!("L = {class} is not ample: {why}")));
    }
    Ok(ParsedInput { model: s, class })
}

fn anticanonical_plus(s: &SurfaceModel, obj: &serde_json::Map<String, Value>) -> Result<DivClass> {
    let delta = match obj.get("delta") {
        None => Rational::zero(),
        v => rational_field(v, "delta")?,
    };
    let a = rational_list(obj.get("a"), "a")?;
    let max_len = if delta.is_zero() { s.r() } else { s.r() - 1 };
    if a.len() > max_len {
        return Err(Error::Input(format!(
            "at most {max_len} coefficients allowed here, got {}",
            a.len()
        )));
    }
    let mut l = s.anticanonical();
    if !delta.is_zero() {
        let es: Vec<DivClass> = (1..=a.len()).map(|i| s.e(i)).collect();
        let c = fiber_classes(s)
            .iter()
            .find(|c| es.iter().all(|e| e.dot(c).is_zero()))
            .ok_or_else(|| Error::Input("no fiber class misses the listed curves".into()))?;
        l = l.add_scaled(&delta, c);
    }
    for (i, x) in a.iter().enumerate() {
        l = l.add_scaled(x, &s.e(i + 1));
    }
    Ok(l)
}

fn parse_class(s: &SurfaceModel, v: &Value) -> Result<DivClass> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Input("L must be an object {\"h\", \"e\"}".into()))?;
    let h = rational_field(obj.get("h"), "h")?;
    let b = rational_list(obj.get("e"), "e")?;
    s.class(h, b.into_iter().map(|x| -x).collect())
}

fn rational_value(v: &Value, name: &str) -> Result<Rational> {
    match v {
        Value::String(t) => t.parse(),
        Value::Number(n) if n.is_i64() => Ok(Rational::integer(n.as_i64().unwrap())),
        _ => Err(Error::Input(format!(
            "{name}: expected an integer or a \"p/q\" string, got {v}"
        ))),
    }
}

fn rational_field(v: Option<&Value>, name: &str) -> Result<Rational> {
    rational_value(v.ok_or_else(|| Error::Input(format!("missing field {name}")))?, name)
}

fn rational_list(v: Option<&Value>, name: &str) -> Result<Vec<Rational>> {
    v.and_then(Value::as_array)
        .ok_or_else(|| Error::Input(format!("{name} must be a list")))?
        .iter()
        .map(|x| rational_value(x, name))
        .collect()
}

/// Reads `--L`: inline JSON when it starts with `{`, a file path otherwise.
pub fn load_document(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Input(format!("cannot read {arg}: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

fn criterion(status: Status) -> &'static str {
    match status {
        Status::KStableByMainTheorem => {
            "Dervan's criterion, with the alpha lower bound for degree 1 and 2 under condition (A)"
        }
        Status::KStableBySixLineTheorem => "six-line theorem for cubic surfaces, 0 < x <= 1/10",
        Status::DervanInapplicable => "slope bound alpha <= (2/3) nu for degree 4 and above",
        Status::Unsupported => "none implemented for this surface",
        Status::Unknown => "none applies",
    }
}

pub fn render_report(input: &ParsedInput, v: &Verdict, format: Format) -> String {
    match format {
        Format::Json => to_json(&json!({ "input": input.echo(), "verdict": v })),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "degree: {}", input.model.degree());
            let _ = writeln!(out, "L: {}", input.class);
            let _ = writeln!(out, "status: {:?}", v.status);
            let _ = writeln!(out, "criterion: {}", criterion(v.status));
            let _ = writeln!(out, "nu: {}", v.nu);
            let _ = writeln!(out, "condition (A): {}", if v.condition_a { "holds" } else { "fails" });
            if let Some(g) = &v.alpha_lower {
                let _ = writeln!(out, "alpha lower bound (normalized): {g}");
            }
            if let Some(g) = &v.alpha_lower_input {
                let _ = writeln!(out, "alpha lower bound (as given): {g}");
            }
            if let Some(m) = &v.mu {
                let _ = writeln!(out, "mu: {m}");
            }
            if let Some(cd) = &v.contraction {
                let _ = writeln!(out, "contraction: {} delta={} a={:?}", cd.kind, cd.delta, cd.a);
            }
            if let Some(cert) = &v.certificate {
                render_certificate(&mut out, cert);
            }
            if let Some(u) = &v.alpha_upper_input {
                let _ = writeln!(out, "alpha upper bound (as given): {u}");
            }
            for n in &v.notes {
                let _ = writeln!(out, "note: {n}");
            }
            out
        }
    }
}

fn render_certificate(out: &mut String, cert: &Certificate) {
    let _ = writeln!(out, "certificate:");
    for c in &cert.divisor {
        let _ = writeln!(out, "  {:>8}  {:<8} {}", c.coefficient.to_string(), c.label, c.class);
    }
    let _ = writeln!(
        out,
        "witness: {} with coefficient {}",
        cert.witness().label,
        cert.witness().coefficient
    );
    let _ = writeln!(out, "bound: {}", cert.bound);
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn format_of(json: bool) -> Format {
    if json {
        Format::Json
    } else {
        Format::Text
    }
}

/// Runs one command and returns what should be printed.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Check(args) => {
            let input = parse_input(&load_document(&args.l)?, args.degree)?;
            let v = verdict(&input.model, &input.class)?;
            Ok(render_report(&input, &v, format_of(args.json)))
        }
        Command::AlphaBound(args) => {
            let input = parse_input(&load_document(&args.l)?, args.degree)?;
            let s = &input.model;
            if !(4..=7).contains(&s.degree()) {
                return Err(Error::Domain(format!(
                    "alpha-bound needs degree 4..=7, got {}",
                    s.degree()
                )));
            }
            let m = mu(&input.class, s)?;
            let l1 = input.class.scale(&m);
            let cd = face_decompose(&l1, s)?;
            let cert = certificate(s, &cd)?;
            let cmp = compare_with_slope(s, &cd, &cert)?;
            if args.json {
                return Ok(to_json(&json!({
                    "input": input.echo(),
                    "mu": m,
                    "rescaled": l1,
                    "contraction": cd,
                    "certificate": cert,
                    "comparison": cmp,
                })));
            }
            let mut out = String::new();
            let _ = writeln!(out, "mu: {m}");
            let _ = writeln!(out, "rescaled L: {l1}");
            let _ = writeln!(out, "contraction: {} delta={} a={:?}", cd.kind, cd.delta, cd.a);
            render_certificate(&mut out, &cert);
            let _ = writeln!(out, "(2/3) nu: {}", cmp.two_thirds_nu);
            let _ = writeln!(out, "comparison: {}", if cmp.equality { "equality" } else { "strict" });
            Ok(out)
        }
        Command::Curves { degree, fibers, json } => {
            let s = SurfaceModel::new(degree)?;
            let list = if fibers {
                fiber_classes(&s)
            } else {
                minus_one_curves(&s)
            };
            if json {
                return Ok(to_json(
                    &json!({ "degree": degree, "count": list.len(), "classes": list }),
                ));
            }
            let mut out = String::new();
            let _ = writeln!(out, "{} classes", list.len());
            for c in list {
                let _ = writeln!(out, "{c}");
            }
            Ok(out)
        }
        Command::Mu(args) => {
            let input = parse_input(&load_document(&args.l)?, args.degree)?;
            let m = mu(&input.class, &input.model)?;
            let l1 = input.class.scale(&m);
            if args.json {
                return Ok(to_json(&json!({ "input": input.echo(), "mu": m, "rescaled": l1 })));
            }
            Ok(format!("mu: {m}\nrescaled L: {l1}\n"))
        }
        Command::ExampleCubic { x, json } => {
            let x: Rational = x.parse()?;
            let r = cubic_line_family_report(&x)?;
            if json {
                return Ok(to_json(&r));
            }
            Ok(format!(
                "x: {}\nnu: {}\ncondition (A): {}\nalpha upper bound: {}\n(2/3) nu: {}\nin window: {}\n",
                r.x,
                r.nu,
                if r.condition_a { "holds" } else { "fails" },
                r.alpha_upper,
                r.two_thirds_nu,
                r.in_window
            ))
        }
        Command::VerifyAppendix {
            max_denominator,
            delta_max,
            json,
        } => {
            let delta_max: Rational = delta_max.parse()?;
            let r = grid_oracle(max_denominator, &delta_max)?;
            if json {
                return Ok(to_json(&r));
            }
            let mut out = String::new();
            let _ = writeln!(
                out,
                "grid: multiples of 1/{max_denominator}, delta in [0, {}]",
                r.delta_max
            );
            let _ = writeln!(out, "points: {}", r.points);
            let _ = writeln!(out, "equality cases: {}", r.equality_cases.len());
            let _ = writeln!(out, "counterexamples: {}", r.counterexamples.len());
            for c in &r.counterexamples {
                let _ = writeln!(out, "  a={:?} delta={}", c.a(), c.delta());
            }
            Ok(out)
        }
    }
}
