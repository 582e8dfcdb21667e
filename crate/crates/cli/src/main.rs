//! heightbound: explicit height bounds, bounded point searches and lattice
//! diagnostics from JSON job documents.

mod input;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use heightbound::bounds::{
    general_bound, poly_curve_bound, sharpness_compare, transverse_bound, BoundReport, C0Choice, ConstantsTable,
    Provenance,
};
use heightbound::heights::{canonical_height, point_h2, weil_height_q, DEFAULT_EPS};
use heightbound::klattice::{gradodet_check, orthogonal_complement_with_cap, successive_minima_with_cap, KLattice};
use heightbound::search::{search_rational_points, MWInput};
use heightbound::{selftest, Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "heightbound",
    version,
    about = "Explicit Néron–Tate height bounds on curves in E^N"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Job document (JSON); standard input when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Report destination; standard output when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Absolute precision of canonical heights.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Largest coefficient radius the point search may reach.
    #[arg(long, global = true, default_value_t = 1000)]
    radius_cap: u64,
    /// Largest number of lattice vectors an enumeration may visit.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    vectors_cap: u64,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Height bound for a curve given by its invariants.
    Bound,
    /// Height bound for the curve p(x1) = y2 in E².
    Polybound,
    /// Bounded search for rational points on p(x1) = y2.
    Search,
    /// Successive minima, Minkowski check and orthogonal complement of a lattice.
    Lattice,
    /// Heights of a point on E.
    Height,
    /// Run the internal invariant suite.
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::Polybound => "polybound",
            Command::Search => "search",
            Command::Lattice => "lattice",
            Command::Height => "height",
            Command::Selftest => "selftest",
        }
    }
}

/// Sections of a report; unused ones stay null.
#[derive(Default)]
struct Report {
    input_echo: Value,
    constants_trace: Value,
    bound: Value,
    warnings: Vec<String>,
    certification: Value,
    /// Exit status for a completed job that is not a full success.
    status: u8,
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn unit_of(name: &str) -> &'static str {
    match name {
        "C0" | "C0_packaged" | "C5(N,1,E)" | "gamma" | "h_W(p)" | "h2(C) bound" => "nats",
        _ => "1",
    }
}

fn provenance(p: Provenance) -> &'static str {
    match p {
        Provenance::Rigorous => "rigorous",
        Provenance::Packaged => "packaged",
        Provenance::Derived => "derived",
    }
}

fn trace_json(t: &ConstantsTable) -> Value {
    Value::Array(
        t.entries
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "value": c.value.map_or(Value::Null, num),
                    "ln": num(c.ln),
                    "unit": unit_of(&c.name),
                    "provenance": provenance(c.provenance),
                })
            })
            .collect(),
    )
}

fn bound_json(b: &BoundReport, c0: C0Choice) -> Value {
    json!({
        "branch": b.branch,
        "value": b.bound_nats.map_or(Value::Null, num),
        "ln": num(b.bound_ln),
        "log10": num(b.bound_ln / std::f64::consts::LN_10),
        "unit": "nats",
        "provenance": match c0 { C0Choice::Rigorous => "rigorous", C0Choice::Packaged => "packaged" },
    })
}

fn read_input(cli: &Cli) -> Result<Value> {
    let text = match &cli.input {
        Some(p) => {
            fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))?
        }
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    let doc: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
    input::check_schema(&doc)?;
    Ok(doc)
}

fn run_bound(doc: &Value) -> Result<Report> {
    let desc = input::descriptor(doc)?;
    let c0 = input::c0_choice(doc)?;
    desc.validate()?;
    let limit = (desc.r_c - desc.t_c).max(desc.t_c);
    if desc.r >= limit {
        return Err(Error::OutOfRange(format!(
            "rank r = {} is not below max(r_C − t_C, t_C) = {limit}",
            desc.r
        )));
    }
    let rep = if desc.t_c == desc.n && desc.r_c == desc.n {
        transverse_bound(&desc, c0)?
    } else {
        general_bound(&desc, c0)?
    };
    Ok(Report {
        constants_trace: trace_json(&rep.trace),
        bound: bound_json(&rep, c0),
        warnings: rep.warnings.clone(),
        certification: json!({ "checks": rep.checks }),
        ..Report::default()
    })
}

fn run_polybound(doc: &Value) -> Result<Report> {
    let e = input::curve(doc)?;
    let ord = input::order(doc, Some(&e))?;
    let p = input::polynomial(doc)?;
    let c0 = input::c0_choice(doc)?;
    let (rep, fam) = poly_curve_bound(&e, &ord, &p, c0)?;
    let sharp = sharpness_compare(2, &ord, e.c_e())?;
    Ok(Report {
        constants_trace: trace_json(&rep.trace),
        bound: bound_json(&rep, c0),
        warnings: rep.warnings.clone(),
        certification: json!({
            "checks": rep.checks,
            "family": fam,
            "C(E)": { "value": num(e.c_e()), "unit": "nats" },
            "sharpness": sharp,
        }),
        ..Report::default()
    })
}

fn run_search(doc: &Value, cli: &Cli) -> Result<Report> {
    let e = input::curve(doc)?;
    let ord = input::order(doc, Some(&e))?;
    let p = input::polynomial(doc)?;
    let generator = match doc.get("generator") {
        None | Some(Value::Null) => None,
        Some(v) => Some(input::point(v)?),
    };
    let rank = doc
        .get("rank")
        .and_then(Value::as_u64)
        .unwrap_or(generator.is_some() as u64) as u32;
    let mw = MWInput::new(&e, generator, rank)?;
    let cap = doc.get("radius_cap").and_then(Value::as_u64).unwrap_or(cli.radius_cap);
    let rep = search_rational_points(&e, &ord, &p, &mw, cap)?;
    let mut warnings = rep.bound.warnings.clone();
    if !rep.fully_certified {
        warnings.push(format!(
            "search reached coefficient radius {} of the {} required; the list of points is complete only within that radius",
            rep.searched_radius, rep.required_coeff_radius
        ));
    }
    Ok(Report {
        constants_trace: trace_json(&rep.bound.trace),
        bound: bound_json(&rep.bound, C0Choice::Rigorous),
        warnings,
        status: if rep.fully_certified { 0 } else { 2 },
        certification: serde_json::to_value(&rep).map_err(|e| Error::Internal(e.to_string()))?,
        ..Report::default()
    })
}

fn run_lattice(doc: &Value, cli: &Cli) -> Result<Report> {
    let ord = input::order(doc, None)?;
    let l = KLattice::new(input::rows(doc)?, ord)?;
    let minima = successive_minima_with_cap(&l, cli.vectors_cap)?;
    let complement = if l.rank() < l.ambient_dim() {
        match orthogonal_complement_with_cap(&l, cli.vectors_cap) {
            Ok(c) => json!({ "rows": c.rows(), "det": num(c.det()), "det_product": num(l.det() * c.det()) }),
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    let grado = gradodet_check(&l)?;
    let mut warnings = Vec::new();
    if !minima.minkowski_ok {
        warnings.push("Minkowski inequality fails on this lattice".into());
    }
    Ok(Report {
        certification: json!({
            "rank": l.rank(),
            "det": num(l.det()),
            "minima": minima,
            "complement": complement,
            "degree_vs_det": grado,
        }),
        warnings,
        ..Report::default()
    })
}

fn run_height(doc: &Value, cli: &Cli) -> Result<Report> {
    let e = input::curve(doc)?;
    let p = input::point(
        doc.get("point")
            .ok_or_else(|| Error::InvalidInput("missing field \"point\"".into()))?,
    )?;
    e.check(&p)?;
    let hh = canonical_height(&e, &p, cli.eps)?;
    let nats = |v: f64| json!({ "value": num(v), "unit": "nats" });
    Ok(Report {
        certification: json!({
            "h2": nats(point_h2(&p)),
            "weil_x": nats(p.x().map_or(0.0, weil_height_q)),
            "canonical": { "value": num(hh.value), "abs_error": num(hh.abs_error), "unit": "nats" },
            "C(E)": nats(e.c_e()),
            "order": e.small_order(&p),
        }),
        ..Report::default()
    })
}

fn run_selftest() -> Result<Report> {
    let r = selftest::run()?;
    Ok(Report {
        status: if r.passed() { 0 } else { 3 },
        certification: json!({ "passed": r.passed(), "checks": r.checks }),
        ..Report::default()
    })
}

fn execute(cli: &Cli) -> Result<Report> {
    if cli.eps.is_nan() || cli.eps <= 0.0 || cli.radius_cap == 0 || cli.vectors_cap == 0 {
        return Err(Error::InvalidInput(
            "--eps, --radius-cap and --vectors-cap must be positive".into(),
        ));
    }
    if cli.command == Command::Selftest {
        return run_selftest();
    }
    let doc = read_input(cli)?;
    let mut rep = match cli.command {
        Command::Bound => run_bound(&doc),
        Command::Polybound => run_polybound(&doc),
        Command::Search => run_search(&doc, cli),
        Command::Lattice => run_lattice(&doc, cli),
        Command::Height => run_height(&doc, cli),
        Command::Selftest => unreachable!(),
    }?;
    rep.input_echo = doc;
    Ok(rep)
}

fn emit(cli: &Cli, doc: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).map_err(io::Error::other)?;
    text.push('\n');
    match &cli.output {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (doc, code) = match execute(&cli) {
        Ok(rep) => (
            json!({
                "schema": input::SCHEMA,
                "command": cli.command.name(),
                "input_echo": rep.input_echo,
                "constants_trace": rep.constants_trace,
                "bound": rep.bound,
                "warnings": rep.warnings,
                "certification": rep.certification,
            }),
            rep.status,
        ),
        Err(e) => {
            eprintln!("heightbound: {e}");
            (
                json!({
                    "schema": input::SCHEMA,
                    "command": cli.command.name(),
                    "error": { "message": e.to_string(), "exit_code": e.exit_code() },
                }),
                e.exit_code() as u8,
            )
        }
    };
    if let Err(e) = emit(&cli, &doc) {
        eprintln!("heightbound: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
