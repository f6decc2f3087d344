//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::export::{export_grid_csv, export_obj, write_grid_csv, Projection};
use crate::expr::{self, Expr};
use crate::meridian::{
    build_elliptic, build_hyperbolic, build_parabolic, mt_cone_patch, mt_general_patch, plane_section_phi, Branch,
    MTFamilyParams, PlaneSection, Profile, ProfileCurvePhi, ProfilePair,
};
use crate::jet::Jet2;
use crate::surface::{point_data, ParamInterval, SurfacePatch};
use crate::verification::{
    run_paper_suite, verify_closed_form_invariants, verify_constant_section_curvature, verify_flat_normal_connection,
    verify_marginally_trapped, GridSpec, VerificationReport,
};

#[derive(Parser, Debug)]
#[command(name = "mtsurf", version, about = "Invariants and marginally trapped meridian surfaces in Minkowski 4-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a family on a grid and write the invariants as CSV (stdout unless --csv).
    Sample(SampleArgs),
    /// Print the invariants of a family at individual points.
    Invariants(InvariantsArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Build a family, export it, and check the claims that apply to it.
    Family(FamilyArgs),
    /// Check that a plane section of the paraboloid has constant curvature.
    Section(SectionArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyType {
    ParabolicMt,
    Cone,
    Parabolic,
    Elliptic,
    Hyperbolic,
}

#[derive(Args, Debug)]
struct FamilySpec {
    #[arg(long = "type", value_enum)]
    kind: FamilyType,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Sign branch of the meridian ODE: plus or minus.
    #[arg(long)]
    sign: Option<String>,
    /// Plane section generating phi, e.g. A=0,B=0,C=-0.5,root=plus.
    #[arg(long, allow_hyphen_values = true)]
    section: Option<String>,
    /// Profile function NAME=EXPR with NAME in f, g (of u) or phi, w1, w2 (of v).
    #[arg(long = "profile-expr", value_name = "NAME=EXPR", allow_hyphen_values = true)]
    profile_expr: Vec<String>,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// u samples as start:end:count (inclusive, count >= 2).
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    /// v samples as start:end:count (inclusive, count >= 2).
    #[arg(long, allow_hyphen_values = true)]
    v: String,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    obj: Option<PathBuf>,
    /// OBJ projection: drop-x1 .. drop-x4, or three rows "a,b,c,d;...;...".
    #[arg(long, allow_hyphen_values = true)]
    projection: Option<String>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    family: FamilySpec,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct InvariantsArgs {
    #[command(flatten)]
    family: FamilySpec,
    /// Parameter point u,v; repeatable.
    #[arg(long = "at", required = true, allow_hyphen_values = true)]
    at: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Paper,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Also write the reports as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[command(flatten)]
    family: FamilySpec,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SectionArgs {
    #[arg(long = "A", allow_hyphen_values = true)]
    a: f64,
    #[arg(long = "B", allow_hyphen_values = true)]
    b: f64,
    #[arg(long = "C", allow_hyphen_values = true)]
    c: f64,
    #[arg(long)]
    root: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

/// Parses `start:end:count`.
pub fn parse_range(name: &str, s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Usage(format!("--{name} must be start:end:count, got '{s}'")));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Usage(format!("--{name}: '{t}' is not a number")))
    };
    let (a, b) = (num(parts[0])?, num(parts[1])?);
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("--{name}: count '{}' is not a positive integer", parts[2])))?;
    if n < 2 {
        return Err(Error::Usage(format!("--{name}: count must be at least 2, got {n}")));
    }
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::Usage(format!("--{name}: need finite start <= end, got {a}:{b}")));
    }
    Ok((a, b, n))
}

/// Parses `A=..,B=..,C=..,root=..`.
pub fn parse_section(s: &str) -> Result<PlaneSection> {
    let (mut a, mut b, mut c, mut root) = (None, None, None, None);
    for item in s.split(',') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--section entry '{item}' is not KEY=VALUE")))?;
        let num = || {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("--section: {k} = '{v}' is not a number")))
        };
        match k.trim() {
            "A" => a = Some(num()?),
            "B" => b = Some(num()?),
            "C" => c = Some(num()?),
            "root" => root = Some(v.parse::<Branch>()?),
            other => return Err(Error::Usage(format!("--section: unknown key '{other}' (expected A, B, C, root)"))),
        }
    }
    let need = |x: Option<f64>, k: &str| x.ok_or_else(|| Error::Usage(format!("--section is missing {k}=")));
    let root = root.ok_or_else(|| Error::Usage("--section is missing root=".into()))?;
    PlaneSection::new(need(a, "A")?, need(b, "B")?, need(c, "C")?, root)
}

/// Parses a projection spec.
pub fn parse_projection(s: Option<&str>) -> Result<Projection> {
    let Some(s) = s else { return Ok(Projection::default()) };
    let drop = match s.trim() {
        "drop-x1" => Some(0),
        "drop-x2" => Some(1),
        "drop-x3" => Some(2),
        "drop-x4" => Some(3),
        _ => None,
    };
    if let Some(d) = drop {
        let mut rows = [[0.0; 4]; 3];
        for (r, col) in (0..4).filter(|&j| j != d).enumerate() {
            rows[r][col] = 1.0;
        }
        return Projection::new(rows);
    }
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 3 {
        return Err(Error::Usage(format!("--projection needs three rows separated by ';', got '{s}'")));
    }
    let mut m = [[0.0; 4]; 3];
    for (i, r) in rows.iter().enumerate() {
        let xs: Vec<&str> = r.split(',').collect();
        if xs.len() != 4 {
            return Err(Error::Usage(format!("--projection row {} needs 4 entries, got '{r}'", i + 1)));
        }
        for (j, x) in xs.iter().enumerate() {
            m[i][j] = x
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("--projection: '{x}' is not a number")))?;
        }
    }
    Projection::new(m)
}

struct Exprs {
    f: Option<Expr>,
    g: Option<Expr>,
    phi: Option<Expr>,
    w1: Option<Expr>,
    w2: Option<Expr>,
}

fn parse_exprs(items: &[String]) -> Result<Exprs> {
    let mut e = Exprs { f: None, g: None, phi: None, w1: None, w2: None };
    for item in items {
        let (name, src) = item
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--profile-expr '{item}' is not NAME=EXPR")))?;
        let parsed = expr::parse(src)?;
        let (slot, var) = match name.trim() {
            "f" => (&mut e.f, 'u'),
            "g" => (&mut e.g, 'u'),
            "phi" => (&mut e.phi, 'v'),
            "w1" => (&mut e.w1, 'v'),
            "w2" => (&mut e.w2, 'v'),
            other => {
                return Err(Error::Usage(format!(
                    "--profile-expr: unknown name '{other}' (expected f, g, phi, w1, w2)"
                )))
            }
        };
        let wrong = if var == 'u' { parsed.mentions_v() } else { parsed.mentions_u() };
        if wrong {
            return Err(Error::Usage(format!("--profile-expr: {name} must be a function of {var} only")));
        }
        *slot = Some(parsed);
    }
    Ok(e)
}

fn expr_profile(e: Expr, var: char) -> Profile {
    let zero = Jet2::constant(0.0);
    if var == 'u' {
        std::sync::Arc::new(move |t: Jet2| e.eval(t, zero))
    } else {
        std::sync::Arc::new(move |t: Jet2| e.eval(zero, t))
    }
}

fn require<T>(x: Option<T>, what: &str, kind: &str) -> Result<T> {
    x.ok_or_else(|| Error::Usage(format!("--type {kind} requires {what}")))
}

fn require_branch(s: &Option<String>, kind: &str) -> Result<Branch> {
    require(s.as_deref(), "--sign plus|minus", kind)?.parse()
}

/// Builds the requested patch. `u_hull`/`v_hull` give domains to
/// expression-defined profiles.
fn build_family(spec: &FamilySpec, u_hull: (f64, f64), v_hull: (f64, f64)) -> Result<SurfacePatch> {
    let kind = spec.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let kind = kind.as_str();
    if let Some(c) = spec.c {
        if spec.kind == FamilyType::ParabolicMt && c == 0.0 {
            return Err(Error::Param("c \u{2260} 0 (c != 0) is required for --type parabolic-mt".into()));
        }
    }
    let mut ex = parse_exprs(&spec.profile_expr)?;
    let u_dom = ParamInterval::new(u_hull.0, u_hull.1);
    let v_dom = ParamInterval::new(v_hull.0, v_hull.1);
    let uses = |names: &[&str]| -> Result<()> {
        for item in &spec.profile_expr {
            let name = item.split('=').next().unwrap_or("").trim();
            if !names.contains(&name) {
                return Err(Error::Usage(format!("--profile-expr {name} is not used by --type {kind}")));
            }
        }
        Ok(())
    };
    match spec.kind {
        FamilyType::ParabolicMt => {
            uses(&[])?;
            let a = require(spec.a, "--a", kind)?;
            let b = require(spec.b, "--b", kind)?;
            let c = require(spec.c, "--c", kind)?;
            let sign = require_branch(&spec.sign, kind)?;
            let section = parse_section(require(spec.section.as_deref(), "--section", kind)?)?;
            mt_general_patch(&MTFamilyParams::new(a, b, c, sign, section)?)
        }
        FamilyType::Cone => {
            uses(&["phi"])?;
            let a = require(spec.a, "--a", kind)?;
            let b = require(spec.b, "--b", kind)?;
            let phi = match (&spec.section, ex.phi.take()) {
                (Some(s), None) => {
                    let s = parse_section(s)?;
                    plane_section_phi(s.a, s.b, s.c, s.root)?
                }
                (None, Some(e)) => ProfileCurvePhi::new(expr_profile(e, 'v'), v_dom),
                (Some(_), Some(_)) => return Err(Error::Usage("--type cone takes either --section or --profile-expr phi=..., not both".into())),
                (None, None) => return Err(Error::Usage("--type cone requires --section or --profile-expr phi=...".into())),
            };
            mt_cone_patch(a, b, &phi)
        }
        FamilyType::Parabolic => {
            uses(&["f", "g", "phi"])?;
            let f = require(ex.f.take(), "--profile-expr f=...", kind)?;
            let g = require(ex.g.take(), "--profile-expr g=...", kind)?;
            let phi = require(ex.phi.take(), "--profile-expr phi=...", kind)?;
            let fp = ProfilePair::new(expr_profile(f, 'u'), expr_profile(g, 'u'), u_dom);
            build_parabolic(&fp, &ProfileCurvePhi::new(expr_profile(phi, 'v'), v_dom))
        }
        FamilyType::Elliptic | FamilyType::Hyperbolic => {
            uses(&["f", "g", "w1", "w2"])?;
            let f = require(ex.f.take(), "--profile-expr f=...", kind)?;
            let g = require(ex.g.take(), "--profile-expr g=...", kind)?;
            let w1 = require(ex.w1.take(), "--profile-expr w1=...", kind)?;
            let w2 = require(ex.w2.take(), "--profile-expr w2=...", kind)?;
            let fp = ProfilePair::new(expr_profile(f, 'u'), expr_profile(g, 'u'), u_dom);
            let (w1, w2) = (expr_profile(w1, 'v'), expr_profile(w2, 'v'));
            if spec.kind == FamilyType::Elliptic {
                build_elliptic(&fp, w1, w2, v_dom)
            } else {
                build_hyperbolic(&fp, w1, w2, v_dom)
            }
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Usage(format!("--tol must be a positive number, got {tol}")));
    }
    Ok(())
}

fn grid_from(args: &GridArgs) -> Result<GridSpec> {
    let (u0, u1, nu) = parse_range("u", &args.u)?;
    let (v0, v1, nv) = parse_range("v", &args.v)?;
    GridSpec::new((u0, u1), nu, (v0, v1), nv)
}

fn write_outputs(patch: &SurfacePatch, grid: &GridSpec, o: &OutputArgs, out: &mut dyn Write, err: &mut dyn Write, csv_to_stdout: bool) -> Result<()> {
    let projection = parse_projection(o.projection.as_deref())?;
    match &o.csv {
        Some(path) => {
            let rows = export_grid_csv(patch, grid, path)?;
            writeln!(err, "wrote {rows} rows to {}", path.display())?;
        }
        None if csv_to_stdout => {
            write_grid_csv(patch, grid, &mut *out)?;
        }
        None => {}
    }
    if let Some(path) = &o.obj {
        let (nv, nf) = export_obj(patch, grid, &projection, path)?;
        writeln!(err, "wrote {nv} vertices and {nf} faces to {}", path.display())?;
    }
    Ok(())
}

fn print_reports(out: &mut dyn Write, reports: &[VerificationReport]) -> Result<()> {
    for r in reports {
        writeln!(out, "{r}")?;
    }
    Ok(())
}

fn json_report(r: &VerificationReport) -> serde_json::Value {
    let components: serde_json::Map<String, serde_json::Value> =
        r.components.iter().map(|(n, x)| (n.clone(), json!(x))).collect();
    // non-finite numbers become null
    json!({
        "claim_id": r.claim_id,
        "passed": r.passed,
        "max_residual": r.max_residual,
        "threshold": r.threshold,
        "worst_point": [r.worst_point.0, r.worst_point.1],
        "samples": r.samples,
        "components": components,
        "notes": r.notes,
    })
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Sample(a) => {
            let grid = grid_from(&a.grid)?;
            let patch = build_family(&a.family, grid.u_range, grid.v_range)?;
            write_outputs(&patch, &grid, &a.output, out, err, true)?;
            Ok(0)
        }
        Command::Invariants(a) => {
            let mut pts = Vec::new();
            for s in &a.at {
                let (u, v) = s
                    .split_once(',')
                    .ok_or_else(|| Error::Usage(format!("--at '{s}' must be u,v")))?;
                let p = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Usage(format!("--at: '{t}' is not a number")));
                pts.push((p(u)?, p(v)?));
            }
            let hull = |sel: fn(&(f64, f64)) -> f64| {
                let lo = pts.iter().map(sel).fold(f64::INFINITY, f64::min);
                let hi = pts.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            };
            let patch = build_family(&a.family, hull(|p| p.0), hull(|p| p.1))?;
            for (u, v) in pts {
                let p = point_data(&patch, u, v)?;
                writeln!(out, "point: ({u}, {v})")?;
                let rows = [
                    ("E", p.E),
                    ("F", p.F),
                    ("G", p.G),
                    ("L", p.L),
                    ("M", p.M),
                    ("N", p.N),
                    ("k", p.k),
                    ("kappa", p.kappa_normal),
                    ("K", p.K),
                    ("H1", p.H1),
                    ("H2", p.H2),
                    ("HdotH", p.h_norm_sq()),
                ];
                for (name, x) in rows {
                    writeln!(out, "  {name}: {x:.16e}")?;
                }
                writeln!(out, "  z: {:?}", p.z.to_array())?;
                writeln!(out, "  H: {:?}", p.H.to_array())?;
            }
            Ok(0)
        }
        Command::Verify(a) => {
            let Suite::Paper = a.suite;
            check_tol(a.tol)?;
            let suite = run_paper_suite(a.tol)?;
            print_reports(out, &suite.claims)?;
            if !suite.informational.is_empty() {
                writeln!(out, "# informational (not counted)")?;
                print_reports(out, &suite.informational)?;
            }
            writeln!(out, "passed {} of {} claims", suite.passed_count(), suite.claims.len())?;
            if let Some(path) = &a.json {
                let doc = json!({
                    "claims": suite.claims.iter().map(json_report).collect::<Vec<_>>(),
                    "informational": suite.informational.iter().map(json_report).collect::<Vec<_>>(),
                });
                let mut w = BufWriter::new(File::create(path)?);
                serde_json::to_writer_pretty(&mut w, &doc).map_err(std::io::Error::from)?;
                writeln!(w)?;
                w.flush()?;
            }
            Ok(if suite.all_passed() { 0 } else { 1 })
        }
        Command::Family(a) => {
            check_tol(a.tol)?;
            let grid = grid_from(&a.grid)?;
            let patch = build_family(&a.family, grid.u_range, grid.v_range)?;
            write_outputs(&patch, &grid, &a.output, out, err, false)?;
            let reports = match a.family.kind {
                FamilyType::ParabolicMt | FamilyType::Cone => vec![verify_marginally_trapped(&patch, &grid, a.tol)?],
                FamilyType::Parabolic => vec![
                    verify_flat_normal_connection(&patch, &grid, a.tol)?,
                    verify_closed_form_invariants(&patch, &grid, a.tol)?,
                ],
                FamilyType::Elliptic | FamilyType::Hyperbolic => Vec::new(),
            };
            print_reports(out, &reports)?;
            Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
        }
        Command::Section(a) => {
            check_tol(a.tol)?;
            let root: Branch = a.root.parse()?;
            let r = verify_constant_section_curvature(a.a, a.b, a.c, root, a.samples, a.tol)?;
            print_reports(out, std::slice::from_ref(&r))?;
            Ok(if r.passed { 0 } else { 1 })
        }
    }
}

/// Runs the command line `argv` (including the program name) against the
/// given streams and returns the exit code.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = BufWriter::new(stdout.lock());
    let mut err = stderr.lock();
    let code = run_cli_with(argv, &mut out, &mut err);
    let _ = out.flush();
    code
}
