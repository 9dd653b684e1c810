//! `bidisk-dw` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::boundary::{classify_dw_detailed, k_curve, k_value, slice_denjoy_wolff, DWClass, SliceDW};
use crate::dynamics::{continuation_dw, convergence_report, herve_case, iterate_orbit, ContinuationStatus};
use crate::error::{Error, Result};
use crate::geometry::{fmt_complex, parse_complex, BidiskPoint, BoundaryPoint, Side};
use crate::julia::{horosphere_invariance, julia_max_violation_seeded, julia_tightness, wolff_set_structure_seeded};
use crate::julia::{DEFAULT_SAMPLES, NOISE, SPOT_SAMPLES};
use crate::maps::{resolve_map, ScalarMap, SelfMap2};
use crate::sampling::DEFAULT_SEED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "bidisk-dw", version, about = "Denjoy-Wolff points of holomorphic self-maps of the bidisk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a component (or the pair) at a point
    Eval(EvalArgs),
    /// Directional-derivative curve K(M) at a torus point
    Kcurve(KcurveArgs),
    /// Classify a boundary point as a left or right Denjoy-Wolff candidate
    Classify(ClassifyArgs),
    /// Denjoy-Wolff point of a one-variable slice
    SliceDw(SliceArgs),
    /// Sampled check of the weighted Julia inequality
    JuliaCheck(JuliaArgs),
    /// Sampled check of horosphere invariance under F
    Invariance(InvarianceArgs),
    /// Orbit of F with horosphere radii
    Iterate(IterateArgs),
    /// Locate the Denjoy-Wolff point of F by continuation of rF
    FindDw(FindArgs),
    /// Shape of the Wolff set at a torus point
    WolffSet(PairArgs),
    /// Hervé's case for F at a torus point
    HerveCase(HerveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Record,
}

#[derive(Args, Debug)]
struct Output {
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct Pair {
    /// First component: builtin:<name> or a spec file
    #[arg(long)]
    phi: String,
    #[arg(long)]
    psi: String,
}

#[derive(Args, Debug)]
struct Sampling {
    #[arg(long)]
    samples: Option<usize>,
    /// Sampling seed (decimal or 0x-hex); DW_SEED sets the default
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, required_unless_present = "phi", conflicts_with_all = ["phi", "psi"])]
    map: Option<String>,
    #[arg(long, requires = "psi")]
    phi: Option<String>,
    #[arg(long, requires = "phi")]
    psi: Option<String>,
    /// Point "re,im;re,im"
    #[arg(long, allow_hyphen_values = true)]
    at: BidiskPoint,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct KcurveArgs {
    #[arg(long)]
    map: String,
    #[arg(long, allow_hyphen_values = true)]
    tau: BoundaryPoint,
    #[arg(long, default_value_t = Side::Left)]
    side: Side,
    #[arg(long, default_value_t = 0.1)]
    mmin: f64,
    #[arg(long, default_value_t = 10.0)]
    mmax: f64,
    #[arg(long, default_value_t = 25)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    map: String,
    #[arg(long, allow_hyphen_values = true)]
    tau: BoundaryPoint,
    #[arg(long, default_value_t = Side::Left)]
    side: Side,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SliceArgs {
    #[arg(long)]
    map: String,
    #[arg(long, default_value_t = Side::Left)]
    side: Side,
    /// The frozen coordinate "re,im"
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    fixed: Complex64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct JuliaArgs {
    #[arg(long)]
    map: String,
    #[arg(long, allow_hyphen_values = true)]
    tau: BoundaryPoint,
    #[arg(long = "M")]
    big_m: f64,
    /// Defaults to K(M) + 1e-6
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct InvarianceArgs {
    #[command(flatten)]
    pair: Pair,
    #[arg(long, allow_hyphen_values = true)]
    tau: BoundaryPoint,
    #[arg(long = "K")]
    k: f64,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct IterateArgs {
    #[command(flatten)]
    pair: Pair,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0;0,0")]
    start: BidiskPoint,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    tau: BoundaryPoint,
    #[arg(long = "K", default_value_t = 1.0)]
    k: f64,
    /// Convergence tolerance for the record summary
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct FindArgs {
    #[command(flatten)]
    pair: Pair,
    /// Stages r = 1 - 2^-k for k = 1..=kmax
    #[arg(long, default_value_t = 20)]
    kmax: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[command(flatten)]
    pair: Pair,
    #[arg(long, allow_hyphen_values = true)]
    tau: BoundaryPoint,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct HerveArgs {
    #[command(flatten)]
    pair: Pair,
    #[arg(long, allow_hyphen_values = true)]
    tau: BoundaryPoint,
    #[command(flatten)]
    output: Output,
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("bad seed '{s}'"))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("DW_SEED") {
        Ok(v) => parse_seed(v.trim()).map_err(Error::InvalidArgument),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// `key: value` lines, nested by two-space indentation.
#[derive(Debug, Default)]
pub struct Record(Vec<(String, Field)>);

#[derive(Debug)]
enum Field {
    Value(String),
    Nested(Record),
    List(Vec<Record>),
}

impl Record {
    fn put(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), Field::Value(value.to_string())));
        self
    }

    fn nest(&mut self, key: &str, r: Record) -> &mut Self {
        self.0.push((key.to_string(), Field::Nested(r)));
        self
    }

    fn list(&mut self, key: &str, items: Vec<Record>) -> &mut Self {
        self.0.push((key.to_string(), Field::List(items)));
        self
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let pad = " ".repeat(indent);
        for (key, field) in &self.0 {
            match field {
                Field::Value(v) => {
                    let _ = writeln!(out, "{pad}{key}: {v}");
                }
                Field::Nested(r) => {
                    let _ = writeln!(out, "{pad}{key}:");
                    r.render_into(out, indent + 2);
                }
                Field::List(items) => {
                    let _ = writeln!(out, "{pad}{key}:");
                    for item in items {
                        let mut body = String::new();
                        item.render_into(&mut body, indent + 4);
                        // turn the first line's indent into a bullet
                        let cut = indent + 2;
                        let _ = write!(out, "{pad}  - {}", &body[cut + 2..]);
                    }
                }
            }
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s, 0);
        s
    }
}

fn point_text(p: &BidiskPoint) -> String {
    format!("{};{}", fmt_complex(p.z1), fmt_complex(p.z2))
}

fn class_record(class: &DWClass) -> Record {
    let mut r = Record::default();
    r.put("kind", class.kind());
    match class {
        DWClass::TypeICPoint { alpha } => {
            r.put("alpha", alpha);
        }
        DWClass::TypeINonC { k_limit } => {
            r.put("k_limit", k_limit);
        }
        DWClass::TypeII { a } => {
            r.put("A", a);
        }
        DWClass::Neither { k_min: Some(k) } => {
            r.put("k_min", k);
        }
        _ => {}
    }
    r
}

fn load_pair(p: &Pair) -> Result<SelfMap2> {
    Ok(SelfMap2::new(resolve_map(&p.phi)?, resolve_map(&p.psi)?))
}

struct Emit {
    text: String,
    out: Option<PathBuf>,
}

fn pick(output: &Output, csv_ok: bool) -> Result<Format> {
    match output.format {
        Some(Format::Csv) if !csv_ok => Err(Error::InvalidArgument("this verb has no CSV output".into())),
        Some(f) => Ok(f),
        None if csv_ok => Ok(Format::Csv),
        None => Ok(Format::Record),
    }
}

fn record(output: &Output, r: Record) -> Result<Emit> {
    pick(output, false)?;
    Ok(Emit { text: r.render(), out: output.out.clone() })
}

fn dispatch(cmd: Command) -> Result<Emit> {
    match cmd {
        Command::Eval(a) => {
            let mut r = Record::default();
            r.put("point", point_text(&a.at));
            match (&a.map, &a.phi, &a.psi) {
                (Some(m), _, _) => {
                    let m = resolve_map(m)?;
                    r.put("value", fmt_complex(m.eval(a.at.z1, a.at.z2)?));
                }
                (None, Some(phi), Some(psi)) => {
                    let f = SelfMap2::new(resolve_map(phi)?, resolve_map(psi)?);
                    r.put("value", point_text(&f.apply(&a.at)?));
                }
                _ => return Err(Error::InvalidArgument("eval needs --map or --phi/--psi".into())),
            }
            record(&a.output, r)
        }
        Command::Kcurve(a) => {
            let m = side_map(&resolve_map(&a.map)?, a.side);
            let tau = side_tau(&a.tau, a.side);
            let c = k_curve(&m, &tau, a.mmin, a.mmax, a.n)?;
            let text = match pick(&a.output, true)? {
                Format::Csv => c.to_csv(),
                Format::Record => {
                    let mut r = Record::default();
                    r.put("tau", a.tau)
                        .put("side", a.side)
                        .put("n", c.m_grid.len())
                        .put("k_min", c.k_min())
                        .put("k_max", c.k_max())
                        .put("monotone", c.monotone)
                        .put("valid", c.valid);
                    r.render()
                }
            };
            Ok(Emit { text, out: a.output.out })
        }
        Command::Classify(a) => {
            let m = resolve_map(&a.map)?;
            let c = classify_dw_detailed(&m, &a.tau, a.side)?;
            let mut r = class_record(&c.class);
            let mut d = Record::default();
            d.put("side", c.diagnostics.side);
            if let Some(v) = c.diagnostics.boundary_value {
                d.put("boundary_value", fmt_complex(v));
            }
            if let Some(curve) = &c.diagnostics.curve {
                d.put(
                    "grid",
                    format!("[{}, {}] x {}", curve.m_grid[0], curve.m_grid[curve.m_grid.len() - 1], curve.m_grid.len()),
                )
                .put("k_min", curve.k_min())
                .put("k_max", curve.k_max())
                .put("monotone", curve.monotone)
                .put("widened", c.diagnostics.widened);
            }
            if let Some(s) = &c.diagnostics.slice {
                d.nest("slice", slice_record(s));
            }
            r.nest("diagnostics", d);
            record(&a.output, r)
        }
        Command::SliceDw(a) => {
            let m = resolve_map(&a.map)?;
            record(&a.output, slice_record(&slice_denjoy_wolff(&m, a.side, a.fixed)?))
        }
        Command::JuliaCheck(a) => {
            let m = resolve_map(&a.map)?;
            let seed = resolve_seed(a.sampling.seed)?;
            let n = a.sampling.samples.unwrap_or(DEFAULT_SAMPLES);
            let k_hat = k_value(&m, &a.tau, a.big_m)?;
            let alpha = a.alpha.unwrap_or(k_hat + 1e-6);
            let rep = julia_max_violation_seeded(&m, &a.tau, a.big_m, alpha, n, seed)?;
            let mut r = Record::default();
            r.put("M", a.big_m)
                .put("alpha", alpha)
                .put("k_hat", k_hat)
                .put("n_samples", rep.n_samples)
                .put("seed", seed)
                .put("max_violation", rep.max_violation)
                .put("holds", rep.max_violation <= NOISE)
                .put("sampled_ratio", rep.tightness)
                .put("worst_point", point_text(&rep.worst_point));
            match julia_tightness(&m, &a.tau, a.big_m) {
                Ok(t) => r.put("tightness", t),
                Err(e) => r.put("tightness", format!("unavailable ({e})")),
            };
            record(&a.output, r)
        }
        Command::Invariance(a) => {
            let f = load_pair(&a.pair)?;
            let seed = resolve_seed(a.sampling.seed)?;
            let n = a.sampling.samples.unwrap_or(SPOT_SAMPLES);
            let rep = horosphere_invariance(&f, &a.tau, a.k, n, seed)?;
            let mut r = Record::default();
            r.put("K", rep.k)
                .put("n_samples", rep.n_samples)
                .put("seed", seed)
                .put("max_violation", rep.max_violation)
                .put("holds", rep.max_violation <= NOISE)
                .put("worst_point", point_text(&rep.worst_point));
            record(&a.output, r)
        }
        Command::Iterate(a) => {
            let f = load_pair(&a.pair)?;
            let orbit = iterate_orbit(&f, &a.start, a.n, &a.tau, a.k)?;
            let text = match pick(&a.output, true)? {
                Format::Csv => orbit.to_csv(),
                Format::Record => {
                    let rep = convergence_report(&orbit, a.tol);
                    let mut r = Record::default();
                    r.put("steps", orbit.points.len() - 1);
                    if let Some(h) = orbit.halted_at {
                        r.put("halted_at", h);
                    }
                    r.put("final", point_text(orbit.points.last().expect("orbit has its start")))
                        .put("converged", rep.converged)
                        .put("tol", a.tol);
                    if let Some(n) = rep.n_at_tol {
                        r.put("n_at_tol", n);
                    }
                    r.put("monotone_A", rep.monotone_a).put("monotone_R", rep.monotone_r);
                    r.render()
                }
            };
            Ok(Emit { text, out: a.output.out })
        }
        Command::FindDw(a) => {
            let f = load_pair(&a.pair)?;
            let c = continuation_dw(&f, a.kmax)?;
            let text = match pick(&a.output, true)? {
                Format::Csv => c.to_csv(),
                Format::Record => {
                    let mut r = Record::default();
                    match &c.status {
                        ContinuationStatus::Truncated { stage, reason } => {
                            r.put("status", "Truncated").put("failed_stage", stage).put("reason", reason);
                        }
                        other => {
                            r.put("status", format!("{other:?}"));
                        }
                    }
                    r.put("stages", c.stages.len());
                    if let Some(t) = c.tau_estimate {
                        r.put("tau_estimate", t);
                    }
                    if let Some(k) = c.k_estimate {
                        r.put("K_estimate", k);
                    }
                    if let Some(s) = c.slope {
                        r.put("slope", s);
                    }
                    if let Some(p) = c.interior_point {
                        r.put("interior_point", point_text(&p));
                    }
                    r.render()
                }
            };
            Ok(Emit { text, out: a.output.out })
        }
        Command::WolffSet(a) => {
            let f = load_pair(&a.pair)?;
            let seed = resolve_seed(a.sampling.seed)?;
            let n = a.sampling.samples.unwrap_or(SPOT_SAMPLES);
            let rep = wolff_set_structure_seeded(&f, &a.tau, n, seed)?;
            let mut r = Record::default();
            r.put("case", rep.case.label())
                .nest("phi", class_record(&rep.phi_class))
                .nest("psi", class_record(&rep.psi_class))
                .put("witness_tau", rep.witness_tau);
            let facial = rep
                .facial_checks
                .iter()
                .map(|fc| {
                    let mut x = Record::default();
                    x.put("side", fc.side).put("point", fc.point).put("max_violation", fc.max_violation);
                    x
                })
                .collect();
            r.list("facial_checks", facial);
            let mut corner = Record::default();
            corner
                .put("band", format!("[{}, {}]", rep.corner_check.band.0, rep.corner_check.band.1))
                .put("K", rep.corner_check.k)
                .put("max_violation", rep.corner_check.max_violation);
            r.nest("corner", corner);
            record(&a.output, r)
        }
        Command::HerveCase(a) => {
            let f = load_pair(&a.pair)?;
            let h = herve_case(&f, &a.tau)?;
            let mut r = Record::default();
            r.put("case", h.case.label()).put("refined", h.refined).put("expected", &h.expected);
            if let Some(c) = &h.phi_class {
                r.nest("phi", class_record(c));
            }
            if let Some(c) = &h.psi_class {
                r.nest("psi", class_record(c));
            }
            record(&a.output, r)
        }
    }
}

fn side_map(m: &ScalarMap, side: Side) -> ScalarMap {
    match side {
        Side::Left => m.clone(),
        Side::Right => m.swap_args(),
    }
}

fn side_tau(tau: &BoundaryPoint, side: Side) -> BoundaryPoint {
    match side {
        Side::Left => *tau,
        Side::Right => tau.swap(),
    }
}

fn slice_record(s: &SliceDW) -> Record {
    let mut r = Record::default();
    match s {
        SliceDW::InteriorFixed { p, multiplier } => {
            r.put("kind", "interior").put("p", fmt_complex(*p)).put("multiplier", fmt_complex(*multiplier));
        }
        SliceDW::BoundaryDW { tau, alpha } => {
            r.put("kind", "boundary").put("tau", fmt_complex(*tau)).put("alpha", alpha);
        }
    }
    r
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Ambiguous(_) | Error::Unclassifiable(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_ERROR,
    }
}

/// Runs one command; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    let emit = match dispatch(cli.command) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &emit.out {
        Some(path) => std::fs::write(path, emit.text.as_bytes()).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(emit.text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_ERROR
        }
    }
}
