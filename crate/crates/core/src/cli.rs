//! Command-line front end. Every command writes deterministic JSON or CSV;
//! exit code 1 marks bad input and 2 a symbolic verdict contradicted by
//! measurement.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bdl::{self, Boundedness, DiscrepancyProfile, PointSeq};
use crate::cutproject::{self, CapSet, CapSpec};
use crate::error::{Error, Result};
use crate::morphisms::{Morphism, Seed};
use crate::quadfield::{PisotUnit, QuadElem, UnitFamily};
use crate::spectra::{self, Sign, SpectrumSpec, ZBeta};
use crate::spectral;
use crate::words;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DISAGREEMENT: i32 = 2;

/// Allowed disagreement between direct and cut-and-project generation.
pub const ORACLE_BOUNDARY_SLACK: usize = 2;

#[derive(Debug, Parser)]
#[command(name = "aperiodic", version, about = "Aperiodic Delone sets and bounded distance to lattices")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Decimal digits in rendered exact values.
    #[arg(long, global = true, default_value_t = 30)]
    pub precision: usize,

    /// Maximal number of generated points (overridden by APERIODIC_BUDGET).
    #[arg(long, global = true, default_value_t = 5_000_000)]
    pub max_points: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Incidence matrix, spectrum, balance verdict and BDL lengths of a morphism.
    AnalyzeMorphism(MorphismArgs),
    /// Spectra of quadratic Pisot units.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Cut-and-project sets.
    #[command(subcommand)]
    Cap(CapCommand),
    /// Discrepancy profile of a point file against a lattice.
    Discrepancy(DiscrepancyArgs),
    /// The bijection x_n -> xi n for a point file.
    Witness(WitnessArgs),
    /// Planar grid from two one-dimensional sets.
    Grid(GridArgs),
}

#[derive(Debug, Args)]
pub struct MorphismArgs {
    /// Rules such as "A->AAB;B->AB".
    pub rules: String,
    /// Seed "B|A", or "A" for a right-infinite fixed point.
    #[arg(long)]
    pub seed: Option<String>,
    /// Try phi, phi^2, phi^3 until a fixed point exists.
    #[arg(long)]
    pub auto_power: bool,
    /// Half-length of the generated fixed-point window.
    #[arg(long, default_value_t = 100_000)]
    pub radius: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumFlags {
    /// Minimal polynomial x^2 - px - 1 (minus) or x^2 - px + 1 (plus).
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, allow_hyphen_values = true)]
    pub p: i64,
    /// Sign of alpha = +-beta.
    #[arg(long, value_enum)]
    pub sign: SignArg,
    /// Digit range m..M.
    #[arg(long, allow_hyphen_values = true)]
    pub digits: String,
}

#[derive(Debug, Subcommand)]
pub enum SpectrumCommand {
    /// Points of the spectrum in a range.
    Gen(SpectrumGenArgs),
    /// Divisibility verdict, average lattice and empirical check.
    Decide(SpectrumDecideArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumGenArgs {
    #[command(flatten)]
    pub spec: SpectrumFlags,
    /// Range lo,hi (field elements allowed).
    #[arg(long, allow_hyphen_values = true, default_value = "-10,10")]
    pub range: String,
    /// Also enumerate digit polynomials and compare.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = spectra::DEFAULT_MAX_DEGREE)]
    pub max_degree: u32,
    /// Permit degrees above the default guard.
    #[arg(long = "unsafe")]
    pub allow_unsafe: bool,
    /// Points CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gap coding (gaps and word) output.
    #[arg(long)]
    pub gaps: Option<PathBuf>,
    /// Discrepancy profile CSV of the generated points.
    #[arg(long)]
    pub discrepancy: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumDecideArgs {
    #[command(flatten)]
    pub spec: SpectrumFlags,
    /// Points per side for the empirical check; 0 skips it.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CapFlags {
    #[arg(long, allow_hyphen_values = true)]
    pub eps: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: String,
    /// Window c,d of the half-open interval [c, d).
    #[arg(long, allow_hyphen_values = true)]
    pub window: String,
}

#[derive(Debug, Subcommand)]
pub enum CapCommand {
    Gen(CapGenArgs),
    Decide(CapDecideArgs),
    Transform(CapTransformArgs),
}

#[derive(Debug, Args)]
pub struct CapGenArgs {
    #[command(flatten)]
    pub cap: CapFlags,
    #[arg(long, allow_hyphen_values = true, default_value = "-10,10")]
    pub range: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapDecideArgs {
    #[command(flatten)]
    pub cap: CapFlags,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct CapTransformArgs {
    #[command(flatten)]
    pub cap: CapFlags,
    /// Integer matrix A,B,C,D with determinant +-1.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: String,
}

#[derive(Debug, Args)]
pub struct DiscrepancyArgs {
    /// One point per line, or a CSV with a value_decimal column.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    /// Comma-separated horizons; doubling horizons up to the data when absent.
    #[arg(long)]
    pub horizons: Option<String>,
    /// Measure [0, N) only.
    #[arg(long)]
    pub one_sided: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// First set; a Fibonacci chain when absent.
    #[arg(long)]
    pub lambda1: Option<PathBuf>,
    /// Second set; a Fibonacci chain when absent.
    #[arg(long)]
    pub lambda2: Option<PathBuf>,
    /// Angle between the generating vectors in degrees.
    #[arg(long, default_value_t = 72.0)]
    pub angle: f64,
    #[arg(long, default_value_t = 20.0)]
    pub bound: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub precision: usize,
    pub max_points: usize,
    pub max_degree: u32,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self> {
        let max_points = match std::env::var("APERIODIC_BUDGET") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("APERIODIC_BUDGET = '{v}' is not a count")))?,
            Err(_) => g.max_points,
        };
        let cfg = Self {
            precision: g.precision,
            max_points,
            max_degree: spectra::DEFAULT_MAX_DEGREE,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision < 10 {
            return Err(Error::Parse(format!("precision {} below 10", self.precision)));
        }
        if self.max_points == 0 || self.max_degree == 0 {
            return Err(Error::Parse("budgets must be positive".into()));
        }
        Ok(())
    }

    fn check_points(&self, n: usize) -> Result<()> {
        if n > self.max_points {
            return Err(Error::BudgetExceeded(format!("{n} points over the budget {}", self.max_points)));
        }
        Ok(())
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::from_args(&cli.global)?;
    match cli.command {
        Command::AnalyzeMorphism(a) => cmd_analyze_morphism(&cfg, &a, out),
        Command::Spectrum(SpectrumCommand::Gen(a)) => cmd_spectrum_gen(&cfg, &a, out),
        Command::Spectrum(SpectrumCommand::Decide(a)) => cmd_spectrum_decide(&cfg, &a, out),
        Command::Cap(CapCommand::Gen(a)) => cmd_cap_gen(&cfg, &a, out),
        Command::Cap(CapCommand::Decide(a)) => cmd_cap_decide(&cfg, &a, out),
        Command::Cap(CapCommand::Transform(a)) => cmd_cap_transform(&cfg, &a, out),
        Command::Discrepancy(a) => cmd_discrepancy(&cfg, &a, out),
        Command::Witness(a) => cmd_witness(&cfg, &a, out),
        Command::Grid(a) => cmd_grid(&cfg, &a, out),
    }
}

fn exact(q: &QuadElem, cfg: &RunConfig) -> Value {
    json!({ "exact": q.to_string(), "decimal": q.to_decimal(cfg.precision) })
}

fn fixed(x: f64) -> Value {
    Value::String(format!("{x:.15}"))
}

fn fixed_vec(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| fixed(x)).collect())
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn split_pair(text: &str) -> Result<(&str, &str)> {
    text.split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| Error::Parse(format!("expected 'x,y', got '{text}'")))
}

/// Parses several field elements, taking the field from whichever has a radical.
fn parse_elems(texts: &[&str], field: Option<crate::quadfield::QuadField>) -> Result<Vec<QuadElem>> {
    let mut field = field;
    if field.is_none() {
        field = texts.iter().find_map(|t| QuadElem::parse(t, None).ok()).map(|e| e.field());
    }
    let field = field.ok_or_else(|| Error::Parse("no square root found to fix the field".into()))?;
    texts.iter().map(|t| QuadElem::parse(t, Some(field))).collect()
}

fn parse_real(text: &str) -> Result<f64> {
    if let Ok(x) = text.trim().parse::<f64>() {
        return Ok(x);
    }
    Ok(QuadElem::parse(text, None)?.to_f64())
}

/// Doubling horizons `2^k xi`, `k >= 4`, inside the reach of the data.
fn auto_horizons(xi: f64, reach: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut h = 16.0 * xi;
    while h <= reach {
        out.push(h);
        h *= 2.0;
    }
    out
}

fn reach<P: PointSeq + ?Sized>(pts: &P, two_sided: bool) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    let right = pts.approx(pts.len() - 1);
    if two_sided {
        right.min(-pts.approx(0))
    } else {
        right
    }
}

struct Empirical {
    profile: DiscrepancyProfile,
    class: Boundedness,
}

impl Empirical {
    fn measure<P: PointSeq + ?Sized>(pts: &P, xi: f64, two_sided: bool) -> Result<Self> {
        let hs = auto_horizons(xi, reach(pts, two_sided) * (1.0 - 1e-9));
        let profile = if two_sided {
            DiscrepancyProfile::compute(pts, xi, &hs)?
        } else {
            DiscrepancyProfile::compute_right(pts, xi, &hs)?
        };
        let class = bdl::classify_boundedness(&profile);
        Ok(Self { profile, class })
    }

    fn to_json(&self) -> Value {
        json!({
            "xi": fixed(self.profile.xi),
            "horizons": fixed_vec(&self.profile.horizons),
            "right_dev": fixed_vec(&self.profile.right_dev),
            "left_dev": self.profile.left_dev.as_deref().map(fixed_vec),
            "one_sided": self.profile.left_dev.is_none(),
            "max_deviation": fixed(self.profile.max_deviation()),
            "classification": format!("{:?}", self.class),
        })
    }
}

pub fn cmd_analyze_morphism(cfg: &RunConfig, a: &MorphismArgs, out: &mut dyn Write) -> Result<i32> {
    let phi = Morphism::parse(&a.rules)?;
    let seed = a.seed.as_deref().map(Seed::parse).transpose()?;
    cfg.check_points(2 * a.radius + 1)?;
    let fp = if a.auto_power {
        phi.fixed_point_auto(seed, a.radius)?
    } else {
        let fp = phi.fixed_point_auto(seed, a.radius)?;
        if fp.power != 1 {
            return Err(Error::NotSubstitution(
                "phi has no admissible seed; pass --auto-power".into(),
            ));
        }
        fp
    };
    let m = fp.morphism.incidence_matrix();
    let cp = spectral::char_poly(&m);
    let (verdict, moduli) = spectral::adamczewski_verdict(&m)?;
    let perron = spectral::perron_data(&m)?;
    let perron_exact = perron.exact.as_ref().map(|e| {
        json!({
            "value": exact(&e.value, cfg),
            "frequencies": e.right.iter().map(|x| exact(x, cfg)).collect::<Vec<_>>(),
            "lengths": e.left.iter().map(|x| exact(x, cfg)).collect::<Vec<_>>(),
        })
    });

    let mut code = EXIT_OK;
    let construction = match spectral::construct_bdl_lengths(&m, None) {
        Ok(c) => {
            let two_sided = fp.window.origin() > 0;
            let pts = words::geometric_points_f64(&fp.window, &c.lengths)?;
            let emp = Empirical::measure(&pts, c.lattice_step, two_sided)?;
            if emp.class == Boundedness::LooksUnbounded {
                code = EXIT_DISAGREEMENT;
            }
            json!({
                "f": fixed_vec(&c.f),
                "eta": fixed(c.eta),
                "lengths": fixed_vec(&c.lengths),
                "lattice_step": fixed(c.lattice_step),
                "stable_dim": c.stable_dim,
                "stable_eigenvalue": c.stable_eigenvalue.map(fixed),
                "residual": format!("{:e}", c.residual),
                "exact": c.exact.as_ref().map(|e| json!({
                    "f": e.f.iter().map(|x| exact(x, cfg)).collect::<Vec<_>>(),
                    "eta": exact(&e.eta, cfg),
                    "lengths": e.lengths.iter().map(|x| exact(x, cfg)).collect::<Vec<_>>(),
                })),
                "empirical": emp.to_json(),
            })
        }
        Err(e @ (Error::NoStableEigenvalue | Error::Residual { .. } | Error::Degenerate(_))) => {
            json!({ "refused": e.to_string() })
        }
        Err(e) => return Err(e),
    };

    let report = json!({
        "morphism": phi.to_string(),
        "power": fp.power,
        "analyzed": fp.morphism.to_string(),
        "seed": fp.seed.to_string(),
        "incidence_matrix": m.rows(),
        "char_poly": cp.to_string(),
        "moduli": moduli,
        "verdict": format!("{verdict:?}"),
        "perron": {
            "value": fixed(perron.value),
            "frequencies": fixed_vec(&perron.right),
            "lengths": fixed_vec(&perron.left),
            "exact": perron_exact,
        },
        "bdl_construction": construction,
    });
    emit(out, &report)?;
    Ok(code)
}

fn parse_digits(text: &str) -> Result<(i64, i64)> {
    let (m, big_m) = text
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("digits '{text}' should read m..M")))?;
    let p = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad digit bound '{s}'")))
    };
    Ok((p(m)?, p(big_m)?))
}

fn unit_of(f: &SpectrumFlags) -> Result<PisotUnit> {
    let family = match f.family {
        FamilyArg::Minus => UnitFamily::MinusOne,
        FamilyArg::Plus => UnitFamily::PlusOne,
    };
    PisotUnit::new(family, f.p)
}

fn spec_of(f: &SpectrumFlags) -> Result<SpectrumSpec> {
    let sign = match f.sign {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
    };
    let (m, big_m) = parse_digits(&f.digits)?;
    SpectrumSpec::new(unit_of(f)?, sign, m, big_m)
}

fn estimated_count(spec: &CapSpec, lo: &QuadElem, hi: &QuadElem) -> usize {
    let step = spec.density_step().to_f64();
    ((hi.to_f64() - lo.to_f64()) / step).abs() as usize + 2
}

fn write_cap_csv(set: &CapSet, cfg: &RunConfig, w: &mut dyn Write) -> Result<()> {
    writeln!(w, "a,b,value_decimal,star_decimal")?;
    let spec = set.spec();
    for p in set.points() {
        writeln!(
            w,
            "{},{},{},{}",
            p.a,
            p.b,
            spec.value_exact(p.a, p.b).to_decimal(cfg.precision),
            spec.star_exact(p.a, p.b).to_decimal(cfg.precision)
        )?;
    }
    Ok(())
}

fn with_output(path: Option<&Path>, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

pub fn cmd_spectrum_gen(cfg: &RunConfig, a: &SpectrumGenArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = spec_of(&a.spec)?;
    let field = spec.unit().field();
    let (lo_s, hi_s) = split_pair(&a.range)?;
    let r = parse_elems(&[lo_s, hi_s], Some(field))?;
    let (lo, hi) = (&r[0], &r[1]);
    let cap = spectra::identify_cap(&spec)?;
    cfg.check_points(estimated_count(&cap, lo, hi))?;
    let set = spectra::generate_cap(&spec, lo, hi)?;
    with_output(a.out.as_deref(), out, |w| write_cap_csv(&set, cfg, w))?;

    let mut code = EXIT_OK;
    if a.oracle {
        if a.max_degree > cfg.max_degree && !a.allow_unsafe {
            return Err(Error::BudgetExceeded(format!(
                "max degree {} above {}; pass --unsafe",
                a.max_degree, cfg.max_degree
            )));
        }
        let radius = lo.abs().max(hi.abs()).ceil();
        let radius: i64 = radius
            .try_into()
            .map_err(|_| Error::BudgetExceeded("range too large for the direct enumeration".into()))?;
        let direct: BTreeSet<ZBeta> = spectra::generate_direct_within(&spec, a.max_degree, radius)?
            .into_iter()
            .filter(|&x| {
                let v = spec.in_ring(x);
                &v >= lo && &v <= hi
            })
            .collect();
        let projected: BTreeSet<ZBeta> = spectra::to_ring(&set).into_iter().collect();
        let only_direct = direct.difference(&projected).count();
        let only_cap = projected.difference(&direct).count();
        if only_direct + only_cap > ORACLE_BOUNDARY_SLACK {
            code = EXIT_DISAGREEMENT;
        }
        let report = json!({
            "oracle": {
                "direct": direct.len(),
                "cut_and_project": projected.len(),
                "only_direct": only_direct,
                "only_cut_and_project": only_cap,
                "agree": code == EXIT_OK,
            }
        });
        match &a.out {
            Some(_) => emit(out, &report)?,
            None => {
                let mut err = std::io::stderr();
                emit(&mut err, &report)?;
            }
        }
    }
    if let Some(path) = &a.gaps {
        let g = cutproject::gap_code(&set)?;
        let mut w = create(path)?;
        for (i, gap) in g.gaps.iter().enumerate() {
            writeln!(w, "{}: {} = {}", g.word.alphabet().letter(i as u8), gap, gap.to_decimal(cfg.precision))?;
        }
        writeln!(w, "{}", g.word)?;
        w.flush()?;
    }
    if let Some(path) = &a.discrepancy {
        let step = cap.density_step().to_f64();
        let emp = Empirical::measure(&set, step, true)?;
        let mut w = create(path)?;
        emp.profile.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(code)
}

pub fn cmd_spectrum_decide(cfg: &RunConfig, a: &SpectrumDecideArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = match spec_of(&a.spec) {
        Ok(s) => s,
        Err(Error::InvalidSpectrum(msg)) => {
            let (m, big_m) = parse_digits(&a.spec.digits)?;
            let d = spectra::bdl_criterion(&unit_of(&a.spec)?, big_m - m + 1);
            emit(
                out,
                &json!({
                    "valid": false,
                    "validation_error": msg,
                    "bdl": d.bdl,
                    "reason": d.reason,
                    "xi": Value::Null,
                }),
            )?;
            return Ok(EXIT_OK);
        }
        Err(e) => return Err(e),
    };
    let d = spectra::bdl_decide(&spec);
    let k = spectra::kesten_for(&spec)?;
    let cap = spectra::identify_cap(&spec)?;
    let xi = d.bdl.then(|| spectra::average_lattice_xi(&spec)).transpose()?;
    let mut code = if k.is_bdl() == d.bdl { EXIT_OK } else { EXIT_DISAGREEMENT };
    let empirical = if a.samples > 0 {
        cfg.check_points(2 * a.samples)?;
        let set = spectra::generate_cap_count(&spec, a.samples)?;
        let step = xi.as_ref().unwrap_or(&cap.density_step()).to_f64();
        let emp = Empirical::measure(&set, step, true)?;
        if d.bdl && emp.class == Boundedness::LooksUnbounded {
            code = EXIT_DISAGREEMENT;
        }
        emp.to_json()
    } else {
        Value::Null
    };
    let (c, dd) = cap.window();
    let report = json!({
        "valid": true,
        "spec": spec.to_string(),
        "bdl": d.bdl,
        "reason": d.reason,
        "xi": xi.as_ref().map(|x| exact(x, cfg)),
        "cut_and_project": {
            "eps": exact(cap.epsilon(), cfg),
            "eta": exact(cap.eta(), cfg),
            "window": [exact(c, cfg), exact(dd, cfg)],
            "kesten_bdl": k.is_bdl(),
        },
        "empirical": empirical,
    });
    emit(out, &report)?;
    Ok(code)
}

fn cap_of(f: &CapFlags) -> Result<CapSpec> {
    let (c, d) = split_pair(&f.window)?;
    let v = parse_elems(&[&f.eps, &f.eta, c, d], None)?;
    let mut v = v.into_iter();
    let (eps, eta, c, d) = (v.next().unwrap(), v.next().unwrap(), v.next().unwrap(), v.next().unwrap());
    CapSpec::new(eps, eta, c, d)
}

fn cap_json(spec: &CapSpec, cfg: &RunConfig) -> Value {
    let (c, d) = spec.window();
    json!({
        "eps": exact(spec.epsilon(), cfg),
        "eta": exact(spec.eta(), cfg),
        "window": [exact(c, cfg), exact(d, cfg)],
    })
}

pub fn cmd_cap_gen(cfg: &RunConfig, a: &CapGenArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = cap_of(&a.cap)?;
    let (lo_s, hi_s) = split_pair(&a.range)?;
    let r = parse_elems(&[lo_s, hi_s], Some(spec.field()))?;
    cfg.check_points(estimated_count(&spec, &r[0], &r[1]))?;
    let set = cutproject::generate(&spec, &r[0], &r[1])?;
    with_output(a.out.as_deref(), out, |w| write_cap_csv(&set, cfg, w))?;
    Ok(EXIT_OK)
}

pub fn cmd_cap_decide(cfg: &RunConfig, a: &CapDecideArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = cap_of(&a.cap)?;
    let k = cutproject::kesten_decide(&spec);
    let mut code = EXIT_OK;
    let empirical = if a.samples > 0 {
        cfg.check_points(2 * a.samples)?;
        let set = cutproject::generate_count(&spec, a.samples)?;
        let emp = Empirical::measure(&set, spec.density_step().to_f64(), true)?;
        if k.is_bdl() && emp.class == Boundedness::LooksUnbounded {
            code = EXIT_DISAGREEMENT;
        }
        emp.to_json()
    } else {
        Value::Null
    };
    let report = json!({
        "spec": cap_json(&spec, cfg),
        "bdl": k.is_bdl(),
        "window_length_coordinates": { "p": k.p.to_string(), "q": k.q.to_string() },
        "lattice_step": k.lattice_step().map(|x| exact(x, cfg)),
        "empirical": empirical,
    });
    emit(out, &report)?;
    Ok(code)
}

pub fn cmd_cap_transform(cfg: &RunConfig, a: &CapTransformArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = cap_of(&a.cap)?;
    let entries: Vec<i64> = a
        .matrix
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad matrix entry '{s}'"))))
        .collect::<Result<_>>()?;
    let m: [i64; 4] = entries
        .try_into()
        .map_err(|_| Error::Parse("matrix needs four entries A,B,C,D".into()))?;
    let (new, scale) = cutproject::unimodular_transform(&spec, m)?;
    emit(
        out,
        &json!({
            "input": cap_json(&spec, cfg),
            "matrix": m,
            "output": cap_json(&new, cfg),
            "scale": exact(&scale, cfg),
        }),
    )?;
    Ok(EXIT_OK)
}

/// Points read from a file, sorted.
pub enum LoadedPoints {
    Float(Vec<f64>),
    Exact(Vec<QuadElem>),
}

/// Reads one value per line, or the `value_decimal` column of a CSV with a
/// header. Values that are not decimals are parsed as field elements.
pub fn load_points(path: &Path) -> Result<LoadedPoints> {
    let reader = BufReader::new(File::open(path)?);
    let mut column = 0usize;
    let mut raw = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if i == 0 && line.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') && !line.contains("sqrt") {
            column = line.split(',').position(|h| h.trim() == "value_decimal").unwrap_or(0);
            continue;
        }
        let field = line
            .split(',')
            .nth(column)
            .ok_or_else(|| Error::Parse(format!("line {} has no column {column}", i + 1)))?;
        raw.push(field.trim().to_string());
    }
    if let Ok(mut v) = raw.iter().map(|s| s.parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>() {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite point".into()));
        }
        v.sort_by(f64::total_cmp);
        return Ok(LoadedPoints::Float(v));
    }
    let refs: Vec<&str> = raw.iter().map(String::as_str).collect();
    let mut v = parse_elems(&refs, None)?;
    v.sort();
    Ok(LoadedPoints::Exact(v))
}

fn parse_horizons(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_real).collect()
}

pub fn cmd_discrepancy(cfg: &RunConfig, a: &DiscrepancyArgs, out: &mut dyn Write) -> Result<i32> {
    let xi = parse_real(&a.xi)?;
    let pts = load_points(&a.input)?;
    let two_sided = !a.one_sided;
    let measure = |p: &dyn Fn(&[f64]) -> Result<DiscrepancyProfile>, reach: f64| -> Result<DiscrepancyProfile> {
        let hs = match &a.horizons {
            Some(t) => parse_horizons(t)?,
            None => auto_horizons(xi, reach * (1.0 - 1e-9)),
        };
        p(&hs)
    };
    let profile = match &pts {
        LoadedPoints::Float(v) => {
            cfg.check_points(v.len())?;
            measure(
                &|hs| {
                    if two_sided {
                        DiscrepancyProfile::compute(v, xi, hs)
                    } else {
                        DiscrepancyProfile::compute_right(v, xi, hs)
                    }
                },
                reach(v, two_sided),
            )?
        }
        LoadedPoints::Exact(v) => {
            cfg.check_points(v.len())?;
            measure(
                &|hs| {
                    if two_sided {
                        DiscrepancyProfile::compute(v, xi, hs)
                    } else {
                        DiscrepancyProfile::compute_right(v, xi, hs)
                    }
                },
                reach(v, two_sided),
            )?
        }
    };
    let class = bdl::classify_boundedness(&profile);
    if let Some(path) = &a.out {
        let mut w = create(path)?;
        profile.write_csv(&mut w)?;
        w.flush()?;
    }
    let emp = Empirical { profile, class };
    emit(out, &emp.to_json())?;
    Ok(EXIT_OK)
}

pub fn cmd_witness(cfg: &RunConfig, a: &WitnessArgs, out: &mut dyn Write) -> Result<i32> {
    let xi = parse_real(&a.xi)?;
    let w = match load_points(&a.input)? {
        LoadedPoints::Float(v) => {
            cfg.check_points(v.len())?;
            bdl::bijection_witness(&v, xi, a.count)?
        }
        LoadedPoints::Exact(v) => {
            cfg.check_points(v.len())?;
            bdl::bijection_witness(&v, xi, a.count)?
        }
    };
    if let Some(path) = &a.out {
        let mut f = create(path)?;
        w.write_csv(&mut f)?;
        f.flush()?;
    }
    emit(
        out,
        &json!({
            "xi": fixed(xi),
            "pairs": w.pairs.len(),
            "max_displacement": fixed(w.max_displacement),
        }),
    )?;
    Ok(EXIT_OK)
}

fn load_floats(path: &Path) -> Result<Vec<f64>> {
    Ok(match load_points(path)? {
        LoadedPoints::Float(v) => v,
        LoadedPoints::Exact(v) => v.iter().map(QuadElem::to_f64).collect(),
    })
}

pub fn cmd_grid(cfg: &RunConfig, a: &GridArgs, out: &mut dyn Write) -> Result<i32> {
    let u = [1.0, 0.0];
    let theta = a.angle.to_radians();
    let v = [theta.cos(), theta.sin()];
    // a chain reaching past the box along either direction
    let det = (u[0] * v[1] - u[1] * v[0]).abs().max(1e-12);
    let radius = (2.0 * a.bound / det).ceil() as usize + 2;
    let chain = |p: &Option<PathBuf>| -> Result<Vec<f64>> {
        match p {
            Some(p) => load_floats(p),
            None => {
                cfg.check_points(2 * radius + 1)?;
                Ok(bdl::fibonacci_chain(radius))
            }
        }
    };
    let l1 = chain(&a.lambda1)?;
    let l2 = chain(&a.lambda2)?;
    cfg.check_points(l1.len().saturating_mul(l2.len()))?;
    let pts = bdl::grid_points(&l1, &l2, u, v, a.bound)?;
    with_output(a.out.as_deref(), out, |w| bdl::write_grid_csv(&pts, w))?;
    Ok(EXIT_OK)
}
