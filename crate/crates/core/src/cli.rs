//! Batch front end. Exit codes: 0 success, 1 obstruction or failed
//! verification, 2 input error.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::derivations::{
    cesaro_sum, check_compact_preservation, classify_invariant, fourier_component, generator_on, leibniz_defect,
    CompactReport, Derivation, DerivationSpec,
};
use crate::error::Error;
use crate::group::{Character, GroupPoint, GroupSpec};
use crate::lifting::{
    build_lift, default_characters, torus_experiment, torus_obstruction_demo, verify_lift, ExperimentRow,
    PartialEntry,
};
use crate::report::{sci, ser_c64, ser_f64, to_csv, to_json};
use crate::sample::{self, DEFAULT_SEED};
use crate::truncops::{relation_suite, Generator, SpaceKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OBSTRUCTION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "monothetic", version, about = "Truncated crossed-product and Toeplitz algebras over monothetic groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Scale data, orbit table and a few characters.
    GroupInfo {
        #[command(flatten)]
        common: Common,
        /// Last orbit index shown.
        #[arg(long, default_value_t = 7)]
        k: i64,
    },
    /// Fourier component norms and the Cesàro convergence table.
    Fourier {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SpaceArg::Auto)]
        space: SpaceArg,
    },
    /// Decomposition of an invariant derivation.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SpaceArg::Auto)]
        space: SpaceArg,
    },
    /// Lift a crossed-product derivation and report its defects.
    Lift {
        #[command(flatten)]
        common: Common,
        /// On a torus: measure defects of proposed ramps instead of lifting.
        #[arg(long)]
        experiment: bool,
    },
    /// Relation suite, plus Leibniz and compactness checks for a derivation.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Classify `δ_{d/dx}` on a torus and sample inner invariant derivations.
    ObstructionDemo {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        coeff: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub group: Option<PathBuf>,
    #[arg(long)]
    pub derivation: Option<PathBuf>,
    #[arg(long = "L", default_value_t = 128)]
    pub l: usize,
    #[arg(long, default_value_t = 0.25)]
    pub target: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Auto,
    Plus,
    Full,
}

/// Validated run parameters.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub group: Option<PathBuf>,
    pub derivation: Option<PathBuf>,
    pub l: usize,
    pub target: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: &'static str, c: &Common) -> Result<RunConfig, Failure> {
        if c.l < 8 {
            return Err(Failure::input(format!("--L must be at least 8, got {}", c.l)));
        }
        if !(c.target > 0.0 && c.target.is_finite()) {
            return Err(Failure::input(format!("--target must be positive, got {}", c.target)));
        }
        Ok(RunConfig {
            command,
            group: c.group.clone(),
            derivation: c.derivation.clone(),
            l: c.l,
            target: c.target,
            out: c.out.clone(),
            format: c.format,
            seed: c.seed,
        })
    }

    fn group(&self) -> Result<GroupSpec, Failure> {
        let path = self.group.as_ref().ok_or_else(|| Failure::input("--group is required"))?;
        let spec = GroupSpec::from_json(&read(path)?).map_err(Failure::from)?;
        Ok(spec)
    }

    fn derivation(&self, g: &GroupSpec) -> Result<DerivationSpec, Failure> {
        let path = self.derivation.as_ref().ok_or_else(|| Failure::input("--derivation is required"))?;
        let d = DerivationSpec::from_json(&read(path)?)?;
        d.validate(g)?;
        Ok(d)
    }
}

/// A run that did not end in success: exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if matches!(e, Error::Obstructed) { EXIT_OBSTRUCTION } else { EXIT_INPUT };
        let message = match &e {
            Error::TruncationTooSmall { needed, .. } => format!("{e}; rerun with --L {needed} or larger"),
            Error::UnsupportedGroup => format!("{e}; on a torus use --experiment"),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Rendered report and the exit code it comes with.
#[derive(Debug)]
pub struct Output {
    pub code: i32,
    pub text: String,
}

/// Runs a parsed command line; the report goes to `--out` or is returned.
pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let (cfg, out) = match &cli.command {
        Command::GroupInfo { common, k } => {
            let cfg = RunConfig::new("group-info", common)?;
            let out = cmd_group_info(&cfg, *k)?;
            (cfg, out)
        }
        Command::Fourier { common, space } => {
            let cfg = RunConfig::new("fourier", common)?;
            let out = cmd_fourier(&cfg, *space)?;
            (cfg, out)
        }
        Command::Classify { common, space } => {
            let cfg = RunConfig::new("classify", common)?;
            let out = cmd_classify(&cfg, *space)?;
            (cfg, out)
        }
        Command::Lift { common, experiment } => {
            let cfg = RunConfig::new("lift", common)?;
            let out = cmd_lift(&cfg, *experiment)?;
            (cfg, out)
        }
        Command::Verify { common } => {
            let cfg = RunConfig::new("verify", common)?;
            let out = cmd_verify(&cfg)?;
            (cfg, out)
        }
        Command::ObstructionDemo { common, coeff } => {
            let cfg = RunConfig::new("obstruction-demo", common)?;
            let out = cmd_obstruction_demo(&cfg, *coeff)?;
            (cfg, out)
        }
    };
    if let Some(path) = &cfg.out {
        fs::write(path, &out.text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        return Ok(Output { code: out.code, text: String::new() });
    }
    Ok(out)
}

fn render<T: Serialize>(cfg: &RunConfig, value: &T, csv: impl FnOnce() -> (Vec<&'static str>, Vec<Vec<String>>)) -> Result<String, Failure> {
    match cfg.format {
        Format::Json => Ok(to_json(value)?),
        Format::Csv => {
            let (header, rows) = csv();
            Ok(to_csv(&header, &rows)?)
        }
    }
}

#[derive(Serialize)]
struct OrbitRow {
    k: i64,
    point: Vec<String>,
}

#[derive(Serialize)]
struct CharRow {
    char: Character,
    #[serde(serialize_with = "crate::report::ser_c64_vec")]
    values: Vec<Complex64>,
}

#[derive(Serialize)]
struct GroupInfo {
    kind: &'static str,
    supernatural: Option<String>,
    scale: Vec<u64>,
    dimension: usize,
    warnings: Vec<String>,
    orbit: Vec<OrbitRow>,
    characters: Vec<CharRow>,
}

fn point_cells(p: &GroupPoint) -> Vec<String> {
    match p {
        GroupPoint::Odometer(o) => o.residues.iter().map(|r| r.to_string()).collect(),
        GroupPoint::Torus(t) => t.coords.iter().map(|c| format!("{:.15}", c.value())).collect(),
    }
}

pub fn cmd_group_info(cfg: &RunConfig, k: i64) -> Result<Output, Failure> {
    let g = cfg.group()?;
    if k < 0 {
        return Err(Failure::input("--k must be nonnegative"));
    }
    let orbit: Vec<OrbitRow> = (0..=k).map(|j| OrbitRow { k: j, point: point_cells(&g.orbit_point(j)) }).collect();
    let chars: Vec<Character> = match &g {
        GroupSpec::Odometer { scale, .. } => {
            scale.terms().iter().take(3).map(|&m| Character::odometer(m, 1).expect("scale term")).collect()
        }
        GroupSpec::Torus { theta } => (0..theta.len())
            .map(|j| {
                let mut e = vec![0; theta.len()];
                e[j] = 1;
                Character::torus(e)
            })
            .collect(),
    };
    let mut characters = Vec::new();
    for chi in chars {
        let values = (0..=k).map(|j| g.character_at_orbit(&chi, j)).collect::<Result<Vec<_>, _>>()?;
        characters.push(CharRow { char: chi, values });
    }
    let info = GroupInfo {
        kind: if g.is_odometer() { "odometer" } else { "torus" },
        supernatural: match &g {
            GroupSpec::Odometer { modulus, .. } => Some(modulus.to_string()),
            GroupSpec::Torus { .. } => None,
        },
        scale: g.scale().map(|s| s.terms().to_vec()).unwrap_or_default(),
        dimension: g.dimension(),
        warnings: g.warnings(),
        orbit,
        characters,
    };
    let text = render(cfg, &info, || {
        let rows = info.orbit.iter().map(|r| std::iter::once(r.k.to_string()).chain(r.point.iter().cloned()).collect()).collect();
        (vec!["k", "point"], rows)
    })?;
    Ok(Output { code: EXIT_OK, text })
}

fn resolve_space(space: SpaceArg, d: &DerivationSpec) -> SpaceKind {
    match space {
        SpaceArg::Plus => SpaceKind::Plus,
        SpaceArg::Full => SpaceKind::Full,
        SpaceArg::Auto => {
            let finite = d.inner.values().any(|t| !t.beta0.is_empty());
            if !d.partial.is_empty() && !finite {
                SpaceKind::Full
            } else {
                SpaceKind::Plus
            }
        }
    }
}

/// Characters occurring in a spec, plus the coordinate characters of a torus.
pub fn derivation_characters(g: &GroupSpec, d: &DerivationSpec) -> Vec<Character> {
    let mut set = BTreeSet::new();
    for t in d.inner.values() {
        for (chi, _) in t.f.terms() {
            if !chi.is_trivial() {
                set.insert(chi.clone());
            }
        }
    }
    set.extend(d.partial.keys().cloned());
    if let GroupSpec::Torus { theta } = g {
        for j in 0..theta.len() {
            let mut e = vec![0; theta.len()];
            e[j] = 1;
            set.insert(Character::torus(e));
        }
    }
    set.into_iter().collect()
}

fn test_generators(g: &GroupSpec, d: &DerivationSpec, kind: SpaceKind) -> Vec<Generator> {
    let mut gens = match kind {
        SpaceKind::Plus => vec![Generator::U, Generator::Ustar],
        SpaceKind::Full => vec![Generator::V, Generator::Vinv],
    };
    gens.extend(derivation_characters(g, d).into_iter().map(Generator::MChar));
    gens
}

#[derive(Serialize)]
struct ComponentRow {
    n: i64,
    #[serde(serialize_with = "ser_f64")]
    norm: f64,
}

#[derive(Serialize)]
struct CesaroRow {
    #[serde(rename = "M")]
    m: usize,
    #[serde(serialize_with = "ser_f64")]
    error: f64,
}

#[derive(Serialize)]
struct FourierReport {
    space: SpaceKind,
    #[serde(rename = "L")]
    l: usize,
    components: Vec<ComponentRow>,
    cesaro: Vec<CesaroRow>,
}

pub const CESARO_SWEEP: [usize; 5] = [4, 8, 16, 32, 64];

pub fn cmd_fourier(cfg: &RunConfig, space: SpaceArg) -> Result<Output, Failure> {
    let g = cfg.group()?;
    let d = cfg.derivation(&g)?;
    let kind = resolve_space(space, &d);
    let gens = test_generators(&g, &d, kind);
    let reach = d.inner.keys().map(|n| n.abs()).max().unwrap_or(0) + 1;
    let mut components = Vec::new();
    for n in -reach..=reach {
        let table = fourier_component(&d, &g, n, &gens, kind)?;
        let mut sq = 0.0;
        for (_, img) in table.images() {
            sq += img.realize(&g, cfg.l)?.hs_norm_sq();
        }
        if sq.sqrt() > 1e-14 {
            components.push(ComponentRow { n, norm: sq.sqrt() });
        }
    }
    let mut cesaro = Vec::new();
    for m in CESARO_SWEEP {
        let mut sq = 0.0;
        for gen in &gens {
            let a = generator_on(&g, gen, kind);
            let diff = cesaro_sum(&d, &g, &a, m)?.sub(&d.apply(&g, &a)?)?;
            sq += diff.realize(&g, cfg.l)?.hs_norm_sq();
        }
        cesaro.push(CesaroRow { m, error: sq.sqrt() });
    }
    let report = FourierReport { space: kind, l: cfg.l, components, cesaro };
    let text = render(cfg, &report, || {
        let mut rows: Vec<Vec<String>> =
            report.components.iter().map(|r| vec!["component".into(), r.n.to_string(), sci(r.norm)]).collect();
        rows.extend(report.cesaro.iter().map(|r| vec!["cesaro".into(), r.m.to_string(), sci(r.error)]));
        (vec!["table", "index", "value"], rows)
    })?;
    Ok(Output { code: EXIT_OK, text })
}

#[derive(Serialize)]
struct TermView {
    char: Character,
    #[serde(serialize_with = "ser_c64")]
    value: Complex64,
}

#[derive(Serialize)]
struct ClassifyReport {
    space: SpaceKind,
    #[serde(rename = "L")]
    l: usize,
    #[serde(serialize_with = "ser_c64")]
    c0: Complex64,
    partial: Vec<PartialEntry>,
    f0: Vec<TermView>,
    #[serde(serialize_with = "crate::report::ser_c64_vec")]
    alpha0: Vec<Complex64>,
    #[serde(serialize_with = "ser_f64")]
    fit_residual: f64,
    /// Cocycle solution `g` of the inner remainder `[M_g + β(𝕂), ·]`.
    residual_g: Vec<TermView>,
}

pub fn cmd_classify(cfg: &RunConfig, space: SpaceArg) -> Result<Output, Failure> {
    let g = cfg.group()?;
    let d = cfg.derivation(&g)?;
    let kind = resolve_space(space, &d);
    let dict = derivation_characters(&g, &d);
    let cl = classify_invariant(&d, &g, kind, &dict, cfg.l)?;
    let terms = |f: &crate::trigpoly::TrigPoly| -> Vec<TermView> {
        f.terms().map(|(chi, v)| TermView { char: chi.clone(), value: *v }).collect()
    };
    let report = ClassifyReport {
        space: kind,
        l: cfg.l,
        c0: cl.c0,
        partial: cl.partial.iter().map(|(chi, v)| PartialEntry { char: chi.clone(), value: *v }).collect(),
        f0: terms(&cl.f0),
        alpha0: cl.alpha0.clone(),
        fit_residual: cl.fit_residual,
        residual_g: cl.residual.inner.get(&0).map(|t| terms(&t.f)).unwrap_or_default(),
    };
    let text = render(cfg, &report, || {
        let mut rows = vec![vec!["c0".into(), String::new(), sci(cl.c0.re), sci(cl.c0.im)]];
        for p in &report.partial {
            rows.push(vec!["partial".into(), p.char.to_string(), sci(p.value.re), sci(p.value.im)]);
        }
        for t in &report.f0 {
            rows.push(vec!["f0".into(), t.char.to_string(), sci(t.value.re), sci(t.value.im)]);
        }
        (vec!["item", "char", "re", "im"], rows)
    })?;
    Ok(Output { code: EXIT_OK, text })
}

#[derive(Serialize)]
struct ObstructedLift {
    obstructed: bool,
    #[serde(serialize_with = "ser_c64")]
    c0: Complex64,
    partial: Vec<PartialEntry>,
    message: String,
}

#[derive(Serialize)]
struct ExperimentReport {
    experiment: bool,
    #[serde(rename = "L")]
    l: usize,
    rows: Vec<ExperimentRow>,
}

pub fn cmd_lift(cfg: &RunConfig, experiment: bool) -> Result<Output, Failure> {
    let g = cfg.group()?;
    let d = cfg.derivation(&g)?;
    if !d.partial.is_empty() {
        let coords = derivation_characters(&g, &d);
        let cl = classify_invariant(&d, &g, SpaceKind::Full, &coords, cfg.l)?;
        let report = ObstructedLift {
            obstructed: true,
            c0: cl.c0,
            partial: cl.partial.iter().map(|(chi, v)| PartialEntry { char: chi.clone(), value: *v }).collect(),
            message: Error::Obstructed.to_string(),
        };
        let text = render(cfg, &report, || {
            let rows = report
                .partial
                .iter()
                .map(|p| vec![p.char.to_string(), sci(p.value.re), sci(p.value.im)])
                .collect();
            (vec!["char", "re", "im"], rows)
        })?;
        return Ok(Output { code: EXIT_OBSTRUCTION, text });
    }
    if experiment {
        let cutoffs: Vec<u64> = (2..).map(|p| 1u64 << p).take_while(|&c| 4 * c as usize <= cfg.l).collect();
        let rows = torus_experiment(&d, &g, &cutoffs, cfg.l)?;
        let report = ExperimentReport { experiment: true, l: cfg.l, rows };
        let text = render(cfg, &report, || {
            let rows = report
                .rows
                .iter()
                .map(|r| vec![r.cutoff.to_string(), sci(r.matrix_u), sci(r.matrix_ustar), sci(r.closed)])
                .collect();
            (vec!["cutoff", "matrix_u", "matrix_ustar", "closed"], rows)
        })?;
        return Ok(Output { code: EXIT_OK, text });
    }
    let (plan, _) = build_lift(&d, &g, cfg.target)?;
    let report = verify_lift(&plan, &g, cfg.l, &default_characters())?;
    let code = if report.agreement && report.ii <= cfg.target { EXIT_OK } else { EXIT_OBSTRUCTION };
    let text = render(cfg, &report, || {
        let mut rows = vec![
            vec!["II".into(), String::new(), sci(report.ii), sci(report.matrix_u)],
            vec!["II*".into(), String::new(), sci(report.ii), sci(report.matrix_ustar)],
        ];
        for c in &report.i {
            rows.push(vec!["I".into(), c.char.to_string(), sci(c.closed), sci(c.matrix)]);
        }
        (vec!["norm", "char", "closed", "matrix"], rows)
    })?;
    Ok(Output { code, text })
}

#[derive(Serialize)]
struct CheckRow {
    name: String,
    #[serde(serialize_with = "ser_f64")]
    value: f64,
    #[serde(serialize_with = "ser_f64")]
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(rename = "L")]
    l: usize,
    seed: u64,
    checks: Vec<CheckRow>,
    compact: Option<CompactReport>,
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Output, Failure> {
    let g = cfg.group()?;
    let mut rng = sample::rng(cfg.seed);
    let mut checks = Vec::new();
    let f = sample::trig_poly(&mut rng, &g, 5);
    let b = sample::element(&mut rng, &g, SpaceKind::Full, 3, 0);
    for c in relation_suite(&g, &f, &b, 2, cfg.l)? {
        checks.push(CheckRow { name: c.name, value: c.max_error, tolerance: 1e-12, pass: c.max_error <= 1e-12 });
    }
    let mut compact = None;
    if cfg.derivation.is_some() {
        let d = cfg.derivation(&g)?;
        let kind = resolve_space(SpaceArg::Auto, &d);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let a = sample::element(&mut rng, &g, kind, 3, 6);
            let b = sample::element(&mut rng, &g, kind, 3, 6);
            worst = worst.max(leibniz_defect(&d, &g, &a, &b, cfg.l)?);
        }
        checks.push(CheckRow { name: "Leibniz".into(), value: worst, tolerance: 1e-9, pass: worst <= 1e-9 });
        if kind == SpaceKind::Plus {
            let r = check_compact_preservation(&d, &g, cfg.l, 32.min(cfg.l))?;
            let tail = r.worst_tail();
            checks.push(CheckRow { name: "D(P0) tail".into(), value: tail, tolerance: 1e-10, pass: tail <= 1e-10 });
            compact = Some(r);
        }
    }
    let code = if checks.iter().all(|c| c.pass) { EXIT_OK } else { EXIT_OBSTRUCTION };
    let report = VerifyReport { l: cfg.l, seed: cfg.seed, checks, compact };
    let text = render(cfg, &report, || {
        let rows = report
            .checks
            .iter()
            .map(|c| vec![c.name.clone(), sci(c.value), sci(c.tolerance), c.pass.to_string()])
            .collect();
        (vec!["check", "value", "tolerance", "pass"], rows)
    })?;
    Ok(Output { code, text })
}

pub fn cmd_obstruction_demo(cfg: &RunConfig, coeff: f64) -> Result<Output, Failure> {
    let g = match &cfg.group {
        Some(_) => cfg.group()?,
        None => GroupSpec::golden_torus(),
    };
    let mut rng = sample::rng(cfg.seed);
    let report = torus_obstruction_demo(&g, Complex64::new(coeff, 0.0), cfg.l, &mut rng)?;
    let text = render(cfg, &report, || {
        let mut rows = vec![vec!["c0".into(), sci(report.c0.re), sci(report.c0.im)]];
        for p in &report.partial {
            rows.push(vec![format!("partial {}", p.char), sci(p.value.re), sci(p.value.im)]);
        }
        rows.push(vec!["max_commutator".into(), sci(report.max_commutator), sci(0.0)]);
        (vec!["item", "re", "im"], rows)
    })?;
    Ok(Output { code: EXIT_OK, text })
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            out.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
