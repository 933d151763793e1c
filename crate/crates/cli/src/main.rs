use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use convexval::embed::{build_uzeta, build_vlt, compose_gk};
use convexval::grid::io::Encoding;
use convexval::grid::{gauge_from_vertices, llt, DualRange};
use convexval::io::{read_function, write_affine, write_function, write_radial, Function};
use convexval::profile::PLProfile;
use convexval::radial::RadialFn;
use convexval::scalar::Bound;
use convexval::valuation::suites::{run_suite, SuiteConfig, SUITES};
use convexval::valuation::{
    evaluate_z, evaluate_z_affine_gk, evaluate_z_dual, evaluate_z_dual_grid, evaluate_z_grid,
    volume_product_csv, volume_product_experiment, ZComponents, ZetaTriple,
};
use convexval::ScalarZeta;

const COMPONENTS_SCHEMA: &str = "convexval/components@1";

#[derive(Parser)]
#[command(name = "convexval", version, about = "Valuations on convex functions: transforms, evaluation and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convex conjugate of a function file (exact for radial profiles).
    Conjugate(ConjugateArgs),
    /// Components of Z(u), or of the dual valuation with --dual.
    Evaluate(EvaluateArgs),
    /// Runs a verification suite and prints its report.
    Verify(VerifyArgs),
    /// Builds a function file.
    Construct(ConstructArgs),
    /// Exploratory sweeps.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Format for reports, components and sweeps. Function files keep their
    /// own format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ConjugateArgs {
    input: PathBuf,
    /// Dual box for grids: `auto` or `lo:hi` on every axis.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    dual_range: String,
    /// Resolution used when an affine maximum is sampled first.
    #[arg(long, default_value_t = 257)]
    grid_res: usize,
    /// Sampling box `lo:hi` for affine maxima.
    #[arg(long, default_value = "-4:4", allow_hyphen_values = true)]
    r#box: String,
    /// Write grid data as little-endian f64 instead of CSV.
    #[arg(long)]
    binary: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvaluateArgs {
    input: PathBuf,
    /// Triple as a JSON file or three comma-separated presets
    /// (`zero`, `identity`, `harmonic`, `exp:ALPHA`, `hat:WIDTH`).
    #[arg(long)]
    zeta: String,
    #[arg(long)]
    dual: bool,
    /// Dimension for radial profiles.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Absolute quadrature tolerance (radial) or support tolerance (grids).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Composition index for affine maxima, which need g_k first.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = 257)]
    grid_res: usize,
    #[arg(long, default_value = "-4:4", allow_hyphen_values = true)]
    r#box: String,
    /// Treat a triple outside the classification hypotheses (negative
    /// values, no threshold, infinite moment) as an input error instead of
    /// a warning.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 257)]
    grid_res: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Weight for the `uzeta` suite (preset or JSON file).
    #[arg(long)]
    zeta: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    kind: ConstructKind,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum ConstructKind {
    /// g_k composed with a radial profile.
    Gk {
        #[arg(long)]
        k: u32,
        /// Function file, or an expression such as `v(r)=r` or `v(r)=1+2*r`.
        #[arg(long)]
        base: String,
    },
    /// The appendix profile v_l^t.
    Vlt {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        l: u64,
    },
    /// The profile u_zeta for a weight with infinite moment.
    Uzeta {
        #[arg(long, default_value = "harmonic")]
        zeta: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Gauge of a rectangle `x0 x1 y0 y1` or of a polygon.
    Gauge {
        #[arg(long = "box", num_args = 4, allow_hyphen_values = true, value_names = ["X0", "X1", "Y0", "Y1"])]
        rect: Option<Vec<f64>>,
        /// Vertices as `x,y;x,y;...`.
        #[arg(long, allow_hyphen_values = true)]
        vertices: Option<String>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(subcommand)]
    kind: ExperimentKind,
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// z2 times its dual counterpart over a family of radial functions.
    VolumeProduct {
        #[arg(long, default_value = "hat:1")]
        zeta: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Function files; a built-in family when none are given.
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("CONVEXVAL_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("CONVEXVAL_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

/// `Ok(false)` means a residual exceeded its tolerance.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Conjugate(a) => conjugate(a).map(|_| true),
        Command::Evaluate(a) => evaluate(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Construct(a) => construct(a).map(|_| true),
        Command::Experiment(a) => experiment(a).map(|_| true),
    }
}

fn emit(common: &Common, bytes: &[u8]) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(bytes).context("writing to stdout"),
    }
}

fn emit_json(common: &Common, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(common, text.as_bytes())
}

fn load(path: &Path) -> Result<Function> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_function(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn parse_interval(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("expected lo:hi, got {text:?}"))?;
    let (lo, hi): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
    if !(lo < hi) {
        bail!("empty interval {text:?}");
    }
    Ok((lo, hi))
}

fn parse_scalar_zeta(text: &str) -> Result<ScalarZeta> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a.parse::<f64>().with_context(|| format!("bad parameter in {text:?}"))?)),
        None => (text, None),
    };
    Ok(match (name, arg) {
        ("zero", None) => ScalarZeta::zero(),
        ("identity", None) => ScalarZeta::identity(),
        ("harmonic", None) => ScalarZeta::harmonic(),
        ("exp", a) => ScalarZeta::exp_decay(a.unwrap_or(1.0)),
        ("hat", a) => ScalarZeta::hat(a.unwrap_or(1.0)),
        _ if Path::new(text).exists() => {
            let bytes = fs::read(text)?;
            serde_json::from_slice(&bytes).with_context(|| format!("parsing {text}"))?
        }
        _ => bail!("unknown zeta {text:?}; use zero, identity, harmonic, exp:ALPHA, hat:WIDTH or a JSON file"),
    })
}

fn parse_triple(text: &str) -> Result<ZetaTriple> {
    if Path::new(text).exists() {
        let bytes = fs::read(text)?;
        return serde_json::from_slice(&bytes).with_context(|| format!("parsing {text}"));
    }
    let parts: Vec<&str> = text.split(',').collect();
    let [a, b, c] = parts[..] else {
        bail!("expected a triple file or three presets `z0,z1,z2`, got {text:?}");
    };
    Ok(ZetaTriple::new(parse_scalar_zeta(a)?, parse_scalar_zeta(b)?, parse_scalar_zeta(c)?))
}

/// `v(r)=r`, `v(r)=2*r`, `v(r)=1+2*r` and similar, or a function file.
fn parse_base(text: &str) -> Result<PLProfile> {
    if let Some(expr) = text.trim().strip_prefix("v(r)=") {
        let expr: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        let (mut base, mut slope) = (0.0, 0.0);
        for term in expr.split('+') {
            if let Some(coef) = term.strip_suffix('r') {
                let coef = coef.trim_end_matches('*');
                slope += if coef.is_empty() { 1.0 } else { coef.parse::<f64>()? };
            } else {
                base += term.parse::<f64>().with_context(|| format!("bad term {term:?}"))?;
            }
        }
        return Ok(PLProfile::linear(base, slope)?);
    }
    match load(Path::new(text))? {
        Function::Radial(p) => Ok(p),
        _ => bail!("{text} is not a radial profile"),
    }
}

fn conjugate(a: ConjugateArgs) -> Result<()> {
    let range = if a.dual_range == "auto" {
        DualRange::Auto
    } else {
        let (lo, hi) = parse_interval(&a.dual_range)?;
        DualRange::Fixed { lo, hi }
    };
    let encoding = if a.binary { Encoding::F64le } else { Encoding::Csv };
    match load(&a.input)? {
        Function::Radial(p) => emit(&a.common, (write_radial(&p.conjugate()) + "\n").as_bytes()),
        Function::Grid(g) => {
            let c = llt(&g, range)?;
            emit(&a.common, &write_function(&Function::Grid(c.grid), encoding))
        }
        Function::Affine(u) => {
            let (lo, hi) = parse_interval(&a.r#box)?;
            let c = llt(&u.sample(lo, hi, a.grid_res)?, range)?;
            emit(&a.common, &write_function(&Function::Grid(c.grid), encoding))
        }
    }
}

#[derive(serde::Serialize)]
struct ComponentsDoc<'a> {
    schema: &'a str,
    path: &'a str,
    dual: bool,
    #[serde(flatten)]
    components: ZComponents,
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let zeta = parse_triple(&a.zeta)?;
    if let Err(e) = zeta.validate(a.n) {
        if a.strict {
            return Err(e.into());
        }
        eprintln!("warning: {e}");
    }
    let (path, components) = match load(&a.input)? {
        Function::Radial(p) => {
            let u = RadialFn::new(p, a.n)?;
            let z = if a.dual {
                evaluate_z_dual(&zeta, &u, a.tol)?
            } else {
                evaluate_z(&zeta, &u, a.tol)?
            };
            ("radial", z)
        }
        Function::Grid(g) => {
            let z = if a.dual {
                evaluate_z_dual_grid(&zeta, &g, a.tol)?
            } else {
                evaluate_z_grid(&zeta, &g, a.tol)?
            };
            ("grid", z)
        }
        Function::Affine(u) => {
            if a.dual {
                bail!("--dual is not available for affine maxima; sample and compose first");
            }
            let k = a.k.ok_or_else(|| {
                anyhow!("affine maxima are not super-coercive; pass --k to compose with g_k")
            })?;
            let (lo, hi) = parse_interval(&a.r#box)?;
            ("grid", evaluate_z_affine_gk(&zeta, &u, k, lo, hi, a.grid_res, a.tol)?)
        }
    };
    let doc = ComponentsDoc {
        schema: COMPONENTS_SCHEMA,
        path,
        dual: a.dual,
        components,
    };
    match a.common.format {
        Format::Json => emit_json(&a.common, &doc),
        Format::Csv => {
            let z = doc.components;
            let text = format!("path,dual,z0,z1,z2,total\n{path},{},{:?},{:?},{:?},{:?}\n", a.dual, z.z0, z.z1, z.z2, z.total);
            emit(&a.common, text.as_bytes())
        }
    }
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let cfg = SuiteConfig {
        seed: a.seed,
        trials: a.trials,
        n: a.n,
        grid_res: a.grid_res,
        tol: a.tol,
        zeta: a.zeta.as_deref().map(parse_scalar_zeta).transpose()?,
    };
    let names: Vec<&str> = if a.suite == "all" {
        SUITES.to_vec()
    } else {
        vec![a.suite.as_str()]
    };
    let reports = names
        .iter()
        .map(|name| run_suite(name, &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        for (case, residual, tol) in r.failures() {
            eprintln!("FAIL {}: {case}: residual {residual:e} > {tol:e}", r.suite);
        }
    }
    match a.common.format {
        Format::Json if reports.len() == 1 => emit_json(&a.common, &reports[0])?,
        Format::Json => emit_json(&a.common, &reports)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["suite", "case", "residual", "tolerance", "pass"])?;
            for r in &reports {
                for ((c, x), t) in r.cases.iter().zip(&r.residuals).zip(&r.tolerances) {
                    w.write_record([&r.suite, c, &format!("{x:e}"), &format!("{t:e}"), &(x <= t).to_string()])?;
                }
            }
            emit(&a.common, &w.into_inner()?)?;
        }
    }
    Ok(pass)
}

fn construct(a: ConstructArgs) -> Result<()> {
    let text = match a.kind {
        ConstructKind::Gk { k, base } => write_radial(&compose_gk(k, &parse_base(&base)?)?),
        ConstructKind::Vlt { t, l } => write_radial(&build_vlt(t, l)?),
        ConstructKind::Uzeta { zeta, n } => write_radial(&build_uzeta(&parse_scalar_zeta(&zeta)?, n)?),
        ConstructKind::Gauge { rect, vertices } => {
            let verts: Vec<[f64; 2]> = match (rect, vertices) {
                (Some(r), None) => vec![[r[0], r[2]], [r[1], r[2]], [r[1], r[3]], [r[0], r[3]]],
                (None, Some(v)) => v
                    .split(';')
                    .map(|p| {
                        let (x, y) = p.split_once(',').ok_or_else(|| anyhow!("vertex {p:?} is not x,y"))?;
                        Ok([x.trim().parse()?, y.trim().parse()?])
                    })
                    .collect::<Result<_>>()?,
                _ => bail!("gauge needs exactly one of --box or --vertices"),
            };
            write_affine(&gauge_from_vertices(&verts)?)
        }
    };
    emit(&a.common, (text + "\n").as_bytes())
}

/// Staircases and their dilates: super-coercive with closed-form z2.
fn builtin_family(n: usize) -> Result<Vec<(String, RadialFn)>> {
    let stairs = |levels: usize, rise: f64| -> Result<PLProfile> {
        let segs: Vec<(f64, f64)> = (0..levels).map(|i| (i as f64, rise * (i + 1) as f64)).collect();
        Ok(PLProfile::new(0.0, &segs, Bound::At(levels as f64))?)
    };
    let mut family = Vec::new();
    for (id, p) in [
        ("stairs", stairs(6, 1.0)?),
        ("stairs_steep", stairs(6, 2.0)?),
        ("stairs_gentle", stairs(6, 0.5)?),
    ] {
        for lambda in [1.0, 2.0] {
            let u = RadialFn::new(p.clone(), n)?.scaled(lambda)?;
            family.push((format!("{id}_x{lambda}"), u));
        }
    }
    Ok(family)
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    match a.kind {
        ExperimentKind::VolumeProduct {
            zeta,
            n,
            inputs,
            common,
        } => {
            let zeta = parse_scalar_zeta(&zeta)?;
            let family = if inputs.is_empty() {
                builtin_family(n)?
            } else {
                inputs
                    .iter()
                    .map(|path| match load(path)? {
                        Function::Radial(p) => Ok((path.display().to_string(), RadialFn::new(p, n)?)),
                        _ => bail!("{} is not a radial profile", path.display()),
                    })
                    .collect::<Result<_>>()?
            };
            let rows = volume_product_experiment(&zeta, &family)?;
            match common.format {
                Format::Csv => emit(&common, volume_product_csv(&rows)?.as_bytes()),
                Format::Json => emit_json(&common, &rows),
            }
        }
    }
}
