//! `metamorph`: transforms, reconstruction, image-space analysis and
//! verification from the command line.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use metamorph_core::fiducial::{self, annihilation_residual, FiducialSpec};
use metamorph_core::metamorph::{analyze, contravariant, covariant_fast, metamorphism, SliceStack, TransformContext};
use metamorph_core::signals::io::{to_json_text, write_atomic, SignalDoc};
use metamorph_core::signals::{Hbar, MeasureSpec, Normalization, Signal};
use metamorph_core::verify::{self, Suite};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use config::RunConfig;

const CERTIFY_NORM: f64 = 1e-10;
const CERTIFY_RESIDUAL: f64 = 1e-7;

#[derive(Parser, Debug)]
#[command(name = "metamorph", version, about = "Covariant transforms for the shear-squeeze-rotation group")]
struct Cli {
    /// Run configuration (JSON); command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transform a signal on one slice (b, r) and write the field as CSV.
    Transform {
        #[arg(long)]
        signal: PathBuf,
        /// `gaussian`, a fiducial spec, a `fiducial` output or a signal document.
        #[arg(long, default_value = "gaussian")]
        fiducial: String,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the five-slice stack (with a half-step stack) around (b, r).
        #[arg(long)]
        stack_out: Option<PathBuf>,
    },
    /// Reconstruct a signal from the centre slice of a stack.
    Reconstruct {
        #[arg(long)]
        stack: PathBuf,
        #[arg(long, default_value = "gaussian")]
        fiducial: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Image-space residuals of a stack.
    Analyze {
        #[arg(long)]
        stack: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Run the invariant suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build and certify a fiducial vector from its annihilator spec.
    Fiducial {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Group,
    Signals,
    Representations,
    Fiducial,
    Metamorph,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Group => Suite::Group,
            SuiteArg::Signals => Suite::Signals,
            SuiteArg::Representations => Suite::Representations,
            SuiteArg::Fiducial => Suite::Fiducial,
            SuiteArg::Metamorph => Suite::Metamorph,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, files or parameters: exit 2.
    Invalid(String),
    /// A verification or certification did not pass: exit 1.
    Failed(String),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Invalid(_) => 2,
        }
    }
}

impl From<metamorph_core::Error> for CliError {
    fn from(e: metamorph_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, text.as_bytes()).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn read_signal(path: &Path) -> Result<SignalDoc, CliError> {
    SignalDoc::from_json(&read(path)?).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Output of the `fiducial` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiducialDoc {
    spec: FiducialSpec,
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    norm: f64,
    annihilation_residual: f64,
    certified: bool,
    signal: SignalDoc,
}

enum Fiducial {
    Gaussian,
    Spec(FiducialSpec),
    Signal(SignalDoc),
}

impl Fiducial {
    fn parse(arg: &str) -> Result<Self, CliError> {
        if arg == "gaussian" {
            return Ok(Fiducial::Gaussian);
        }
        let path = Path::new(arg);
        let text = read(path)?;
        if let Ok(spec) = serde_json::from_str::<FiducialSpec>(&text) {
            return Ok(Fiducial::Spec(spec));
        }
        if let Ok(doc) = serde_json::from_str::<FiducialDoc>(&text) {
            return Ok(Fiducial::Signal(doc.signal));
        }
        SignalDoc::from_json(&text).map(Fiducial::Signal).map_err(|_| {
            CliError::invalid(format!(
                "{}: expected `gaussian`, a fiducial spec, a fiducial document or a signal document",
                path.display()
            ))
        })
    }

    fn hbar(&self) -> Option<Hbar> {
        match self {
            Fiducial::Signal(doc) => Some(doc.hbar()),
            _ => None,
        }
    }

    fn signal(&self, ctx: &TransformContext) -> Result<Signal, CliError> {
        Ok(match self {
            Fiducial::Gaussian => fiducial::gaussian(&ctx.rep()).into(),
            Fiducial::Spec(spec) => fiducial::build(spec, &ctx.rep(), &ctx.disc)?.into(),
            Fiducial::Signal(doc) => doc.to_signal()?,
        })
    }
}

fn resolve_hbar(cfg: &RunConfig, found: &[Option<Hbar>]) -> Result<Hbar, CliError> {
    let mut seen: Option<Hbar> = None;
    for h in found.iter().flatten() {
        match seen {
            Some(s) if s != *h => {
                return Err(CliError::invalid(format!("inputs disagree on hbar: {} vs {}", s.get(), h.get())))
            }
            _ => seen = Some(*h),
        }
    }
    cfg.resolve_hbar(seen)
}

fn transform(
    cfg: &RunConfig,
    signal: &Path,
    fid: &str,
    b: f64,
    r: f64,
    out: &Path,
    stack_out: Option<&Path>,
) -> Result<String, CliError> {
    if !(r > 0.0) {
        return Err(CliError::invalid(format!("r must be positive, got {r}")));
    }
    let doc = read_signal(signal)?;
    let fid = Fiducial::parse(fid)?;
    let hbar = resolve_hbar(cfg, &[Some(doc.hbar()), fid.hbar()])?;
    let ctx = cfg.context(hbar)?;
    let f = doc.to_signal()?;
    let provider: Box<dyn Fn(f64, f64) -> metamorph_core::Result<_>> = match fid {
        Fiducial::Gaussian => Box::new(|b, r| Ok(metamorphism(&f, b, r, &ctx)?.field)),
        other => {
            let phi = other.signal(&ctx)?;
            Box::new(move |b, r| Ok(covariant_fast(&f, &phi, b, r, &ctx)?.field))
        }
    };
    let field = provider(b, r)?;
    write(out, &field.to_csv())?;
    if let Some(dir) = stack_out {
        let stack = SliceStack::with_half(&provider, b, r, cfg.h_b, cfg.h_r)?;
        stack.write_dir(dir).map_err(|e| CliError::invalid(format!("{}: {e}", dir.display())))?;
    }
    Ok(format!(
        "wrote {} ({} x {} points, b={b}, r={r})",
        out.display(),
        field.x_grid().count(),
        field.y_grid().count()
    ))
}

fn reconstruct(cfg: &RunConfig, stack: &Path, fid: &str, out: &Path) -> Result<String, CliError> {
    let stack = SliceStack::read_dir(stack)?;
    let fid = Fiducial::parse(fid)?;
    let hbar = resolve_hbar(cfg, &[Some(stack.hbar()), fid.hbar()])?;
    let ctx = cfg.context(hbar)?;
    let phi = fid.signal(&ctx)?;
    let measure = MeasureSpec::dirac(stack.b0(), stack.r0())?.with_normalization(cfg.normalization);
    let raw = contravariant(std::slice::from_ref(stack.centre()), &phi, &measure, &ctx)?;
    // W*W = ‖φ‖² under ħ dx dy, times 1/√(2r₀) under ħ dx dy/√(2r)
    let mut gain = phi.norm().powi(2);
    if cfg.normalization == Normalization::Paper {
        gain /= (2.0 * stack.r0()).sqrt();
    }
    if gain == 0.0 {
        return Err(CliError::invalid("fiducial has zero norm"));
    }
    let f = raw.scale(C64::new(1.0 / gain, 0.0));
    write(out, &SignalDoc::from_samples(&f, hbar).to_json())?;
    Ok(format!("wrote {} ({} samples, norm {:.6e})", out.display(), f.values().len(), f.norm()))
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    #[serde(flatten)]
    analysis: &'a metamorph_core::metamorph::AnalysisReport,
    tolerances: metamorph_core::metamorph::Tolerances,
    within_tolerance: Within,
}

#[derive(Serialize)]
struct Within {
    c1: bool,
    c2: bool,
    s1: bool,
    s2: bool,
}

fn analyze_cmd(cfg: &RunConfig, stack: &Path, report: &Path) -> Result<String, CliError> {
    let stack = SliceStack::read_dir(stack)?;
    resolve_hbar(cfg, &[Some(stack.hbar())])?;
    let analysis = analyze(&stack);
    let t = cfg.tolerances;
    let r = analysis.residuals;
    let out = AnalyzeReport {
        analysis: &analysis,
        tolerances: t,
        within_tolerance: Within { c1: r.c1 <= t.c1, c2: r.c2 <= t.c2, s1: r.s1 <= t.s1, s2: r.s2 <= t.s2 },
    };
    write(report, &to_json_text(&out)?)?;
    Ok(format!(
        "c1={:.3e} c2={:.3e} s1={:.3e} s2={:.3e} parabolic={:.3e}",
        r.c1, r.c2, r.s1, r.s2, r.parabolic
    ))
}

fn verify_cmd(cfg: &RunConfig, suite: Suite, seed: u64, report: Option<&Path>) -> Result<String, CliError> {
    let ctx = cfg.context(cfg.resolve_hbar(None)?)?;
    let result = verify::run(suite, seed, &ctx);
    if let Some(p) = report {
        write(p, &result.to_json())?;
    }
    let mut lines = Vec::new();
    for s in &result.suites {
        for c in &s.checks {
            let value = c.value.map_or("error".to_string(), |v| format!("{v:.3e}"));
            lines.push(format!("{} {}/{} {value}", if c.passed { "PASS" } else { "FAIL" }, s.suite, c.name));
        }
    }
    let summary = lines.join("\n");
    if result.passed {
        Ok(format!("{summary}\nall checks passed (seed {seed})"))
    } else {
        Err(CliError::Failed(format!("{summary}\nverification failed (seed {seed})")))
    }
}

fn fiducial_cmd(cfg: &RunConfig, spec: &Path, out: &Path) -> Result<String, CliError> {
    let text = read(spec)?;
    let spec: FiducialSpec =
        serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", spec.display())))?;
    let ctx = cfg.context(cfg.resolve_hbar(None)?)?;
    let rep = ctx.rep();
    let phi = fiducial::build(&spec, &rep, &ctx.disc)?;
    let norm = phi.norm();
    let residual = annihilation_residual(&spec, &phi.clone().into(), &rep);
    let certified = (norm - 1.0).abs() <= CERTIFY_NORM && residual <= CERTIFY_RESIDUAL;
    let doc = FiducialDoc {
        spec,
        family: if spec.e_r == 0.0 { "airy" } else { "generic" }.into(),
        kappa: (spec.e_r != 0.0).then(|| spec.kappa(&rep)),
        norm,
        annihilation_residual: residual,
        certified,
        signal: SignalDoc::from_samples(&phi, ctx.hbar),
    };
    write(out, &to_json_text(&doc)?)?;
    let msg = format!("wrote {} (norm {norm:.3e}, annihilation residual {residual:.3e})", out.display());
    if certified {
        Ok(msg)
    } else {
        Err(CliError::Failed(format!("{msg}; certification failed")))
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Transform { signal, fiducial, b, r, out, stack_out } => transform(
            &cfg,
            &signal,
            &fiducial,
            b.unwrap_or(cfg.b),
            r.unwrap_or(cfg.r),
            &out,
            stack_out.as_deref(),
        ),
        Command::Reconstruct { stack, fiducial, out } => reconstruct(&cfg, &stack, &fiducial, &out),
        Command::Analyze { stack, report } => analyze_cmd(&cfg, &stack, &report),
        Command::Verify { suite, seed, report } => verify_cmd(&cfg, suite.into(), seed, report.as_deref()),
        Command::Fiducial { spec, out } => fiducial_cmd(&cfg, &spec, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Invalid(m) => eprintln!("error: {m}"),
                CliError::Failed(m) => println!("{m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
