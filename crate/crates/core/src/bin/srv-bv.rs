//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain error (invalid curve, jump curve in
//! parametrised mode, ε too large, ...), 2 I/O error (unreadable or
//! malformed input file, unwritable output, bad command line).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use srv_bv::io::{CurveFile, InputDigest, ResultFile};
use srv_bv::matching::{correspondences, refine, GridConfig};
use srv_bv::oracle::verify_relaxation;
use srv_bv::plot::{profile, render_svg, PlotInput};
use srv_bv::{gtransform, io, relax, srvt, AcCurve, Error, SbvCurve};

#[derive(Parser)]
#[command(name = "srv-bv", version, about = "SRV distances for curves with jumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Classical SRV distance; both curves must be continuous.
    Param,
    /// Relaxed distance for curves with jumps.
    Relaxed,
    /// Scale-invariant angle between the transforms.
    Scale,
}

#[derive(Subcommand)]
enum Command {
    /// Check a curve file and list its violations.
    Validate { path: PathBuf },
    /// Distance between two curves in their given parametrisations.
    Distance {
        path1: PathBuf,
        path2: PathBuf,
        #[arg(long, value_enum, default_value = "relaxed")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shape distance with optimal reparametrisations.
    Shape {
        path1: PathBuf,
        path2: PathBuf,
        /// Uniform grid points per axis in the first round.
        #[arg(long, default_value_t = 33)]
        grid: usize,
        /// Longest move in base grid steps.
        #[arg(long, default_value_t = 8)]
        window: usize,
        /// Number of refinement rounds.
        #[arg(long, default_value_t = 3)]
        refine: usize,
        /// Correspondence pairs to emit.
        #[arg(long, default_value_t = 21)]
        samples: usize,
        /// Match G(c) in its own parametrisation instead of constant speed.
        #[arg(long)]
        no_constant_speed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Jump-opening transform G(c) with ξ, ζ and α.
    Gtransform {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recovery-sequence check of the relaxed similarity.
    ApproxCheck {
        path1: PathBuf,
        path2: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3, 1e-4])]
        eps: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG drawing of one or two curves, optionally with match chords.
    Plot {
        path1: PathBuf,
        path2: Option<PathBuf>,
        /// Result file of `shape` whose correspondences are drawn.
        #[arg(long = "match")]
        match_file: Option<PathBuf>,
        #[arg(long)]
        svg: PathBuf,
        /// Plot t against the first coordinate.
        #[arg(long)]
        profile: bool,
    },
}

enum Failure {
    Domain(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Loaded {
    curve: SbvCurve,
    digest: InputDigest,
}

fn read(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_curve_file(path: &Path) -> Outcome<(CurveFile, InputDigest)> {
    let bytes = read(path)?;
    let digest = InputDigest::new(&path.display().to_string(), &bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::Io(format!("{}: not UTF-8", path.display())))?;
    let file = io::parse_curve_file(&text)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok((file, digest))
}

fn load(path: &Path) -> Outcome<Loaded> {
    let (file, digest) = read_curve_file(path)?;
    let curve = file
        .to_curve()
        .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    Ok(Loaded { curve, digest })
}

fn emit(text: &str, out: &Option<PathBuf>) -> Outcome<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn continuous(c: &SbvCurve, path: &Path) -> Outcome<AcCurve> {
    AcCurve::try_from(c.clone()).map_err(|_| {
        Failure::Domain(format!(
            "{}: curve has jumps; use --mode relaxed",
            path.display()
        ))
    })
}

fn result_file(inputs: Vec<InputDigest>) -> ResultFile {
    ResultFile {
        command: std::env::args().skip(1).collect(),
        inputs,
        ..Default::default()
    }
}

fn validate(path: &Path) -> Outcome<()> {
    let (file, _) = read_curve_file(path)?;
    let violations = file.to_curve_unchecked().validate();
    if violations.is_empty() {
        println!("{}: valid", path.display());
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(Failure::Domain(format!(
        "{}: {} violation(s)",
        path.display(),
        violations.len()
    )))
}

fn distance(p1: &Path, p2: &Path, mode: Mode, out: &Option<PathBuf>) -> Outcome<()> {
    let (a, b) = (load(p1)?, load(p2)?);
    let mut r = result_file(vec![a.digest.clone(), b.digest.clone()]);
    r.outputs.insert("length1".into(), a.curve.length());
    r.outputs.insert("length2".into(), b.curve.length());
    match mode {
        Mode::Param => {
            let (x, y) = (continuous(&a.curve, p1)?, continuous(&b.curve, p2)?);
            r.outputs.insert("s".into(), srvt::s_functional(&x, &y)?);
            r.outputs.insert("distance_squared".into(), srvt::distance_squared(&x, &y)?);
            r.outputs.insert("distance".into(), srvt::distance(&x, &y)?);
        }
        Mode::Relaxed => {
            r.outputs.insert("s_hat".into(), relax::s_hat(&a.curve, &b.curve)?);
            r.outputs.insert("distance_squared".into(), relax::d_hat(&a.curve, &b.curve)?);
            r.outputs.insert("distance".into(), relax::d_hat_rooted(&a.curve, &b.curve)?);
        }
        Mode::Scale => {
            let (x, y) = (continuous(&a.curve, p1)?, continuous(&b.curve, p2)?);
            r.outputs.insert("s".into(), srvt::s_functional(&x, &y)?);
            let d = srvt::scale_invariant_distance(&x, &y)?;
            r.outputs.insert("distance".into(), d);
            r.outputs.insert("distance_squared".into(), d * d);
        }
    }
    emit(&r.to_json(), out)
}

fn shape(p1: &Path, p2: &Path, cfg: &GridConfig, samples: usize, out: &Option<PathBuf>) -> Outcome<()> {
    let (a, b) = (load(p1)?, load(p2)?);
    let m = refine(&a.curve, &b.curve, cfg)?;
    let mut r = result_file(vec![a.digest, b.digest]);
    r.outputs.insert("s_star".into(), m.s_star);
    r.outputs.insert("d_shape".into(), m.d_shape);
    r.outputs.insert("d_shape_rooted".into(), m.d_shape_rooted());
    r.outputs.insert("s_realized".into(), m.s_realized);
    r.outputs.insert("length1".into(), m.len1);
    r.outputs.insert("length2".into(), m.len2);
    r.series.insert(
        "round_s_star".into(),
        m.rounds.iter().map(|x| x.s_star).collect(),
    );
    r.add_knots("psi1", &m.psi1);
    r.add_knots("psi2", &m.psi2);
    if let Some(phi) = &m.phi1 {
        r.add_knots("phi1", phi);
    }
    if let Some(phi) = &m.phi2 {
        r.add_knots("phi2", phi);
    }
    r.correspondences = correspondences(&m, samples);
    if m.zero_speed_input {
        r.notes.push(
            "input has zero-speed pieces: value is the distance of constant-speed representatives only"
                .into(),
        );
    }
    emit(&r.to_json(), out)
}

fn g_transform(path: &Path, out: &Option<PathBuf>) -> Outcome<()> {
    let c = load(path)?;
    let e = gtransform::jump_embedding(&c.curve)?;
    let mut r = result_file(vec![c.digest]);
    r.outputs.insert("alpha".into(), e.alpha);
    r.outputs.insert("length".into(), e.g.length());
    let xi: Vec<(f64, f64)> = e
        .xi
        .nodes()
        .iter()
        .flat_map(|n| {
            if n.is_jump() {
                vec![(n.t, n.left[0]), (n.t, n.right[0])]
            } else {
                vec![(n.t, n.left[0])]
            }
        })
        .collect();
    r.knots.insert("xi".into(), xi);
    r.add_knots("zeta", &e.zeta);
    r.curve = Some(CurveFile::from_curve(e.g.as_sbv()));
    emit(&r.to_json(), out)
}

fn approx_check(p1: &Path, p2: &Path, eps: &[f64], out: &Option<PathBuf>) -> Outcome<()> {
    let (a, b) = (load(p1)?, load(p2)?);
    let report = verify_relaxation(&a.curve, &b.curve, eps)?;
    let mut r = result_file(vec![a.digest, b.digest]);
    r.outputs.insert("s_hat_target".into(), report.s_hat_target);
    r.outputs.insert("max_overshoot".into(), report.max_overshoot);
    r.outputs.insert("final_gap".into(), report.final_gap);
    r.outputs.insert("passed".into(), if report.passed { 1.0 } else { 0.0 });
    r.series.insert("epsilons".into(), report.epsilons.clone());
    r.series.insert("s_values".into(), report.s_values.clone());
    emit(&r.to_json(), out)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Domain(format!(
            "overshoot {:e} above tolerance",
            report.max_overshoot
        )))
    }
}

fn plot(
    p1: &Path,
    p2: Option<&Path>,
    match_file: Option<&Path>,
    svg: &Path,
    as_profile: bool,
) -> Outcome<()> {
    let view = |c: SbvCurve| if as_profile { profile(&c) } else { c };
    let a = view(load(p1)?.curve);
    let b = match p2 {
        Some(p) => Some(view(load(p)?.curve)),
        None => None,
    };
    let chords = match match_file {
        Some(p) => {
            let text = String::from_utf8(read(p)?)
                .map_err(|_| Failure::Io(format!("{}: not UTF-8", p.display())))?;
            ResultFile::parse(&text)
                .map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?
                .correspondences
        }
        None => Vec::new(),
    };
    let text = render_svg(&PlotInput {
        curve1: Some(&a),
        curve2: b.as_ref(),
        chords: &chords,
    })?;
    fs::write(svg, text).map_err(|e| Failure::Io(format!("{}: {e}", svg.display())))
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Validate { path } => validate(&path),
        Command::Distance { path1, path2, mode, out } => distance(&path1, &path2, mode, &out),
        Command::Shape {
            path1,
            path2,
            grid,
            window,
            refine,
            samples,
            no_constant_speed,
            out,
        } => {
            let cfg = GridConfig {
                n1: grid,
                n2: grid,
                window,
                refine_rounds: refine,
                constant_speed: !no_constant_speed,
                ..Default::default()
            };
            shape(&path1, &path2, &cfg, samples, &out)
        }
        Command::Gtransform { path, out } => g_transform(&path, &out),
        Command::ApproxCheck { path1, path2, eps, out } => approx_check(&path1, &path2, &eps, &out),
        Command::Plot {
            path1,
            path2,
            match_file,
            svg,
            profile,
        } => plot(&path1, path2.as_deref(), match_file.as_deref(), &svg, profile),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
