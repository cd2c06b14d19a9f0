use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minrig::construction::{build_grunbaum_2d, build_grunbaum_3d, build_multifan_2d, FanKind};
use minrig::geometry::Configuration;
use minrig::io::{parse_points, render_svg, FrameworkFile};
use minrig::oracle::{enumerate_fan_2d, enumerate_fan_3d, perturbation_flex_search};
use minrig::rigidity::{
    certified_stress, congruence_check, superstability_test, Classification, RigidityReport,
};
use minrig::session::{Event, Session};
use minrig::Error;

#[derive(Parser)]
#[command(
    name = "minrig",
    version,
    about = "Build, certify, probe, and draw minimal universally rigid frameworks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a minimal framework on a point set and certify it
    Build(BuildArgs),
    /// Print the rigidity certificate of a framework file as JSON
    Analyze(AnalyzeArgs),
    /// Cross-check a framework file against brute-force oracles
    Verify(VerifyArgs),
    /// Draw a framework file as an SVG
    Render(RenderArgs),
    /// Replay node add/remove/move events, recertifying every epoch
    Session(SessionArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Point file: CSV with one point per line, or JSON {"dim", "points"}
    #[arg(long, conflicts_with = "points_random", required_unless_present = "points_random")]
    input: Option<PathBuf>,

    /// Ambient dimension, 2 or 3 (inferred from --input when omitted)
    #[arg(long)]
    dim: Option<usize>,

    /// Split the build into this many fans sharing a hinge (2D only)
    #[arg(long)]
    multifan: Option<usize>,

    /// Where to write the framework JSON
    #[arg(long)]
    output: PathBuf,

    /// Seed for random point generation
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Generate this many uniform random points instead of reading a file
    #[arg(long)]
    points_random: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Framework JSON to analyze
    #[arg(long)]
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    /// Enumerate all 2^f fold configurations of the stored fan
    Fan,
    /// Perturb the points and search for alternative realizations
    Perturb,
    /// Run both oracles
    Both,
}

#[derive(Args)]
struct VerifyArgs {
    /// Framework JSON to check
    #[arg(long)]
    input: PathBuf,

    /// Which oracle to run
    #[arg(long, value_enum, default_value_t = OracleKind::Both)]
    oracle: OracleKind,

    /// Ambient dimension for the realization search (defaults to the file's)
    #[arg(long)]
    ambient: Option<usize>,

    /// Number of perturbation trials
    #[arg(long, default_value_t = 100)]
    trials: usize,

    /// Seed for the perturbation trials
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RenderArgs {
    /// Framework JSON to draw
    #[arg(long)]
    input: PathBuf,

    /// Where to write the SVG
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SessionArgs {
    /// JSON-lines event script, one {"op": ...} object per line
    #[arg(long)]
    events: PathBuf,

    /// Where to write the replay log with edge deltas
    #[arg(long)]
    log: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Render(args) => cmd_render(args),
        Command::Session(args) => cmd_session(args),
    };
    ExitCode::from(code)
}

fn fail(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    1
}

fn class_str(c: &Classification) -> &'static str {
    match c {
        Classification::Flexible => "flexible",
        Classification::InfRigid => "inf_rigid",
        Classification::CandidateSuperstable => "candidate_superstable",
        Classification::Simplex => "simplex",
    }
}

fn read_framework(path: &Path) -> Result<FrameworkFile, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    FrameworkFile::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_points(args: &BuildArgs) -> Result<Configuration, String> {
    if let Some(d) = args.dim {
        if d != 2 && d != 3 {
            return Err(format!("--dim must be 2 or 3, got {d}"));
        }
    }
    if let Some(n) = args.points_random {
        let dim = args
            .dim
            .ok_or_else(|| "--points-random needs an explicit --dim".to_string())?;
        return Configuration::random(n, dim, args.seed).map_err(|e| e.to_string());
    }
    let path = args.input.as_ref().expect("clap requires input or points-random");
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let config = parse_points(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(d) = args.dim {
        if d != config.dim() {
            return Err(format!("--dim {d} does not match input dimension {}", config.dim()));
        }
    }
    Ok(config)
}

fn cmd_build(args: &BuildArgs) -> u8 {
    let config = match load_points(args) {
        Ok(c) => c,
        Err(msg) => return fail(msg),
    };
    let built = match args.multifan {
        Some(k) => build_multifan_2d(&config, k),
        None if config.dim() == 2 => build_grunbaum_2d(&config),
        None => build_grunbaum_3d(&config),
    };
    let (fw, fan) = match built {
        Ok(pair) => pair,
        Err(e) => return fail(format_args!("construction failed: {e}")),
    };
    println!("{} nodes, {} edges", fw.len(), fw.edges().len());
    let (file, line, code) = match superstability_test(&fw) {
        Ok(report) => {
            let stress = if report.s == 1 { certified_stress(&fw).ok() } else { None };
            let line = if report.superstable {
                format!(
                    "certificate: superstable (m={}, s={}, rank omega={}, classification {})",
                    report.m,
                    report.s,
                    report.omega_rank,
                    class_str(&report.classification)
                )
            } else {
                format!(
                    "certificate: not superstable (m={}, s={}, psd={}, classification {})",
                    report.m,
                    report.s,
                    report.psd,
                    class_str(&report.classification)
                )
            };
            let code = if report.superstable { 0 } else { 2 };
            let file =
                FrameworkFile::from_parts(&fw, Some(&fan), Some(&report), stress.as_deref());
            (file, line, code)
        }
        Err(e) => (
            FrameworkFile::from_parts(&fw, Some(&fan), None, None),
            format!("certificate: inconclusive ({e})"),
            2,
        ),
    };
    if let Err(e) = fs::write(&args.output, file.to_json()) {
        return fail(format_args!("cannot write {}: {e}", args.output.display()));
    }
    println!("{line}");
    code
}

fn report_json(report: &RigidityReport) -> String {
    let head: Vec<f64> = report.omega_spectrum.iter().copied().take(8).collect();
    let doc = serde_json::json!({
        "rank_R": report.rank_r,
        "m": report.m,
        "s": report.s,
        "maxwell_ok": report.maxwell_ok,
        "omega_spectrum_head": head,
        "omega_rank": report.omega_rank,
        "psd": report.psd,
        "affine_ok": report.affine_ok,
        "superstable": report.superstable,
        "classification": class_str(&report.classification),
    });
    serde_json::to_string_pretty(&doc).expect("report serializes")
}

fn cmd_analyze(args: &AnalyzeArgs) -> u8 {
    let file = match read_framework(&args.input) {
        Ok(f) => f,
        Err(msg) => return fail(msg),
    };
    let fw = match file.to_framework() {
        Ok(fw) => fw,
        Err(e) => return fail(e),
    };
    match superstability_test(&fw) {
        Ok(report) => {
            println!("{}", report_json(&report));
            0
        }
        Err(e) => {
            let doc = serde_json::json!({
                "classification": "inconclusive",
                "error": e.to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            2
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> u8 {
    let file = match read_framework(&args.input) {
        Ok(f) => f,
        Err(msg) => return fail(msg),
    };
    let fw = match file.to_framework() {
        Ok(fw) => fw,
        Err(e) => return fail(e),
    };
    let run_fan = matches!(args.oracle, OracleKind::Fan | OracleKind::Both);
    let run_perturb = matches!(args.oracle, OracleKind::Perturb | OracleKind::Both);
    let mut all_pass = true;

    if run_fan {
        let Some(fan) = file.fan.as_ref() else {
            return fail("input has no fan data; only --oracle perturb can check it");
        };
        let enumerated = match fan.kind {
            FanKind::Fan2d => enumerate_fan_2d(fan, fw.config()),
            FanKind::Fan3d => enumerate_fan_3d(fan, fw.config()),
            FanKind::Multifan2d | FanKind::Multifan3d => {
                return fail("enumeration covers single fans only; use --oracle perturb");
            }
        };
        let set = match enumerated {
            Ok(set) => set,
            Err(Error::TooManyFolds { folds, max }) => {
                eprintln!(
                    "fan has {folds} folds, over the enumeration cap of {max}; \
                     rerun with --oracle perturb"
                );
                return 3;
            }
            Err(e) => return fail(e),
        };
        let count_ok = set.realizations.len() == 1usize << set.f;
        let unfolded_ok = congruence_check(fw.config(), &set.realizations[0]);
        let max_ok = set.max_is_strictly_unfolded();
        if count_ok && unfolded_ok && max_ok {
            println!(
                "fan oracle: pass ({} configurations checked, neighbor distance peaks at the unfolded one)",
                set.realizations.len()
            );
        } else {
            all_pass = false;
            println!(
                "fan oracle: FAIL (count ok: {count_ok}, unfolded reproduced: {unfolded_ok}, \
                 strict max at unfolded: {max_ok})"
            );
        }
    }

    if run_perturb {
        let ambient = args.ambient.unwrap_or(file.dim);
        let results = match perturbation_flex_search(&fw, ambient, args.trials, 0.01, args.seed) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let mut converged = 0usize;
        let mut escaped = 0usize;
        for (q, residual) in &results {
            if *residual < minrig::TOL_EQ {
                converged += 1;
                if !congruence_check(fw.config(), q) {
                    escaped += 1;
                }
            }
        }
        if escaped == 0 {
            println!(
                "perturb oracle: pass ({converged}/{} trials converged in ambient dimension {ambient}, all congruent to the input)",
                results.len()
            );
        } else {
            all_pass = false;
            println!(
                "perturb oracle: FAIL ({escaped} converged realization(s) not congruent to the input)"
            );
        }
    }

    if all_pass {
        0
    } else {
        1
    }
}

fn cmd_render(args: &RenderArgs) -> u8 {
    let file = match read_framework(&args.input) {
        Ok(f) => f,
        Err(msg) => return fail(msg),
    };
    let outcome = match render_svg(&file) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    if let Err(e) = fs::write(&args.output, &outcome.svg) {
        return fail(format_args!("cannot write {}: {e}", args.output.display()));
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", args.output.display());
    if file.stress.is_none() {
        1
    } else {
        0
    }
}

fn cmd_session(args: &SessionArgs) -> u8 {
    let text = match fs::read_to_string(&args.events) {
        Ok(t) => t,
        Err(e) => return fail(format_args!("cannot read {}: {e}", args.events.display())),
    };
    let mut events = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match serde_json::from_str::<Event>(line) {
            Ok(ev) => events.push(ev),
            Err(e) => return fail(format_args!("{}:{}: {e}", args.events.display(), lineno + 1)),
        }
    }
    if events.is_empty() {
        return fail("no events to apply");
    }
    let dim = events.iter().find_map(|ev| match ev {
        Event::Add { point, .. } => Some(point.len()),
        _ => None,
    });
    let Some(dim) = dim else {
        return fail("cannot infer the dimension: the script never adds a node");
    };
    let mut session = match Session::new(dim) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let mut uncertified = 0usize;
    for ev in events {
        if let Err(e) = session.apply_event(ev) {
            return fail(format_args!("epoch {}: {e}", session.epoch() + 1));
        }
        let snap = session.current().expect("session nonempty after a committed event");
        if !snap.certified {
            uncertified += 1;
        }
    }
    let mut log = String::new();
    for entry in session.history() {
        log.push_str(&serde_json::to_string(entry).expect("history entry serializes"));
        log.push('\n');
    }
    if let Err(e) = fs::write(&args.log, log) {
        return fail(format_args!("cannot write {}: {e}", args.log.display()));
    }
    let snap = session.current().expect("session nonempty");
    println!(
        "{} epochs applied; final framework: {} nodes, {} edges; {} epoch(s) uncertified",
        session.epoch(),
        session.len(),
        snap.framework.edges().len(),
        uncertified
    );
    if uncertified == 0 {
        0
    } else {
        2
    }
}
