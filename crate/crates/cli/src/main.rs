//! `layoutcn`: derive candidate layouts, solve the layout network, and compare
//! schemes on a program description.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use layoutcn::cache::CacheConfig;
use layoutcn::locality::{self, LocalityReport};
use layoutcn::network::{build_from_derivations, derive_all, ConstraintNetwork};
use layoutcn::solver::{SolveReport, StatsDoc, ValueOrder, VarOrder};
use layoutcn::{heuristic_solve, parse_program, solve, Assignment, Program, SolveOutcome, SolverConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_UNSAT: u8 = 3;

#[derive(Parser)]
#[command(name = "layoutcn", version, about = "Program-wide array layout selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show the preferred layouts of every (nest, innermost loop) pair.
    Derive {
        program: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Solve the layout network of a program (or a network given directly).
    Solve {
        #[arg(required_unless_present = "network", conflicts_with = "network")]
        program: Option<PathBuf>,
        /// Read a serialized constraint network instead of a program.
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Scheme::Enhanced)]
        scheme: Scheme,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_backjump: bool,
        #[arg(long)]
        no_var_order: bool,
        #[arg(long)]
        no_val_order: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the original, heuristic, base and enhanced schemes side by side.
    Compare {
        program: PathBuf,
        /// L1 geometry as size,assoc,line.
        #[arg(long, default_value = "8192,2,32")]
        cache: String,
        /// Optional L2 geometry as size,assoc,line.
        #[arg(long)]
        l2: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Score one assignment: locality score and cache misses.
    Eval {
        program: PathBuf,
        /// Assignment JSON (a solver result or a bare array→layout map);
        /// defaults to all row-major.
        #[arg(long)]
        assignment: Option<PathBuf>,
        /// Innermost loop per nest, e.g. `n1=i1,n2=j`.
        #[arg(long)]
        innermost: Option<String>,
        #[arg(long, default_value = "8192,2,32")]
        cache: String,
        #[arg(long)]
        l2: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    Base,
    Enhanced,
    Heuristic,
}

impl Scheme {
    fn name(self) -> &'static str {
        match self {
            Scheme::Base => "base",
            Scheme::Enhanced => "enhanced",
            Scheme::Heuristic => "heuristic",
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse_program(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cache_levels(l1: &str, l2: Option<&str>) -> Result<Vec<CacheConfig>, Failure> {
    let mut levels = vec![l1.parse::<CacheConfig>().map_err(|e| usage(format!("--cache: {e}")))?];
    if let Some(l2) = l2 {
        levels.push(l2.parse().map_err(|e| usage(format!("--l2: {e}")))?);
    }
    Ok(levels)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Off)
        .parse_env(env_logger::Env::new().filter("LAYOUTCN_LOG"))
        .init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("layoutcn: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(String, u8), Failure> {
    match command {
        Command::Derive { program, json } => cmd_derive(&load_program(&program)?, json).map(|s| (s, 0)),
        Command::Solve {
            program,
            network,
            scheme,
            seed,
            no_backjump,
            no_var_order,
            no_val_order,
            json,
        } => {
            if scheme != Scheme::Enhanced && (no_backjump || no_var_order || no_val_order) {
                return Err(usage("--no-backjump, --no-var-order and --no-val-order require --scheme enhanced"));
            }
            let mut config = match scheme {
                Scheme::Base => SolverConfig::base(seed),
                _ => SolverConfig::enhanced(seed),
            };
            if no_backjump {
                config.backjump = false;
            }
            if no_var_order {
                config.var_order = VarOrder::Random;
            }
            if no_val_order {
                config.val_order = ValueOrder::Random;
            }
            let input = match (&program, &network) {
                (Some(p), _) => Input::Program(load_program(p)?),
                (None, Some(n)) => Input::Network(load_network(n)?),
                (None, None) => unreachable!("clap requires one input"),
            };
            cmd_solve(input, scheme, &config, json)
        }
        Command::Compare {
            program,
            cache,
            l2,
            seed,
            json,
        } => {
            let levels = cache_levels(&cache, l2.as_deref())?;
            cmd_compare(&load_program(&program)?, &levels, seed, json).map(|s| (s, 0))
        }
        Command::Eval {
            program,
            assignment,
            innermost,
            cache,
            l2,
            json,
        } => {
            let levels = cache_levels(&cache, l2.as_deref())?;
            let program = load_program(&program)?;
            let assignment = assignment.map(|p| load_assignment(&p)).transpose()?;
            cmd_eval(&program, assignment, innermost.as_deref(), &levels, json).map(|s| (s, 0))
        }
    }
}

enum Input {
    Program(Program),
    Network(ConstraintNetwork),
}

fn load_network(path: &Path) -> Result<ConstraintNetwork, Failure> {
    let (net, pruned) =
        ConstraintNetwork::from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    for p in pruned {
        log::warn!(
            "dropped allowed pair ({}, {}) on {}–{}: value outside its domain",
            p.values.0,
            p.values.1,
            p.pair.0,
            p.pair.1
        );
    }
    Ok(net)
}

fn load_assignment(path: &Path) -> Result<Assignment, Failure> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let inner = value.get("assignment").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_derive(program: &Program, json: bool) -> Result<String, Failure> {
    let derivations = derive_all(program);
    if json {
        return Ok(to_json(&derivations) + "\n");
    }
    let mut out = String::new();
    writeln!(out, "{:<12} {:<10} {:<10} layout", "nest", "innermost", "array").unwrap();
    for d in &derivations {
        for al in &d.layouts {
            let layout = al.layout.as_ref().map_or_else(|| "none".to_string(), |l| l.to_string());
            writeln!(out, "{:<12} {:<10} {:<10} {}", d.nest, d.innermost, al.array, layout).unwrap();
        }
        for dr in &d.dropped {
            writeln!(
                out,
                "{:<12} {:<10} {:<10} dropped reference #{}",
                d.nest, d.innermost, dr.array, dr.reference
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn render_report(report: &SolveReport) -> String {
    let mut out = String::new();
    writeln!(out, "status: {}", report.status).unwrap();
    if let Some(s) = &report.scheme {
        writeln!(out, "scheme: {s}").unwrap();
    }
    for (array, layout) in report.assignment.iter() {
        writeln!(out, "  {array:<10} {layout}").unwrap();
    }
    let s = &report.stats;
    writeln!(
        out,
        "stats: nodes={} backtracks={} backjumps={} max_depth={} elapsed_ms={}",
        s.nodes, s.backtracks, s.backjumps, s.max_depth, s.elapsed_ms
    )
    .unwrap();
    out
}

fn cmd_solve(input: Input, scheme: Scheme, config: &SolverConfig, json: bool) -> Result<(String, u8), Failure> {
    let report = match (scheme, input) {
        (Scheme::Heuristic, Input::Network(_)) => {
            return Err(usage("--scheme heuristic needs a program, not a network"));
        }
        (Scheme::Heuristic, Input::Program(p)) => {
            let start = std::time::Instant::now();
            let h = heuristic_solve(&p);
            SolveReport {
                scheme: Some("heuristic".into()),
                status: "sat".into(),
                assignment: h.assignment,
                stats: StatsDoc {
                    nodes: 0,
                    backtracks: 0,
                    backjumps: 0,
                    max_depth: 0,
                    elapsed_ms: start.elapsed().as_millis() as u64,
                },
                deepest_partial: None,
            }
        }
        (_, input) => {
            let net = match input {
                Input::Program(p) => layoutcn::build_network(&p),
                Input::Network(n) => n,
            };
            let outcome = solve(&net, config);
            log::info!("{} search: {:?}", scheme.name(), outcome.stats());
            SolveReport::from_outcome(Some(scheme.name()), &outcome)
        }
    };
    let code = if report.status == "sat" { 0 } else { EXIT_UNSAT };
    let out = if json {
        to_json(&report) + "\n"
    } else {
        render_report(&report)
    };
    Ok((out, code))
}

/// One line of a scheme comparison.
#[derive(Debug, Serialize)]
struct RunRow {
    scheme: String,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<StatsDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assignment: Option<Assignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    locality: Option<LocalityReport>,
}

#[derive(Debug, Serialize)]
struct RunReport {
    cache: Vec<String>,
    rows: Vec<RunRow>,
}

fn cmd_compare(program: &Program, levels: &[CacheConfig], seed: u64, json: bool) -> Result<String, Failure> {
    let derivations = derive_all(program);
    let net = build_from_derivations(program, &derivations);
    let eval = |a: &Assignment, inner: &[usize]| {
        locality::evaluate(program, a, inner, levels).map_err(|e| usage(format!("evaluation failed: {e}")))
    };
    let mut rows = Vec::new();

    let original = locality::row_major_assignment(program);
    rows.push(RunRow {
        scheme: "original".into(),
        status: "n/a".into(),
        stats: None,
        locality: Some(eval(&original, &locality::original_innermost(program))?),
        assignment: Some(original),
    });

    let start = std::time::Instant::now();
    let h = heuristic_solve(program);
    let elapsed_ms = start.elapsed().as_millis() as u64;
    rows.push(RunRow {
        scheme: "heuristic".into(),
        status: "sat".into(),
        stats: Some(StatsDoc {
            nodes: 0,
            backtracks: 0,
            backjumps: 0,
            max_depth: 0,
            elapsed_ms,
        }),
        locality: Some(eval(&h.assignment, &h.innermost)?),
        assignment: Some(h.assignment),
    });

    for (name, config) in [("base", SolverConfig::base(seed)), ("enhanced", SolverConfig::enhanced(seed))] {
        let outcome = solve(&net, &config);
        let stats = Some(StatsDoc::from(outcome.stats()));
        match outcome {
            SolveOutcome::Solution { assignment, .. } => {
                let inner = locality::provenance_innermost(program, &derivations, &assignment);
                rows.push(RunRow {
                    scheme: name.into(),
                    status: "sat".into(),
                    stats,
                    locality: Some(eval(&assignment, &inner)?),
                    assignment: Some(assignment),
                });
            }
            SolveOutcome::Unsat { .. } => rows.push(RunRow {
                scheme: name.into(),
                status: "unsat".into(),
                stats,
                locality: None,
                assignment: None,
            }),
        }
    }

    let report = RunReport {
        cache: levels.iter().map(CacheConfig::to_string).collect(),
        rows,
    };
    if json {
        return Ok(to_json(&report) + "\n");
    }
    let mut out = String::new();
    writeln!(
        out,
        "{:<10} {:<7} {:>8} {:>10} {:>9} {:>8} {:>10} {:>10}",
        "scheme", "status", "nodes", "backtracks", "backjumps", "score", "L1 access", "L1 misses"
    )
    .unwrap();
    for r in &report.rows {
        let (nodes, bt, bj) = r
            .stats
            .as_ref()
            .map_or(("-".into(), "-".into(), "-".into()), |s| {
                (s.nodes.to_string(), s.backtracks.to_string(), s.backjumps.to_string())
            });
        let (score, acc, miss) = r.locality.as_ref().map_or(("-".into(), "-".into(), "-".into()), |l| {
            let l1 = l.cache.get("L1").copied().unwrap_or_default();
            (format!("{:.3}", l.score), l1.accesses.to_string(), l1.misses.to_string())
        });
        writeln!(
            out,
            "{:<10} {:<7} {:>8} {:>10} {:>9} {:>8} {:>10} {:>10}",
            r.scheme, r.status, nodes, bt, bj, score, acc, miss
        )
        .unwrap();
    }
    Ok(out)
}

fn parse_innermost(program: &Program, spec: &str) -> Result<Vec<usize>, Failure> {
    let mut chosen = locality::original_innermost(program);
    for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (nest, index) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("--innermost: `{part}` is not nest=index")))?;
        let (ni, n) = program
            .nests
            .iter()
            .enumerate()
            .find(|(_, n)| n.name == nest.trim())
            .ok_or_else(|| usage(format!("--innermost: unknown nest `{nest}`")))?;
        chosen[ni] = n
            .loop_position(index.trim())
            .ok_or_else(|| usage(format!("--innermost: nest `{nest}` has no loop `{index}`")))?;
    }
    Ok(chosen)
}

fn cmd_eval(
    program: &Program,
    assignment: Option<Assignment>,
    innermost: Option<&str>,
    levels: &[CacheConfig],
    json: bool,
) -> Result<String, Failure> {
    let (assignment, default_inner) = match assignment {
        Some(a) => {
            let inner = locality::provenance_innermost(program, &derive_all(program), &a);
            (a, inner)
        }
        None => (
            locality::row_major_assignment(program),
            locality::original_innermost(program),
        ),
    };
    let inner = match innermost {
        Some(spec) => parse_innermost(program, spec)?,
        None => default_inner,
    };
    let report = locality::evaluate(program, &assignment, &inner, levels).map_err(|e| usage(e.to_string()))?;
    if json {
        return Ok(to_json(&report) + "\n");
    }
    let mut out = String::new();
    writeln!(out, "score: {:.4}", report.score).unwrap();
    for n in &report.nests {
        let good = n.refs.iter().filter(|r| r.compatible).count();
        writeln!(out, "  {:<12} innermost {:<6} {good}/{} compatible", n.name, n.innermost, n.refs.len()).unwrap();
    }
    for (level, c) in &report.cache {
        writeln!(out, "{level}: accesses={} hits={} misses={}", c.accesses, c.hits, c.misses).unwrap();
    }
    Ok(out)
}
