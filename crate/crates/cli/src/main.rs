//! Command-line frontend: build and render diagrams, verify the invariant
//! suites, check forbidden-poset properties, and run the representability
//! decision.
//!
//! Exit codes: 0 success / property holds / representable, 1 counterexample
//! or not representable, 2 usage or input error, 3 inconclusive.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lamplab_core::diagram::{enumerate_diagrams, random_diagram, replay, Diagram};
use lamplab_core::docs;
use lamplab_core::forbidden::{property_report, PropertyVerdict};
use lamplab_core::lattice::jir_con_poset;
use lamplab_core::repr::{bounds, decide, estimate_x, DecideBudget, Outcome, Target};
use lamplab_core::suite::{run_invariant_suite, run_removal_suite, verify_script, SuiteReport};

#[derive(Parser)]
#[command(name = "lamplab", version, about = "slim rectangular lattice workbench")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay a build script and emit the diagram document
    Build { script: PathBuf },
    /// Render a scripted diagram as SVG or DOT
    Render {
        script: PathBuf,
        #[arg(long, conflicts_with = "dot")]
        svg: bool,
        #[arg(long)]
        dot: bool,
        #[arg(long, default_value_t = 60.0)]
        scale: f64,
    },
    /// Run the invariant suites over a script, an exhaustive corpus, or a
    /// seeded random corpus
    Verify(VerifyArgs),
    /// Forbidden-poset property table of a poset document
    Props {
        poset: PathBuf,
        #[arg(long, default_value_t = 5)]
        nmax: u32,
    },
    /// Decide whether a poset is the join-irreducible congruence poset of a
    /// slim rectangular lattice
    Decide {
        poset: PathBuf,
        #[arg(long, default_value_t = 12)]
        budget_length: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget_nodes: u64,
        #[arg(long)]
        system_filter: bool,
    },
    /// Magnitude of the naive lattice sweep for a target with n join
    /// irreducibles
    Estimate { n: u32 },
    /// Length, size, and tube-count bounds for a target with n join
    /// irreducibles
    Bounds { n: u32 },
    /// Census of slim rectangular lattices up to a given length
    Enumerate { maxlen: usize },
    /// Join-irreducible congruence poset of a scripted diagram
    Con { script: PathBuf },
    /// Lamp and tube report of a scripted diagram
    Lamps { script: PathBuf },
}

#[derive(Args)]
struct VerifyArgs {
    /// a single script document to verify
    script: Option<PathBuf>,
    /// verify every lattice of length at most this value
    #[arg(long)]
    corpus: Option<usize>,
    /// verify COUNT seeded random scripts of length at most MAXLEN
    #[arg(long, num_args = 2, value_names = ["COUNT", "MAXLEN"])]
    random: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_diagram(path: &PathBuf) -> Result<Diagram, String> {
    let v = read_json(path)?;
    let script = docs::script_from_json(&v).map_err(|e| e.to_string())?;
    replay(&script).map_err(|e| e.to_string())
}

/// Verify accepts either a script or a full diagram document; the latter may
/// carry inconsistent data, which the suite then reports as failures.
fn load_verify_subject(path: &PathBuf) -> Result<(String, VerifySubject), String> {
    let v = read_json(path)?;
    if v.get("steps").is_some() || v.get("grid").is_some() {
        let script = docs::script_from_json(&v).map_err(|e| e.to_string())?;
        Ok((path.display().to_string(), VerifySubject::Script(script)))
    } else {
        let d = docs::diagram_from_json(&v).map_err(|e| e.to_string())?;
        Ok((path.display().to_string(), VerifySubject::Diagram(Box::new(d))))
    }
}

enum VerifySubject {
    Script(lamplab_core::diagram::BuildScript),
    Diagram(Box<Diagram>),
}

fn threads() -> usize {
    std::env::var("LAMPLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.cmd {
        Cmd::Build { script } => {
            let d = load_diagram(script)?;
            let doc = docs::diagram_to_json(&d).map_err(|e| e.to_string())?;
            if cli.format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                println!(
                    "{} elements, {} covers, length {}",
                    d.n(),
                    d.cover_pairs().len(),
                    d.length()
                );
                println!("{}", serde_json::to_string(&doc).unwrap());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Render { script, svg, dot, scale } => {
            let d = load_diagram(script)?;
            if *dot && !*svg {
                print!("{}", render_dot(&d));
            } else {
                print!("{}", render_svg(&d, *scale));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify(args) => run_verify(cli, args),
        Cmd::Props { poset, nmax } => {
            let p = docs::poset_from_json(&read_json(poset)?).map_err(|e| e.to_string())?;
            let rows = property_report(&p, *nmax, Some(200_000_000))
                .map_err(|e| e.to_string())?;
            let any_fail = rows.iter().any(|r| matches!(r.verdict, PropertyVerdict::Fails(_)));
            let any_open = rows.iter().any(|r| matches!(r.verdict, PropertyVerdict::Inconclusive));
            if cli.format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&docs::property_rows_to_json(&rows)).unwrap()
                );
            } else {
                for r in &rows {
                    let v = match &r.verdict {
                        PropertyVerdict::Holds => "holds".to_string(),
                        PropertyVerdict::HoldsTrivially => "holds-trivially (size)".to_string(),
                        PropertyVerdict::Inconclusive => "inconclusive".to_string(),
                        PropertyVerdict::Fails(_) => "fails".to_string(),
                    };
                    println!("{}_{}: {v}", r.property, r.n);
                }
            }
            Ok(if any_fail {
                ExitCode::from(1)
            } else if any_open {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Cmd::Decide { poset, budget_length, budget_nodes, system_filter } => {
            let p = docs::poset_from_json(&read_json(poset)?).map_err(|e| e.to_string())?;
            let mut budget = DecideBudget {
                max_length: *budget_length,
                node_budget: *budget_nodes,
                ..Default::default()
            };
            budget.filter_options.enable_system_filter = *system_filter;
            budget.filter_options.system_budget = 5_000_000;
            let verdict = decide(&Target::JirPoset(p), &budget).map_err(|e| e.to_string())?;
            let doc = docs::verdict_to_json(&verdict).map_err(|e| e.to_string())?;
            if cli.format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                println!("{}", serde_json::to_string(&doc).unwrap());
            }
            Ok(match verdict.outcome {
                Outcome::Representable(_) => ExitCode::SUCCESS,
                Outcome::NotRepresentable(_) => ExitCode::from(1),
                Outcome::Inconclusive(_) => ExitCode::from(3),
            })
        }
        Cmd::Estimate { n } => {
            let m = estimate_x(*n);
            if cli.format == Format::Json {
                println!(
                    "{}",
                    json!({"mantissa": m.mantissa, "exp10": m.exp10, "display": m.display_sci(3)})
                );
            } else {
                println!("{}", m.display_sci(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bounds { n } => {
            let b = bounds(*n);
            if cli.format == Format::Json {
                println!(
                    "{}",
                    json!({
                        "length_bound": b.length_bound,
                        "size_bound": b.size_bound,
                        "tubes_per_lamp": b.tubes_per_lamp,
                        "tubes_total": b.tubes_total,
                    })
                );
            } else {
                println!(
                    "length {} size {} tubes/lamp {} tubes total {}",
                    b.length_bound, b.size_bound, b.tubes_per_lamp, b.tubes_total
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Enumerate { maxlen } => {
            let census = enumerate_diagrams(*maxlen, |_| {});
            if cli.format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&census).unwrap());
            } else {
                for (len, count) in &census.counts {
                    println!("length {len}: {count}");
                }
                println!("total {}", census.total);
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Con { script } => {
            let d = load_diagram(script)?;
            let con = jir_con_poset(&d.lattice());
            let doc = docs::poset_to_json(&con, None);
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Lamps { script } => {
            let d = load_diagram(script)?;
            let doc = docs::lamp_report_to_json(&d).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn print_report(name: &str, report: &SuiteReport, fmt: Format) -> bool {
    if fmt == Format::Json {
        let checks: Vec<Value> = report
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect();
        println!("{}", json!({"diagram": name, "pass": report.pass(), "checks": checks}));
    } else if report.pass() {
        println!("{name}: pass ({} checks)", report.checks.len());
    } else {
        println!("{name}: FAIL");
        for c in report.failures() {
            println!("  {}: {}", c.name, c.detail);
        }
    }
    report.pass()
}

fn run_verify(cli: &Cli, args: &VerifyArgs) -> Result<ExitCode, String> {
    let mut all_pass = true;
    if let Some(path) = &args.script {
        let (name, subject) = load_verify_subject(path)?;
        let report = match subject {
            VerifySubject::Script(s) => verify_script(&s).map_err(|e| e.to_string())?,
            VerifySubject::Diagram(d) => {
                let mut r = run_invariant_suite(&d);
                if r.pass() {
                    r.checks.extend(run_removal_suite(&d).checks);
                }
                r
            }
        };
        all_pass &= print_report(&name, &report, cli.format);
    } else if let Some(maxlen) = args.corpus {
        let mut diagrams = Vec::new();
        enumerate_diagrams(maxlen, |d| diagrams.push(d.clone()));
        let reports = verify_many(&diagrams);
        for (i, report) in reports.iter().enumerate() {
            all_pass &= print_report(&format!("corpus[{i}]"), report, cli.format);
        }
        println!("corpus of {} diagrams", diagrams.len());
    } else if let Some(rand_args) = &args.random {
        use rand::SeedableRng;
        let (count, maxlen) = (rand_args[0], rand_args[1]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
        let diagrams: Vec<Diagram> =
            (0..count).map(|_| random_diagram(&mut rng, maxlen)).collect();
        let reports = verify_many(&diagrams);
        for (i, report) in reports.iter().enumerate() {
            all_pass &= print_report(&format!("random[{i}]"), report, cli.format);
        }
    } else {
        return Err("verify needs a script, --corpus, or --random".to_string());
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify_many(diagrams: &[Diagram]) -> Vec<SuiteReport> {
    let workers = threads().min(diagrams.len().max(1));
    if workers <= 1 {
        return diagrams
            .iter()
            .map(|d| {
                let mut r = run_invariant_suite(d);
                r.checks.extend(run_removal_suite(d).checks);
                r
            })
            .collect();
    }
    let mut out: Vec<Option<SuiteReport>> = vec![None; diagrams.len()];
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut out);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= diagrams.len() {
                    break;
                }
                let mut r = run_invariant_suite(&diagrams[i]);
                r.checks.extend(run_removal_suite(&diagrams[i]).checks);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    out.into_iter().map(|r| r.expect("worker filled every slot")).collect()
}

fn render_svg(d: &Diagram, scale: f64) -> String {
    let coords: Vec<(f64, f64)> = (0..d.n()).map(|i| docs::draw_xy(d.pt(i))).collect();
    let min_x = coords.iter().map(|c| c.0).fold(f64::MAX, f64::min);
    let max_x = coords.iter().map(|c| c.0).fold(f64::MIN, f64::max);
    let min_y = coords.iter().map(|c| c.1).fold(f64::MAX, f64::min);
    let max_y = coords.iter().map(|c| c.1).fold(f64::MIN, f64::max);
    let pad = 0.5;
    let w = (max_x - min_x + 2.0 * pad) * scale;
    let h = (max_y - min_y + 2.0 * pad) * scale;
    let tx = |x: f64| (x - min_x + pad) * scale;
    let ty = |y: f64| (y - min_y + pad) * scale;
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n"
    ));
    for &(a, b) in d.cover_pairs() {
        let (x1, y1) = coords[a];
        let (x2, y2) = coords[b];
        let precip = lamplab_core::geom::edge_slope(d.pt(a), d.pt(b))
            == lamplab_core::geom::EdgeSlope::Precipitous;
        let style = if precip {
            "stroke=\"#c0392b\" stroke-width=\"3\""
        } else {
            "stroke=\"#2c3e50\" stroke-width=\"1.5\""
        };
        s.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" {style}/>\n",
            tx(x1),
            ty(y1),
            tx(x2),
            ty(y2)
        ));
    }
    for (i, &(x, y)) in coords.iter().enumerate() {
        let mir = d.upper_covers(i).len() == 1;
        let fill = if mir { "#000000" } else { "#ffffff" };
        s.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{fill}\" stroke=\"#000\"/>\n",
            tx(x),
            ty(y)
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn render_dot(d: &Diagram) -> String {
    let mut s = String::from("digraph diagram {\n  rankdir=BT;\n  node [shape=point];\n");
    for &(a, b) in d.cover_pairs() {
        let precip = lamplab_core::geom::edge_slope(d.pt(a), d.pt(b))
            == lamplab_core::geom::EdgeSlope::Precipitous;
        if precip {
            s.push_str(&format!("  e{a} -> e{b} [color=red, penwidth=2];\n"));
        } else {
            s.push_str(&format!("  e{a} -> e{b};\n"));
        }
    }
    s.push_str("}\n");
    s
}
