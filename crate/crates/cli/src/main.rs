use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use isotransport::counterexample::{counterexample_build, counterexample_report};
use isotransport::graph::{generate_family, Family, FiniteGraph, VertexSubset};
use isotransport::isoperimetry::{
    classify_profile, geometry, geometry_bound_checks, optimal_sets, profile_exact, radial_check, ratio_f64, subadditivity_violations,
    volume_growth, volume_growth_finite,
};
use isotransport::lazy::{lamplighter_window, materialize_set, LampLabel, Lamplighter, Lattice, LazyCycle, DEFAULT_VERTEX_BUDGET};
use isotransport::spectral::{cheeger_exact, cheeger_heuristic, kappa_p_estimate, lambda2_exact, lambda_p_estimate, verify_chain, ChainSettings, OptimizerSettings};
use isotransport::subsets::EXHAUSTIVE_THRESHOLD;
use isotransport::suite::run_suite;
use isotransport::transport::{eps0_r0, folner_pair, folner_radius, harmonic_difference_pipeline, with_growing_margin, PipelineMode};
use isotransport::walks::{fit_gamma, lamplighter_return, return_probability, ReturnSeries};
use isotransport::Error;

const THREADS_ENV: &str = "ISOTRANSPORT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "isotransport", version, about = "Isoperimetry, spectral constants and transport patterns on graphs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Exponents, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long = "budget-vertices", global = true, default_value_t = DEFAULT_VERTEX_BUDGET)]
    budget_vertices: usize,
    /// Solver / truncation tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Radial,
    Folner,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum Cmd {
    /// Generate a graph from a family descriptor such as `cycle:12` or `random-regular:n=10,d=3,seed=7`.
    Gen { spec: String },
    /// λ₂, κ₁, κ_p and λ_p of a regular graph.
    Constants { spec: String },
    /// Check the comparison chain between the spectral constants.
    VerifyChain { spec: String },
    /// Isoperimetric profile by exhaustive or connected-set enumeration.
    Profile {
        spec: String,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
    },
    /// Inradius, diameter and volume-growth bounds of a vertex set.
    Geometry {
        spec: String,
        /// Members of the set (default: the Cheeger witness, or `F_n` for lamplighter windows).
        #[arg(long, value_delimiter = ',')]
        set: Vec<usize>,
        #[arg(long = "K", default_value_t = 1.0)]
        k_const: f64,
        #[arg(long = "k", default_value_t = 1.0)]
        k: f64,
    },
    /// Build the perforated lamplighter set `F_{n;j}` and report its counts.
    Counterexample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        j: usize,
        #[arg(long = "K", default_value_t = 1.0)]
        k_const: f64,
        #[arg(long = "k", default_value_t = 1.0)]
        k: f64,
    },
    /// Transport pattern for `P^r(δ_w - δ_v)` on the lamplighter set `F_n`.
    Transport {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Radial)]
        mode: Mode,
    },
    /// Escape radii, ε₀ and r₀ of the lamplighter set `F_n`.
    Folner {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.25, 0.5, 0.75])]
        eps: Vec<f64>,
    },
    /// Return probabilities on `lamplighter`, `cycle:N` or `lattice:D`, with an optional decay fit.
    Walk {
        graph: String,
        #[arg(long = "k-max", default_value_t = 200)]
        k_max: usize,
        /// Fit range `k_min,k_max`.
        #[arg(long, value_delimiter = ',')]
        fit: Vec<usize>,
    },
    /// Run the verification battery.
    Suite {
        /// Only graphs with at most 10 vertices and small instances.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Serialize)]
struct RunConfig {
    subcommand: Cmd,
    p: Vec<f64>,
    seed: u64,
    threads: usize,
    budget_vertices: usize,
    tol: Option<f64>,
    out: Option<PathBuf>,
    format: Format,
}

struct Outcome {
    report: Value,
    csv: Option<String>,
    pass: bool,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn threads(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .max(1)
}

fn family(spec: &str) -> Res<(Family, FiniteGraph)> {
    let fam: Family = spec.parse()?;
    let g = generate_family(&fam)?;
    Ok((fam, g))
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn exponents(common: &Common) -> Vec<f64> {
    if common.p.is_empty() {
        vec![2.0]
    } else {
        common.p.clone()
    }
}

fn members(s: &VertexSubset) -> Vec<usize> {
    s.members()
}

fn cmd_gen(spec: &str) -> Res<Outcome> {
    let (fam, g) = family(spec)?;
    let report = json!({
        "family": fam.to_string(),
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "regular_degree": g.regular_degree(),
        "connected": g.is_connected(),
        "edge_list": g.edges(),
    });
    Ok(Outcome { report, csv: Some(g.to_text()), pass: true })
}

fn cmd_constants(spec: &str, common: &Common) -> Res<Outcome> {
    let (fam, g) = family(spec)?;
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    let lambda2 = lambda2_exact(&g, None)?;
    let (cheeger, exact) = if g.vertex_count() <= EXHAUSTIVE_THRESHOLD { (cheeger_exact(&g)?, true) } else { (cheeger_heuristic(&g)?, false) };
    let settings = OptimizerSettings { seed: common.seed, ..OptimizerSettings::default() };
    let mut per_p = Vec::new();
    for p in exponents(common) {
        let kp = kappa_p_estimate(&g, p, &settings)?;
        let lp = lambda_p_estimate(&g, p, None, &settings)?;
        per_p.push(json!({"p": p, "kappa_p_upper": kp.value, "lambda_p": value(&lp)}));
    }
    let report = json!({
        "graph": fam.to_string(),
        "d": d,
        "lambda2": lambda2,
        "kappa1": cheeger.as_f64(),
        "kappa1_ratio": cheeger.value.to_string(),
        "kappa1_exact": exact,
        "kappa1_witness": members(&cheeger.witness),
        "exponents": per_p,
    });
    Ok(Outcome { report, csv: None, pass: true })
}

fn cmd_verify_chain(spec: &str, common: &Common) -> Res<Outcome> {
    let (fam, g) = family(spec)?;
    let mut settings = ChainSettings::default();
    settings.optimizer.seed = common.seed;
    let mut reports = Vec::new();
    let mut pass = true;
    for p in exponents(common) {
        let r = verify_chain(&g, &fam.to_string(), p, &settings)?;
        pass &= r.chain_passes();
        reports.push(value(&r));
    }
    Ok(Outcome { report: json!({ "reports": reports, "pass": pass }), csv: None, pass })
}

fn cmd_profile(spec: &str, max_size: usize) -> Res<Outcome> {
    let (fam, g) = family(spec)?;
    let prof = profile_exact(&g, max_size)?;
    let down = prof.ratio_down();
    let samples: Vec<(f64, f64)> = prof.sizes.iter().zip(&down).map(|(&x, &r)| (x as f64, ratio_f64(r))).collect();
    let class = classify_profile(&samples).ok();
    let optimal: Vec<Value> = optimal_sets(&prof)
        .iter()
        .map(|o| json!({"size": o.size, "witness": members(&o.witness), "next_within_double": o.next_within_double}))
        .collect();
    let rows: Vec<Value> = (0..prof.sizes.len())
        .map(|i| {
            json!({
                "x": prof.sizes[i],
                "F": prof.boundary[i],
                "G": prof.ratio(i).to_string(),
                "Gdown": down[i].to_string(),
                "exact": prof.exact[i],
                "witness": members(&prof.witnesses[i]),
            })
        })
        .collect();
    let report = json!({
        "graph": fam.to_string(),
        "profile": rows,
        "optimal_sets": optimal,
        "subadditivity_violations": subadditivity_violations(&prof),
        "classification": class.map(|c| value(&c)),
    });
    Ok(Outcome { report, csv: Some(prof.to_csv()), pass: true })
}

fn cmd_geometry(spec: &str, set: &[usize], k_const: f64, k: f64, budget: usize) -> Res<Outcome> {
    let fam: Family = spec.parse()?;
    let (host, core, chosen, volume) = match fam {
        Family::LamplighterWindow(n) => {
            let w = lamplighter_window(n, budget)?;
            let chosen = if set.is_empty() { w.core.clone() } else { VertexSubset::from_members(w.graph.vertex_count(), set.iter().copied())? };
            let vol = volume_growth(&Lamplighter, &[LampLabel::identity()], n + 4, budget)?;
            (w.graph, w.core, chosen, vol)
        }
        _ => {
            let g = generate_family(&fam)?;
            let chosen = if set.is_empty() {
                if g.vertex_count() <= EXHAUSTIVE_THRESHOLD { cheeger_exact(&g)?.witness } else { cheeger_heuristic(&g)?.witness }
            } else {
                VertexSubset::from_members(g.vertex_count(), set.iter().copied())?
            };
            let full = VertexSubset::full(g.vertex_count());
            let vol = volume_growth_finite(&g, g.vertex_count());
            (g, full, chosen, vol)
        }
    };
    let rep = geometry(&host, &core, &chosen)?;
    let (induced, _) = isotransport::graph::induced_subgraph(&host, &chosen)?;
    let checks = geometry_bound_checks(&rep, Some(&volume), Some(&induced))?;
    let radial = radial_check(&host, &chosen, k_const, k)?;
    let pass = checks.iter().all(|c| c.pass);
    let report = json!({
        "graph": fam.to_string(),
        "set": members(&chosen),
        "geometry": value(&rep),
        "bound_checks": value(&checks),
        "radial": value(&radial),
        "pass": pass,
    });
    Ok(Outcome { report, csv: None, pass })
}

fn cmd_counterexample(n: usize, j: usize, k_const: f64, k: f64, budget: usize) -> Res<Outcome> {
    let c = counterexample_build(n, j, budget)?;
    let r = counterexample_report(&c, k_const, k)?;
    let pass = r.passes();
    Ok(Outcome { report: value(&r), csv: None, pass })
}

fn pair(w: &isotransport::lazy::Window<LampLabel>, n: usize) -> Res<(usize, usize)> {
    let at = |pos: i64| w.index_of(&LampLabel { lamps: vec![], pos }).ok_or_else(|| Failure::Usage(format!("position {pos} outside the window")));
    Ok((at(n as i64 / 2)?, at(n as i64 / 2 + 1)?))
}

fn cmd_transport(n: usize, mode: Mode, common: &Common) -> Res<Outcome> {
    if n < 2 {
        return Err(Failure::Usage("transport needs n >= 2".into()));
    }
    let mut reports = Vec::new();
    let mut csv = String::new();
    let mut pass = true;
    for p in exponents(common) {
        let (rep, host) = match mode {
            Mode::Radial => {
                let w = lamplighter_window(n, common.budget_vertices)?;
                let (v, u) = pair(&w, n)?;
                (harmonic_difference_pipeline(&w.graph, &w.core, 3, v, u, p, PipelineMode::Radial, common.seed)?, w.graph)
            }
            Mode::Folner => {
                let core = lamplighter_window(n, common.budget_vertices)?;
                let core_labels: Vec<LampLabel> = core.core.iter().map(|v| core.labels[v].clone()).collect();
                let (out, _margin) = with_growing_margin(
                    |m| materialize_set(&Lamplighter, &core_labels, m, common.budget_vertices),
                    |w| {
                        let (y, x, _) = folner_pair(&w.graph, &w.core, 3)?;
                        let rep = harmonic_difference_pipeline(&w.graph, &w.core, 3, y, x, p, PipelineMode::Folner, common.seed)?;
                        Ok((rep, w.graph.clone()))
                    },
                    4,
                    64,
                )?;
                out
            }
        };
        pass &= rep.passes();
        if csv.is_empty() {
            csv = rep.pattern.to_csv(&host);
        }
        reports.push(value(&rep));
    }
    Ok(Outcome { report: json!({ "n": n, "reports": reports, "pass": pass }), csv: Some(csv), pass })
}

fn cmd_folner(n: usize, eps: &[f64], budget: usize) -> Res<Outcome> {
    let core = lamplighter_window(n, budget)?;
    let core_labels: Vec<LampLabel> = core.core.iter().map(|v| core.labels[v].clone()).collect();
    let ((record, radii), margin) = with_growing_margin(
        |m| materialize_set(&Lamplighter, &core_labels, m, budget),
        |w| {
            let rec = eps0_r0(&w.graph, &w.core, 3, 10_000)?;
            let radii = eps
                .iter()
                .map(|&e| folner_radius(&w.graph, &w.core, 3, e, 10_000))
                .collect::<isotransport::Result<Vec<_>>>()?;
            Ok((rec, radii))
        },
        4,
        256,
    )?;
    let pass = record.lemma_at_eps0 && record.r0_bound && radii.iter().flatten().all(|r| r.pass);
    let mut csv = String::from("t,max_mass\n");
    for (t, m) in record.escape.iter().enumerate() {
        csv.push_str(&format!("{t},{m:e}\n"));
    }
    let report = json!({ "n": n, "margin": margin, "record": value(&record), "radii": value(&radii), "pass": pass });
    Ok(Outcome { report, csv: Some(csv), pass })
}

fn cmd_walk(graph: &str, k_max: usize, fit: &[usize], common: &Common) -> Res<Outcome> {
    let (name, arg) = graph.split_once(':').unwrap_or((graph, ""));
    let int = |a: &str| a.parse::<usize>().map_err(|_| Failure::Usage(format!("bad walk graph `{graph}`")));
    let series: ReturnSeries = match name {
        "lamplighter" => lamplighter_return(k_max, common.tol.unwrap_or(1e-6)),
        "cycle" => return_probability(&LazyCycle(int(arg)?), &0, k_max, common.budget_vertices)?,
        "lattice" => {
            let d = int(arg)?;
            return_probability(&Lattice(d), &vec![0; d], k_max, common.budget_vertices)?
        }
        _ => return Err(Failure::Usage(format!("unknown walk graph `{graph}`; use lamplighter, cycle:N or lattice:D"))),
    };
    let fit = match fit {
        [] => None,
        [a, b] => Some(fit_gamma(&series.rho, *a, *b, series.bipartite)?),
        _ => return Err(Failure::Usage("--fit takes k_min,k_max".into())),
    };
    let csv = series.to_csv();
    let report = json!({ "graph": graph, "series": value(&series), "fit": fit.map(|f| value(&f)) });
    Ok(Outcome { report, csv: Some(csv), pass: true })
}

fn cmd_suite(quick: bool, common: &Common) -> Res<Outcome> {
    let r = run_suite(quick, common.seed, |c| eprintln!("{}", c.line()))?;
    let pass = r.passes();
    Ok(Outcome { report: value(&r), csv: None, pass })
}

fn run(cli: &Cli) -> Res<Outcome> {
    let c = &cli.common;
    match &cli.cmd {
        Cmd::Gen { spec } => cmd_gen(spec),
        Cmd::Constants { spec } => cmd_constants(spec, c),
        Cmd::VerifyChain { spec } => cmd_verify_chain(spec, c),
        Cmd::Profile { spec, max_size } => cmd_profile(spec, *max_size),
        Cmd::Geometry { spec, set, k_const, k } => cmd_geometry(spec, set, *k_const, *k, c.budget_vertices),
        Cmd::Counterexample { n, j, k_const, k } => cmd_counterexample(*n, *j, *k_const, *k, c.budget_vertices),
        Cmd::Transport { n, mode } => cmd_transport(*n, *mode, c),
        Cmd::Folner { n, eps } => cmd_folner(*n, eps, c.budget_vertices),
        Cmd::Walk { graph, k_max, fit } => cmd_walk(graph, *k_max, fit, c),
        Cmd::Suite { quick } => cmd_suite(*quick, c),
    }
}

fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message }, "version": env!("CARGO_PKG_VERSION") }).to_string()
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Budget { .. } | Error::TooLarge { .. } => "resource",
        Error::NoConvergence { .. } => "convergence",
        Error::Verification(_) => "verification",
        _ => "usage",
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            let mut lock = std::io::stdout().lock();
            match writeln!(lock, "{}", text.trim_end()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", error_json("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            eprintln!("{}", error_json("usage", &m));
            return ExitCode::from(2);
        }
        Err(Failure::Run(e)) => {
            eprintln!("{}", error_json(error_kind(&e), &e.to_string()));
            return ExitCode::from(2);
        }
    };
    let text = match cli.common.format {
        Format::Json => {
            let config = RunConfig {
                subcommand: cli.cmd.clone(),
                p: exponents(&cli.common),
                seed: cli.common.seed,
                threads: threads(cli.common.threads),
                budget_vertices: cli.common.budget_vertices,
                tol: cli.common.tol,
                out: cli.common.out.clone(),
                format: cli.common.format,
            };
            let doc = json!({ "version": env!("CARGO_PKG_VERSION"), "config": config, "pass": outcome.pass, "report": outcome.report });
            serde_json::to_string_pretty(&doc).expect("json")
        }
        Format::Csv => match outcome.csv {
            Some(csv) => csv,
            None => {
                eprintln!("{}", error_json("usage", "this subcommand has no CSV output; use --format json"));
                return ExitCode::from(2);
            }
        },
    };
    if let Err(e) = emit(&text, cli.common.out.as_ref()) {
        eprintln!("{}", error_json("io", &e.to_string()));
        return ExitCode::from(2);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
