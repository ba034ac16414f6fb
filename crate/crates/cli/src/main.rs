mod report;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tilepot::assembly::{enumerate_complexes, SearchBudget, DEFAULT_BUDGET};
use tilepot::bounds::{
    appended_path_lower_bound, lollipop_bound, reference_bound, tadpole_bound, Bound, BoundKind,
    ReferenceFamily,
};
use tilepot::graph::{make_complete, make_cycle, make_lollipop, make_path, make_tadpole, Multigraph};
use tilepot::pot::{format_pot, LabeledAssembly, Pot};
use tilepot::recipes::{
    counterexample_pot, lollipop_pot, lollipop_recipe, tadpole_pot, tadpole_recipe, Counterexample,
    PotRecipe,
};
use tilepot::scenario::{check_scenario_with, Outcome, Scenario, ScenarioCaps, ScenarioVerdict};
use tilepot::search::{
    min_bond_types, min_tile_types, SearchOptions, SearchResult, SearchStatus, DEFAULT_CHECK_BUDGET,
};
use tilepot::spectrum::{construction_matrix, min_usage_order, solve_spectrum, Rational};

use report::{digest, BudgetUse, RunReport, Status};

const USAGE_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tilepot", version, about = "Flexible tile pots: generate, analyze, verify, search, export")]
struct Cli {
    /// Print the JSON run report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON run report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Reserved for randomised modes; echoed into reports.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Emit a graph as JSON (default) or DOT.
    GenGraph {
        #[arg(value_enum)]
        family: GraphFamily,
        m: usize,
        /// Path length for lollipop and tadpole graphs.
        n: Option<usize>,
        #[arg(long)]
        dot: bool,
    },
    /// Emit the closed-form pot for a lollipop or tadpole target.
    GenPot {
        #[arg(value_enum)]
        family: PotFamily,
        m: usize,
        n: usize,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        scenario: u8,
    },
    /// Construction matrix, solution space and least usage order of a pot.
    Analyze {
        pot: PathBuf,
        /// Largest usage order tried.
        #[arg(long, default_value_t = 32)]
        cap: u64,
    },
    /// Check a pot against a target graph under a scenario.
    Check {
        pot: PathBuf,
        /// Graph JSON file, or `family:m[,n]` such as `tadpole:5,7`.
        graph: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        scenario: u8,
        /// Largest complex order searched for intruders.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, env = "TILEPOT_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Print the witness (or the realization) as DOT.
        #[arg(long)]
        dot: bool,
    },
    /// Generate and check every closed-form pot up to a graph order.
    VerifyTable {
        #[arg(long, value_enum)]
        family: TableFamily,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        scenario: u8,
        #[arg(long)]
        max_order: usize,
        /// Per grid point.
        #[arg(long, env = "TILEPOT_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Known bounds on the least bond-type and tile-type counts.
    Bounds {
        #[arg(value_enum)]
        family: BoundFamily,
        m: u64,
        n: Option<u64>,
        /// Restrict to one scenario.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        scenario: Option<u8>,
    },
    /// Exhaustive search for the least number of bond or tile types.
    SearchMin {
        /// Graph JSON file, or `family:m[,n]`.
        graph: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        scenario: u8,
        #[arg(long, value_enum, default_value_t = Kind::Both)]
        kind: Kind,
        /// Largest type count tried; defaults to the edge count (bonds) or vertex count (tiles).
        #[arg(long)]
        max_types: Option<usize>,
        /// Labelling nodes over the whole search.
        #[arg(long, env = "TILEPOT_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Growth nodes per candidate check.
        #[arg(long, default_value_t = DEFAULT_CHECK_BUDGET)]
        check_budget: u64,
    },
    /// List the connected complete complexes of a pot up to an order.
    #[command(alias = "export")]
    Enumerate {
        pot: PathBuf,
        #[arg(long)]
        max_order: usize,
        #[arg(long, env = "TILEPOT_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Print one DOT digraph per complex.
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GraphFamily {
    Path,
    Complete,
    Cycle,
    Lollipop,
    Tadpole,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PotFamily {
    Lollipop,
    Tadpole,
    SharedBridge,
    PairedBridge,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TableFamily {
    Lollipop,
    Tadpole,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BoundFamily {
    Lollipop,
    Tadpole,
    Complete,
    Cycle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    Bond,
    Tile,
    Both,
}

/// What a subcommand produced: a report plus the text printed without `--json`.
struct Run {
    report: RunReport,
    text: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.report {
                if let Err(e) = write_report(path, &out.report) {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(USAGE_ERROR);
                }
            }
            if cli.json {
                println!("{}", to_pretty(&out.report));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}

fn to_pretty(r: &RunReport) -> String {
    serde_json::to_string_pretty(r).expect("report serialises")
}

fn write_report(path: &Path, r: &RunReport) -> Result<()> {
    std::fs::write(path, to_pretty(r) + "\n").with_context(|| format!("writing {}", path.display()))
}

fn run(cli: &Cli) -> Result<Run> {
    let start = Instant::now();
    let mut out = match &cli.cmd {
        Cmd::GenGraph { family, m, n, dot } => gen_graph(*family, *m, *n, *dot),
        Cmd::GenPot {
            family,
            m,
            n,
            scenario,
        } => gen_pot(*family, *m, *n, scenario_of(*scenario)?),
        Cmd::Analyze { pot, cap } => analyze(pot, *cap),
        Cmd::Check {
            pot,
            graph,
            scenario,
            cap,
            budget,
            dot,
        } => check(pot, graph, scenario_of(*scenario)?, *cap, *budget, *dot),
        Cmd::VerifyTable {
            family,
            scenario,
            max_order,
            budget,
        } => verify_table(*family, scenario_of(*scenario)?, *max_order, *budget),
        Cmd::Bounds {
            family,
            m,
            n,
            scenario,
        } => bounds(*family, *m, *n, scenario.map(scenario_of).transpose()?),
        Cmd::SearchMin {
            graph,
            scenario,
            kind,
            max_types,
            budget,
            check_budget,
        } => search_min(graph, scenario_of(*scenario)?, *kind, *max_types, *budget, *check_budget),
        Cmd::Enumerate {
            pot,
            max_order,
            budget,
            dot,
        } => enumerate(pot, *max_order, *budget, *dot),
    }?;
    if let Some(seed) = cli.seed {
        out.report.params["seed"] = json!(seed);
    }
    out.report.timing_ms = start.elapsed().as_millis() as u64;
    Ok(out)
}

fn scenario_of(level: u8) -> Result<Scenario> {
    Ok(Scenario::from_level(level)?)
}

fn report(command: &str, params: Value, status: Status, results: Value, budget: BudgetUse) -> RunReport {
    RunReport {
        command: command.to_string(),
        params,
        inputs: BTreeMap::new(),
        status,
        results,
        budget,
        timing_ms: 0,
    }
}

fn make_graph(family: GraphFamily, m: usize, n: Option<usize>) -> Result<Multigraph> {
    let need_n = || n.ok_or_else(|| anyhow!("{family:?} graphs need a path length n"));
    let g = match family {
        GraphFamily::Path => make_path(m),
        GraphFamily::Complete => make_complete(m),
        GraphFamily::Cycle => make_cycle(m),
        GraphFamily::Lollipop if m == 3 => {
            bail!("lollipop graphs need m >= 4; L(3, n) is the tadpole Tad(3, n), use `gen-graph tadpole 3 <n>`")
        }
        GraphFamily::Lollipop => make_lollipop(m, need_n()?),
        GraphFamily::Tadpole => make_tadpole(m, need_n()?),
    };
    Ok(g?)
}

fn gen_graph(family: GraphFamily, m: usize, n: Option<usize>, dot: bool) -> Result<Run> {
    let g = make_graph(family, m, n)?;
    let text = if dot {
        g.to_dot()
    } else {
        serde_json::to_string_pretty(&g)? + "\n"
    };
    let results = json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "graph": g,
    });
    let params = json!({ "family": family, "m": m, "n": n, "dot": dot });
    Ok(Run {
        report: report("gen-graph", params, Status::Ok, results, BudgetUse::default()),
        text,
    })
}

fn gen_pot(family: PotFamily, m: usize, n: usize, scenario: Scenario) -> Result<Run> {
    let (pot, recipe): (Pot, Option<PotRecipe>) = match family {
        PotFamily::Lollipop => (lollipop_pot(scenario, m, n)?, Some(lollipop_recipe(scenario, m, n)?)),
        PotFamily::Tadpole => (tadpole_pot(scenario, m, n)?, Some(tadpole_recipe(scenario, m, n)?)),
        PotFamily::SharedBridge => (counterexample_pot(Counterexample::SharedBridge, m, n)?, None),
        PotFamily::PairedBridge => (counterexample_pot(Counterexample::PairedBridge, m, n)?, None),
    };
    let text = format_pot(&pot) + "\n";
    let results = json!({
        "pot": format_pot(&pot),
        "tiles": pot,
        "bond_types": pot.bond_count(),
        "tile_types": pot.tile_count(),
        "recipe": recipe,
    });
    let params = json!({ "family": family, "m": m, "n": n, "scenario": scenario });
    Ok(Run {
        report: report("gen-pot", params, Status::Ok, results, BudgetUse::default()),
        text,
    })
}

/// Reads the pot DSL, or pot JSON when the file ends in `.json`.
fn load_pot(path: &Path) -> Result<(Pot, String)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let pot = if path.extension().is_some_and(|e| e == "json") {
        Pot::from_json(&text)
    } else {
        Pot::parse(&text)
    }
    .with_context(|| format!("parsing pot {}", path.display()))?;
    let d = digest(format_pot(&pot).as_bytes());
    Ok((pot, d))
}

/// Reads graph JSON, or builds a graph from `family:m[,n]` when no such file exists.
fn load_graph(arg: &str) -> Result<(Multigraph, String)> {
    let path = Path::new(arg);
    let g = if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        serde_json::from_str(&text).with_context(|| format!("parsing graph {arg}"))?
    } else if let Some((fam, rest)) = arg.split_once(':') {
        let family = GraphFamily::from_str(fam, true).map_err(|e| anyhow!("graph family {fam:?}: {e}"))?;
        let nums: Vec<usize> = rest
            .split(',')
            .map(|s| s.trim().parse().with_context(|| format!("bad number {s:?} in {arg:?}")))
            .collect::<Result<_>>()?;
        match nums[..] {
            [m] => make_graph(family, m, None)?,
            [m, n] => make_graph(family, m, Some(n))?,
            _ => bail!("expected family:m or family:m,n, got {arg:?}"),
        }
    } else {
        bail!("no graph file {arg:?}");
    };
    let d = digest(serde_json::to_string(&g)?.as_bytes());
    Ok((g, d))
}

fn show_vec(v: &[Rational]) -> String {
    format!("<{}>", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn analyze(path: &Path, cap: u64) -> Result<Run> {
    let (pot, d) = load_pot(path)?;
    let matrix = construction_matrix(&pot);
    let spectrum = solve_spectrum(&matrix);
    let least = min_usage_order(&pot, cap);

    let mut text = format!("pot: {}\nconstruction matrix:\n{}", format_pot(&pot), matrix.to_text());
    match &spectrum {
        None => text.push_str("solution space: empty (no complete complex exists)\n"),
        Some(s) if s.is_unique() => {
            let _ = writeln!(text, "unique solution: {}", show_vec(&s.particular));
        }
        Some(s) => {
            let _ = writeln!(text, "solutions: {} + span of", show_vec(&s.particular));
            for b in &s.basis {
                let _ = writeln!(text, "  {}", show_vec(b));
            }
        }
    }
    match &least {
        Some((n, u)) => {
            let _ = writeln!(text, "least usage order (cap {cap}): {n} with counts {:?}", u.counts);
        }
        None => {
            let _ = writeln!(text, "least usage order (cap {cap}): none");
        }
    }

    let results = json!({
        "matrix": matrix,
        "matrix_integers": matrix.as_integers(),
        "spectrum": spectrum,
        "unique": spectrum.as_ref().map(|s| s.is_unique()),
        "dimension": spectrum.as_ref().map(|s| s.dimension()),
        "min_usage_order": least.as_ref().map(|(n, u)| json!({ "order": n, "counts": u.counts })),
    });
    let mut r = report("analyze", json!({ "cap": cap }), Status::Ok, results, BudgetUse::default());
    r.inputs.insert("pot".into(), d);
    Ok(Run { report: r, text })
}

fn outcome_status(o: Outcome) -> Status {
    match o {
        Outcome::Pass => Status::Pass,
        Outcome::Fail => Status::Fail,
        Outcome::Indeterminate => Status::Indeterminate,
    }
}

fn describe(v: &ScenarioVerdict) -> String {
    let mut s = format!("scenario {}: {:?}", v.scenario.level(), v.outcome).to_lowercase();
    if let Some(w) = &v.witness {
        let reason = serde_json::to_value(w.reason).expect("enum");
        let _ = write!(s, " ({}", reason.as_str().unwrap_or_default());
        if let Some(g) = &w.graph {
            let _ = write!(s, ", order {}", g.vertex_count());
        }
        s.push(')');
    }
    s
}

fn check(
    pot_path: &Path,
    graph: &str,
    scenario: Scenario,
    cap: Option<usize>,
    budget: u64,
    dot: bool,
) -> Result<Run> {
    let (pot, pd) = load_pot(pot_path)?;
    let (g, gd) = load_graph(graph)?;
    let caps = ScenarioCaps {
        cap,
        budget: SearchBudget::new(budget),
    };
    let v = check_scenario_with(&pot, &g, scenario, &caps);
    let status = outcome_status(v.outcome);

    let shown: Option<&LabeledAssembly> =
        v.witness.as_ref().and_then(|w| w.assembly.as_ref()).or(v.realization.as_ref());
    let text = match (dot, shown) {
        (true, Some(a)) => a.to_dot(&pot),
        _ => format!(
            "{}\nexplored {} of {} nodes\n",
            describe(&v),
            v.caps_used.explored,
            v.caps_used.budget
        ),
    };
    let used = BudgetUse::new(budget, Some(v.caps_used.explored));
    let params = json!({ "scenario": scenario, "cap": cap, "budget": budget, "dot": dot });
    let mut r = report("check", params, status, serde_json::to_value(&v)?, used);
    r.inputs.insert("pot".into(), pd);
    r.inputs.insert("graph".into(), gd);
    Ok(Run { report: r, text })
}

fn verify_table(family: TableFamily, scenario: Scenario, max_order: usize, budget: u64) -> Result<Run> {
    let m_min = match family {
        TableFamily::Lollipop => 4,
        TableFamily::Tadpole => 3,
    };
    let caps = ScenarioCaps {
        cap: None,
        budget: SearchBudget::new(budget),
    };
    let mut rows = Vec::new();
    let mut status = Status::Pass;
    let mut used = 0;
    let mut text = String::new();
    for m in m_min..max_order {
        for n in 1..=max_order - m {
            let (pot, recipe, g) = match family {
                TableFamily::Lollipop => (
                    lollipop_pot(scenario, m, n)?,
                    lollipop_recipe(scenario, m, n)?,
                    make_lollipop(m, n)?,
                ),
                TableFamily::Tadpole => (
                    tadpole_pot(scenario, m, n)?,
                    tadpole_recipe(scenario, m, n)?,
                    make_tadpole(m, n)?,
                ),
            };
            let bound = |kind| match family {
                TableFamily::Lollipop => lollipop_bound(kind, scenario, m as u64, n as u64),
                TableFamily::Tadpole => tadpole_bound(kind, scenario, m as u64, n as u64),
            };
            let (bb, tb) = (bound(BoundKind::B)?, bound(BoundKind::T)?);
            let (bonds, tiles) = (pot.bond_count() as u64, pot.tile_count() as u64);
            // A passing pot below a lower bound would refute the bound; above the
            // upper bound it is merely not optimal.
            let consistent = bonds >= bb.value.lower && tiles >= tb.value.lower;
            let attains_upper = bonds <= bb.value.upper && tiles <= tb.value.upper;
            let v = check_scenario_with(&pot, &g, scenario, &caps);
            used += v.caps_used.explored;
            let point = match (v.outcome, consistent) {
                (Outcome::Pass, false) => Status::Fail,
                (o, _) => outcome_status(o),
            };
            status = status.combine(point);
            let _ = writeln!(
                text,
                "m={m} n={n} {:<28} bonds={bonds} tiles={tiles} consistent={consistent} attains-upper={attains_upper} {}",
                recipe.citation,
                describe(&v)
            );
            rows.push(json!({
                "m": m,
                "n": n,
                "citation": recipe.citation,
                "pot": format_pot(&pot),
                "bond_types": bonds,
                "tile_types": tiles,
                "bond_bound": bb,
                "tile_bound": tb,
                "consistent": consistent,
                "attains_upper": attains_upper,
                "outcome": v.outcome,
                "witness": v.witness,
                "explored": v.caps_used.explored,
            }));
        }
    }
    let _ = writeln!(text, "overall: {}", serde_json::to_value(status)?.as_str().unwrap_or_default());
    let params = json!({
        "family": family,
        "scenario": scenario,
        "max_order": max_order,
        "budget": budget,
    });
    let results = json!({ "points": rows.len(), "rows": rows });
    Ok(Run {
        report: report("verify-table", params, status, results, BudgetUse::new(budget, Some(used))),
        text,
    })
}

fn bounds(family: BoundFamily, m: u64, n: Option<u64>, scenario: Option<Scenario>) -> Result<Run> {
    let scenarios: Vec<Scenario> = scenario.map_or(Scenario::ALL.to_vec(), |s| vec![s]);
    let need_n = || n.ok_or_else(|| anyhow!("{family:?} bounds need a path length n"));
    let mut rows = Vec::new();
    let mut text = String::new();
    for s in scenarios {
        let get = |kind| -> Result<Bound> {
            Ok(match family {
                BoundFamily::Lollipop => lollipop_bound(kind, s, m, need_n()?)?,
                BoundFamily::Tadpole => tadpole_bound(kind, s, m, need_n()?)?,
                BoundFamily::Complete => reference_bound(ReferenceFamily::Complete, kind, s, m)?,
                BoundFamily::Cycle => reference_bound(ReferenceFamily::Cycle, kind, s, m)?,
            })
        };
        let (b, t) = (get(BoundKind::B)?, get(BoundKind::T)?);
        let path_lower = match (family, n, s) {
            (BoundFamily::Lollipop | BoundFamily::Tadpole, Some(n), Scenario::Two | Scenario::Three) => Some(json!({
                "bond": appended_path_lower_bound(BoundKind::B, s, m, n)?,
                "tile": appended_path_lower_bound(BoundKind::T, s, m, n)?,
            })),
            _ => None,
        };
        let _ = writeln!(
            text,
            "scenario {}: bonds {}  tiles {}  [{}]",
            s.level(),
            show_bound(&b),
            show_bound(&t),
            b.regime
        );
        rows.push(json!({ "scenario": s, "bond": b, "tile": t, "appended_path_lower": path_lower }));
    }
    let params = json!({ "family": family, "m": m, "n": n, "scenario": scenario });
    Ok(Run {
        report: report("bounds", params, Status::Ok, json!({ "rows": rows }), BudgetUse::default()),
        text,
    })
}

fn show_bound(b: &Bound) -> String {
    match b.value.exact {
        Some(v) => v.to_string(),
        None => format!("{}..={}", b.value.lower, b.value.upper),
    }
}

fn search_status(r: &SearchResult) -> Status {
    match r.status {
        SearchStatus::Exact => Status::Pass,
        SearchStatus::Infeasible => Status::Fail,
        SearchStatus::Indeterminate => Status::Indeterminate,
    }
}

fn describe_search(name: &str, r: &SearchResult) -> String {
    let status = serde_json::to_value(r.status).expect("enum");
    let mut s = match r.minimum {
        Some(v) => format!("{name}: {v}"),
        None => format!(
            "{name}: at least {}{}",
            r.lower_bound,
            r.upper_bound.map(|u| format!(", at most {u}")).unwrap_or_default()
        ),
    };
    let _ = writeln!(
        s,
        " ({}, {} nodes, {} pots checked)",
        status.as_str().unwrap_or_default(),
        r.nodes,
        r.explored
    );
    if let Some(p) = &r.witness_pot {
        let _ = writeln!(s, "  witness: {}", format_pot(p));
    }
    s
}

fn search_min(
    graph: &str,
    scenario: Scenario,
    kind: Kind,
    max_types: Option<usize>,
    budget: u64,
    check_budget: u64,
) -> Result<Run> {
    let (g, gd) = load_graph(graph)?;
    let opts = SearchOptions {
        budget: SearchBudget::new(budget),
        check_budget: SearchBudget::new(check_budget),
    };
    let mut results = serde_json::Map::new();
    let mut status = Status::Ok;
    let mut used = 0;
    let mut text = String::new();
    if kind != Kind::Tile {
        let r = min_bond_types(&g, scenario, max_types.unwrap_or(g.edge_count()), &opts)?;
        status = status.combine(search_status(&r));
        used += r.nodes;
        text += &describe_search("bond types", &r);
        results.insert("bond".into(), serde_json::to_value(&r)?);
    }
    if kind != Kind::Bond {
        let r = min_tile_types(&g, scenario, max_types.unwrap_or(g.vertex_count()), &opts)?;
        status = status.combine(search_status(&r));
        used += r.nodes;
        text += &describe_search("tile types", &r);
        results.insert("tile".into(), serde_json::to_value(&r)?);
    }
    let params = json!({
        "scenario": scenario,
        "kind": kind,
        "max_types": max_types,
        "budget": budget,
        "check_budget": check_budget,
    });
    let mut r = report("search-min", params, status, Value::Object(results), BudgetUse::new(budget, Some(used)));
    r.inputs.insert("graph".into(), gd);
    Ok(Run { report: r, text })
}

fn enumerate(path: &Path, max_order: usize, budget: u64, dot: bool) -> Result<Run> {
    let (pot, d) = load_pot(path)?;
    let (catalog, complete, used) = match enumerate_complexes(&pot, max_order, SearchBudget::new(budget)) {
        Ok(c) => (c, true, None),
        Err(e) => (e.partial, false, Some(e.explored)),
    };
    let mut text = String::new();
    for (order, entries) in &catalog.by_order {
        for (i, e) in entries.iter().enumerate() {
            if dot {
                let _ = writeln!(text, "// order {order}, complex {i}");
                text += &e.witness.to_dot(&pot);
            } else {
                let _ = writeln!(text, "order {order}: {}", serde_json::to_string(&e.graph)?);
            }
        }
    }
    if !complete && !dot {
        let _ = writeln!(text, "budget exhausted; list is partial");
    }
    let counts: BTreeMap<String, usize> = catalog
        .by_order
        .iter()
        .map(|(n, es)| (n.to_string(), es.len()))
        .collect();
    let results = json!({ "complete": complete, "counts": counts, "complexes": catalog.to_json() });
    let status = if complete { Status::Ok } else { Status::Indeterminate };
    let params = json!({ "max_order": max_order, "budget": budget, "dot": dot });
    let mut r = report(
        "enumerate",
        params,
        status,
        results,
        BudgetUse::new(budget, used),
    );
    r.inputs.insert("pot".into(), d);
    Ok(Run { report: r, text })
}
