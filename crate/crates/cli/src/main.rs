//! `walras` — exact analysis of item pricing and stable outcomes in
//! combinatorial markets, as a thin JSON front end over `walras-core`.
//!
//! Exit codes: 0 success, 1 negative verdict (not stable / infeasible /
//! failed check), 2 malformed input, 3 size cap exceeded. Reports carry
//! every number as an exact `"p/q"` string; identical invocations produce
//! byte-identical output unless `--timing` is requested.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use walras_cli::document::{
    allocation_from_document, market_from_document, market_to_document, outcome_from_document,
    outcome_to_document, AllocationDocument, MarketDocument, OutcomeDocument,
};
use walras_core::algorithms::{budget_additive_approx, single_minded_greedy, ApproxCase};
use walras_core::instances::{generator_by_name, generators, GeneratorParams};
use walras_core::lp::strategy::{solver_by_name, LpSolverStrategy};
use walras_core::lp::integral_opt;
use walras_core::scenarios::{
    budget_additive_scenario, single_minded_scenario, submodular_scenario, xos_scenario,
    ScenarioReport,
};
use walras_core::stability::{
    best_stable_outcome_with, extract_stable_outcome_with, prices_for_allocation,
    stable_exists_on_with, verify_stable, PricingOutcome,
};
use walras_core::{Caps, ItemSet, Market, Rational};

#[derive(Parser)]
#[command(
    name = "walras",
    version,
    about = "Exact stable-price analysis for combinatorial markets"
)]
struct Cli {
    /// Add display-only decimal columns (suffix `_approx`) next to exact values.
    #[arg(long, global = true)]
    approx: bool,
    /// Include wall-clock timing in the report. Off by default so repeated
    /// invocations stay byte-identical.
    #[arg(long, global = true)]
    timing: bool,
    /// Override the enumeration caps, in bits of ground-set size.
    #[arg(long, global = true)]
    cap: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fractional and integral optima over a restriction, with their ratio.
    Gap {
        #[arg(long)]
        market: PathBuf,
        /// Restriction: comma-separated indices, `0b`/`0x` mask, `full`, or `none`.
        #[arg(long)]
        items: Option<String>,
        #[arg(long, default_value = "auto")]
        solver: String,
    },
    /// Whether any stable outcome sells within the restriction.
    StableExists {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        items: Option<String>,
        #[arg(long, default_value = "auto")]
        solver: String,
    },
    /// Build a stable outcome over the restriction, if one exists there.
    Extract {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        items: Option<String>,
        #[arg(long, default_value = "auto")]
        solver: String,
    },
    /// Check a proposed outcome file for stability.
    Verify {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        outcome: PathBuf,
    },
    /// The maximum-welfare stable outcome and what stability costs.
    BestStable {
        #[arg(long)]
        market: PathBuf,
        #[arg(long, default_value = "auto")]
        solver: String,
    },
    /// Supporting prices for a fixed allocation, if any exist.
    PricesFor {
        #[arg(long)]
        market: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
    },
    /// Stable 4-approximation for two budget-additive buyers.
    ApproxBa {
        #[arg(long)]
        market: PathBuf,
    },
    /// Greedy covering-price outcome for single-minded markets.
    GreedySm {
        #[arg(long)]
        market: PathBuf,
    },
    /// Emit a named instance family as a market document.
    Gen {
        /// Family name; see `gen list`.
        family: String,
        /// Family size knob: items for `xos`/`random`, bucket count for
        /// `submodular`, grid side for `single-minded`.
        #[arg(long)]
        size: Option<u32>,
        #[arg(long)]
        buyers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Unit-demand discount for `xos`, as an exact rational.
        #[arg(long)]
        delta: Option<String>,
        /// Perturbation weight for `submodular`, as an exact rational.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Re-run a scripted analysis and report each check.
    Reproduce {
        /// One of `xos`, `submodular`, `single-minded`, `budget-additive`.
        scenario: String,
        /// Grid side for `single-minded`.
        #[arg(long)]
        n: Option<u32>,
        /// Instance count for `budget-additive`.
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum CliError {
    Input(String),
    Cap(String),
}

impl From<walras_core::Error> for CliError {
    fn from(e: walras_core::Error) -> Self {
        match e {
            walras_core::Error::CapExceeded(msg) => CliError::Cap(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

enum Rendered {
    Report { command: &'static str, params: Value, results: Value, positive: bool },
    Market(MarketDocument),
}

/// Prints a finished document, shrugging off a reader that hung up early —
/// `walras ... | head` must not look like a crash.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match dispatch(&cli) {
        Ok(Rendered::Market(doc)) => {
            emit(&serde_json::to_string_pretty(&doc).expect("serializable document"));
            ExitCode::SUCCESS
        }
        Ok(Rendered::Report { command, params, results, positive }) => {
            let mut report = json!({
                "command": command,
                "exact": true,
                "params": params,
                "results": results,
            });
            if cli.timing {
                report["timing_ms"] = json!(started.elapsed().as_millis() as u64);
            }
            if cli.approx {
                decorate(&mut report);
            }
            emit(&serde_json::to_string_pretty(&report).expect("serializable report"));
            if positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Cap(msg)) => {
            eprintln!("error: cap exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}

fn caps_for(cli: &Cli) -> Caps {
    match cli.cap {
        None => Caps::default(),
        Some(bits) => {
            Caps { demand_bits: bits, sweep_bits: bits, build_bits: bits, ..Caps::default() }
        }
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_market(path: &Path) -> Result<Market, CliError> {
    let doc: MarketDocument = load_json(path)?;
    Ok(market_from_document(&doc)?)
}

/// `full`, `none`, a `0b`/`0x` bitmask, or comma-separated item indices.
fn parse_items(m: u32, spec: Option<&str>) -> Result<ItemSet, CliError> {
    let Some(spec) = spec else { return Ok(ItemSet::full(m)) };
    match spec {
        "full" => Ok(ItemSet::full(m)),
        "none" => Ok(ItemSet::empty(m)),
        s => {
            let mask = |digits: &str, radix| {
                u64::from_str_radix(digits, radix)
                    .map_err(|e| CliError::Input(format!("item mask {s:?}: {e}")))
            };
            if let Some(digits) = s.strip_prefix("0b") {
                return Ok(ItemSet::from_bits(m, mask(digits, 2)?)?);
            }
            if let Some(digits) = s.strip_prefix("0x") {
                return Ok(ItemSet::from_bits(m, mask(digits, 16)?)?);
            }
            let indices = s
                .split(',')
                .map(|part| {
                    part.trim()
                        .parse::<usize>()
                        .map_err(|e| CliError::Input(format!("item index {part:?}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ItemSet::from_indices(m, &indices)?)
        }
    }
}

fn pick_solver(name: &str) -> Result<Box<dyn LpSolverStrategy>, CliError> {
    solver_by_name(name)
        .ok_or_else(|| CliError::Input(format!("unknown solver {name:?} (auto, exact, colgen)")))
}

fn index_list(s: ItemSet) -> Value {
    Value::from(s.indices().into_iter().map(|j| j as u64).collect::<Vec<u64>>())
}

fn rational_str(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn rational_strs(rs: &[Rational]) -> Value {
    Value::from(rs.iter().map(Rational::to_string).collect::<Vec<_>>())
}

fn outcome_value(outcome: &walras_core::stability::Outcome) -> Value {
    serde_json::to_value(outcome_to_document(outcome)).expect("serializable outcome")
}

fn items_echo(spec: &Option<String>) -> Value {
    match spec {
        None => Value::String("full".into()),
        Some(s) => Value::String(s.clone()),
    }
}

fn scenario_value(report: &ScenarioReport) -> Value {
    json!({
        "name": report.name,
        "passed": report.passed(),
        "checks": report
            .checks
            .iter()
            .map(|c| json!({ "label": c.label, "passed": c.passed, "detail": c.detail }))
            .collect::<Vec<_>>(),
    })
}

/// Adds a `<key>_approx` sibling for every exact rational (or list of
/// rationals) in the report. Decimal expansions are truncated and marked.
fn decorate(value: &mut Value) {
    match value {
        Value::Object(map) => {
            let mut extra = Vec::new();
            for (key, entry) in map.iter_mut() {
                match entry {
                    Value::String(s) => {
                        if let Ok(r) = s.parse::<Rational>() {
                            extra.push((format!("{key}_approx"), json!(r.decimal_approx(6))));
                        }
                    }
                    Value::Array(items) if !items.is_empty() => {
                        let approx: Option<Vec<Value>> = items
                            .iter()
                            .map(|item| match item {
                                Value::String(s) => s
                                    .parse::<Rational>()
                                    .ok()
                                    .map(|r| json!(r.decimal_approx(6))),
                                _ => None,
                            })
                            .collect();
                        match approx {
                            Some(list) => {
                                extra.push((format!("{key}_approx"), Value::Array(list)));
                            }
                            None => {
                                for item in items.iter_mut() {
                                    decorate(item);
                                }
                            }
                        }
                    }
                    Value::Object(_) => decorate(entry),
                    _ => {}
                }
            }
            for (key, entry) in extra {
                map.insert(key, entry);
            }
        }
        Value::Array(items) => {
            for item in items.iter_mut() {
                decorate(item);
            }
        }
        _ => {}
    }
}

fn dispatch(cli: &Cli) -> Result<Rendered, CliError> {
    let caps = caps_for(cli);
    match &cli.command {
        Command::Gap { market, items, solver } => {
            let mkt = load_market(market)?;
            let set = parse_items(mkt.items(), items.as_deref())?;
            let strategy = pick_solver(solver)?;
            let relaxed = strategy.solve(&mkt, set, &caps)?;
            let (_, integral) = integral_opt(&mkt, set, &caps)?;
            let gap = if integral.is_zero() {
                Rational::one()
            } else {
                relaxed.optimal.clone() / integral.clone()
            };
            Ok(Rendered::Report {
                command: "gap",
                params: json!({
                    "market": market.display().to_string(),
                    "items": items_echo(items),
                    "solver": solver,
                }),
                results: json!({
                    "fractional": rational_str(&relaxed.optimal),
                    "integral": rational_str(&integral),
                    "gap": rational_str(&gap),
                    "columns_used": relaxed.columns_used,
                }),
                positive: true,
            })
        }
        Command::StableExists { market, items, solver } => {
            let mkt = load_market(market)?;
            let set = parse_items(mkt.items(), items.as_deref())?;
            let strategy = pick_solver(solver)?;
            let verdict = stable_exists_on_with(&mkt, set, &caps, strategy.as_ref())?;
            Ok(Rendered::Report {
                command: "stable-exists",
                params: json!({
                    "market": market.display().to_string(),
                    "items": items_echo(items),
                    "solver": solver,
                }),
                results: json!({ "stable_outcome_exists": verdict }),
                positive: verdict,
            })
        }
        Command::Extract { market, items, solver } => {
            let mkt = load_market(market)?;
            let set = parse_items(mkt.items(), items.as_deref())?;
            let strategy = pick_solver(solver)?;
            let params = json!({
                "market": market.display().to_string(),
                "items": items_echo(items),
                "solver": solver,
            });
            match extract_stable_outcome_with(&mkt, set, &caps, strategy.as_ref())? {
                Some(extracted) => Ok(Rendered::Report {
                    command: "extract",
                    params,
                    results: json!({
                        "exists": true,
                        "welfare": rational_str(&extracted.welfare),
                        "sold": index_list(extracted.sold),
                        "outcome": outcome_value(&extracted.outcome),
                    }),
                    positive: true,
                }),
                None => Ok(Rendered::Report {
                    command: "extract",
                    params,
                    results: json!({ "exists": false }),
                    positive: false,
                }),
            }
        }
        Command::Verify { market, outcome } => {
            let mkt = load_market(market)?;
            let doc: OutcomeDocument = load_json(outcome)?;
            let parsed = outcome_from_document(&doc)?;
            let report = verify_stable(&mkt, &parsed, &caps)?;
            let witness = match &report.witness {
                None => Value::Null,
                Some(w) => json!({
                    "buyer": w.buyer,
                    "preferred": index_list(w.preferred),
                    "bundle_utility": rational_str(&w.bundle_utility),
                    "preferred_utility": rational_str(&w.preferred_utility),
                }),
            };
            Ok(Rendered::Report {
                command: "verify",
                params: json!({
                    "market": market.display().to_string(),
                    "outcome": outcome.display().to_string(),
                }),
                results: json!({
                    "stable": report.stable,
                    "witness": witness,
                    "bundle_utilities": rational_strs(&report.bundle_utilities),
                    "max_utilities": rational_strs(&report.max_utilities),
                }),
                positive: report.stable,
            })
        }
        Command::BestStable { market, solver } => {
            let mkt = load_market(market)?;
            let strategy = pick_solver(solver)?;
            let best = best_stable_outcome_with(&mkt, &caps, strategy.as_ref())?;
            let (_, optimal) = integral_opt(&mkt, mkt.full_set(), &caps)?;
            let ratio = if best.welfare.is_zero() {
                if optimal.is_zero() {
                    Value::String("1".into())
                } else {
                    Value::String("unbounded".into())
                }
            } else {
                rational_str(&(optimal.clone() / best.welfare.clone()))
            };
            Ok(Rendered::Report {
                command: "best-stable",
                params: json!({
                    "market": market.display().to_string(),
                    "solver": solver,
                }),
                results: json!({
                    "welfare": rational_str(&best.welfare),
                    "optimal": rational_str(&optimal),
                    "ratio": ratio,
                    "sold": index_list(best.sold),
                    "outcome": outcome_value(&best.outcome),
                }),
                positive: true,
            })
        }
        Command::PricesFor { market, allocation } => {
            let mkt = load_market(market)?;
            let doc: AllocationDocument = load_json(allocation)?;
            let parsed = allocation_from_document(&doc)?;
            let params = json!({
                "market": market.display().to_string(),
                "allocation": allocation.display().to_string(),
            });
            match prices_for_allocation(&mkt, &parsed, &caps)? {
                PricingOutcome::Feasible(prices) => Ok(Rendered::Report {
                    command: "prices-for",
                    params,
                    results: json!({
                        "feasible": true,
                        "prices": rational_strs(prices.as_slice()),
                    }),
                    positive: true,
                }),
                PricingOutcome::Infeasible => Ok(Rendered::Report {
                    command: "prices-for",
                    params,
                    results: json!({ "feasible": false }),
                    positive: false,
                }),
            }
        }
        Command::ApproxBa { market } => {
            let mkt = load_market(market)?;
            let result = budget_additive_approx(&mkt, &caps)?;
            let case = match result.case {
                ApproxCase::SaturatedBudget => "saturated_budget",
                ApproxCase::UnsaturatedBudget => "unsaturated_budget",
            };
            Ok(Rendered::Report {
                command: "approx-ba",
                params: json!({ "market": market.display().to_string() }),
                results: json!({
                    "case": case,
                    "big_buyer": result.big_buyer,
                    "welfare": rational_str(&result.welfare),
                    "optimum_upper_bound": rational_str(&result.opt_upper),
                    "outcome": outcome_value(&result.outcome),
                }),
                positive: true,
            })
        }
        Command::GreedySm { market } => {
            let mkt = load_market(market)?;
            let result = single_minded_greedy(&mkt, &caps)?;
            Ok(Rendered::Report {
                command: "greedy-sm",
                params: json!({ "market": market.display().to_string() }),
                results: json!({
                    "welfare": rational_str(&result.welfare),
                    "winners": result.winners,
                    "outcome": outcome_value(&result.outcome),
                }),
                positive: true,
            })
        }
        Command::Gen { family, size, buyers, seed, delta, eps } => {
            let generator = generator_by_name(family).ok_or_else(|| {
                let known =
                    generators().iter().map(|g| g.name()).collect::<Vec<_>>().join(", ");
                CliError::Input(format!("unknown family {family:?} (known: {known})"))
            })?;
            let parse_opt = |s: &Option<String>| -> Result<Option<Rational>, CliError> {
                s.as_deref().map(str::parse::<Rational>).transpose().map_err(CliError::from)
            };
            let params = GeneratorParams {
                size: *size,
                buyers: *buyers,
                seed: *seed,
                delta: parse_opt(delta)?,
                eps: parse_opt(eps)?,
            };
            let market = generator.generate(&params)?;
            Ok(Rendered::Market(market_to_document(&market)))
        }
        Command::Reproduce { scenario, n, count, seed } => {
            let report = match scenario.as_str() {
                "xos" => xos_scenario(&caps)?,
                "submodular" => submodular_scenario(&caps)?,
                "single-minded" => single_minded_scenario(n.unwrap_or(4), &caps)?,
                "budget-additive" => {
                    budget_additive_scenario(count.unwrap_or(25), seed.unwrap_or(42), &caps)?
                }
                other => {
                    return Err(CliError::Input(format!(
                        "unknown scenario {other:?} (xos, submodular, single-minded, \
                         budget-additive)"
                    )))
                }
            };
            Ok(Rendered::Report {
                command: "reproduce",
                params: json!({
                    "scenario": scenario,
                    "n": n.map(Value::from).unwrap_or(Value::Null),
                    "count": count.map(Value::from).unwrap_or(Value::Null),
                    "seed": seed.map(Value::from).unwrap_or(Value::Null),
                }),
                results: scenario_value(&report),
                positive: report.passed(),
            })
        }
    }
}
