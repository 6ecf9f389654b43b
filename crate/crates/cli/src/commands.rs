//! Subcommand implementations. Each returns the bytes of its outputs; `main` decides where
//! they go.

use std::path::{Path, PathBuf};

use budgeted_contracts::corpus::{self, Family};
use budgeted_contracts::downsizing::{downsize_submodular, downsize_xos, DownsizeParams};
use budgeted_contracts::frugality::{budget_curve, pof, PofQuery};
use budgeted_contracts::objectives::check_best_conditions;
use budgeted_contracts::reductions::{exact_solver, reduce_from_mrl, reduce_to_mrl, Path as ReductionPath};
use budgeted_contracts::solvers::{brute_force_max, fptas_additive_profit, knapsack_fptas, SolveResult};
use budgeted_contracts::{ContractError, Execution, Instance, Objective, SetFunction, Subset};
use clap::ValueEnum;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, InstanceHash};
use crate::sweep::{self, Cell, PofFamily, Row};

/// Everything a command produced: the main body plus side files.
pub struct Output {
    pub body: String,
    pub side_files: Vec<(PathBuf, String)>,
    pub instances: Vec<InstanceHash>,
}

impl Output {
    fn json(value: &impl serde::Serialize, instances: Vec<InstanceHash>) -> Self {
        let body = serde_json::to_string_pretty(value).expect("output serializes") + "\n";
        Output { body, side_files: Vec::new(), instances }
    }
}

pub struct Loaded {
    pub instance: Instance,
    pub hash: InstanceHash,
}

pub fn load_instance(path: Option<&Path>) -> CliResult<Loaded> {
    let path = path.ok_or_else(|| CliError::usage("--instance is required"))?;
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path.display(), e))?;
    let instance: Instance =
        serde_json::from_slice(&bytes).map_err(|e| ContractError::Input(format!("{}: {e}", path.display())))?;
    Ok(Loaded { instance, hash: InstanceHash { path: path.display().to_string(), sha256: sha256_hex(&bytes) } })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Fptas,
}

/// The FPTAS matching the objective: the profit table or the knapsack rounding.
fn approximate(inst: &Instance, budget: f64, epsilon: f64, obj: &Objective) -> budgeted_contracts::Result<SolveResult> {
    if *obj == Objective::Profit {
        fptas_additive_profit(inst, budget, epsilon)
    } else {
        knapsack_fptas(inst, budget, epsilon, obj)
    }
}

pub fn solve(
    loaded: Loaded,
    obj: &Objective,
    budget: f64,
    method: Method,
    epsilon: f64,
    light_only: bool,
) -> CliResult<Output> {
    let inst = &loaded.instance;
    let result = match method {
        Method::Brute => brute_force_max(obj, inst, budget, light_only)?,
        Method::Fptas if light_only => {
            return Err(CliError::usage("--light-only is only supported by the brute method"))
        }
        Method::Fptas => approximate(inst, budget, epsilon, obj)?,
    };
    let out = json!({
        "method": format!("{method:?}").to_lowercase(),
        "objective": obj,
        "budget": budget,
        "epsilon": (method == Method::Fptas).then_some(epsilon),
        "light_only": light_only,
        "result": result,
    });
    Ok(Output::json(&out, vec![loaded.hash]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DownsizeMode {
    Submodular,
    Xos,
}

pub fn downsize(loaded: Loaded, set: &[usize], m: usize, mode: DownsizeMode, psi: Objective) -> CliResult<Output> {
    let inst = &loaded.instance;
    let s = Subset::try_from_indices(set.iter().copied(), inst.n())?;
    let result = match mode {
        DownsizeMode::Submodular => downsize_submodular(inst, s, &DownsizeParams::new(m).with_psi(psi).checked())?,
        DownsizeMode::Xos => {
            require_xos(inst)?;
            downsize_xos(inst, s, m)?
        }
    };
    let out = json!({ "mode": format!("{mode:?}").to_lowercase(), "m": m, "result": result });
    Ok(Output::json(&out, vec![loaded.hash]))
}

/// XOS guarantees are only claimed for clause or additive rewards, or tables that are
/// verifiably submodular.
fn require_xos(inst: &Instance) -> CliResult<()> {
    match inst.reward() {
        SetFunction::Additive { .. } | SetFunction::XosClauses { .. } => Ok(()),
        f if f.classify()?.is_submodular && f.classify()?.is_monotone => Ok(()),
        _ => Err(ContractError::Precondition("reward table is not known to be XOS".into()).into()),
    }
}

fn require_submodular(inst: &Instance) -> CliResult<()> {
    let c = inst.reward().classify()?;
    if c.is_submodular && c.is_monotone {
        Ok(())
    } else {
        Err(ContractError::Precondition("reward is not monotone submodular".into()).into())
    }
}

/// `objective@budget`, e.g. `welfare@1.0` or `profit@1/2`.
pub fn parse_target(s: &str) -> Result<(Objective, f64), String> {
    let (obj, budget) = s.rsplit_once('@').ok_or_else(|| format!("{s:?} must look like objective@budget"))?;
    let obj: Objective = obj.parse().map_err(|e: ContractError| e.to_string())?;
    let budget = budgeted_contracts::real::parse_real(budget)?;
    Ok((obj, budget))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InnerMethod {
    Brute,
    Fptas,
}

pub fn reduce(
    loaded: Loaded,
    from: &(Objective, f64),
    to: &(Objective, f64),
    solver: InnerMethod,
    epsilon: f64,
    path: ReductionPath,
) -> CliResult<Output> {
    let inst = &loaded.instance;
    match path {
        ReductionPath::Xos => require_xos(inst)?,
        ReductionPath::Submodular => require_submodular(inst)?,
    }
    let light = match solver {
        InnerMethod::Brute => reduce_from_mrl(inst, from.1, to.1, &to.0, exact_solver, 1.0, path)?,
        InnerMethod::Fptas => {
            let inner = |i: &Instance, b: f64, o: &Objective| approximate(i, b, epsilon, o).map(|r| r.optimum);
            reduce_from_mrl(inst, from.1, to.1, &to.0, inner, 1.0 / (1.0 - epsilon), path)?
        }
    };
    let mut outcome = reduce_to_mrl(inst, from.1, &from.0, light.candidate, light.guarantee_factor, path)?;
    outcome.guarantee_factor = path.to_mrl_factor(1.0) * light.guarantee_factor;
    let out = json!({
        "from": { "objective": from.0, "budget": from.1 },
        "to": { "objective": to.0, "budget": to.1 },
        "solver": format!("{solver:?}").to_lowercase(),
        "light_stage": light,
        "result": outcome,
    });
    Ok(Output::json(&out, vec![loaded.hash]))
}

pub struct PofArgs {
    pub family: Option<PofFamily>,
    pub grid: Vec<f64>,
    pub big_b: Vec<f64>,
    pub n: Vec<usize>,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub objectives: Vec<Objective>,
    pub curve: Option<PathBuf>,
}

const CURVE_HEADER: [&str; 8] = ["family", "n", "b", "B", "objective", "payment", "value", "team"];

fn csv_body<T: serde::Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::io("csv", e))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("csv", e))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn curve_body(rows: &[(Row, Instance)], objectives: &[Objective]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::io("csv", e);
    w.write_record(CURVE_HEADER).map_err(io)?;
    for (row, inst) in rows {
        let obj =
            objectives.iter().find(|o| o.to_string() == row.objective).expect("row objective comes from the list");
        for p in budget_curve(inst, obj)? {
            w.write_record([
                row.family.clone(),
                row.n.to_string(),
                row.b.to_string(),
                row.big_b.to_string(),
                row.objective.clone(),
                p.payment.to_string(),
                p.value.to_string(),
                p.team.to_string(),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("csv", e))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn pof_sweep(args: PofArgs, loaded: Option<Loaded>, execution: Execution) -> CliResult<Output> {
    let (rows, instances) = match (args.family, loaded) {
        (Some(_), Some(_)) => return Err(CliError::usage("pass either --family or --instance, not both")),
        (None, None) => return Err(CliError::usage("pof needs --family or --instance")),
        (Some(family), None) => {
            let mut cells = Vec::new();
            for &n in &args.n {
                for &big_b in &args.big_b {
                    for &b in &args.grid {
                        for objective in &args.objectives {
                            cells.push(Cell {
                                family,
                                n,
                                b,
                                big_b,
                                objective: objective.clone(),
                                k: args.k,
                                epsilon: args.epsilon,
                            });
                        }
                    }
                }
            }
            (sweep::run(&cells, execution)?, Vec::new())
        }
        (None, Some(loaded)) => {
            let inst = loaded.instance;
            let mut rows = Vec::new();
            for &big_b in &args.big_b {
                for &b in &args.grid {
                    if b > big_b {
                        continue;
                    }
                    for obj in &args.objectives {
                        let report = pof(&inst, &PofQuery::new(b, big_b, obj.clone()))?;
                        let row = Row {
                            family: "instance".into(),
                            n: inst.n(),
                            b,
                            big_b,
                            objective: obj.to_string(),
                            max_b: report.max_at_b,
                            max_big_b: report.max_at_big_b,
                            ratio: report.ratio,
                            bound: report.theoretical_bound,
                            tight: matches!((report.ratio, report.theoretical_bound), (Some(r), Some(t)) if (r - t).abs() <= budgeted_contracts::TOL),
                        };
                        rows.push((row, inst.clone()));
                    }
                }
            }
            (rows, vec![loaded.hash])
        }
    };
    let plain: Vec<Row> = rows.iter().map(|r| r.0.clone()).collect();
    let body = if plain.is_empty() {
        "family,n,b,B,objective,max_b,max_B,ratio,bound,tight\n".to_string()
    } else {
        csv_body(&plain)?
    };
    let mut side_files = Vec::new();
    if let Some(path) = args.curve {
        side_files.push((path, curve_body(&rows, &args.objectives)?));
    }
    Ok(Output { body, side_files, instances })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CorpusFamily {
    Additive,
    Submodular,
    Xos,
}

pub struct GenArgs {
    pub family: Option<PofFamily>,
    pub corpus: Option<CorpusFamily>,
    pub n: usize,
    pub b: Option<f64>,
    pub big_b: f64,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub index: u64,
}

pub fn gen(args: GenArgs, seed: Option<u64>) -> CliResult<Output> {
    let inst = match (args.family, args.corpus) {
        (Some(family), None) => {
            let b = args.b.ok_or_else(|| CliError::usage("--b is required for generator families"))?;
            let cell = Cell {
                family,
                n: args.n,
                b,
                big_b: args.big_b,
                objective: Objective::Reward,
                k: args.k,
                epsilon: args.epsilon,
            };
            sweep::build(&cell)?.0
        }
        (None, Some(corpus_family)) => {
            let family = match corpus_family {
                CorpusFamily::Additive => Family::Additive,
                CorpusFamily::Submodular => Family::Submodular,
                CorpusFamily::Xos => Family::Xos,
            };
            corpus::corpus_instance(family, seed.unwrap_or(0), args.index, args.n)?
        }
        _ => return Err(CliError::usage("gen needs exactly one of --family or --corpus")),
    };
    Ok(Output::json(&inst, Vec::new()))
}

pub fn check(loaded: Loaded) -> CliResult<Output> {
    let inst = &loaded.instance;
    let c = inst.reward().classify()?;
    let mut best = serde_json::Map::new();
    for obj in [Objective::Reward, Objective::Profit, Objective::Welfare] {
        best.insert(obj.to_string(), json!(check_best_conditions(&obj, inst)?));
    }
    let out = json!({
        "n": inst.n(),
        "monotone": c.is_monotone,
        "submodular": c.is_submodular,
        "subadditive": c.is_subadditive,
        "best_conditions": best,
        "light_agents": inst.light_agents(),
    });
    Ok(Output::json(&out, vec![loaded.hash]))
}
