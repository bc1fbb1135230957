//! Subcommands behind the `mkdv` binary.
//!
//! Exit codes: 0 on success or a PASS verdict, 1 on a FAIL verdict or probe
//! violation, 2 on bad input (config, files, parameters).

use std::path::{Path, PathBuf};

use mkdv_core::corpus::{random_band_field, Corpus, CORPUS_SEED};
use mkdv_core::illposed::{dyadic_range, run_plan, verify_lemma, ExperimentPlan, ExperimentRecord};
use mkdv_core::norms::{fourier_lebesgue_norm, modulation_norm, sobolev_norm, Exponent};
use mkdv_core::probe::{
    apriori_probe, convolution_probe, corpus_ratios, corpus_reports, resonance_probe, AprioriSetup,
    ProbeKind, ProbeReport,
};
use mkdv_core::solitons::{soliton_field, SolitonParams};
use mkdv_core::solver::{evolve, Dealias, Sign, SolverConfig};
use mkdv_core::spectral::{Field, GridSpec};
use mkdv_core::{Complex64, Error, Result};
use serde_json::json;

use crate::config::Config;
use crate::io::{num, opt_num, read_snapshot, write_json, write_snapshot, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Illposed,
    Probe,
    Norms,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    /// Absent means every key takes its default.
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    /// Worker threads; `None` lets the pool decide.
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

pub fn run(rc: &RunConfig) -> i32 {
    match execute(rc) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn execute(rc: &RunConfig) -> Result<Outcome> {
    let config = match &rc.config {
        Some(path) => Config::load(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        None => Config::default(),
    };
    std::fs::create_dir_all(&rc.out)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = rc.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("--jobs: {e}")))?;
    pool.install(|| match rc.command {
        Command::Solve => cmd_solve(&config, &rc.out, rc.seed),
        Command::Illposed => cmd_illposed(&config, &rc.out),
        Command::Probe => cmd_probe(&config, &rc.out, rc.seed),
        Command::Norms => cmd_norms(&config, &rc.out),
    })
}

const SOLVE_KEYS: &[&str] = &[
    "L", "M", "dt", "T", "record_every", "sign", "dealias", "mass_tolerance", "init", "N", "lambda",
    "band", "amplitude", "input",
];

fn initial_data(config: &Config, seed: u64) -> Result<(Field, Option<SolitonParams>)> {
    let init: String = config.get_or("init", "soliton".to_string())?;
    if init == "file" {
        let path: PathBuf = config.require("input")?;
        return Ok((read_snapshot(&path)?, None));
    }
    let grid = GridSpec::new(config.get_or("L", 128.0)?, config.get_or("M", 4096)?)?;
    match init.as_str() {
        "soliton" => {
            let params = SolitonParams::new(config.get_or("N", 2.0)?, config.get_or("lambda", 1.0)?)?;
            Ok((soliton_field(&params, 0.0, &grid)?, Some(params)))
        }
        "random" => {
            let band: f64 = config.get_or("band", 4.0)?;
            let amplitude: f64 = config.get_or("amplitude", 0.5)?;
            let f = random_band_field(&grid, -band, band, seed)?;
            Ok((f.scale(Complex64::new(amplitude, 0.0)), None))
        }
        "zero" => Ok((Field::zeros(grid), None)),
        other => Err(Error::Config(format!(
            "key `init`: `{other}` is not soliton, random, zero or file"
        ))),
    }
}

/// Evolves the configured initial data; writes `invariants.csv`,
/// `trajectory.csv`, `initial.snap`, `final.snap` and `summary.json`.
pub fn cmd_solve(config: &Config, out: &Path, seed: u64) -> Result<Outcome> {
    config.check_keys(SOLVE_KEYS)?;
    let cfg = SolverConfig {
        dt: config.get_or("dt", 1e-4)?,
        sign: config.get_or("sign", Sign::Focusing)?,
        dealias: config.get_or("dealias", Dealias::ThreeHalves)?,
        mass_tolerance: config.get_or("mass_tolerance", 1e-9)?,
    };
    let t_final: f64 = config.get_or("T", 1.0)?;
    let record_every: usize = config.get_or("record_every", 100)?;
    let (u0, soliton) = initial_data(config, seed)?;
    let grid = *u0.grid();
    let trajectory = evolve(&u0, t_final, &cfg, record_every)?;
    let hash = config.hash();

    let mut inv = Table::new("invariants/1", &hash, &["time", "mass", "momentum"]);
    inv.grid_comment(&grid);
    inv.comment(format!("seed={seed}"));
    for d in &trajectory.diagnostics {
        inv.push(vec![num(d.time), num(d.mass), num(d.momentum)]);
    }
    inv.write(&out.join("invariants.csv"))?;

    let mut traj = Table::new("trajectory/1", &hash, &["time", "l2_norm", "sup_norm"]);
    traj.grid_comment(&grid);
    traj.comment(format!("seed={seed}"));
    for (j, f) in trajectory.field.samples().iter().enumerate() {
        traj.push(vec![num(trajectory.field.time(j)), num(f.l2_norm()), num(f.sup_norm())]);
    }
    let last = &trajectory.final_state;
    traj.push(vec![num(t_final), num(last.l2_norm()), num(last.sup_norm())]);
    traj.write(&out.join("trajectory.csv"))?;

    write_snapshot(&out.join("initial.snap"), &u0)?;
    write_snapshot(&out.join("final.snap"), last)?;
    let final_error = match soliton {
        Some(params) => Some(last.relative_l2_error(&soliton_field(&params, t_final, &grid)?)?),
        None => None,
    };
    if let Some(e) = final_error {
        println!("final relative L2 error vs exact soliton: {e:.3e}");
    }
    println!("max relative mass drift: {:.3e}", trajectory.max_mass_drift());
    write_json(
        &out.join("summary.json"),
        &json!({
            "config_hash": hash,
            "seed": seed,
            "grid": { "L": grid.length(), "M": grid.points() },
            "solver": cfg,
            "T": t_final,
            "steps": trajectory.steps,
            "dt": trajectory.dt,
            "max_mass_drift": trajectory.max_mass_drift(),
            "max_momentum_drift": trajectory.max_momentum_drift(),
            "final_error": final_error,
        }),
    )?;
    Ok(Outcome::Pass)
}

const ILLPOSED_KEYS: &[&str] = &[
    "s", "p", "T", "N_min", "N_max", "theta", "use_solver", "separation", "norm_band", "diff_fraction",
    "slope_tolerance",
];

/// Builds the sweep plan; absent keys follow the nonnegative default plan.
pub fn illposed_plan(config: &Config) -> Result<ExperimentPlan> {
    config.check_keys(ILLPOSED_KEYS)?;
    let s: f64 = config.get_or("s", 0.125)?;
    let p: Exponent = config.get_or("p", Exponent::Finite(4.0))?;
    let n_list = dyadic_range(config.get_or("N_min", 16.0)?, config.get_or("N_max", 1024.0)?);
    let mut plan = ExperimentPlan::new(s, p, config.get_or("T", 1.0)?, n_list, config.get_opt("theta")?)?;
    plan.use_solver = config.get_or("use_solver", false)?;
    plan.separation = config.get_or("separation", 1.0)?;
    let th = &mut plan.thresholds;
    th.norm_band = config.get_or("norm_band", th.norm_band)?;
    th.diff_fraction = config.get_or("diff_fraction", th.diff_fraction)?;
    th.slope_tolerance = config.get_or("slope_tolerance", th.slope_tolerance)?;
    Ok(plan)
}

pub const RECORD_COLUMNS: &[&str] = &[
    "N", "N1", "N2", "lambda", "theta", "norm_u", "norm_v", "diff0", "diffT", "tail", "diff0_reference",
    "oracle_norm_u", "oracle_norm_v", "oracle_diff0", "oracle_diffT", "oracle_discrepancy",
    "time_variation", "solver_error", "grid_L", "grid_M",
];

fn record_row(r: &ExperimentRecord) -> Vec<String> {
    vec![
        num(r.n),
        num(r.n1),
        num(r.n2),
        num(r.lambda),
        num(r.theta),
        num(r.norm_u),
        num(r.norm_v),
        num(r.diff0),
        num(r.diff_t),
        num(r.tail),
        num(r.diff0_reference),
        num(r.oracle_norm_u),
        num(r.oracle_norm_v),
        num(r.oracle_diff0),
        num(r.oracle_diff_t),
        num(r.oracle_discrepancy),
        num(r.time_variation),
        opt_num(r.solver_error),
        num(r.grid_length),
        r.grid_points.to_string(),
    ]
}

/// Runs the sweep; writes `records.csv` and `verdict.json`. PASS iff the
/// verdict passes.
pub fn cmd_illposed(config: &Config, out: &Path) -> Result<Outcome> {
    let plan = illposed_plan(config)?;
    let records = run_plan(&plan)?;
    let verdict = verify_lemma(&records, &plan);
    let hash = config.hash();
    let mut table = Table::new("records/1", &hash, RECORD_COLUMNS);
    table.comment(format!(
        "regime={} s={} p={} T={} theta={}",
        plan.regime, plan.s, plan.p, plan.t_final, plan.theta
    ));
    table.comment("grid per row: grid_L, grid_M");
    for r in &records {
        table.push(record_row(r));
    }
    table.write(&out.join("records.csv"))?;
    write_json(
        &out.join("verdict.json"),
        &json!({ "config_hash": hash, "plan": plan, "verdict": verdict }),
    )?;
    println!(
        "verdict {} ({}): bounded {:.3}, diff0 slope {:.4}, separation {:.3}",
        if verdict.pass { "PASS" } else { "FAIL" },
        verdict.regime,
        verdict.bounded.value,
        verdict.vanishing.value,
        verdict.separated.value
    );
    Ok(if verdict.pass { Outcome::Pass } else { Outcome::Fail })
}

const PROBE_KEYS: &[&str] = &[
    "probes",
    "corpus_seed",
    "resonance_count",
    "resonance_range",
    "convolution_trials",
    "convolution_eps",
    "apriori_count",
    "apriori_T",
    "apriori_dt",
    "apriori_target",
];

const PROBE_NAMES: &[&str] = &["resonance", "bilinear-cube", "bilinear-lp", "trilinear", "convolution", "apriori"];

/// Runs the listed probes; writes `probes.json` and, when a corpus probe
/// ran, `ratios.csv`. FAIL when any probe reports a violation.
pub fn cmd_probe(config: &Config, out: &Path, seed: u64) -> Result<Outcome> {
    config.check_keys(PROBE_KEYS)?;
    let probes = config.list("probes");
    if let Some(bad) = probes.iter().find(|p| !PROBE_NAMES.contains(&p.as_str())) {
        return Err(Error::Config(format!("key `probes`: unknown probe `{bad}`")));
    }
    let wants = |name: &str| probes.iter().any(|p| p == name);
    let hash = config.hash();
    let mut reports: Vec<ProbeReport> = Vec::new();
    if wants("resonance") {
        reports.push(resonance_probe(
            config.get_or("resonance_count", 1_000_000)?,
            config.get_or("resonance_range", 2.0)?,
            seed,
        ));
    }
    let corpus_kinds: Vec<ProbeKind> = [ProbeKind::BilinearCube, ProbeKind::BilinearLp, ProbeKind::Trilinear]
        .into_iter()
        .filter(|k| wants(k.name()))
        .collect();
    if !corpus_kinds.is_empty() {
        let corpus = Corpus::generate(config.get_or("corpus_seed", CORPUS_SEED)?);
        let selected: Vec<usize> = (0..corpus.cases.len())
            .filter(|&i| corpus_kinds.contains(&ProbeKind::of(&corpus.cases[i])))
            .collect();
        let subset = Corpus {
            seed: corpus.seed,
            cases: selected.iter().map(|&i| corpus.cases[i].clone()).collect(),
        };
        let ratios = corpus_ratios(&subset)?;
        let mut table = Table::new("ratios/1", &hash, &["index", "probe", "case", "ratio"]);
        table.comment(format!("corpus_seed={} corpus_hash={}", corpus.seed, corpus.hash()));
        for ((&i, case), r) in selected.iter().zip(&subset.cases).zip(&ratios) {
            table.push(vec![i.to_string(), ProbeKind::of(case).name().into(), case.label(), num(*r)]);
        }
        table.write(&out.join("ratios.csv"))?;
        // reports are checked against the hash of the whole corpus
        let mut all = vec![f64::NAN; corpus.cases.len()];
        for (&i, &r) in selected.iter().zip(&ratios) {
            all[i] = r;
        }
        reports.extend(
            corpus_reports_for(&corpus, &all)
                .into_iter()
                .filter(|r| corpus_kinds.iter().any(|k| k.name() == r.estimate)),
        );
    }
    if wants("convolution") {
        reports.push(convolution_probe(
            config.get_or("convolution_trials", 10_000)?,
            config.get_or("convolution_eps", 0.1)?,
            seed,
        )?);
    }
    if wants("apriori") {
        let mut setup = AprioriSetup::default();
        setup.t_final = config.get_or("apriori_T", setup.t_final)?;
        setup.dt = config.get_or("apriori_dt", setup.dt)?;
        setup.target = config.get_or("apriori_target", setup.target)?;
        reports.push(apriori_probe(&setup, config.get_or("apriori_count", 20)?, seed)?);
    }
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    for r in &reports {
        println!(
            "{}: max ratio {:.4e} over {} (calibration {}), violations {}",
            r.estimate,
            r.max_ratio,
            r.corpus_size,
            r.calibration.map(|c| format!("{c}")).unwrap_or_else(|| "-".into()),
            r.violations
        );
    }
    write_json(
        &out.join("probes.json"),
        &json!({ "config_hash": hash, "seed": seed, "reports": reports }),
    )?;
    Ok(if violations == 0 { Outcome::Pass } else { Outcome::Fail })
}

/// [`corpus_reports`] ignoring cases that were not evaluated (`NaN`).
fn corpus_reports_for(corpus: &Corpus, ratios: &[f64]) -> Vec<ProbeReport> {
    let filled: Vec<f64> = ratios.iter().map(|&r| if r.is_nan() { 0.0 } else { r }).collect();
    let mut reports = corpus_reports(corpus, &filled);
    for report in &mut reports {
        report.corpus_size = corpus
            .cases
            .iter()
            .zip(ratios)
            .filter(|(c, r)| ProbeKind::of(c).name() == report.estimate && !r.is_nan())
            .count();
    }
    reports
}

const NORM_KEYS: &[&str] = &["input", "s", "p"];

/// Norms of a stored field; writes `norms.csv` and `norms.json`.
pub fn cmd_norms(config: &Config, out: &Path) -> Result<Outcome> {
    config.check_keys(NORM_KEYS)?;
    let path: PathBuf = config.require("input")?;
    let f = read_snapshot(&path)?;
    let s: f64 = config.get_or("s", 0.0)?;
    let p: Exponent = config.get_or("p", Exponent::Finite(2.0))?;
    let sobolev = sobolev_norm(&f, s)?;
    let fourier_lebesgue = fourier_lebesgue_norm(&f, s, p)?;
    let modulation = modulation_norm(&f, s, p)?;
    let hash = config.hash();
    let mut table = Table::new("norms/1", &hash, &["s", "p", "l2", "sobolev", "fourier_lebesgue", "modulation"]);
    table.grid_comment(f.grid());
    table.push(vec![
        num(s),
        p.to_string(),
        num(f.l2_norm()),
        num(sobolev),
        num(fourier_lebesgue),
        num(modulation),
    ]);
    table.write(&out.join("norms.csv"))?;
    write_json(
        &out.join("norms.json"),
        &json!({
            "config_hash": hash,
            "grid": { "L": f.grid().length(), "M": f.grid().points() },
            "s": s,
            "p": p.to_string(),
            "l2": f.l2_norm(),
            "sobolev": sobolev,
            "fourier_lebesgue": fourier_lebesgue,
            "modulation": modulation,
        }),
    )?;
    println!("H^{s}: {sobolev:.12e}  FL^{s},{p}: {fourier_lebesgue:.12e}  M^2,{p}_{s}: {modulation:.12e}");
    Ok(Outcome::Pass)
}
