//! Subcommands: each turns resolved settings into named CSV tables.

use std::path::{Path, PathBuf};

use percofpp_core::estimators::{
    bypass_batch, delta_estimator, lipschitz_scan, mu_estimate, path_sum_check, radius_ensemble, russo_exact_check,
    slln_diagnostic, tail_suite, truncation_gap, ExperimentConfig, RussoInstance, TailSampling,
};
use percofpp_core::passage::{distance_field_until, extract_geodesic, WeightView};
use percofpp_core::radius::{radius_tail, RadiusMethod};
use percofpp_core::replicate::Replicator;
use percofpp_core::stats::SurvivalPoint;
use percofpp_core::{animals, BoxRegion, Point};

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::manifest::{create_run_dir, sha256_hex, timestamp, OutputDigest, RunManifest};
use crate::parallel::RayonReplicator;
use crate::table::{int, num, opt, Table};

pub const SUBCOMMANDS: &[&str] = &[
    "sample",
    "mu",
    "lipschitz",
    "russo",
    "delta",
    "radius-tails",
    "gap",
    "animals",
    "bypass-demo",
    "slln",
    "tails",
];

/// Largest window radius whose edges `sample` lists one by one.
const SAMPLE_EDGE_RADIUS: u32 = 8;

pub type Outputs = Vec<(String, Table)>;

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Parent of the run directory.
    pub out: PathBuf,
    /// Worker threads; 0 means all cores.
    pub threads: usize,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

/// Runs `subcommand`, writes its tables and a manifest into a fresh run
/// directory under `opts.out`.
pub fn run(subcommand: &str, settings: &Settings, opts: &RunOptions) -> CliResult<RunOutcome> {
    if !SUBCOMMANDS.contains(&subcommand) {
        return Err(CliError::Config(format!("unknown subcommand `{subcommand}`")));
    }
    let seed: u64 = settings.get("seed")?;
    let replicas: usize = settings.get("replicas")?;
    let replicator =
        RayonReplicator::new(opts.threads).map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    let started = timestamp();
    let outputs = compute(subcommand, settings, &replicator)?;
    let finished = timestamp();

    let dir = create_run_dir(&opts.out, subcommand, seed)?;
    let mut digests = Vec::with_capacity(outputs.len());
    for (name, table) in &outputs {
        let bytes = table.to_bytes()?;
        std::fs::write(dir.join(name), &bytes)?;
        digests.push(OutputDigest { file: name.clone(), sha256: sha256_hex(&bytes) });
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: subcommand.into(),
        config: settings.as_map().clone(),
        master_seed: seed,
        replica_seeds: (0..replicas as u64).map(|i| percofpp_core::rng::replica_seed(seed, i)).collect(),
        started,
        finished,
        outputs: digests,
    };
    manifest.write(&dir)?;
    Ok(RunOutcome { dir, manifest })
}

#[derive(Clone, Debug)]
pub struct ReplayOutcome {
    pub original: RunManifest,
    pub rerun: RunOutcome,
    /// Files whose digest differs between the two runs, or that only one run produced.
    pub mismatches: Vec<String>,
}

impl ReplayOutcome {
    pub fn identical(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-runs the subcommand recorded in `manifest` with its resolved
/// configuration and compares output digests.
pub fn replay(manifest: &Path, opts: &RunOptions) -> CliResult<ReplayOutcome> {
    let original = RunManifest::read(manifest)?;
    let settings = Settings::from_map(&original.config)?;
    let rerun = run(&original.subcommand, &settings, opts)?;
    let mut mismatches = Vec::new();
    for o in &original.outputs {
        match rerun.manifest.outputs.iter().find(|r| r.file == o.file) {
            Some(r) if r.sha256 == o.sha256 => {}
            _ => mismatches.push(o.file.clone()),
        }
    }
    for r in &rerun.manifest.outputs {
        if !original.outputs.iter().any(|o| o.file == r.file) {
            mismatches.push(r.file.clone());
        }
    }
    Ok(ReplayOutcome { original, rerun, mismatches })
}

/// Produces the tables of `subcommand` without touching the filesystem.
pub fn compute(subcommand: &str, settings: &Settings, rep: &impl Replicator) -> CliResult<Outputs> {
    if subcommand == "russo" {
        return russo(settings);
    }
    match settings.get::<usize>("d")? {
        2 => compute_in::<2>(subcommand, settings, rep),
        3 => compute_in::<3>(subcommand, settings, rep),
        d => Err(CliError::Config(format!("d = {d} is not supported (use 2 or 3)"))),
    }
}

fn compute_in<const D: usize>(subcommand: &str, s: &Settings, rep: &impl Replicator) -> CliResult<Outputs> {
    if subcommand == "animals" {
        return animals_cmd::<D>(s, rep);
    }
    let config = s.experiment()?;
    match subcommand {
        "sample" => sample::<D>(&config, rep),
        "mu" => mu::<D>(&config, rep),
        "lipschitz" => lipschitz::<D>(&config, rep),
        "delta" => delta::<D>(s, &config, rep),
        "radius-tails" => radius_tails::<D>(s, &config, rep),
        "gap" => gap::<D>(&config, rep),
        "bypass-demo" => bypass::<D>(s, &config, rep),
        "slln" => slln::<D>(s, &config),
        "tails" => tails::<D>(s, &config, rep),
        other => Err(CliError::Config(format!("unknown subcommand `{other}`"))),
    }
}

fn sample<const D: usize>(config: &ExperimentConfig, rep: &impl Replicator) -> CliResult<Outputs> {
    let mut passage = Table::new(&["replica", "seed", "p", "n", "m", "k", "time", "time_over_n", "geodesic_len"]);
    for &n in &config.n_grid {
        let (m, k) = (config.m_for(n), config.k_for(n));
        let rows: Vec<CliResult<Vec<Vec<String>>>> = rep.run(config.replicas, |i| {
            let env = config.environment::<D>(i, k)?;
            let mut rows = Vec::new();
            for &p in &config.p_grid {
                let view = WeightView::new(&env, p, Some(m), BoxRegion::new(Point::origin(), k).cuboid())?;
                let y = Point::on_axis(0, n as i32);
                let field = distance_field_until(&view, &Point::origin(), &y)?;
                let g = extract_geodesic(&field, &view, &y)?;
                rows.push(vec![
                    int(i),
                    int(config.replica_seed(i)),
                    num(p),
                    int(n),
                    num(m),
                    int(k),
                    num(g.weight),
                    num(g.weight / n as f64),
                    int(g.len()),
                ]);
            }
            Ok(rows)
        });
        for r in rows {
            r?.into_iter().for_each(|row| passage.push(row));
        }
    }

    let mut header = vec!["edge".to_string(), "u".into(), "v".into()];
    header.extend(config.p_grid.iter().map(|p| format!("weight_p{p}")));
    let mut weights = Table { header, rows: Vec::new() };
    let r = SAMPLE_EDGE_RADIUS.min(config.n_grid[0]);
    let env = config.environment::<D>(0, r)?;
    for e in env.cuboid().clone().edges() {
        let (u, v) = env.uniforms(&e)?;
        let mut row = vec![e.to_string(), num(u), num(v)];
        for &p in &config.p_grid {
            row.push(num(env.weight(&e, p)?));
        }
        weights.push(row);
    }
    Ok(vec![("passage.csv".into(), passage), ("weights.csv".into(), weights)])
}

fn mu<const D: usize>(config: &ExperimentConfig, rep: &impl Replicator) -> CliResult<Outputs> {
    let mut summary = Table::new(&[
        "p",
        "n",
        "replicas",
        "mean",
        "stderr",
        "mean_regularized",
        "stderr_regularized",
        "excluded",
    ]);
    let mut per = Table::new(&["p", "n", "replica", "time_over_n"]);
    for &n in &config.n_grid {
        for &p in &config.p_grid {
            let est = mu_estimate::<D>(config, p, n, true, rep)?;
            summary.push(vec![
                num(p),
                int(n),
                int(est.replicas),
                num(est.mean_truncated),
                num(est.stderr_truncated),
                opt(est.mean_regularized),
                opt(est.stderr_regularized),
                int(est.excluded),
            ]);
            for (i, v) in est.per_replica.iter().enumerate() {
                per.push(vec![num(p), int(n), int(i), num(*v)]);
            }
        }
    }
    Ok(vec![("mu.csv".into(), summary), ("mu_replicas.csv".into(), per)])
}

fn lipschitz<const D: usize>(config: &ExperimentConfig, rep: &impl Replicator) -> CliResult<Outputs> {
    let mut points = Table::new(&["n", "p", "mean", "stderr"]);
    let mut slopes = Table::new(&["n", "p_lo", "p_hi", "slope", "stderr"]);
    let mut summary = Table::new(&["n", "replicas", "monotone_violations", "max_slope", "all_finite"]);
    for &n in &config.n_grid {
        let scan = lipschitz_scan::<D>(config, n, rep)?;
        for pt in &scan.points {
            points.push(vec![int(n), num(pt.p), num(pt.mean), num(pt.stderr)]);
        }
        for s in &scan.slopes {
            slopes.push(vec![int(n), num(s.p_lo), num(s.p_hi), num(s.slope), num(s.stderr)]);
        }
        let max = scan.slopes.iter().map(|s| s.slope).fold(f64::NEG_INFINITY, f64::max);
        let finite = scan.slopes.iter().all(|s| s.slope.is_finite());
        summary.push(vec![int(n), int(config.replicas), int(scan.monotone_violations), num(max), int(finite)]);
    }
    Ok(vec![
        ("lipschitz_points.csv".into(), points),
        ("lipschitz_slopes.csv".into(), slopes),
        ("lipschitz_summary.csv".into(), summary),
    ])
}

fn russo(s: &Settings) -> CliResult<Outputs> {
    let grid: Vec<f64> = s.get_list("p")?;
    let names: Vec<&str> = match s.raw("instance") {
        "all" => vec!["edge", "2x2", "2x3"],
        one => vec![one],
    };
    let mut t = Table::new(&["instance", "states", "p", "expectation", "derivative", "rhs", "discrepancy"]);
    for name in names {
        let inst = RussoInstance::builtin(name)
            .ok_or_else(|| CliError::Config(format!("instance: unknown instance `{name}` (edge | 2x2 | 2x3 | all)")))?;
        let report = russo_exact_check(&inst, &grid)?;
        for r in &report.rows {
            t.push(vec![
                name.into(),
                int(report.states),
                num(r.p),
                num(r.expectation),
                num(r.derivative),
                num(r.rhs),
                num(r.discrepancy),
            ]);
        }
    }
    Ok(vec![("russo.csv".into(), t)])
}

fn delta<const D: usize>(s: &Settings, config: &ExperimentConfig, rep: &impl Replicator) -> CliResult<Outputs> {
    let h: f64 = s.get("h")?;
    let mode = s.delta_mode()?;
    let budget: usize = s.get("edge_budget")?;
    let spot: usize = s.get("spot_checks")?;
    let mut t = Table::new(&[
        "p",
        "n",
        "p_lo",
        "p_hi",
        "mode",
        "replicas",
        "fd",
        "fd_stderr",
        "fd_over_n",
        "delta_sum",
        "delta_sum_stderr",
        "delta_sum_over_n",
        "mean_geodesic_len",
        "subsample_factor",
        "fd_positive",
        "off_checked",
        "off_violations",
        "off_positive",
    ]);
    for &n in &config.n_grid {
        for &p in &config.p_grid {
            let r = delta_estimator::<D>(config, p, n, h, mode, budget, spot, rep)?;
            t.push(vec![
                num(p),
                int(n),
                num(r.p_lo),
                num(r.p_hi),
                s.raw("delta_mode").into(),
                int(r.replicas),
                num(r.fd_mean),
                num(r.fd_stderr),
                num(r.fd_over_n()),
                num(r.sum_mean),
                num(r.sum_stderr),
                num(r.sum_over_n()),
                num(r.mean_geodesic_len),
                num(r.subsample_factor),
                int(r.fd_positive),
                int(r.off_checked),
                int(r.off_violations),
                int(r.off_positive),
            ]);
        }
    }
    Ok(vec![("delta.csv".into(), t)])
}

fn method_name(m: Option<RadiusMethod>) -> String {
    match m {
        Some(RadiusMethod::Exact) => "exact".into(),
        Some(RadiusMethod::Certificate) => "certificate".into(),
        None => String::new(),
    }
}

fn radius_tails<const D: usize>(s: &Settings, config: &ExperimentConfig, rep: &impl Replicator) -> CliResult<Outputs> {
    let mode = s.radius_mode()?;
    let base = s.radius_params(config)?;
    let mut per = Table::new(&["p", "replica", "edge", "radius", "censored_at", "method", "overflowed"]);
    let mut tail = Table::new(&["p", "t", "count_ge", "total", "censored", "survival"]);
    let mut sums = Table::new(&[
        "p",
        "n",
        "sum_over_n",
        "sum_over_n_stderr",
        "length_over_n",
        "length_over_n_stderr",
        "long_fraction",
        "censored",
    ]);
    for &p in &config.p_grid {
        let params = percofpp_core::radius::RadiusParams { p, ..base.clone() };
        let results = radius_ensemble::<D>(config, &params, mode, rep)?;
        for (i, r) in results.iter().enumerate() {
            per.push(vec![
                num(p),
                int(i),
                r.edge.to_string(),
                r.value.map(int).unwrap_or_default(),
                r.censored_at.map(int).unwrap_or_default(),
                method_name(r.method),
                int(r.overflowed),
            ]);
        }
        let grid: Vec<u32> = (1..=params.n_max + 1).collect();
        for row in radius_tail(&results, &grid) {
            let surv = if row.n_total == 0 { f64::NAN } else { row.n_ge_t as f64 / row.n_total as f64 };
            tail.push(vec![num(p), int(row.t), int(row.n_ge_t), int(row.n_total), int(row.n_censored), num(surv)]);
        }
        if s.get::<bool>("path_sum")? {
            for row in path_sum_check::<D>(config, p, &params, mode, rep)? {
                sums.push(vec![
                    num(p),
                    int(row.n),
                    num(row.sum_over_n.mean),
                    num(row.sum_over_n.stderr),
                    num(row.length_over_n.mean),
                    num(row.length_over_n.stderr),
                    num(row.long_fraction),
                    int(row.censored),
                ]);
            }
        }
    }
    let mut out = vec![("radius.csv".to_string(), per), ("radius_tail.csv".to_string(), tail)];
    if s.get::<bool>("path_sum")? {
        out.push(("path_sum.csv".into(), sums));
    }
    Ok(out)
}

fn gap<const D: usize>(config: &ExperimentConfig, rep: &impl Replicator) -> CliResult<Outputs> {
    let mut t = Table::new(&[
        "p",
        "n",
        "m",
        "scale",
        "used",
        "excluded",
        "gap_mean",
        "gap_stderr",
        "first_mean",
        "first_stderr",
        "second_mean",
        "second_stderr",
        "normalized",
        "triangle_violations",
    ]);
    let mut per = Table::new(&["p", "n", "index", "total", "first", "second", "triangle_holds"]);
    for &p in &config.p_grid {
        for row in truncation_gap::<D>(config, p, rep)? {
            t.push(vec![
                num(p),
                int(row.n),
                num(row.m),
                num(row.scale()),
                int(row.used),
                int(row.excluded),
                num(row.total.mean),
                num(row.total.stderr),
                num(row.first.mean),
                num(row.first.stderr),
                num(row.second.mean),
                num(row.second.stderr),
                num(row.normalized()),
                int(row.triangle_violations),
            ]);
            for (i, g) in row.parts.iter().enumerate() {
                per.push(vec![num(p), int(row.n), int(i), num(g.total), num(g.first), num(g.second), int(g.triangle_holds())]);
            }
        }
    }
    Ok(vec![("gap.csv".into(), t), ("gap_replicas.csv".into(), per)])
}

fn animals_cmd<const D: usize>(s: &Settings, rep: &impl Replicator) -> CliResult<Outputs> {
    let rows = animals::bound_check::<D>(
        s.get("q_n")?,
        s.get("animal_n")?,
        &s.get_list::<u32>("l_grid")?,
        s.get("replicas")?,
        s.get("seed")?,
        rep,
    )?;
    let mut t = Table::new(&["l", "n", "q_n", "mean_gamma", "stderr", "ratio"]);
    for r in rows {
        t.push(vec![int(r.l), int(r.n), num(r.q_n), num(r.mean_gamma), num(r.stderr), opt(r.ratio)]);
    }
    Ok(vec![("animals.csv".into(), t)])
}

fn bypass<const D: usize>(s: &Settings, config: &ExperimentConfig, rep: &impl Replicator) -> CliResult<Outputs> {
    let mode = s.radius_mode()?;
    let params = s.radius_params(config)?;
    let per_geodesic: usize = s.get("per_geodesic")?;
    let mut cases = Table::new(&["p", "n", "replica", "edge", "radius", "method", "new_edges", "verified"]);
    let mut summary = Table::new(&[
        "p",
        "n",
        "cases",
        "verified",
        "failed",
        "censored",
        "censored_fraction",
        "infeasible",
        "skipped",
    ]);
    for &n in &config.n_grid {
        for &p in &config.p_grid {
            let b = bypass_batch::<D>(config, p, n, &params, mode, per_geodesic, rep)?;
            for c in &b.records {
                cases.push(vec![
                    num(p),
                    int(n),
                    int(c.replica),
                    c.edge.to_string(),
                    int(c.radius),
                    method_name(c.method),
                    int(c.new_edges),
                    int(c.verified),
                ]);
            }
            summary.push(vec![
                num(p),
                int(n),
                int(b.cases),
                int(b.verified),
                int(b.failed),
                int(b.censored),
                num(b.censored_fraction()),
                int(b.infeasible),
                int(b.skipped),
            ]);
        }
    }
    Ok(vec![("bypass.csv".into(), cases), ("bypass_summary.csv".into(), summary)])
}

fn slln<const D: usize>(s: &Settings, config: &ExperimentConfig) -> CliResult<Outputs> {
    let translates: usize = s.get("translates")?;
    let mut traj = Table::new(&["p", "n", "value"]);
    let mut means = Table::new(&["p", "set", "count", "mean", "stderr"]);
    for &p in &config.p_grid {
        let r = slln_diagnostic::<D>(config, p, translates)?;
        for row in &r.trajectory {
            traj.push(vec![num(p), int(row.n), opt(row.value)]);
        }
        for (k, m) in r.translates.iter().enumerate() {
            means.push(vec![num(p), int(k), int(m.count), num(m.mean), num(m.stderr)]);
        }
    }
    Ok(vec![("slln.csv".into(), traj), ("slln_translates.csv".into(), means)])
}

/// Every distinct sample value, ascending.
pub fn observed_grid(sample: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = sample.iter().copied().filter(|x| !x.is_nan()).collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn push_survival(t: &mut Table, p: f64, n: u32, table: &[SurvivalPoint]) {
    for pt in table {
        t.push(vec![num(p), int(n), num(pt.t), int(pt.count_ge), int(pt.total), num(pt.survival())]);
    }
}

fn tails<const D: usize>(s: &Settings, config: &ExperimentConfig, rep: &impl Replicator) -> CliResult<Outputs> {
    let sampling = TailSampling { sites: s.get("sites")?, walks: s.get("walks")?, walk_len: s.get("walk_len")? };
    let header = ["p", "n", "t", "count_ge", "total", "survival"];
    let (mut hole, mut chem, mut len, mut kesten) =
        (Table::new(&header), Table::new(&header), Table::new(&header), Table::new(&header));
    let mut summary = Table::new(&["p", "n", "seeds", "excluded", "long_geodesic_fraction_4n"]);
    for &n in &config.n_grid {
        for &p in &config.p_grid {
            let t = tail_suite::<D>(config, p, n, sampling, rep)?;
            push_survival(&mut hole, p, n, &t.hole_table(&observed_grid(&t.hole)));
            push_survival(&mut chem, p, n, &t.chemical_table(&observed_grid(&t.chemical)));
            push_survival(&mut len, p, n, &t.length_table(&observed_grid(&t.geodesic_len)));
            push_survival(&mut kesten, p, n, &t.kesten_table(&observed_grid(&t.kesten)));
            summary.push(vec![num(p), int(n), int(t.seeds), int(t.excluded), num(t.long_geodesic_fraction(4.0))]);
        }
    }
    Ok(vec![
        ("tails_hole.csv".into(), hole),
        ("tails_chemical.csv".into(), chem),
        ("tails_length.csv".into(), len),
        ("tails_kesten.csv".into(), kesten),
        ("tails_summary.csv".into(), summary),
    ])
}
