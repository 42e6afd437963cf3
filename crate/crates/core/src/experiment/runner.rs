use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::preset::{ExperimentPreset, SweepAxis};
use super::snapshot::export_snapshot;
use crate::analysis::{
    gated_path_samples, metrics_csv, path_lifetime, population_fractions, sensing_lifetime, stimuli_csv,
    summarize_path_lengths, RoundMetrics, StimulusRecord, PATH_GATE, TRAILING_WINDOW,
};
use crate::error::{Result, SandError};
use crate::sim::{Mode, SimConfig, Simulation};

/// Everything one run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: SimConfig,
    pub metrics: Vec<RoundMetrics>,
    pub stimuli: Vec<StimulusRecord>,
    /// `(round, snapshot text)`.
    pub snapshots: Vec<(u64, String)>,
}

/// Figures of merit of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub sensing_lifetime: u64,
    pub path_lifetime: u64,
    /// Gated hop samples.
    pub path_samples: Vec<u32>,
    pub last: RoundMetrics,
}

impl RunOutcome {
    pub fn stats(&self) -> RunStats {
        let horizon = self.config.rounds;
        RunStats {
            sensing_lifetime: sensing_lifetime(&self.stimuli, horizon),
            path_lifetime: path_lifetime(&self.stimuli, horizon),
            path_samples: gated_path_samples(&self.stimuli, TRAILING_WINDOW, PATH_GATE),
            last: self.metrics.last().cloned().unwrap_or_default(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| SandError::io(dir, e))?;
        let put = |name: &str, body: &str| {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| SandError::io(p, e))
        };
        put("config.txt", &self.config.to_config_string())?;
        put("metrics.csv", &metrics_csv(&self.metrics))?;
        put("stimuli.csv", &stimuli_csv(&self.stimuli))?;
        for (round, text) in &self.snapshots {
            put(&format!("snapshot-r{round}.txt"), text)?;
        }
        Ok(())
    }
}

/// Run one configuration to completion, capturing snapshots after the
/// listed rounds.
pub fn run_single(config: &SimConfig, snapshot_rounds: &[u64]) -> Result<RunOutcome> {
    let mut sim = Simulation::new(config.clone())?;
    let mut metrics = Vec::with_capacity(config.rounds as usize);
    let mut snapshots = Vec::new();
    while !sim.is_finished() {
        let round = sim.round();
        metrics.push(sim.run_round().metrics);
        if snapshot_rounds.contains(&round) {
            snapshots.push((round, export_snapshot(sim.deployment(), round)));
        }
    }
    Ok(RunOutcome {
        config: config.clone(),
        metrics,
        stimuli: sim.stimulus_log().to_vec(),
        snapshots,
    })
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replications per point; the preset default when absent.
    pub seeds: Option<usize>,
    pub out: PathBuf,
    /// Scenario-file text applied to the preset base before the sweep value.
    pub overrides: Option<String>,
}

/// One resolved run of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedRun {
    /// Directory relative to the preset output directory.
    pub dir: String,
    pub config: SimConfig,
}

/// Mean figures over the seeds of one (value, mode) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub value: String,
    pub mode: Mode,
    pub runs: usize,
    pub sensing_lifetime: f64,
    pub path_lifetime: f64,
    /// Pooled over all gated samples of the point.
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub path_samples: usize,
    pub last_round: u64,
    pub mean_energy: Option<f64>,
    pub active_fraction: f64,
    pub forwarding_count: f64,
    pub router_count: f64,
    pub gateway_count: f64,
    pub sleep_count: f64,
    pub dead_count: f64,
}

impl SummaryRow {
    pub const CSV_HEADER: &'static str = "value,mode,runs,sensing_lifetime,path_lifetime,tau,sigma,path_samples,\
last_round,mean_energy,active_fraction,forwarding_count,router_count,gateway_count,sleep_count,dead_count";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        format!(
            "{},{},{},{:.2},{:.2},{},{},{},{},{},{:.4},{:.2},{:.2},{:.2},{:.2},{:.2}",
            self.value,
            self.mode,
            self.runs,
            self.sensing_lifetime,
            self.path_lifetime,
            opt(self.tau),
            opt(self.sigma),
            self.path_samples,
            self.last_round,
            opt(self.mean_energy),
            self.active_fraction,
            self.forwarding_count,
            self.router_count,
            self.gateway_count,
            self.sleep_count,
            self.dead_count,
        )
    }
}

/// Aggregate per-run stats, grouped by point in first-seen order.
pub fn summarize(axis: SweepAxis, runs: &[(SimConfig, RunStats)]) -> Vec<SummaryRow> {
    let mut groups: Vec<((String, Mode), Vec<&RunStats>)> = Vec::new();
    for (config, stats) in runs {
        let key = (config.get(axis.key()).unwrap_or_default(), config.mode);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(stats),
            None => groups.push((key, vec![stats])),
        }
    }
    groups
        .into_iter()
        .map(|((value, mode), stats)| {
            let n = stats.len() as f64;
            let mean = |f: &dyn Fn(&RunStats) -> f64| stats.iter().map(|s| f(s)).sum::<f64>() / n;
            let pooled: Vec<u32> = stats.iter().flat_map(|s| s.path_samples.iter().copied()).collect();
            let summary = summarize_path_lengths(&pooled);
            let energies: Vec<f64> = stats
                .iter()
                .filter_map(|s| s.last.mean_remaining_energy_alive)
                .collect();
            SummaryRow {
                value,
                mode,
                runs: stats.len(),
                sensing_lifetime: mean(&|s| s.sensing_lifetime as f64),
                path_lifetime: mean(&|s| s.path_lifetime as f64),
                tau: summary.map(|p| p.tau),
                sigma: summary.map(|p| p.sigma),
                path_samples: pooled.len(),
                last_round: stats.iter().map(|s| s.last.round).max().unwrap_or(0),
                mean_energy: (!energies.is_empty()).then(|| energies.iter().sum::<f64>() / energies.len() as f64),
                active_fraction: mean(&|s| population_fractions(&s.last).active_over_total),
                forwarding_count: mean(&|s| (s.last.router_count + s.last.gateway_count) as f64),
                router_count: mean(&|s| s.last.router_count as f64),
                gateway_count: mean(&|s| s.last.gateway_count as f64),
                sleep_count: mean(&|s| s.last.sleep_count as f64),
                dead_count: mean(&|s| s.last.dead_count as f64),
            }
        })
        .collect()
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(SummaryRow::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Resolve every run of a preset.
pub fn plan(preset: &ExperimentPreset, seeds: usize, overrides: Option<&str>) -> Result<Vec<PlannedRun>> {
    let mut out = Vec::new();
    for (value, mode) in preset.points() {
        for seed in 0..seeds as u64 {
            let config = preset.resolve(overrides, &value, mode, seed)?;
            out.push(PlannedRun {
                dir: format!("{}={}/{}/seed-{}", preset.axis.key(), value, mode, seed),
                config,
            });
        }
    }
    Ok(out)
}

/// Result of a preset run or replay.
#[derive(Debug, Clone)]
pub struct PresetReport {
    pub dir: PathBuf,
    pub runs: usize,
    pub summary: Vec<SummaryRow>,
}

/// Plain-text record of a preset run, sufficient to repeat it exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub preset: String,
    pub axis: SweepAxis,
    pub seeds: usize,
    pub snapshot_rounds: Vec<u64>,
    pub runs: Vec<PlannedRun>,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "preset = {}", self.preset);
        let _ = writeln!(s, "axis = {}", self.axis.key());
        let _ = writeln!(s, "seeds = {}", self.seeds);
        let rounds: Vec<String> = self.snapshot_rounds.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "snapshot_rounds = {}", rounds.join(","));
        for r in &self.runs {
            let _ = writeln!(s, "run {}", r.dir);
            s.push_str(&r.config.to_config_string());
            s.push_str("end\n");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| SandError::Manifest(m);
        let mut lines = text.lines();
        let mut header = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing `{key}`")))?;
            line.strip_prefix(key)
                .and_then(|r| r.trim_start().strip_prefix('='))
                .map(|v| v.trim().to_string())
                .ok_or_else(|| bad(format!("expected `{key} = ...`, got `{line}`")))
        };
        let preset = header("preset")?;
        let axis_name = header("axis")?;
        let axis = SweepAxis::parse(&axis_name).ok_or_else(|| bad(format!("unknown axis `{axis_name}`")))?;
        let seeds = header("seeds")?
            .parse()
            .map_err(|_| bad("seeds is not a number".into()))?;
        let snapshot_rounds = header("snapshot_rounds")?
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse().map_err(|_| bad(format!("bad snapshot round `{s}`"))))
            .collect::<Result<Vec<u64>>>()?;
        let mut runs = Vec::new();
        let mut current: Option<(String, String)> = None;
        for line in lines {
            match (&mut current, line) {
                (None, l) if l.starts_with("run ") => current = Some((l[4..].trim().to_string(), String::new())),
                (None, l) if l.trim().is_empty() => {}
                (None, l) => return Err(bad(format!("unexpected line `{l}`"))),
                (Some(_), "end") => {
                    let (dir, body) = current.take().unwrap_or_default();
                    if dir.contains("..") || dir.starts_with('/') {
                        return Err(bad(format!("run directory `{dir}` escapes the output directory")));
                    }
                    runs.push(PlannedRun {
                        dir,
                        config: SimConfig::parse(&body)?,
                    });
                }
                (Some((_, body)), l) => {
                    body.push_str(l);
                    body.push('\n');
                }
            }
        }
        if current.is_some() {
            return Err(bad("unterminated run block".into()));
        }
        Ok(Self {
            preset,
            axis,
            seeds,
            snapshot_rounds,
            runs,
        })
    }
}

/// Run every planned run in parallel, write per-run files, the summary and
/// the manifest under `dir`.
pub fn execute(manifest: &Manifest, dir: &Path) -> Result<PresetReport> {
    fs::create_dir_all(dir).map_err(|e| SandError::io(dir, e))?;
    let results: Vec<Result<(SimConfig, RunStats)>> = manifest
        .runs
        .par_iter()
        .map(|r| {
            let outcome = run_single(&r.config, &manifest.snapshot_rounds)?;
            outcome.write(&dir.join(&r.dir))?;
            Ok((r.config.clone(), outcome.stats()))
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let summary = summarize(manifest.axis, &results);
    let write = |name: &str, body: String| {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| SandError::io(p, e))
    };
    write("summary.csv", summary_csv(&summary))?;
    write("manifest.txt", manifest.to_text())?;
    Ok(PresetReport {
        dir: dir.to_path_buf(),
        runs: results.len(),
        summary,
    })
}

/// Run a preset under `opts.out/<preset name>`.
pub fn run_preset(preset: &ExperimentPreset, opts: &RunOptions) -> Result<PresetReport> {
    let seeds = opts.seeds.unwrap_or(preset.seeds);
    let manifest = Manifest {
        preset: preset.name.to_string(),
        axis: preset.axis,
        seeds,
        snapshot_rounds: preset.snapshot_rounds.clone(),
        runs: plan(preset, seeds, opts.overrides.as_deref())?,
    };
    execute(&manifest, &opts.out.join(preset.name))
}

/// Re-run a manifest. Output goes next to the manifest unless `out` is
/// given.
pub fn replay(manifest_path: &Path, out: Option<&Path>) -> Result<PresetReport> {
    let text = fs::read_to_string(manifest_path).map_err(|e| SandError::io(manifest_path, e))?;
    let manifest = Manifest::parse(&text)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => manifest_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    execute(&manifest, &dir)
}

/// Re-simulate the run stored in `run_dir` up to `round` and return its
/// snapshot.
pub fn snapshot_from_run(run_dir: &Path, round: u64) -> Result<String> {
    let path = run_dir.join("config.txt");
    let text = fs::read_to_string(&path).map_err(|e| SandError::io(&path, e))?;
    let config = SimConfig::parse(&text)?;
    if round >= config.rounds {
        return Err(crate::error::ConfigError::Invalid(format!(
            "round {round} is past the end of a {}-round run",
            config.rounds
        ))
        .into());
    }
    let mut sim = Simulation::new(config)?;
    while sim.round() <= round {
        sim.run_round();
    }
    Ok(export_snapshot(sim.deployment(), round))
}
