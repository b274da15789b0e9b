//! The four command verbs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use levywalk::io::{write_jump_frame, write_path_frame, write_positions_csv};
use levywalk::stats::{Provenance, VerificationRecord};
use levywalk::{empirical_cf, msd, Ensemble, HeavyTailLaw, WalkKind};

use crate::config::{ModelKind, RunConfig};
use crate::ensemble::{par_map, pool, Limit, Walk};
use crate::error::{CliError, CliResult};
use crate::manifest::{
    digest_file, ensure_dir, write_output, OutputDigest, RunManifest, StreamRecord, ARTIFACT,
    VERSION,
};
use crate::suites::{self, SuiteReport};

fn thread_count(cfg: &RunConfig) -> usize {
    cfg.threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn finish(
    cfg: &RunConfig,
    command: &str,
    tag: Option<&str>,
    started: (SystemTime, Instant),
    streams: Vec<StreamRecord>,
    outputs: Vec<OutputDigest>,
    diagnostics: BTreeMap<String, f64>,
) -> CliResult<(PathBuf, RunManifest)> {
    let manifest = RunManifest {
        artifact: ARTIFACT.into(),
        version: VERSION.into(),
        command: command.into(),
        config: cfg.clone(),
        threads: thread_count(cfg),
        started_unix: started
            .0
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        wall_clock_seconds: started.1.elapsed().as_secs_f64(),
        streams,
        outputs,
        diagnostics,
    };
    let path = RunManifest::manifest_path(cfg, tag);
    manifest.write(&path)?;
    Ok((path, manifest))
}

fn now() -> (SystemTime, Instant) {
    (SystemTime::now(), Instant::now())
}

/// Pre-limit ensembles: positions at the configured times.
pub fn simulate(cfg: &RunConfig) -> CliResult<(PathBuf, RunManifest)> {
    cfg.validate()?;
    let started = now();
    let kind = cfg.model.kind;
    let walk = match kind {
        ModelKind::Lw | ModelKind::Olw => Walk::Pareto {
            law: HeavyTailLaw::new(cfg.alpha().expect("validated"))?,
            kind: if kind == ModelKind::Lw {
                WalkKind::Lw
            } else {
                WalkKind::Olw
            },
            n: cfg.model.n.unwrap_or(1.0),
        },
        ModelKind::Glw | ModelKind::Golw => Walk::Conditional {
            mixing: cfg.mixing().expect("validated"),
            kind: if kind == ModelKind::Glw {
                WalkKind::Glw
            } else {
                WalkKind::Golw
            },
            n: cfg.model.n.expect("validated") as u64,
        },
        _ => {
            return Err(CliError::config(
                "model.kind",
                format!("`{}` is a limit model; use `limit`", kind.name()),
            ))
        }
    };
    let p = pool(cfg.threads)?;
    let stage = kind.name();
    let times = &cfg.run.times;
    let rows = par_map(&p, cfg.seed, stage, cfg.run.paths, |_, s| {
        walk.positions(&cfg.direction, times, s)
    })?;
    let dir = &cfg.output.dir;
    ensure_dir(dir)?;
    let prefix = &cfg.output.prefix;
    let mut outputs = vec![write_output(
        dir,
        &format!("{prefix}_positions.csv"),
        |w| write_positions_csv(cfg.dim(), times, &rows, w),
    )?];
    drop(rows);
    if cfg.output.binary {
        let t_max = times.last().copied().unwrap_or(0.0);
        let paths = par_map(&p, cfg.seed, stage, cfg.run.paths, |_, s| {
            walk.path(&cfg.direction, t_max, s)
        })?;
        outputs.push(write_output(dir, &format!("{prefix}_paths.lwf"), |w| {
            write_path_frame(&paths, cfg.seed, w).map_err(std::io::Error::other)
        })?);
    }
    finish(
        cfg,
        "simulate",
        None,
        started,
        vec![StreamRecord::new(cfg.seed, stage, cfg.run.paths)],
        outputs,
        BTreeMap::new(),
    )
}

/// Limit ensembles under the configured scenario.
pub fn limit(cfg: &RunConfig) -> CliResult<(PathBuf, RunManifest)> {
    cfg.validate()?;
    if !cfg.model.kind.is_limit() {
        return Err(CliError::config(
            "model.kind",
            format!(
                "`{}` is a pre-limit walk; use `simulate`",
                cfg.model.kind.name()
            ),
        ));
    }
    let started = now();
    let law = cfg.subordinator()?;
    let limit = Limit::new(
        law,
        cfg.direction.clone(),
        cfg.eps(),
        cfg.run.tau_step.unwrap_or(1.0),
    )?;
    let p = pool(cfg.threads)?;
    let stage = cfg.model.kind.name();
    let times = &cfg.run.times;
    let level = times.last().copied().unwrap_or(0.0);
    let scenario = cfg.scenario();
    let rows = par_map(&p, cfg.seed, stage, cfg.run.paths, |_, s| {
        let list = limit.jumps(level, s)?;
        let x = limit_positions(&list, times, scenario)?;
        Ok((x, list.len()))
    })?;
    let mean_jumps = rows.iter().map(|r| r.1 as f64).sum::<f64>() / rows.len() as f64;
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.0).collect();
    let dir = &cfg.output.dir;
    ensure_dir(dir)?;
    let prefix = &cfg.output.prefix;
    let mut outputs = vec![write_output(
        dir,
        &format!("{prefix}_positions.csv"),
        |w| write_positions_csv(cfg.dim(), times, &rows, w),
    )?];
    drop(rows);
    if cfg.output.binary {
        let lists = par_map(&p, cfg.seed, stage, cfg.run.paths, |_, s| {
            limit.jumps(level, s)
        })?;
        outputs.push(write_output(dir, &format!("{prefix}_jumps.lwf"), |w| {
            write_jump_frame(&lists, cfg.seed, w).map_err(std::io::Error::other)
        })?);
    }
    let diagnostics = BTreeMap::from([
        ("eps".to_string(), cfg.eps()),
        ("tail_mass".to_string(), limit.sampler.intensity()),
        ("small_jump_drift".to_string(), limit.sampler.drift_s()),
        ("mean_jumps_per_path".to_string(), mean_jumps),
    ]);
    finish(
        cfg,
        "limit",
        None,
        started,
        vec![StreamRecord::new(cfg.seed, stage, cfg.run.paths)],
        outputs,
        diagnostics,
    )
}

fn limit_positions(
    list: &levywalk::CoupledJumpList,
    times: &[f64],
    scenario: levywalk::Scenario,
) -> levywalk::Result<Vec<f64>> {
    let mut out = Vec::with_capacity(times.len() * list.dim());
    for &t in times {
        out.extend(levywalk::limit_position(list, t, scenario)?);
    }
    Ok(out)
}

/// Runs a verification suite and writes its JSON report. A failing probe is
/// reported as [`CliError::Verification`] after the report is written.
pub fn verify(cfg: &RunConfig) -> CliResult<(PathBuf, RunManifest, SuiteReport)> {
    cfg.validate()?;
    let name = cfg
        .verify
        .suite
        .clone()
        .ok_or_else(|| CliError::config("verify.suite", "no suite named"))?;
    suites::check_name(&name)?;
    let started = now();
    let (report, streams) = suites::run(cfg)?;
    let dir = &cfg.output.dir;
    ensure_dir(dir)?;
    let json = report.to_json();
    let out = write_output(dir, &format!("{}_{name}.json", cfg.output.prefix), |w| {
        w.write_all(json.as_bytes())
    })?;
    let (path, manifest) = finish(
        cfg,
        "verify",
        Some(&name),
        started,
        streams,
        vec![out],
        BTreeMap::new(),
    )?;
    Ok((path, manifest, report))
}

/// Index of the merged tables written by [`report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportManifest {
    pub artifact: String,
    pub version: String,
    pub inputs: Vec<ReportInput>,
    pub outputs: Vec<OutputDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportInput {
    pub manifest: String,
    pub sha256: String,
    pub model: String,
    pub seed: u64,
}

struct Positions {
    dim: usize,
    by_time: BTreeMap<u64, Vec<f64>>,
}

fn read_positions(path: &Path) -> CliResult<Positions> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad =
        |line: usize, what: &str| CliError::Other(format!("{}:{line}: {what}", path.display()));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "trajectory_id" || cols[1] != "t" {
        return Err(bad(1, "not a positions table"));
    }
    let dim = cols.len() - 2;
    let mut by_time: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(i + 2, "unparsable number"))?;
        if f.len() != dim + 1 {
            return Err(bad(i + 2, "wrong number of columns"));
        }
        by_time
            .entry(f[0].to_bits())
            .or_default()
            .extend_from_slice(&f[1..]);
    }
    Ok(Positions { dim, by_time })
}

/// Wave numbers of the ECF table, along the first axis.
pub const REPORT_K: [f64; 9] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0];

/// Merges manifests and their outputs into tidy CSV tables in `out`.
pub fn report(inputs: &[PathBuf], out: &Path) -> CliResult<(PathBuf, ReportManifest)> {
    if inputs.is_empty() {
        return Err(CliError::config("inputs", "no manifests given"));
    }
    let missing: Vec<String> = inputs
        .iter()
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::MissingInputs(missing));
    }
    let mut loaded = Vec::new();
    let mut missing = Vec::new();
    for path in inputs {
        let m = RunManifest::load(path)?;
        match m.verify_outputs(path) {
            Ok(files) => loaded.push((path.clone(), m, files)),
            Err(CliError::MissingInputs(v)) => missing.extend(v),
            Err(e) => return Err(e),
        }
    }
    if !missing.is_empty() {
        return Err(CliError::MissingInputs(missing));
    }
    ensure_dir(out)?;
    let mut msd_rows = String::from("source,model,seed,t,msd,stderr,t_squared\n");
    let mut ecf_rows = String::from("source,model,seed,t,k,ecf_re,ecf_im,stderr\n");
    let mut dist_rows = String::from("source,suite,model,seed,n,distance,tolerance,pass\n");
    let mut ver_rows = String::from(
        "source,suite,model,seed,point,theory_re,theory_im,mc_re,mc_im,stderr,tolerance,pass\n",
    );
    let mut index = Vec::new();
    for (path, m, files) in &loaded {
        let source = path
            .file_name()
            .map_or_else(String::new, |f| f.to_string_lossy().into_owned());
        let model = m.config.model.kind.name();
        let seed = m.config.seed;
        index.push(ReportInput {
            manifest: path.display().to_string(),
            sha256: digest_file(path)?.0,
            model: model.into(),
            seed,
        });
        for f in files {
            let name = f.to_string_lossy();
            if name.ends_with("_positions.csv") {
                let pos = read_positions(f)?;
                for (tbits, samples) in pos.by_time {
                    let t = f64::from_bits(tbits);
                    let meta = Provenance {
                        model: model.into(),
                        parameters: BTreeMap::new(),
                        seed,
                    };
                    let e = Ensemble::new(pos.dim, t, samples, meta)?;
                    let r = msd(&e);
                    msd_rows += &format!(
                        "{source},{model},{seed},{t:e},{:e},{:e},{:e}\n",
                        r.value,
                        r.stderr,
                        t * t
                    );
                    for k in REPORT_K {
                        let mut kv = vec![0.0; pos.dim];
                        kv[0] = k;
                        let c = empirical_cf(&e, &kv)?;
                        ecf_rows += &format!(
                            "{source},{model},{seed},{t:e},{k:e},{:e},{:e},{:e}\n",
                            c.value.re, c.value.im, c.stderr
                        );
                    }
                }
            } else if name.ends_with(".json") {
                let text = std::fs::read_to_string(f).map_err(|e| CliError::io(f, e))?;
                let rep: SuiteReport = serde_json::from_str(&text).map_err(|e| {
                    CliError::Other(format!("{}: not a verification report: {e}", f.display()))
                })?;
                for r in &rep.records {
                    ver_rows += &verification_row(&source, seed, r);
                    if let Some(n) = r.point.get("n") {
                        if rep.suite.ends_with("-convergence") {
                            dist_rows += &format!(
                                "{source},{},{},{seed},{n:e},{:e},{:e},{}\n",
                                r.suite,
                                quote(&r.model),
                                r.monte_carlo.re,
                                r.tolerance,
                                r.pass
                            );
                        }
                    }
                }
            }
        }
    }
    let mut outputs = Vec::new();
    for (name, body) in [
        ("msd_vs_t.csv", msd_rows),
        ("ecf_vs_k.csv", ecf_rows),
        ("distance_vs_n.csv", dist_rows),
        ("verification.csv", ver_rows),
    ] {
        outputs.push(write_output(out, name, |w| w.write_all(body.as_bytes()))?);
    }
    let manifest = ReportManifest {
        artifact: ARTIFACT.into(),
        version: VERSION.into(),
        inputs: index,
        outputs,
    };
    let path = out.join("report_manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok((path, manifest))
}

fn quote(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verification_row(source: &str, seed: u64, r: &VerificationRecord) -> String {
    let point: Vec<String> = r.point.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let th = Complex64::new(r.theory.re, r.theory.im);
    let mc = Complex64::new(r.monte_carlo.re, r.monte_carlo.im);
    format!(
        "{source},{},{},{seed},{},{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
        r.suite,
        quote(&r.model),
        quote(&point.join(";")),
        th.re,
        th.im,
        mc.re,
        mc.im,
        r.stderr,
        r.tolerance,
        r.pass
    )
}
