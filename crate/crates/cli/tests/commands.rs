use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use levywalk::limit::Crossing;
use levywalk::{CoupledJumpSampler, DirectionMeasure, RngStream, Scenario, SubordinatorLaw};
use levywalk_cli::commands::{limit, report, simulate, verify};
use levywalk_cli::{RunConfig, RunManifest};

const GLW: &str = r#"
seed = 7

[model]
kind = "glw"
gamma = 0.5
b = 2.0
n = 1000

[direction]
kind = "uniform"
dim = 2

[run]
paths = 10000
times = [0.5, 1.0]
"#;

const LIMIT: &str = r#"
seed = 3

[model]
kind = "limit-stable"
alpha = 0.5
eps = 1e-3

[direction]
kind = "uniform"
dim = 2

[run]
paths = 2000
times = [0.5, 1.0, 2.0, 5.0]
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levywalk"))
}

fn config(text: &str, dir: &Path, prefix: &str) -> RunConfig {
    let mut c = RunConfig::parse(text).unwrap();
    c.output.dir = dir.to_path_buf();
    c.output.prefix = prefix.into();
    c
}

fn write_config(c: &RunConfig, path: &Path) -> PathBuf {
    std::fs::write(path, c.to_toml()).unwrap();
    path.to_path_buf()
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn simulate_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = config(GLW, &dir.path().join("a"), "glw");
    let b = config(GLW, &dir.path().join("b"), "glw");
    let (pa, ma) = simulate(&a).unwrap();
    let (_, mb) = simulate(&b).unwrap();
    assert_eq!(ma.outputs, mb.outputs);
    let bytes_a = std::fs::read(dir.path().join("a/glw_positions.csv")).unwrap();
    let bytes_b = std::fs::read(dir.path().join("b/glw_positions.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);
    // every output is reachable from its manifest
    RunManifest::load(&pa).unwrap().verify_outputs(&pa).unwrap();
}

#[test]
fn binary_frames_are_listed_in_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(GLW, dir.path(), "glw");
    c.run.paths = 50;
    c.output.binary = true;
    let (path, m) = simulate(&c).unwrap();
    assert!(m.outputs.iter().any(|o| o.file == "glw_paths.lwf"));
    RunManifest::load(&path)
        .unwrap()
        .verify_outputs(&path)
        .unwrap();
    let f = std::fs::File::open(dir.path().join("glw_paths.lwf")).unwrap();
    let (_, paths) = levywalk::io::read_path_frame(std::io::BufReader::new(f)).unwrap();
    assert_eq!(paths.len(), 50);
}

#[test]
fn invalid_configs_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write_config(
        &config(&GLW.replace("paths = 10000", "paths = 1"), dir.path(), "z"),
        &dir.path().join("z.toml"),
    );
    let out = run(bin()
        .args(["simulate", "--config"])
        .arg(&zero)
        .args(["--paths", "0"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run.paths"));

    let bad_b = dir.path().join("b.toml");
    std::fs::write(&bad_b, GLW.replace("b = 2.0", "b = 1.0")).unwrap();
    let out = run(bin().args(["simulate", "--config"]).arg(&bad_b));
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.contains("model.b") && msg.contains("∫₀¹ p(β)/(1−β) dβ < ∞"),
        "{msg}"
    );

    let unknown = run(bin()
        .args(["verify", "--config"])
        .arg(&zero)
        .args(["--suite", "nonsense"]));
    assert_eq!(unknown.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&unknown.stderr);
    assert!(
        msg.contains("coupled-cf") && msg.contains("glw-convergence"),
        "{msg}"
    );
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let mut c = config(GLW, &blocker.join("sub"), "g");
    c.run.paths = 10;
    let cfg = write_config(&c, &dir.path().join("c.toml"));
    let out = run(bin().args(["simulate", "--config"]).arg(&cfg));
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn env_and_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(GLW, dir.path(), "env");
    c.run.paths = 20;
    let cfg = write_config(&c, &dir.path().join("c.toml"));
    let out = run(bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .env("LEVYWALK_SEED", "99")
        .env("LEVYWALK_THREADS", "2"));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = RunManifest::load(&dir.path().join("env_manifest.json")).unwrap();
    assert_eq!((m.config.seed, m.threads), (99, 2));
    let out = run(bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--seed", "5"])
        .env("LEVYWALK_SEED", "99"));
    assert!(out.status.success());
    let m = RunManifest::load(&dir.path().join("env_manifest.json")).unwrap();
    assert_eq!(m.config.seed, 5);
}

#[test]
fn wait_first_limit_output_respects_the_cone() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(LIMIT, dir.path(), "lim");
    limit(&c).unwrap();
    let rows = read_rows(&dir.path().join("lim_positions.csv"));
    assert_eq!(rows.len(), 2000 * 4);
    for r in rows {
        let t = r[1];
        assert!(r[2].hypot(r[3]) <= t * (1.0 + 1e-12), "{r:?}");
    }
}

#[test]
fn halving_eps_scales_the_jump_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = config(LIMIT, dir.path(), "eps1");
    let mut b = config(LIMIT, dir.path(), "eps2");
    b.model.eps = Some(5e-4);
    let (_, ma) = limit(&a).unwrap();
    let (_, mb) = limit(&b).unwrap();
    let ratio = mb.diagnostics["tail_mass"] / ma.diagnostics["tail_mass"];
    assert!((ratio - 2f64.sqrt()).abs() < 1e-9, "{ratio}");
    let jumps = mb.diagnostics["mean_jumps_per_path"] / ma.diagnostics["mean_jumps_per_path"];
    println!("mean jump count ratio after halving eps: {jumps:.3} (tail mass ratio {ratio:.3})");
}

#[test]
fn scenarios_differ_only_at_straddling_jumps() {
    let dir = tempfile::tempdir().unwrap();
    let mut wf = config(LIMIT, dir.path(), "wf");
    wf.run.paths = 300;
    let mut jf = wf.clone();
    jf.output.prefix = "jf".into();
    jf.model.scenario = Some(Scenario::JumpFirst);
    limit(&wf).unwrap();
    limit(&jf).unwrap();
    let a = read_rows(&dir.path().join("wf_positions.csv"));
    let b = read_rows(&dir.path().join("jf_positions.csv"));
    // replay the lists to classify each crossing
    let sampler = CoupledJumpSampler::new(
        SubordinatorLaw::stable(0.5).unwrap(),
        DirectionMeasure::uniform(2).unwrap(),
        1e-3,
    )
    .unwrap();
    let (mut same, mut differ) = (0, 0);
    for (ra, rb) in a.iter().zip(&b) {
        let i = ra[0] as u64;
        let list = sampler
            .sample_covering(
                5.0,
                1.0,
                &mut RngStream::for_stage(3, "limit-stable", i).rng(),
            )
            .unwrap();
        let straddle = matches!(list.crossing(ra[1]).unwrap(), Crossing::Jump(_));
        if ra[2..] == rb[2..] {
            assert!(!straddle);
            same += 1;
        } else {
            assert!(straddle);
            differ += 1;
        }
    }
    assert!(same > 0 && differ > 0);
}

#[test]
fn normalization_suite_passes_and_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(LIMIT, dir.path(), "v");
    c.verify.suite = Some("normalization".into());
    let (path, m, rep) = verify(&c).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.records.len(), 6);
    assert!(path.ends_with("v_normalization_manifest.json"));
    assert_eq!(m.outputs[0].file, "v_normalization.json");
}

#[test]
fn failing_suite_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(LIMIT, dir.path(), "f");
    c.run.paths = 50;
    // the closed-form jump-first transform disagrees with the simulated ensemble
    c.verify.suite = Some("governing-jump-first".into());
    c.verify.laplace_steps = Some(200);
    c.verify.k = Some(vec![1.0]);
    c.verify.s = Some(vec![1.0]);
    let cfg = write_config(&c, &dir.path().join("c.toml"));
    let out = run(bin().args(["verify", "--config"]).arg(&cfg));
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("f_governing-jump-first.json").is_file());
}

#[test]
fn report_merges_tables() {
    let dir = tempfile::tempdir().unwrap();
    let lw = |seed: u64, prefix: &str| {
        let text = format!(
            "seed = {seed}\n[model]\nkind = \"lw\"\nalpha = 0.5\n[direction]\nkind = \"uniform\"\ndim = 2\n\
             [run]\npaths = 2000\ntimes = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]\n"
        );
        config(&text, dir.path(), prefix)
    };
    let (m1, _) = simulate(&lw(1, "s1")).unwrap();
    let (m2, _) = simulate(&lw(2, "s2")).unwrap();
    let out = dir.path().join("report");
    let (_, rm) = report(&[m1.clone(), m2.clone()], &out).unwrap();
    assert_eq!(
        rm.inputs.iter().map(|i| i.seed).collect::<Vec<_>>(),
        vec![1, 2]
    );
    let msd = std::fs::read_to_string(out.join("msd_vs_t.csv")).unwrap();
    let mut seeds = std::collections::BTreeSet::new();
    for line in msd.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        seeds.insert(f[2].to_string());
        let (msd, t2): (f64, f64) = (f[4].parse().unwrap(), f[6].parse().unwrap());
        assert!(msd <= t2 * (1.0 + 1e-12), "{line}");
    }
    assert_eq!(seeds.len(), 2);
    assert_eq!(msd.lines().count(), 1 + 20);

    let empty = run(bin().args(["report", "--out"]).arg(&out));
    assert_eq!(empty.status.code(), Some(2));

    std::fs::remove_file(dir.path().join("s1_positions.csv")).unwrap();
    let ghost = dir.path().join("ghost_manifest.json");
    let missing = run(bin()
        .args(["report", "--out"])
        .arg(&out)
        .arg(&m1)
        .arg(&ghost));
    assert_eq!(missing.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("ghost_manifest.json"));
    let missing = run(bin().args(["report", "--out"]).arg(&out).arg(&m1).arg(&m2));
    assert_eq!(missing.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("s1_positions.csv"));

    std::fs::write(dir.path().join("s2_positions.csv"), "tampered").unwrap();
    let tampered = run(bin().args(["report", "--out"]).arg(&out).arg(&m2));
    assert_eq!(tampered.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&tampered.stderr).contains("digest mismatch"));
}

#[test]
fn report_collects_distances_from_verification_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(
        &LIMIT.replace(
            "kind = \"uniform\"\ndim = 2",
            "kind = \"atoms\"\natoms = [[1.0], [-1.0]]\nweights = [0.5, 0.5]",
        ),
        dir.path(),
        "conv",
    );
    c.run.paths = 500;
    c.run.times = vec![1.0];
    c.verify.suite = Some("lw-convergence".into());
    c.verify.n_values = Some(vec![10.0, 100.0]);
    let (m, _, _) = verify(&c).unwrap();
    let out = dir.path().join("rep");
    report(&[m], &out).unwrap();
    let table = std::fs::read_to_string(out.join("distance_vs_n.csv")).unwrap();
    assert_eq!(table.lines().count(), 3, "{table}");
    assert!(table.lines().nth(1).unwrap().contains("lw-convergence"));
}
