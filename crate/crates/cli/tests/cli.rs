use std::path::Path;
use std::process::{Command, Output};

use tensor_surrogate::pipeline::SurrogateModel;
use tensor_surrogate::tt::{read_tt, write_tt};
use tensor_surrogate_cli::bench::{BenchSummary, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ttsurrogate"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const TOY: &str = r#"{
    "schema_version": 1,
    "experiment": "custom",
    "grid": [ { "name": "a", "min": 0, "max": 1, "points": 8 },
              { "name": "b", "min": -1, "max": 1, "points": 4 } ],
    "target": { "kind": "exponential", "weights": [0.5, -0.25] },
    "train": { "rank": 1, "sweeps": 2, "seed": 3, "validation_samples": 16 },
    "test_size": 50
}"#;

fn desk(experiment: &str, points: [usize; 5], extra: &str) -> String {
    let [s1, s2, k, r, t] = points;
    format!(
        r#"{{
        "schema_version": 1,
        "experiment": "{experiment}",
        "grid": [
            {{ "name": "spot1", "min": 5, "max": 150, "points": {s1} }},
            {{ "name": "spot2", "min": 5, "max": 150, "points": {s2} }},
            {{ "name": "strike", "min": 1, "max": 200, "points": {k} }},
            {{ "name": "rate", "min": 0.005, "max": 0.08, "points": {r} }},
            {{ "name": "ttm", "min": 0.00273972602739726, "max": 3, "points": {t} }}
        ],
        "train": {{ "rank": 4, "sweeps": 6, "seed": 1 }}{extra}
    }}"#
    )
}

#[test]
fn train_toy_round_trips_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "toy.json", TOY);
    let out = dir.path().join("m");
    let o = run(&["train", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("ranks"));

    let bytes = std::fs::read(out.join("model.tt")).unwrap();
    let tt = read_tt(&bytes[..]).unwrap();
    let mut again = Vec::new();
    write_tt(&tt, &mut again).unwrap();
    assert_eq!(bytes, again);

    let model = SurrogateModel::load_dir(&out).unwrap();
    assert_eq!(model.train(), &tt);
    assert_eq!(model.manifest.config_hash.as_ref().unwrap().len(), 64);

    let o = run(&["inspect", "--model", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("ranks: [1, 1, 1, 1]"), "{text}");
    assert!(text.contains("config_hash"));
}

#[test]
fn seed_flag_changes_hash_only_through_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "toy.json", TOY);
    let hash = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = run(&["train", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", seed]);
        assert!(o.status.success());
        SurrogateModel::load_dir(&out).unwrap().manifest.config_hash.unwrap()
    };
    assert_eq!(hash("7", "a"), hash("7", "b"));
    assert_ne!(hash("7", "c"), hash("8", "d"));
}

#[test]
fn invalid_grid_exits_2_naming_feature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", &TOY.replace("\"points\": 4", "\"points\": 12"));
    let o = run(&["train", "--config", &cfg, "--out", dir.path().join("m").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("'b'") && err.contains("power of two"), "{err}");

    let o = run(&["train", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "inf.json", &TOY.replace("[0.5, -0.25]", "[1000.0, 0.0]"));
    let o = run(&["train", "--config", &cfg, "--out", dir.path().join("m").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn eval_on_grid_points_and_empty_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "toy.json", &TOY.replace("\"rank\": 1", "\"rank\": 2"));
    let m = dir.path().join("m");
    assert!(run(&["train", "--config", &cfg, "--out", m.to_str().unwrap()]).status.success());
    let model = SurrogateModel::load_dir(&m).unwrap();
    let g = model.grid().clone();

    let mut q = String::from("a,b\n");
    let mut want = Vec::new();
    for (ka, kb) in [(0, 0), (3, 1), (7, 3), (5, 2)] {
        let idx = g.encode(&[ka, kb]).unwrap();
        let x = g.point(&idx).unwrap();
        q += &format!("{},{}\n", x[0], x[1]);
        want.push(model.train().eval(&idx).unwrap());
    }
    let qp = write(dir.path(), "q.csv", &q);
    let pp = dir.path().join("p.csv");
    let o = run(&["eval", "--model", m.to_str().unwrap(), "--queries", &qp, "--out", pp.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = std::fs::read_to_string(&pp).unwrap();
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("a,b,price"));
    for (line, w) in lines.zip(&want) {
        let got: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((got - w).abs() <= 1e-12 * w.abs(), "{got} vs {w}");
    }

    for (name, text) in [("empty.csv", ""), ("header.csv", "a,b\n")] {
        let qp = write(dir.path(), name, text);
        let o = run(&["eval", "--model", m.to_str().unwrap(), "--queries", &qp]);
        assert!(o.status.success(), "{name}");
        assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "a,b,price");
    }

    let qp = write(dir.path(), "wrong.csv", "b,a\n0,0\n");
    let o = run(&["eval", "--model", m.to_str().unwrap(), "--queries", &qp]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn desk_european_train_and_latency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "eu.json", &desk("european-geo", [16, 16, 32, 8, 8], ""));
    let m = dir.path().join("m");
    let o = run(&["train", "--config", &cfg, "--out", m.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let model = SurrogateModel::load_dir(&m).unwrap();
    let report = model.manifest.cross.as_ref().unwrap();
    assert_eq!(model.manifest.evals_used, report.evals_used);
    assert!(model.manifest.evals_used > 0);

    let pts = tensor_surrogate::pipeline::uniform_points(model.grid(), 10_000, 5);
    let mut q = String::from("spot1,spot2,strike,rate,ttm\n");
    for p in &pts {
        q += &p.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        q.push('\n');
    }
    let qp = write(dir.path(), "q.csv", &q);
    let o = run(&["eval", "--model", m.to_str().unwrap(), "--queries", &qp, "--out", dir.path().join("p.csv").to_str().unwrap()]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    let us: f64 = err
        .split(" us per query")
        .next()
        .and_then(|s| s.rsplit('(').next())
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| panic!("no latency in {err}"));
    assert!(us < 10_000.0, "{us} us per query");
}

fn bench(dir: &Path, cfg_text: &str, sub: &str) -> (BenchSummary, String) {
    let cfg = write(dir, &format!("{sub}.json"), cfg_text);
    let out = dir.join(sub);
    let o = run(&["bench", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: BenchSummary = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    (summary, std::fs::read_to_string(out.join("results.csv")).unwrap())
}

#[test]
fn bench_single_budget_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let (s, csv) = bench(dir.path(), TOY, "one");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("stn,"));
    assert_eq!(s.rows().len(), 1);
    assert!(s.rows()[0].mae < 1e-2);
}

#[test]
fn bench_desk_european_ladder_is_reproducible_and_improves() {
    let dir = tempfile::tempdir().unwrap();
    let text = desk(
        "european-geo",
        [16, 16, 32, 8, 8],
        r#", "ladder": [ {"evals": 1000}, {"evals": 5000}, {"evals": 20000} ],
            "gpr": { "samples": [200] }, "direct": true"#,
    );
    let (a, csv_a) = bench(dir.path(), &text, "a");
    let (b, _) = bench(dir.path(), &text, "b");
    let stn: Vec<_> = a.rows().into_iter().filter(|r| r.method == "stn").collect();
    assert_eq!(stn.len(), 3);
    assert!(a.stn_mae_inversions <= 1, "{csv_a}");
    assert!(stn[2].mae < stn[0].mae, "{csv_a}");
    for (x, y) in a.rows().iter().zip(b.rows()) {
        assert_eq!(x.method, y.method);
        assert_eq!(x.mae.to_bits(), y.mae.to_bits(), "{}", x.method);
        assert_eq!(x.train_set_size, y.train_set_size);
    }
    let direct = a.rows().into_iter().find(|r| r.method == "direct").unwrap();
    assert_eq!(direct.mae, 0.0);
    for r in a.rows() {
        assert!(r.train_seconds >= 0.0 && r.data_gen_seconds >= 0.0 && r.infer_seconds_per_query >= 0.0 && r.mae >= 0.0);
    }
    assert!(csv_a.lines().count() == 6);
}

#[test]
fn bench_american_is_dominated_by_data_generation() {
    let dir = tempfile::tempdir().unwrap();
    let text = desk(
        "american-arith",
        [8, 8, 8, 4, 4],
        r#", "lsmc": { "n_paths": 2000, "n_steps": 30, "degree": 3, "seed": 5 },
            "ladder": [ {"rank": 2, "sweeps": 2} ], "test_size": 20"#,
    );
    let (s, _) = bench(dir.path(), &text, "am");
    let r = s.rows()[0].clone();
    assert!(r.data_gen_seconds >= 0.8 * r.train_seconds, "{r:?}");
}
