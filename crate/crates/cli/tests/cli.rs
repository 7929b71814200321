use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orbgrand_cli::output::read_csv;
use orbgrand_cli::SweepRow;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbgrand"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn sweep_rows(config: &Path) -> Vec<SweepRow> {
    read_csv(ok(&["sweep", "--config", p(config), "--out", "-"]).as_bytes()).unwrap()
}

const BCH_SWEEP: &str = r#"
version = 1
[code]
builtin = "bch127"
[schedule]
kind = "ilwo"
q_max = 1024
[channel]
snr_list_db = [4.0, 5.0]
seed = 11
[stop]
max_frames = 20000
min_frame_errors = 50
"#;

#[test]
fn two_point_sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bch.toml", BCH_SWEEP);
    let a = sweep_rows(&cfg);
    let b = sweep_rows(&cfg);
    assert_eq!(a.len(), 2);
    assert_eq!((a[0].snr_db, a[1].snr_db), (4.0, 5.0));
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(SweepRow { wall_time_s: 0.0, ..x.clone() }, SweepRow { wall_time_s: 0.0, ..y.clone() });
    }
    for r in &a {
        assert!(r.frames <= 20_000);
        // Early stop only on reaching the error target.
        assert!(r.frames == 20_000 || r.frame_errors == 50);
        assert_eq!(r.bler, r.frame_errors as f64 / r.frames as f64);
        assert!(r.avg_queries >= 1.0);
        assert!(r.stage_activation.is_empty());
    }
    assert!(a[1].avg_queries < a[0].avg_queries);
    let other_seed = read_csv(
        ok(&["sweep", "--config", p(&cfg), "--out", "-", "--seed", "12"]).as_bytes(),
    )
    .unwrap();
    let strip = |r: &SweepRow| SweepRow { wall_time_s: 0.0, ..r.clone() };
    assert_ne!(strip(&other_seed[0]), strip(&a[0]));
}

#[test]
fn sweep_writes_configured_file_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let body = BCH_SWEEP.replace("[stop]", "[output]\npath = \"out.csv\"\n[stop]");
    let cfg = write_config(dir.path(), "bch.toml", &body);
    ok(&["sweep", "--config", p(&cfg), "--snr-db", "9.0", "--max-frames", "2000"]);
    let rows = read_csv(std::fs::File::open(dir.path().join("out.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].frame_errors, 0);
    assert!(rows[0].avg_queries < 1.05);
    let json = ok(&["sweep", "--config", p(&cfg), "--snr-db", "9.0", "--max-frames", "2000", "--format", "json", "--out", "-"]);
    let back: Vec<SweepRow> = serde_json::from_str(&json).unwrap();
    assert_eq!(SweepRow { wall_time_s: 0.0, ..back[0].clone() }, SweepRow { wall_time_s: 0.0, ..rows[0].clone() });
}

#[test]
fn pipeline_sweep_reports_stage_activation() {
    let dir = tempfile::tempdir().unwrap();
    let body = BCH_SWEEP
        .replace("q_max = 1024", "q_max = 1024\nsorter = \"pruned\"")
        .replace("[stop]", "[pipeline]\nq_max = 1024\nq_s = 256\nq_lut = 0\n[stop]");
    let cfg = write_config(dir.path(), "bch.toml", &body);
    let rows = sweep_rows(&cfg);
    for r in &rows {
        assert_eq!(r.stage_activation.len(), 1024 / 256 + 2);
        assert_eq!(r.stage_activation[0], 1.0);
        assert!(r.stage_activation.windows(2).all(|w| w[1] <= w[0]));
        assert!((r.stage_activation[1] - (1.0 - r.hd_valid_rate)).abs() < 1e-12);
    }
}

#[test]
fn bad_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        BCH_SWEEP.replace("[4.0, 5.0]", "[]"),
        BCH_SWEEP.replace("\"ilwo\"", "\"spiral\""),
        BCH_SWEEP.replace("\"ilwo\"", "\"la-ilwo\""),
        BCH_SWEEP.replace("\"bch127\"", "\"ldpc\""),
        BCH_SWEEP.replace("max_frames = 20000", "max_frames = 0"),
        BCH_SWEEP.replace("version = 1", "version = 9"),
    ];
    for (i, body) in bad.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.toml"), body);
        assert!(!run(&["sweep", "--config", p(&cfg)]).status.success(), "{body}");
    }
    let cfg = write_config(dir.path(), "good.toml", BCH_SWEEP);
    let unwritable = dir.path().join("no").join("such").join("dir.csv");
    assert!(!run(&["sweep", "--config", p(&cfg), "--out", p(&unwritable)]).status.success());
    assert!(!run(&["sweep", "--config", p(&dir.path().join("missing.toml"))]).status.success());
    assert!(!run(&["dump-schedule", "--n", "16", "--kind", "spiral", "--q-max", "4"]).status.success());
    assert!(!run(&["encode", "--code", "bch127", "--message", "0101"]).status.success());
}

fn pattern_lines(text: &str) -> Vec<&str> {
    text.lines().skip(1).collect()
}

#[test]
fn dump_schedule_counts() {
    let out = ok(&["dump-schedule", "--kind", "ilwo", "--n", "128", "--q-max", "8192"]);
    assert!(out.starts_with("128 8192 8192\n"));
    assert_eq!(pattern_lines(&out).len(), 8192);
    let out = ok(&["dump-schedule", "--kind", "lwo", "--n", "128", "--max-lw", "64", "--max-hw", "6"]);
    let count = pattern_lines(&out).len() as f64;
    assert!((count / 116_000.0 - 1.0).abs() < 0.01, "{count}");
    assert!(!run(&["dump-schedule", "--kind", "lwo", "--n", "128", "--max-lw", "64"]).status.success());
}

#[test]
fn la_ilwo_schedule_starts_with_lut() {
    let dir = tempfile::tempdir().unwrap();
    let lut = dir.path().join("lut.txt");
    ok(&["mine-lut", "--n", "128", "--snr-db", "5", "--events", "20000", "--q-lut", "64", "--seed", "3", "--out", p(&lut)]);
    let lut_text = std::fs::read_to_string(&lut).unwrap();
    let lut_patterns: Vec<String> = lut_text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut v: Vec<&str> = l.split_whitespace().collect();
            v.pop();
            v.join(" ")
        })
        .collect();
    assert_eq!(lut_patterns.len(), 64);
    let out = ok(&["dump-schedule", "--kind", "la-ilwo", "--n", "128", "--q-max", "512", "--lut", p(&lut)]);
    let lines = pattern_lines(&out);
    assert_eq!(lines.len(), 512);
    assert_eq!(&lines[..64], lut_patterns.as_slice());
    let mut uniq = lines.clone();
    uniq.sort_unstable();
    uniq.dedup();
    assert_eq!(uniq.len(), 512);
}

#[test]
fn pipeline_report_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("report.csv");
    let out = ok(&["pipeline-report", "--code", "bch127", "--snr-db", "6", "--frames", "3000", "--csv", p(&csv_path)]);
    let value = |key: &str| -> String {
        out.lines()
            .find_map(|l| l.strip_prefix(key).filter(|r| r.starts_with(' ')).map(|r| r.trim().to_string()))
            .unwrap_or_else(|| panic!("{key} missing from\n{out}"))
    };
    assert_eq!(value("stage_count"), "18");
    assert_eq!(value("latency_cycles"), "25");
    assert_eq!(value("latency_ns"), "40.58");
    assert_eq!(value("throughput_gbps"), "69.61");
    assert_eq!(value("stage_0_activation").parse::<f64>().unwrap(), 1.0);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("quantity,value\n"));
    assert!(csv.contains("latency_ns,40.58\n"));

    let cfg = write_config(dir.path(), "pipe.toml", "q_s = 256\nf_mhz = 701\n");
    let out = ok(&["pipeline-report", "--config", p(&cfg), "--code", "polar128", "--snr-db", "7", "--frames", "1000"]);
    assert!(out.lines().any(|l| l.starts_with("latency_ns") && l.ends_with("58.49")));
    assert!(out.lines().any(|l| l.starts_with("throughput_gbps") && l.ends_with("73.61")));
}

#[test]
fn encode_and_decode_frame() {
    let cw = ok(&["encode", "--code", "polar128", "--random", "--seed", "4"]);
    assert_eq!(cw.trim().len(), 128);
    let msg = "1".to_string() + &"0".repeat(112);
    let cw = ok(&["encode", "--code", "bch127", "--message", &msg]);
    assert_eq!(cw.trim().len(), 127);
    assert!(cw.contains('1'));

    let out = ok(&["decode-frame", "--code", "bch127", "--snr-db", "5", "--frame", "3", "--trace", "5"]);
    assert!(out.contains("query      1: pattern {}"));
    assert!(out.contains("correct: true"));
    let mut llr = vec!["3.0"; 127];
    llr[10] = "-0.25";
    let out = ok(&["decode-frame", "--code", "bch127", "--llr", &llr.join(","), "--kind", "hw", "--q-max", "200"]);
    assert!(out.contains("flips [10] -> codeword"));
    assert!(out.contains("after 2 queries"));
    assert!(!run(&["decode-frame", "--code", "bch127", "--llr", "1,2,3"]).status.success());
}

#[test]
fn schedule_ordering_on_shared_noise() {
    let dir = tempfile::tempdir().unwrap();
    let lut = dir.path().join("lut.txt");
    ok(&["mine-lut", "--snr-db", "7", "--events", "200000", "--q-lut", "512", "--out", p(&lut)]);
    let base = r#"
version = 1
[code]
builtin = "bch127"
[schedule]
KIND
q_max = 8192
[channel]
snr_list_db = [5.0, 5.5, 6.0]
seed = 21
[stop]
max_frames = 100000
min_frame_errors = 0
"#;
    let errors = |kind: &str| -> Vec<SweepRow> {
        let body = base.replace("KIND", kind);
        sweep_rows(&write_config(dir.path(), "s.toml", &body))
    };
    let la = errors("kind = \"la-ilwo\"\nlut_path = \"lut.txt\"");
    let il = errors("kind = \"ilwo\"");
    let lw = errors("kind = \"lwo\"");
    let at6 = |rows: &[SweepRow]| rows[2].frame_errors;
    assert!(at6(&la) <= at6(&il) && at6(&il) <= at6(&lw), "{} {} {}", at6(&la), at6(&il), at6(&lw));
    for rows in [&la, &il, &lw] {
        assert!(rows.windows(2).all(|w| w[1].avg_queries <= w[0].avg_queries));
    }
}
