use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn peanut(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peanut")).args(args).env("PEANUT_CACHE", cache).env("RUST_LOG", "error").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn eigen_table_is_bracketed_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let args = ["eigen", "--k", "0.6", "--nu", "-0.5,0.5,1.5", "--n-max", "10"];
    let cold = peanut(&cache, &args);
    assert!(cold.status.success());
    let text = stdout(&cold);
    assert!(text.starts_with("# format=csv k=0.6 n-max=10 nu=-0.5,0.5,1.5\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 33);
    assert!(rows.iter().all(|r| &r[6] == "true"));
    for block in rows.chunks(11) {
        let lambdas: Vec<f64> = block.iter().map(|r| r[3].parse().unwrap()).collect();
        assert!(lambdas.windows(2).all(|w| w[1] > w[0]));
    }
    assert!(String::from_utf8_lossy(&cold.stderr).contains("0 hits, 33 misses"));

    let mut warm_args = args.to_vec();
    warm_args.extend(["--parallelism", "1"]);
    let warm = peanut(&cache, &warm_args);
    assert_eq!(warm.stdout, cold.stdout);
    assert!(String::from_utf8_lossy(&warm.stderr).contains("33 hits, 0 misses"));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "k=0.5\nn_max=2\nformat=json\n").unwrap();
    let conf = conf.to_str().unwrap();
    let o = peanut(&cache, &["eigen", "--config", conf, "--nu", "0.5", "--k", "0.4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["config"]["k"], "0.4");
    assert_eq!(header["config"]["n-max"], "2");
    let rows: Vec<serde_json::Value> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["kappa"], 0.4);
}

#[test]
fn verify_suites_report_and_set_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let o = peanut(&cache, &["verify", "addition", "--m", "0..3", "--k", "0.7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let reports: Vec<serde_json::Value> = text.lines().skip(1).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 40);
    assert!(reports.iter().all(|r| r["passed"] == true && r["rel_residual"].as_f64().unwrap() <= 1e-8));

    let o = peanut(&cache, &["verify", "limit-k1", "--m", "0..1", "--n", "0..1"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().skip(1) {
        let r: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(r["monotone"], true);
    }

    let good = peanut(&cache, &["verify", "inteq2"]);
    assert_eq!(good.status.code(), Some(0));
    let bad = peanut(&cache, &["verify", "inteq2", "--phase", "plus"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    assert_eq!(peanut(&cache, &["verify", "nonsense"]).status.code(), Some(3));
    assert_eq!(peanut(&cache, &["mesh", "--k", "0.5", "--s0", "2.5K"]).status.code(), Some(3));
    assert_eq!(peanut(&cache, &["eigen", "--k", "1.5"]).status.code(), Some(3));
    assert_eq!(peanut(&cache, &["verify", "inteq2", "--phase", "sideways"]).status.code(), Some(3));
    assert_eq!(peanut(&cache, &["--help"]).status.code(), Some(0));
}

#[test]
fn eval_matches_at_sample_point() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let o = peanut(&cache, &["eval", "--k", "0.7", "--m", "1", "--n", "2", "--point", "0.3,-0.2,0.1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).lines().nth(1).unwrap()).unwrap();
    assert!(v["re"].as_f64().unwrap().is_finite() && v["im"].as_f64().unwrap().is_finite());
    let axis = peanut(&cache, &["eval", "--k", "0.7", "--point", "0,0,0.5"]);
    assert_eq!(axis.status.code(), Some(2));
}

#[test]
fn mesh_and_lines_emit_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let obj = dir.path().join("sphere.obj");
    let o = peanut(&cache, &["mesh", "--k", "0.5", "--s0", "1K", "--n-t", "12", "--n-phi", "16", "--obj", obj.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert!(!rows.is_empty());
    for r in &rows {
        let (x, y, z): (f64, f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!(((x * x + y * y + z * z).sqrt() - 1.0).abs() < 1e-9);
    }
    let obj = fs::read_to_string(obj).unwrap();
    assert!(obj.lines().all(|l| l.starts_with("v ") || l.starts_with("f ")));

    let o = peanut(&cache, &["lines", "--samples", "50"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let sphere: Vec<_> =
        rows.iter().filter(|r| &r[1] == "s" && r[2].parse::<f64>().unwrap() > 1.85 && r[2].parse::<f64>().unwrap() < 1.86).collect();
    assert_eq!(sphere.len(), 50);
    for r in sphere {
        let (rr, z): (f64, f64) = (r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!((rr.hypot(z) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn cache_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let o = peanut(&cache, &["cache", "warm", "--k", "0.7", "--m-max", "1", "--n-max", "2"]);
    assert!(o.status.success());
    let info = peanut(&cache, &["cache", "info"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&info).lines().nth(1).unwrap()).unwrap();
    assert_eq!(v["records"], 6);
    peanut(&cache, &["cache", "clear"]);
    let info = peanut(&cache, &["cache", "info"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&info).lines().nth(1).unwrap()).unwrap();
    assert_eq!(v["records"], 0);
}
