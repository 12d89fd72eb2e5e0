use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lmc(sub: &str, cfg: &str, dir: &Path, extra: &[&str]) -> Output {
    let path = dir.join("exp.cfg");
    fs::write(&path, cfg).unwrap();
    Command::new(env!("CARGO_BIN_EXE_lmc"))
        .arg(sub)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn summary_field(dir: &Path, key: &str) -> f64 {
    let s = fs::read_to_string(dir.join("out/summary.txt")).unwrap();
    let tok = s.split_whitespace().find_map(|t| t.strip_prefix(&format!("{key}="))).unwrap();
    tok.parse().unwrap()
}

#[test]
fn mc_gaussian_example() {
    let d = tempfile::tempdir().unwrap();
    let o = lmc("run", "method = mc\npath.T = 8\npath.h = 0.01\nmc.n = 100000\n", d.path(), &["--seed", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (est, se) = (summary_field(d.path(), "estimate"), summary_field(d.path(), "stderr"));
    assert!((est - 0.60653).abs() <= 3.0 * se, "{est} {se}");
    let csv = fs::read_to_string(d.path().join("out/report.csv")).unwrap();
    assert!(csv.starts_with("method,level,n_or_sigma,mean,variance,cost_grad_queries,quantum_model_queries,wall_seconds\n"));
}

#[test]
fn reruns_and_thread_counts_give_identical_csv() {
    let cfg = "method = mlmc\ncoupling.kind = spring\npotential.name = oscillatory\npotential.d = 2\npath.T = 1\npath.h = 0.1\nmlmc.levels = 3\nmlmc.n_pilot = 200\ntarget.eps = 0.05\n";
    let mut csvs = Vec::new();
    for threads in ["1", "1", "3"] {
        let d = tempfile::tempdir().unwrap();
        let o = lmc("run", &format!("{cfg}threads = {threads}\n"), d.path(), &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(summary_field(d.path(), "grad_queries"), summary_field(d.path(), "counted_grad_calls"));
        csvs.push(fs::read(d.path().join("out/report.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let o = lmc("run", "method = mc\nsprng_S = 2\n", d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sprng_S"));

    let o = lmc("run", "method = mc\npath.h = 3\npath.T = 600\nmc.n = 4\n", d.path(), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));

    let o = lmc("run", "method = unbiased_osl\npath.h = 0.5\ndebias.j_cap = 1\ndebias.n_pilot = 50\n", d.path(), &[]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));

    let o = lmc("run", "method = unbiased_osl\npotential.name = oscillatory\npotential.d = 2\n", d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transform_check_outcomes() {
    let d = tempfile::tempdir().unwrap();
    let o = lmc("transform-check", "potential.name = student_t\n", d.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let checks = fs::read_to_string(d.path().join("out/checks.csv")).unwrap();
    assert!(checks.lines().skip(1).all(|l| l.split(',').nth(1) == Some("true")));

    let o = lmc("transform-check", "potential.name = student_t\ntransform.b = 0.01\ntransform.R1 = 2\ntransform.R2 = 3\n", d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("R1"));

    let o = lmc("transform-check", "potential.name = logistic_regression\n", d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("isotropic"));
}

#[test]
fn rates_for_osl_sampler() {
    let d = tempfile::tempdir().unwrap();
    let o = lmc("rates", "method = unbiased_osl\npath.h = 0.1\nmlmc.levels = 4\nmlmc.n_pilot = 5000\n", d.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let txt = fs::read_to_string(d.path().join("out/rates.txt")).unwrap();
    let beta: f64 = txt.split_whitespace().find_map(|t| t.strip_prefix("beta=")).unwrap().parse().unwrap();
    assert!((1.5..=2.5).contains(&beta), "{beta}");
}

#[test]
fn sample_dumps_endpoints() {
    let d = tempfile::tempdir().unwrap();
    let o = lmc("sample", "method = mlmc\ncoupling.kind = spring\npotential.name = oscillatory\npotential.d = 2\npath.T = 1\nsample.n = 25\n", d.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = fs::read_to_string(d.path().join("out/samples.csv")).unwrap();
    assert_eq!(s.lines().next(), Some("index,x0,x1,log_weight"));
    assert_eq!(s.lines().count(), 26);
}
