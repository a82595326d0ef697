use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn underlay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_underlay"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.scn"))
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn sweep_alpha(dir: &Path, rate: &str, grid: &str, file: &str) -> PathBuf {
    let out = dir.join(file);
    let o = underlay(&[
        "sweep-alpha",
        "--scenario",
        &scenario("fig2"),
        "--rate",
        rate,
        "--grid",
        grid,
        "--trials",
        "20000",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn sweep_alpha_is_reproducible_and_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let a = sweep_alpha(dir.path(), "1", "3", "a.csv");
    let b = sweep_alpha(dir.path(), "1", "3", "b.csv");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let (header, rows) = read_csv(&a);
    assert_eq!(header, ["alpha", "tau_exact", "tau_rational", "tau_mc", "tau_mc_se"]);
    assert_eq!(rows.len(), 3);
    for row in &rows {
        for &tau in &row[1..4] {
            assert!((0.0..=2.0).contains(&tau), "{row:?}");
        }
    }
}

#[test]
fn sweep_alpha_shape_flips_with_rate() {
    let dir = tempfile::tempdir().unwrap();
    let (_, low) = read_csv(&sweep_alpha(dir.path(), "1", "11", "low.csv"));
    let interior = low[1..10].iter().map(|r| r[1]).fold(0.0, f64::max);
    assert!(interior > low[0][1] && interior > low[10][1]);

    let (_, high) = read_csv(&sweep_alpha(dir.path(), "5", "11", "high.csv"));
    let interior = high[1..10].iter().map(|r| r[1]).fold(0.0, f64::max);
    assert!(interior < high[0][1].max(high[10][1]));
}

#[test]
fn sweep_rate_columns_per_user_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rate.csv");
    let o = underlay(&[
        "sweep-rate",
        "--scenario",
        &scenario("fig4"),
        "--rate-range",
        "0.5:4",
        "--grid",
        "4",
        "--users",
        "1,5",
        "--trials",
        "5000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        [
            "rate",
            "tau_exact_u1",
            "tau_mc_u1",
            "tau_mc_se_u1",
            "tau_exact_u5",
            "tau_mc_u5",
            "tau_mc_se_u5"
        ]
    );
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][0], 0.5);
    assert_eq!(rows[3][0], 4.0);
}

#[test]
fn sweep_rate_rejects_empty_user_list() {
    let o = underlay(&["sweep-rate", "--scenario", &scenario("fig4"), "--users", ""]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}

#[test]
fn optimize_reports_closed_forms() {
    let o = underlay(&["optimize", "--scenario", &scenario("fig3a")]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("0.1058"), "{text}");
    assert!(text.contains("3.7037"), "{text}");

    let text = stdout(&underlay(&["optimize", "--scenario", &scenario("fig4"), "--rate", "1"]));
    assert!(text.contains("0.5000"), "{text}");
}

#[test]
fn optimize_recommends_single_network_at_high_rate() {
    let o = underlay(&["optimize", "--scenario", &scenario("fig2"), "--rate", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let advice = text.lines().find(|l| l.starts_with("recommendation")).unwrap();
    assert!(advice.contains("single-network"), "{text}");
}

#[test]
fn validate_passes_on_bundled_scenario() {
    let o = underlay(&["validate", "--scenario", &scenario("fig2"), "--trials", "1000"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert!(text.contains("[PASS]") && !text.contains("[FAIL]"), "{text}");
}

#[test]
fn validate_rejects_negative_rate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scn");
    let text = fs::read_to_string(scenario("fig2")).unwrap();
    fs::write(&path, text.replace("rate_bpcu = 1", "rate_bpcu = -1")).unwrap();
    let o = underlay(&["validate", "--scenario", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("rate"));
}

#[test]
fn missing_scenario_file_is_an_error() {
    let o = underlay(&["optimize", "--scenario", "/nonexistent/x.scn"]);
    assert_eq!(o.status.code(), Some(2));
}
