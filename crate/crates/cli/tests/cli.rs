use std::path::Path;
use std::process::{Command, Output};

use ain_cli::output::{decode, ResultFile};
use tempfile::TempDir;

fn ainsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ainsim"))
        .args(args)
        .output()
        .expect("run ainsim")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_rows(p: &Path) -> ResultFile {
    decode(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn verify_passes_on_seeded_channels() {
    let o = ainsim(&["verify", "--m", "4", "--channels", "200"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("max residual"), "{out}");
    assert!(out.trim_end().ends_with("pass"), "{out}");
}

#[test]
fn verify_rejects_m_not_multiple_of_four() {
    let o = ainsim(&["verify", "--m", "5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("M must be a multiple of 4"), "{}", stderr(&o));
}

#[test]
fn verify_flags_injected_singular_channel() {
    let o = ainsim(&["verify", "--channels", "2", "--inject-singular"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("H[2,R]"), "{}", stderr(&o));
}

#[test]
fn sweep_writes_rows_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ain.csv");
    let o = ainsim(&["sweep", "--scenario", "ain_relay", "--m", "4", "--snr", "60:100:10", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with(
        "scenario,m,snr_db,sum_rate_bits,user1_rate,user2_rate,ser1,ser2,seed,slope,r_squared\n"
    ));
    assert!(!text.contains('\r'));
    let ResultFile::Sweep(rows) = read_rows(&out) else { panic!("not a sweep file") };
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| r.is_summary()).count(), 1);
    let slope = rows[5].slope.unwrap();
    assert!((5.7..=6.3).contains(&slope), "slope {slope}");
    assert!(rows[..5].iter().all(|r| r.seed == 1 && r.m == 4));
}

#[test]
fn two_scenarios_are_grouped() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("two.csv");
    let o = ainsim(&["sweep", "--scenario", "tdma,two_antenna_relay", "--channels", "20", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ResultFile::Sweep(rows) = read_rows(&out) else { panic!() };
    let names: Vec<&str> = rows.iter().map(|r| r.scenario.as_str()).collect();
    assert_eq!(names, [["tdma"; 6], ["two_antenna_relay"; 6]].concat());
    assert!(rows[5].is_summary() && rows[11].is_summary());
    assert_eq!(rows[6].m, 1);
}

#[test]
fn config_file_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "# small run\nscenario = ain_relay,no_relay_zf\nchannels = 16\nnoise = 30\nmode = zf_forward\n").unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = ainsim(&["sweep", "--config", path_str(&cfg), "--out", path_str(out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn saved_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let saved = dir.path().join("saved.cfg");
    let first = dir.path().join("first.json");
    let o = ainsim(&[
        "sweep", "--scenario", "tdma", "--channels", "8", "--seed", "42", "--snr", "50:90:20", "--format", "json",
        "--out", path_str(&first), "--save-config", path_str(&saved),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let second = dir.path().join("second.json");
    let o = ainsim(&["sweep", "--config", path_str(&saved), "--out", path_str(&second)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn flags_override_config_values() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(&cfg, "scenario = tdma\nchannels = 4\nseed = 5\n").unwrap();
    let out = dir.path().join("o.csv");
    let o = ainsim(&["sweep", "--config", path_str(&cfg), "--seed", "9", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ResultFile::Sweep(rows) = read_rows(&out) else { panic!() };
    assert!(rows.iter().all(|r| r.seed == 9));
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "m = 4\nantennas = 8\n").unwrap();
    let o = ainsim(&["sweep", "--config", path_str(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert_eq!(code(&ainsim(&["sweep", "--snr", "60:100"])), 2);
}

#[test]
fn unwritable_output_fails_before_computing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("missing").join("x.csv");
    let start = std::time::Instant::now();
    let o = ainsim(&["sweep", "--channels", "100000", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(start.elapsed().as_secs() < 10);
    assert!(!out.exists());
}

#[test]
fn failed_run_leaves_existing_file_untouched() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("keep.csv");
    std::fs::write(&out, "previous\n").unwrap();
    let o = ainsim(&["scalar", "--budget", "100", "--out", path_str(&out)]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    assert!(msg.contains("Q = ") && msg.contains("budget of 100"), "{msg}");
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "previous\n");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1, "temporary file left behind");
}

#[test]
fn scalar_d_min_is_nondecreasing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("scalar.csv");
    let o = ainsim(&["scalar", "--epsilon", "0.5", "--gamma", "1", "--snr", "60:120:10", "--symbols", "2000", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ResultFile::Scalar(rows) = read_rows(&out) else { panic!() };
    assert_eq!(rows.len(), 7);
    assert!(rows.windows(2).all(|w| w[1].d_min >= w[0].d_min));
    assert!(rows.windows(2).all(|w| w[1].q >= w[0].q));
}

#[test]
fn unit_constellation_gives_zero_rates() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("low.csv");
    let o = ainsim(&["scalar", "--snr", "0:40:10", "--symbols", "500", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ResultFile::Scalar(rows) = read_rows(&out) else { panic!() };
    for r in rows {
        assert_eq!(r.q, 1);
        let rates = [r.rate_1_1, r.rate_1_2, r.rate_1_3, r.rate_2_1, r.rate_2_2, r.rate_2_3];
        assert!(rates.iter().all(|&x| x == 0.0));
    }
}

#[test]
fn json_and_csv_carry_the_same_rows() {
    let dir = TempDir::new().unwrap();
    for cmd in [
        vec!["scalar", "--snr", "60:90:10", "--symbols", "1000"],
        vec!["sweep", "--scenario", "ain_relay,tdma", "--channels", "5"],
    ] {
        let csv_path = dir.path().join("r.csv");
        let json_path = dir.path().join("r.json");
        for (p, f) in [(&csv_path, "csv"), (&json_path, "json")] {
            let mut args = cmd.clone();
            args.extend(["--format", f, "--out", path_str(p)]);
            let o = ainsim(&args);
            assert_eq!(code(&o), 0, "{}", stderr(&o));
        }
        assert_eq!(read_rows(&csv_path), read_rows(&json_path));
    }
}

#[test]
fn report_summarizes_result_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.json");
    assert_eq!(code(&ainsim(&["sweep", "--scenario", "tdma", "--channels", "5", "--format", "json", "--out", path_str(&out)])), 0);
    let o = ainsim(&["report", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("tdma (M = 4): slope 4.0"), "{text}");

    let missing = dir.path().join("none.csv");
    assert_eq!(code(&ainsim(&["report", path_str(&missing)])), 3);
}

#[test]
fn sweep_to_stdout() {
    let o = ainsim(&["sweep", "--scenario", "two_antenna_relay", "--channels", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(stderr(&o).contains("two_antenna_relay: slope"));
}
