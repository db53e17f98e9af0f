use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mcvd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcvd")).args(args).output().expect("run mcvd")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const SMALL_CHANNEL: [&str; 10] =
    ["--n-tx", "2", "--d-yz", "20", "--memory", "2", "--molecules", "2000", "--seed", "4"];

fn write_cir(path: &Path) {
    let mut args = vec!["cir", "--t-s", "0.75", "--output", path.to_str().unwrap()];
    args.extend(SMALL_CHANNEL);
    let out = mcvd(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn help_exits_zero_and_usage_errors_exit_one() {
    assert_eq!(code(&mcvd(&["--help"])), 0);
    assert_eq!(code(&mcvd(&["warp-drive"])), 1);
    assert_eq!(code(&mcvd(&["theory", "--scheme", "ofdm"])), 1);
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    fs::write(&path, "colour = blue\n").unwrap();
    let out = mcvd(&["sweep", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn missing_config_exits_three() {
    assert_eq!(code(&mcvd(&["sweep", "/nonexistent/sweep.conf"])), 3);
}

#[test]
fn oversized_theory_exits_two_before_simulating() {
    // 16^9 sequences, far past the default limit.
    let out = mcvd(&["theory", "--scheme", "msm", "--theory-memory", "9"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn cir_round_trips_through_theory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    write_cir(&path);
    let mut args = vec!["theory", "--n-tx", "2", "--m-tx", "40", "--theory-memory", "2", "--cir", path.to_str().unwrap()];
    args.extend(["--t-b", "0.75"]);
    let out = mcvd(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ber: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((0.0..=0.5).contains(&ber));
}

#[test]
fn tampered_cir_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    write_cir(&path);
    let text = fs::read_to_string(&path).unwrap();
    let (head, body) = text.split_once("\n\n").unwrap();
    let tampered = body.replacen('0', "1", 1);
    assert_ne!(tampered, body);
    fs::write(&path, format!("{head}\n\n{tampered}")).unwrap();
    let out = mcvd(&["theory", "--n-tx", "2", "--theory-memory", "2", "--cir", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("s.conf");
    fs::write(
        &conf,
        "values = 100, 200\nschemes = mssk, smux\ndetectors = mcd, ftd\nmappings = gray\n\
         memory = 3\nn_molecules = 2000\nmax_bits = 3000\ncalibration_symbols = 200\n",
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = mcvd(&["sweep", conf.to_str().unwrap(), "--set", "seed=3", "--output", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("parameter,value,scheme"));
    assert_eq!(text.lines().count(), 1 + 2 * 2);
}

#[test]
fn particle_ber_reports_counts() {
    let mut args = vec!["particle-ber", "--trials", "20", "--m-tx", "20"];
    args.extend(SMALL_CHANNEL);
    let out = mcvd(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("trials = 20"));
    assert!(stdout.contains("bits = 20"));
}
