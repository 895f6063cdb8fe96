use std::process::Command;

use jumptame::cli::{parse_config, parse_config_with_env, CliError, Mode};

fn jumptame(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jumptame")).args(args).output().unwrap()
}

fn csv_lines(path: &std::path::Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn documented_invocation_parses() {
    let c = parse_config(&[
        "--problem",
        "cubic",
        "--mode",
        "converge",
        "--levels",
        "16,32,64,128,256,512",
        "--ref",
        "8192",
        "--paths",
        "1000",
        "--p",
        "2",
        "--seed",
        "42",
        "--out",
        "report.csv",
    ])
    .unwrap();
    assert_eq!(c.problem_key, "cubic");
    assert_eq!(c.mode, Mode::Converge);
    assert_eq!(c.levels, vec![16, 32, 64, 128, 256, 512]);
    assert_eq!((c.ref_steps, c.n_paths, c.p, c.seed), (8192, 1000, 2.0, 42));
    assert_eq!(c.output_path.to_str(), Some("report.csv"));
}

#[test]
fn bad_ladder_names_level_and_reference() {
    match parse_config(&["--problem", "cubic", "--mode", "converge", "--levels", "16,48", "--ref", "8192"]) {
        Err(CliError::Usage(msg)) => assert!(msg.contains("48") && msg.contains("8192"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn flags_beat_config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    std::fs::write(&file, "# experiment\nproblem = cubic\nmode = moments\nseed = 5\npaths = 30\n").unwrap();
    let file = file.to_str().unwrap();
    let c = parse_config_with_env(&["--config", file, "--paths", "12"], Some("99")).unwrap();
    assert_eq!((c.mode, c.n_paths, c.seed), (Mode::Moments, 12, 5));
    let c = parse_config_with_env(&["--problem", "zero", "--mode", "moments"], Some("99")).unwrap();
    assert_eq!(c.seed, 99);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let ok = jumptame(&[
        "--problem",
        "zero",
        "--mode",
        "moments",
        "--levels",
        "8",
        "--paths",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let missing = jumptame(&["--mode", "converge"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown = jumptame(&["--problem", "cubic", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));

    let unwritable = dir.path().join("no/such/dir/out.csv");
    let failed = jumptame(&[
        "--problem",
        "zero",
        "--mode",
        "moments",
        "--levels",
        "8",
        "--paths",
        "3",
        "--out",
        unwritable.to_str().unwrap(),
    ]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("no/such/dir"));
}

#[test]
fn moments_of_the_zero_problem_are_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let run = jumptame(&[
        "--problem",
        "zero",
        "--mode",
        "moments",
        "--levels",
        "16",
        "--paths",
        "5",
        "--p",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let rows = csv_lines(&out);
    assert_eq!(rows[0].join(","), "scheme,steps,n,q,moment");
    let moments: Vec<f64> = rows[1..].iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(!moments.is_empty() && moments.iter().all(|&m| m == moments[0]));
}

#[test]
fn noise_free_divergence_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let run = jumptame(&[
        "--problem",
        "cubic",
        "--mode",
        "diverge",
        "--horizon",
        "4",
        "--levels",
        "8",
        "--paths",
        "4",
        "--noise-free",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let rows = csv_lines(&out);
    let em = rows.iter().find(|r| r[0] == "EM").unwrap();
    assert_eq!(em[2].parse::<f64>().unwrap(), 0.5);
    assert_eq!(em[5].parse::<f64>().unwrap(), 1.0);
    let ncts = rows.iter().find(|r| r[0] == "NCTS").unwrap();
    assert_eq!(ncts[5].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn converge_summary_reports_fitted_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let run = jumptame(&[
        "--problem",
        "cubic",
        "--mode",
        "converge",
        "--levels",
        "4,8,16",
        "--ref",
        "128",
        "--paths",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let stdout = String::from_utf8(run.stdout).unwrap();
    for scheme in ["NCTS", "STS", "CTS"] {
        assert!(stdout.lines().any(|l| l.starts_with(&format!("{scheme}: fitted_order="))), "{stdout}");
    }
    let rows = csv_lines(&out);
    assert_eq!(rows[0].join(","), "scheme,level_steps,dt,p,error,std_err,n_paths,excluded");
    assert_eq!(rows.len(), 1 + 3 * 3);
}
