//! End-to-end checks of the binary: verb output, exit-code contract, file
//! round trips, and sweep determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn spectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("spectra-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn spectrum_example_lists_all_seven_frequencies() {
    let out = spectra(&["spectrum", "--p", "7", "--set", "1,2,4", "--eps", "0.4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("spectrum size: 7"), "{text}");
    // At eps = 0.5 only the zero frequency survives.
    let out = spectra(&["spectrum", "--p", "7", "--set", "1,2,4", "--eps", "0.5"]);
    assert!(stdout(&out).contains("spectrum size: 1"));
}

#[test]
fn spectrum_table_export() {
    let path = temp_path("table.csv");
    let out = spectra(&[
        "spectrum",
        "--p",
        "7",
        "--set",
        "1,2,4",
        "--eps",
        "0.4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("xi,re,im,mag2\n"));
    assert_eq!(csv.lines().count(), 8);
    std::fs::remove_file(path).ok();
}

#[test]
fn verify_row_for_subgroup_instance() {
    let path = temp_path("report.csv");
    let out = spectra(&[
        "verify",
        "--theorem",
        "main",
        "--p",
        "101",
        "--family",
        "subgroup",
        "--d",
        "25",
        "--eps",
        "0.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("theorem=main family=subgroup p=101 |A|=25"),
        "{text}"
    );
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("theorem,family,p,"));
    assert_eq!(csv.lines().count(), 2);
    std::fs::remove_file(path).ok();
}

#[test]
fn verify_tightness_reports_exact_coset_energy() {
    let out = spectra(&[
        "verify",
        "--theorem",
        "tightness",
        "--p",
        "101",
        "--family",
        "subgroup",
        "--d",
        "25",
        "--eps",
        "0.1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("lhs(exact) = 9765625"), "{text}");
    assert!(text.contains("coset_exact=true"), "{text}");
}

#[test]
fn verify_with_explicit_r_singleton() {
    // sigma of the singleton R = {1} is 1.
    let out = spectra(&[
        "verify",
        "--theorem",
        "sigma",
        "--p",
        "101",
        "--family",
        "subgroup",
        "--d",
        "25",
        "--eps",
        "0.1",
        "--r-set",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("lhs(exact) = 1"), "{text}");
    assert!(text.contains("r_rule=explicit"), "{text}");
}

#[test]
fn exit_codes_follow_the_contract() {
    // Computation error: 9 is not prime.
    let out = spectra(&["spectrum", "--p", "9", "--set", "1", "--eps", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    // Usage error: unknown verb.
    let out = spectra(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // Usage error: missing required flag.
    let out = spectra(&["spectrum", "--p", "7"]);
    assert_eq!(out.status.code(), Some(2));
    // Computation error: epsilon outside (0, 1].
    let out = spectra(&["spectrum", "--p", "7", "--set", "1", "--eps", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn subgroup_set_file_round_trip() {
    let path = temp_path("subgroup.set");
    let out = spectra(&[
        "subgroup",
        "--p",
        "13",
        "--d",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("elements: 1,5,8,12"));
    let body = std::fs::read_to_string(&path).unwrap();
    assert_eq!(body, "p=13\n1\n5\n8\n12\n");
    // Feed it back through --set-file.
    let out = spectra(&[
        "spectrum",
        "--p",
        "13",
        "--set-file",
        path.to_str().unwrap(),
        "--eps",
        "0.9",
    ]);
    assert!(out.status.success());
    std::fs::remove_file(path).ok();
}

#[test]
fn energy_verbs() {
    let out = spectra(&[
        "energy", "--p", "101", "--set", "1,2,3", "--kind", "add", "--method", "brute",
    ]);
    assert!(stdout(&out).contains("E+(A,B) = 19"));
    let out = spectra(&["energy", "--p", "101", "--set", "1,6,36", "--kind", "c4"]);
    let text = stdout(&out);
    assert!(text.contains("sum C4   = 81"), "{text}");
    let out = spectra(&["energy", "--p", "101", "--set", "0,1", "--kind", "mult"]);
    assert_eq!(out.status.code(), Some(1), "zero in set is rejected");
}

#[test]
fn incidence_vinh_on_scene_file() {
    let path = temp_path("scene.txt");
    let scene = spectra_core_scene();
    std::fs::write(&path, scene).unwrap();
    let out = spectra(&[
        "incidence",
        "--scene",
        path.to_str().unwrap(),
        "--check",
        "vinh",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("pass"));
    std::fs::remove_file(path).ok();
}

/// A small mean-zero 3D scene in the scene-file format.
fn spectra_core_scene() -> String {
    let mut s = String::from("q=5 dim=3\n");
    s.push_str("P 0 0 0 1\n");
    s.push_str("P 1 2 3 -1\n");
    s.push_str("P 2 2 2 0.5\n");
    s.push_str("P 4 0 1 -0.5\n");
    s.push_str("S 1 0 0 0 1\n");
    s.push_str("S 0 1 0 2 -2\n");
    s.push_str("S 1 1 1 0 1.5\n");
    s
}

#[test]
fn incidence_lines_on_grid_scene() {
    // A = B = {1..5} in F_101 and the single line y = x: five incidences.
    let path = temp_path("grid.txt");
    let mut scene = String::from("q=101 dim=2\n");
    for x in 1..=5 {
        for y in 1..=5 {
            scene.push_str(&format!("P {x} {y} 1\n"));
        }
    }
    scene.push_str("S 1 100 0 1\n");
    std::fs::write(&path, scene).unwrap();
    let out = spectra(&[
        "incidence",
        "--scene",
        path.to_str().unwrap(),
        "--check",
        "lines",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("incidences = 5.00000000000e0"), "{text}");
    std::fs::remove_file(path).ok();
}

#[test]
fn sweep_outputs_are_byte_identical_across_runs() {
    let cfg_path = temp_path("sweep.cfg");
    std::fs::write(
        &cfg_path,
        "primes = 101\neps = 0.25, 0.5\nseeds = 0, 1\nfamilies = random, subgroup\n\
         theorems = main, zero_sum\nincidence_qs = 5\nincidence_seeds = 2\n",
    )
    .unwrap();
    let out_a = temp_path("sweep-a");
    let out_b = temp_path("sweep-b");
    for (out, jobs) in [(&out_a, "1"), (&out_b, "4")] {
        let r = spectra(&[
            "sweep",
            "--config",
            cfg_path.to_str().unwrap(),
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let csv_a = std::fs::read(format!("{}.csv", out_a.display())).unwrap();
    let csv_b = std::fs::read(format!("{}.csv", out_b.display())).unwrap();
    assert_eq!(csv_a, csv_b, "sorted emission is order-independent");
    let jsonl = std::fs::read_to_string(format!("{}.jsonl", out_a.display())).unwrap();
    assert!(jsonl.lines().next().unwrap().starts_with('{'));
    for suffix in ["csv", "jsonl"] {
        std::fs::remove_file(format!("{}.{suffix}", out_a.display())).ok();
        std::fs::remove_file(format!("{}.{suffix}", out_b.display())).ok();
    }
    std::fs::remove_file(cfg_path).ok();
}

#[test]
fn sweep_config_errors_carry_line_numbers() {
    let cfg_path = temp_path("bad.cfg");
    std::fs::write(&cfg_path, "primes = 101\nnot_a_key = 7\n").unwrap();
    let out = spectra(&["sweep", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    std::fs::remove_file(cfg_path).ok();
}

#[test]
fn selftest_passes() {
    let out = spectra(&["selftest"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("all 10 checks passed"), "{text}");
    assert_eq!(text.matches("[PASS]").count(), 10);
}
