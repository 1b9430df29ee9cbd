use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qbm_cli::{parse_config, ConfigError, SnapshotFile, Table};
use qbm_core::{d_pp_gaussian_closed, rel_diff, GasSpec};

const GAUSSIAN: &str = "\
gas.m = 1.0
gas.beta = 1.0
gas.n = 0.01
particle.mass = 20.0
scattering.model = gaussian
scattering.v0 = 2.0
scattering.r0 = 0.5
";

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn qbm(args: &[&str], log: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbm"))
        .args(args)
        .env("QBM_LOG", log)
        .output()
        .expect("binary runs")
}

/// Writes `text` as a config in `dir` and runs `task` with `--out`.
fn run_task(dir: &Path, name: &str, text: &str, task: &str) -> (Output, PathBuf) {
    let cfg = dir.join(format!("{name}.cfg"));
    fs::write(&cfg, text).unwrap();
    let out = dir.join(format!("{name}.csv"));
    let output = qbm(
        &[task, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        "quiet",
    );
    (output, out)
}

#[test]
fn bundled_configs_parse() {
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("cfg") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let task = if text.contains("task.kind") { None } else { Some(qbm_cli::TaskKind::Check) };
        qbm_cli::parse_config_with(&text, path.parent().unwrap(), task)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 4);
}

#[test]
fn duplicate_key_names_both_lines() {
    let text = format!("{GAUSSIAN}task.kind = dpp\ngas.beta = 2.0\n");
    let errs = parse_config(&text).unwrap_err().0;
    assert_eq!(errs.len(), 1);
    match &errs[0] {
        ConfigError::Parse { line, message } => {
            assert_eq!(*line, 9);
            assert!(message.contains("lines 2 and 9"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn bose_fugacity_above_one_is_rejected() {
    let text = "gas.m = 1\ngas.beta = 1\ngas.n = 0.1\ngas.z = 1.2\ngas.statistics = be\nparticle.mass = 5\n\
                scattering.model = contact\nscattering.a0 = 1\ntask.kind = sfactor\n";
    let errs = parse_config(text).unwrap_err().0;
    let hit = errs.iter().find_map(|e| match e {
        ConfigError::Validation { field, line, message } if field == "gas.z" => Some((*line, message.clone())),
        _ => None,
    });
    let (line, message) = hit.expect("gas.z error");
    assert_eq!(line, Some(4));
    assert!(message.contains("0 < z < 1"), "{message}");
    assert!(message.contains("Bose-Einstein"), "{message}");
}

#[test]
fn dpp_matches_gaussian_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_task(dir.path(), "dpp", GAUSSIAN, "dpp");
    assert_eq!(output.status.code(), Some(0));
    let table = Table::parse(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(table.columns, ["D_pp", "eta", "D_xx", "kappa", "method", "rel_err_vs_closed_form"]);
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.rows[0][4], "quadrature");
    assert!(table.numbers("rel_err_vs_closed_form").unwrap()[0] <= 1e-8);
    let gas = GasSpec::maxwell_boltzmann(1.0, 1.0, 0.01).unwrap();
    let closed = d_pp_gaussian_closed(2.0, 0.5, &gas).unwrap();
    assert!(rel_diff(table.numbers("D_pp").unwrap()[0], closed) <= 1e-8);
    let eta = table.numbers("eta").unwrap()[0];
    assert_eq!(table.numbers("D_pp").unwrap()[0] / eta, 20.0);
}

#[test]
fn dilute_structure_factors_coincide() {
    let dir = tempfile::tempdir().unwrap();
    let text = "gas.m = 1\ngas.beta = 1\ngas.n = 1\ngas.z = 1e-6\ngas.statistics = fd\nparticle.mass = 10\n\
                scattering.model = contact\nscattering.a0 = 1\nscan.q_min = 0.05\nscan.q_max = 3\nscan.points = 40\nscan.p = 1.5\n";
    let (output, out) = run_task(dir.path(), "dilute", text, "sfactor");
    assert_eq!(output.status.code(), Some(0));
    let table = Table::parse(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(table.columns, ["q", "E", "S_mb", "S_be", "S_fd", "S_mb_inf"]);
    assert_eq!(table.rows.len(), 40);
    let mb = table.numbers("S_mb").unwrap();
    for col in ["S_be", "S_fd"] {
        for (a, b) in table.numbers(col).unwrap().iter().zip(&mb) {
            assert!(rel_diff(*a, *b) <= 1e-5, "{col}: {a} vs {b}");
        }
    }
}

#[test]
fn check_passes_on_default_config() {
    let cfg = configs_dir().join("default.cfg");
    let output = qbm(&["check", "--config", cfg.to_str().unwrap()], "quiet");
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stdout));
    assert!(output.stderr.is_empty());
    let table = Table::parse(std::str::from_utf8(&output.stdout).unwrap()).unwrap();
    let col = table.column_index("result").unwrap();
    assert!(table.rows.len() >= 10);
    assert!(table.rows.iter().all(|r| r[col] != "fail"));
}

#[test]
fn failed_invariant_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{GAUSSIAN}tolerance.detailed_balance = 1e-300\n");
    let (output, out) = run_task(dir.path(), "strict", &text, "check");
    assert_eq!(output.status.code(), Some(3));
    let table = Table::parse(&fs::read_to_string(out).unwrap()).unwrap();
    let row = table.rows.iter().find(|r| r[0] == "detailed_balance").unwrap();
    assert_eq!(row[3], "fail");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let (output, _) = run_task(dir.path(), "bad", "gas.m = 1\n", "dpp");
    assert_eq!(output.status.code(), Some(1));
    let text = format!("{GAUSSIAN}task.kind = dpp\n");
    let (output, _) = run_task(dir.path(), "mismatch", &text, "sfactor");
    assert_eq!(output.status.code(), Some(1));
    let missing = qbm(&["dpp", "--config", "/nonexistent/qbm.cfg"], "quiet");
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn numerical_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{GAUSSIAN}evolve.t_final = 1.0\nevolve.dt = 100.0\nlindblad.points = 16\n");
    let (output, _) = run_task(dir.path(), "cfl", &text, "evolve-lindblad");
    assert_eq!(output.status.code(), Some(2));
    let loud = qbm(
        &["evolve-lindblad", "--config", dir.path().join("cfl.cfg").to_str().unwrap()],
        "info",
    );
    assert_eq!(loud.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&loud.stderr).contains("stability condition"));
}

#[test]
fn tabulated_table_resolves_next_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..=400)
        .map(|i| {
            let q = 0.05 * i as f64;
            format!("{q} {}\n", 0.3 * (-q * q / 4.0).exp())
        })
        .collect();
    fs::write(dir.path().join("t.dat"), rows).unwrap();
    let text = "gas.m = 1\ngas.beta = 1\ngas.n = 0.01\nparticle.mass = 20\nscattering.model = tabulated\n\
                scattering.table = t.dat\n";
    let (output, out) = run_task(dir.path(), "tab", text, "dpp");
    assert_eq!(output.status.code(), Some(0));
    let table = Table::parse(&fs::read_to_string(out).unwrap()).unwrap();
    assert!(table.numbers("D_pp").unwrap()[0] > 0.0);
    assert!(table.numbers("rel_err_vs_closed_form").unwrap()[0].is_nan());

    let gone = text.replace("t.dat", "missing.dat");
    let (output, _) = run_task(dir.path(), "gone", &gone, "dpp");
    assert_eq!(output.status.code(), Some(1));
}

const LINDBLAD: &str = "\
gas.m = 0.1
gas.beta = 1.0
gas.z = 0.1
particle.mass = 1.0
scattering.model = gaussian
scattering.v0 = 400
scattering.r0 = 1.0
lindblad.points = 24
lindblad.sample_every = 3
evolve.t_final = 0.5
evolve.snapshots = 3
initial.p0 = 0.5
";

const KRAMERS: &str = "\
gas.m = 1.0
gas.beta = 1.0
gas.n = 0.01
particle.mass = 20.0
scattering.model = gaussian
scattering.v0 = 2.0
scattering.r0 = 0.5
kramers.x_points = 16
kramers.p_points = 64
evolve.t_final = 500
evolve.snapshots = 4
initial.p0 = 3.0
";

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for (text, task) in [
        (GAUSSIAN, "sfactor"),
        (GAUSSIAN, "dpp"),
        (LINDBLAD, "evolve-lindblad"),
        (KRAMERS, "evolve-kramers"),
    ] {
        let (a, out_a) = run_task(dir.path(), &format!("{task}-a"), text, task);
        let (b, out_b) = run_task(dir.path(), &format!("{task}-b"), text, task);
        assert_eq!(a.status.code(), Some(0), "{task}");
        assert_eq!(b.status.code(), Some(0), "{task}");
        assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap(), "{task}");
        if task.starts_with("evolve") {
            let snap = |p: &Path| fs::read(qbm_cli::snapshot_path(p)).unwrap();
            assert_eq!(snap(&out_a), snap(&out_b), "{task} snapshots");
        }
    }
}

#[test]
fn emitted_tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let hash = qbm_cli::config_hash(LINDBLAD);
    let (output, out) = run_task(dir.path(), "lindblad", LINDBLAD, "evolve-lindblad");
    assert_eq!(output.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let table = Table::parse(&text).unwrap();
    assert_eq!(table.meta("config_sha256"), Some(hash.as_str()));
    assert_eq!(table.meta("task"), Some("evolve-lindblad"));
    assert_eq!(table.meta("qbm"), Some(qbm_cli::VERSION));
    let times = table.numbers("t").unwrap();
    assert_eq!(times[0], 0.0);
    assert_eq!(*times.last().unwrap(), 0.5);
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    let trace = table.numbers("trace").unwrap();
    assert!(trace.iter().all(|t| (t - 1.0).abs() < 1e-12));

    // re-serialising the parsed numbers reproduces every data line
    for (line, row) in text.lines().filter(|l| !l.starts_with('#')).zip(&table.rows) {
        let again: Vec<String> = row
            .iter()
            .map(|c| qbm_cli::table::format_number(c.parse::<f64>().unwrap()))
            .collect();
        assert_eq!(line, again.join(" "));
    }

    let snaps = SnapshotFile::parse(&fs::read_to_string(qbm_cli::snapshot_path(&out)).unwrap()).unwrap();
    assert_eq!(snaps.columns, ["p", "rho_pp"]);
    assert_eq!(snaps.snapshots.len(), 3);
    assert_eq!(snaps.snapshots[2].time, 0.5);
    for s in &snaps.snapshots {
        assert_eq!(s.rows.len(), 24);
        let total: f64 = s.rows.iter().map(|r| r[1]).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    let (output, out) = run_task(dir.path(), "kramers", KRAMERS, "evolve-kramers");
    assert_eq!(output.status.code(), Some(0));
    let table = Table::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(*table.numbers("t").unwrap().last().unwrap(), 500.0);
    let snaps = SnapshotFile::parse(&fs::read_to_string(qbm_cli::snapshot_path(&out)).unwrap()).unwrap();
    assert_eq!(snaps.columns, ["x", "p", "W"]);
    assert_eq!(snaps.snapshots.len(), 4);
    assert!(snaps.snapshots.iter().all(|s| s.rows.len() == 16 * 64));
}
