use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "[grid]\nnx = 12\nny = 12\nnz = 12\nnt = 24\n\
[exposure]\nmode = poisson\nphotons_scale = 1e4\nseed = 7\n\
[mask]\npoints = 4\n[object]\nt_max = 15\n[dual]\nt_max = 10\nwarm_start_iters = 10\n";

fn nlos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlos"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("run.ini");
    fs::write(&path, format!("{SMALL}[io]\ndir = {}\n", dir.display())).unwrap();
    path.to_string_lossy().into_owned()
}

fn pipeline(dir: &Path) -> String {
    let cfg = write_config(dir);
    assert_eq!(nlos(&["simulate", "-c", &cfg]).status.code(), Some(0));
    let csv = dir.join("metrics.csv");
    for method in ["backproject", "curv-object"] {
        let out = nlos(&["reconstruct", "-c", &cfg, "--method", method]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let pred = dir.join(format!("recon_{method}.vol"));
        let out = nlos(&[
            "evaluate",
            "--pred",
            pred.to_str().unwrap(),
            "--truth",
            dir.join("truth.vol").to_str().unwrap(),
            "--out",
            csv.to_str().unwrap(),
            "--scene",
            "two_planes",
            "--method",
            method,
            "--mask",
            "4x4",
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    fs::read_to_string(csv).unwrap()
}

#[test]
fn pipeline_writes_artifacts_and_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let csv = pipeline(a.path());
    assert_eq!(csv, pipeline(b.path()));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("scene,method,mask"));
    for f in [
        "truth.vol",
        "transient.trn",
        "mask.msk",
        "energy_curv-object.csv",
        "recon_curv-object_intensity.pgm",
        "recon_curv-object_depth.pgm",
        "runtime_curv-object.txt",
    ] {
        assert!(a.path().join(f).exists(), "{f}");
    }
    let energy = fs::read_to_string(a.path().join("energy_curv-object.csv")).unwrap();
    assert!(energy.starts_with("iter,energy\n"));
    assert!(energy.lines().count() >= 3);
}

#[test]
fn benchmark_emits_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = nlos(&[
        "benchmark",
        "-c",
        &cfg,
        "--set",
        "benchmark.masks=4,full",
        "--set",
        "benchmark.methods=backproject,lct,curv-object",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",0")));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim_end(),
        csv.trim_end()
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap().to_string();

    assert_eq!(nlos(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        nlos(&["simulate", "--set", "grid.colour=3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nlos(&["simulate", "-c", &format!("{d}/missing.ini")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nlos(&["reconstruct", "--set", &format!("io.dir={d}")])
            .status
            .code(),
        Some(2),
        "missing inputs are an io error"
    );

    let garbage = dir.path().join("garbage.vol");
    fs::write(&garbage, b"not a tensor").unwrap();
    let g = garbage.to_str().unwrap();
    let out = nlos(&[
        "evaluate",
        "--pred",
        g,
        "--truth",
        g,
        "--out",
        &format!("{d}/m.csv"),
    ]);
    assert_eq!(out.status.code(), Some(3));

    let cfg = write_config(dir.path());
    assert_eq!(nlos(&["simulate", "-c", &cfg]).status.code(), Some(0));
    let out = nlos(&[
        "reconstruct",
        "-c",
        &cfg,
        "--method",
        "curv-object",
        "--set",
        "object.l_safety=1e-3",
    ]);
    assert_eq!(out.status.code(), Some(2), "l_safety below one is rejected");
}
