use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use shapevec::geometry::io::{decode_pbm, write_pbm};
use shapevec::{BinaryMask, ShapeVector};

fn shapevec() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shapevec"));
    for (key, _) in std::env::vars() {
        if key.starts_with("SHAPEVEC_") {
            cmd.env_remove(key);
        }
    }
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn disc_file(dir: &Path, name: &str, r: f64) -> PathBuf {
    let m = BinaryMask::from_fn(40, 40, |x, y| {
        let (dx, dy) = (x as f64 + 0.5 - 20.0, y as f64 + 0.5 - 18.0);
        dx * dx + dy * dy <= r * r
    });
    let path = dir.join(name);
    write_pbm(&path, &m).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().last().unwrap_or("")).expect("json summary")
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mask = disc_file(dir.path(), "disc.pbm", 12.0);
    let sv_path = dir.path().join("disc.json");
    let out = run(shapevec()
        .args(["encode", "--basis", "cheby", "--dim", "20", "--tau", "1deg", "--mask"])
        .arg(&mask)
        .arg("-o")
        .arg(&sv_path));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["status"], "ok");
    let sv = ShapeVector::from_json(&fs::read_to_string(&sv_path).unwrap()).unwrap();
    assert_eq!(sv.coeffs.len(), 20);

    let pbm = dir.path().join("back.pbm");
    let out = run(shapevec()
        .args(["decode", "--points", "360", "--raster", "40x40", "--in"])
        .arg(&sv_path)
        .arg("-o")
        .arg(&pbm));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let back = decode_pbm(&fs::read(&pbm).unwrap()).unwrap();
    let orig = shapevec::geometry::io::read_pbm(&mask).unwrap();
    assert!(shapevec::iou(&orig, &back).unwrap() > 0.9);
}

#[test]
fn encode_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = disc_file(dir.path(), "a.pbm", 9.0);
    let b = disc_file(dir.path(), "b.pbm", 14.0);
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let path = dir.path().join(format!("out{k}.jsonl"));
            let out = run(shapevec()
                .arg("encode")
                .arg("--mask")
                .arg(&a)
                .arg("--mask")
                .arg(&b)
                .arg("-o")
                .arg(&path));
            assert!(out.status.success());
            fs::read(&path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert_eq!(ShapeVector::read_json_lines(&text).unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let mask = disc_file(dir.path(), "d.pbm", 10.0);
    let out_path = dir.path().join("o.json");
    // no such subcommand
    assert_eq!(run(shapevec().arg("frobnicate")).status.code(), Some(2));
    // missing output
    assert_eq!(
        run(shapevec().arg("encode").arg("--mask").arg(&mask)).status.code(),
        Some(2)
    );
    // bad basis and bad tau are both reported
    let out = run(shapevec()
        .args(["encode", "--basis", "wavelet", "--tau", "7deg", "--mask"])
        .arg(&mask)
        .arg("-o")
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("basis") && err.contains("tau"), "{err}");
    // odd Fourier length
    let out = run(shapevec()
        .args(["encode", "--basis", "fourier", "--dim", "7", "--mask"])
        .arg(&mask)
        .arg("-o")
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(2));
    // two corpus sources
    let out = run(shapevec()
        .args(["stats", "--synthetic", "3", "--masks"])
        .arg(dir.path())
        .arg("-o")
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn data_errors_exit_1_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let good = disc_file(dir.path(), "good.pbm", 10.0);
    let bad = dir.path().join("bad.pbm");
    fs::write(&bad, b"P4\n10 10\n\x00").unwrap();
    let out_path = dir.path().join("out.jsonl");
    let out = run(shapevec()
        .arg("encode")
        .arg("--mask")
        .arg(&good)
        .arg("--mask")
        .arg(&bad)
        .arg("-o")
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["status"], "error");
    assert!(!out_path.exists());
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        2,
        "no temp files left behind"
    );

    let empty = dir.path().join("empty.pbm");
    write_pbm(&empty, &BinaryMask::zeros(8, 8)).unwrap();
    let out = run(shapevec()
        .arg("encode")
        .arg("--mask")
        .arg(&empty)
        .arg("-o")
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_path.exists());
}

#[test]
fn sweep_table_has_one_row_per_config_and_ignores_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for threads in ["1", "0"] {
        let path = dir.path().join(format!("sweep{threads}.csv"));
        let out = run(shapevec()
            .args([
                "sweep",
                "--synthetic",
                "200",
                "--seed",
                "3",
                "--dims",
                "8,20,40",
                "--threads",
                threads,
                "-o",
            ])
            .arg(&path));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout_json(&out)["rows"], 6);
        tables.push(fs::read(&path).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    let text = String::from_utf8(tables.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("signature,basis,dim,points,e_recon,miou"));
}

#[test]
fn precedence_cli_env_config() {
    let dir = tempfile::tempdir().unwrap();
    let mask = disc_file(dir.path(), "d.pbm", 10.0);
    let config = dir.path().join("cfg.toml");
    fs::write(&config, "dim = 12\n[encode]\nbasis = \"poly\"\n").unwrap();
    let out_path = dir.path().join("o.json");
    let encode = |extra: &[&str], env: Option<(&str, &str)>| {
        let mut cmd = shapevec();
        cmd.arg("--config")
            .arg(&config)
            .arg("encode")
            .arg("--mask")
            .arg(&mask)
            .arg("-o")
            .arg(&out_path);
        cmd.args(extra);
        if let Some((k, v)) = env {
            cmd.env(k, v);
        }
        let out = run(&mut cmd);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        ShapeVector::from_json(&fs::read_to_string(&out_path).unwrap()).unwrap()
    };
    let sv = encode(&[], None);
    assert_eq!((sv.coeffs.basis.name(), sv.coeffs.len()), ("monomial", 12));
    let sv = encode(&[], Some(("SHAPEVEC_DIM", "6")));
    assert_eq!(sv.coeffs.len(), 6);
    let sv = encode(&["--dim", "4"], Some(("SHAPEVEC_DIM", "6")));
    assert_eq!(sv.coeffs.len(), 4);
}

#[test]
fn ingest_writes_directory_and_refuses_nonempty_target() {
    let dir = tempfile::tempdir().unwrap();
    let ann = dir.path().join("ann.json");
    fs::write(
        &ann,
        r#"{"annotations":[
            {"id":1,"segmentation":[[10,10,30,10,30,25,10,25]]},
            {"id":2,"segmentation":{"counts":[1,2],"size":[4,4]}},
            {"id":3,"segmentation":[[0,0,12,0,6,9]]}
        ]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("masks");
    let out = run(shapevec()
        .arg("ingest")
        .arg("--annotations")
        .arg(&ann)
        .arg("-o")
        .arg(&out_dir));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["shapes"], 2);
    assert_eq!(summary["skipped_objects"], 1);
    assert_eq!(fs::read_dir(&out_dir).unwrap().count(), 2);

    let stats = dir.path().join("stats.csv");
    let out = run(shapevec()
        .args(["stats", "--dim", "6", "--masks"])
        .arg(&out_dir)
        .arg("-o")
        .arg(&stats));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&stats).unwrap().lines().count(), 7);

    let out = run(shapevec()
        .arg("ingest")
        .arg("--annotations")
        .arg(&ann)
        .arg("-o")
        .arg(&out_dir));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn version_reports_build() {
    let out = run(shapevec().arg("--version"));
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}
