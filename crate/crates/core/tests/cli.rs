mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use framekit::io::{read_frame_file, write_frame_file, FrameFile, Metadata};
use framekit::FrameMatrix;
use tempfile::TempDir;

fn framekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framekit"))
        .args(args)
        .env_remove("FRAMEKIT_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_frame(dir: &TempDir, name: &str, cols: &[Vec<f64>]) -> PathBuf {
    let path = dir.path().join(name);
    let frame = FrameMatrix::from_columns(cols).unwrap();
    write_frame_file(
        &path,
        &FrameFile::from_frame(&frame, Metadata::default()),
        None,
    )
    .unwrap();
    path
}

fn load(path: &Path) -> FrameMatrix {
    read_frame_file(path, None).unwrap().to_frame().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn mercedes_benz(scale: f64) -> Vec<Vec<f64>> {
    let h = 3f64.sqrt() / 2.0;
    vec![
        vec![scale, 0.0],
        vec![-0.5 * scale, h * scale],
        vec![-0.5 * scale, -h * scale],
    ]
}

#[test]
fn construct_examples() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.json");
    let run = framekit(&["construct", "--seed", "0.5,0.5", "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(stdout(&run).contains("diagonal"));
    let frame = load(&out);
    assert_eq!((frame.dim(), frame.count()), (2, 3));
    assert!((frame.column(0)[0] - 0.816_496_580_927_726).abs() < 1e-12);
    assert!(frame.column(0)[1].abs() < 1e-15);

    let run = framekit(&["construct", "--seed", "0,0,0"]);
    assert_eq!(code(&run), 0);
    assert!(stderr(&run).contains("degenerate seed"));
    assert!(stdout(&run).contains("\"vectors\""));

    assert_eq!(code(&framekit(&["construct", "--seed", "0.8,0.6"])), 2);
    assert_eq!(code(&framekit(&["construct", "--seed", "0.5,x"])), 3);
    assert_eq!(code(&framekit(&["construct", "--seed", "0.5"])), 3);
    assert_eq!(code(&framekit(&["construct", "--seed", "-0.25,0.5"])), 0);

    let seed_file = dir.path().join("seed.txt");
    std::fs::write(&seed_file, "0.1 0.2\n0.3\n").unwrap();
    let run = framekit(&[
        "construct",
        "--seed-file",
        s(&seed_file),
        "--out",
        s(&dir.path().join("f.csv")),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert_eq!(load(&dir.path().join("f.csv")).count(), 4);
}

#[test]
fn verify_examples() {
    let dir = TempDir::new().unwrap();
    let scaled = write_frame(&dir, "mb.json", &mercedes_benz((2.0f64 / 3.0).sqrt()));
    assert_eq!(code(&framekit(&["verify", s(&scaled)])), 0);

    let unit = write_frame(&dir, "unit.csv", &mercedes_benz(1.0));
    let run = framekit(&["verify", s(&unit)]);
    assert_eq!(code(&run), 1);
    let text = stdout(&run);
    assert!(text.contains("A = 1.500000000000"), "{text}");
    assert!(text.contains("B = 1.500000000000"));
    assert!(text.contains("is_tight: true"));

    let truncated = dir.path().join("bad.json");
    std::fs::write(&truncated, "{\"n\": 2, \"N\": 3, \"vectors\": [[1.0, 0.0],").unwrap();
    assert_eq!(code(&framekit(&["verify", s(&truncated)])), 3);
    assert_eq!(
        code(&framekit(&["verify", s(&dir.path().join("missing.csv"))])),
        3
    );
}

#[test]
fn scale_examples() {
    let dir = TempDir::new().unwrap();
    let unit = write_frame(&dir, "unit.json", &mercedes_benz(1.0));
    let out = dir.path().join("scaled.json");
    let run = framekit(&["scale", s(&unit), "--oracle", "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = stdout(&run);
    assert!(
        text.contains("weights: 0.816496580928 0.816496580928 0.816496580928"),
        "{text}"
    );
    assert!(text.contains("oracle agreement: true"));
    assert_eq!(code(&framekit(&["verify", s(&out)])), 0);

    let r = 0.5f64.sqrt();
    let pair = write_frame(
        &dir,
        "pair.csv",
        &[vec![1.0, 0.0], vec![0.0, 1.0], vec![r, r]],
    );
    let run = framekit(&["scale", s(&pair)]);
    assert_eq!(code(&run), 1);
    assert!(stdout(&run).contains("reason: ContainsOrthonormalPair"));

    let five: Vec<Vec<f64>> = (0..5)
        .map(|k| vec![(k as f64).cos(), (k as f64).sin()])
        .collect();
    let five = write_frame(&dir, "five.csv", &five);
    let run = framekit(&["scale", s(&five)]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("expected 3 vectors"));

    let zero = write_frame(
        &dir,
        "zero.csv",
        &[vec![1.0, 0.0], vec![0.0, 0.0], vec![r, r]],
    );
    assert_eq!(code(&framekit(&["scale", s(&zero)])), 2);
    let long = write_frame(
        &dir,
        "long.csv",
        &[vec![2.0, 0.0], vec![0.0, 1.0], vec![r, r]],
    );
    assert_eq!(code(&framekit(&["scale", s(&long)])), 2);
    let parallel = write_frame(
        &dir,
        "par.csv",
        &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![r, r]],
    );
    assert_eq!(code(&framekit(&["scale", s(&parallel)])), 2);

    let h = 3f64.sqrt() / 2.0;
    let near = write_frame(
        &dir,
        "near.csv",
        &[vec![1.0 + 5e-7, 0.0], vec![-0.5, h], vec![-0.5, -h]],
    );
    let run = framekit(&["scale", s(&near)]);
    assert_eq!(code(&run), 0);
    assert!(stderr(&run).contains("normalizing"));
}

#[test]
fn diagnose_examples() {
    let dir = TempDir::new().unwrap();
    let built = dir.path().join("c.json");
    assert_eq!(
        code(&framekit(&[
            "construct",
            "--seed",
            "0.3,-0.2,0.4",
            "--out",
            s(&built)
        ])),
        0
    );
    let run = framekit(&["diagnose", s(&built)]);
    assert_eq!(code(&run), 0, "{}", stdout(&run));
    assert!(!stdout(&run).contains("FAIL"));

    let nontight = write_frame(
        &dir,
        "nt.csv",
        &[vec![1.0, 0.0], vec![0.3, 0.5], vec![0.2, -0.1]],
    );
    let run = framekit(&["diagnose", s(&nontight)]);
    assert_eq!(code(&run), 1);
    let line = stdout(&run)
        .lines()
        .find(|l| l.starts_with("planar_tightness"))
        .unwrap()
        .to_string();
    assert!(line.contains("FAIL"), "{line}");

    let r5 = dir.path().join("r5.json");
    assert_eq!(
        code(&framekit(&[
            "random",
            "--n",
            "3",
            "--N",
            "5",
            "--seed",
            "7",
            "--out",
            s(&r5)
        ])),
        0
    );
    let run = framekit(&["diagnose", s(&r5)]);
    assert_eq!(code(&run), 0);
    let table = stdout(&run);
    let minors = table
        .lines()
        .find(|l| l.starts_with("minor_determinants"))
        .unwrap();
    assert!(minors.contains("skip"));
    for check in ["cosine_sum", "sine_sum", "cos2theta_sum"] {
        let line = table.lines().find(|l| l.starts_with(check)).unwrap();
        assert!(line.contains("pass"), "{line}");
    }
}

#[test]
fn random_examples() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(
        code(&framekit(&[
            "random",
            "--n",
            "3",
            "--N",
            "4",
            "--seed",
            "42",
            "--out",
            s(&a)
        ])),
        0
    );
    assert_eq!(
        code(&framekit(&[
            "random",
            "--n",
            "3",
            "--N",
            "4",
            "--seed",
            "42",
            "--out",
            s(&b)
        ])),
        0
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(code(&framekit(&["verify", s(&a)])), 0);

    let basis = dir.path().join("basis.csv");
    assert_eq!(
        code(&framekit(&[
            "random",
            "--n",
            "2",
            "--N",
            "2",
            "--seed",
            "1",
            "--out",
            s(&basis)
        ])),
        0
    );
    let g = load(&basis).gram();
    assert!((g - nalgebra::DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);

    assert_eq!(code(&framekit(&["random", "--n", "4", "--N", "2"])), 2);
}

#[test]
fn canon_and_formats() {
    let dir = TempDir::new().unwrap();
    let src = dir.path().join("r.tsv");
    assert_eq!(
        code(&framekit(&[
            "random",
            "--n",
            "3",
            "--N",
            "5",
            "--seed",
            "3",
            "--out",
            s(&src)
        ])),
        0
    );
    assert!(std::fs::read_to_string(&src).unwrap().contains('\t'));
    let out = dir.path().join("c.json");
    let run = framekit(&["canon", s(&src), "--out", s(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let canon = load(&out);
    assert!(canon.matrix()[(1, 0)].abs() < 1e-12 && canon.matrix()[(2, 0)].abs() < 1e-12);

    let singular = write_frame(
        &dir,
        "s.csv",
        &[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]],
    );
    assert_eq!(code(&framekit(&["canon", s(&singular)])), 2);

    let run = framekit(&["--format", "dsv", "random", "--n", "2", "--N", "3"]);
    assert_eq!(code(&run), 0);
    assert_eq!(stdout(&run).lines().count(), 3);
}

#[test]
fn file_round_trip_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    for ext in ["json", "csv", "tsv"] {
        let first = dir.path().join(format!("a.{ext}"));
        assert_eq!(
            code(&framekit(&[
                "construct",
                "--seed",
                "0.1,-0.7,0.2",
                "--out",
                s(&first)
            ])),
            0
        );
        let file = read_frame_file(&first, None).unwrap();
        let second = dir.path().join(format!("b.{ext}"));
        write_frame_file(&second, &file, None).unwrap();
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap(),
            "{ext}"
        );
    }
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let mut rng = rng(123);
    for k in 0..100 {
        let n = 2 + k % 6;
        let w = random_seed(&mut rng, n, 0.999);
        let seed: Vec<String> = w.entries().iter().map(|x| format!("{x:.17e}")).collect();
        let path = dir.path().join(format!("c{k}.json"));
        let run = framekit(&["construct", "--seed", &seed.join(","), "--out", s(&path)]);
        assert_eq!(code(&run), 0, "{}", stderr(&run));
        assert_eq!(code(&framekit(&["verify", s(&path)])), 0);

        if k % 10 == 0 {
            let (u, lengths) = load(&path).normalized().unwrap();
            let unit = dir.path().join(format!("u{k}.json"));
            write_frame_file(&unit, &FrameFile::from_frame(&u, Metadata::default()), None).unwrap();
            let scaled = dir.path().join(format!("s{k}.json"));
            let run = framekit(&["scale", s(&unit), "--out", s(&scaled)]);
            assert_eq!(code(&run), 0, "{}", stdout(&run));
            assert!(max_abs_diff(&load(&scaled).norms(), &lengths) <= 1e-8);
        }
    }
}

#[test]
fn global_flags_and_errors() {
    let run = framekit(&["--help"]);
    assert_eq!(code(&run), 0);
    assert!(stdout(&run).contains("construct"));
    assert_eq!(code(&framekit(&["--version"])), 0);
    assert_eq!(code(&framekit(&["frobnicate"])), 3);
    assert_eq!(
        code(&framekit(&[
            "--tol", "-1", "random", "--n", "2", "--N", "3"
        ])),
        3
    );

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    assert_eq!(
        code(&framekit(&[
            "random",
            "--n",
            "3",
            "--N",
            "4",
            "--out",
            s(&path)
        ])),
        0
    );
    let strict = Command::new(env!("CARGO_BIN_EXE_framekit"))
        .args(["verify", s(&path)])
        .env("FRAMEKIT_TOL", "1e-30")
        .output()
        .unwrap();
    assert_eq!(code(&strict), 1);
    assert_eq!(code(&framekit(&["verify", s(&path), "--tol", "1e-6"])), 0);
}
