use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mhar::linalg::Matrix;
use mhar::polytope::make_hypercube;
use mhar::stats::sample_uniform_hypercube;
use mhar::Polytope;
use mhar_cli::{read_samples, write_samples};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mhar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_polytope(dir: &Path, name: &str, a: &[[f64; 2]], b: &[f64]) -> String {
    let p = Polytope::new(
        Matrix::from_rows(a, 2).unwrap(),
        Matrix::column_vector(b),
        Matrix::zeros(0, 2),
        Matrix::zeros(0, 1),
    );
    let path = dir.join(name);
    fs::write(&path, p.to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn center_of_cube() {
    let o = mhar(&["center", "--figure", "hypercube", "--dim", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "r = 1\nx = 0 0 0\n");
}

#[test]
fn center_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.json");
    fs::write(&path, make_hypercube(2).unwrap().to_json()).unwrap();
    let o = mhar(&["center", "--in", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("r = 1\n"));
}

#[test]
fn sample_row_count_and_feasibility() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = mhar(&[
        "sample", "--figure", "simplex", "--dim", "4", "--z", "2", "--phi", "27", "--samples", "4", "--seed", "3",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x1,x2,x3,x4");
    assert_eq!(text.lines().count(), 5);

    let samples = read_samples(&out).unwrap();
    let p = mhar::polytope::make_simplex(4).unwrap();
    for i in 0..samples.rows() {
        assert!(p.contains_slice(samples.row(i), 1e-8), "row {i}");
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["format_version"], 1);
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["config"]["z"], 2);
    assert_eq!(manifest["config"]["phi"], 27);
    assert_eq!(manifest["samples_written"], 4);
    assert_eq!(manifest["iterate_count"], 2 * 27 * 2);
    assert!(manifest["seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(manifest["degenerate_redraws"], 0);
}

#[test]
fn printed_values_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let m = Matrix::from_rows(&[[0.1, -1.0 / 3.0], [1e-300, 123456789.123456789]], 2).unwrap();
    write_samples(&path, &m).unwrap();
    assert_eq!(read_samples(&path).unwrap(), m);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = mhar(&[
            "sample", "--figure", "hypercube", "--dim", "4", "--z", "8", "--phi", "20", "--samples", "64", "--seed",
            seed, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        fs::read(out).unwrap()
    };
    let a = run("a.csv", "11");
    assert_eq!(a, run("b.csv", "11"));
    assert_ne!(a, run("c.csv", "12"));
}

#[test]
fn uniform_cube_samples_pass() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    write_samples(&path, &sample_uniform_hypercube(&mut rng, 5, 1000)).unwrap();
    let o = mhar(&[
        "test-uniformity", "--figure", "hypercube", "--dim", "5", "--sample-file", path.to_str().unwrap(),
        "--reference-size", "1000", "--seed", "99",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("edge_count = 1999"), "{text}");
    assert!(text.lines().last().unwrap().starts_with("PASS"), "{text}");
}

#[test]
fn clustered_samples_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut m = sample_uniform_hypercube(&mut rng, 3, 300);
    m.as_mut_slice().iter_mut().for_each(|v| *v = 0.9 + 0.1 * *v);
    write_samples(&path, &m).unwrap();
    let o = mhar(&["test-uniformity", "--figure", "hypercube", "--dim", "3", "--sample-file", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().last().unwrap().starts_with("FAIL"));
}

#[test]
fn reference_file_for_custom_polytope() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write_polytope(dir.path(), "sq.json", &[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], &[1.0; 4]);
    let path = dir.path().join("a.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    write_samples(&path, &sample_uniform_hypercube(&mut rng, 2, 200)).unwrap();
    let args = ["test-uniformity", "--in", &poly, "--sample-file", path.to_str().unwrap()];
    assert_eq!(mhar(&args).status.code(), Some(2));
    let with_ref = [&args[..], &["--reference-file", path.to_str().unwrap()]].concat();
    assert!(mhar(&with_ref).status.success());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_polytope(dir.path(), "empty.json", &[[1.0, 0.0], [-1.0, 0.0]], &[-1.0, -1.0]);
    let flat = write_polytope(dir.path(), "flat.json", &[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], &[1.0, 1.0, 0.0, 0.0]);
    let open = write_polytope(dir.path(), "open.json", &[[-1.0, 0.0], [0.0, -1.0]], &[0.0, 0.0]);
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{ not json").unwrap();

    let code = |args: &[&str]| mhar(args).status.code();
    assert_eq!(code(&["center", "--in", &empty]), Some(3));
    assert_eq!(code(&["center", "--in", &flat]), Some(4));
    assert_eq!(code(&["center", "--in", &open]), Some(5));
    assert_eq!(code(&["center", "--in", garbage.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["center", "--in", "/nonexistent/p.json"]), Some(2));
    assert_eq!(code(&["center", "--figure", "hypercube", "--in", &flat]), Some(2));
    assert_eq!(code(&["center", "--figure", "hypercube", "--dim", "0"]), Some(2));
    assert_eq!(code(&["sample", "--figure", "hypercube", "--dim", "2", "--z", "0", "--out", "/tmp/x.csv"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));

    let o = mhar(&["center", "--in", &empty]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("EMPTY_POLYTOPE"));
}

#[test]
fn bench_reports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let o = mhar(&[
        "bench", "--figure", "hypercube", "--dim", "3", "--z-list", "1,4", "--phi", "5", "--windows", "2",
        "--repetitions", "2", "--out", csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("hypercube,3,1,5,2,10,"));
    assert!(lines[2].starts_with("hypercube,3,4,5,2,40,"));

    let json = dir.path().join("bench.json");
    let o = mhar(&[
        "bench", "--figure", "simplex", "--dim", "3", "--z-list", "2", "--phi", "3", "--repetitions", "1", "--out",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["records"][0]["total_samples"], 6);
}
