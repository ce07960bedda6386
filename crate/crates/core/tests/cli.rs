use std::fs;
use std::path::Path;
use std::process::Command;

use caponef::classify::model_io::parse_forest;
use caponef::classify::Classifier;
use caponef::io::read_features_csv;
use caponef::rng::rng_from_seed;
use rand::Rng;

fn caponef(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_caponef"))
        .args(args)
        .output()
        .expect("spawn caponef")
}

fn ok(args: &[&str]) {
    let out = caponef(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    csv::Reader::from_path(p)
        .unwrap()
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

/// gen-dataset + extract into `root/ds` and `root/ft`.
fn small_dataset(root: &Path, frames: &str, seed: &str) {
    let ds = root.join("ds");
    let ft = root.join("ft");
    ok(&["gen-dataset", "--out-dir", s(&ds), "--frames", frames, "--seed", seed, "--no-timestamp"]);
    ok(&["extract", "--input", s(&ds), "--out-dir", s(&ft), "--no-timestamp"]);
}

#[test]
fn gen_dataset_manifest_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        ok(&["gen-dataset", "--out-dir", s(d), "--frames", "100", "--seed", "5", "--no-timestamp"]);
    }
    assert_eq!(csv_rows(&a.join("manifest.csv")).len(), 200);
    assert_eq!(csv_rows(&a.join("devices.csv")).len(), 2);
    for name in ["etalon.iq", "device_0.iq", "device_1.iq", "manifest.csv", "devices.csv", "run_info.txt"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let info = fs::read_to_string(a.join("run_info.txt")).unwrap();
    assert!(info.contains("seed=5\n") && !info.contains("timestamp="));
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    small_dataset(root, "120", "2");
    let features = root.join("ft/features.csv");
    let set = read_features_csv(&features).unwrap();
    assert!(set.len() as f64 >= 0.95 * 240.0);
    let header = fs::read_to_string(&features).unwrap();
    assert!(header.starts_with("label,P1,P2,P3,P4,P5,P6,P7,P8,P9,P10\n"));

    let st = root.join("st");
    ok(&["stats", "--input", s(&features), "--out-dir", s(&st), "--no-timestamp"]);
    let sig = csv_rows(&st.join("significance.csv"));
    assert_eq!(sig.len(), 10);
    let mags: Vec<f64> = sig.iter().map(|r| r[1].parse::<f64>().unwrap().abs()).collect();
    assert!(mags.windows(2).all(|w| w[0] >= w[1]));
    for name in caponef::features::FEATURE_NAMES {
        let h = csv_rows(&st.join(format!("histogram_{name}.csv")));
        assert_eq!(h.len(), 50);
        assert_eq!(h.iter().map(|r| r[3].parse::<usize>().unwrap()).sum::<usize>(), set.len());
    }
    assert_eq!(csv_rows(&st.join("pearson.csv")).len(), 10);

    let tr = root.join("tr");
    ok(&[
        "train-eval", "--input", s(&features), "--out-dir", s(&tr), "--trees", "20", "--classifiers", "forest,tree,majority",
        "--no-timestamp",
    ]);
    let metrics = csv_rows(&tr.join("metrics.csv"));
    assert_eq!(metrics.len(), 3 * 5);
    let total: u64 = csv_rows(&tr.join("confusion.csv"))
        .iter()
        .filter(|r| r[0] == "random_forest")
        .map(|r| r[3].parse::<u64>().unwrap())
        .sum();
    assert_eq!(total as usize, set.len());
    let imp: f64 = csv_rows(&tr.join("importances.csv")).iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((imp - 1.0).abs() < 1e-9);

    let ex = root.join("ex");
    ok(&[
        "explain", "--model", s(&tr.join("model.txt")), "--input", s(&features), "--row", "3", "--out-dir", s(&ex),
        "--perturbations", "500", "--no-timestamp",
    ]);
    assert_eq!(csv_rows(&ex.join("explanation.csv")).len(), 10);
    let summary = csv_rows(&ex.join("explanation_summary.csv"));
    assert_eq!(summary[0][0], "3");
}

#[test]
fn saved_model_predicts_like_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    small_dataset(root, "60", "9");
    let features = root.join("ft/features.csv");
    let tr = root.join("tr");
    ok(&[
        "train-eval", "--input", s(&features), "--out-dir", s(&tr), "--trees", "15", "--classifiers", "majority", "--seed",
        "4", "--no-timestamp",
    ]);
    let saved = parse_forest(&fs::read_to_string(tr.join("model.txt")).unwrap()).unwrap();
    let set = read_features_csv(&features).unwrap();
    let params = saved.params.clone();
    let fresh = caponef::classify::train_forest(&set, &params, 4).unwrap();
    assert_eq!(saved, fresh);

    let mut rng = rng_from_seed(1);
    let lo: Vec<f64> = (0..10).map(|j| set.column(j).iter().copied().fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..10).map(|j| set.column(j).iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    for _ in 0..1000 {
        let x: Vec<f64> = (0..10).map(|j| rng.gen_range(lo[j]..=hi[j])).collect();
        assert_eq!(saved.predict_proba(&x), fresh.predict_proba(&x));
        assert_eq!(saved.predict(&x), fresh.predict(&x));
    }
}

#[test]
fn feature_mask_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    small_dataset(root, "40", "3");
    let features = root.join("ft/features.csv");
    let tr = root.join("tr");
    ok(&[
        "train-eval", "--input", s(&features), "--out-dir", s(&tr), "--features", "2,8,9", "--trees", "10", "--no-timestamp",
    ]);
    let model = parse_forest(&fs::read_to_string(tr.join("model.txt")).unwrap()).unwrap();
    assert_eq!(model.feature_names, vec!["P2", "P8", "P9"]);
    let ex = root.join("ex");
    ok(&[
        "explain", "--model", s(&tr.join("model.txt")), "--input", s(&features), "--row", "0", "--out-dir", s(&ex),
        "--perturbations", "200", "--no-timestamp",
    ]);
    assert_eq!(csv_rows(&ex.join("explanation.csv")).len(), 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<Vec<(String, Vec<u8>)>> = ["a", "b"]
        .iter()
        .map(|tag| {
            let root = dir.path().join(tag);
            small_dataset(&root, "50", "11");
            let features = root.join("ft/features.csv");
            ok(&["stats", "--input", s(&features), "--out-dir", s(&root.join("st")), "--no-timestamp"]);
            ok(&[
                "train-eval", "--input", s(&features), "--out-dir", s(&root.join("tr")), "--trees", "10", "--no-timestamp",
            ]);
            let mut files = Vec::new();
            for sub in ["ds", "ft", "st", "tr"] {
                let mut names: Vec<_> = fs::read_dir(root.join(sub)).unwrap().map(|e| e.unwrap().path()).collect();
                names.sort();
                for p in names {
                    files.push((format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()), fs::read(&p).unwrap()));
                }
            }
            files
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let code = |args: &[&str]| caponef(args).status.code().unwrap();

    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 4);
    assert_eq!(code(&["gen-dataset", "--devices", "1", "--out-dir", s(root)]), 4);
    assert_eq!(code(&["stats", "--input", s(&root.join("missing.csv")), "--out-dir", s(root)]), 2);

    let empty = root.join("empty.csv");
    fs::write(&empty, "label,P1,P2,P3,P4,P5,P6,P7,P8,P9,P10\n").unwrap();
    assert_eq!(code(&["train-eval", "--input", s(&empty), "--out-dir", s(root)]), 3);

    // an unimpaired repetition stream has zero error in every frame
    let etalon = caponef::signal::transnoise_etalon(0, 256).unwrap();
    let mut stream = vec![num_complex::Complex64::new(0.0, 0.0); 10];
    for _ in 0..4 {
        stream.extend_from_slice(etalon.samples());
    }
    fs::write(root.join("etalon.iq"), caponef::signal::iq::encode_iq(etalon.samples())).unwrap();
    fs::write(root.join("clean.iq"), caponef::signal::iq::encode_iq(&stream)).unwrap();
    let out = caponef(&[
        "extract", "--input", s(&root.join("clean.iq")), "--label", "0", "--frame-len", "256", "--out-dir", s(&root.join("x")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("4 frames, 4 skipped"));

    assert_eq!(
        code(&["extract", "--input", s(&root.join("clean.iq")), "--out-dir", s(&root.join("x")), "--frame-len", "256"]),
        4
    );
}
