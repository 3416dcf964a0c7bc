//! Runs the `nif` binary and checks outputs and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use nif::cnn::{load_checkpoint, Model};
use nif::eeg_io::{read_bundle, synth_recording, write_bundle, EventMarker, SynthConfig};
use nif::topomap::{read_lbl1, read_ten1, write_lbl1, TensorData};
use nif_cli::commands::{Prediction, TrainMetrics};

fn nif(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nif"))
        .args(args)
        .env_remove("NIF_WORKERS")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two small subjects with three classes.
fn synth(root: &Path, seed: &str) -> PathBuf {
    let out = root.join(format!("synth_{seed}"));
    let (code, text) = nif(&[
        "synth", "--subjects", "2", "--classes", "3", "--events-per-class", "10",
        "--seed", seed, "--channels", "16", "--out", s(&out),
    ]);
    assert_eq!(code, 0, "{text}");
    out
}

fn images(root: &Path, bundles: &[PathBuf], workers: &str, extra: &[&str]) -> (PathBuf, PathBuf) {
    let (data, labels) = (root.join(format!("x{workers}.ten")), root.join(format!("y{workers}.lbl")));
    let mut args = vec!["images", "--workers", workers, "--out", s(&data), "--labels", s(&labels)];
    for b in bundles {
        args.extend(["--bundle", s(b)]);
    }
    args.extend_from_slice(extra);
    let (code, text) = nif(&args);
    assert_eq!(code, 0, "{text}");
    (data, labels)
}

#[test]
fn synth_bundles_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "5");
    for sub in ["subject_01", "subject_02"] {
        let rec = read_bundle(a.join(sub)).unwrap();
        assert_eq!(rec.events.len(), 30);
        assert_eq!(rec.num_classes(), 3);
    }
    assert!(a.join("manifest.json").exists());

    let again = dir.path().join("again");
    fs::create_dir(&again).unwrap();
    let c = synth(&again, "5");
    for sub in ["subject_01", "subject_02"] {
        for f in ["header.json", "samples.f32"] {
            assert_eq!(fs::read(a.join(sub).join(f)).unwrap(), fs::read(c.join(sub).join(f)).unwrap());
        }
    }

    let (code, _) = nif(&["synth", "--classes", "1", "--out", s(&dir.path().join("one"))]);
    assert_eq!(code, 1);
    let (code, text) = nif(&["synth", "--classes", "3", "--out", s(&a)]);
    assert_eq!(code, 1, "{text}");
    let (code, text) = nif(&["synth", "--classes", "3", "--events-per-class", "3", "--out", s(&a), "--force"]);
    assert_eq!(code, 0, "{text}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(nif(&[]).0, 1);
    assert_eq!(nif(&["frobnicate"]).0, 1);
    assert_eq!(nif(&["train", "--data", "x"]).0, 1);
    assert_eq!(nif(&["--help"]).0, 0);
    assert_eq!(nif(&["--version"]).0, 0);
}

#[test]
fn images_count_edges_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let root = synth(dir.path(), "7");
    // two extra events too close to each recording edge to epoch
    let mut bundles = Vec::new();
    for sub in ["subject_01", "subject_02"] {
        let mut rec = read_bundle(root.join(sub)).unwrap();
        rec.events.insert(0, EventMarker { sample_index: 5, label: 0 });
        rec.events.push(EventMarker { sample_index: rec.num_samples - 5, label: 1 });
        let out = dir.path().join(format!("edge_{sub}"));
        write_bundle(&rec, &out).unwrap();
        bundles.push(out);
    }
    let png = dir.path().join("png");
    let groups = dir.path().join("g.lbl");
    let (d1, l1) = images(dir.path(), &bundles, "1", &["--png-dir", s(&png), "--groups", s(&groups)]);
    let (d3, l3) = images(dir.path(), &bundles, "3", &[]);
    let t = read_ten1(&d1).unwrap();
    assert_eq!(t.dims, vec![60, 32, 32, 3]);
    assert_eq!(fs::read(&d1).unwrap(), fs::read(&d3).unwrap());
    assert_eq!(fs::read(&l1).unwrap(), fs::read(&l3).unwrap());
    assert_eq!(fs::read_dir(&png).unwrap().count(), 60);
    // event 0 is the edge event, so the first image comes from event 1
    assert!(png.join("edge_subject_01_1.png").exists());
    assert!(!png.join("edge_subject_01_0.png").exists());
    let g = read_lbl1(&groups).unwrap();
    assert_eq!(g.iter().filter(|&&x| x == 1).count(), 30);

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("x1.ten.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["epochs_generated"], 60);
    assert_eq!(manifest["epochs_skipped"], 4);
    assert_eq!(manifest["workers"], 1);
}

#[test]
fn images_reject_low_sample_rate() {
    let dir = tempfile::tempdir().unwrap();
    let mut rec = synth_recording(&SynthConfig {
        num_classes: 2,
        events_per_class: 2,
        montage_size: 8,
        segment_seconds: 2.0,
        ..SynthConfig::default()
    })
    .unwrap();
    rec.sample_rate_hz = 64.0;
    let b = dir.path().join("slow");
    write_bundle(&rec, &b).unwrap();
    let (code, text) = nif(&[
        "images", "--bundle", s(&b), "--epoch-seconds", "2", "--out", s(&dir.path().join("x")),
        "--labels", s(&dir.path().join("y")),
    ]);
    assert_eq!(code, 2, "{text}");
    let (code, _) = nif(&[
        "images", "--bundle", s(&dir.path().join("missing")), "--out", s(&dir.path().join("x")),
        "--labels", s(&dir.path().join("y")),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn train_eval_predict() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let root = synth(dir.path(), "11");
    let bundles = [root.join("subject_01"), root.join("subject_02")];
    let (data, labels) = images(dir.path(), &bundles, "2", &[]);

    let (code, text) = nif(&[
        "train", "--data", s(&data), "--labels", s(&labels), "--epochs", "3", "--seed", "1",
        "--out", s(&p("m.ckpt")), "--metrics", s(&p("m.json")),
    ]);
    assert_eq!(code, 0, "{text}");
    let metrics: TrainMetrics = serde_json::from_slice(&fs::read(p("m.json")).unwrap()).unwrap();
    assert_eq!(metrics.history.len(), 3);
    assert_eq!(
        (metrics.train_indices.len(), metrics.val_indices.len(), metrics.test_indices.len()),
        (42, 9, 9)
    );
    assert!(metrics.test_accuracy().is_some());

    // zero epochs: the initial model and an empty history
    let (code, _) = nif(&[
        "train", "--data", s(&data), "--labels", s(&labels), "--epochs", "0", "--seed", "4",
        "--out", s(&p("init.ckpt")), "--metrics", s(&p("init.json")),
    ]);
    assert_eq!(code, 0);
    let init: TrainMetrics = serde_json::from_slice(&fs::read(p("init.json")).unwrap()).unwrap();
    assert!(init.history.is_empty() && init.best_epoch.is_none());
    let loaded: Model<f64> = load_checkpoint(p("init.ckpt")).unwrap();
    assert_eq!(loaded, Model::<f64>::new(init.model_config.clone(), 4).unwrap());

    for bad in ["0.7/0.7", "0.5/0.5/0.5", "x/y/z"] {
        let (code, _) = nif(&[
            "train", "--data", s(&data), "--labels", s(&labels), "--split", bad,
            "--out", s(&p("bad.ckpt")), "--metrics", s(&p("bad.json")),
        ]);
        assert_eq!(code, 1, "{bad}");
    }

    // group split holds one subject out of training, which needs three subjects
    let groups = p("g.lbl");
    write_lbl1(&groups, &vec![0; 60]).unwrap();
    let (code, _) = nif(&[
        "train", "--data", s(&data), "--labels", s(&labels), "--groups", s(&groups), "--epochs", "1",
        "--out", s(&p("g.ckpt")), "--metrics", s(&p("g.json")),
    ]);
    assert_eq!(code, 2);

    let (code, text) = nif(&[
        "eval", "--model", s(&p("m.ckpt")), "--data", s(&data), "--labels", s(&labels), "--out", s(&p("e.json")),
    ]);
    assert_eq!(code, 0, "{text}");
    let e: serde_json::Value = serde_json::from_slice(&fs::read(p("e.json")).unwrap()).unwrap();
    let total: u64 = e["confusion"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 60);

    // labels beyond the model's three classes
    write_lbl1(p("five.lbl"), &(0..60).map(|i| i % 5).collect::<Vec<u32>>()).unwrap();
    let (code, text) = nif(&[
        "eval", "--model", s(&p("m.ckpt")), "--data", s(&data), "--labels", s(&p("five.lbl")), "--out", s(&p("e5.json")),
    ]);
    assert_eq!(code, 2, "{text}");

    // empty data file
    fs::write(p("empty.ten"), TensorData::new(vec![0, 32, 32, 3], vec![]).unwrap().to_bytes()).unwrap();
    write_lbl1(p("empty.lbl"), &[]).unwrap();
    let (code, _) = nif(&[
        "eval", "--model", s(&p("m.ckpt")), "--data", s(&p("empty.ten")), "--labels", s(&p("empty.lbl")), "--out", s(&p("e0.json")),
    ]);
    assert_eq!(code, 2);
    let (code, _) = nif(&[
        "train", "--data", s(&p("empty.ten")), "--labels", s(&p("empty.lbl")),
        "--out", s(&p("e.ckpt")), "--metrics", s(&p("e0m.json")),
    ]);
    assert_eq!(code, 2);

    let (code, text) = nif(&["predict", "--model", s(&p("m.ckpt")), "--data", s(&data), "--out", s(&p("pred.jsonl"))]);
    assert_eq!(code, 0, "{text}");
    let text = fs::read_to_string(p("pred.jsonl")).unwrap();
    let preds: Vec<Prediction> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(preds.len(), 60);
    for (i, pr) in preds.iter().enumerate() {
        assert_eq!(pr.index, i);
        assert_eq!(pr.probs.len(), 3);
        assert!((pr.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(pr.argmax, nif::cnn::argmax(&pr.probs));
    }
    let (code, _) = nif(&["predict", "--model", s(&p("missing.ckpt")), "--data", s(&data), "--out", s(&p("p2"))]);
    assert_eq!(code, 3);
}
