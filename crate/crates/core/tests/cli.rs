use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wiou::benchmark::{default_scenes, generate_dataset, kitti_palette, DEFAULT_SEED};
use wiou::label::{decode_label_image, encode_label_image};
use wiou::metrics::{evaluate_pair, EvalConfig};
use wiou::LabelMap;

fn wiou(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wiou"))
        .args(args)
        .env_remove("WIOU_THREADS")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_map(dir: &Path, name: &str, map: &LabelMap) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, encode_label_image(map, &kitti_palette()).unwrap()).unwrap();
    path
}

fn scene_pair(dir: &Path) -> (PathBuf, PathBuf, LabelMap, LabelMap) {
    let pairs = generate_dataset(&default_scenes()[..1], 1, 3).unwrap();
    let p = &pairs[1];
    (
        write_map(dir, "gt.png", &p.gt),
        write_map(dir, "pred.png", &p.pred),
        p.gt.clone(),
        p.pred.clone(),
    )
}

/// All files under `dir` with their contents, sorted by relative path.
fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn eval_self_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, _, _, _) = scene_pair(dir.path());
    let o = wiou(&["eval", "--gt", s(&gt), "--pred", s(&gt)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "mIoU=1 mwIoU[a=1]=1 edgeF1=1\n");
}

#[test]
fn eval_json_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, pred, gt_map, pred_map) = scene_pair(dir.path());
    let out = dir.path().join("report.json");
    let o = wiou(&[
        "eval", "--gt", s(&gt), "--pred", s(&pred), "--alpha", "0.1", "--alpha", "10", "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    // the CLI decodes through the palette, which marks the ignore class
    let palette = kitti_palette();
    let gt_map = decode_label_image(&encode_label_image(&gt_map, &palette).unwrap(), &palette).unwrap();
    let pred_map =
        decode_label_image(&encode_label_image(&pred_map, &palette).unwrap(), &palette).unwrap();
    let report = evaluate_pair(&gt_map, &pred_map, &EvalConfig::with_alphas(&[0.1, 10.0])).unwrap();
    assert_eq!(fs::read_to_string(&out).unwrap(), report.to_json());
    assert_eq!(stdout(&o).trim_end(), report.summary_line());

    let csv = dir.path().join("report.csv");
    let o = wiou(&["eval", "--gt", s(&gt), "--pred", s(&pred), "--format", "csv", "--out", s(&csv)]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&csv).unwrap().starts_with("class,alpha,iou,wiou,"));
}

#[test]
fn eval_dimension_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_map(dir.path(), "a.png", &LabelMap::filled(4, 3, 9, 1).unwrap());
    let b = write_map(dir.path(), "b.png", &LabelMap::filled(5, 3, 9, 1).unwrap());
    let o = wiou(&["eval", "--gt", s(&a), "--pred", s(&b)]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("4x3") && msg.contains("5x3"), "{msg}");
    assert_eq!(msg.lines().count(), 1);
}

#[test]
fn eval_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, _, _, _) = scene_pair(dir.path());
    let missing = dir.path().join("missing.png");
    let o = wiou(&["eval", "--gt", s(&gt), "--pred", s(&missing)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.png"));

    let junk = dir.path().join("junk.png");
    fs::write(&junk, b"not a png").unwrap();
    let o = wiou(&["eval", "--gt", s(&gt), "--pred", s(&junk)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("junk.png"));

    // a palette that lacks the scene colors
    let palette = dir.path().join("palette.json");
    fs::write(&palette, r#"[{"id": 0, "rgb": [1, 2, 3]}]"#).unwrap();
    let o = wiou(&["eval", "--gt", s(&gt), "--pred", s(&gt), "--palette", s(&palette)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gt.png"));

    for bad in [["--alpha", "0"], ["--theta", "-1"], ["--norm", "l3"], ["--connectivity", "6"]] {
        let mut args = vec!["eval", "--gt", s(&gt), "--pred", s(&gt)];
        args.extend(bad);
        assert_eq!(wiou(&args).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn weights_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, _, gt_map, _) = scene_pair(dir.path());
    let out = dir.path().join("w");
    let mut args = vec!["weights", "--gt", s(&gt), "--out", s(&out)];
    for a in ["0.01", "0.1", "1", "10", "100"] {
        args.extend(["--alpha", a]);
    }
    let o = wiou(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "weights_a0.01.png",
            "weights_a0.1.png",
            "weights_a1.png",
            "weights_a10.png",
            "weights_a100.png"
        ]
    );
    let decoder = png::Decoder::new(std::io::Cursor::new(fs::read(out.join("weights_a0.01.png")).unwrap()));
    let mut reader = decoder.read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    assert_eq!((info.width as usize, info.height as usize), (gt_map.width(), gt_map.height()));
    assert!(buf[..info.buffer_size()].iter().all(|&v| v >= 252));

    let o = wiou(&["weights", "--gt", s(&gt), "--out", s(&out), "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn gen_dataset_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = wiou(&["gen-dataset", "--out", s(&out), "--seed", seed]);
        assert!(o.status.success(), "{}", stderr(&o));
        tree(&out)
    };
    let a = run("a", "7");
    let b = run("b", "7");
    let c = run("c", "8");
    assert_eq!(a, b);
    let pngs = |t: &[(PathBuf, Vec<u8>)], name: &str| -> Vec<Vec<u8>> {
        t.iter()
            .filter(|(p, _)| p.file_name().unwrap() == name)
            .map(|(_, d)| d.clone())
            .collect()
    };
    assert_eq!(pngs(&a, "gt.png").len(), 33);
    assert_eq!(pngs(&a, "pred.png").len(), 33);
    assert_eq!(pngs(&a, "gt.png"), pngs(&c, "gt.png"));
    let differing = pngs(&a, "pred.png")
        .iter()
        .zip(pngs(&c, "pred.png"))
        .filter(|(x, y)| *x != y)
        .count();
    assert!(differing > 0);
}

#[test]
fn benchmark_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let out1 = dir.path().join("out1");
    let out2 = dir.path().join("out2");
    let seed = DEFAULT_SEED.to_string();
    let o = wiou(&["benchmark", "--generate", "--dataset", s(&data), "--seed", &seed, "--out", s(&out1)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = wiou(&["benchmark", "--dataset", s(&data), "--out", s(&out2)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t1 = tree(&out1);
    assert_eq!(t1, tree(&out2));
    let names: Vec<_> = t1.iter().map(|(p, _)| p.to_str().unwrap().to_string()).collect();
    assert_eq!(names, ["comparison.json", "per_image.csv", "triplet.csv"]);

    let json: serde_json::Value = serde_json::from_slice(&t1[0].1).unwrap();
    assert_eq!(json["labels"].as_array().unwrap().len(), 7);
    for key in ["correlations", "mean_abs_diff"] {
        let m = json[key].as_array().unwrap();
        assert_eq!(m.len(), 7);
        assert!(m.iter().all(|row| row.as_array().unwrap().len() == 7));
    }
    assert_eq!(String::from_utf8_lossy(&t1[1].1).lines().count(), 34);
    assert_eq!(String::from_utf8_lossy(&t1[2].1).lines().count(), 10);
}

#[test]
fn benchmark_bad_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = wiou(&["benchmark", "--dataset", s(&dir.path().join("none")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    fs::write(dir.path().join("manifest.json"), "{").unwrap();
    let o = wiou(&["benchmark", "--dataset", s(dir.path()), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("manifest.json"));
}

#[test]
fn thread_setting() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, pred, _, _) = scene_pair(dir.path());
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_wiou"))
            .args(["eval", "--gt", s(&gt), "--pred", s(&pred)])
            .env("WIOU_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(stdout(&run("1")), stdout(&run("0")));
    assert_eq!(run("lots").status.code(), Some(2));
}
