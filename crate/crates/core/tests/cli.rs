use werner_distill::bounds::{parse_figure1_csv, write_figure1_csv, Figure1, SampleCount};
use werner_distill::cli::run;
use werner_distill::format::to_json_string;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("werner-distill").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn exact_reports_noiseless_statistics() {
    let (code, out, _) = cli(&["exact", "--w", "0.4", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["p00"], 0.34);
    assert_eq!(v["success"], 0.68);
    assert_eq!(v["F"], 0.7);
}

#[test]
fn figure1_default_curve_shapes() {
    let (code, out, _) = cli(&["figure1"]);
    assert_eq!(code, 0);
    let rows = parse_figure1_csv(&out).unwrap();
    assert_eq!(rows.len(), 96);
    let inflation = (0.4f64).exp();
    let mut prev = 0;
    for r in &rows {
        assert_eq!(r.n_tomo, SampleCount::Samples(4239));
        if let SampleCount::Samples(d) = r.n_distill {
            assert!(d > prev);
            prev = d;
            if r.w < 0.45 - 1e-9 {
                assert!(d < 4239, "w={}", r.w);
            } else if r.w > 0.45 + 1e-9 {
                assert!(d > 4239, "w={}", r.w);
            }
            let noisy = r.n_noisy.samples().unwrap() as f64;
            assert!((noisy / d as f64 - inflation).abs() <= inflation / d as f64 + 1.0 / d as f64, "w={}", r.w);
        }
    }
    assert!(rows.last().unwrap().n_distill.is_unreachable());
}

#[test]
fn figure1_outputs_reserialize_identically() {
    let (_, csv, _) = cli(&["figure1", "--w-step", "0.05"]);
    assert_eq!(write_figure1_csv(&parse_figure1_csv(&csv).unwrap()), csv);

    let (_, json, _) = cli(&["figure1", "--w-step", "0.05", "--format", "json"]);
    let fig: Figure1 = serde_json::from_str(&json).unwrap();
    assert_eq!(to_json_string(&fig).unwrap(), json);
}

#[test]
fn run_output_is_identical_across_reruns_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in ["1", "2", "7", "1"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.json"));
        let p = path.to_str().unwrap();
        let (code, _, _) = cli(&[
            "run", "--w", "0.35", "--N", "70000", "--eps-w", "0.05", "--x", "0.1", "--seed", "12", "--threads", threads,
            "--out", p,
        ]);
        assert_eq!(code, 0);
        files.push(std::fs::read(&path).unwrap());
    }
    assert!(files.windows(2).all(|f| f[0] == f[1]));

    let reps = |threads: &str| {
        cli(&["run", "--w", "0.3", "--N", "500", "--eps-w", "0.1", "--reps", "40", "--threads", threads, "--format", "csv"])
    };
    let (a, b) = (reps("1"), reps("5"));
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
    assert!(a.1.starts_with("rep,seed,w_hat,fail\n"));
    assert!(a.2.contains("within_bound="));
}

#[test]
fn idle_schedule_reports_realized_attenuation() {
    let (code, out, _) = cli(&["run", "--w", "0.2", "--N", "20000", "--eps-w", "0.05", "--t", "0.2", "--T", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let s = v["realized_S"].as_f64().unwrap();
    assert!((s - (-0.2f64).exp()).abs() < 1e-11);
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["exact"]).0, 2);
    assert_eq!(cli(&["run", "--w", "0.2", "--N", "10", "--eps-w", "0.1", "--x", "0.1", "--t", "1", "--T", "1"]).0, 2);

    let (code, _, err) = cli(&["exact", "--w", "1.5"]);
    assert_eq!(code, 3);
    assert!(err.contains("--w"));
    assert_eq!(cli(&["bounds", "--delta", "1.5"]).0, 3);
    assert_eq!(cli(&["run", "--w", "0.2", "--N", "0", "--eps-w", "0.1"]).0, 3);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("out.csv");
    let (code, _, err) = cli(&["figure1", "--out", bad.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("out.csv"));

    let (code, out, _) = cli(&["validate", "--perturb", "crossover"]);
    assert_eq!(code, 5);
    assert_eq!(out.lines().filter(|l| l.starts_with("FAIL")).count(), 1);
    assert_eq!(cli(&["validate"]).0, 0);
}

#[test]
fn bounds_table_lists_reference_counts() {
    let (code, out, _) = cli(&["bounds", "--w", "0"]);
    assert_eq!(code, 0);
    let row = out.lines().nth(2).unwrap();
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(&cols[..3], &["0", "1175", "4239"]);
}
