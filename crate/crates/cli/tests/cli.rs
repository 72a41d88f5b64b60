use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overlap-kernels")).args(args).env("OVERLAP_KERNELS_WORKERS", "2").output().unwrap()
}

fn data_rows(o: &Output) -> Vec<Vec<String>> {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn kernel_eval_one_row() {
    let o = run(&["kernel-eval", "--N", "4", "--n", "12", "--L", "2", "--z", "0.3,0.2", "--w", "-0.4,0.5", "--lam", "0.6,-0.1", "--method", "direct"]);
    let rows = data_rows(&o);
    assert_eq!(rows[0].join(","), "N,n,L,re_z,im_z,re_w,im_w,re_lam,im_lam,method,re_K,im_K,regularized");
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][9], "direct");
    assert_eq!(rows[1][12], "false");
    let head = String::from_utf8(o.stdout).unwrap();
    assert!(head.starts_with("# version="));
    assert!(head.contains("# method=direct\n") && head.contains("# seed=0\n") && head.contains("# workers=2\n"));
}

#[test]
fn converge_scan_bulk() {
    let rows = data_rows(&run(&["converge-scan", "--regime", "bulk", "--a", "1", "--b", "1", "--p", "1", "--ns", "25,50,100"]));
    assert_eq!(rows.len(), 4);
    let errs: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[1]);
}

#[test]
fn sample_single_eigenvalue() {
    let rows = data_rows(&run(&["sample", "--N", "1", "--n", "4", "--L", "1", "--samples", "25", "--seed", "3"]));
    assert_eq!(rows[0].join(","), "sample_id,re_lambda,im_lambda,O_diag");
    assert_eq!(rows.len(), 26);
    for r in &rows[1..] {
        assert!((r[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sample_droplet() {
    let rows = data_rows(&run(&["sample", "--regime", "bulk", "--N", "40", "--samples", "30", "--seed", "4"]));
    let (r1, r2) = (0.5f64.sqrt(), 2f64.sqrt());
    let inside = rows[1..]
        .iter()
        .filter(|r| {
            let m = r[1].parse::<f64>().unwrap().hypot(r[2].parse().unwrap());
            m >= r1 - 0.2 && m <= r2 + 0.2
        })
        .count();
    assert!(inside as f64 >= 0.99 * (rows.len() - 1) as f64);
}

#[test]
fn worker_count_does_not_change_data() {
    let a = run(&["sample", "--N", "5", "--n", "10", "--samples", "20", "--workers", "1"]);
    let b = run(&["sample", "--N", "5", "--n", "10", "--samples", "20", "--workers", "3"]);
    assert_eq!(data_rows(&a), data_rows(&b));
}

#[test]
fn config_file_with_override() {
    let path = std::env::temp_dir().join(format!("overlap-cli-{}.cfg", std::process::id()));
    std::fs::write(&path, "# test\nN=3\nn=8\nL=1\nsamples=9\nseed=5\n").unwrap();
    let rows = data_rows(&run(&["sample", "--config", path.to_str().unwrap(), "--samples", "2"]));
    std::fs::remove_file(&path).unwrap();
    assert_eq!(rows.len(), 1 + 2 * 3);
}

#[test]
fn validate_passes() {
    let rows = data_rows(&run(&["validate", "--samples", "500"]));
    assert_eq!(rows[0].join(","), "invariant,measured,tolerance,status");
    assert!(rows.len() > 5);
    assert!(rows[1..].iter().all(|r| r[3] == "pass"), "{rows:?}");
}

#[test]
fn errors_are_json_records() {
    for (args, field) in [
        (vec!["kernel-eval", "--N", "4", "--n", "12"], "z"),
        (vec!["sample", "--N", "3", "--n", "6", "--set", "bogus=1"], "bogus"),
        (vec!["frobnicate"], "command"),
        (vec!["overlap-mc", "--N", "3", "--n", "6", "--statistic", "nope"], "statistic"),
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let line = String::from_utf8(o.stderr).unwrap();
        let v: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
        assert_eq!(v["error"]["field"], field);
    }
    let o = run(&["sample", "--N", "3", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(String::from_utf8(o.stderr).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(v["error"]["kind"], "usage");
}
