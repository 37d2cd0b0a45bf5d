use std::process::{Command, Output};

fn hmscheme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmscheme"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn header(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or_default().to_string()
}

#[test]
fn sweep_mu_writes_expected_columns() {
    let out = hmscheme(&["sweep-mu", "--mu-points", "5"]);
    assert!(out.status.success());
    assert_eq!(header(&out), "mu,S11,S12,Re_xi1,Re_xi2,Im_xi1,exp_neg_mu,implicit_euler");
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 6);
}

#[test]
fn subcommand_headers() {
    let cases: &[(&[&str], &str)] = &[
        (&["hm-error"], "t,measured_error,bound,eps_y2"),
        (&["converge", "--mode", "local"], "tau,error,observed_order"),
        (&["converge"], "tau,error,observed_order"),
        (&["powers", "--nmax", "3"], "tau,n,t,norm_Sn"),
        (&["block-powers", "--nmax", "2", "--mu-points", "3"], "mu,p,norm_Sjp"),
        (&["policy-bounds"], "policy,max_tau,note"),
        (
            &["stability-report"],
            "lambda,mu,xi1_re,xi1_im,xi2_re,xi2_im,inverse_separation,indicator",
        ),
    ];
    for (args, expected) in cases {
        let out = hmscheme(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(header(&out), *expected, "{args:?}");
    }
}

#[test]
fn local_convergence_rows_are_parseable() {
    let out = hmscheme(&["converge", "--mode", "local"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0][2].is_empty());
    for row in &rows {
        let tau: f64 = row[0].parse().unwrap();
        let err: f64 = row[1].parse().unwrap();
        assert!(tau > 0.0 && err > 0.0);
    }
    let order: f64 = rows[3][2].parse().unwrap();
    assert!((3.0..5.0).contains(&order));
}

#[test]
fn writes_files_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("powers.csv");
    let out = hmscheme(&["powers", "--nmax", "4", "--out", path.to_str().unwrap(), "--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let summary = std::fs::read_to_string(dir.path().join("powers_summary.csv")).unwrap();
    assert!(summary.starts_with("tau,max_norm,indicator\n"));
    assert_eq!(summary.lines().count(), 5);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 4);
    let svg = std::fs::read_to_string(dir.path().join("powers.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn heat1d_writes_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("heat.csv");
    let out = hmscheme(&["heat1d", "--nx", "20", "--nmax", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["heat_powers.csv", "heat_powers_summary.csv", "heat_convergence.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn invalid_input_exits_with_2() {
    for args in [
        &["hm-error", "--eps", "-1"][..],
        &["powers", "--T", "1e-5"],
        &["sweep-mu", "--mu-points", "1"],
        &["converge", "--halvings", "2"],
        &["sweep-mu", "--svg"],
        &["powers", "--tau", "1e-15", "--T", "1"],
    ] {
        let out = hmscheme(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn numerical_failure_exits_with_3() {
    // lambda * eps > 1/4 has no real closed form
    let out = hmscheme(&["hm-error", "--lambda", "1e4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("D > 0"));
}
