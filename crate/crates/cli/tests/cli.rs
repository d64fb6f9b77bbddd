use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use modlab_core::charfn::Counterexample;
use modlab_core::geodesic::{enumerate_classes, norm_of_trace, phi1, sarnak_trace_in, selberg_check};
use modlab_core::numeric::fmt_g17;
use modlab_core::specialfn::wieand_limit;
use modlab_core::vardi::{vardi_law_check, vardi_phi};

fn modlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modlab")).args(args).output().expect("spawn modlab")
}

fn stdout(args: &[&str]) -> String {
    let out = modlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn smallest_geodesic_row() {
    let csv = stdout(&["geodesics", "--x", "7"]);
    let expected = format!(
        "trace,norm,length,psi,word\n3,{},1.9248473002384139,0,RL\n",
        fmt_g17(norm_of_trace(3).unwrap())
    );
    assert_eq!(csv, expected);
    assert_eq!(stdout(&["geodesics", "--x", "6"]), "trace,norm,length,psi,word\n");
}

#[test]
fn figure_row_count() {
    let csv = stdout(&["dedekind-figure", "--t", "1.5707963267948966", "--n-max", "5000", "--stride", "10"]);
    let r = rows(&csv);
    assert_eq!(csv.lines().next(), Some("t,N,value"));
    assert_eq!(r.len(), 500);
    assert_eq!(r[0][1], "3");
}

#[test]
fn output_file_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("law.csv");
    let p = path.to_str().unwrap();
    let out = modlab(&["vardi-law", "--n", "3,50", "--output", p, "--seed", "4"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let meta = std::fs::read_to_string(Path::new(&format!("{p}.meta"))).unwrap();
    for key in ["subcommand=vardi-law", "param.n=3,50", "param.seed=4", "param.chunks=1", "version=", "wall_clock_seconds="] {
        assert!(meta.lines().any(|l| l.starts_with(key)), "missing {key} in\n{meta}");
    }
    assert!(meta.lines().all(|l| l.contains('=')));
}

#[test]
fn usage_errors_exit_2() {
    for args in [vec!["no-such-command"], vec!["geodesics", "--x", "7", "--bogus"], vec!["geodesics"], vec!["selberg", "--x", "abc"], vec!["vardi-phi", "--t", "1", "--chunks", "0"]] {
        assert_eq!(modlab(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn module_errors_exit_1_with_message() {
    let cases: [(&[&str], &str); 5] = [
        (&["vardi-phi", "--t", "12.6", "--samples", "10"], "pole"),
        (&["sarnak", "--t", "0.5", "--x", "100"], "Sarnak window"),
        (&["wieand-limit", "--t", "4", "--gamma", "0.2"], "restricted window"),
        (&["invert-limit", "--k", "1", "--c", "-1"], "divergent"),
        (&["density-check", "--poly", "2,1"], "invalid input"),
    ];
    for (args, needle) in cases {
        let out = modlab(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{args:?}: {err}");
    }
}

#[test]
fn help_documents_windows() {
    let help = |cmd: &str| stdout(&[cmd, "--help"]);
    assert!(help("wieand-limit").contains("|t| < pi"));
    assert!(help("sarnak").contains("|t| <= pi/12"));
    assert!(help("vardi-phi").contains("|t| < 4 pi"));
    assert!(help("dedekind-figure").contains("4 pi/3"));
}

#[test]
fn negative_parameters_parse() {
    let csv = stdout(&["wieand-limit", "--t", "-1,1", "--gamma", "0.125"]);
    let r = rows(&csv);
    assert_eq!(r[0][2], r[1][2]);
}

#[test]
fn rows_match_direct_module_calls() {
    let law = rows(&stdout(&["vardi-law", "--n", "3,200"]));
    assert_eq!(law[1], vec!["200".to_string(), fmt_g17(vardi_law_check(200).unwrap())]);

    let phi = rows(&stdout(&["vardi-phi", "--t", "1.5", "--samples", "4000", "--seed", "3", "--chunks", "5"]));
    let direct = vardi_phi(1.5, 4000, 3, 5).unwrap();
    assert_eq!(phi[0][1], fmt_g17(direct.value));
    assert_eq!(phi[0][2], fmt_g17(direct.std_error));

    let t = PI / 12.0;
    let sarnak = rows(&stdout(&["sarnak", "--t", &t.to_string(), "--x", "5000"]));
    let ens = enumerate_classes(5000.0).unwrap();
    assert_eq!(sarnak[0][2], fmt_g17(sarnak_trace_in(&ens, t).unwrap().value));
    assert_eq!(sarnak[0][3], fmt_g17(phi1(t).unwrap()));

    let selberg = rows(&stdout(&["selberg", "--x", "1000"]));
    let (ratio, count) = selberg_check(1000.0).unwrap();
    assert_eq!(selberg[0][1..], [fmt_g17(ratio), count.to_string()]);

    let wieand = rows(&stdout(&["wieand-limit", "--t", "0.5", "--gamma", "0.3"]));
    assert_eq!(wieand[0][2], fmt_g17(wieand_limit(0.5, 0.3).unwrap()));

    let ce = rows(&stdout(&["counterexample", "--lambda", "0.75"]));
    assert_eq!(ce[0][1], fmt_g17(Counterexample::A.fourier_with_radius(0.75, 40_000.0)));
    assert_eq!(ce[0][4], "0.5");
}

#[test]
fn exploratory_sarnak_leaves_phi1_blank() {
    let csv = stdout(&["sarnak", "--t", "0.5", "--x", "1000", "--exploratory"]);
    assert!(rows(&csv)[0][3].is_empty());
}

#[test]
fn iid_sweep_adds_n_column() {
    let one = stdout(&["iid-modgauss", "--n", "1000", "--points", "3"]);
    assert_eq!(one.lines().next(), Some("lambda,re,im,label"));
    let sweep = stdout(&["iid-modgauss", "--n", "1000,100000", "--points", "3"]);
    assert_eq!(sweep.lines().next(), Some("lambda,re,im,label,n"));
    assert_eq!(rows(&sweep).len(), 9);
    assert!(sweep.lines().last().unwrap().ends_with("cum1_limit,inf"));
    let atoms = stdout(&["iid-modgauss", "--k", "2", "--atoms", "2:0.2,-0.5:0.8", "--n", "100", "--points", "3"]);
    assert_eq!(rows(&atoms).len(), 6);
}
