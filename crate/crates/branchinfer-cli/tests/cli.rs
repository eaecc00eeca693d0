//! End-to-end runs of the `branchinfer` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use branchinfer::ann::{save_weights, NeuralNet};
use branchinfer::chemgraph::random::spider;
use branchinfer::chemgraph::{canonical_form, format_graph, parse_graphs, validate, ChemicalAlphabet};
use branchinfer::descriptors::{descriptor_names, feature_vector};
use branchinfer::milp::{build_model, encode_full, DescriptorBounds, TargetSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_branchinfer"));
    c.env_remove("SOLVER_CMD")
        .env_remove("BRANCHINFER_SEED")
        .env_remove("BRANCHINFER_THREADS");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn features_of_propane_has_n_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "features",
            "--k",
            "2",
            fixture("propane.graphs").to_str().unwrap(),
            "out.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{o:?}");
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("n,"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("3,"));
    assert!(lines.next().is_none());
}

#[test]
fn stats_filter_reports_removals() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "stats",
            "--filter",
            "--k",
            "2",
            fixture("small.graphs").to_str().unwrap(),
            "--csv",
            "s.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("graphs: 2"));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("record 2 removed: cyclic"));
    assert!(dir.path().join("s.csv").exists());
    // without the filter, the cyclic graph is skipped by the statistics
    let o = run(&["stats", fixture("small.graphs").to_str().unwrap()], dir.path());
    assert!(stdout(&o).contains("graphs: 3 (non-trees skipped: 1)"));
}

#[test]
fn usage_and_file_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 1);
    let o = run(&["stats", "missing.graphs"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.graphs"));
    assert_eq!(code(&run(&["--help"], dir.path())), 0);
}

#[test]
fn vector_then_enumerate_recovers_the_source() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["vector", fixture("small.graphs").to_str().unwrap(), "x.vec"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let o = run(
        &["enumerate", "--bl", "2", "x.vec", "--out", "g.txt", "--exhaustive"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{o:?}");
    let summary = stdout(&o);
    assert!(summary.starts_with("#FP="), "{summary}");
    assert!(summary.contains("complete=true"));
    let al = ChemicalAlphabet::cno();
    let src = parse_graphs(&std::fs::read_to_string(fixture("small.graphs")).unwrap(), &al).unwrap();
    let out = parse_graphs(&std::fs::read_to_string(dir.path().join("g.txt")).unwrap(), &al).unwrap();
    assert!(out.iter().any(|g| canonical_form(g) == canonical_form(&src[0])));
    // the same target cannot have three leaf branches
    assert_eq!(code(&run(&["enumerate", "--bl", "3", "x.vec"], dir.path())), 2);
}

#[test]
fn train_writes_weights_and_fold_scores() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("a,b,y\n");
    for i in 0..40 {
        let (a, b) = (i as f64 / 10.0, (i % 7) as f64);
        csv.push_str(&format!("{a},{b},{}\n", 2.0 * a - b + 1.0));
    }
    std::fs::write(dir.path().join("d.csv"), csv).unwrap();
    let args = [
        "train",
        "d.csv",
        "--weights",
        "w.txt",
        "--folds",
        "4",
        "--epochs",
        "200",
        "--hidden",
        "4",
    ];
    let o1 = run(&args, dir.path());
    assert_eq!(code(&o1), 0, "{o1:?}");
    let out = stdout(&o1);
    assert_eq!(out.lines().filter(|l| l.starts_with("fold ")).count(), 4);
    let w1 = std::fs::read(dir.path().join("w.txt")).unwrap();
    let o2 = run(&args, dir.path());
    assert_eq!(stdout(&o2), out);
    assert_eq!(std::fs::read(dir.path().join("w.txt")).unwrap(), w1);
    let o3 = run(&[&args[..], &["--seed", "5"]].concat(), dir.path());
    assert_eq!(code(&o3), 0);
}

/// A spec, network and exact solution for a known in-class graph.
fn solved_instance(dir: &Path) -> (Vec<String>, String) {
    let al = ChemicalAlphabet::cno();
    let g = spider(&[3, 4, 3]);
    let fv = feature_vector(&g, 2, &al).unwrap();
    let kk = descriptor_names(&al).len();
    let mut net = NeuralNet::random(&[kk, 4, 1], &mut ChaCha8Rng::seed_from_u64(9));
    net.scaling = (0..kk).map(|i| (0.0, 1.0 + i as f64)).collect();
    std::fs::write(dir.join("w.txt"), save_weights(&net)).unwrap();
    let y = net.forward(&fv.to_f64()).unwrap();
    let mut spec = TargetSpec::new(al.clone(), g.n(), 3, fv.dia, 2, fv.bh, fv.bl);
    spec.y_star = y;
    let inv = build_model(&spec, &DescriptorBounds::loose(g.n(), &al), &net).unwrap();
    let asg = encode_full(&g, &spec, &inv.model, &inv.sg, &inv.relu, &net).unwrap();
    std::fs::write(dir.join("exact.sol"), asg.to_text()).unwrap();
    let args = [
        "infer",
        "--weights",
        "w.txt",
        "--n",
        &g.n().to_string(),
        "--dmax",
        "3",
        "--dia",
        &fv.dia.to_string(),
        "--k",
        "2",
        "--bh",
        &fv.bh.to_string(),
        "--bl",
        &fv.bl.to_string(),
        "--y",
        &y.to_string(),
        "--eps",
        "0.02",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    (args, format_graph(&g, &al))
}

#[test]
fn infer_without_solver_emits_lp_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (args, _) = solved_instance(dir.path());
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = run(&args, dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(stdout(&o).contains("variables"));
    assert!(std::fs::read_to_string(dir.path().join("model.lp"))
        .unwrap()
        .starts_with("Minimize"));
    // --solve needs a command
    let o = run(&[&args[..], &["--solve"]].concat(), dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn infer_solve_decodes_validates_and_feeds_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let (args, src) = solved_instance(dir.path());
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = bin()
        .args(&args)
        .arg("--solve")
        .env("SOLVER_CMD", "cp exact.sol {sol}")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("decoded graph"));
    let al = ChemicalAlphabet::cno();
    let dec = parse_graphs(
        &std::fs::read_to_string(dir.path().join("inferred.graph")).unwrap(),
        &al,
    )
    .unwrap();
    let want = parse_graphs(&src, &al).unwrap();
    assert!(validate(&dec[0], &al).violations.is_empty());
    assert_eq!(canonical_form(&dec[0]), canonical_form(&want[0]));
    let o = run(&["enumerate", "inferred.vec", "--out", "all.txt"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");

    // the check subcommand agrees: clean solution exits 0
    let o = run(&["check", "model.lp", "exact.sol"], dir.path());
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(stdout(&o).contains(", 0 violations"));
    // flipping one value makes it report violations with exit 2
    let sol = std::fs::read_to_string(dir.path().join("exact.sol")).unwrap();
    let mut lines: Vec<String> = sol.lines().map(String::from).collect();
    let i = lines.iter().position(|l| l.starts_with("u_")).unwrap();
    let (name, val) = lines[i].split_once(' ').unwrap();
    let flipped = if val.trim() == "0" { "1" } else { "0" };
    lines[i] = format!("{name} {flipped}");
    std::fs::write(dir.path().join("bad.sol"), lines.join("\n")).unwrap();
    let o = run(&["check", "model.lp", "bad.sol"], dir.path());
    assert_eq!(code(&o), 2, "{o:?}");

    // a solver reporting infeasibility exits 2; config file supplies the command
    std::fs::write(dir.path().join("cfg.txt"), "solver_cmd = echo infeasible > {sol}\n").unwrap();
    let o = run(&[&args[..], &["--solve", "--config", "cfg.txt"]].concat(), dir.path());
    assert_eq!(code(&o), 2, "{o:?}");
    // flags beat the environment
    let o = bin()
        .args(&args)
        .args(["--solve", "--solver-cmd", "cp exact.sol {sol}"])
        .env("SOLVER_CMD", "false")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{o:?}");
}
