use std::path::Path;
use std::process::{Command, Output};

fn dfsdca(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfsdca"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const RIDGE: &str = "\
data_source = synthetic_ridge
n = 100
d = 5
noise = 0.1
data_seed = 1
loss = quadratic
lambda = 0.1
eta = auto
K = 2
H = 1
T = 100
S = 20
straggler_p = 0.2
straggler_m_min = 0
straggler_m_max = 10
base_round_time = 1
network_latency = 0
engine = deterministic
mode = async
seed = 3
record_every = 0
output_path = run.csv
";

#[test]
fn run_writes_csv_and_report_summarizes_it() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ridge.cfg"), RIDGE).unwrap();
    let o = dfsdca(&["run", "ridge.cfg", "--trace", "trace.csv"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(csv.starts_with("epoch,server_iter,virtual_time,epochs_equiv,duality_gap,"));
    assert_eq!(csv.lines().count(), 1 + 21);
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("event_type,"));

    let r = dfsdca(&["report", "run.csv"], dir.path());
    assert!(r.status.success());
    let text = stdout(&r);
    assert!(text.contains("final gap: "), "{text}");
    assert!(text.contains("epochs to gap 1e-4: "), "{text}");
    assert!(text.contains("max delay: "), "{text}");
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ridge.cfg"), RIDGE).unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["run", "ridge.cfg"];
        args.extend_from_slice(extra);
        assert!(dfsdca(&args, dir.path()).status.success());
    };
    run(&["--output", "a.csv"]);
    run(&["--output", "b.csv"]);
    run(&["--output", "c.csv", "--seed", "99"]);
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_ne!(read("a.csv"), read("c.csv"));
    run(&["--output", "t.csv", "--engine", "threaded"]);
    assert!(read("t.csv").starts_with(b"epoch,"));
}

#[test]
fn gen_data_and_solve_ref() {
    let dir = tempfile::tempdir().unwrap();
    let o = dfsdca(&["gen-data", "ridge", "--n", "30", "--d", "4", "--seed", "2", "--output", "r.svm"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(dir.path().join("r.svm")).unwrap();
    assert_eq!(text.lines().count(), 30);
    let o = dfsdca(&["gen-data", "pca", "--n", "20", "--d", "3", "--output", "p.svm"], dir.path());
    assert!(o.status.success());
    assert!(std::fs::read_to_string(dir.path().join("p.svm")).unwrap().lines().all(|l| l.starts_with("0 ")));

    let cfg = RIDGE
        .replace("data_source = synthetic_ridge", "data_source = libsvm\nlibsvm_path = r.svm")
        .replace("n = 100\nd = 5\nnoise = 0.1\ndata_seed = 1\n", "")
        .replace("T = 100", "T = 30");
    std::fs::write(dir.path().join("svm.cfg"), cfg).unwrap();
    let o = dfsdca(&["solve-ref", "svm.cfg", "--output", "w.txt"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let w: Vec<f64> = std::fs::read_to_string(dir.path().join("w.txt"))
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(w.len(), 4);
    let o = dfsdca(&["solve-ref", "svm.cfg"], dir.path());
    let printed: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(printed, w);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| dfsdca(args, dir.path()).status.code().unwrap();

    std::fs::write(dir.path().join("bad.cfg"), "lambda = 0.1\n").unwrap();
    assert_eq!(code(&["run", "bad.cfg"]), 1);
    assert_eq!(code(&["run", "missing.cfg"]), 1);
    assert_eq!(code(&["run"]), 1);

    std::fs::write(dir.path().join("broken.svm"), "1 1:0.5\n1 x:2\n").unwrap();
    let cfg = RIDGE
        .replace("data_source = synthetic_ridge", "data_source = libsvm\nlibsvm_path = broken.svm")
        .replace("n = 100\nd = 5\nnoise = 0.1\ndata_seed = 1\n", "");
    std::fs::write(dir.path().join("svm.cfg"), cfg).unwrap();
    let o = dfsdca(&["run", "svm.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(code(&["report", "nothing.csv"]), 2);

    let diverging = RIDGE.replace("eta = auto", "eta = 50").replace("H = 1", "H = 5").replace("T = 100", "T = 20");
    std::fs::write(dir.path().join("div.cfg"), diverging).unwrap();
    assert_eq!(code(&["run", "div.cfg"]), 3);
    // the partial log is still written
    assert!(std::fs::read_to_string(dir.path().join("run.csv")).unwrap().lines().count() >= 2);

    assert_eq!(code(&["--help"]), 0);
}
