use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn metriso(args: &[&str]) -> Run {
    metriso_env(args, &[])
}

fn metriso_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_metriso"));
    cmd.args(args).env_remove("METRISO_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().expect("binary runs");
    Run {
        code: status.code().expect("exited"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(TempDir::new().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }
}

const TRIANGLE: &str = "3\na\nb\nc\n0 1 1\n1 0 1\n1 1 0\n";
const PATH3: &str = "3\na\nb\nc\n0 1 2\n1 0 1\n2 1 0\n";

#[test]
fn isometry_with_itself_prints_identity() {
    let f = Files::new();
    let a = f.put("a.space", PATH3);
    let r = metriso(&["isometry", &a, &a]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "# metriso/1 isometry\nisometric\n0 0\n1 1\n2 2\n");
    let r = metriso(&["isometry", &a, &a, "--exhaustive"]);
    assert_eq!(r.stdout, "# metriso/1 isometry\nisometric\n0 0\n1 1\n2 2\n");
    let t = f.put("t.space", TRIANGLE);
    let r = metriso(&["isometry", &a, &t]);
    assert_eq!(
        (r.code, r.stdout.as_str()),
        (0, "# metriso/1 isometry\nnot-isometric\n")
    );
}

#[test]
fn tree_to_space_then_check_metric() {
    let f = Files::new();
    let chain = f.put("chain.tree", "\n0\n0,0\n");
    let r = metriso(&["tree2space", &chain, "--radii", "2,1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "# metriso/1 space\n3\n()\n(0)\n(0,0)\n0 2 2\n2 0 1\n2 1 0\n"
    );
    let space = f.put("chain.space", &r.stdout);
    let r = metriso(&["check-metric", &space]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "# metriso/1 check-metric\nvalid\npoints 3\nultrametric true\n"
    );
}

#[test]
fn verify_reduction_runs() {
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "graphs:4",
        "--map",
        "graph2space",
        "--E",
        "graph-iso",
        "--F",
        "isometry",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.ends_with("pass\n"), "{}", r.stdout);
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "trees:5",
        "--map",
        "tree2space",
        "--E",
        "tree-iso",
        "--F",
        "isometry",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.ends_with("pass\n"));
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "ultra:30",
        "--map",
        "canon-ultra",
        "--E",
        "isometry-exhaustive",
        "--F",
        "equal",
        "--seed",
        "4",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "metric:25:4",
        "--map",
        "gromov",
        "--E",
        "isometry",
        "--F",
        "equal",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "metric:25:4",
        "--map",
        "disc2struct",
        "--E",
        "isometry",
        "--F",
        "struct-iso",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "ultra:25:6",
        "--map",
        "ball-structure",
        "--E",
        "anchored",
        "--F",
        "struct-iso",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn verify_reduction_reports_counterexample() {
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "graphs:2",
        "--map",
        "constant",
        "--E",
        "graph-iso",
        "--F",
        "equal",
    ]);
    assert_eq!(r.code, 1);
    assert_eq!(
        r.stdout,
        "# metriso/1 verify-reduction\ncorpus graphs:2 size 3\npairs 2\ncounterexample 0 1 E=false F=true\nx graph 1 []\ny graph 2 []\n"
    );
}

#[test]
fn verify_reduction_flag_errors() {
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "trees:4",
        "--map",
        "graph2space",
        "--E",
        "tree-iso",
        "--F",
        "isometry",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("UsageError"));
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "forests:4",
        "--map",
        "identity",
        "--E",
        "equal",
        "--F",
        "equal",
    ]);
    assert_eq!(r.code, 2);
    let r = metriso(&[
        "verify-reduction",
        "--corpus",
        "trees:4",
        "--map",
        "identity",
        "--E",
        "tree-iso",
        "--F",
        "isometry",
    ]);
    assert_eq!(r.code, 2);
}

#[test]
fn parse_and_domain_errors() {
    let f = Files::new();
    let bad = f.put("bad.space", "2\na\nb\n0 1\n1 oops\n");
    let r = metriso(&["check-metric", &bad]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("ParseError") && r.stderr.contains("line 5"),
        "{}",
        r.stderr
    );

    let tri = f.put("tri.space", "3\na\nb\nc\n0 1 3\n1 0 1\n3 1 0\n");
    let r = metriso(&["check-metric", &tri]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("TriangleViolation"), "{}", r.stderr);

    let r = metriso(&["canon-ultra", &f.put("p.space", PATH3)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("NotUltrametric"), "{}", r.stderr);

    let r = metriso(&["check-metric", "/nonexistent/file"]);
    assert_eq!(r.code, 2);

    let r = metriso(&["isometry", "--frobnicate"]);
    assert_eq!(r.code, 2);

    let chain = f.put("chain.tree", "\n0\n0,0\n0,0,0\n");
    let r = metriso(&["tree2space", &chain, "--radii", "2,1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("SequenceTooShort"));
    let r = metriso(&["tree2space", &chain, "--radii", "1,2,3"]);
    assert!(r.code == 1 && r.stderr.contains("InvalidRadii"));
    let r = metriso(&["tree2space", &chain, "--radii", "1,x"]);
    assert_eq!(r.code, 2);
    let r = metriso(&["tree-canon", &f.put("gap.tree", "\n0,0\n")]);
    assert!(r.code == 1 && r.stderr.contains("MissingPrefix"));
}

#[test]
fn ultrametric_commands() {
    let f = Files::new();
    let x = f.put("x.space", "3\na\nb\nc\n0 1 2\n1 0 2\n2 2 0\n");
    let r = metriso(&["canon-ultra", &x]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "# metriso/1 code\n(2 * (1 * *))\n");

    let r = metriso(&["ball-structure", &x]);
    assert_eq!(r.code, 0);
    assert!(
        r.stdout.starts_with("# metriso/1 structure\n5\nR 2 "),
        "{}",
        r.stdout
    );
    let s = f.put("x.struct", &r.stdout);
    let r = metriso(&["struct-iso", &s, &s]);
    assert_eq!(
        r.stdout,
        "# metriso/1 struct-iso\nisomorphic\n0 0\n1 1\n2 2\n3 3\n4 4\n"
    );

    let r = metriso(&["sphere", &x, "--center", "0"]);
    assert_eq!(r.stdout, "# metriso/1 spheres\n1 1\n2 2\n");
    let r = metriso(&["sphere", &x, "--center", "5"]);
    assert_eq!(r.code, 1);

    let rho = f.put("rho.map", "1 1/2\n2 3\n");
    let r = metriso(&["transfer", &x, "--map", &rho]);
    assert_eq!(
        r.stdout,
        "# metriso/1 space\n3\na\nb\nc\n0 1/2 3\n1/2 0 3\n3 3 0\n"
    );
    let bad = f.put("bad.map", "1 3\n2 1\n");
    let r = metriso(&["transfer", &x, "--map", &bad]);
    assert!(r.code == 1 && r.stderr.contains("NotMonotone"));

    let r = metriso(&["universal", "--d", "1,2", "--k", "2"]);
    assert_eq!(
        r.stdout,
        "# metriso/1 space\n4\n1:0\n1:1\n2:0\n2:1\n0 1 2 2\n1 0 2 2\n2 2 0 2\n2 2 2 0\n"
    );

    let y = f.put("y.space", "2\np\nq\n0 1\n1 0\n");
    let r = metriso(&["sum", &x, &y, "--r", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("\n0.a\n") && r.stdout.contains("\n1.q\n"));
    let r = metriso(&["sum", &x, &y, "--r", "2"]);
    assert!(r.code == 1 && r.stderr.contains("RadiusTooSmall"));
}

#[test]
fn tree_commands() {
    let f = Files::new();
    let t = f.put("t.tree", "# metriso/1 tree\n\n0\n");
    assert_eq!(
        metriso(&["tree-canon", &t]).stdout,
        "# metriso/1 code\n(*)\n"
    );
    assert_eq!(metriso(&["tree-rank", &t]).stdout, "# metriso/1 rank\n1\n");
    let swap = f.put("swap.map", "0 1\n1 0\n");
    let r = metriso(&["repair-iso", &t, &t, "--map", &swap, "--radii", "2,1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "# metriso/1 bijection\n0 0\n1 1\n");
    let three = f.put("three.tree", "\n0\n0,0\n");
    let r = metriso(&[
        "repair-iso",
        &three,
        &three,
        "--map",
        &f.put("rev.map", "0 2\n1 1\n2 0\n"),
    ]);
    assert!(r.code == 1 && r.stderr.contains("NotAnIsometry"));
    let r = metriso(&[
        "repair-iso",
        &three,
        &three,
        "--map",
        &f.put("dup.map", "0 1\n1 1\n2 0\n"),
    ]);
    assert!(r.code == 1 && r.stderr.contains("NotABijection"));
}

#[test]
fn encoding_commands() {
    let f = Files::new();
    let g = f.put("p3.graph", "3\n0 1\n1 2\n");
    let r = metriso(&["graph2space", &g]);
    assert_eq!(
        r.stdout,
        "# metriso/1 space\n3\n0\n1\n2\n0 1 2\n1 0 1\n2 1 0\n"
    );
    let loopy = f.put("loop.graph", "2\n1 1\n");
    let r = metriso(&["graph2space", &loopy]);
    assert!(r.code == 1 && r.stderr.contains("SelfLoop"));

    let two = f.put("two.space", "2\na\nb\n0 1\n1 0\n");
    let r = metriso(&["disc2struct", &two, "--thresholds", "1,2"]);
    assert_eq!(
        r.stdout,
        "# metriso/1 structure\n2\nP_1 2 2\n0 0\n1 1\nP_2 2 4\n0 0\n0 1\n1 0\n1 1\n"
    );
    let r = metriso(&["disc2struct", &two, "--thresholds", "2"]);
    assert!(r.code == 1 && r.stderr.contains("InsufficientThresholds"));

    let r = metriso(&["gromov", &two, "--n", "1"]);
    assert_eq!(r.stdout, "# metriso/1 gromov\nn 1 2\n0 0 0 0\n0 1 1 0\n");
    let r = metriso(&["gromov", &two]);
    assert_eq!(
        r.stdout,
        "# metriso/1 gromov\nn 0 1\n0\nn 1 2\n0 0 0 0\n0 1 1 0\n"
    );
}

#[test]
fn action_commands() {
    let f = Files::new();
    let raw = f.put("c2.action", "2\n0 2\n2 0\n2\n0 1\n1 0\n0 1\n1 0\n");
    let r = metriso(&["orbit-encode", &raw, "--z", "0"]);
    assert!(
        r.code == 1 && r.stderr.contains("PreconditionViolated"),
        "{}",
        r.stderr
    );
    let r = metriso(&["adjust-action", &raw]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "# metriso/1 action\n2\n0 1\n1 0\n2\n0 1\n1 0\n0 1\n1 0\n"
    );
    let adjusted = f.put("adj.action", &r.stdout);
    let x0 = metriso(&["orbit-encode", &adjusted, "--z", "0"]);
    let x1 = metriso(&["orbit-encode", &adjusted, "--z", "1"]);
    assert_eq!(x0.code, 0);
    assert!(x0.stdout.contains("\nx*0\nx*1\n"));
    let (p0, p1) = (f.put("x0.space", &x0.stdout), f.put("x1.space", &x1.stdout));
    assert!(metriso(&["isometry", &p0, &p1])
        .stdout
        .contains("\nisometric\n"));
    let bad = f.put("bad.action", "2\n0 1\n1 0\n2\n0 1\n1 0\n0 1\n0 1\n");
    let r = metriso(&["adjust-action", &bad]);
    assert!(r.code == 1 && r.stderr.contains("NotAnAction"));
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let args = [
        "verify-reduction",
        "--corpus",
        "ultra:40:6",
        "--map",
        "constant",
        "--E",
        "isometry",
        "--F",
        "equal",
        "--seed",
        "9",
    ];
    let a = metriso(&args);
    let b = metriso_env(&args, &[("METRISO_WORKERS", "1")]);
    let c = metriso_env(&args, &[("METRISO_WORKERS", "3")]);
    assert_eq!(a.code, 1);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let r = metriso_env(&args, &[("METRISO_WORKERS", "zero")]);
    assert_eq!(r.code, 2);
}
