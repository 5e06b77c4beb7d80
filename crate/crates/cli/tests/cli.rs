//! End-to-end checks of the binary: verdict lines, byte-identical
//! reproducibility, and the exit-status contract (NONE is a valid answer
//! and exits 0; malformed input is nonzero; resource caps are distinct).

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ramsey-trees"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn weight_and_signatures_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let subset = dir.path().join("h.txt");
    let out = run(&[
        "random-subset",
        "--n",
        "5",
        "--seed",
        "7",
        "--density",
        "0.8",
        "--out",
        path_str(&subset),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("RANDOM_SUBSET n=5 "));

    let w = run(&["weight", "--subset-file", path_str(&subset)]);
    assert!(w.status.success());
    assert!(stdout(&w).starts_with("WEIGHT "));

    let s = run(&["signatures", "--subset-file", path_str(&subset)]);
    assert!(stdout(&s).starts_with("SIGNATURES count="));

    let m = run(&["max-depth", "--subset-file", path_str(&subset)]);
    assert!(stdout(&m).starts_with("MAX_DEPTH "));
}

#[test]
fn identical_configs_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (c1, c2) = (dir.path().join("c1.txt"), dir.path().join("c2.txt"));
    let v1 = run(&["random-split", "--n", "9", "--seed", "123", "--out", path_str(&c1)]);
    let v2 = run(&["random-split", "--n", "9", "--seed", "123", "--out", path_str(&c2)]);
    assert_eq!(stdout(&v1), stdout(&v2));
    assert_eq!(
        std::fs::read(&c1).unwrap(),
        std::fs::read(&c2).unwrap()
    );

    let (m1, m2) = (dir.path().join("m1.csv"), dir.path().join("m2.csv"));
    let s1 = run(&["mc-lemma6", "--n", "8", "--trials", "300", "--seed", "5", "--csv", path_str(&m1)]);
    let s2 = run(&["mc-lemma6", "--n", "8", "--trials", "300", "--seed", "5", "--csv", path_str(&m2)]);
    assert_eq!(stdout(&s1), stdout(&s2));
    let b1 = std::fs::read(&m1).unwrap();
    assert_eq!(b1, std::fs::read(&m2).unwrap());
    let text = String::from_utf8(b1).unwrap();
    assert!(text.starts_with("seed,n,k,max_color,exceeded\n"));
    assert!(text.lines().last().unwrap().starts_with("summary,8,16,"));
    assert_eq!(text.lines().count(), 302);

    // A different seed changes the coloring.
    let c3 = dir.path().join("c3.txt");
    run(&["random-split", "--n", "9", "--seed", "124", "--out", path_str(&c3)]);
    assert_ne!(std::fs::read(&c1).unwrap(), std::fs::read(&c3).unwrap());
}

#[test]
fn mono_replica_on_random_split_is_none() {
    let dir = tempfile::tempdir().unwrap();
    let coloring = dir.path().join("c.txt");
    run(&["random-split", "--n", "7", "--seed", "42", "--out", path_str(&coloring)]);
    let out = run(&["mono-replica", "--coloring-file", path_str(&coloring), "--d", "2"]);
    assert!(out.status.success(), "NONE is a valid answer");
    assert_eq!(stdout(&out).trim(), "NONE");

    // A constant coloring does contain one.
    std::fs::write(dir.path().join("ones.txt"), "n=2\n1 1 1\n").unwrap();
    let hit = run(&[
        "mono-replica",
        "--coloring-file",
        path_str(&dir.path().join("ones.txt")),
        "--d",
        "2",
    ]);
    assert!(stdout(&hit).starts_with("MONO_REPLICA color=1 d=2"));
}

#[test]
fn witness_files_round_trip_through_extract() {
    let dir = tempfile::tempdir().unwrap();
    let subset = dir.path().join("h.txt");
    // Full T_3.
    std::fs::write(&subset, "n=3\n7f\n").unwrap();
    let wpath = dir.path().join("w.txt");
    let out = run(&[
        "extract",
        "--subset-file",
        path_str(&subset),
        "--levels",
        "0,2",
        "--out",
        path_str(&wpath),
    ]);
    assert_eq!(stdout(&out).trim(), "WITNESS d=2 n=3 signature=0,2");
    let text = std::fs::read_to_string(&wpath).unwrap();
    assert_eq!(text, "d=2 n=3\n1 -> 1\n2 -> 4\n3 -> 6\nsignature=0,2\n");

    // Unrealizable target answers NONE with exit 0.
    std::fs::write(&subset, "n=3\n70\n").unwrap(); // three leaves only
    let none = run(&[
        "extract",
        "--subset-file",
        path_str(&subset),
        "--levels",
        "0,1",
    ]);
    assert!(none.status.success());
    assert_eq!(stdout(&none).trim(), "NONE");
}

#[test]
fn arith_replica_verdict_format() {
    let dir = tempfile::tempdir().unwrap();
    let subset = dir.path().join("h.txt");
    std::fs::write(&subset, "n=4\n7fff\n").unwrap(); // full T_4
    let out = run(&["arith-replica", "--subset-file", path_str(&subset), "--l", "3"]);
    let line = stdout(&out);
    assert!(line.starts_with("ARITHMETIC_REPLICA a="), "{line}");
    assert!(line.contains(" b=") && line.contains(" l=3"), "{line}");

    // A single branch has no depth-2 replica at all.
    std::fs::write(&subset, "n=3\n0b\n").unwrap(); // vertices 1, 2, 4
    let none = run(&["arith-replica", "--subset-file", path_str(&subset), "--l", "2"]);
    assert!(none.status.success());
    assert_eq!(stdout(&none).trim(), "NONE");
}

#[test]
fn exit_status_contract() {
    // Malformed input: nonzero (but not the resource code).
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "nope\n").unwrap();
    let out = run(&["weight", "--subset-file", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));

    // Resource cap: exit 3.
    let big = dir.path().join("big.txt");
    std::fs::write(&big, "n=30\n0\n").unwrap();
    let out = run(&["weight", "--subset-file", path_str(&big)]);
    assert_eq!(out.status.code(), Some(3));

    // Oracle caps are resource errors too. Full T_7: 127 bits is 32
    // nibbles, the top one holding 3 bits.
    let full7 = dir.path().join("f7.txt");
    std::fs::write(&full7, format!("n=7\n7{}\n", "f".repeat(31))).unwrap();
    let out = run(&["oracle", "--subset-file", path_str(&full7), "--d", "2"]);
    assert_eq!(out.status.code(), Some(3));

    // Usage errors: clap's exit 2.
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["random-split", "--n", "4"]); // missing required --seed
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn t2free_and_block_color_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.txt");
    let out = run(&[
        "t2free", "--n", "6", "--k", "8", "--seed", "9", "--attempts", "16", "--out",
        path_str(&base),
    ]);
    let line = stdout(&out);
    assert!(line.starts_with("T2FREE n=6 k=8 max_color="), "{line}");

    let blocked = dir.path().join("blocked.txt");
    let out = run(&[
        "block-color",
        "--base-file",
        path_str(&base),
        "--d",
        "3",
        "--out",
        path_str(&blocked),
    ]);
    assert_eq!(stdout(&out).trim(), "BLOCK_COLORING n=12 max_color=4");

    // Unreachable budget: NONE, exit 0.
    let out = run(&["t2free", "--n", "5", "--k", "1", "--seed", "9", "--attempts", "8"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "NONE");
}

#[test]
fn verify_commands_report_ok() {
    let out = run(&["verify-lemma3", "--n", "7", "--trials", "50", "--seed", "3"]);
    assert_eq!(stdout(&out).trim(), "LEMMA3 OK 50/50");
    let out = run(&["verify-lemma4", "--n", "5", "--trials", "40", "--seed", "4"]);
    assert_eq!(stdout(&out).trim(), "LEMMA4 OK 40/40");
    let out = run(&["verify-oracle", "--n", "5", "--trials", "30", "--seed", "5"]);
    assert_eq!(stdout(&out).trim(), "ORACLE_EQUIV OK 30/30");
}

#[test]
fn gmap_and_tree_files() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.txt");
    let subset = dir.path().join("h.txt");
    let out = run(&[
        "gmap", "--s", "3", "--n", "5", "--seed", "11", "--out-tree", path_str(&tree),
        "--out-subset", path_str(&subset),
    ]);
    let line = stdout(&out);
    assert!(line.starts_with("GMAP s=3 n=5 leaves="), "{line}");
    assert!(line.contains("transport_ok=true"), "{line}");

    // The written tree re-parses through the gmap command.
    let again = run(&["gmap", "--tree-file", path_str(&tree)]);
    assert_eq!(stdout(&again), line);

    // The written subset is a valid binary subset of depth 6.
    let w = run(&["weight", "--subset-file", path_str(&subset)]);
    assert!(stdout(&w).starts_with("WEIGHT "));
}

#[test]
fn entropy_and_chernoff_lines() {
    let out = run(&["entropy", "--eps", "0.5"]);
    assert_eq!(stdout(&out).trim(), "ENTROPY h=1.000000000000");
    let out = run(&["entropy", "--delta", "1.0"]);
    assert_eq!(stdout(&out).trim(), "ENTROPY_INV eps=0.500000000000");
    let out = run(&["chernoff", "--n", "100", "--eps", "0.2"]);
    let line = stdout(&out);
    assert!(line.contains("holds=true"), "{line}");
    assert!(line.starts_with("CHERNOFF n=100 d=20 "), "{line}");
    // Passing both entropy flags is a usage error.
    let out = run(&["entropy", "--eps", "0.2", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theorem2_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let out = run(&[
        "theorem2-grid", "--d-max", "3", "--k-max", "4", "--csv", path_str(&csv),
    ]);
    assert_eq!(
        stdout(&out).trim(),
        "THEOREM2_GRID cells=6 within_bound=6 violations=0"
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,k,n_sufficient,bound,n_construction");
    assert!(lines[1].starts_with("2,2,6,"));
}
