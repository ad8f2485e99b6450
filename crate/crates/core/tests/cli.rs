use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prime-patterns"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn search_prints_tuples_then_count() {
    let o = run(&["search", "--pattern", "x, x+2", "--n", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.first(), Some(&"3 3 5"));
    assert_eq!(lines.last(), Some(&"count=8"));
    assert_eq!(lines.len(), 9);
}

#[test]
fn unsorted_output_has_the_same_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hits.txt");
    let o = run(&[
        "search",
        "--pattern",
        "x,x+2,x+6,x+8",
        "--n",
        "10^6",
        "--workers",
        "3",
        "--unsorted",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "count=166\n");
    let mut got: Vec<String> = fs::read_to_string(&out).unwrap().lines().map(String::from).collect();
    got.sort_by_key(|l| l.split(' ').next().unwrap().parse::<i64>().unwrap());
    let sorted = run(&["search", "--pattern", "x,x+2,x+6,x+8", "--n", "10^6"]);
    let want: Vec<String> = stdout(&sorted)
        .lines()
        .filter(|l| !l.starts_with("count="))
        .map(String::from)
        .collect();
    assert_eq!(got, want);
}

#[test]
fn census_summary_format() {
    let o = run(&["twins", "--x", "1000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("count=35\nsum="), "{text}");
    let sum = text.lines().nth(1).unwrap().strip_prefix("sum=").unwrap();
    let digits: String = sum.chars().filter(char::is_ascii_digit).collect();
    assert_eq!(digits.trim_start_matches('0').len(), 17, "{sum}");

    let o = run(&["quads", "--x", "10"]);
    assert_eq!(stdout(&o), "count=0\nsum=0\n");
}

#[test]
fn chains_subcommand() {
    let o = run(&["chains", "--kind", "first", "--length", "6", "--cap", "10^4", "--first"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "89 89 179 359 719 1439 2879\nsmallest=89\n");
    let o = run(&["chains", "--kind", "second", "--length", "2", "--cap", "40"]);
    let text = stdout(&o);
    let starts: Vec<&str> = text.lines().filter_map(|l| l.split(' ').next()).collect();
    assert_eq!(starts, ["2", "3", "7", "19", "31", "37", "count=6"]);
    let o = run(&["chains", "--kind", "first", "--length", "6", "--cap", "50", "--first"]);
    assert_eq!(stdout(&o), "smallest=none\n");
}

#[test]
fn configuration_errors_exit_nonzero() {
    let o = run(&["search", "--pattern", "x,x+2,x+4", "--n", "1000"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not admissible"));
    assert!(!run(&["search", "--pattern", "x,2x+2", "--n", "1000"]).status.success());
    assert!(!run(&["search", "--pattern", "x", "--n", "2^127"]).status.success());
    assert!(!run(&["search", "--pattern", "x,x+2", "--n", "100", "--sieve-bound", "1"]).status.success());
    assert!(!run(&["twins", "--x", "4"]).status.success());
}

#[test]
fn checkpoint_from_another_run_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("run.ckpt");
    let ck = ck.to_str().unwrap();
    let halted = run(&["twins", "--x", "10^6", "--checkpoint", ck, "--halt-after", "1"]);
    assert_eq!(halted.status.code(), Some(3));
    let other = run(&["twins", "--x", "2000000", "--checkpoint", ck]);
    assert!(!other.status.success());
    assert!(String::from_utf8_lossy(&other.stderr).contains("different configuration"));
    let finished = run(&["twins", "--x", "10^6", "--checkpoint", ck]);
    assert!(finished.status.success());
    assert_eq!(stdout(&finished), stdout(&run(&["twins", "--x", "10^6"])));

    fs::write(ck, "prime-patterns checkpoint 1\ndigest zz\n").unwrap();
    let corrupt = run(&["twins", "--x", "10^6", "--checkpoint", ck]);
    assert!(!corrupt.status.success());
    assert!(String::from_utf8_lossy(&corrupt.stderr).contains("corrupt checkpoint"));
}

#[test]
fn pseudosquare_table_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("psq.txt");
    let t = table.to_str().unwrap();
    assert!(run(&["pseudosquares", "--limit", "10^6", "--out", t]).status.success());
    let text = fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("PSQ v1\n3 73\n5 241\n"));
    assert_eq!(text.lines().last(), Some("31 515761"));
    let o = run(&["search", "--pattern", "x,x+2", "--n", "10^5", "--pseudosquares", t, "--sieve-bound", "50"]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("count=1224\n"));
}
