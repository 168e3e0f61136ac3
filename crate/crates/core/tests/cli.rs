use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const SECTION_TABLE: &str = "p1 p2 p3 -> p
bot 0 0 -> 0
0 0 0 -> 0
1 0 0 -> top
1 1 0 -> 1
1 1 1 -> 1
";

const OOA_TABLE: &str = "x y -> ooa
bot bot -> bot
bot 0 -> 0
bot 1 -> 1
bot top -> top
0 bot -> 0
0 0 -> top
0 1 -> top
0 top -> top
1 bot -> 1
1 0 -> top
1 1 -> top
1 top -> top
top bot -> top
top 0 -> top
top 1 -> top
top top -> top
";

const UN_TABLE: &str = "x y -> un
bot bot -> bot
bot 0 -> top
bot 1 -> top
bot top -> top
0 bot -> top
0 0 -> 0
0 1 -> top
0 top -> top
1 bot -> top
1 0 -> top
1 1 -> 1
1 top -> top
top bot -> top
top 0 -> top
top 1 -> top
top top -> top
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptacl4")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn compile_to(dir: &TempDir, table: &Path, name: &str) -> PathBuf {
    let out = dir.path().join(name);
    let o = run(&["compile", s(table), "-o", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn compiled_table_evaluates_to_top() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "t.table", SECTION_TABLE);
    let out = dir.path().join("t.policy");
    let o = run(&["compile", s(&table), "-o", s(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("clauses: "), "{}", stdout(&o));
    let policy = fs::read_to_string(&out).unwrap();
    assert!(policy.starts_with("(op "));

    let request = write(&dir, "q", "");
    let o = run(&["eval", s(&out), s(&request), "--bind", "p1=1", "--bind", "p2=0", "--bind", "p3=0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "top\n");
}

#[test]
fn compile_to_stdout_keeps_counts_on_stderr() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "t.table", SECTION_TABLE);
    let o = run(&["compile", s(&table)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("(op "));
    assert!(stderr(&o).contains("literals: "));
}

#[test]
fn verify_compiled_tables() {
    let dir = TempDir::new().unwrap();
    let section = write(&dir, "s.table", SECTION_TABLE);
    let ooa = write(&dir, "ooa.table", OOA_TABLE);
    let un = write(&dir, "un.table", UN_TABLE);
    let s_policy = compile_to(&dir, &section, "s.policy");
    let ooa_policy = compile_to(&dir, &ooa, "ooa.policy");

    let o = run(&["verify", s(&s_policy), s(&section)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "pass (64 inputs)\n");

    let o = run(&["verify", s(&ooa_policy), s(&ooa)]);
    assert_eq!(stdout(&o), "pass (16 inputs)\n");

    let o = run(&["verify", s(&ooa_policy), s(&un)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "fail at (bot,0): policy gives 0, table gives top\n");
}

#[test]
fn empty_table_compiles_to_bottom() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "e.table", "a b -> out\n");
    let policy = compile_to(&dir, &table, "e.policy");
    let o = run(&["verify", s(&policy), s(&table)]);
    assert!(o.status.success(), "{}", stdout(&o));
    let q = write(&dir, "q", "");
    let o = run(&["eval", s(&policy), s(&q)]);
    assert_eq!(stdout(&o), "bot\n");
}

#[test]
fn eval_strict_and_indeterminate() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p", "(atomic (target (role admin)) 1)\n");
    let admin = write(&dir, "q1", "role=admin\n");
    let err = write(&dir, "q2", "role=!\n");

    assert_eq!(stdout(&run(&["eval", s(&p), s(&admin)])), "1\n");
    assert_eq!(stdout(&run(&["eval", s(&p), s(&err), "--ind"])), "{bot,1}\n");
    assert_eq!(
        stdout(&run(&["eval", s(&p), s(&err), "--ind", "--resolve", "deny-by-default"])),
        "0\n"
    );
    let o = run(&["eval", s(&p), s(&admin), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.to_string().contains("\"1\""), "{v}");
}

#[test]
fn eval_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p", "(op nosuch (atomic (target) 1) (atomic (target) 0))\n");
    let q = write(&dir, "q", "");
    let o = run(&["eval", s(&p), s(&q)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nosuch"), "{}", stderr(&o));

    let o = run(&["eval", s(&dir.path().join("missing")), s(&q)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_reports() {
    let o = run(&["check", "belnap"]);
    let out = stdout(&o);
    assert!(out.contains("canonically suitable: yes"), "{out}");
    assert!(out.contains("functionally complete: yes"), "{out}");
    assert!(out.contains("canonically complete: NO"), "{out}");
    assert!(out.contains("σ_bot^0"), "{out}");

    let out = stdout(&run(&["check", "conf,kand"]));
    assert!(out.contains("functionally complete: NO"), "{out}");
    assert!(out.contains("f(0)=0"), "{out}");

    let out = stdout(&run(&["check", "t0,t1,ttop,kand"]));
    assert!(!out.contains("NO"), "{out}");

    let o = run(&["check", "conf,bogus"]);
    assert!(!o.status.success());
}

#[test]
fn check_other_lattices() {
    let out = stdout(&run(&["--lattice", "chain:3", "check", "jobe"]));
    assert!(!out.contains("NO"), "{out}");
    let o = run(&["--lattice", "chain:4", "check", "dagger,cyc,tand", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["canonically_complete"], true);
}

#[test]
fn synth_words() {
    assert_eq!(stdout(&run(&["synth", "bot,0,1,top"])), "id\n");
    assert_eq!(stdout(&run(&["--basis", "transpositions", "synth", "bot,0,1,top"])), "id\n");
    let word = stdout(&run(&["synth", "(bot 0)"]));
    assert!(!word.trim().is_empty() && !word.contains("not"), "{word}");
    assert_eq!(
        stdout(&run(&["synth", "(bot 0)", "--generators", "(bot 1),cyc"])),
        "not generated (gcd(2,4)=2)\n"
    );
    let o = run(&["synth", "bot,bot,1,top"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synth_word_composes_to_target() {
    let word = stdout(&run(&["synth", "bot,1,0,top"]));
    let names: Vec<&str> = word.trim().split(',').collect();
    // conf swaps bot and top; cyc is bot->0->1->top->bot; words apply right to left.
    let conf = [3, 1, 2, 0];
    let cyc = [1, 2, 3, 0];
    let target = [0, 2, 1, 3];
    assert!(names.len() > 1, "{word}");
    for (x, &want) in target.iter().enumerate() {
        let y = names.iter().rev().fold(x, |v, n| match *n {
            "conf" => conf[v],
            "cyc" => cyc[v],
            other => panic!("unexpected generator {other}"),
        });
        assert_eq!(y, want);
    }
}

#[test]
fn serve_answers_lines() {
    let dir = TempDir::new().unwrap();
    write(&dir, "admin.policy", "(atomic (target (role admin)) 1)\n");
    write(&dir, "deny.policy", "(op kand (ref admin) (atomic (target) 0))\n");
    let mut child = Command::new(env!("CARGO_BIN_EXE_ptacl4"))
        .args(["serve", s(dir.path())])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"admin | role=admin\nadmin | role=guest\nnope | role=admin\nadmin | role=admin;x=y\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 4, "{lines:?}");
    assert_eq!(lines[0], "1");
    assert_eq!(lines[1], "bot");
    assert!(lines[2].starts_with("ERR unknown policy"), "{}", lines[2]);
    assert_eq!(lines[3], "1");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.toml", "basis = \"transpositions\"\nformat = \"json\"\n");
    let o = run(&["--config", s(&cfg), "synth", "(bot 0)"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["word"], "t0");

    let bad = write(&dir, "b.toml", "colour = \"red\"\n");
    assert_eq!(run(&["--config", s(&bad), "synth", "(bot 0)"]).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["--lattice", "chain:9", "check", "belnap"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "t", SECTION_TABLE);
    assert_eq!(run(&["--lattice", "4t", "compile", s(&t)]).status.code(), Some(1));
}
