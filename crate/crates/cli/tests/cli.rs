use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodgepar")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn inspect_rank_three_module() {
    let o = run(&["inspect", &data("egl3_a3.json")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("non-critical: all 6 refinements"), "{s}");
    assert!(s.contains("a_D = 3"), "{s}");
    let j: serde_json::Value =
        serde_json::from_slice(&run(&["inspect", &data("egl3_a3.json"), "--format", "json"]).stdout).unwrap();
    assert_eq!(j["a_D"][0], "3");
    assert_eq!(j["noncritical"]["all"], true);
}

#[test]
fn inspect_rank_one_admissibility() {
    let yes = stdout(&run(&["inspect", &data("rank1_admissible.json")]));
    assert!(yes.contains("weakly admissible: true"), "{yes}");
    let no = stdout(&run(&["inspect", &data("rank1_not_admissible.json")]));
    assert!(no.contains("weakly admissible: false"), "{no}");
}

#[test]
fn malformed_input_is_an_input_error() {
    let o = run(&["inspect", &data("malformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    let o = run(&["kertd", &data("bad_field.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alphas[1]"), "{}", stderr(&o));
    let o = run(&["inspect", &data("does_not_exist.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["dims", "3", "1", "--prime", "6"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn dims_ledger_rows() {
    for (n, d, want) in [("3", "1", "10/9/1"), ("2", "1", "5/5/0"), ("4", "3", "49/34/15")] {
        let o = run(&["dims", n, d]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(&format!("ledger aut/gal/ker: {want}")), "{}", stdout(&o));
    }
    let csv = stdout(&run(&["dims", "3", "2", "--shape", "2,1", "--format", "csv"]));
    assert!(csv.starts_with("section,name,shape,formula,computed,pass\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")), "{csv}");
    assert_eq!(run(&["dims", "9", "1"]).status.code(), Some(2));
    assert_eq!(run(&["dims", "3", "1", "--shape", "2,2"]).status.code(), Some(2));
}

#[test]
fn kertd_reports() {
    let o = run(&["kertd", &data("egl3_a3.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["dims"]["aut"], 10);
    assert_eq!(j["dims"]["gal"], 9);
    assert_eq!(j["dims"]["ker"], 1);
    assert_eq!(j["kernel_basis"].as_array().unwrap().len(), 1);
    assert!(j["relations_checked"].as_u64().unwrap() > 0);
    let o = run(&["kertd", &data("rank2.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ker = 0"));
}

#[test]
fn kertd_downgrades_large_rank() {
    // Fil^{-h_i} is spanned by the first 5 − i + 1 vectors of a Vandermonde basis.
    let vectors: Vec<Vec<String>> =
        (0..5i64).map(|k| (0..5u32).map(|c| (k + 2).pow(c).to_string()).collect()).collect();
    let steps: Vec<serde_json::Value> =
        (0..5usize).map(|i| serde_json::json!({"jump": i as i64 - 4, "basis": vectors[..5 - i].to_vec()})).collect();
    let module = serde_json::json!({
        "n": 5, "d_K": 1, "p": 5,
        "alphas": ["1", "2/5", "3/25", "4/125", "6/625"],
        "weights": [[4, 3, 2, 1, 0]],
        "filtration": [steps]
    });
    let path = std::env::temp_dir().join("hodgepar_rank5_module.json");
    std::fs::write(&path, module.to_string()).unwrap();
    let o = run(&["kertd", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("bookkeeping-only"));
}

#[test]
fn sweep_injective_and_duplicates() {
    let o = run(&["sweep", "--samples", "2,3,5,7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("injective: true"));
    let o = run(&["sweep", "--samples", "2,2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("duplicate sample"));
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["sweep"].as_array().unwrap().len(), 1);
    assert_eq!(run(&["sweep", "--samples", "0,2"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--samples", "1/0"]).status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic_and_parallel_safe() {
    let a = run(&["sweep", "--count", "6", "--seed", "9", "--format", "csv"]);
    let b = run(&["sweep", "--count", "6", "--seed", "9", "--format", "csv", "--parallel"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("a,kernel_dim,kernel_canonical_hash\n"));
    assert_eq!(stdout(&a).lines().count(), 7);
}

#[test]
fn selfcheck_quick_passes() {
    let o = run(&["selfcheck", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["failures"], 0);
}

#[test]
fn selfcheck_names_corrupted_constraint() {
    for c in ["collapse-iminus", "kill-iplus"] {
        let o = run(&["selfcheck", "--corrupt-surrogate", c]);
        assert_eq!(o.status.code(), Some(1));
        let err = stderr(&o);
        assert!(err.contains("violated constraint"), "{err}");
        assert!(err.contains("-dim"), "{err}");
    }
}
