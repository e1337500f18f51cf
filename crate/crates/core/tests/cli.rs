use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use upg::ct::load_ct;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn upg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upg")).args(args).output().expect("spawn upg")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Writes `text` into the test scratch directory.
fn scratch(name: &str, text: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Compares with a golden file; `UPG_BLESS=1` rewrites it.
fn golden(name: &str, got: &str) {
    let p = data("golden").join(name);
    if std::env::var_os("UPG_BLESS").is_some() {
        std::fs::write(&p, got).unwrap();
    }
    let want = std::fs::read_to_string(&p).unwrap_or_else(|_| panic!("missing golden file {}", p.display()));
    assert_eq!(got, want, "output differs from {}", p.display());
}

#[test]
fn validate_shipped_examples() {
    for f in ["running.ct", "running_relabeled.ct", "fixed_edge.ct", "rank3.ct"] {
        let o = upg(&["validate", path(&data(f))]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o), "valid\n");
    }
}

#[test]
fn validate_corrupted_image() {
    let text = std::fs::read_to_string(data("running.ct")).unwrap().replace("image=qc", "image=cq");
    let o = upg(&["validate", path(&scratch("corrupt_image.ct", &text))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn validate_missing_degree() {
    let text = std::fs::read_to_string(data("running.ct")).unwrap().replace(" degree=1", "");
    let o = upg(&["validate", path(&scratch("missing_degree.ct", &text))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree"));
}

#[test]
fn invariants_match_golden() {
    let f = data("running.ct");
    let text = upg(&["invariants", path(&f), "--chain", "c,d,e,q", "--depth", "12"]);
    assert!(text.status.success());
    golden("running_invariants.txt", &stdout(&text));
    let json = upg(&["invariants", path(&f), "--chain", "c,d,e,q", "--depth", "12", "--json"]);
    assert!(json.status.success());
    golden("running_invariants.json", &stdout(&json));
    let fx = upg(&["invariants", path(&data("fixed_edge.ct")), "--special-complement", "e", "--depth", "12"]);
    assert!(fx.status.success());
    golden("fixed_edge_invariants.txt", &stdout(&fx));
}

#[test]
fn json_and_text_carry_the_same_lines() {
    let f = data("running.ct");
    let text = stdout(&upg(&["invariants", path(&f)]));
    let json: serde_json::Value = serde_json::from_str(&stdout(&upg(&["invariants", path(&f), "--json"]))).unwrap();
    let mut rebuilt = String::new();
    for s in json["sections"].as_array().unwrap() {
        rebuilt.push_str(&format!("== {} ==\n", s["name"].as_str().unwrap()));
        for l in s["lines"].as_array().unwrap() {
            rebuilt.push_str(l.as_str().unwrap());
            rebuilt.push('\n');
        }
    }
    assert_eq!(rebuilt, text);
}

#[test]
fn repeated_runs_are_identical() {
    let f = data("running.ct");
    let a = upg(&["invariants", path(&f), "--json"]);
    let b = upg(&["invariants", path(&f), "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn depth_changes_only_rays() {
    let f = data("running.ct");
    let a = stdout(&upg(&["invariants", path(&f), "--depth", "3"]));
    let b = stdout(&upg(&["invariants", path(&f), "--depth", "30"]));
    let digest = |s: &str| s.lines().skip_while(|l| *l != "== I_c digest ==").nth(1).unwrap().to_string();
    assert_eq!(digest(&a), digest(&b));
    let diff: Vec<(&str, &str)> = a.lines().zip(b.lines()).filter(|(x, y)| x != y).collect();
    assert!(!diff.is_empty());
    assert!(diff.iter().all(|(x, _)| x.starts_with("R_")));
}

#[test]
fn invalid_chain_order_is_usage_error() {
    let o = upg(&["invariants", path(&data("running.ct")), "--chain", "q,c,d,e"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid total order"));
    assert_eq!(upg(&["invariants"]).status.code(), Some(2));
}

#[test]
fn fixed_edge_complement_not_special() {
    let o = upg(&["invariants", path(&data("fixed_edge.ct")), "--special-complement", "e", "--special", "a b e c d f g"]);
    let s = stdout(&o);
    assert!(s.contains("complement of e: not special"), "{s}");
    assert!(s.contains("subgraph a b e c d f g: special"), "{s}");
}

#[test]
fn compare_outcomes() {
    let r = data("running.ct");
    let same = stdout(&upg(&["compare", path(&r), path(&r)]));
    assert!(same.ends_with("indistinguishable\n"), "{same}");
    let relabeled = stdout(&upg(&["compare", path(&r), path(&data("running_relabeled.ct"))]));
    assert!(relabeled.ends_with("indistinguishable\n"), "{relabeled}");
    assert!(relabeled.contains("one Whitehead orbit"));
    let fx = stdout(&upg(&["compare", path(&r), path(&data("fixed_edge.ct"))]));
    assert!(fx.ends_with("distinguished at chain\n"), "{fx}");
    let ordered = upg(&["compare", path(&r), path(&data("running_relabeled.ct")), "--chainA", "c,d,e,q", "--chainB", "h,i,j,l"]);
    assert!(stdout(&ordered).ends_with("indistinguishable\n"));
}

#[test]
fn verify_powers_and_failure() {
    let r = data("running.ct");
    let ct = load_ct(&std::fs::read_to_string(&r).unwrap()).unwrap();
    let phi = upg::verify::OuterAuto::new(ct.automorphism()).unwrap();
    for k in 0..=2 {
        let theta = phi.pow(k).to_string();
        let o = upg(&["verify", path(&r), path(&r), "--theta", &theta]);
        assert_eq!(o.status.code(), Some(0));
        let s = stdout(&o);
        assert!(s.starts_with("YES\n"));
        if k > 0 {
            assert_eq!(s.lines().filter(|l| l.starts_with("[x]")).count(), 7, "{s}");
        }
    }
    let o = upg(&["verify", path(&r), path(&r), "--theta", "a -> b; b -> a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NO\n"));
}

#[test]
fn verify_reports_clause_of_parse_error() {
    let r = data("running.ct");
    let file = scratch("theta.txt", "a -> a\nb = ba\n");
    let at = format!("@{}", path(&file));
    let o = upg(&["verify", path(&r), path(&r), "--theta", &at]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("clause 2"));
}
