use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spanchance"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn conll_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const TWO_COLUMN: &str = "\
EU B-ORG B-ORG
rejects O O
German B-MISC B-MISC
call O O
to O O
boycott O B-MISC
British B-MISC I-MISC
lamb O O
. O O

Peter B-PER B-PER
Blackburn I-PER O
";

#[test]
fn agree_inline_matches_reference_values() {
    let out = run(&["agree", "-n", "20", "--spans1", "4:2,9:3,15:4", "--spans2", "3:3,9:4,15:5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["observed_f1"].as_f64().unwrap() - 0.857143).abs() < 1e-6);
    assert!((v["chance_f1"].as_f64().unwrap() - 0.5335).abs() < 5e-4);
    assert!((v["corrected_f1"].as_f64().unwrap() - 0.6938).abs() < 5e-4);
    assert_eq!(v["model"], "non-overlapping");
    assert_eq!(v["config"]["seed"], 1);
    assert!(v["per_type"].as_object().unwrap().is_empty());
}

#[test]
fn agree_csv_has_header_and_one_row() {
    let out = run(&["agree", "-n", "20", "--spans1", "4:2", "--spans2", "5:2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "observed_f1,chance_f1,corrected_f1,difficulty,model,mode,scope,runtime_seconds");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0.500000,"));
    assert!(lines[1].contains(",overall,"));
}

#[test]
fn agree_on_two_columns_of_one_file() {
    let f = conll_file(TWO_COLUMN);
    let path = f.path().to_str().unwrap();
    let out = run(&["agree", "--gold", path, "--gold-column", "1", "--system-column", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let per_type = v["per_type"].as_object().unwrap();
    assert_eq!(per_type.keys().collect::<Vec<_>>(), ["MISC", "ORG", "PER"]);
    assert_eq!(per_type["ORG"]["observed_f1"], 1.0);
    // Gold and system each cover 5 tokens, 4 of them shared.
    assert!((v["observed_f1"].as_f64().unwrap() - 0.8).abs() < 1e-6);
}

#[test]
fn agree_reads_gold_from_stdin() {
    let mut child = bin()
        .args(["agree", "--gold", "-", "--gold-column", "1", "--system-column", "2", "--format", "csv"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(TWO_COLUMN.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn agree_with_separate_system_file() {
    let gold = conll_file("a B-X\nb I-X\nc O\nd O\n");
    let system = conll_file("a O\nb B-X\nc I-X\nd O\n");
    let out = run(&[
        "agree",
        "--gold",
        gold.path().to_str().unwrap(),
        "--system",
        system.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!((json(&out)["observed_f1"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn misaligned_corpora_are_data_errors() {
    let gold = conll_file("a B-X\nb O\n");
    let system = conll_file("a B-X\nb O\nc O\n");
    let out = run(&[
        "agree",
        "--gold",
        gold.path().to_str().unwrap(),
        "--system",
        system.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unscored_corpus_csv_is_header_only() {
    let f = conll_file("a O\nb O\n");
    let out = run(&["agree", "--gold", f.path().to_str().unwrap(), "--system-column", "1", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn strict_rejects_dangling_inside() {
    let f = conll_file("a I-X\nb O\n");
    let path = f.path().to_str().unwrap();
    assert!(run(&["agree", "--gold", path, "--system-column", "1"]).status.success());
    let out = run(&["agree", "--gold", path, "--system-column", "1", "--strict"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn distribution_reports_normalized_probabilities() {
    let out = run(&["distribution", "-n", "40", "-l", "1,5,10,15", "-i", "1", "--no-approx"]);
    assert!(out.status.success());
    let v = json(&out);
    let seg = &v["segments"][0];
    let probs: Vec<f64> = seg["probabilities"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).collect();
    assert_eq!(probs.len(), 40);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(seg["mode"], "exact");
}

#[test]
fn distribution_csv_rows_cover_support() {
    let out = run(&["distribution", "-n", "10", "-l", "2,3", "--format", "csv"]);
    assert!(out.status.success());
    // Header plus 9 starts for the first segment and 8 for the second.
    assert_eq!(stdout(&out).lines().count(), 1 + 9 + 8);
}

#[test]
fn distribution_rejects_infeasible_profile() {
    let out = run(&["distribution", "-n", "5", "-l", "3,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn difficulty_of_profile_pairs() {
    let out = run(&["difficulty", "-n", "20", "-l", "2,3,4", "-l", "3,4,5"]);
    assert!(out.status.success());
    let d = json(&out)["difficulty"].as_f64().unwrap();
    assert!((d - 0.4606).abs() < 5e-4, "{d}");
}

#[test]
fn difficulty_of_gold_corpus() {
    let f = conll_file("a B-X\nb I-X\nc O\nd O\ne O\n");
    let out = run(&["difficulty", "--gold", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["observed_f1"].is_null());
    let d = v["difficulty"].as_f64().unwrap();
    assert!(d > 0.0 && d < 1.0);
    assert_eq!(v["per_type"]["X"]["difficulty"], v["difficulty"]);
}

#[test]
fn fixed_gold_reading_changes_difficulty() {
    let base = ["agree", "-n", "10", "--spans1", "1:3", "--spans2", "1:3"];
    let sym = json(&run(&base))["difficulty"].as_f64().unwrap();
    let mut args = base.to_vec();
    args.extend(["--difficulty-reading", "fixed-gold"]);
    let fixed = json(&run(&args))["difficulty"].as_f64().unwrap();
    assert!(sym > 0.0 && fixed > 0.0);
    assert!((sym - fixed).abs() > 1e-6);
}

#[test]
fn partition_splits_by_chance_level() {
    // A 3-span in 4 tokens is easy by chance; a 1-span in 10 tokens is hard.
    let f = conll_file("a B-X\nb I-X\nc I-X\nd O\n\na O\nb O\nc O\nd O\ne B-X\nf O\ng O\nh O\ni O\nj O\n\nx O\n");
    let out = run(&["partition", "--gold", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["subset1"], serde_json::json!([0, 2]));
    assert_eq!(v["subset2"], serde_json::json!([1]));
    assert_eq!(v["threshold"], 0.825);
}

#[test]
fn validate_is_deterministic_and_agrees() {
    let args = ["validate", "-n", "11", "--l1", "2,3", "--l2", "4,1", "--samples", "5000", "--seed", "9"];
    let first = run(&args);
    assert!(first.status.success());
    let v = json(&first);
    assert_eq!(v["agrees"], true);
    assert!(v["analytic_minus_enumerated"].as_f64().unwrap().abs() <= 1e-9);
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "3"]);
    let second = run(&with_jobs);
    // Only the echoed job count may differ.
    let strip = |o: &Output| {
        let mut v = json(o);
        v["config"]["jobs"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&first), strip(&second));
    assert_eq!(stdout(&first), stdout(&run(&args)));
}

#[test]
fn validate_skips_enumeration_over_budget() {
    let out = run(&["validate", "-n", "30", "--l1", "2,2,2", "--l2", "3,3", "--samples", "1000", "--budget", "10"]);
    assert!(out.status.success());
    assert!(json(&out)["enumerated"].is_null());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["agree", "-n", "5", "--spans1", "1:1", "--spans2", "2:1", "--alpha", "0"]).status.code(), Some(1));
    assert_eq!(run(&["agree", "-n", "5", "--spans1", "x", "--spans2", "2:1"]).status.code(), Some(1));
    assert_eq!(run(&["distribution", "-n", "5"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn overlapping_spans_are_data_errors() {
    let out = run(&["agree", "-n", "10", "--spans1", "1:3,2:2", "--spans2", "5:1"]);
    assert_eq!(out.status.code(), Some(2));
}
