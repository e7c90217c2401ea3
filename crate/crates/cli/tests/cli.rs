use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn gradient(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradient"))
        .args(args)
        .env_remove("GRADIENT_CLASSIFIER_URL")
        .env_remove("GRADIENT_GENERATOR_URL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_out(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_jsonl(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn suggest_lists_annoyance_before_neutral() {
    let o = gradient(&["graph", "suggest", "anger"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let annoyance = out.find("annoyance").unwrap();
    let neutral = out.find("neutral").unwrap();
    assert!(annoyance < neutral, "{out}");

    let j = json_out(&gradient(&["graph", "suggest", "2", "--json"]));
    assert_eq!(j["source"], "anger");
    assert_eq!(j["suggestions"].as_array().unwrap().len(), 4);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = gradient(&["frobnicate"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("Usage"));
    let o = gradient(&["graph", "suggest", "anger", "--bogus-flag"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn every_subcommand_has_help() {
    let paths: &[&[&str]] = &[
        &[],
        &["corpus"],
        &["corpus", "ingest"],
        &["corpus", "label"],
        &["corpus", "filter"],
        &["corpus", "split"],
        &["corpus", "restrict"],
        &["corpus", "stats"],
        &["corpus", "merge"],
        &["graph"],
        &["graph", "export"],
        &["graph", "validate"],
        &["graph", "suggest"],
        &["paraphrase"],
        &["metrics"],
        &["metrics", "score"],
        &["evaluate"],
        &["serve"],
    ];
    for path in paths {
        let mut args = path.to_vec();
        args.push("--help");
        let o = gradient(&args);
        assert_eq!(code(&o), 0, "{args:?}");
        assert!(stdout(&o).contains("Usage"), "{args:?}");
    }
}

#[test]
fn no_color_help_has_no_escapes() {
    let o = Command::new(env!("CARGO_BIN_EXE_gradient"))
        .arg("--help")
        .env("NO_COLOR", "1")
        .output()
        .unwrap();
    assert!(!stdout(&o).contains('\u{1b}'));
}

#[test]
fn seed_is_always_printed() {
    let o = gradient(&["graph", "suggest", "joy"]);
    assert!(stderr(&o).contains("seed: 42"));
    let o = gradient(&["--seed", "7", "graph", "suggest", "joy"]);
    assert!(stderr(&o).contains("seed: 7"));
}

#[test]
fn config_file_supplies_defaults_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, "seed = 9\n").unwrap();
    let o = gradient(&["--config", p(&good), "graph", "suggest", "joy"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("seed: 9"));
    let o = gradient(&["--config", p(&good), "--seed", "3", "graph", "suggest", "joy"]);
    assert!(stderr(&o).contains("seed: 3"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "colour = true\n").unwrap();
    assert_eq!(code(&gradient(&["--config", p(&bad), "graph", "suggest", "joy"])), 1);
}

#[test]
fn graph_export_validates_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graph.json");
    assert_eq!(code(&gradient(&["graph", "export", "--out", p(&path)])), 0);
    let j = json_out(&gradient(&["graph", "validate", p(&path)]));
    assert_eq!(j["nodes"], 28);
    assert_eq!(j["edges"], 53);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"edges": [["anger", "joy"]]}"#).unwrap();
    let o = gradient(&["graph", "validate", p(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cross-cluster"), "{}", stderr(&o));
}

#[test]
fn paraphrase_with_echo_and_classified_source() {
    let j = json_out(&gradient(&[
        "paraphrase",
        "--text",
        "I am furious",
        "--target",
        "annoyance",
    ]));
    assert_eq!(j["source"], "anger");
    assert_eq!(j["prefix"], "2 to 3: I am furious");
    assert_eq!(j["output"], "I am furious");
    assert_eq!(j["graph_valid"], true);

    let o = gradient(&["paraphrase", "--text", "hi", "--source", "joy", "--target", "serene"]);
    assert_eq!(code(&o), 1);
}

fn write_twitter_corpus(dir: &Path) -> PathBuf {
    let rows = [
        "i am furious about this\ti am annoyed about this\t(4, 5)",
        "what a lovely day\twhat a nice day\t(1, 5)",
        "this is awful news\tthis is sad news\t0.9",
        "this is awful stuff\tthat is awful stuff\t0.7",
        "okay then\tfine then\t0.95",
        "i am furious now\ti am angry now\t(3, 4)",
    ];
    let path = dir.join("twitter.tsv");
    fs::write(&path, rows.join("\n") + "\n").unwrap();
    path
}

fn write_fixed_table(dir: &Path) -> PathBuf {
    let table = serde_json::json!({
        "i am furious about this": {"anger": 0.9},
        "i am annoyed about this": {"annoyance": 0.8},
        "what a lovely day": {"joy": 0.8},
        "what a nice day": {"joy": 0.6},
        "this is awful news": {"disgust": 0.7},
        "this is sad news": {"sadness": 0.9},
        "okay then": {"neutral": 0.9},
        "fine then": {"neutral": 0.8},
        "i am furious now": {"anger": 0.9},
        "i am angry now": {"anger": 0.7}
    });
    let path = dir.join("fixed.json");
    fs::write(&path, table.to_string()).unwrap();
    path
}

#[test]
fn corpus_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let raw = write_twitter_corpus(d);
    let table = write_fixed_table(d);
    let ingested = d.join("ingested.jsonl");
    let labeled = d.join("labeled.jsonl");
    let kept = d.join("kept.jsonl");

    let j = json_out(&gradient(&[
        "corpus", "ingest", "--format", "twitter-url", "--input", p(&raw), "--out", p(&ingested),
    ]));
    assert_eq!(j["records"], 6);

    let classifier = format!("fixed:{}", p(&table));
    let j = json_out(&gradient(&[
        "corpus", "label", "--input", p(&ingested), "--classifier", &classifier, "--out", p(&labeled),
    ]));
    assert_eq!(j["records"], 6);
    // "this is awful stuff" has no table entry
    assert_eq!(j["without_dominant_emotion"], 1);

    let stats = json_out(&gradient(&[
        "corpus", "filter", "--input", p(&labeled), "--pwi-threshold", "0.825", "--out", p(&kept),
    ]));
    assert_eq!(stats["input_count"], 6);
    assert_eq!(stats["dropped_rater_minority"], 1);
    assert_eq!(stats["dropped_pwi"], 1);
    assert_eq!(stats["dropped_neutral_neutral"], 1);
    assert_eq!(stats["dropped_matching_emotion"], 1);
    assert_eq!(stats["kept_count"], 2);
    let survivors: Vec<String> = read_jsonl(&kept)
        .iter()
        .map(|r| r["source"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(survivors, ["i am furious about this", "this is awful news"]);

    // Records to stdout, summary to stderr.
    let o = gradient(&["corpus", "filter", "--input", p(&kept), "--pwi-threshold", "0.825"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(stderr(&o).contains("\"kept_count\":2"));

    let restricted = d.join("restricted.jsonl");
    let j = json_out(&gradient(&[
        "corpus", "restrict", "--input", p(&kept), "--out", p(&restricted),
    ]));
    // anger -> annoyance is an edge; disgust -> sadness crosses clusters
    assert_eq!(j["kept"], 1);
    assert_eq!(j["fraction"], 0.5);

    let j = json_out(&gradient(&["corpus", "stats", "--input", p(&kept)]));
    assert_eq!(j["total"], 2);
    assert_eq!(j["graph_valid"], 1);

    let merged = d.join("merged.jsonl");
    let j = json_out(&gradient(&[
        "corpus", "merge", "-i", p(&kept), "-i", p(&labeled), "--out", p(&merged),
    ]));
    assert_eq!(j["records"], 6);
    assert_eq!(j["duplicates_dropped"], 2);
}

#[test]
fn split_is_seeded_and_swappable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let input = d.join("in.jsonl");
    let lines: Vec<String> = (0..20)
        .map(|i| serde_json::json!({"id": format!("r{i}"), "source": format!("s{i}"), "target": format!("t{i}")}).to_string())
        .collect();
    fs::write(&input, lines.join("\n") + "\n").unwrap();

    let run = |seed: &str, tag: &str, swap: bool| {
        let train = d.join(format!("train-{tag}.jsonl"));
        let test = d.join(format!("test-{tag}.jsonl"));
        let mut args = vec![
            "--seed", seed, "corpus", "split", "--input", p(&input), "--ratio", "0.75",
            "--train-out", p(&train), "--test-out", p(&test),
        ];
        if swap {
            args.push("--swap");
        }
        let j = json_out(&gradient(&args));
        (j, fs::read(&train).unwrap(), fs::read(&test).unwrap())
    };
    let (j, train_a, test_a) = run("5", "a", false);
    assert_eq!((j["train"].as_u64(), j["test"].as_u64()), (Some(15), Some(5)));
    let (_, train_b, test_b) = run("5", "b", false);
    assert_eq!((train_a.clone(), test_a.clone()), (train_b, test_b));
    let (j, train_s, test_s) = run("5", "s", true);
    assert_eq!(j["train"], 5);
    assert_eq!((train_s, test_s), (test_a, train_a));

    let o = gradient(&[
        "corpus", "split", "--input", p(&input), "--ratio", "1.5",
        "--train-out", p(&d.join("x")), "--test-out", p(&d.join("y")),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn metrics_score_emits_seven_values() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.jsonl");
    let refs = dir.path().join("ref.jsonl");
    fs::write(
        &pred,
        concat!(
            r#"{"id": "a", "hypothesis": "the cat sat on the mat", "pred_emotion": "annoyance"}"#,
            "\n",
            r#"{"id": "b", "hypothesis": "the cat", "pred_emotion": 3}"#,
            "\n"
        ),
    )
    .unwrap();
    fs::write(
        &refs,
        concat!(
            r#"{"id": "b", "reference": "the cat sat", "target_emotion": "anger"}"#,
            "\n",
            r#"{"id": "a", "reference": "the cat sat on the mat", "target_emotion": "annoyance"}"#,
            "\n"
        ),
    )
    .unwrap();
    let j = json_out(&gradient(&[
        "metrics", "score", "--pred", p(&pred), "--ref", p(&refs), "--emotions",
    ]));
    let names: Vec<&str> = j["metrics"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["exact_match", "bleu", "gleu", "rouge1", "rouge2", "rougeL", "meteor"]);
    assert_eq!(j["metrics"][0]["value"], 0.5);
    // ROUGE-1 per pair: 1.0 and 0.8
    assert!((j["metrics"][3]["value"].as_f64().unwrap() - 0.9).abs() < 1e-12);

    let j = json_out(&gradient(&["metrics", "score", "--pred", p(&pred), "--ref", p(&refs)]));
    assert_eq!(j["metrics"].as_array().unwrap().len(), 6);

    let o = gradient(&["metrics", "score", "--pred", p(&pred)]);
    assert_eq!(code(&o), 2);
}

fn write_labeled_dataset(dir: &Path) -> (PathBuf, PathBuf) {
    let rows = [
        ("p1", "i am furious about this", "i am annoyed about this", "anger", "annoyance"),
        ("p2", "this is awful news", "this is sad news", "disgust", "sadness"),
        ("p3", "i am furious now", "i am annoyed now", "anger", "annoyance"),
    ];
    let lines: Vec<String> = rows
        .iter()
        .map(|(id, s, t, se, te)| {
            serde_json::json!({
                "id": id, "source": s, "target": t,
                "source_emotion": {"emotion": se, "score": 0.9},
                "target_emotion": {"emotion": te, "score": 0.9},
            })
            .to_string()
        })
        .collect();
    let data = dir.join("data.jsonl");
    fs::write(&data, lines.join("\n") + "\n").unwrap();
    let table = serde_json::json!({
        "i am annoyed about this": {"annoyance": 0.8},
        "this is sad news": {"sadness": 0.9},
        "i am annoyed now": {"annoyance": 0.7},
    });
    let fixed = dir.join("fixed.json");
    fs::write(&fixed, table.to_string()).unwrap();
    (data, fixed)
}

#[test]
fn evaluate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (data, fixed) = write_labeled_dataset(dir.path());
    let classifier = format!("fixed:{}", p(&fixed));
    let mut csvs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = gradient(&[
            "--seed", "42", "evaluate", "--dataset", p(&data), "--model-name", "oracle",
            "--dataset-name", "mix", "--generator", "oracle", "--classifier", &classifier,
            "--out", p(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(stdout(&o).contains("exact_match"));
        for f in ["report.csv", "report.json", "report.txt", "cache.jsonl"] {
            assert!(out.join(f).exists(), "{f}");
        }
        csvs.push(fs::read(out.join("report.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let csv = String::from_utf8(csvs[0].clone()).unwrap();
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.contains("exact_match,oracle,mix,false,1\n"), "{csv}");

    // A second, restricted run lands in the same report.
    let out = dir.path().join("a");
    let o = gradient(&[
        "evaluate", "--dataset", p(&data), "--model-name", "oracle", "--dataset-name", "mix",
        "--generator", "oracle", "--classifier", &classifier, "--restricted", "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 2);
    assert_eq!(report["runs"][1]["pair_count"], 2);
}

#[test]
fn evaluate_reports_backend_failures_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = write_labeled_dataset(dir.path());
    let o = gradient(&[
        "evaluate", "--dataset", p(&data), "--model-name", "m", "--generator",
        "remote:http://127.0.0.1:9", "--out", p(&dir.path().join("r")), "--no-cache",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("0 of 3 pairs completed"), "{}", stderr(&o));
}

#[test]
fn remote_urls_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = write_labeled_dataset(dir.path());
    let o = gradient(&["corpus", "label", "--input", p(&data), "--classifier", "remote"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("GRADIENT_CLASSIFIER_URL"));

    let o = Command::new(env!("CARGO_BIN_EXE_gradient"))
        .args(["corpus", "label", "--input", p(&data), "--classifier", "remote"])
        .env("GRADIENT_CLASSIFIER_URL", "http://127.0.0.1:9")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn data_and_usage_errors_are_distinguished() {
    let o = gradient(&["corpus", "stats", "--input", "/nonexistent/file.jsonl"]);
    assert_eq!(code(&o), 2);
    let o = gradient(&[
        "paraphrase", "--text", "hi", "--source", "joy", "--target", "neutral", "--threshold", "1.5",
        "--generator", "echo",
    ]);
    assert_eq!(code(&o), 0, "threshold unused when the source is given");
    let o = gradient(&["paraphrase", "--text", "hi", "--target", "neutral", "--threshold", "1.5"]);
    assert_eq!(code(&o), 1);
    let o = gradient(&["paraphrase", "--text", "hi", "--target", "neutral", "--generator", "magic"]);
    assert_eq!(code(&o), 1);
}
