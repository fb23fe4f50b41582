use std::path::PathBuf;

use amasnet::cli::run;

fn model(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "models", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn amasnet(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("amasnet").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn verify_prop1_on_tgc() {
    let (code, out, _) = amasnet(&["verify-prop1", &model("tgc.amas")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "isomorphic: true");
}

#[test]
fn dead_zero_transitions_are_listed() {
    let (code, out, _) = amasnet(&["liveness", &model("dead_zero.amas"), "--label", "0", "--all"]);
    assert_eq!(code, 0);
    let dead: Vec<&str> = out.lines().filter(|l| l.starts_with("dead ")).collect();
    assert_eq!(dead.len(), 2, "{out}");
    assert!(dead.iter().all(|l| l.contains("  0[")));
    assert!(out.contains("dead: 2 of 2"));

    let (code, _, _) = amasnet(&[
        "liveness",
        &model("dead_zero.amas"),
        "--label",
        "0",
        "--all",
        "--fail-on-dead",
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = amasnet(&["liveness", &model("tgc.amas"), "--all", "--fail-on-dead"]);
    assert_eq!(code, 0);
}

#[test]
fn single_transition_and_heuristics() {
    let id = "d[1:S.s1-d->S.s3]";
    for (h, via) in [("agents", "via b c d"), ("short", "via a d")] {
        let (code, out, err) = amasnet(&[
            "liveness",
            &model("two_paths.amas"),
            "--transition",
            id,
            "--heuristic",
            h,
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains(via), "{h}: {out}");
    }
    let (code, _, err) = amasnet(&["liveness", &model("two_paths.amas"), "--transition", "d[nope]"]);
    assert_eq!(code, 2);
    assert!(err.contains("no fused transition"));
}

#[test]
fn liveness_json_has_stable_keys() {
    let (code, out, _) = amasnet(&["liveness", &model("false_path.amas"), "--all", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["total"], 4);
    assert_eq!(v["dead"], 3);
    assert_eq!(v["heuristic"], "fewest-new-agents");
    let first = &v["verdicts"][0];
    for key in ["transition", "live", "witness", "explored"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--seed", "7", "--agents", "3", "--states", "4", "--labels", "5"];
    let (c1, a, _) = amasnet(&args);
    let (c2, b, _) = amasnet(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(a.matches("agent ").count(), 3);
    let (_, other, _) = amasnet(&["gen", "--seed", "8"]);
    assert_ne!(a, other);
}

#[test]
fn input_errors_exit_with_2() {
    let (code, _, err) = amasnet(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");

    let (code, _, err) = amasnet(&["mg", "/nonexistent/model.amas"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.amas");
    std::fs::write(&bad, "agent a\nstates x\ninit x\narc x go y\n").unwrap();
    let (code, _, err) = amasnet(&["compose", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");

    let (code, _, _) = amasnet(&["liveness", &model("tgc.amas")]);
    assert_eq!(code, 2);
    let (code, _, _) = amasnet(&["liveness", &model("tgc.amas"), "--all", "--heuristic", "best"]);
    assert_eq!(code, 2);
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = amasnet(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("liveness"));
}

#[test]
fn dot_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["iis", "synth", "compose", "mg"] {
        let path = dir.path().join(format!("{cmd}.dot"));
        let (code, _, err) = amasnet(&[cmd, &model("tgc.amas"), "--dot", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{cmd}: {err}");
        let dot = std::fs::read_to_string(&path).unwrap();
        assert!(dot.starts_with("digraph "), "{cmd}");
        assert_eq!(dot.matches('[').count(), dot.matches(']').count() , "{cmd}");
    }
}

#[test]
fn text_reports() {
    let (code, out, _) = amasnet(&["iis", &model("tgc.amas")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("states: "));

    let (code, out, _) = amasnet(&["mg", &model("two_paths.amas"), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["markings"].as_array().unwrap().len() > 1);

    let (code, out, _) = amasnet(&["regions", &model("dead_zero.amas"), "--agent", "B"]);
    assert_eq!(code, 0);
    assert!(out.contains("SSP fails"), "{out}");

    let (code, out, _) = amasnet(&["synth", &model("tgc.amas"), "--exact", "--agent", "controller"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = amasnet(&["synth", &model("dead_zero.amas"), "--exact", "--agent", "B"]);
    assert_eq!(code, 1);
    assert!(out.contains("synthesis failed"));
}
