use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netprox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netprox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = netprox(args);
    assert!(
        out.status.success(),
        "netprox {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_cluster_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("g");
    ok(&[
        "generate",
        "--mu",
        "0.1",
        "--seed",
        "4",
        "--out",
        p(&prefix),
    ]);
    let edges = dir.path().join("g.edges");
    let truth = dir.path().join("g.truth");
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(meta["params"]["n"], 300);
    let k = fs::read_to_string(&truth)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
        .collect::<std::collections::HashSet<_>>()
        .len();

    let pred = dir.path().join("pred");
    ok(&[
        "cluster",
        "--graph",
        p(&edges),
        "--measure",
        "Forest",
        "--alpha",
        "1.0",
        "--method",
        "spectral",
        "--k",
        &k.to_string(),
        "--seed",
        "1",
        "--out",
        p(&pred),
    ]);
    let report = ok(&["evaluate", "--pred", p(&pred), "--truth", p(&truth)]);
    let ari: f64 = report
        .lines()
        .next()
        .unwrap()
        .strip_prefix("ARI ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(ari > 0.5, "{report}");
    assert!(report.lines().nth(1).unwrap().starts_with("RI "));

    let ward = ok(&[
        "cluster",
        "--graph",
        p(&edges),
        "--measure",
        "Walk",
        "--alpha",
        "0.5",
        "--relative-alpha",
        "--method",
        "ward",
        "--k",
        &k.to_string(),
    ]);
    assert_eq!(ward.lines().count(), 300);
}

#[test]
fn evaluate_identical_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    fs::write(&a, "0 0\n1 0\n2 1\n3 1\n").unwrap();
    fs::write(&b, "0 x\n1 x\n2 y\n3 y\n").unwrap();
    let report = ok(&["evaluate", "--pred", p(&a), "--truth", p(&b)]);
    assert_eq!(report, "ARI 1.000000\nRI 1.000000\n");
}

#[test]
fn labelled_edge_lists_keep_labels() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    fs::write(&g, "a b\nb c\nc a\nd e\ne f\nf d\nc d\n").unwrap();
    let out = ok(&[
        "cluster",
        "--graph",
        p(&g),
        "--measure",
        "Heat",
        "--alpha",
        "1",
        "--method",
        "ward",
        "--k",
        "2",
    ]);
    assert_eq!(out.lines().next().unwrap(), "0 0 a");
    assert_eq!(out.lines().nth(5).unwrap(), "5 1 f");
}

#[test]
fn sweep_writes_csv_metadata_and_svg_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.conf");
    fs::write(
        &config,
        "# small mu sweep\nn = 120\ncmin = 30\ncmax = 60\nvary = mu\nvalues = 0.1, 0.3\n\
         measures = Walk, Comm, PageRank\nmethods = Spectral\nreplicates = 2\nalpha_points = 3\n",
    )
    .unwrap();
    let run = |name: &str, seed: Option<&str>| {
        let csv = dir.path().join(name);
        let svg = dir.path().join(format!("{name}.svg"));
        let mut args = vec![
            "sweep",
            "--config",
            p(&config),
            "--out",
            p(&csv),
            "--svg",
            p(&svg),
            "--quiet",
        ];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        ok(&args);
        (
            fs::read_to_string(&csv).unwrap(),
            fs::read_to_string(svg).unwrap(),
        )
    };
    let (a, svg) = run("a.csv", None);
    let (b, _) = run("b.csv", None);
    assert_eq!(a, b);
    assert!(a.starts_with("measure,method,vary,value,best_alpha,ari_mean,ari_std,replicates_used,skipped,avg_clusters\n"));
    assert_eq!(a.lines().count(), 7);
    assert!(svg.starts_with("<svg") && svg.contains("Walk = Comm (Spectral)"));
    let meta = fs::read_to_string(dir.path().join("a.csv.meta.json")).unwrap();
    assert!(meta.contains("Spectral Comm=Walk"));

    let (c, _) = run("c.csv", Some("12345"));
    assert_ne!(a, c);

    let plot = dir.path().join("plot.svg");
    ok(&[
        "plot",
        "--csv",
        p(&dir.path().join("a.csv")),
        "--out",
        p(&plot),
        "--title",
        "mu <sweep>",
    ]);
    let drawn = fs::read_to_string(plot).unwrap();
    assert_eq!(drawn.matches("<polyline").count(), 2);
    assert!(drawn.contains("mu &lt;sweep&gt;"));
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "replicates = 2\nflavour = strange\n").unwrap();
    let out = netprox(&[
        "sweep",
        "--config",
        p(&config),
        "--out",
        p(&dir.path().join("x.csv")),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("flavour"), "{err}");
}

#[test]
fn invalid_alpha_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g");
    fs::write(&g, "0 1\n1 2\n").unwrap();
    let out = netprox(&[
        "cluster",
        "--graph",
        p(&g),
        "--measure",
        "PageRank",
        "--alpha",
        "1.5",
        "--method",
        "spectral",
        "--k",
        "2",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}
