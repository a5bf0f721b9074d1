mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiled-cubemap"))
        .args(args)
        .env_remove("TILED_CUBEMAP_CONFIG")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn no_arguments_prints_usage_and_exits_1() {
    let out = cli(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn help_and_version_exit_0() {
    let help = cli(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("simulate"));
    let version = cli(&["--version"]);
    assert_eq!(version.status.code(), Some(0));
    assert!(stdout(&version).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn priorities_front_facing() {
    let out = cli(&["priorities", "--layout", "tiled_cubemap_1", "--yaw", "0", "--hfov", "90"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "tile_id,priority");
    assert_eq!(rows.len(), 11);
    assert!(rows.contains(&"front_0,0"));
    assert!(rows.contains(&"front_1,0"));
    assert!(rows.contains(&"back_0,3"));
    assert!(rows.contains(&"top,1"));
}

#[test]
fn unknown_layout_is_a_data_error() {
    let out = cli(&["priorities", "--layout", "hexagon", "--yaw", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("hexagon"));
}

#[test]
fn adapt_rejects_non_monotone_manifest_with_row() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("rates_tc1.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    // line 6 of the file is chunk 0, front_0, level 4; drop its bitrate below level 3
    assert!(lines[5].starts_with("0,front_0,4,"));
    lines[5] = "0,front_0,4,1000,40.0".into();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, lines.join("\n")).unwrap();

    let out = cli(&[
        "adapt",
        "--rates",
        path(&bad),
        "--viewports",
        path(&fixture("viewports.csv")),
        "--bandwidth",
        "4e6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 6"), "{err}");
}

#[test]
fn adapt_writes_one_row_per_tile_and_chunk() {
    let out = cli(&[
        "adapt",
        "--rates",
        path(&fixture("rates_tc2.csv")),
        "--layout",
        "tiled_cubemap_2",
        "--viewports",
        path(&fixture("viewports.csv")),
        "--bandwidth",
        path(&fixture("bandwidth.csv")),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 1 + 4 * 18);
}

#[test]
fn oracle_flag_never_loses_utility() {
    let run = |oracle: bool| {
        let mut args = vec![
            "adapt",
            "--rates",
            fixture_str("rates_tc1.csv"),
            "--viewports",
            fixture_str("viewports.csv"),
            "--bandwidth",
            fixture_str("bandwidth.csv"),
        ];
        if oracle {
            args.push("--oracle");
        }
        let out = cli(&args);
        assert_eq!(out.status.code(), Some(0));
        let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
        let mut utility = std::collections::BTreeMap::new();
        for row in rdr.records() {
            let row = row.unwrap();
            utility.insert(row[0].to_string(), row[7].parse::<f64>().unwrap());
        }
        utility
    };
    let scan = run(false);
    let oracle = run(true);
    for (chunk, u) in &scan {
        assert!(oracle[chunk] >= *u, "chunk {chunk}");
    }
}

fn fixture_str(name: &str) -> &'static str {
    Box::leak(fixture(name).to_str().unwrap().to_string().into_boxed_str())
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    std::fs::write(&cfg, "# experiment\nlayout = tiled_cubemap_2\n").unwrap();

    let from_file = cli(&["--config", path(&cfg), "priorities", "--yaw", "0"]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    assert_eq!(stdout(&from_file).lines().count(), 19);

    let flag_wins = cli(&["--config", path(&cfg), "priorities", "--yaw", "0", "--layout", "tiled_cubemap_1"]);
    assert_eq!(stdout(&flag_wins).lines().count(), 11);

    let from_env = Command::new(env!("CARGO_BIN_EXE_tiled-cubemap"))
        .args(["priorities", "--yaw", "0"])
        .env("TILED_CUBEMAP_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(from_env.stdout).unwrap().lines().count(), 19);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let bad = cli(&["--config", path(&cfg), "priorities", "--yaw", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("colour"));
}

#[test]
fn ladder_round_trips_through_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rates.csv");
    let out = cli(&[
        "ladder",
        "--sweep",
        path(&fixture("rd_sweep_tc1.csv")),
        "--layout",
        "tiled_cubemap_1",
        "--out",
        path(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(out_path).unwrap(),
        std::fs::read_to_string(fixture("rates_tc1.csv")).unwrap()
    );
}

#[test]
fn siti_on_raw_file() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("seq.y");
    let (w, h) = (16usize, 12usize);
    let mut bytes = Vec::new();
    for n in 0..3 {
        for y in 0..h {
            for x in 0..w {
                bytes.push((x * 4 + y + n * 9) as u8);
            }
        }
    }
    std::fs::write(&raw, &bytes).unwrap();
    let out = cli(&["siti", "--input", path(&raw), "--width", "16", "--height", "12"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("tile,si,ti\nfull,"), "{text}");

    let wrong = cli(&["siti", "--input", path(&raw), "--width", "16", "--height", "12", "--frames", "4"]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn storage_reports_both_schemes() {
    let out = cli(&["storage", "--rates", path(&fixture("rates_tc1.csv"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("offset_cubemap,3600000000,3600"), "{text}");
    assert!(text.contains("tiled_cubemap,"));
    assert!(text.contains("# offset_versions=90"));
    assert!(text.contains("# savings_percent="));
}
