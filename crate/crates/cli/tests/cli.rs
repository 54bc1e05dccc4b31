use std::{
    fs,
    path::Path,
    process::{Command, Output},
};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aquamodem"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn aquamodem")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn sha(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

fn wav_samples(path: &Path) -> (u32, usize) {
    let r = hound::WavReader::open(path).unwrap();
    (r.spec().sample_rate, r.len() as usize)
}

#[test]
fn encode_decode_loopback() {
    let dir = TempDir::new().unwrap();
    for (mode, text) in [("cr3", "Ascend NOW,  low air!"), ("cr0", "ok")] {
        ok(dir.path(), &["encode", text, "--out", "m.wav", "--mode", mode]);
        let decoded = ok(dir.path(), &["decode", "m.wav"]);
        let expected = text.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
        assert_eq!(decoded.trim_end(), expected);
    }
}

#[test]
fn sos_duration_matches_frame_arithmetic() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["encode", "sos", "--out", "sos.wav"]);
    // 3 chars * 5 bits = 15 -> 4 Hamming(7,4) codewords = 28 bits -> 6 data symbols
    // plus 2 training symbols, 8 preamble and 12 header symbols; 768 samples each.
    let symbols = 8 + 12 + 6 + 2;
    let (fs, n) = wav_samples(&dir.path().join("sos.wav"));
    assert_eq!(fs, 48_000);
    assert!((n as i64 - symbols * 768).abs() <= 1, "{n} samples");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["encode", "", "--out", "e.wav"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["encode", "ok", "--out", "e.wav", "--sf", "0"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["decode", "missing.wav"]).status.code(), Some(3));

    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: 48_000,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(dir.path().join("silence.wav"), spec).unwrap();
    for _ in 0..48_000 {
        w.write_sample(0i16).unwrap();
    }
    w.finalize().unwrap();
    let out = run(dir.path(), &["decode", "silence.wav"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no packet"));

    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn decode_after_near_channel_reports_zero_ber() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["encode", "need air", "--out", "a.wav"]);
    ok(dir.path(), &["simulate", "a.wav", "--out", "b.wav", "--distance", "5", "--seed", "3"]);
    let out = run(dir.path(), &["decode", "b.wav", "--reference", "need air"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim_end(), "need air");
    assert!(String::from_utf8_lossy(&out.stderr).contains("ber 0.000000"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("c.toml"), "mode = \"cr0\"\nseed = 9\n").unwrap();
    ok(dir.path(), &["encode", "sos", "--out", "a.wav", "--config", "c.toml"]);
    ok(dir.path(), &["encode", "sos", "--out", "b.wav", "--config", "c.toml", "--mode", "cr3"]);
    let (_, a) = wav_samples(&dir.path().join("a.wav"));
    let (_, b) = wav_samples(&dir.path().join("b.wav"));
    // cr0: 15 bits -> 3 data symbols + 1 training.
    assert_eq!(a, (8 + 12 + 3 + 1) * 768);
    assert_eq!(b, (8 + 12 + 6 + 2) * 768);

    fs::write(dir.path().join("bad.toml"), "modulation = { sf = 5, colour = 1 }\n").unwrap();
    assert_eq!(run(dir.path(), &["encode", "sos", "--out", "c.wav", "--config", "bad.toml"]).status.code(), Some(1));
}

#[test]
fn seeded_commands_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(p, &["encode", "turn back now", "--out", "tx.wav"]);
    let runs: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (vec!["simulate", "tx.wav", "--out", "OUT.wav", "--seed", "5"], vec!["OUT.wav"]),
        (
            vec!["gen-corpus", "--ber-grid", "0:0.1:0.02", "--count", "60", "--seed", "5", "--out", "OUT.jsonl", "--audit", "OUT.csv"],
            vec!["OUT.jsonl", "OUT.csv", "OUT.json"],
        ),
        (
            vec!["distance-sweep", "--distances", "10,20", "--trials", "4", "--seed", "5", "--out", "OUT.csv"],
            vec!["OUT.csv", "OUT.json"],
        ),
    ];
    for (args, outputs) in runs {
        let mut hashes = Vec::new();
        for tag in ["a", "b"] {
            let args: Vec<String> = args.iter().map(|a| a.replace("OUT", tag)).collect();
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            ok(p, &refs);
            hashes.push(outputs.iter().map(|o| sha(&p.join(o.replace("OUT", tag)))).collect::<Vec<_>>());
        }
        assert_eq!(hashes[0], hashes[1], "{args:?}");
    }
}

#[test]
fn gen_corpus_then_evaluate() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("msgs.txt"), "safety\tascend now\nnavigation\tswim north\n").unwrap();
    ok(p, &["gen-corpus", "--messages", "msgs.txt", "--ber-grid", "0,0.05", "--per-message", "3", "--out", "c.jsonl"]);
    assert_eq!(fs::read_to_string(p.join("c.jsonl")).unwrap().lines().count(), 12);
    let summary = ok(p, &["evaluate", "--corpus", "c.jsonl", "--out", "e.csv", "--recoverer", "identity"]);
    assert!(summary.contains("over 12 records"));
    let csv = fs::read_to_string(p.join("e.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("0.0,6,1.0,1.0"));
}

#[test]
fn recover_and_context() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    assert_eq!(ok(p, &["recover", "ascemd nkw"]).trim_end(), "ascend now");
    assert_eq!(run(p, &["recover", "x", "--purpose", "bogus"]).status.code(), Some(1));

    fs::write(
        p.join("f.csv"),
        "depth,water_temp,tank_pressure,heart_rate,heading,ndl,dive_time,ascent_rate,battery\n\
         18,12,650,90,90,20,600,3,80\n",
    )
    .unwrap();
    let out = run(p, &["context", "--profile", "f.csv", "--purpose", "safety"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(text.starts_with("purpose: safety\n"), "{text}");
    assert!(text.contains("tank_pressure"), "{text}");
    assert_eq!(run(p, &["context", "--profile", "f.csv", "--frame", "4"]).status.code(), Some(1));
}
