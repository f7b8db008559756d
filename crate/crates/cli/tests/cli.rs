mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Duration;

use voxsync::bench::{self, run_bench, BenchSpec};
use voxsync::prep::{prep, ManifestRow, PrepOptions};
use voxsync_core::dsp::{read_f32_le, FeatureSidecar, TokenProsody, Waveform};
use voxsync_core::synth::Backend;
use voxsync_core::wav::encode_wav;

const BIN: &str = env!("CARGO_BIN_EXE_voxsync");

fn tone(secs: f64, sample_rate: u32) -> Waveform {
    let n = (secs * sample_rate as f64).round() as usize;
    Waveform::new(
        (0..n).map(|i| (0.5 * (2.0 * PI * 220.0 * i as f64 / sample_rate as f64).sin()) as f32).collect(),
        sample_rate,
    )
    .unwrap()
}

fn write(dir: &Path, id: &str, wave: &Waveform) {
    std::fs::write(dir.join(format!("{id}.wav")), encode_wav(wave)).unwrap();
}

fn corpus(root: &Path) -> PrepOptions {
    let wavs = root.join("wavs");
    std::fs::create_dir_all(&wavs).unwrap();
    write(&wavs, "a_tone", &tone(1.0, 24_000));
    write(&wavs, "b_long", &tone(41.0, 24_000));
    write(&wavs, "c_silent", &Waveform::silence(24_000, 24_000));
    write(&wavs, "d_16k", &tone(1.0, 16_000));
    std::fs::write(wavs.join("e_garbage.wav"), b"RIFF nope").unwrap();
    std::fs::write(
        root.join("transcript.tsv"),
        "# id\ttext\na_tone\tGuten Tag.\nb_long\tA long one.\nc_silent\tNothing.\nd_16k\tWrong rate.\n\
         e_garbage\tBroken.\nf_missing\tGone.\n../escape\tNo.\n",
    )
    .unwrap();
    std::fs::write(root.join("durations.tsv"), "a_tone\t20 40 21\n").unwrap();
    PrepOptions {
        in_dir: wavs,
        transcript: root.join("transcript.tsv"),
        out_dir: root.join("out"),
        durations: Some(root.join("durations.tsv")),
        jobs: 2,
    }
}

fn reason(rows: &[ManifestRow], id: &str) -> Option<String> {
    rows.iter().find(|r| r.id == id).unwrap().reason.clone()
}

#[test]
fn prep_accepts_rejects_and_writes_features() {
    let dir = tempfile::tempdir().unwrap();
    let opts = corpus(dir.path());
    let report = prep(&opts).unwrap();
    let ids: Vec<&str> = report.rows.iter().map(|r| r.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    assert_eq!(report.accepted(), 1);
    assert_eq!(reason(&report.rows, "a_tone"), None);
    assert_eq!(reason(&report.rows, "b_long").as_deref(), Some("too_long"));
    assert_eq!(reason(&report.rows, "c_silent").as_deref(), Some("no_speech"));
    assert_eq!(reason(&report.rows, "d_16k").as_deref(), Some("sample_rate_mismatch"));
    assert_eq!(reason(&report.rows, "e_garbage").as_deref(), Some("unreadable_audio"));
    assert_eq!(reason(&report.rows, "f_missing").as_deref(), Some("missing_audio"));
    assert_eq!(reason(&report.rows, "../escape").as_deref(), Some("bad_id"));

    let features = opts.out_dir.join("features");
    let sidecar = FeatureSidecar::read(&features.join("a_tone.json")).unwrap();
    assert_eq!(sidecar.mel.shape, [81, 80]);
    assert_eq!(sidecar.pitch.shape, [81]);
    assert_eq!(sidecar.num_samples, 24_000);
    let mel = read_f32_le(std::fs::File::open(features.join(&sidecar.mel.file)).unwrap()).unwrap();
    assert_eq!(mel.len(), 81 * 80);
    let energy = read_f32_le(std::fs::File::open(features.join(&sidecar.energy.file)).unwrap()).unwrap();
    assert_eq!(energy.len(), 81);
    let tokens: TokenProsody =
        serde_json::from_str(&std::fs::read_to_string(features.join("a_tone.tokens.json")).unwrap()).unwrap();
    assert_eq!(tokens.tokens.len(), 3);
    assert_eq!(tokens.total_frames(), 81);
    assert!(!features.join("b_long.json").exists());

    let manifest = std::fs::read_to_string(&report.manifest).unwrap();
    assert_eq!(manifest.lines().count(), 7);
}

#[test]
fn prep_rejects_mismatched_durations() {
    let dir = tempfile::tempdir().unwrap();
    let opts = corpus(dir.path());
    std::fs::write(dir.path().join("durations.tsv"), "a_tone\t20 40\n").unwrap();
    let report = prep(&opts).unwrap();
    assert_eq!(reason(&report.rows, "a_tone").as_deref(), Some("duration_mismatch"));
    assert!(!opts.out_dir.join("features/a_tone.json").exists());
}

#[test]
fn prep_is_deterministic_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut opts = corpus(dir.path());
    let read_all = |out: &Path| {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out.join("features"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
            .collect();
        files.sort();
        (std::fs::read(out.join("manifest.jsonl")).unwrap(), files)
    };
    opts.jobs = 1;
    prep(&opts).unwrap();
    let first = read_all(&opts.out_dir);
    opts.jobs = 3;
    opts.out_dir = dir.path().join("out2");
    prep(&opts).unwrap();
    assert_eq!(first, read_all(&opts.out_dir));
}

#[test]
fn prep_binary_reports_summary() {
    let dir = tempfile::tempdir().unwrap();
    let opts = corpus(dir.path());
    let out = Command::new(BIN)
        .args(["prep", "--in"])
        .arg(&opts.in_dir)
        .arg("--transcript")
        .arg(&opts.transcript)
        .arg("--out")
        .arg(&opts.out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("7 utterances, 1 accepted, 6 rejected"), "{stdout}");

    let missing = Command::new(BIN)
        .args(["prep", "--in", "x", "--transcript", "/nonexistent", "--out"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn say_writes_wav_and_lists_sources() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("out.wav");
    let out = Command::new(BIN)
        .args(["say", "--voice", "einstein_fast", "--out"])
        .arg(&wav)
        .arg("Guten Tag, I am Einstein.")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let einstein = stdout.lines().find(|l| l.starts_with("einstein")).unwrap();
    assert!(einstein.contains("custom"), "{stdout}");
    assert!(stdout.contains("phonemes: "));
    let bytes = std::fs::read(&wav).unwrap();
    assert_eq!(&bytes[..4], b"RIFF");
}

#[test]
fn say_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["say", "--voice", "nobody", "--out"])
        .arg(dir.path().join("x.wav"))
        .arg("hi")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("einstein_fast"));
    let out = Command::new(BIN).args(["say", "--out"]).arg(dir.path().join("x.wav")).arg("?!").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(BIN).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn bench_reports_hits_and_misses() {
    let dir = tempfile::tempdir().unwrap();
    let stack = common::start_stack(dir.path(), Backend::MockFast, 2).await;
    let corpus = bench::load_corpus(None).unwrap();
    let spec = |texts| BenchSpec {
        url: stack.gateway.clone(),
        api_key: Some(common::VALID_KEY.into()),
        voice: "einstein".into(),
        concurrency: 4,
        texts,
        timeout: Duration::from_secs(30),
    };
    let unique = run_bench(&spec(bench::unique_texts(&corpus, 30, "t"))).await.unwrap();
    assert_eq!(unique.status_counts().get(&200), Some(&30));
    assert_eq!(unique.hit_ratio(), 0.0);
    assert_eq!(unique.misses().n, 30);

    let repeat = run_bench(&spec(bench::repeated_texts(&corpus, 20))).await.unwrap();
    assert_eq!(repeat.failures(), 0);
    assert!(repeat.hit_ratio() >= 19.0 / 20.0, "{}", repeat.render());

    let denied = run_bench(&BenchSpec { api_key: None, ..spec(vec!["hello".into()]) }).await.unwrap();
    assert_eq!(denied.status_counts().get(&401), Some(&1));
    assert_eq!(denied.failures(), 0);

    let dead = run_bench(&BenchSpec { url: "http://127.0.0.1:9".into(), ..spec(vec!["hello".into()]) }).await.unwrap();
    assert_eq!(dead.status_counts().get(&0), Some(&1));
    assert_eq!(dead.failures(), 1);
}

#[test]
fn example_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config");
    let service = voxsync_service::ServiceConfig::from_toml(&std::fs::read_to_string(root.join("service.toml")).unwrap())
        .unwrap();
    assert_eq!(service.voices.len(), 2);
    let gateway =
        voxsync_gateway::GatewayConfig::from_toml(&std::fs::read_to_string(root.join("gateway.toml")).unwrap()).unwrap();
    assert_eq!(gateway.routes.len(), 2);
    let keys = voxsync_gateway::Keystore::load(&root.join("keys.example.tsv")).unwrap();
    assert_eq!(keys.authenticate(Some("demo-key-change-me")), Ok("demo"));
    assert!(keys.authenticate(Some("revoked-key")).is_err());
}
