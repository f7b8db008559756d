//! Corpus preparation: trim, filter, extract and write features per utterance.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use voxsync_core::dsp::{
    extract_energy_with, extract_pitch_with, filter_utterance, token_average, trim_silence, write_f32_le, DspError,
    FeatureSidecar, LogMelExtractor, MelConfig, PitchConfig, ProsodyTrack, TrackShape, UtteranceVerdict,
};
use voxsync_core::wav::{read_wav_file, WavError};
use voxsync_core::Exec;

#[derive(Debug, Clone)]
pub struct PrepOptions {
    pub in_dir: PathBuf,
    pub transcript: PathBuf,
    pub out_dir: PathBuf,
    /// `id<TAB>d1 d2 ...` token durations in frames.
    pub durations: Option<PathBuf>,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub id: String,
    pub text: String,
    pub audio: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Frame count of every feature track.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    /// Duration after silence trimming.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<String>,
}

impl ManifestRow {
    pub fn accepted(&self) -> bool {
        self.status == "accepted"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrepReport {
    /// Sorted by id.
    pub rows: Vec<ManifestRow>,
    pub manifest: PathBuf,
}

impl PrepReport {
    pub fn accepted(&self) -> usize {
        self.rows.iter().filter(|r| r.accepted()).count()
    }

    pub fn reasons(&self) -> BTreeMap<&str, usize> {
        let mut m = BTreeMap::new();
        for r in &self.rows {
            if let Some(reason) = &r.reason {
                *m.entry(reason.as_str()).or_default() += 1;
            }
        }
        m
    }

    pub fn summary(&self) -> String {
        let rejected: Vec<String> = self.reasons().iter().map(|(k, v)| format!("{k}: {v}")).collect();
        format!(
            "{} utterances, {} accepted, {} rejected{}",
            self.rows.len(),
            self.accepted(),
            self.rows.len() - self.accepted(),
            if rejected.is_empty() { String::new() } else { format!(" ({})", rejected.join(", ")) }
        )
    }
}

/// `id<TAB>text` lines; blank lines and `#` comments are skipped.
pub fn read_transcript(path: &Path) -> anyhow::Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, utt)) = line.split_once('\t') else {
            bail!("{}:{}: expected id<TAB>text", path.display(), i + 1);
        };
        if let Some(prev) = seen.insert(id.to_owned(), i + 1) {
            bail!("{}:{}: id {id:?} already used on line {prev}", path.display(), i + 1);
        }
        out.push((id.to_owned(), utt.trim().to_owned()));
    }
    Ok(out)
}

pub fn read_durations(path: &Path) -> anyhow::Result<HashMap<String, Vec<usize>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, rest) = line
            .split_once('\t')
            .with_context(|| format!("{}:{}: expected id<TAB>durations", path.display(), i + 1))?;
        let durs = rest
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<usize>, _>>()
            .with_context(|| format!("{}:{}: durations must be frame counts", path.display(), i + 1))?;
        out.insert(id.to_owned(), durs);
    }
    Ok(out)
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

struct Job<'a> {
    id: &'a str,
    text: &'a str,
    durations: Option<&'a [usize]>,
}

struct Ctx<'a> {
    in_dir: &'a Path,
    features: &'a Path,
    extractor: &'a LogMelExtractor,
}

fn reject(row: &mut ManifestRow, reason: &str) {
    row.status = "rejected".into();
    row.reason = Some(reason.into());
}

fn process(ctx: &Ctx, job: &Job) -> ManifestRow {
    let mut row = ManifestRow {
        id: job.id.to_owned(),
        text: job.text.to_owned(),
        audio: format!("{}.wav", job.id),
        status: "accepted".into(),
        reason: None,
        frames: None,
        duration_s: None,
        sidecar: None,
    };
    if !valid_id(job.id) {
        reject(&mut row, "bad_id");
        return row;
    }
    if let Err(reason) = extract(ctx, job, &mut row) {
        reject(&mut row, &reason);
    }
    row
}

fn extract(ctx: &Ctx, job: &Job, row: &mut ManifestRow) -> Result<(), String> {
    let cfg = *ctx.extractor.config();
    let path = ctx.in_dir.join(&row.audio);
    if !path.is_file() {
        return Err("missing_audio".into());
    }
    let wave = match read_wav_file(&path) {
        Ok(w) => w,
        Err(WavError::NotMono(_)) => return Err("not_mono".into()),
        Err(_) => return Err("unreadable_audio".into()),
    };
    if wave.sample_rate() != cfg.sample_rate {
        return Err("sample_rate_mismatch".into());
    }
    let trimmed = match trim_silence(&wave) {
        Ok(t) => t,
        Err(DspError::NoSpeechDetected | DspError::EmptyWaveform) => return Err("no_speech".into()),
        Err(e) => return Err(format!("dsp_error: {e}")),
    };
    row.duration_s = Some(trimmed.len() as f64 / trimmed.sample_rate() as f64);
    if let UtteranceVerdict::Reject(reason) = filter_utterance(&trimmed) {
        return Err(reason.as_str().into());
    }

    let exec = Exec::Sequential;
    let dsp = |e: DspError| format!("dsp_error: {e}");
    let mel = ctx.extractor.extract(&trimmed, exec).map_err(dsp)?;
    let pitch = extract_pitch_with(&trimmed, &cfg, &PitchConfig::default(), exec).map_err(dsp)?;
    let energy = extract_energy_with(ctx.extractor, &trimmed, exec).map_err(dsp)?;
    let t = mel.n_frames();
    let tokens = match job.durations {
        Some(d) => {
            let track = ProsodyTrack::new(pitch.clone(), energy.clone()).map_err(dsp)?;
            Some(token_average(&track, d).map_err(|_| "duration_mismatch".to_string())?)
        }
        None => None,
    };

    let id = job.id;
    let io = |e: std::io::Error| format!("write_error: {e}");
    let write_track = |name: &str, values: &mut dyn Iterator<Item = f64>| -> Result<(), String> {
        let mut f = BufWriter::new(fs::File::create(ctx.features.join(name)).map_err(io)?);
        write_f32_le(&mut f, values).map_err(io)?;
        f.flush().map_err(io)
    };
    let shape = |suffix: &str, shape: Vec<usize>| TrackShape { file: format!("{id}.{suffix}.f32"), shape };
    let sidecar = FeatureSidecar {
        id: id.to_owned(),
        dtype: "float32".into(),
        layout: "row-major, little-endian".into(),
        mel_config: cfg,
        sample_rate: cfg.sample_rate,
        num_samples: trimmed.len(),
        mel: shape("mel", vec![t, cfg.n_mels]),
        pitch: shape("pitch", vec![t]),
        energy: shape("energy", vec![t]),
    };
    write_track(&sidecar.mel.file, &mut mel.as_slice().iter().copied())?;
    write_track(&sidecar.pitch.file, &mut pitch.into_iter())?;
    write_track(&sidecar.energy.file, &mut energy.into_iter())?;
    if let Some(tokens) = tokens {
        let json = serde_json::to_string_pretty(&tokens).map_err(|e| e.to_string())? + "\n";
        fs::write(ctx.features.join(format!("{id}.tokens.json")), json).map_err(io)?;
    }
    let sidecar_name = format!("features/{id}.json");
    sidecar.write(&ctx.features.join(format!("{id}.json"))).map_err(io)?;
    row.frames = Some(t);
    row.sidecar = Some(sidecar_name);
    Ok(())
}

#[cfg(feature = "parallel")]
fn run_all(jobs: &[Job], threads: usize, f: impl Fn(&Job) -> ManifestRow + Sync) -> anyhow::Result<Vec<ManifestRow>> {
    use rayon::prelude::*;
    if threads <= 1 {
        return Ok(jobs.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(|| jobs.par_iter().map(&f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_all(jobs: &[Job], _threads: usize, f: impl Fn(&Job) -> ManifestRow + Sync) -> anyhow::Result<Vec<ManifestRow>> {
    Ok(jobs.iter().map(f).collect())
}

/// Processes every transcript entry; per-file failures become rejected rows.
/// Writes `manifest.jsonl` sorted by id and returns the rows.
pub fn prep(opts: &PrepOptions) -> anyhow::Result<PrepReport> {
    let transcript = read_transcript(&opts.transcript)?;
    let durations = match &opts.durations {
        Some(p) => read_durations(p)?,
        None => HashMap::new(),
    };
    let features = opts.out_dir.join("features");
    fs::create_dir_all(&features).with_context(|| format!("creating {}", features.display()))?;
    let extractor = LogMelExtractor::new(MelConfig::default())?;
    let ctx = Ctx { in_dir: &opts.in_dir, features: &features, extractor: &extractor };

    let mut jobs: Vec<Job> =
        transcript.iter().map(|(id, text)| Job { id, text, durations: durations.get(id).map(Vec::as_slice) }).collect();
    jobs.sort_by(|a, b| a.id.cmp(b.id));
    let rows = run_all(&jobs, opts.jobs.max(1), |job| process(&ctx, job))?;

    let manifest = opts.out_dir.join("manifest.jsonl");
    let mut out =
        BufWriter::new(fs::File::create(&manifest).with_context(|| format!("creating {}", manifest.display()))?);
    for row in &rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(PrepReport { rows, manifest })
}
