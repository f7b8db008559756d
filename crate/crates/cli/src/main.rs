use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use voxsync::bench::{self, BenchSpec};
use voxsync::prep::{self, PrepOptions};
use voxsync::say::{describe, say};
use voxsync::voices::load_voice;
use voxsync::CliError;

#[derive(Parser)]
#[command(name = "voxsync", version, about = "voxsync corpus, synthesis and benchmark tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trim, filter and extract features for a recorded corpus.
    Prep {
        /// Directory holding `<id>.wav` files.
        #[arg(long = "in")]
        in_dir: PathBuf,
        /// `id<TAB>text` transcript.
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `id<TAB>d1 d2 ...` token durations in frames.
        #[arg(long)]
        durations: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Synthesize one utterance to a WAV file and print the phonemization.
    Say {
        #[arg(long, default_value = "einstein")]
        voice: String,
        /// Service config whose voice table replaces the built-in voices.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        text: String,
    },
    /// Drive the synchronous endpoint with closed-loop workers.
    Bench {
        #[arg(long, default_value = "http://127.0.0.1:8080")]
        url: String,
        #[arg(long, env = "VOXSYNC_API_KEY")]
        api_key: Option<String>,
        #[arg(long, default_value = "einstein")]
        voice: String,
        #[arg(long, default_value_t = 8)]
        concurrency: usize,
        #[arg(long, default_value_t = 250)]
        requests: usize,
        /// Send the first corpus line every time instead of distinct texts.
        #[arg(long)]
        repeat: bool,
        /// One text per line; defaults to the bundled corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Tag for distinct texts; defaults to the current time.
        #[arg(long)]
        nonce: Option<String>,
        #[arg(long, default_value_t = 30_000)]
        timeout_ms: u64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Prep { in_dir, transcript, out, durations, jobs } => {
            let report = prep::prep(&PrepOptions { in_dir, transcript, out_dir: out, durations, jobs })?;
            println!("{}", report.summary());
            println!("manifest: {}", report.manifest.display());
            Ok(())
        }
        Command::Say { voice, config, out, text } => {
            let voice = load_voice(&voice, config.as_deref())?;
            let (rendered, wav) = say(&voice, &text).map_err(|e| CliError::Usage(e.to_string()))?;
            std::fs::write(&out, wav)
                .map_err(|e| CliError::Runtime(anyhow::anyhow!("writing {}: {e}", out.display())))?;
            print!("{}", describe(&rendered));
            Ok(())
        }
        Command::Bench { url, api_key, voice, concurrency, requests, repeat, corpus, nonce, timeout_ms, json } => {
            let corpus = bench::load_corpus(corpus.as_deref())?;
            let texts = if repeat {
                bench::repeated_texts(&corpus, requests)
            } else {
                let nonce = nonce.unwrap_or_else(|| {
                    let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap_or_default();
                    format!("{:x}", now.as_millis())
                });
                bench::unique_texts(&corpus, requests, &nonce)
            };
            let spec =
                BenchSpec { url, api_key, voice, concurrency, texts, timeout: Duration::from_millis(timeout_ms) };
            let rt = tokio::runtime::Runtime::new().map_err(anyhow::Error::from)?;
            let report = rt.block_on(bench::run_bench(&spec))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
            } else {
                print!("{}", report.render());
            }
            match report.failures() {
                0 => Ok(()),
                n => Err(CliError::Runtime(anyhow::anyhow!("{n} requests failed with a server or transport error"))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
