use std::{
    fs::File,
    io::{BufReader, BufWriter, Write},
    path::Path,
};

use aquamodem::{
    channel::{self, apply_channel},
    context::{self, assemble_context, filter_abnormal, ThresholdConfig},
    corpus::{self, LabeledMessage},
    corruption,
    experiment::{self, ExperimentReport, ReportMeta},
    par::Execution,
    phy::wav,
    recovery::{
        evaluate, DictionaryRecoverer, ExternalRecoverer, ExternalSimilarity, HybridSimilarity,
        IdentityRecoverer, Recoverer, SimilarityMetric,
    },
    textcodec::{self, SymbolAlphabet},
    Modem,
};
use serde::Serialize;
use serde_json::json;

use crate::{
    args::{Cli, Command, Common, RecovererArgs, RecovererKind},
    exit::CliError,
    settings::Settings,
};

type Result<T = ()> = std::result::Result<T, CliError>;

fn exec(common: &Common) -> Execution {
    if common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn modem(s: &Settings) -> Result<Modem> {
    Ok(Modem::new(s.modulation, SymbolAlphabet::default())?)
}

fn messages(path: Option<&Path>, seed: u64) -> Result<Vec<LabeledMessage>> {
    let pool = match path {
        Some(p) => corpus::load_messages(p, seed)?,
        None => corpus::default_messages().to_vec(),
    };
    if pool.is_empty() {
        return Err(CliError::Usage("message file has no messages".into()));
    }
    Ok(pool)
}

fn recoverer(args: &RecovererArgs) -> Result<Box<dyn Recoverer>> {
    Ok(match args.recoverer {
        RecovererKind::Identity => Box::new(IdentityRecoverer),
        RecovererKind::Dictionary => Box::new(match &args.vocab {
            Some(p) => DictionaryRecoverer::from_file(p)?,
            None => DictionaryRecoverer::new(corpus::default_vocabulary().to_vec())?,
        }),
        RecovererKind::External => {
            let cmd = args
                .recoverer_cmd
                .as_deref()
                .ok_or_else(|| CliError::Usage("--recoverer external needs --recoverer-cmd".into()))?;
            Box::new(ExternalRecoverer::spawn(cmd, &args.recoverer_args)?)
        }
    })
}

fn metric(args: &RecovererArgs) -> Result<Box<dyn SimilarityMetric>> {
    Ok(match &args.similarity_cmd {
        Some(cmd) => Box::new(ExternalSimilarity::spawn(cmd, &args.similarity_args)?),
        None => Box::new(HybridSimilarity),
    })
}

#[derive(Serialize)]
struct Snapshot<'a, T: Serialize> {
    settings: &'a Settings,
    command: T,
}

fn write_report<R: Serialize, T: Serialize>(
    path: &Path,
    name: &str,
    settings: &Settings,
    command_cfg: T,
    rows: Vec<R>,
) -> Result {
    let meta = ReportMeta::new(name, settings.seed, &Snapshot { settings, command: command_cfg })?;
    ExperimentReport::new(meta, rows).write(path).map_err(CliError::from)
}

fn read_wav(path: &Path) -> Result<aquamodem::phy::Waveform> {
    wav::read_wav_file(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_wav(path: &Path, w: &aquamodem::phy::Waveform) -> Result {
    wav::write_wav_file(path, w).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn run(cli: Cli) -> Result {
    match cli.command {
        Command::Encode { text, out, common } => {
            let s = Settings::resolve(&common)?;
            if text.trim().is_empty() {
                return Err(CliError::Usage("text is empty".into()));
            }
            let tx = modem(&s)?.transmit_text(&text, s.mode)?;
            write_wav(&out, &tx.waveform)?;
            eprintln!(
                "{} symbols, {:.3} s, {} payload bits",
                tx.plan.total_symbols(),
                tx.waveform.duration(),
                tx.payload_bits.len()
            );
            Ok(())
        }
        Command::Decode { input, reference, common } => {
            let s = Settings::resolve(&common)?;
            let m = modem(&s)?;
            let w = read_wav(&input)?;
            if (w.fs - s.modulation.fs).abs() > 1e-9 {
                return Err(CliError::Usage(format!(
                    "{} is sampled at {} Hz, expected {} Hz",
                    input.display(),
                    w.fs,
                    s.modulation.fs
                )));
            }
            let rx = m.receive_text(&w)?;
            println!("{}", rx.text);
            let r = &rx.reception;
            eprintln!(
                "offset {} samples, sync confidence {:.2}, mode {}, {} payload bits, {} corrected codewords",
                r.offset,
                r.sync.confidence,
                r.header.mode,
                r.payload_bits.len(),
                r.corrected_codewords
            );
            if let Some(reference) = reference {
                let text = textcodec::normalize_message(&reference)?;
                let bits = textcodec::encode_text(&text, m.alphabet())?;
                let errors = bits.hamming_distance(&r.payload_bits);
                eprintln!(
                    "ber {:.6} ({errors} of {} bits)",
                    errors as f64 / bits.len().max(r.payload_bits.len()) as f64,
                    bits.len()
                );
            }
            Ok(())
        }
        Command::Simulate { input, out, common } => {
            let s = Settings::resolve(&common)?;
            let w = read_wav(&input)?;
            let (mut y, report) = apply_channel(&w, &s.channel)?;
            // Keep the file inside the WAV range; scaling does not change SNR.
            let peak = y.peak();
            if peak > 1.0 {
                y.samples.iter_mut().for_each(|v| *v /= peak);
            }
            write_wav(&out, &y)?;
            eprintln!(
                "path gain {:.4}, in-band snr {:.2} dB, drift {} ppm",
                report.path_gain, report.effective_snr_db, report.drift_applied_ppm
            );
            Ok(())
        }
        Command::DistanceSweep { distances, messages: msg_path, out, recovery, common } => {
            let s = Settings::resolve(&common)?;
            let distances = distances
                .map(|g| g.0)
                .or_else(|| common.distance.map(|d| vec![d]))
                .unwrap_or_else(|| vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
            let cfg = experiment::DistanceSweepConfig {
                distances,
                trials: s.trials,
                mode: s.mode,
                channel: s.channel.clone(),
                threshold: s.threshold,
                seed: s.seed,
            };
            let pool = messages(msg_path.as_deref(), s.seed)?;
            let rec = recoverer(&recovery)?;
            let met = metric(&recovery)?;
            let rows = experiment::distance_sweep(&modem(&s)?, &pool, &cfg, rec.as_ref(), met.as_ref(), exec(&common))?;
            write_report(&out, "distance-sweep", &s, json!({"sweep": &cfg, "recoverer": rec.name()}), rows)
        }
        Command::SnrSweep { snr, text, out, common } => {
            let s = Settings::resolve(&common)?;
            let m = modem(&s)?;
            let tx = m.transmit_text(&text, s.mode)?;
            let rows = channel::snr_sweep(&m, &tx, &snr.0, s.trials, s.seed, exec(&common));
            write_report(&out, "snr-sweep", &s, json!({"snr_db": &snr, "text": tx.text}), rows)
        }
        Command::Ablation { ber_grid, per_message, messages: msg_path, vocab, out, common } => {
            let s = Settings::resolve(&common)?;
            let pool = messages(msg_path.as_deref(), s.seed)?;
            let dict = match &vocab {
                Some(p) => DictionaryRecoverer::from_file(p)?,
                None => DictionaryRecoverer::new(corpus::default_vocabulary().to_vec())?,
            };
            let cfg = experiment::AblationConfig {
                ber_grid: ber_grid.0,
                per_message,
                threshold: s.threshold,
                seed: s.seed,
                ..Default::default()
            };
            let rows = experiment::ablation(
                &pool,
                &cfg,
                &[&IdentityRecoverer, &dict],
                &HybridSimilarity,
                SymbolAlphabet::default_ref(),
                exec(&common),
            )?;
            write_report(&out, "ablation", &s, &cfg, rows)
        }
        Command::GenCorpus { messages: msg_path, ber_grid, count, per_message, protect_separators, out, audit, common } => {
            let s = Settings::resolve(&common)?;
            let pool = messages(msg_path.as_deref(), s.seed)?;
            let records = match (count, per_message) {
                (Some(n), _) => {
                    corruption::generate_corpus_sized(&pool, &ber_grid.0, n, protect_separators, s.seed, exec(&common))?
                }
                (None, per) => corruption::generate_corpus(
                    &pool,
                    &ber_grid.0,
                    per.unwrap_or(1),
                    protect_separators,
                    s.seed,
                    exec(&common),
                )?,
            };
            let file = File::create(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            corruption::write_jsonl(BufWriter::new(file), &records)?;
            eprintln!("{} records", records.len());
            if let Some(path) = audit {
                let rows = corruption::audit_flip_rates(&records, SymbolAlphabet::default_ref())?;
                write_report(
                    &path,
                    "gen-corpus-audit",
                    &s,
                    json!({
                        "ber_grid": &ber_grid,
                        "count": count,
                        "per_message": per_message,
                        "protect_separators": protect_separators,
                    }),
                    rows,
                )?;
            }
            Ok(())
        }
        Command::Evaluate { corpus: path, out, recovery, common } => {
            let s = Settings::resolve(&common)?;
            let file = File::open(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let records = corruption::read_jsonl(BufReader::new(file))?;
            let rec = recoverer(&recovery)?;
            let met = metric(&recovery)?;
            let r = evaluate(rec.as_ref(), &records, met.as_ref(), s.threshold, exec(&common))?;
            println!(
                "{}: mean similarity {:.4}, success rate {:.4} over {} records",
                rec.name(),
                r.mean_similarity,
                r.success_rate,
                r.records
            );
            write_report(&out, "evaluate", &s, json!({"corpus": path, "recoverer": rec.name()}), r.per_ber)
        }
        Command::Recover { text, purpose, recovery, common } => {
            Settings::resolve(&common)?;
            let rec = recoverer(&recovery)?;
            println!("{}", rec.recover(&text, purpose)?);
            Ok(())
        }
        Command::Calibrate { target_ber, iterations, messages: msg_path, out, common } => {
            let s = Settings::resolve(&common)?;
            if !(0.0..1.0).contains(&target_ber) {
                return Err(CliError::Usage(format!("target BER {target_ber} outside [0, 1)")));
            }
            let pool = messages(msg_path.as_deref(), s.seed)?;
            let cfg = experiment::CalibrationConfig {
                distance: s.channel.distance,
                target_ber,
                frames: s.trials,
                mode: s.mode,
                channel: s.channel.clone(),
                iterations,
                seed: s.seed,
            };
            let r = experiment::calibrate_noise_level(&modem(&s)?, &pool, &cfg, exec(&common))?;
            println!("noise_level = {}", r.noise_level);
            eprintln!("ber {:.4} at {} m", r.ber, cfg.distance);
            if let Some(path) = out {
                write_report(&path, "calibrate", &s, &cfg, vec![r])?;
            }
            Ok(())
        }
        Command::Drift { snr, data_symbols, out, common } => {
            let s = Settings::resolve(&common)?;
            let cfg = experiment::DriftConfig {
                drift_ppm: common.drift_ppm.unwrap_or(50.0),
                data_symbols,
                snr_db: snr,
                trials: s.trials,
                seed: s.seed,
            };
            let r = experiment::drift_experiment(&modem(&s)?, &cfg, exec(&common))?;
            eprintln!("equalized ber {:.6}, unequalized ber {:.6}", r.equalized_ber, r.unequalized_ber);
            write_report(&out, "drift", &s, &cfg, vec![r])
        }
        Command::Profile { duration, out, common } => {
            let s = Settings::resolve(&common)?;
            let frames = context::simulate_dive_profile(duration, s.seed)?;
            let file = File::create(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            context::write_profile_csv(BufWriter::new(file), &frames)?;
            Ok(())
        }
        Command::Context { profile, frame, purpose, thresholds, image, common } => {
            Settings::resolve(&common)?;
            let file = File::open(&profile).map_err(|e| CliError::Io(format!("{}: {e}", profile.display())))?;
            let frames = context::read_profile_csv(BufReader::new(file))?;
            let idx = frame.unwrap_or(frames.len().saturating_sub(1));
            let f = frames
                .get(idx)
                .ok_or_else(|| CliError::Usage(format!("frame {idx} out of range ({} frames)", frames.len())))?;
            let cfg = match thresholds {
                Some(p) => ThresholdConfig::load(&p)?,
                None => ThresholdConfig::default(),
            };
            let record = assemble_context(purpose.role(), &filter_abnormal(f, &cfg), purpose, image)?;
            let mut stdout = std::io::stdout().lock();
            write!(stdout, "{record}")?;
            Ok(())
        }
    }
}
