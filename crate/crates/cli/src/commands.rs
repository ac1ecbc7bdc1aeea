use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use gvqkd_core::analysis::phase_difference;
use gvqkd_core::export::{transcript_rows, write_fringe_csv, write_transcript_csv, TranscriptRow};
use gvqkd_core::protocol::sift_session;
use gvqkd_core::rng::{self, Stream};
use gvqkd_core::{
    detect_eavesdropping, eve_information, fit_fringe, fringe_scan, qber_from_visibility,
    run_session, AttackStrategy, Bit, SourceSelection,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{FitReport, RunSummary, TransmitSummary, VerdictReport};

fn create_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)
            .map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
        writeln!(w).map_err(|e| CliError::io(path, e))
    })
}

fn write_transcript(path: &Path, rows: &[TranscriptRow]) -> Result<(), CliError> {
    write_file(path, |w| Ok(write_transcript_csv(w, rows)?))
}

fn source_name(selection: SourceSelection) -> &'static str {
    match selection {
        SourceSelection::Random => "both",
        SourceSelection::OnlyS0 => "s0",
        SourceSelection::OnlyS1 => "s1",
    }
}

fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some((mean, var.sqrt()))
}

fn transmit_run(
    config: &RunConfig,
    run: usize,
) -> Result<(RunSummary, Vec<TranscriptRow>), CliError> {
    let seed = rng::run_seed(config.session.seed, run as u64);
    let mut session = config.session.clone();
    session.seed = seed;
    let transcript = run_session(&session, &AttackStrategy::None)?;
    let sift = sift_session(&transcript, &session)?;
    let summary = RunSummary {
        run,
        seed,
        sends: transcript.sends.len(),
        receives: transcript.receives.len(),
        matched: sift.matched_pairs.len(),
        anomalies: sift.anomalies,
        disclosed: sift.qber.map_or(0, |q| q.disclosed),
        key_bits: sift.key_bits_alice.len(),
        qber: sift.qber.map(|q| q.value),
        qber_sigma: sift.qber.map(|q| q.sigma),
        anomaly_fraction: sift.anomaly_fraction(),
    };
    Ok((summary, transcript_rows(&transcript, &sift)))
}

/// `runs` clean sessions with per-run seeds derived from the base seed.
/// Writes `transcript_run_NNN.csv` per run and `transmit_summary.json`.
pub fn cmd_transmit(config: &RunConfig, out: &Path) -> Result<TransmitSummary, CliError> {
    create_dir(out)?;
    let results: Vec<(RunSummary, Vec<TranscriptRow>)> = (0..config.runs)
        .into_par_iter()
        .map(|run| transmit_run(config, run))
        .collect::<Result<_, _>>()?;

    for (summary, rows) in &results {
        write_transcript(
            &out.join(format!("transcript_run_{:03}.csv", summary.run)),
            rows,
        )?;
    }
    let per_run: Vec<RunSummary> = results.into_iter().map(|(s, _)| s).collect();
    let qbers: Vec<f64> = per_run.iter().filter_map(|r| r.qber).collect();
    let anomalies: Vec<f64> = per_run.iter().filter_map(|r| r.anomaly_fraction).collect();
    let stats = mean_std(&qbers);
    let summary = TransmitSummary {
        runs: config.runs,
        source: source_name(config.session.selection).to_string(),
        visibility: config.session.visibility,
        qber: stats.map(|s| s.0),
        qber_sigma: stats.map(|s| s.1),
        anomaly_fraction: mean_std(&anomalies).map(|s| s.0),
        mean_disclosed: per_run.iter().map(|r| r.disclosed as f64).sum::<f64>()
            / per_run.len() as f64,
        per_run,
    };
    write_json(&out.join("transmit_summary.json"), &summary)?;
    Ok(summary)
}

fn bit_label(bit: Bit) -> &'static str {
    match bit {
        Bit::Zero => "s0",
        Bit::One => "s1",
    }
}

/// Fringe scan and sine fit for each active source. Writes
/// `fringe_sN.csv` and `fit_sN.json`.
pub fn cmd_fringe_scan(config: &RunConfig, out: &Path) -> Result<Vec<FitReport>, CliError> {
    create_dir(out)?;
    let mut reports = Vec::new();
    for bit in config.active_sources() {
        let scan = config.fringe_scan(bit);
        let mut rng = rng::stream(
            rng::run_seed(config.session.seed, bit.value().into()),
            Stream::Fringe,
        );
        let points = fringe_scan(&scan, &mut rng)?;
        let (d0, d1) = fit_fringe(&points, scan.wavelength_nm)?;
        let label = bit_label(bit);
        let path = out.join(format!("fringe_{label}.csv"));
        write_file(&path, |w| Ok(write_fringe_csv(w, &points)?))?;
        let report = FitReport {
            source: label.to_string(),
            wavelength_nm: scan.wavelength_nm,
            visibility_d0: d0.visibility,
            visibility_d1: d1.visibility,
            phase_offset_rad: phase_difference(&d0, &d1),
            phase_d0_rad: d0.phase_offset,
            phase_d1_rad: d1.phase_offset,
            mean_rate_d0: d0.mean_rate,
            mean_rate_d1: d1.mean_rate,
            residual_rms_d0: d0.residual_rms,
            residual_rms_d1: d1.residual_rms,
            qber_from_visibility: qber_from_visibility((d0.visibility + d1.visibility) / 2.0),
        };
        write_json(&out.join(format!("fit_{label}.json")), &report)?;
        reports.push(report);
    }
    Ok(reports)
}

/// One session under `strategy`, judged by both security tests. Writes
/// `attack_<name>_transcript.csv` and `attack_<name>_verdict.json`.
pub fn cmd_attack_demo(
    config: &RunConfig,
    strategy: &AttackStrategy,
    out: &Path,
) -> Result<VerdictReport, CliError> {
    create_dir(out)?;
    let session = &config.session;
    let transcript = run_session(session, strategy)?;
    let sift = sift_session(&transcript, session)?;
    let verdict = detect_eavesdropping(&sift, config.anomaly_threshold, config.qber_threshold)?;
    let info = eve_information(&transcript.eve_log, &transcript.alice_bits())?;

    let name = strategy.name();
    write_transcript(
        &out.join(format!("attack_{name}_transcript.csv")),
        &transcript_rows(&transcript, &sift),
    )?;
    let report = VerdictReport {
        strategy: name.to_string(),
        sends: transcript.sends.len(),
        receives: transcript.receives.len(),
        matched: sift.matched_pairs.len(),
        anomaly_fraction: verdict.anomaly_fraction,
        qber: verdict.qber,
        qber_sigma: verdict.qber_sigma,
        decision: verdict.decision,
        eve_information_bits: info,
        anomaly_threshold: config.anomaly_threshold,
        qber_threshold: config.qber_threshold,
    };
    write_json(&out.join(format!("attack_{name}_verdict.json")), &report)?;
    Ok(report)
}

/// Files a subcommand wrote, for callers that want to list them.
pub fn output_files(out: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(out)
        .into_iter()
        .flatten()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    files.sort();
    files
}
