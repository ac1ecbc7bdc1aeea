//! CSV formats.
//!
//! Transcript columns, in order:
//! `index,bit,t_s_ps,matched,t_r_ps,detector,disclosed,error`.
//! One row per send (by index), followed by one row per anomalous receive
//! (by `t_r`) whose send-side fields are empty. Fields that do not apply
//! are empty; flags are `0`/`1`.
//!
//! Fringe columns: `delta_l_nm,counts_d0,counts_d1`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::analysis::FringePoint;
use crate::error::Result;
use crate::protocol::{SiftResult, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRow {
    pub index: Option<usize>,
    pub bit: Option<u8>,
    pub t_s_ps: Option<f64>,
    pub matched: u8,
    pub t_r_ps: Option<f64>,
    pub detector: Option<u8>,
    pub disclosed: Option<u8>,
    pub error: Option<u8>,
}

pub fn transcript_rows(transcript: &Transcript, sift: &SiftResult) -> Vec<TranscriptRow> {
    let mut rows: Vec<TranscriptRow> = transcript
        .sends
        .iter()
        .map(|s| TranscriptRow {
            index: Some(s.index),
            bit: Some(s.bit.value()),
            t_s_ps: Some(s.t_s.ps()),
            matched: 0,
            t_r_ps: None,
            detector: None,
            disclosed: None,
            error: None,
        })
        .collect();
    for (pair, &shown) in sift.matched_pairs.iter().zip(&sift.disclosed) {
        let row = &mut rows[pair.send.index];
        row.matched = 1;
        row.t_r_ps = Some(pair.receive.t_r.ps());
        row.detector = Some(pair.receive.detector.index());
        row.disclosed = Some(u8::from(shown));
        row.error = Some(u8::from(pair.is_error()));
    }

    // Anomalies are the receives not consumed by a match.
    let mut matched_times: Vec<(f64, u8)> = sift
        .matched_pairs
        .iter()
        .map(|p| (p.receive.t_r.ps(), p.receive.detector.index()))
        .collect();
    matched_times.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for rec in &transcript.receives {
        let key = (rec.t_r.ps(), rec.detector.index());
        if let Ok(pos) = matched_times
            .binary_search_by(|probe| probe.0.total_cmp(&key.0).then(probe.1.cmp(&key.1)))
        {
            matched_times.remove(pos);
            continue;
        }
        rows.push(TranscriptRow {
            index: None,
            bit: None,
            t_s_ps: None,
            matched: 0,
            t_r_ps: Some(key.0),
            detector: Some(key.1),
            disclosed: None,
            error: None,
        });
    }
    rows
}

pub fn write_transcript_csv<W: Write>(writer: W, rows: &[TranscriptRow]) -> Result<()> {
    write_rows(writer, rows)
}

pub fn read_transcript_csv<R: Read>(reader: R) -> Result<Vec<TranscriptRow>> {
    read_rows(reader)
}

pub fn write_fringe_csv<W: Write>(writer: W, points: &[FringePoint]) -> Result<()> {
    write_rows(writer, points)
}

pub fn read_fringe_csv<R: Read>(reader: R) -> Result<Vec<FringePoint>> {
    read_rows(reader)
}

fn write_rows<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(reader: R) -> Result<Vec<T>> {
    let mut input = csv::Reader::from_reader(reader);
    let rows = input
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}
