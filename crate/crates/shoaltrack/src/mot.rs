//! MOTChallenge text files: `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z`.
//!
//! Frames are 1-based on disk and 0-based in [`SequenceAnnotations`]. Only the
//! first six columns are required; a missing `conf` reads as 1 and columns
//! past the seventh are ignored.

use std::fmt::Write as _;

use shoaltrack_core::{Annotation, BoundingBox, SequenceAnnotations};

use crate::error::{IoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotKind {
    /// Raw detector output; `id` is usually -1 and never checked for duplicates.
    Detections,
    Tracks,
    GroundTruth,
}

impl MotKind {
    fn tracked(self) -> bool {
        !matches!(self, Self::Detections)
    }
}

fn number(field: &str, line: usize, name: &str) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| IoError::parse(line, format!("{name} '{field}' is not a number")))?;
    if !v.is_finite() {
        return Err(IoError::parse(line, format!("{name} '{field}' is not finite")));
    }
    Ok(v)
}

fn integer(field: &str, line: usize, name: &str) -> Result<i64> {
    let v = number(field, line, name)?;
    if v.fract() != 0.0 || v.abs() > i64::MAX as f64 {
        return Err(IoError::parse(line, format!("{name} '{field}' is not an integer")));
    }
    Ok(v as i64)
}

pub fn parse_mot(text: &str, kind: MotKind) -> Result<SequenceAnnotations> {
    let mut seq = SequenceAnnotations::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() < 6 {
            return Err(IoError::parse(line, format!("expected at least 6 fields, found {}", fields.len())));
        }
        let frame = integer(fields[0], line, "frame")?;
        if frame < 1 || frame > u32::MAX as i64 {
            return Err(IoError::parse(line, format!("frame {frame} out of range (frames start at 1)")));
        }
        let frame = (frame - 1) as u32;
        let id = match integer(fields[1], line, "id")? {
            -1 if !kind.tracked() => None,
            id if id >= 1 && id <= u32::MAX as i64 => Some(id as u32),
            id => return Err(IoError::parse(line, format!("id {id} must be a positive integer"))),
        };
        let [l, t, w, h] = [(2, "bb_left"), (3, "bb_top"), (4, "bb_width"), (5, "bb_height")]
            .map(|(i, name)| number(fields[i], line, name));
        let bbox = BoundingBox::new(l?, t?, w?, h?).map_err(|e| IoError::parse(line, e.to_string()))?;
        let score = match fields.get(6) {
            Some(f) => number(f, line, "conf")?,
            None => 1.0,
        };
        let annotation = Annotation::new(id, bbox, score);
        if kind.tracked() {
            seq.insert(frame, annotation).map_err(|e| IoError::parse(line, e.to_string()))?;
        } else {
            seq.push_unchecked(frame, annotation);
        }
    }
    Ok(seq)
}

fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Serializes in frame order, then id order, with unlabelled boxes last in
/// their original order. Every line has ten fields.
pub fn write_mot(seq: &SequenceAnnotations) -> String {
    let mut out = String::new();
    for (frame, entries) in seq.frames() {
        let mut order: Vec<&Annotation> = entries.iter().collect();
        order.sort_by_key(|a| a.id.unwrap_or(u32::MAX));
        for a in order {
            let id = a.id.map_or(-1, i64::from);
            let b = &a.bbox;
            let _ = writeln!(
                out,
                "{},{id},{},{},{},{},{},-1,-1,-1",
                frame as u64 + 1,
                fixed(b.left()),
                fixed(b.top()),
                fixed(b.width()),
                fixed(b.height()),
                fixed(a.score)
            );
        }
    }
    out
}
