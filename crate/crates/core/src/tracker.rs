//! Two-stage tracking-by-detection in the ByteTrack / BoT-SORT family.
//!
//! Each frame runs these steps in order:
//!
//! 1. Active and lost tracks are matched against high-score detections by
//!    maximum IoU (optionally multiplied by the detection score).
//! 2. Tracks that were active and are still unmatched get a second chance
//!    against low-score detections. Those that stay unmatched become lost.
//! 3. Tentative tracks are confirmed against the remaining high-score
//!    detections or removed.
//! 4. Leftover high-score detections above `new_track_thresh` start new
//!    tentative tracks.
//! 5. Lost tracks older than `track_buffer` frames are removed.
//!
//! The BoT-SORT variant runs without appearance features and with identity
//! camera-motion compensation, so on a static camera it differs from
//! ByteTrack only in its score-fusion default.

use alloc::vec::Vec;

use crate::annotations::{Annotation, SequenceAnnotations};
use crate::error::{Error, Result};
use crate::geometry::{assign_max_weight, iou, BoundingBox, WeightMatrix};
use crate::kalman::KalmanState;

/// IoU a low-score detection must exceed to be picked up in the second stage.
pub const SECOND_STAGE_MIN_IOU: f64 = 0.5;
/// IoU a detection must exceed to confirm a tentative track.
pub const TENTATIVE_MIN_IOU: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    ByteTrack,
    BotSort,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig {
    pub high_thresh: f64,
    pub low_thresh: f64,
    pub new_track_thresh: f64,
    /// Maximum IoU distance (`1 - IoU`) accepted in the first stage.
    pub match_thresh: f64,
    pub track_buffer: u32,
    pub variant: Variant,
    pub fuse_score: bool,
}

impl TrackerConfig {
    pub fn bytetrack() -> Self {
        Self {
            high_thresh: 0.25,
            low_thresh: 0.1,
            new_track_thresh: 0.25,
            match_thresh: 0.8,
            track_buffer: 30,
            variant: Variant::ByteTrack,
            fuse_score: true,
        }
    }

    pub fn botsort() -> Self {
        Self { variant: Variant::BotSort, fuse_score: false, ..Self::bytetrack() }
    }

    pub fn for_variant(variant: Variant) -> Self {
        match variant {
            Variant::ByteTrack => Self::bytetrack(),
            Variant::BotSort => Self::botsort(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(self.low_thresh) && unit(self.high_thresh) && self.low_thresh <= self.high_thresh) {
            return Err(Error::InvalidConfig("need 0 <= low_thresh <= high_thresh <= 1"));
        }
        if !unit(self.new_track_thresh) {
            return Err(Error::InvalidConfig("new_track_thresh outside [0, 1]"));
        }
        if !unit(self.match_thresh) {
            return Err(Error::InvalidConfig("match_thresh outside [0, 1]"));
        }
        if self.track_buffer < 1 {
            return Err(Error::InvalidConfig("track_buffer must be at least 1"));
        }
        Ok(())
    }
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self::bytetrack()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub bbox: BoundingBox,
    pub score: f64,
    pub frame: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Tentative,
    Active,
    Lost,
    Removed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u32,
    pub state: KalmanState,
    pub status: TrackStatus,
    pub last_frame: u32,
    pub frames_since_update: u32,
    /// Posterior boxes at every frame the track was updated.
    pub history: Vec<(u32, BoundingBox)>,
    pub score: f64,
}

impl Track {
    fn apply(&mut self, det: &Detection) -> Result<()> {
        self.state = self.state.update(&det.bbox)?;
        self.status = TrackStatus::Active;
        self.last_frame = det.frame;
        self.frames_since_update = 0;
        self.score = det.score;
        self.history.push((det.frame, self.state.to_box()));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedBox {
    pub id: u32,
    pub frame: u32,
    pub bbox: BoundingBox,
    pub score: f64,
}

/// Single-sequence tracker state machine.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    tracks: Vec<Track>,
    removed: Vec<Track>,
    next_id: u32,
    last_frame: Option<u32>,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, tracks: Vec::new(), removed: Vec::new(), next_id: 1, last_frame: None })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Tracks that are not removed, in id order.
    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn removed(&self) -> &[Track] {
        &self.removed
    }

    /// Every track ever created, removed ones included, in id order.
    pub fn into_all_tracks(self) -> Vec<Track> {
        let mut all = self.removed;
        all.extend(self.tracks);
        all.sort_by_key(|t| t.id);
        all
    }

    /// Processes the detections of one frame and returns the boxes of the
    /// active tracks.
    pub fn step(&mut self, frame: u32, detections: &[Detection]) -> Result<Vec<TrackedBox>> {
        for d in detections {
            if d.frame != frame {
                return Err(Error::MixedFrames { first: frame, other: d.frame });
            }
            if !(0.0..=1.0).contains(&d.score) {
                return Err(Error::InvalidScore(d.score));
            }
        }
        let elapsed = match self.last_frame {
            Some(last) if frame <= last => return Err(Error::FrameNotAdvancing { frame, last }),
            Some(last) => frame - last,
            None => 1,
        };
        self.last_frame = Some(frame);
        let cfg = self.config;

        for t in &mut self.tracks {
            if t.status == TrackStatus::Lost {
                t.state.freeze_size();
            }
            for _ in 0..elapsed {
                t.state = t.state.predict();
            }
        }

        let high: Vec<usize> = (0..detections.len()).filter(|&j| detections[j].score >= cfg.high_thresh).collect();
        let low: Vec<usize> = (0..detections.len())
            .filter(|&j| detections[j].score >= cfg.low_thresh && detections[j].score < cfg.high_thresh)
            .collect();
        let mut high_used = alloc::vec![false; high.len()];
        let mut matched = alloc::vec![false; self.tracks.len()];

        // Stage 1: active + lost tracks against high-score detections.
        let pool: Vec<usize> = (0..self.tracks.len())
            .filter(|&i| matches!(self.tracks[i].status, TrackStatus::Active | TrackStatus::Lost))
            .collect();
        let pairs = self.associate(&pool, detections, &high, cfg.fuse_score, 1.0 - cfg.match_thresh)?;
        for (ti, dj) in pairs {
            self.tracks[pool[ti]].apply(&detections[high[dj]])?;
            matched[pool[ti]] = true;
            high_used[dj] = true;
        }

        // Stage 2: still-unmatched active tracks against low-score detections.
        let remaining: Vec<usize> =
            pool.iter().copied().filter(|&i| !matched[i] && self.tracks[i].status == TrackStatus::Active).collect();
        let pairs = self.associate(&remaining, detections, &low, false, SECOND_STAGE_MIN_IOU)?;
        for (ti, dj) in pairs {
            self.tracks[remaining[ti]].apply(&detections[low[dj]])?;
            matched[remaining[ti]] = true;
        }
        for &i in &remaining {
            if !matched[i] {
                self.tracks[i].status = TrackStatus::Lost;
            }
        }

        // Stage 3: confirm tentative tracks.
        let tentative: Vec<usize> =
            (0..self.tracks.len()).filter(|&i| self.tracks[i].status == TrackStatus::Tentative).collect();
        let free_high: Vec<usize> = (0..high.len()).filter(|&k| !high_used[k]).map(|k| high[k]).collect();
        let pairs = self.associate(&tentative, detections, &free_high, cfg.fuse_score, TENTATIVE_MIN_IOU)?;
        let mut confirmed = alloc::vec![false; tentative.len()];
        for (ti, dj) in pairs {
            self.tracks[tentative[ti]].apply(&detections[free_high[dj]])?;
            confirmed[ti] = true;
            let k = high.iter().position(|&h| h == free_high[dj]).expect("free detection comes from the high set");
            high_used[k] = true;
        }
        for (k, &i) in tentative.iter().enumerate() {
            if !confirmed[k] {
                self.tracks[i].status = TrackStatus::Removed;
            }
        }

        // Stage 4: spawn.
        for (k, &j) in high.iter().enumerate() {
            let det = &detections[j];
            if high_used[k] || det.score < cfg.new_track_thresh {
                continue;
            }
            let state = KalmanState::init(&det.bbox);
            let bbox = state.to_box();
            self.tracks.push(Track {
                id: self.next_id,
                state,
                status: TrackStatus::Tentative,
                last_frame: frame,
                frames_since_update: 0,
                history: alloc::vec![(frame, bbox)],
                score: det.score,
            });
            self.next_id += 1;
        }

        // Stage 5: expire.
        for t in &mut self.tracks {
            t.frames_since_update = frame - t.last_frame;
            if t.status == TrackStatus::Lost && t.frames_since_update > cfg.track_buffer {
                t.status = TrackStatus::Removed;
            }
        }
        let (gone, alive): (Vec<Track>, Vec<Track>) =
            self.tracks.drain(..).partition(|t| t.status == TrackStatus::Removed);
        self.tracks = alive;
        self.removed.extend(gone);

        Ok(self
            .tracks
            .iter()
            .filter(|t| t.status == TrackStatus::Active)
            .map(|t| TrackedBox { id: t.id, frame, bbox: t.state.to_box(), score: t.score })
            .collect())
    }

    /// Max-similarity assignment of `tracks` to `dets`, keeping pairs whose
    /// similarity exceeds `min_similarity`. Returns positions into both lists.
    fn associate(
        &self,
        tracks: &[usize],
        detections: &[Detection],
        dets: &[usize],
        fuse_score: bool,
        min_similarity: f64,
    ) -> Result<Vec<(usize, usize)>> {
        if tracks.is_empty() || dets.is_empty() {
            return Ok(Vec::new());
        }
        let boxes: Vec<BoundingBox> = tracks.iter().map(|&i| self.tracks[i].state.to_box()).collect();
        let weights = WeightMatrix::from_fn(tracks.len(), dets.len(), |r, c| {
            let d = &detections[dets[c]];
            let s = iou(&boxes[r], &d.bbox);
            if fuse_score {
                s * d.score
            } else {
                s
            }
        })?;
        Ok(assign_max_weight(&weights, min_similarity).pairs)
    }
}

/// Runs a tracker over a whole detection sequence. Frames between the first
/// and last detection frame that carry no detections still advance the
/// tracker.
pub fn run_sequence(detections: &SequenceAnnotations, config: TrackerConfig) -> Result<SequenceAnnotations> {
    let mut tracker = Tracker::new(config)?;
    let mut out = SequenceAnnotations::with_metadata_of(detections);
    let (Some(first), Some(last)) = (detections.first_frame(), detections.last_frame()) else {
        return Ok(out);
    };
    let mut dets = Vec::new();
    for frame in first..=last {
        dets.clear();
        dets.extend(detections.frame(frame).iter().map(|a| Detection { bbox: a.bbox, score: a.score, frame }));
        for tb in tracker.step(frame, &dets)? {
            out.insert(frame, Annotation::new(Some(tb.id), tb.bbox, tb.score))?;
        }
    }
    Ok(out)
}
