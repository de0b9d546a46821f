//! Tracking-by-detection for fish shoals: box geometry and optimal assignment,
//! a constant-velocity Kalman motion model, a two-stage ByteTrack / BoT-SORT
//! style tracker, detection and tracking metrics (mAP, MOTA, IDF1, HOTA),
//! swimming-direction analytics and a deterministic synthetic shoal generator.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod annotations;
pub mod error;
pub mod geometry;
pub mod kalman;
pub mod locomotion;
pub mod metrics;
pub mod synth;
pub mod tracker;

pub use annotations::{Annotation, SequenceAnnotations};
pub use error::{Error, Result};
pub use geometry::{assign_max_weight, iou, Assignment, BoundingBox, WeightMatrix};
pub use kalman::KalmanState;
pub use tracker::{run_sequence, Detection, Track, TrackStatus, TrackedBox, Tracker, TrackerConfig, Variant};
