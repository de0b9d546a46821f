//! Detection (precision, recall, mAP) and tracking (MOTA, IDF1, HOTA) metrics.

pub mod detection;
pub mod tracking;

pub use detection::{compute_map, match_frame, DetectionEvalResult, FrameMatch, Gate};
pub use tracking::{
    compute_hota, compute_idf1, compute_mota, evaluate_tracking, HotaResult, MotaResult, TrackingEvalResult,
};

use alloc::vec::Vec;

use crate::geometry::{iou, BoundingBox, WeightMatrix};

/// IoU thresholds 0.50, 0.55, ..., 0.95.
pub fn map_thresholds() -> Vec<f64> {
    (0..10).map(|k| (50 + 5 * k) as f64 / 100.0).collect()
}

/// HOTA localisation thresholds 0.05, 0.10, ..., 0.95.
pub fn hota_alphas() -> Vec<f64> {
    (1..=19).map(|k| (5 * k) as f64 / 100.0).collect()
}

pub(crate) fn iou_matrix(rows: &[BoundingBox], cols: &[BoundingBox]) -> WeightMatrix {
    WeightMatrix::from_fn(rows.len(), cols.len(), |i, j| iou(&rows[i], &cols[j])).expect("IoU is always finite")
}
