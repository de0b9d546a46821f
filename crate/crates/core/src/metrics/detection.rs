//! Frame-level detection evaluation for a single class.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{iou_matrix, map_thresholds};
use crate::annotations::SequenceAnnotations;
use crate::geometry::{assign_max_weight, BoundingBox};

/// How a matched pair's IoU is compared with a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// `iou > threshold`
    Strict,
    /// `iou >= threshold`
    Inclusive,
}

impl Gate {
    pub fn passes(self, iou: f64, threshold: f64) -> bool {
        match self {
            Gate::Strict => iou > threshold,
            Gate::Inclusive => iou >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrameMatch {
    /// `(pred, gt)` index pairs.
    pub tp_pairs: Vec<(usize, usize)>,
    pub fp: Vec<usize>,
    pub fn_: Vec<usize>,
}

/// Max-IoU Hungarian matching of one frame, keeping pairs with IoU strictly
/// above `iou_thresh`.
pub fn match_frame(gt: &[BoundingBox], preds: &[BoundingBox], iou_thresh: f64) -> FrameMatch {
    match_frame_gated(gt, preds, iou_thresh, Gate::Strict)
}

pub fn match_frame_gated(gt: &[BoundingBox], preds: &[BoundingBox], iou_thresh: f64, gate: Gate) -> FrameMatch {
    let ious = iou_matrix(preds, gt);
    let pairs = assign_max_weight(&ious, f64::NEG_INFINITY).pairs;
    gate_pairs(&pairs, |p, g| ious.get(p, g), preds.len(), gt.len(), iou_thresh, gate)
}

fn gate_pairs(
    pairs: &[(usize, usize)],
    iou_of: impl Fn(usize, usize) -> f64,
    n_pred: usize,
    n_gt: usize,
    thresh: f64,
    gate: Gate,
) -> FrameMatch {
    let tp_pairs: Vec<(usize, usize)> =
        pairs.iter().copied().filter(|&(p, g)| gate.passes(iou_of(p, g), thresh)).collect();
    let pred_hit: BTreeSet<usize> = tp_pairs.iter().map(|p| p.0).collect();
    let gt_hit: BTreeSet<usize> = tp_pairs.iter().map(|p| p.1).collect();
    FrameMatch {
        fp: (0..n_pred).filter(|p| !pred_hit.contains(p)).collect(),
        fn_: (0..n_gt).filter(|g| !gt_hit.contains(g)).collect(),
        tp_pairs,
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectionEvalResult {
    pub precision: f64,
    pub recall: f64,
    /// False when there were no predictions; `precision` is then 0.
    pub precision_defined: bool,
    /// False when the ground truth was empty; `recall` is then 0.
    pub recall_defined: bool,
    /// `(iou_threshold, ap)` for 0.50, 0.55, ..., 0.95.
    pub ap_per_threshold: Vec<(f64, f64)>,
    pub map50: f64,
    pub map50_95: f64,
    /// Counts at IoU 0.5 over all predictions.
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

/// Precision, recall and COCO-style mAP of `preds` against `gt`.
///
/// Matching is the per-frame Hungarian assignment on IoU; a matched pair
/// counts as a true positive at threshold `t` when its IoU is `>= t`. AP is
/// the 101-point interpolated area under the confidence-ranked PR curve.
pub fn compute_map(gt: &SequenceAnnotations, preds: &SequenceAnnotations) -> DetectionEvalResult {
    let thresholds = map_thresholds();
    let frames: BTreeSet<u32> = gt.frame_indices().chain(preds.frame_indices()).collect();
    let total_gt = gt.len();

    // (score, frame, index, iou of its Hungarian partner or None)
    let mut ranked: Vec<(f64, u32, usize, Option<f64>)> = Vec::with_capacity(preds.len());
    for &f in &frames {
        let g: Vec<BoundingBox> = gt.frame(f).iter().map(|a| a.bbox).collect();
        let p: Vec<BoundingBox> = preds.frame(f).iter().map(|a| a.bbox).collect();
        let ious = iou_matrix(&p, &g);
        let assignment = assign_max_weight(&ious, f64::NEG_INFINITY);
        for (i, a) in preds.frame(f).iter().enumerate() {
            let partner = assignment.col_of(i).map(|j| ious.get(i, j));
            ranked.push((a.score, f, i, partner));
        }
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let ap_per_threshold: Vec<(f64, f64)> = thresholds
        .iter()
        .map(|&t| {
            let hits: Vec<bool> = ranked.iter().map(|r| r.3.is_some_and(|v| Gate::Inclusive.passes(v, t))).collect();
            (t, interpolated_ap(&hits, total_gt))
        })
        .collect();

    let tp = ranked.iter().filter(|r| r.3.is_some_and(|v| Gate::Inclusive.passes(v, 0.5))).count();
    let fp = ranked.len() - tp;
    let fn_ = total_gt - tp;
    let map50 = ap_per_threshold[0].1;
    let map50_95 = ap_per_threshold.iter().map(|x| x.1).sum::<f64>() / ap_per_threshold.len() as f64;
    DetectionEvalResult {
        precision: if ranked.is_empty() { 0.0 } else { tp as f64 / ranked.len() as f64 },
        recall: if total_gt == 0 { 0.0 } else { tp as f64 / total_gt as f64 },
        precision_defined: !ranked.is_empty(),
        recall_defined: total_gt > 0,
        ap_per_threshold,
        map50,
        map50_95,
        tp,
        fp,
        fn_,
    }
}

/// 101-point interpolated AP for confidence-ranked hit flags.
pub fn interpolated_ap(hits: &[bool], total_gt: usize) -> f64 {
    if total_gt == 0 || hits.is_empty() {
        return 0.0;
    }
    let mut precision = Vec::with_capacity(hits.len());
    let mut recall = Vec::with_capacity(hits.len());
    let mut tp = 0usize;
    for (k, &h) in hits.iter().enumerate() {
        tp += usize::from(h);
        precision.push(tp as f64 / (k + 1) as f64);
        recall.push(tp as f64 / total_gt as f64);
    }
    // Precision envelope: max precision at any recall to the right.
    for k in (0..precision.len().saturating_sub(1)).rev() {
        precision[k] = precision[k].max(precision[k + 1]);
    }
    let mut sum = 0.0;
    let mut k = 0;
    for step in 0..=100 {
        let r = step as f64 / 100.0;
        while k < recall.len() && recall[k] < r {
            k += 1;
        }
        if k < recall.len() {
            sum += precision[k];
        }
    }
    sum / 101.0
}
