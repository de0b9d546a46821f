//! Sequence-level tracking metrics: MOTA (CLEAR), IDF1 and HOTA.
//!
//! Boxes without an identity are treated as one-frame identities of their own.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{hota_alphas, iou_matrix};
use crate::annotations::SequenceAnnotations;
use crate::error::{Error, Result};
use crate::geometry::{assign_max_weight, BoundingBox, WeightMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotaResult {
    pub mota: f64,
    pub fp: usize,
    pub fn_: usize,
    pub idsw: usize,
    pub matches: usize,
    pub gt_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Idf1Result {
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaScores {
    pub alpha: f64,
    pub hota: f64,
    pub deta: f64,
    pub assa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HotaResult {
    pub hota: f64,
    pub deta: f64,
    pub assa: f64,
    pub per_alpha: Vec<AlphaScores>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingEvalResult {
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub mota: f64,
    pub hota: f64,
    pub deta: f64,
    pub assa: f64,
    pub idsw: usize,
    pub fp: usize,
    pub fn_: usize,
    pub gt_count: usize,
    pub per_alpha: Vec<AlphaScores>,
}

/// Dense per-frame view of a sequence with identities mapped to `0..n`.
struct Indexed {
    frames: BTreeMap<u32, (Vec<usize>, Vec<BoundingBox>)>,
    counts: Vec<usize>,
    total: usize,
}

impl Indexed {
    fn new(seq: &SequenceAnnotations) -> Self {
        let mut ids: BTreeMap<u32, usize> = BTreeMap::new();
        for id in seq.identities() {
            let k = ids.len();
            ids.insert(id, k);
        }
        let mut counts = vec![0; ids.len()];
        let mut frames = BTreeMap::new();
        for (f, entries) in seq.frames() {
            let mut keys = Vec::with_capacity(entries.len());
            let mut boxes = Vec::with_capacity(entries.len());
            for a in entries {
                let k = match a.id {
                    Some(id) => ids[&id],
                    None => {
                        counts.push(0);
                        counts.len() - 1
                    }
                };
                counts[k] += 1;
                keys.push(k);
                boxes.push(a.bbox);
            }
            frames.insert(f, (keys, boxes));
        }
        let total = counts.iter().sum();
        Self { frames, counts, total }
    }

    fn frame(&self, f: u32) -> (&[usize], &[BoundingBox]) {
        self.frames.get(&f).map_or((&[], &[]), |(k, b)| (k.as_slice(), b.as_slice()))
    }
}

fn all_frames(gt: &Indexed, pred: &Indexed) -> BTreeSet<u32> {
    gt.frames.keys().chain(pred.frames.keys()).copied().collect()
}

/// CLEAR MOTA with per-frame Hungarian matching gated at `iou > iou_gate`.
///
/// Correspondences from the previous frame are kept while they still pass
/// the gate; the rest is matched optimally. An identity switch is counted
/// when a ground-truth identity is matched to a different prediction than
/// the last one it was matched to.
pub fn compute_mota(gt: &SequenceAnnotations, pred: &SequenceAnnotations, iou_gate: f64) -> Result<MotaResult> {
    let g_ix = Indexed::new(gt);
    let p_ix = Indexed::new(pred);
    if g_ix.total == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let mut last_match: BTreeMap<usize, usize> = BTreeMap::new();
    let mut previous: BTreeMap<usize, usize> = BTreeMap::new();
    let (mut fp, mut fn_, mut idsw, mut matches) = (0, 0, 0, 0);

    for f in all_frames(&g_ix, &p_ix) {
        let (gk, gb) = g_ix.frame(f);
        let (pk, pb) = p_ix.frame(f);
        let ious = iou_matrix(gb, pb);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut g_used = vec![false; gk.len()];
        let mut p_used = vec![false; pk.len()];

        for (gi, g) in gk.iter().enumerate() {
            let Some(&p) = previous.get(g) else { continue };
            if let Some(pj) = pk.iter().position(|&k| k == p) {
                if !p_used[pj] && ious.get(gi, pj) > iou_gate {
                    pairs.push((gi, pj));
                    g_used[gi] = true;
                    p_used[pj] = true;
                }
            }
        }

        let rest_g: Vec<usize> = (0..gk.len()).filter(|&i| !g_used[i]).collect();
        let rest_p: Vec<usize> = (0..pk.len()).filter(|&j| !p_used[j]).collect();
        let sub = WeightMatrix::from_fn(rest_g.len(), rest_p.len(), |r, c| ious.get(rest_g[r], rest_p[c]))?;
        for (r, c) in assign_max_weight(&sub, iou_gate).pairs {
            let (gi, pj) = (rest_g[r], rest_p[c]);
            if last_match.get(&gk[gi]).is_some_and(|&prev| prev != pk[pj]) {
                idsw += 1;
            }
            pairs.push((gi, pj));
        }

        previous.clear();
        for &(gi, pj) in &pairs {
            last_match.insert(gk[gi], pk[pj]);
            previous.insert(gk[gi], pk[pj]);
        }
        matches += pairs.len();
        fp += pk.len() - pairs.len();
        fn_ += gk.len() - pairs.len();
    }

    let gt_count = g_ix.total;
    Ok(MotaResult { mota: 1.0 - (fn_ + fp + idsw) as f64 / gt_count as f64, fp, fn_, idsw, matches, gt_count })
}

/// Identity F1 under the optimal global one-to-one identity matching.
pub fn compute_idf1(gt: &SequenceAnnotations, pred: &SequenceAnnotations, iou_gate: f64) -> Result<Idf1Result> {
    let g_ix = Indexed::new(gt);
    let p_ix = Indexed::new(pred);
    if g_ix.total == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let (ng, np) = (g_ix.counts.len(), p_ix.counts.len());
    let mut overlap = vec![0.0f64; ng * np];
    for f in all_frames(&g_ix, &p_ix) {
        let (gk, gb) = g_ix.frame(f);
        let (pk, pb) = p_ix.frame(f);
        let ious = iou_matrix(gb, pb);
        for (gi, &g) in gk.iter().enumerate() {
            for (pj, &p) in pk.iter().enumerate() {
                if ious.get(gi, pj) > iou_gate {
                    overlap[g * np + p] += 1.0;
                }
            }
        }
    }
    let weights = WeightMatrix::from_vec(ng, np, overlap)?;
    let idtp = assign_max_weight(&weights, 0.0).total_weight(&weights) as usize;
    let idfn = g_ix.total - idtp;
    let idfp = p_ix.total - idtp;
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Ok(Idf1Result {
        idf1: ratio(2 * idtp, 2 * idtp + idfp + idfn),
        idp: ratio(idtp, idtp + idfp),
        idr: ratio(idtp, idtp + idfn),
        idtp,
        idfp,
        idfn,
    })
}

/// HOTA with its DetA / AssA decomposition, averaged over α = 0.05..0.95.
///
/// A first pass accumulates a global alignment score for every
/// (gt id, pred id) pair; each frame is then matched once by maximising
/// alignment x IoU, and the matches are thresholded per α.
pub fn compute_hota(gt: &SequenceAnnotations, pred: &SequenceAnnotations) -> Result<HotaResult> {
    let g_ix = Indexed::new(gt);
    let p_ix = Indexed::new(pred);
    if g_ix.total == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let (ng, np) = (g_ix.counts.len(), p_ix.counts.len());
    let frames = all_frames(&g_ix, &p_ix);

    let mut potential = vec![0.0f64; ng * np];
    for &f in &frames {
        let (gk, gb) = g_ix.frame(f);
        let (pk, pb) = p_ix.frame(f);
        if gk.is_empty() || pk.is_empty() {
            continue;
        }
        let sim = iou_matrix(gb, pb);
        let row_sum: Vec<f64> = (0..gk.len()).map(|i| (0..pk.len()).map(|j| sim.get(i, j)).sum()).collect();
        let col_sum: Vec<f64> = (0..pk.len()).map(|j| (0..gk.len()).map(|i| sim.get(i, j)).sum()).collect();
        for (i, &g) in gk.iter().enumerate() {
            for (j, &p) in pk.iter().enumerate() {
                let denom = row_sum[i] + col_sum[j] - sim.get(i, j);
                if denom > f64::EPSILON {
                    potential[g * np + p] += sim.get(i, j) / denom;
                }
            }
        }
    }
    let alignment: Vec<f64> = (0..ng * np)
        .map(|k| {
            let (g, p) = (k / np, k % np);
            let denom = g_ix.counts[g] as f64 + p_ix.counts[p] as f64 - potential[k];
            if denom > 0.0 {
                potential[k] / denom
            } else {
                0.0
            }
        })
        .collect();

    let alphas = hota_alphas();
    let na = alphas.len();
    let mut tp = vec![0usize; na];
    let mut fn_ = vec![0usize; na];
    let mut fp = vec![0usize; na];
    let mut match_counts = vec![BTreeMap::<(usize, usize), usize>::new(); na];

    for &f in &frames {
        let (gk, gb) = g_ix.frame(f);
        let (pk, pb) = p_ix.frame(f);
        if gk.is_empty() || pk.is_empty() {
            for a in 0..na {
                fn_[a] += gk.len();
                fp[a] += pk.len();
            }
            continue;
        }
        let sim = iou_matrix(gb, pb);
        let score = WeightMatrix::from_fn(gk.len(), pk.len(), |i, j| alignment[gk[i] * np + pk[j]] * sim.get(i, j))?;
        let pairs = assign_max_weight(&score, f64::NEG_INFINITY).pairs;
        for (a, &alpha) in alphas.iter().enumerate() {
            let mut n = 0;
            for &(i, j) in &pairs {
                if sim.get(i, j) >= alpha - f64::EPSILON {
                    n += 1;
                    *match_counts[a].entry((gk[i], pk[j])).or_insert(0) += 1;
                }
            }
            tp[a] += n;
            fn_[a] += gk.len() - n;
            fp[a] += pk.len() - n;
        }
    }

    let per_alpha: Vec<AlphaScores> = (0..na)
        .map(|a| {
            let mut ass_sum = 0.0;
            for (&(g, p), &c) in &match_counts[a] {
                let denom = (g_ix.counts[g] + p_ix.counts[p] - c).max(1);
                ass_sum += c as f64 * (c as f64 / denom as f64);
            }
            let assa = ass_sum / tp[a].max(1) as f64;
            let deta = tp[a] as f64 / (tp[a] + fn_[a] + fp[a]).max(1) as f64;
            AlphaScores { alpha: alphas[a], hota: libm::sqrt(deta * assa), deta, assa }
        })
        .collect();
    let mean = |f: fn(&AlphaScores) -> f64| per_alpha.iter().map(f).sum::<f64>() / na as f64;
    Ok(HotaResult { hota: mean(|s| s.hota), deta: mean(|s| s.deta), assa: mean(|s| s.assa), per_alpha })
}

/// MOTA, IDF1 and HOTA in one report. `iou_gate` applies to MOTA and IDF1.
pub fn evaluate_tracking(
    gt: &SequenceAnnotations,
    pred: &SequenceAnnotations,
    iou_gate: f64,
) -> Result<TrackingEvalResult> {
    let mota = compute_mota(gt, pred, iou_gate)?;
    let id = compute_idf1(gt, pred, iou_gate)?;
    let hota = compute_hota(gt, pred)?;
    Ok(TrackingEvalResult {
        idf1: id.idf1,
        idp: id.idp,
        idr: id.idr,
        mota: mota.mota,
        hota: hota.hota,
        deta: hota.deta,
        assa: hota.assa,
        idsw: mota.idsw,
        fp: mota.fp,
        fn_: mota.fn_,
        gt_count: mota.gt_count,
        per_alpha: hota.per_alpha,
    })
}
