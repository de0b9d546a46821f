//! Swimming-direction and speed distributions derived from tracks.
//!
//! Per-frame center displacements are averaged over windows of consecutive
//! displacements. The mean vector is mirrored onto the right half-plane, so
//! the angle runs from -90° (straight down) to +90° (straight up) with 0°
//! meaning horizontal swimming in either direction.

use alloc::vec::Vec;

use crate::annotations::SequenceAnnotations;
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

pub const DEFAULT_MIN_TRACK_LEN: usize = 5;
pub const DEFAULT_WINDOW: usize = 5;
pub const DEFAULT_DIRECTION_BINS: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionSample {
    /// Degrees in `[-90, 90]`, positive is upward in the image.
    pub angle: f64,
    /// Pixels per frame.
    pub magnitude: f64,
    pub track_id: u32,
    pub window_start_frame: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionParams {
    /// Tracks with fewer positions are discarded.
    pub min_len: usize,
    /// Displacements averaged per sample.
    pub window: usize,
    /// Displacements between window starts; equal to `window` for
    /// non-overlapping windows.
    pub stride: usize,
}

impl Default for DirectionParams {
    fn default() -> Self {
        Self { min_len: DEFAULT_MIN_TRACK_LEN, window: DEFAULT_WINDOW, stride: DEFAULT_WINDOW }
    }
}

impl DirectionParams {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.stride == 0 {
            return Err(Error::InvalidConfig("window and stride must be at least 1"));
        }
        Ok(())
    }
}

/// Direction samples for one track. `history` must have strictly increasing
/// frames; a displacement spanning a gap is divided by the gap length.
pub fn track_directions(
    track_id: u32,
    history: &[(u32, BoundingBox)],
    params: &DirectionParams,
) -> Vec<DirectionSample> {
    let mut out = Vec::new();
    if history.len() < params.min_len.max(2) || params.window == 0 || params.stride == 0 {
        return out;
    }
    let steps: Vec<(f64, f64)> = history
        .windows(2)
        .map(|w| {
            let (x0, y0) = w[0].1.center();
            let (x1, y1) = w[1].1.center();
            let dt = w[1].0.saturating_sub(w[0].0).max(1) as f64;
            ((x1 - x0) / dt, (y1 - y0) / dt)
        })
        .collect();
    let mut start = 0;
    while start + params.window <= steps.len() {
        let (sx, sy) = steps[start..start + params.window].iter().fold((0.0, 0.0), |a, s| (a.0 + s.0, a.1 + s.1));
        let n = params.window as f64;
        let (dx, dy) = (sx / n, sy / n);
        out.push(DirectionSample {
            angle: mirrored_angle(dx, dy),
            magnitude: libm::hypot(dx, dy),
            track_id,
            window_start_frame: history[start].0,
        });
        start += params.stride;
    }
    out
}

/// Angle of `(|dx|, -dy)` in degrees; image y points down.
pub fn mirrored_angle(dx: f64, dy: f64) -> f64 {
    let a = libm::atan2(-dy, dx.abs()).to_degrees().clamp(-90.0, 90.0);
    // Avoid -0 for stationary or horizontal motion.
    if a == 0.0 {
        0.0
    } else {
        a
    }
}

/// Samples from every identity in a tracks sequence, in id order.
pub fn sequence_directions(tracks: &SequenceAnnotations, params: &DirectionParams) -> Vec<DirectionSample> {
    tracks.tracks().iter().flat_map(|(&id, h)| track_directions(id, h, params)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Samples beyond the last edge, already included in the last bin.
    pub overflow: u64,
}

impl Histogram {
    fn uniform(lo: f64, hi: f64, bins: usize) -> Self {
        let bin_edges = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
        Self { bin_edges, counts: alloc::vec![0; bins], overflow: 0 }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts divided by the total, or `None` when there are no samples.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let total = self.total();
        (total > 0).then(|| self.counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    /// Index of the most populated bin (lowest index on ties).
    pub fn modal_bin(&self) -> Option<usize> {
        if self.total() == 0 {
            return None;
        }
        let max = *self.counts.iter().max()?;
        self.counts.iter().position(|&c| c == max)
    }

    pub fn bin_range(&self, i: usize) -> (f64, f64) {
        (self.bin_edges[i], self.bin_edges[i + 1])
    }
}

/// Uniform bins over `[-90, 90]`, half-open `[a, b)` except the last, which
/// also holds +90.
pub fn direction_histogram(samples: &[DirectionSample], bins: usize) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidHistogram("bins must be at least 1"));
    }
    let mut h = Histogram::uniform(-90.0, 90.0, bins);
    for s in samples {
        let k = libm::floor((s.angle + 90.0) * bins as f64 / 180.0);
        let k = if k < 0.0 { 0 } else { (k as usize).min(bins - 1) };
        h.counts[k] += 1;
    }
    Ok(h)
}

/// Uniform bins over `[0, max_magnitude]`, right-closed `(a, b]` with zero
/// in the first bin. Larger magnitudes land in the last bin and are counted
/// in `overflow`.
pub fn magnitude_histogram(samples: &[DirectionSample], bins: usize, max_magnitude: f64) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidHistogram("bins must be at least 1"));
    }
    if !(max_magnitude > 0.0 && max_magnitude.is_finite()) {
        return Err(Error::InvalidHistogram("max_magnitude must be positive"));
    }
    let mut h = Histogram::uniform(0.0, max_magnitude, bins);
    for s in samples {
        let k = if s.magnitude > max_magnitude {
            h.overflow += 1;
            bins - 1
        } else {
            let k = libm::ceil(s.magnitude * bins as f64 / max_magnitude) - 1.0;
            if k < 0.0 {
                0
            } else {
                (k as usize).min(bins - 1)
            }
        };
        h.counts[k] += 1;
    }
    Ok(h)
}
