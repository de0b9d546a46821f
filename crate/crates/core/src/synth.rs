//! Deterministic synthetic shoals and corrupted detection streams.
//!
//! Randomness comes from `Xoshiro256PlusPlus` seeded with
//! `seed_from_u64(seed)`. Fish `i` draws from the generator after `i` calls
//! to `jump()`, so each fish owns a non-overlapping stream and adding fish
//! never perturbs existing trajectories. Per frame a fish draws, in order:
//! one uniform (turn test), one uniform (new heading, only if turning) and
//! one normal (heading noise).
//!
//! Fish move at a constant per-fish speed along a heading that is jittered
//! by Gaussian noise every frame and occasionally replaced by a uniformly
//! random one. Walls reflect the heading specularly. A fish's box is
//! `length x length/2` and does not rotate.

use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, Normal, Poisson, StandardUniform};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::annotations::{Annotation, SequenceAnnotations};
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialHeading {
    /// Uniform over the circle.
    Uniform,
    /// Left or right with equal probability.
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShoalScenario {
    pub seed: u64,
    pub fish_count: u32,
    pub frames: u32,
    /// Tank width and height in pixels.
    pub tank: (f64, f64),
    /// Per-fish speed range in pixels/frame.
    pub speed_range: (f64, f64),
    /// Standard deviation of the per-frame heading jitter, degrees.
    pub heading_noise_sigma: f64,
    pub turn_probability: f64,
    /// Range of the fish length (box width) in pixels.
    pub box_size_range: (f64, f64),
    pub initial_heading: InitialHeading,
}

impl Default for ShoalScenario {
    fn default() -> Self {
        Self {
            seed: 0,
            fish_count: 20,
            frames: 200,
            tank: (1280.0, 720.0),
            speed_range: (1.0, 4.0),
            heading_noise_sigma: 5.0,
            turn_probability: 0.01,
            box_size_range: (24.0, 48.0),
            initial_heading: InitialHeading::Uniform,
        }
    }
}

fn finite_range(r: (f64, f64)) -> bool {
    r.0.is_finite() && r.1.is_finite() && r.0 <= r.1
}

impl ShoalScenario {
    pub fn validate(&self) -> Result<()> {
        let (w, h) = self.tank;
        if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
            return Err(Error::InvalidScenario("tank must have positive area"));
        }
        if self.fish_count == 0 || self.frames == 0 {
            return Err(Error::InvalidScenario("fish_count and frames must be positive"));
        }
        if !finite_range(self.speed_range) || self.speed_range.0 < 0.0 {
            return Err(Error::InvalidScenario("speed_range must be a non-negative interval"));
        }
        if !(self.heading_noise_sigma.is_finite() && self.heading_noise_sigma >= 0.0) {
            return Err(Error::InvalidScenario("heading_noise_sigma must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.turn_probability) {
            return Err(Error::InvalidScenario("turn_probability outside [0, 1]"));
        }
        let (lo, hi) = self.box_size_range;
        if !finite_range(self.box_size_range) || lo <= 0.0 {
            return Err(Error::InvalidScenario("box_size_range must be a positive interval"));
        }
        if hi >= w || hi / 2.0 >= h {
            return Err(Error::InvalidScenario("boxes do not fit in the tank"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionModel {
    pub miss_rate: f64,
    pub fp_rate_per_frame: f64,
    /// Gaussian noise on left, top, width and height, pixels.
    pub jitter_sigma: f64,
    pub tp_score_mean: f64,
    pub fp_score_mean: f64,
    pub score_sigma: f64,
    /// Length range of false-positive boxes, shaped like the fish boxes.
    pub fp_box_size: (f64, f64),
}

impl CorruptionModel {
    /// No misses, no false positives, no jitter, all scores 1.
    pub fn clean() -> Self {
        Self {
            miss_rate: 0.0,
            fp_rate_per_frame: 0.0,
            jitter_sigma: 0.0,
            tp_score_mean: 1.0,
            fp_score_mean: 0.0,
            score_sigma: 0.0,
            fp_box_size: (24.0, 48.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.miss_rate) {
            return Err(Error::InvalidCorruption("miss_rate outside [0, 1]"));
        }
        let non_neg = |v: f64| v.is_finite() && v >= 0.0;
        if !(non_neg(self.fp_rate_per_frame) && non_neg(self.jitter_sigma) && non_neg(self.score_sigma)) {
            return Err(Error::InvalidCorruption("rates and sigmas must be non-negative"));
        }
        if !(self.tp_score_mean.is_finite() && self.fp_score_mean.is_finite()) {
            return Err(Error::InvalidCorruption("score means must be finite"));
        }
        if !finite_range(self.fp_box_size) || self.fp_box_size.0 <= 0.0 {
            return Err(Error::InvalidCorruption("fp_box_size must be a positive interval"));
        }
        Ok(())
    }
}

impl Default for CorruptionModel {
    fn default() -> Self {
        Self {
            miss_rate: 0.1,
            fp_rate_per_frame: 1.0,
            jitter_sigma: 2.0,
            tp_score_mean: 0.8,
            fp_score_mean: 0.3,
            score_sigma: 0.1,
            fp_box_size: (24.0, 48.0),
        }
    }
}

fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    let u: f64 = StandardUniform.sample(rng);
    lo + (hi - lo) * u
}

fn normal(mean: f64, sigma: f64) -> Normal<f64> {
    Normal::new(mean, sigma).expect("sigma validated as finite and non-negative")
}

fn random_direction(rng: &mut impl RngCore) -> (f64, f64) {
    let theta = uniform(rng, 0.0, core::f64::consts::TAU);
    (libm::cos(theta), libm::sin(theta))
}

/// Reflects `pos` into `[lo, hi]`; returns true if it bounced.
fn reflect(pos: &mut f64, lo: f64, hi: f64) -> bool {
    let mut bounced = false;
    if *pos < lo {
        *pos = 2.0 * lo - *pos;
        bounced = true;
    } else if *pos > hi {
        *pos = 2.0 * hi - *pos;
        bounced = true;
    }
    *pos = pos.clamp(lo, hi);
    bounced
}

/// Ground-truth trajectories for a scenario. Frames are `0..frames` and fish
/// ids `1..=fish_count`.
pub fn generate(scenario: &ShoalScenario) -> Result<SequenceAnnotations> {
    scenario.validate()?;
    let (tank_w, tank_h) = scenario.tank;
    let noise = normal(0.0, scenario.heading_noise_sigma.to_radians());
    let mut master = Xoshiro256PlusPlus::seed_from_u64(scenario.seed);

    let mut trajectories: Vec<Vec<BoundingBox>> = Vec::with_capacity(scenario.fish_count as usize);
    for _ in 0..scenario.fish_count {
        let mut rng = master.clone();
        master.jump();

        let w = uniform(&mut rng, scenario.box_size_range.0, scenario.box_size_range.1);
        let h = w / 2.0;
        let (x_lo, x_hi) = (w / 2.0, tank_w - w / 2.0);
        let (y_lo, y_hi) = (h / 2.0, tank_h - h / 2.0);
        let mut x = uniform(&mut rng, x_lo, x_hi);
        let mut y = uniform(&mut rng, y_lo, y_hi);
        let speed = uniform(&mut rng, scenario.speed_range.0, scenario.speed_range.1);
        let mut heading = match scenario.initial_heading {
            InitialHeading::Uniform => random_direction(&mut rng),
            InitialHeading::Horizontal => {
                if uniform(&mut rng, 0.0, 1.0) < 0.5 {
                    (1.0, 0.0)
                } else {
                    (-1.0, 0.0)
                }
            }
        };

        let mut boxes = Vec::with_capacity(scenario.frames as usize);
        for _ in 0..scenario.frames {
            boxes.push(BoundingBox::from_center(x, y, w, h)?);
            if uniform(&mut rng, 0.0, 1.0) < scenario.turn_probability {
                heading = random_direction(&mut rng);
            }
            let a: f64 = noise.sample(&mut rng);
            let (s, c) = (libm::sin(a), libm::cos(a));
            let dir = (heading.0 * c - heading.1 * s, heading.0 * s + heading.1 * c);
            x += speed * dir.0;
            y += speed * dir.1;
            if reflect(&mut x, x_lo, x_hi) {
                heading.0 = -heading.0;
            }
            if reflect(&mut y, y_lo, y_hi) {
                heading.1 = -heading.1;
            }
        }
        trajectories.push(boxes);
    }

    let mut out = SequenceAnnotations::new();
    out.name = "synthetic".into();
    out.frame_count = Some(scenario.frames);
    out.image_size = Some((libm::ceil(tank_w) as u32, libm::ceil(tank_h) as u32));
    for frame in 0..scenario.frames {
        for (i, t) in trajectories.iter().enumerate() {
            out.insert(frame, Annotation::new(Some(i as u32 + 1), t[frame as usize], 1.0))?;
        }
    }
    Ok(out)
}

/// Turns ground truth into an identity-free detection stream: boxes are
/// dropped with `miss_rate`, jittered, scored, and Poisson-distributed false
/// positives are scattered uniformly over the tank.
///
/// The tank is `gt.image_size`, or the extent of all ground-truth boxes when
/// the size is unknown.
pub fn corrupt(gt: &SequenceAnnotations, model: &CorruptionModel, seed: u64) -> Result<SequenceAnnotations> {
    model.validate()?;
    let (tank_w, tank_h) = match gt.image_size {
        Some((w, h)) => (w as f64, h as f64),
        None => gt
            .frames()
            .flat_map(|(_, e)| e.iter())
            .fold((0.0f64, 0.0f64), |acc, a| (acc.0.max(a.bbox.right()), acc.1.max(a.bbox.bottom()))),
    };
    let jitter = normal(0.0, model.jitter_sigma);
    let tp_score = normal(model.tp_score_mean, model.score_sigma);
    let fp_score = normal(model.fp_score_mean, model.score_sigma);
    let fp_count = (model.fp_rate_per_frame > 0.0)
        .then(|| Poisson::new(model.fp_rate_per_frame).expect("rate validated as positive and finite"));
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);

    let mut out = SequenceAnnotations::with_metadata_of(gt);
    let frames: Vec<u32> = match gt.frame_count {
        Some(n) => (0..n).collect(),
        None => gt.frame_indices().collect(),
    };
    for frame in frames {
        out.touch_frame(frame);
        for a in gt.frame(frame) {
            if uniform(&mut rng, 0.0, 1.0) < model.miss_rate {
                continue;
            }
            let left = a.bbox.left() + jitter.sample(&mut rng);
            let top = a.bbox.top() + jitter.sample(&mut rng);
            let w = (a.bbox.width() + jitter.sample(&mut rng)).max(0.0);
            let h = (a.bbox.height() + jitter.sample(&mut rng)).max(0.0);
            let score = tp_score.sample(&mut rng).clamp(0.0, 1.0);
            out.push_unchecked(frame, Annotation::new(None, BoundingBox::new(left, top, w, h)?, score));
        }
        let n = fp_count.as_ref().map_or(0, |p| p.sample(&mut rng) as u64);
        for _ in 0..n {
            let w = uniform(&mut rng, model.fp_box_size.0, model.fp_box_size.1);
            let h = w / 2.0;
            let left = uniform(&mut rng, 0.0, (tank_w - w).max(0.0));
            let top = uniform(&mut rng, 0.0, (tank_h - h).max(0.0));
            let score = fp_score.sample(&mut rng).clamp(0.0, 1.0);
            out.push_unchecked(frame, Annotation::new(None, BoundingBox::new(left, top, w, h)?, score));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locomotion::{sequence_directions, DirectionParams};

    #[test]
    fn deterministic_in_seed() {
        let s = ShoalScenario { seed: 42, ..ShoalScenario::default() };
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let other = generate(&ShoalScenario { seed: 43, ..s }).unwrap();
        assert_ne!(generate(&s).unwrap(), other);
    }

    #[test]
    fn census() {
        let g = generate(&ShoalScenario::default()).unwrap();
        let tracks = g.tracks();
        assert_eq!(tracks.len(), 20);
        assert!(tracks.values().all(|t| t.len() == 200));
    }

    #[test]
    fn boxes_stay_in_tank() {
        let s = ShoalScenario {
            speed_range: (5.0, 15.0),
            turn_probability: 0.1,
            heading_noise_sigma: 30.0,
            ..ShoalScenario::default()
        };
        let g = generate(&s).unwrap();
        for (_, e) in g.frames() {
            for a in e {
                let b = a.bbox;
                assert!(b.left() >= -1e-9 && b.top() >= -1e-9);
                assert!(b.right() <= s.tank.0 + 1e-9 && b.bottom() <= s.tank.1 + 1e-9);
            }
        }
    }

    #[test]
    fn adding_fish_keeps_existing_trajectories() {
        let a = generate(&ShoalScenario { fish_count: 3, ..ShoalScenario::default() }).unwrap();
        let b = generate(&ShoalScenario { fish_count: 5, ..ShoalScenario::default() }).unwrap();
        let (ta, tb) = (a.tracks(), b.tracks());
        for id in 1..=3 {
            assert_eq!(ta[&id], tb[&id]);
        }
    }

    #[test]
    fn forced_horizontal_geometry_is_exactly_level() {
        let s = ShoalScenario {
            heading_noise_sigma: 0.0,
            turn_probability: 0.0,
            initial_heading: InitialHeading::Horizontal,
            speed_range: (3.0, 9.0),
            ..ShoalScenario::default()
        };
        let samples = sequence_directions(&generate(&s).unwrap(), &DirectionParams::default());
        assert!(!samples.is_empty());
        assert!(samples.iter().all(|d| d.angle == 0.0));
    }

    #[test]
    fn invalid_scenarios() {
        assert!(generate(&ShoalScenario { tank: (0.0, 100.0), ..ShoalScenario::default() }).is_err());
        assert!(generate(&ShoalScenario { fish_count: 0, ..ShoalScenario::default() }).is_err());
        assert!(generate(&ShoalScenario { turn_probability: 1.5, ..ShoalScenario::default() }).is_err());
        assert!(generate(&ShoalScenario { tank: (30.0, 30.0), ..ShoalScenario::default() }).is_err());
    }

    #[test]
    fn clean_corruption_is_identity() {
        let g = generate(&ShoalScenario { fish_count: 5, frames: 30, ..ShoalScenario::default() }).unwrap();
        let d = corrupt(&g, &CorruptionModel::clean(), 9).unwrap();
        for (f, e) in g.frames() {
            let got: Vec<BoundingBox> = d.frame(f).iter().map(|a| a.bbox).collect();
            let want: Vec<BoundingBox> = e.iter().map(|a| a.bbox).collect();
            assert_eq!(got, want);
            assert!(d.frame(f).iter().all(|a| a.id.is_none() && a.score == 1.0));
        }
    }

    #[test]
    fn miss_rate_concentrates() {
        let g = generate(&ShoalScenario { fish_count: 50, frames: 200, ..ShoalScenario::default() }).unwrap();
        assert_eq!(g.len(), 10_000);
        let m = CorruptionModel { miss_rate: 0.5, fp_rate_per_frame: 0.0, ..CorruptionModel::clean() };
        let d = corrupt(&g, &m, 1).unwrap();
        let dropped = 1.0 - d.len() as f64 / g.len() as f64;
        assert!((dropped - 0.5).abs() <= 0.02, "dropped {dropped}");
    }

    #[test]
    fn false_positive_rate_concentrates() {
        let g = generate(&ShoalScenario { fish_count: 1, frames: 1000, ..ShoalScenario::default() }).unwrap();
        let m = CorruptionModel { miss_rate: 1.0, fp_rate_per_frame: 2.0, ..CorruptionModel::clean() };
        let d = corrupt(&g, &m, 3).unwrap();
        let n = d.len() as f64;
        assert!((n - 2000.0).abs() <= 3.0 * 2000f64.sqrt(), "fps {n}");
        for (_, e) in d.frames() {
            for a in e {
                assert!(a.id.is_none());
                assert!(a.bbox.right() <= 1280.0 && a.bbox.bottom() <= 720.0);
                assert!((0.0..=1.0).contains(&a.score));
            }
        }
    }
}
